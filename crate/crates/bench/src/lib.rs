//! Fixed inputs shared by the benchmarks.

use corrlab_core::cp::depolarizing;
use corrlab_core::{Algebra, CPMap, Correspondence, MultiplicityMatrix, PowersMap, SpatialDatum, Tolerance};

/// `C ⊕ M_2` acting on `C^3`.
pub fn two_blocks() -> Algebra {
    Algebra::multimatrix(&[(1, 1), (2, 1)]).expect("valid blocks")
}

/// A pair of seeded correspondences over [`two_blocks`].
pub fn correspondence_pair(tol: &Tolerance) -> (Correspondence, Correspondence) {
    let b = two_blocks();
    let m1 = MultiplicityMatrix::from_rows(vec![vec![1, 2], vec![1, 0]]);
    let m2 = MultiplicityMatrix::from_rows(vec![vec![0, 1], vec![1, 1]]);
    let e1 = Correspondence::random(&b, &b, &m1, 42, tol).expect("valid multiplicities");
    let e2 = Correspondence::random(&b, &b, &m2, 43, tol).expect("valid multiplicities");
    (e1, e2)
}

pub fn depolarizing_map(n: usize, tol: &Tolerance) -> CPMap {
    depolarizing(n, 0.25, tol).expect("valid parameter")
}

/// Powers map on `M_g` between two standard references of dimension `k`.
pub fn powers_map(g: usize, k: usize, tol: &Tolerance) -> PowersMap {
    let d = || SpatialDatum::standard(k, tol).expect("nonzero dimension");
    PowersMap::build(g, d(), d(), tol).expect("valid datum")
}
