//! Concrete right modules `E ⊂ B(G, H)` over an algebra `B ⊂ B(G)`.
//!
//! The inner product is `⟨x, y⟩ = x*y`. Every module also determines the
//! commuting pair on its reachable space `H = span E G`: the lifted
//! commutant `ρ'(B')` and the adjointable operators `B^a(E) = ρ'(B')'`.

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Representation};
use crate::error::{Error, Result};
use crate::numeric::{
    column_space, fro, hs_orthonormalize, hstack, identity, solve_intertwiners, CMatrix,
    OperatorSpan, Tolerance,
};

#[derive(Debug, Clone)]
pub struct ConcreteModule {
    algebra: Algebra,
    target_dim: usize,
    span: OperatorSpan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Found,
    Impossible,
    Unknown,
}

/// Per-block rank record: a unit vector needs `available_rank ≥ size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRank {
    pub block: usize,
    pub size: usize,
    pub available_rank: usize,
}

#[derive(Debug, Clone)]
pub struct UnitCertificate {
    pub verdict: Verdict,
    pub witness: Option<CMatrix>,
    pub obstruction: Vec<BlockRank>,
    /// `‖ξ*ξ − 1‖_F` for a found witness.
    pub residual: Option<f64>,
}

/// `H` and `ρ'` of a module, in coordinates of the reachable span.
#[derive(Debug, Clone)]
pub struct InducedRep {
    /// Orthonormal basis of `span E G` inside the ambient target, as columns.
    pub coords: CMatrix,
    pub rho_prime: Representation,
}

impl InducedRep {
    pub fn h_dim(&self) -> usize {
        self.coords.ncols()
    }

    /// `B^a(E) = ρ'(B')'` acting on `C^h`; its defining representation is `π`.
    pub fn adjointables(&self, tol: &Tolerance) -> Result<Algebra> {
        if self.h_dim() == 0 {
            return Err(Error::Refused("the zero module has no adjointable algebra".into()));
        }
        let (img, _) = self.rho_prime.image_algebra_partial(tol)?;
        img.commutant(tol)
    }

    pub fn pi(&self, tol: &Tolerance) -> Result<Representation> {
        Ok(self.adjointables(tol)?.defining_representation())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TotalityReport {
    pub total: bool,
    pub reachable_dim: usize,
    pub target_dim: usize,
}

/// A module cut down to the blocks of `B` it actually sees.
#[derive(Debug, Clone)]
pub struct RangeRestriction {
    /// `B_E` acting on the range of its unit.
    pub algebra: Algebra,
    /// Isometry from the new source space into `G`.
    pub embedding: CMatrix,
    pub module: ConcreteModule,
    /// Indices of the retained blocks of `B`.
    pub kept_blocks: Vec<usize>,
}

impl ConcreteModule {
    /// Right `B`-module generated by `generators`, validated.
    pub fn new(
        algebra: &Algebra,
        target_dim: usize,
        generators: &[CMatrix],
        tol: &Tolerance,
    ) -> Result<ConcreteModule> {
        let shape = (target_dim, algebra.rep_dim());
        let start = hs_orthonormalize(shape, generators, tol)?;
        let span = right_closure(&start, algebra, tol)?;
        // every element is a sum of g b, so generator pairs decide membership
        let mut residual = 0.0f64;
        for (i, x) in generators.iter().enumerate() {
            for y in &generators[i..] {
                let scale = fro(x) * fro(y);
                if scale > 0.0 {
                    residual = residual.max(algebra.span().residual(&(x.adjoint() * y)) / scale);
                }
            }
        }
        let m = ConcreteModule {
            algebra: algebra.clone(),
            target_dim,
            span,
        };
        if !tol.accepts(residual, 1.0) {
            return Err(Error::InnerProductEscapes { residual });
        }
        Ok(m)
    }

    /// Wraps a span already known to be a module.
    pub(crate) fn from_span(algebra: &Algebra, span: OperatorSpan) -> ConcreteModule {
        debug_assert_eq!(span.shape().1, algebra.rep_dim());
        ConcreteModule {
            algebra: algebra.clone(),
            target_dim: span.shape().0,
            span,
        }
    }

    /// `B` as a right module over itself.
    pub fn identity(algebra: &Algebra) -> ConcreteModule {
        ConcreteModule::from_span(algebra, algebra.span().clone())
    }

    pub fn zero(algebra: &Algebra, target_dim: usize) -> ConcreteModule {
        ConcreteModule::from_span(algebra, OperatorSpan::empty(target_dim, algebra.rep_dim()))
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn span(&self) -> &OperatorSpan {
        &self.span
    }

    pub fn dim(&self) -> usize {
        self.span.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.span.is_empty()
    }

    pub fn basis(&self) -> Vec<CMatrix> {
        self.span.basis()
    }

    pub fn inner(&self, x: &CMatrix, y: &CMatrix) -> CMatrix {
        x.adjoint() * y
    }

    pub fn contains(&self, x: &CMatrix, tol: &Tolerance) -> (bool, f64) {
        self.span.contains(x, tol)
    }

    /// Largest distance of a basis inner product from `B`.
    pub fn inner_product_residual(&self) -> f64 {
        let basis = self.basis();
        let mut worst = 0.0f64;
        for (i, x) in basis.iter().enumerate() {
            for y in &basis[i..] {
                worst = worst.max(self.algebra.span().residual(&(x.adjoint() * y)));
            }
        }
        worst
    }

    /// Largest distance of `x b` from the span over basis pairs.
    pub fn right_invariance_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for x in self.basis() {
            for b in self.algebra.generators() {
                worst = worst.max(self.span.residual(&(&x * b)));
            }
        }
        worst
    }

    /// All basis elements side by side: its column space is `span E G`.
    pub fn columns(&self) -> CMatrix {
        hstack(self.target_dim, &self.basis())
    }

    /// Orthonormal basis of `span E G` inside the target, as columns.
    pub fn reachable_space(&self, tol: &Tolerance) -> CMatrix {
        column_space(&self.columns(), tol).0
    }

    /// The same module with every element composed with `op` on the left.
    pub fn map_left(&self, op: &CMatrix, tol: &Tolerance) -> Result<ConcreteModule> {
        let images: Vec<CMatrix> = self.basis().iter().map(|x| op * x).collect();
        let span = hs_orthonormalize((op.nrows(), self.algebra.rep_dim()), &images, tol)?;
        Ok(ConcreteModule::from_span(&self.algebra, span))
    }

    /// The module re-coordinatized onto its reachable span, with that basis.
    pub fn reduced(&self, tol: &Tolerance) -> Result<(ConcreteModule, CMatrix)> {
        let q = self.reachable_space(tol);
        let m = self.map_left(&q.adjoint(), tol)?;
        Ok((m, q))
    }

    /// True when `span ⟨E, E⟩` is all of `B`, i.e. `E p_k ≠ 0` for every block.
    ///
    /// The inner products span an ideal, and ideals of a multimatrix algebra
    /// are sums of blocks, so testing one central projection per block suffices.
    pub fn is_full(&self, tol: &Tolerance) -> bool {
        let basis = self.basis();
        (0..self.algebra.blocks().len()).all(|k| {
            let p = self.algebra.central_projection(k);
            basis.iter().any(|x| fro(&(x * &p)) > tol.cutoff(1.0))
        })
    }

    /// Decides whether `E` contains `ξ` with `⟨ξ, ξ⟩ = 1`.
    ///
    /// For block `k` the vectors `x f_k` (with `f_k` the first frame vector of
    /// the block) span a space isometric to `E e^{(k)}_{11}`. A unit vector
    /// needs `n_k` orthonormal elements there, so the block is feasible iff
    /// that space has dimension at least `n_k`; the witness is then assembled
    /// from such elements with the block's matrix units.
    pub fn unit_vector_certificate(&self, tol: &Tolerance) -> UnitCertificate {
        let basis = self.basis();
        let mut verdict = Verdict::Found;
        let mut obstruction = Vec::new();
        let mut xi = CMatrix::zeros(self.target_dim, self.algebra.rep_dim());
        for (k, b) in self.algebra.blocks().iter().enumerate() {
            let f = self.algebra.frame_vector(k, 0, 0);
            let m = CMatrix::from_fn(self.target_dim, basis.len(), |r, s| (&basis[s] * &f)[r]);
            let (sigma, _, v_cols) = sorted_svd(&m);
            let largest = sigma.first().copied().unwrap_or(0.0);
            let cut = tol.cutoff(largest.max(1.0));
            let strict = sigma.iter().filter(|&&s| s > cut * 1e2).count();
            let loose = sigma.iter().filter(|&&s| s > cut * 1e-2).count();
            let rank = sigma.iter().filter(|&&s| s > cut).count();
            obstruction.push(BlockRank {
                block: k,
                size: b.size,
                available_rank: rank,
            });
            if loose < b.size {
                verdict = Verdict::Impossible;
                continue;
            }
            if strict < b.size {
                if verdict == Verdict::Found {
                    verdict = Verdict::Unknown;
                }
                continue;
            }
            let e00 = self.algebra.matrix_unit(k, 0, 0);
            for i in 0..b.size {
                // x with x f_k = u_i, cut to E e_11
                let mut x = CMatrix::zeros(self.target_dim, self.algebra.rep_dim());
                for (s, y) in basis.iter().enumerate() {
                    x += y * (v_cols[(s, i)] / sigma[i]);
                }
                xi += x * &e00 * self.algebra.matrix_unit(k, 0, i);
            }
        }
        if verdict != Verdict::Found {
            return UnitCertificate {
                verdict,
                witness: None,
                obstruction,
                residual: None,
            };
        }
        let residual = fro(&(xi.adjoint() * &xi - identity(self.algebra.rep_dim())));
        UnitCertificate {
            verdict,
            witness: Some(xi),
            obstruction,
            residual: Some(residual),
        }
    }

    /// The lifted commutant `ρ'` on `H = span E G`.
    ///
    /// `ρ'(b')` is characterized by `ρ'(b') x = x b'` for all `x ∈ E`; summing
    /// over a basis gives `ρ'(b') S = Σ x_s b' x_s*` with `S = Σ x_s x_s*`,
    /// which is invertible on `H`.
    pub fn induced_rep(&self, tol: &Tolerance) -> Result<InducedRep> {
        let q = self.reachable_space(tol);
        let h = q.ncols();
        let xs: Vec<CMatrix> = self.basis().iter().map(|x| q.adjoint() * x).collect();
        let mut s = CMatrix::zeros(h, h);
        for x in &xs {
            s += x * x.adjoint();
        }
        let s_inv = s
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Numeric("frame operator of the module is singular".into()))?;
        let bprime = self.algebra.commutant(tol)?;
        let rho_prime = Representation::from_fn(&bprime, h, |b| {
            let mut acc = CMatrix::zeros(h, h);
            for x in &xs {
                acc += x * b * x.adjoint();
            }
            acc * &s_inv
        })?;
        Ok(InducedRep {
            coords: q,
            rho_prime,
        })
    }

    /// Whether `span E G` is the whole target space.
    pub fn check_totality(&self, tol: &Tolerance) -> TotalityReport {
        let reachable_dim = if self.is_empty() {
            0
        } else {
            self.reachable_space(tol).ncols()
        };
        TotalityReport {
            total: self.target_dim > 0 && reachable_dim == self.target_dim,
            reachable_dim,
            target_dim: self.target_dim,
        }
    }

    /// Passes to a full module over `B_E = span ⟨E, E⟩`, acting on the range
    /// of its unit.
    pub fn restrict_to_range(&self, tol: &Tolerance) -> Result<RangeRestriction> {
        let basis = self.basis();
        let kept: Vec<usize> = (0..self.algebra.blocks().len())
            .filter(|&k| {
                let p = self.algebra.central_projection(k);
                basis.iter().any(|x| fro(&(x * &p)) > tol.cutoff(1.0))
            })
            .collect();
        if kept.is_empty() {
            return Err(Error::Refused("the zero module has no range algebra".into()));
        }
        let blocks: Vec<_> = kept.iter().map(|&k| self.algebra.blocks()[k]).collect();
        let cols: Vec<CMatrix> = kept
            .iter()
            .map(|&k| {
                let b = self.algebra.blocks()[k];
                let start = self.algebra.coordinate(k, 0, 0);
                self.algebra
                    .frame()
                    .columns(start, b.size * b.multiplicity)
                    .into_owned()
            })
            .collect();
        let embedding = hstack(self.algebra.rep_dim(), &cols);
        let algebra = Algebra::with_frame(blocks, identity(embedding.ncols()));
        let images: Vec<CMatrix> = basis.iter().map(|x| x * &embedding).collect();
        let span = hs_orthonormalize((self.target_dim, embedding.ncols()), &images, tol)?;
        Ok(RangeRestriction {
            module: ConcreteModule::from_span(&algebra, span),
            algebra,
            embedding,
            kept_blocks: kept,
        })
    }
}

/// `span {x b}` over `x` in `start` and `b` in a basis of `B`, grown one
/// basis element at a time so no step factors more than `dim start` columns.
fn right_closure(start: &OperatorSpan, algebra: &Algebra, tol: &Tolerance) -> Result<OperatorSpan> {
    let shape = start.shape();
    let len = shape.0 * shape.1;
    if start.is_empty() {
        return Ok(start.clone());
    }
    let xs = start.basis();
    let mut q = start.stack().clone();
    for b in algebra.basis() {
        let mut cand = CMatrix::zeros(len, xs.len());
        for (j, x) in xs.iter().enumerate() {
            cand.column_mut(j).copy_from_slice((x * &b).as_slice());
        }
        let floor = tol.cutoff(crate::numeric::svd(&cand).values[0]);
        let mut resid = &cand - &q * (q.adjoint() * &cand);
        resid -= &q * (q.adjoint() * &resid);
        let d = crate::numeric::svd(&resid);
        let keep = d.values.iter().take_while(|&&v| v > floor).count();
        if keep > 0 {
            q = hstack(len, &[q, d.u.columns(0, keep).into_owned()]);
        }
    }
    let (q, _) = column_space(&q, tol);
    Ok(OperatorSpan::from_orthonormal_stack(shape.0, shape.1, q))
}

/// `{x ∈ B(G, H) : ρ'(b') x = x b'}` as a module over `B`.
pub fn intertwiner_module(
    algebra: &Algebra,
    rho_prime: &Representation,
    tol: &Tolerance,
) -> Result<ConcreteModule> {
    let bprime = algebra.commutant(tol)?;
    bprime.ensure_same(
        rho_prime.algebra(),
        tol,
        "representation is not of the commutant of the module algebra",
    )?;
    let gens = bprime.generators();
    let left: Vec<CMatrix> = gens.iter().map(|g| rho_prime.apply(g)).collect();
    let span = solve_intertwiners(
        &left,
        &gens,
        (rho_prime.space_dim(), algebra.rep_dim()),
        tol,
    )?;
    Ok(ConcreteModule::from_span(algebra, span))
}

/// Singular values (descending) with matching left and right singular vectors.
fn sorted_svd(m: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let d = crate::numeric::svd(m);
    (d.values, d.u, d.v)
}

/// Example module with no unit vector: `B = C ⊕ M_2` inside `M_3` and
/// `E` the off-diagonal corners `C^2 ⊕ (C^2)*`.
pub fn corner_module(tol: &Tolerance) -> Result<ConcreteModule> {
    let b = Algebra::multimatrix(&[(1, 1), (2, 1)])?;
    let e = |i, j| crate::numeric::matrix_unit(3, 3, i, j);
    ConcreteModule::new(&b, 3, &[e(1, 0) + e(0, 1), e(2, 0)], tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{matrix_unit, ONE};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn make_module_examples() {
        let m2 = Algebra::full(2).unwrap();
        let e = ConcreteModule::new(&m2, 2, &[identity(2)], &tol()).unwrap();
        assert_eq!(e.dim(), 4);

        let corner = corner_module(&tol()).unwrap();
        assert_eq!(corner.dim(), 4);
        assert!(corner.right_invariance_residual() < 1e-12);

        let mut col = CMatrix::zeros(4, 2);
        col[(0, 0)] = ONE;
        col[(1, 1)] = ONE;
        let e = ConcreteModule::new(&m2, 4, &[col], &tol()).unwrap();
        // oracle: right closure of (I;0) is {(b;0)}
        let oracle: Vec<CMatrix> = m2
            .basis()
            .iter()
            .map(|b| {
                let mut m = CMatrix::zeros(4, 2);
                m.view_mut((0, 0), (2, 2)).copy_from(b);
                m
            })
            .collect();
        let oracle = hs_orthonormalize((4, 2), &oracle, &tol()).unwrap();
        assert_eq!(e.dim(), 4);
        assert!(e.span().same_span(&oracle, &tol()).0);
    }

    #[test]
    fn escaping_inner_products_are_rejected() {
        let cc = Algebra::multimatrix(&[(1, 1), (1, 1)]).unwrap();
        // a row mixing both blocks: x*x has an off-diagonal entry
        let mut x = CMatrix::zeros(1, 2);
        x[(0, 0)] = ONE;
        x[(0, 1)] = ONE;
        assert!(matches!(
            ConcreteModule::new(&cc, 1, &[x], &tol()),
            Err(Error::InnerProductEscapes { .. })
        ));
        let m2 = Algebra::full(2).unwrap();
        assert!(matches!(
            ConcreteModule::new(&m2, 2, &[identity(3)], &tol()),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn fullness_examples() {
        let m2 = Algebra::full(2).unwrap();
        assert!(ConcreteModule::identity(&m2).is_full(&tol()));
        let corner = corner_module(&tol()).unwrap();
        assert!(corner.is_full(&tol()));

        let cc = Algebra::multimatrix(&[(1, 1), (1, 1)]).unwrap();
        let e = ConcreteModule::new(&cc, 1, &[matrix_unit(1, 2, 0, 0)], &tol()).unwrap();
        assert!(!e.is_full(&tol()));
        // oracle: span of the inner products
        let basis = e.basis();
        let products: Vec<CMatrix> = basis
            .iter()
            .flat_map(|x| basis.iter().map(move |y| x.adjoint() * y))
            .collect();
        assert_eq!(hs_orthonormalize((2, 2), &products, &tol()).unwrap().dim(), 1);
    }

    #[test]
    fn fullness_matches_inner_product_span() {
        let b = Algebra::multimatrix(&[(1, 1), (2, 1)]).unwrap();
        let bprime = b.commutant(&tol()).unwrap();
        for (seed, mults) in [[1, 1], [0, 2], [2, 0], [1, 2]].iter().enumerate() {
            let rho = bprime.random_representation(mults, seed as u64).unwrap();
            let e = intertwiner_module(&b, &rho, &tol()).unwrap();
            let basis = e.basis();
            let products: Vec<CMatrix> = basis
                .iter()
                .flat_map(|x| basis.iter().map(move |y| x.adjoint() * y))
                .collect();
            let ip = hs_orthonormalize((3, 3), &products, &tol()).unwrap();
            assert_eq!(e.is_full(&tol()), ip.dim() == b.dim());
            assert_eq!(e.is_full(&tol()), mults.iter().all(|&m| m > 0));
        }
    }

    #[test]
    fn unit_vector_examples() {
        let m2 = Algebra::full(2).unwrap();
        let c = ConcreteModule::identity(&m2).unit_vector_certificate(&tol());
        assert_eq!(c.verdict, Verdict::Found);
        let xi = c.witness.unwrap();
        assert!(fro(&(xi.adjoint() * &xi - identity(2))) < 1e-10);

        let corner = corner_module(&tol()).unwrap();
        let c = corner.unit_vector_certificate(&tol());
        assert_eq!(c.verdict, Verdict::Impossible);
        let m2_block = c.obstruction.iter().find(|r| r.size == 2).unwrap();
        assert_eq!(m2_block.available_rank, 1);

        let mut top = CMatrix::zeros(4, 2);
        top.view_mut((0, 0), (2, 2)).copy_from(&identity(2));
        let mut bottom = CMatrix::zeros(4, 2);
        bottom.view_mut((2, 0), (2, 2)).copy_from(&identity(2));
        let bb = ConcreteModule::new(&m2, 4, &[top, bottom], &tol()).unwrap();
        let c = bb.unit_vector_certificate(&tol());
        assert_eq!(c.verdict, Verdict::Found);
        let xi = c.witness.unwrap();
        assert!(bb.contains(&xi, &tol()).0);
        assert!(c.residual.unwrap() < 1e-10);
    }

    #[test]
    fn induced_rep_examples() {
        // B = B(G) with E = B(G, G ⊗ C^3)
        let m2 = Algebra::full(2).unwrap();
        let gens: Vec<CMatrix> = (0..3)
            .map(|h| {
                let mut x = CMatrix::zeros(6, 2);
                for g in 0..2 {
                    x[(g * 3 + h, g)] = ONE;
                }
                x
            })
            .collect();
        let e = ConcreteModule::new(&m2, 6, &gens, &tol()).unwrap();
        assert_eq!(e.dim(), 12);
        let ind = e.induced_rep(&tol()).unwrap();
        assert_eq!(ind.h_dim(), 6);
        assert_eq!(ind.rho_prime.algebra().dim(), 1);
        assert!(fro(&(ind.rho_prime.apply(&identity(2)) - identity(6))) < 1e-10);
        assert_eq!(ind.adjointables(&tol()).unwrap().dim(), 36);

        // corner module: ρ' swaps the corner weights
        let corner = corner_module(&tol()).unwrap();
        let ind = corner.induced_rep(&tol()).unwrap();
        assert_eq!(ind.h_dim(), 3);
        let bprime = corner.algebra().commutant(&tol()).unwrap();
        let (lambda, mu) = (2.0, 5.0);
        let bp = bprime
            .element_from_blocks(&[
                CMatrix::from_element(1, 1, crate::numeric::real(lambda)),
                CMatrix::from_element(1, 1, crate::numeric::real(mu)),
            ])
            .unwrap();
        let img = &ind.coords * ind.rho_prime.apply(&bp) * ind.coords.adjoint();
        let mut expect = CMatrix::zeros(3, 3);
        expect[(0, 0)] = crate::numeric::real(mu);
        expect[(1, 1)] = crate::numeric::real(lambda);
        expect[(2, 2)] = crate::numeric::real(lambda);
        assert!(fro(&(img - expect)) < 1e-10);
        assert!(ind.rho_prime.homomorphism_residual() < 1e-10);

        // E = B: ρ' is the defining representation of B'
        let b = Algebra::multimatrix(&[(1, 2), (2, 1)]).unwrap();
        let ind = ConcreteModule::identity(&b).induced_rep(&tol()).unwrap();
        let bprime = b.commutant(&tol()).unwrap();
        for x in bprime.basis() {
            let lifted = &ind.coords * ind.rho_prime.apply(&x) * ind.coords.adjoint();
            assert!(fro(&(lifted - &x)) < 1e-10);
        }
    }

    #[test]
    fn adjointables_are_rank_one_span() {
        let corner = corner_module(&tol()).unwrap();
        let ind = corner.induced_rep(&tol()).unwrap();
        let xs: Vec<CMatrix> = corner.basis().iter().map(|x| ind.coords.adjoint() * x).collect();
        let products: Vec<CMatrix> = xs
            .iter()
            .flat_map(|x| xs.iter().map(move |y| x * y.adjoint()))
            .collect();
        let oracle = hs_orthonormalize((3, 3), &products, &tol()).unwrap();
        assert!(ind.adjointables(&tol()).unwrap().span().same_span(&oracle, &tol()).0);
    }

    #[test]
    fn intertwiner_module_examples() {
        let m2 = Algebra::full(2).unwrap();
        let bprime = m2.commutant(&tol()).unwrap();
        let rho = Representation::from_fn(&bprime, 3, |b| identity(3) * (b[(0, 0)])).unwrap();
        let e = intertwiner_module(&m2, &rho, &tol()).unwrap();
        assert_eq!(e.dim(), 6);

        let b = Algebra::multimatrix(&[(1, 1), (2, 1)]).unwrap();
        let bprime = b.commutant(&tol()).unwrap();
        for (p, q) in [(1, 3), (2, 1), (0, 2)] {
            let rho = bprime.random_representation(&[p, q], 11).unwrap();
            let e = intertwiner_module(&b, &rho, &tol()).unwrap();
            assert_eq!(e.dim(), p + 2 * q);
            assert!(e.inner_product_residual() < 1e-10);
            let gens = bprime.basis();
            let left: Vec<CMatrix> = gens.iter().map(|g| rho.apply(g)).collect();
            let oracle = solve_intertwiners(&left, &gens, (p + q, 3), &tol()).unwrap();
            assert!(e.span().same_span(&oracle, &tol()).0);
        }
    }

    #[test]
    fn round_trip_recovers_module() {
        let corner = corner_module(&tol()).unwrap();
        let ind = corner.induced_rep(&tol()).unwrap();
        let back = intertwiner_module(corner.algebra(), &ind.rho_prime, &tol()).unwrap();
        let lifted = back.map_left(&ind.coords, &tol()).unwrap();
        assert!(lifted.span().same_span(corner.span(), &tol()).0);
    }

    #[test]
    fn totality_examples() {
        let b = Algebra::multimatrix(&[(1, 1), (2, 2)]).unwrap();
        let bprime = b.commutant(&tol()).unwrap();
        let rho = bprime.random_representation(&[2, 1], 5).unwrap();
        let e = intertwiner_module(&b, &rho, &tol()).unwrap();
        assert!(e.check_totality(&tol()).total);

        let zero = ConcreteModule::zero(&b, 3);
        let r = zero.check_totality(&tol());
        assert!(!r.total);
        assert_eq!(r.reachable_dim, 0);

        assert!(ConcreteModule::identity(&b).check_totality(&tol()).total);
    }

    #[test]
    fn restriction_gives_full_module() {
        let cc = Algebra::multimatrix(&[(1, 1), (1, 1)]).unwrap();
        let e = ConcreteModule::new(&cc, 1, &[matrix_unit(1, 2, 0, 0)], &tol()).unwrap();
        let r = e.restrict_to_range(&tol()).unwrap();
        assert_eq!(r.kept_blocks, vec![0]);
        assert_eq!(r.algebra.dim(), 1);
        assert!(r.module.is_full(&tol()));
        assert_eq!(r.module.dim(), 1);
    }
}
