//! Tolerance-aware dense complex linear algebra.
//!
//! Everything downstream reduces to three primitives: orthonormal bases of
//! spans under the Hilbert–Schmidt pairing, kernels of stacked linear
//! systems, and quotients of positive semidefinite Gram matrices by their
//! null space. All rank decisions go through [`Tolerance::cutoff`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };
pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[inline]
pub fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Absolute and relative thresholds used for every rank and residual decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rel_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            abs_eps: 1e-9,
            rel_eps: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(abs_eps: f64, rel_eps: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && (0.0..1.0).contains(&x);
        if !ok(abs_eps) || !ok(rel_eps) {
            return Err(Error::Invalid(format!(
                "tolerances must lie in [0, 1): abs_eps={abs_eps}, rel_eps={rel_eps}"
            )));
        }
        Ok(Tolerance { abs_eps, rel_eps })
    }

    /// A singular value (or Gram eigenvalue) `s` is retained iff `s > cutoff(s_max)`.
    pub fn cutoff(&self, largest: f64) -> f64 {
        self.abs_eps + self.rel_eps * largest
    }

    /// Residual test scaled by the size of the object it measures.
    pub fn accepts(&self, residual: f64, scale: f64) -> bool {
        residual <= self.abs_eps * (1.0 + scale)
    }
}

pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn fro(a: &CMatrix) -> f64 {
    a.norm()
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Column-major vectorization, matching nalgebra's storage order.
pub fn vectorize(a: &CMatrix) -> CVector {
    CVector::from_column_slice(a.as_slice())
}

pub fn unvectorize(v: &[C64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_column_slice(rows, cols, v)
}

pub fn is_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

fn check_finite(a: &CMatrix, what: &str) -> Result<()> {
    if is_finite(a) {
        Ok(())
    } else {
        Err(Error::Invalid(format!("{what} has non-finite entries")))
    }
}

/// Multiply a column by a unit phase so its largest entry is real positive.
fn normalize_phase(col: &mut [C64]) {
    let mut best = 0usize;
    let mut best_abs = -1.0f64;
    for (i, z) in col.iter().enumerate() {
        // earliest index wins among near-ties
        if z.norm() > best_abs + 1e-12 {
            best = i;
            best_abs = z.norm();
        }
    }
    if best_abs > 0.0 {
        let phase = col[best].conj() / best_abs;
        for z in col.iter_mut() {
            *z *= phase;
        }
    }
}

fn to_faer(m: &CMatrix) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn from_faer(m: faer::MatRef<'_, C64>) -> CMatrix {
    CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Thin SVD with singular values in descending order.
pub(crate) struct Svd {
    pub values: Vec<f64>,
    pub u: CMatrix,
    pub v: CMatrix,
}

/// nalgebra's complex SVD loses accuracy on rank-deficient inputs, so the
/// factorization goes through faer.
pub(crate) fn svd(m: &CMatrix) -> Svd {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return Svd {
            values: vec![],
            u: CMatrix::zeros(rows, 0),
            v: CMatrix::zeros(cols, 0),
        };
    }
    let f = to_faer(m);
    let d = f.thin_svd().expect("SVD failed to converge");
    let values = (0..k).map(|i| d.S()[i].re).collect();
    Svd {
        values,
        u: from_faer(d.U()),
        v: from_faer(d.V()),
    }
}

/// Eigen-decomposition of the Hermitian part of `m`, eigenvalues ascending.
pub(crate) fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (vec![], CMatrix::zeros(0, 0));
    }
    let sym = (m + m.adjoint()) * real(0.5);
    let d = to_faer(&sym)
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("eigen-decomposition failed to converge");
    let values = (0..n).map(|i| d.S()[i].re).collect();
    (values, from_faer(d.U()))
}

/// Orthonormal basis (as columns) of the column space of `m`, plus all
/// singular values in descending order.
pub fn column_space(m: &CMatrix, tol: &Tolerance) -> (CMatrix, Vec<f64>) {
    let svd = svd(m);
    let largest = svd.values.first().copied().unwrap_or(0.0);
    let keep = svd
        .values
        .iter()
        .take_while(|&&s| s > tol.cutoff(largest))
        .count();
    let mut q = svd.u.columns(0, keep).into_owned();
    for mut col in q.column_iter_mut() {
        normalize_phase(col.as_mut_slice());
    }
    (q, svd.values)
}

pub fn rank(m: &CMatrix, tol: &Tolerance) -> usize {
    column_space(m, tol).0.ncols()
}

/// Orthonormal basis (as columns) of the kernel of `m`.
pub fn kernel(m: &CMatrix, tol: &Tolerance) -> CMatrix {
    let n = m.ncols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    if m.nrows() == 0 {
        return identity(n);
    }
    // Short systems are padded so the thin SVD yields a complete right basis.
    let work = if m.nrows() < n {
        let mut padded = CMatrix::zeros(n, n);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        padded
    } else {
        m.clone()
    };
    let d = svd(&work);
    let largest = d.values.first().copied().unwrap_or(0.0);
    let cut = tol.cutoff(largest);
    let null: Vec<usize> = (0..n).filter(|&i| d.values[i] <= cut).collect();
    let mut out = CMatrix::zeros(n, null.len());
    for (c, &i) in null.iter().enumerate() {
        out.set_column(c, &d.v.column(i));
    }
    // Re-orthonormalize the kernel block so its basis is deterministic
    // up to the SVD and phase-normalized.
    column_space(&out, tol).0
}

/// A subspace of `B(C^cols, C^rows)` with a Hilbert–Schmidt orthonormal basis.
#[derive(Debug, Clone)]
pub struct OperatorSpan {
    rows: usize,
    cols: usize,
    // vectorized basis, one column per basis element
    stack: CMatrix,
}

impl OperatorSpan {
    pub fn empty(rows: usize, cols: usize) -> Self {
        OperatorSpan {
            rows,
            cols,
            stack: CMatrix::zeros(rows * cols, 0),
        }
    }

    /// Wraps columns that are already orthonormal.
    pub(crate) fn from_orthonormal_stack(rows: usize, cols: usize, stack: CMatrix) -> Self {
        debug_assert_eq!(stack.nrows(), rows * cols);
        OperatorSpan { rows, cols, stack }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn dim(&self) -> usize {
        self.stack.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn stack(&self) -> &CMatrix {
        &self.stack
    }

    pub fn element(&self, i: usize) -> CMatrix {
        unvectorize(self.stack.column(i).as_slice(), self.rows, self.cols)
    }

    pub fn basis(&self) -> Vec<CMatrix> {
        (0..self.dim()).map(|i| self.element(i)).collect()
    }

    /// HS coefficients of `x` against the basis.
    pub fn coefficients(&self, x: &CMatrix) -> CVector {
        self.stack.adjoint() * vectorize(x)
    }

    pub fn combine(&self, coefficients: &[C64]) -> CMatrix {
        let v = &self.stack * CVector::from_column_slice(coefficients);
        unvectorize(v.as_slice(), self.rows, self.cols)
    }

    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let c = self.coefficients(x);
        self.combine(c.as_slice())
    }

    /// Distance from `x` to the span.
    pub fn residual(&self, x: &CMatrix) -> f64 {
        fro(&(x - self.project(x)))
    }

    pub fn contains(&self, x: &CMatrix, tol: &Tolerance) -> (bool, f64) {
        let r = self.residual(x);
        (tol.accepts(r, fro(x)), r)
    }

    /// Largest distance of either basis from the other span; zero iff equal.
    pub fn distance(&self, other: &OperatorSpan) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        let a = &self.stack - &other.stack * (other.stack.adjoint() * &self.stack);
        let b = &other.stack - &self.stack * (self.stack.adjoint() * &other.stack);
        let per_col = |m: &CMatrix| m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
        per_col(&a).max(per_col(&b))
    }

    pub fn same_span(&self, other: &OperatorSpan, tol: &Tolerance) -> (bool, f64) {
        let d = self.distance(other);
        (self.dim() == other.dim() && tol.accepts(d, 1.0), d)
    }

    /// Maximum deviation of the basis Gram matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let g = self.stack.adjoint() * &self.stack;
        fro(&(g - identity(self.dim())))
    }

    pub fn map(&self, f: impl Fn(&CMatrix) -> CMatrix) -> Vec<CMatrix> {
        (0..self.dim()).map(|i| f(&self.element(i))).collect()
    }
}

/// Orthonormal basis of the span of `vectors`, all of shape `shape`.
pub fn hs_orthonormalize(
    shape: (usize, usize),
    vectors: &[CMatrix],
    tol: &Tolerance,
) -> Result<OperatorSpan> {
    let (rows, cols) = shape;
    let mut stacked = CMatrix::zeros(rows * cols, vectors.len());
    for (j, v) in vectors.iter().enumerate() {
        if v.shape() != shape {
            return Err(Error::Shape(format!(
                "expected {rows}x{cols}, found {}x{}",
                v.nrows(),
                v.ncols()
            )));
        }
        check_finite(v, "span generator")?;
        stacked.column_mut(j).copy_from_slice(v.as_slice());
    }
    let (q, _) = column_space(&stacked, tol);
    Ok(OperatorSpan::from_orthonormal_stack(rows, cols, q))
}

/// Solution space of `L_i x = x R_i` for all index-aligned pairs.
pub fn solve_intertwiners(
    left_ops: &[CMatrix],
    right_ops: &[CMatrix],
    shape: (usize, usize),
    tol: &Tolerance,
) -> Result<OperatorSpan> {
    let (rows, cols) = shape;
    if left_ops.len() != right_ops.len() {
        return Err(Error::Shape(format!(
            "{} left operators against {} right operators",
            left_ops.len(),
            right_ops.len()
        )));
    }
    for (l, r) in left_ops.iter().zip(right_ops) {
        if l.shape() != (rows, rows) || r.shape() != (cols, cols) {
            return Err(Error::Shape(format!(
                "intertwiner equation for {rows}x{cols} unknowns got {}x{} and {}x{}",
                l.nrows(),
                l.ncols(),
                r.nrows(),
                r.ncols()
            )));
        }
    }
    let n = rows * cols;
    if n == 0 {
        return Ok(OperatorSpan::empty(rows, cols));
    }
    let eye_rows = identity(rows);
    let eye_cols = identity(cols);
    let mut system = CMatrix::zeros(n * left_ops.len(), n);
    for (i, (l, r)) in left_ops.iter().zip(right_ops).enumerate() {
        let block = kron(&eye_cols, l) - kron(&r.transpose(), &eye_rows);
        system.rows_mut(i * n, n).copy_from(&block);
    }
    let null = kernel(&system, tol);
    Ok(OperatorSpan::from_orthonormal_stack(rows, cols, null))
}

/// Quotient of a positive semidefinite Gram matrix by its null space.
#[derive(Debug, Clone)]
pub struct GramQuotient {
    /// Coordinates of the equivalence classes: `factor.adjoint() * factor ≈ gram`.
    pub factor: CMatrix,
    /// Right inverse of `factor` on its range.
    pub right_inverse: CMatrix,
    /// Retained eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// Most negative eigenvalue seen (zero if none).
    pub min_eigenvalue: f64,
}

impl GramQuotient {
    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }
}

pub fn gram_quotient(gram: &CMatrix, tol: &Tolerance) -> Result<GramQuotient> {
    let n = gram.nrows();
    if gram.ncols() != n {
        return Err(Error::Shape(format!(
            "Gram matrix must be square, found {}x{}",
            gram.nrows(),
            gram.ncols()
        )));
    }
    check_finite(gram, "Gram matrix")?;
    if n == 0 {
        return Ok(GramQuotient {
            factor: CMatrix::zeros(0, 0),
            right_inverse: CMatrix::zeros(0, 0),
            eigenvalues: vec![],
            min_eigenvalue: 0.0,
        });
    }
    let scale = gram.norm();
    let herm = fro(&(gram - gram.adjoint()));
    if !tol.accepts(herm, scale) {
        return Err(Error::NotHermitian { residual: herm });
    }
    let (eigenvalues, eigenvectors) = hermitian_eigen(gram);
    let largest = eigenvalues.iter().cloned().fold(0.0, f64::max);
    let cut = tol.cutoff(largest);
    let min_eigenvalue = eigenvalues.iter().cloned().fold(0.0, f64::min);
    if min_eigenvalue < -cut {
        return Err(Error::NegativeEigenvalue {
            value: min_eigenvalue,
        });
    }
    let mut kept: Vec<(f64, usize)> = eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > cut)
        .map(|(i, &l)| (l, i))
        .collect();
    kept.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let r = kept.len();
    let mut factor = CMatrix::zeros(r, n);
    let mut right_inverse = CMatrix::zeros(n, r);
    for (row, &(lambda, i)) in kept.iter().enumerate() {
        let mut v: Vec<C64> = eigenvectors.column(i).iter().cloned().collect();
        normalize_phase(&mut v);
        let s = lambda.sqrt();
        for (j, z) in v.iter().enumerate() {
            factor[(row, j)] = z.conj() * s;
            right_inverse[(j, row)] = *z / s;
        }
    }
    Ok(GramQuotient {
        factor,
        right_inverse,
        eigenvalues: kept.iter().map(|k| k.0).collect(),
        min_eigenvalue,
    })
}

/// Least-squares linear map `U` with `U * src ≈ dst`, plus the fit residual.
///
/// `src` and `dst` hold spanning vectors as columns. The residual is the
/// largest column error, so a small residual certifies that the assignment
/// `src_j ↦ dst_j` is well defined on the span of `src`.
pub fn fit_linear_map(src: &CMatrix, dst: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, f64)> {
    if src.ncols() != dst.ncols() {
        return Err(Error::Shape(format!(
            "{} source vectors against {} targets",
            src.ncols(),
            dst.ncols()
        )));
    }
    let gram = src * src.adjoint();
    let (eigenvalues, eigenvectors) = hermitian_eigen(&gram);
    let largest = eigenvalues.iter().cloned().fold(0.0, f64::max);
    // squared singular values, so square the relative threshold as well
    let cut = tol.abs_eps * tol.abs_eps + tol.rel_eps * largest;
    let mut pinv = CMatrix::zeros(gram.nrows(), gram.nrows());
    for (i, &l) in eigenvalues.iter().enumerate() {
        if l > cut {
            let v = eigenvectors.column(i);
            pinv += (&v * v.adjoint()) * real(1.0 / l);
        }
    }
    let map = dst * src.adjoint() * pinv;
    let err = &map * src - dst;
    let residual = err.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    Ok((map, residual))
}

/// `‖U*U − 1‖_F` and `‖UU* − 1‖_F`.
pub fn unitarity_residuals(u: &CMatrix) -> (f64, f64) {
    let a = u.adjoint() * u - identity(u.ncols());
    let b = u * u.adjoint() - identity(u.nrows());
    (fro(&a), fro(&b))
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Ginibre matrix with unit-variance complex Gaussian entries.
pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        C64::new(re * s, im * s)
    })
}

/// Haar-distributed unitary via phase-corrected QR.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    let qr = random_matrix(n, n, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        let mut col = out.column_mut(j);
        col *= phase;
    }
    out
}

pub fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> CVector {
    let m = random_matrix(n, 1, rng);
    let norm = m.norm();
    CVector::from_column_slice((m / real(norm)).as_slice())
}

/// Horizontal concatenation; all blocks must share the row count.
pub fn hstack(rows: usize, blocks: &[CMatrix]) -> CMatrix {
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(rows, cols);
    let mut at = 0;
    for b in blocks {
        assert_eq!(b.nrows(), rows, "hstack row mismatch");
        out.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    out
}

/// Block-diagonal sum.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut(a.shape(), b.shape()).copy_from(b);
    out
}

/// Standard matrix unit `e_{ij}` of size `rows × cols`.
pub fn matrix_unit(rows: usize, cols: usize, i: usize, j: usize) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    m[(i, j)] = ONE;
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn collinear_inputs_span_one_dimension() {
        let i2 = identity(2);
        let span = hs_orthonormalize((2, 2), &[i2.clone(), i2 * real(2.0)], &tol()).unwrap();
        assert_eq!(span.dim(), 1);
        assert!(span.orthonormality_residual() < 1e-12);
    }

    #[test]
    fn matrix_units_are_orthonormal() {
        let span = hs_orthonormalize(
            (2, 2),
            &[matrix_unit(2, 2, 0, 0), matrix_unit(2, 2, 0, 1)],
            &tol(),
        )
        .unwrap();
        assert_eq!(span.dim(), 2);
        assert!(span.orthonormality_residual() < 1e-12);
    }

    #[test]
    fn random_matrices_fill_m3() {
        let mut rng = seeded_rng(7);
        let vs: Vec<_> = (0..10).map(|_| random_matrix(3, 3, &mut rng)).collect();
        let span = hs_orthonormalize((3, 3), &vs, &tol()).unwrap();
        // oracle: rank of the 9x10 matrix of vectorizations via its singular values
        let mut stacked = CMatrix::zeros(9, 10);
        for (j, v) in vs.iter().enumerate() {
            stacked.column_mut(j).copy_from_slice(v.as_slice());
        }
        let sv = stacked.svd(false, false).singular_values;
        let oracle = sv.iter().filter(|&&s| s > 1e-8).count();
        assert_eq!(oracle, 9);
        assert_eq!(span.dim(), oracle);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let err = hs_orthonormalize((2, 2), &[identity(3)], &tol());
        assert!(matches!(err, Err(Error::Shape(_))));
    }

    #[test]
    fn schur_lemma_for_full_matrix_algebra() {
        let units: Vec<_> = (0..2)
            .flat_map(|i| (0..2).map(move |j| matrix_unit(2, 2, i, j)))
            .collect();
        let span = solve_intertwiners(&units, &units, (2, 2), &tol()).unwrap();
        assert_eq!(span.dim(), 1);
        let x = span.element(0);
        assert!(fro(&(x.clone() - identity(2) * x[(0, 0)])) < 1e-12);
    }

    #[test]
    fn eigenvalue_matching_gives_antidiagonal() {
        let l = CMatrix::from_diagonal(&CVector::from_vec(vec![real(1.0), real(2.0)]));
        let r = CMatrix::from_diagonal(&CVector::from_vec(vec![real(2.0), real(1.0)]));
        let span = solve_intertwiners(&[l.clone()], &[r.clone()], (2, 2), &tol()).unwrap();
        assert_eq!(span.dim(), 2);
        for x in span.basis() {
            assert!(x[(0, 0)].norm() < 1e-12 && x[(1, 1)].norm() < 1e-12);
            assert!(fro(&(&l * &x - &x * &r)) < 1e-12);
        }
    }

    #[test]
    fn intertwiner_shape_errors() {
        let err = solve_intertwiners(&[identity(2)], &[identity(3)], (2, 2), &tol());
        assert!(matches!(err, Err(Error::Shape(_))));
        let err = solve_intertwiners(&[identity(2)], &[], (2, 2), &tol());
        assert!(matches!(err, Err(Error::Shape(_))));
    }

    #[test]
    fn gram_quotient_examples() {
        assert_eq!(gram_quotient(&identity(4), &tol()).unwrap().dim(), 4);
        let ones = CMatrix::from_element(3, 3, ONE);
        assert_eq!(gram_quotient(&ones, &tol()).unwrap().dim(), 1);
        // Gram of {v, v, w} with v ⊥ w unit vectors has eigenvalues {2, 1, 0}
        let v = CVector::from_vec(vec![ONE, ZERO]);
        let w = CVector::from_vec(vec![ZERO, ONE]);
        let vecs = [&v, &v, &w];
        let g = CMatrix::from_fn(3, 3, |i, j| vecs[i].dotc(vecs[j]));
        let q = gram_quotient(&g, &tol()).unwrap();
        assert_eq!(q.dim(), 2);
        assert!((q.eigenvalues[0] - 2.0).abs() < 1e-12);
        assert!((q.eigenvalues[1] - 1.0).abs() < 1e-12);
        assert!(fro(&(q.factor.adjoint() * &q.factor - g)) < 1e-12);
    }

    #[test]
    fn gram_quotient_rejects_bad_input() {
        let mut g = identity(2);
        g[(0, 1)] = real(1.0);
        assert!(matches!(
            gram_quotient(&g, &tol()),
            Err(Error::NotHermitian { .. })
        ));
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![real(1.0), real(-0.5)]));
        assert!(matches!(
            gram_quotient(&neg, &tol()),
            Err(Error::NegativeEigenvalue { .. })
        ));
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded_rng(3);
        let u = random_unitary(5, &mut rng);
        let (a, b) = unitarity_residuals(&u);
        assert!(a < 1e-12 && b < 1e-12);
    }

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(1e-9, 1e-8).is_ok());
        assert!(Tolerance::new(1.0, 1e-8).is_err());
        assert!(Tolerance::new(-1e-3, 1e-8).is_err());
    }

    #[test]
    fn fit_linear_map_recovers_operator() {
        let mut rng = seeded_rng(11);
        let a = random_matrix(3, 4, &mut rng);
        let src = random_matrix(4, 9, &mut rng);
        let dst = &a * &src;
        let (map, res) = fit_linear_map(&src, &dst, &tol()).unwrap();
        assert!(res < 1e-10);
        assert!(fro(&(map - a)) < 1e-9);
    }

    #[test]
    fn kernel_of_wide_and_tall_systems() {
        let mut rng = seeded_rng(5);
        let wide = random_matrix(2, 5, &mut rng);
        let k = kernel(&wide, &tol());
        assert_eq!(k.ncols(), 3);
        assert!((&wide * &k).norm() < 1e-10);
        let tall = CMatrix::from_fn(12, 3, |i, j| if j == 2 { ZERO } else { real((i * (j + 1)) as f64) });
        let k = kernel(&tall, &tol());
        assert_eq!(k.ncols(), 2);
    }
}
