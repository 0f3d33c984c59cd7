//! Correspondences over multimatrix algebras.
//!
//! An `A`-`B` correspondence is stored concretely: a right `B`-module
//! `E ⊂ B(G_B, H)` spanning `H`, a left representation `ρ` of `A` on `H`
//! and the lifted commutant `ρ'` of `B'` on `H`. Tensor products and GNS
//! spaces are built as quotients of algebraic tensors by the null space of
//! their Gram matrix.

use serde::{Deserialize, Serialize};

use crate::algebra::{Algebra, Representation};
use crate::cp::CPMap;
use crate::error::{Error, Result};
use crate::module::{intertwiner_module, ConcreteModule};
use crate::numeric::{
    column_space, direct_sum, fit_linear_map, fro, gram_quotient, hs_orthonormalize, hstack,
    identity, kernel, kron, random_unitary, seeded_rng, solve_intertwiners, unitarity_residuals,
    CMatrix, GramQuotient, OperatorSpan, Tolerance,
};

#[derive(Debug, Clone)]
pub struct Correspondence {
    left: Algebra,
    module: ConcreteModule,
    left_rep: Representation,
    rho_prime: Representation,
}

/// Integer block-to-block multiplicities `c_kl` of a correspondence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplicityMatrix {
    pub entries: Vec<Vec<u64>>,
}

impl MultiplicityMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MultiplicityMatrix {
            entries: vec![vec![0; cols]; rows],
        }
    }

    pub fn from_rows(entries: Vec<Vec<u64>>) -> Self {
        MultiplicityMatrix { entries }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i][i] = 1;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, |r| r.len())
    }

    pub fn get(&self, k: usize, l: usize) -> u64 {
        self.entries[k][l]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols(), self.rows());
        for (k, row) in self.entries.iter().enumerate() {
            for (l, &c) in row.iter().enumerate() {
                out.entries[l][k] = c;
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols(), other.rows(), "multiplicity matrix shapes");
        let mut out = Self::zeros(self.rows(), other.cols());
        for i in 0..self.rows() {
            for j in 0..other.cols() {
                out.entries[i][j] = (0..self.cols())
                    .map(|k| self.entries[i][k] * other.entries[k][j])
                    .sum();
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (r, o) in out.entries.iter_mut().zip(&other.entries) {
            for (a, b) in r.iter_mut().zip(o) {
                *a += b;
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity(self.rows());
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|&c| c == 0)
    }
}

/// Coordinates of an interior tensor product `E1 ⊙ E2`.
///
/// The class of `x ⊙ η` (with `η ∈ H2`) is `factor · (c(x) ⊗ η)`, where
/// `c(x)` are the coefficients of `x` in the basis of `E1`.
#[derive(Debug, Clone)]
pub struct TensorMap {
    pub quotient: GramQuotient,
    first: OperatorSpan,
    second_dim: usize,
}

impl TensorMap {
    /// The element `x ⊙ y ∈ E1 ⊙ E2`, an operator `G → H`.
    pub fn elem(&self, x: &CMatrix, y: &CMatrix) -> CMatrix {
        let c = self.first.coefficients(x);
        let c = CMatrix::from_column_slice(c.len(), 1, c.as_slice());
        &self.quotient.factor * kron(&c, y)
    }

    /// Class of `x ⊙ η` for a vector `η ∈ H2`, as a column.
    pub fn class(&self, x: &CMatrix, eta: &CMatrix) -> CMatrix {
        self.elem(x, eta)
    }

    /// `op ⊙ id` for an operator on `H1` preserving `E1`.
    pub fn lift_left(&self, op: &CMatrix) -> CMatrix {
        let basis = self.first.basis();
        let d = basis.len();
        let mut coeffs = CMatrix::zeros(d, d);
        for (i, x) in basis.iter().enumerate() {
            let c = self.first.coefficients(&(op * x));
            coeffs.set_column(i, &c);
        }
        &self.quotient.factor * kron(&coeffs, &identity(self.second_dim)) * &self.quotient.right_inverse
    }

    pub fn dim(&self) -> usize {
        self.quotient.dim()
    }
}

/// GNS correspondence of a CP map with its cyclic element.
#[derive(Debug, Clone)]
pub struct Gns {
    pub correspondence: Correspondence,
    /// `ξ : G_B → H` with `⟨ξ, ρ(a) ξ⟩ = T(a)`.
    pub xi: CMatrix,
    /// Class of `a_i ⊗ g` is `factor · (e_i ⊗ g)` over the source basis `a_i`.
    pub factor: CMatrix,
    pub right_inverse: CMatrix,
}

#[derive(Debug, Clone)]
pub struct IsoReport {
    pub isomorphic: bool,
    pub certified: bool,
    pub left_matrix: MultiplicityMatrix,
    pub right_matrix: MultiplicityMatrix,
    pub residual: f64,
    pub unitary: Option<CMatrix>,
}

#[derive(Debug, Clone)]
pub struct FlipReport {
    pub iso: IsoReport,
    /// Residual of the explicit flip unitary (fit, unitarity, intertwining).
    pub flip_residual: f64,
    pub flip_certified: bool,
    pub first: MultiplicityMatrix,
    pub second: MultiplicityMatrix,
    /// `(C1 C2)ᵀ == C2ᵀ C1ᵀ` and both equal the multiplicity matrices found.
    pub matrix_identity: bool,
    pub fiber_dims: (usize, usize),
}

impl Correspondence {
    /// Validated correspondence from a module and left-action images on its
    /// target space (one image per basis element of `left`).
    pub fn new(
        left: &Algebra,
        module: ConcreteModule,
        left_images: Vec<CMatrix>,
        tol: &Tolerance,
    ) -> Result<Correspondence> {
        let c = Correspondence::assemble(left, module, left_images, tol)?;
        c.validate(tol)?;
        Ok(c)
    }

    /// Builds the triple, re-coordinatizing onto `span E G` when the module
    /// does not reach the whole target.
    pub(crate) fn assemble(
        left: &Algebra,
        module: ConcreteModule,
        left_images: Vec<CMatrix>,
        tol: &Tolerance,
    ) -> Result<Correspondence> {
        let t = module.target_dim();
        let q = module.reachable_space(tol);
        let (module, images) = if q.ncols() < t {
            let qa = q.adjoint();
            for img in &left_images {
                let leak = fro(&(img * &q - &q * (&qa * img * &q)));
                if !tol.accepts(leak, fro(img)) {
                    return Err(Error::Invalid(format!(
                        "left action does not preserve the span of the module (residual {leak:.3e})"
                    )));
                }
            }
            let images = left_images.iter().map(|m| &qa * m * &q).collect();
            (module.map_left(&qa, tol)?, images)
        } else {
            (module, left_images)
        };
        let h = module.target_dim();
        let left_rep = Representation::new(left, h, images)?;
        let induced = module.induced_rep(tol)?;
        let rho_prime = induced.rho_prime.compressed(&induced.coords.adjoint());
        Ok(Correspondence {
            left: left.clone(),
            module,
            left_rep,
            rho_prime,
        })
    }

    fn validate(&self, tol: &Tolerance) -> Result<()> {
        self.left_rep.check(tol, true)?;
        let r = self.commutation_residual();
        if !tol.accepts(r, self.h_dim() as f64) {
            return Err(Error::Invalid(format!(
                "left action does not commute with the lifted commutant (residual {r:.3e})"
            )));
        }
        let r = self.module_preservation_residual();
        if !tol.accepts(r, 1.0) {
            return Err(Error::Invalid(format!(
                "left action does not preserve the module (residual {r:.3e})"
            )));
        }
        Ok(())
    }

    /// `B` as a `B`-`B` correspondence over itself.
    pub fn identity(algebra: &Algebra, tol: &Tolerance) -> Result<Correspondence> {
        let bprime = algebra.commutant(tol)?;
        Ok(Correspondence {
            left: algebra.clone(),
            module: ConcreteModule::identity(algebra),
            left_rep: algebra.defining_representation(),
            rho_prime: bprime.defining_representation(),
        })
    }

    /// A module viewed as a `C`-`B` correspondence.
    pub fn with_scalar_left(module: ConcreteModule, tol: &Tolerance) -> Result<Correspondence> {
        let c = Algebra::scalars();
        let t = module.target_dim();
        Correspondence::assemble(&c, module, vec![identity(t)], tol)
    }

    /// Correspondence with a given multiplicity matrix, twisted by a random unitary.
    ///
    /// `H = ⊕_{kl} C^{n_k} ⊗ C^{c_kl} ⊗ C^{m_l}` with `A` acting on the first
    /// factor and `B'` (block sizes `m_l`) on the last.
    pub fn random(
        left: &Algebra,
        right: &Algebra,
        matrix: &MultiplicityMatrix,
        seed: u64,
        tol: &Tolerance,
    ) -> Result<Correspondence> {
        let (ab, bb) = (left.blocks(), right.blocks());
        if matrix.rows() != ab.len() || matrix.cols() != bb.len() {
            return Err(Error::Shape(format!(
                "multiplicity matrix is {}x{}, algebras have {} and {} blocks",
                matrix.rows(),
                matrix.cols(),
                ab.len(),
                bb.len()
            )));
        }
        let mut sectors = Vec::new();
        let mut h = 0;
        for (k, a) in ab.iter().enumerate() {
            for (l, b) in bb.iter().enumerate() {
                let c = matrix.get(k, l) as usize;
                if c > 0 {
                    sectors.push((k, l, c, h));
                    h += a.size * c * b.multiplicity;
                }
            }
        }
        if h == 0 {
            return Err(Error::Invalid("multiplicity matrix is zero".into()));
        }
        if let Some(k) = (0..ab.len()).find(|&k| (0..bb.len()).all(|l| matrix.get(k, l) == 0)) {
            return Err(Error::Invalid(format!(
                "row {k} of the multiplicity matrix is zero, so the left action would not be unital"
            )));
        }
        let mut rng = seeded_rng(seed);
        let w = random_unitary(h, &mut rng);
        let bprime = right.commutant(tol)?;
        let place = |parts_a: Option<&[CMatrix]>, parts_b: Option<&[CMatrix]>| {
            let mut m = CMatrix::zeros(h, h);
            for &(k, l, c, off) in &sectors {
                let n = ab[k].size;
                let ml = bb[l].multiplicity;
                let blk = match (parts_a, parts_b) {
                    (Some(p), _) => kron(&p[k], &identity(c * ml)),
                    (_, Some(p)) => kron(&identity(n * c), &p[l]),
                    _ => unreachable!(),
                };
                m.view_mut((off, off), (n * c * ml, n * c * ml)).copy_from(&blk);
            }
            &w * m * w.adjoint()
        };
        let left_images = left
            .span()
            .map(|a| place(Some(&left.block_components(a)), None));
        let rho_prime = Representation::from_fn(&bprime, h, |b| {
            place(None, Some(&bprime.block_components(b)))
        })?;
        let module = intertwiner_module(right, &rho_prime, tol)?;
        Correspondence::assemble(left, module, left_images, tol)
    }

    /// `E ⊕ F` for two correspondences over the same algebras.
    pub fn direct_sum(&self, other: &Correspondence, tol: &Tolerance) -> Result<Correspondence> {
        self.left.ensure_same(&other.left, tol, "direct sum of different left algebras")?;
        self.right().ensure_same(other.right(), tol, "direct sum of different right algebras")?;
        let (h1, h2) = (self.h_dim(), other.h_dim());
        let g = self.right().rep_dim();
        let mut gens = Vec::new();
        for x in self.module.basis() {
            let mut m = CMatrix::zeros(h1 + h2, g);
            m.rows_mut(0, h1).copy_from(&x);
            gens.push(m);
        }
        for y in other.module.basis() {
            let mut m = CMatrix::zeros(h1 + h2, g);
            m.rows_mut(h1, h2).copy_from(&y);
            gens.push(m);
        }
        let span = hs_orthonormalize((h1 + h2, g), &gens, tol)?;
        let module = ConcreteModule::from_span(self.right(), span);
        let images = self
            .left
            .span()
            .map(|a| direct_sum(&self.left_rep.apply(a), &other.left_rep.apply(a)));
        Correspondence::assemble(&self.left, module, images, tol)
    }

    /// Sub-correspondence on the range of an isometry `q` whose range is
    /// invariant under both actions.
    pub fn restrict(&self, q: &CMatrix, tol: &Tolerance) -> Result<Correspondence> {
        let p = q * q.adjoint();
        let images: Vec<CMatrix> = self.module.basis().iter().map(|x| &p * x).collect();
        let span = hs_orthonormalize((self.h_dim(), self.right().rep_dim()), &images, tol)?;
        let module = ConcreteModule::from_span(self.right(), span).map_left(&q.adjoint(), tol)?;
        let left_images = self.left_rep.compressed(q).images().to_vec();
        Correspondence::assemble(&self.left, module, left_images, tol)
    }

    /// The sub-correspondence generated by `ζ : G_B → H`, i.e. on `span A ζ B G`.
    pub fn generated_by(&self, zeta: &CMatrix, tol: &Tolerance) -> Result<Correspondence> {
        let cols: Vec<CMatrix> = self
            .left
            .basis()
            .iter()
            .flat_map(|a| {
                let az = self.left_rep.apply(a) * zeta;
                self.right().basis().into_iter().map(move |b| &az * b)
            })
            .collect();
        let q = column_space(&hstack(self.h_dim(), &cols), tol).0;
        self.restrict(&q, tol)
    }

    pub fn left(&self) -> &Algebra {
        &self.left
    }

    pub fn right(&self) -> &Algebra {
        self.module.algebra()
    }

    pub fn module(&self) -> &ConcreteModule {
        &self.module
    }

    pub fn left_rep(&self) -> &Representation {
        &self.left_rep
    }

    pub fn rho_prime(&self) -> &Representation {
        &self.rho_prime
    }

    pub fn h_dim(&self) -> usize {
        self.module.target_dim()
    }

    pub fn dim(&self) -> usize {
        self.module.dim()
    }

    /// `ρ(a) x` for an element `x` of the module.
    pub fn act_left(&self, a: &CMatrix, x: &CMatrix) -> CMatrix {
        self.left_rep.apply(a) * x
    }

    pub fn commutation_residual(&self) -> f64 {
        let lefts: Vec<CMatrix> = self
            .left
            .generators()
            .iter()
            .map(|a| self.left_rep.apply(a))
            .collect();
        let mut worst = 0.0f64;
        for b in self.rho_prime.algebra().generators() {
            let rb = self.rho_prime.apply(&b);
            for ra in &lefts {
                worst = worst.max(fro(&(ra * &rb - &rb * ra)));
            }
        }
        worst
    }

    pub fn module_preservation_residual(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in self.left.generators() {
            let ra = self.left_rep.apply(&a);
            for x in self.module.basis() {
                worst = worst.max(self.module.span().residual(&(&ra * x)));
            }
        }
        worst
    }

    /// `c_kl = dim(p_k E q_l) / (n_k n_l)`.
    pub fn multiplicity_matrix(&self, tol: &Tolerance) -> Result<MultiplicityMatrix> {
        let (ab, bb) = (self.left.blocks(), self.right().blocks());
        let mut out = MultiplicityMatrix::zeros(ab.len(), bb.len());
        let basis = self.module.basis();
        for (k, a) in ab.iter().enumerate() {
            let p = self.left_rep.apply(&self.left.central_projection(k));
            let px: Vec<CMatrix> = basis.iter().map(|x| &p * x).collect();
            for (l, b) in bb.iter().enumerate() {
                let q = self.right().central_projection(l);
                let pieces: Vec<CMatrix> = px.iter().map(|x| x * &q).collect();
                let d = hs_orthonormalize((self.h_dim(), self.right().rep_dim()), &pieces, tol)?
                    .dim();
                let unit = a.size * b.size;
                if d % unit != 0 {
                    return Err(Error::Numeric(format!(
                        "block ({k},{l}) has dimension {d}, not a multiple of {unit}"
                    )));
                }
                out.entries[k][l] = (d / unit) as u64;
            }
        }
        Ok(out)
    }

    /// Unitary-equivalence test; builds and verifies an explicit unitary
    /// `H_self → H_other` when the multiplicity matrices agree.
    pub fn iso_check(&self, other: &Correspondence, tol: &Tolerance) -> Result<IsoReport> {
        self.left.ensure_same(&other.left, tol, "left algebras differ")?;
        self.right().ensure_same(other.right(), tol, "right algebras differ")?;
        let left_matrix = self.multiplicity_matrix(tol)?;
        let right_matrix = other.multiplicity_matrix(tol)?;
        if left_matrix != right_matrix {
            return Ok(IsoReport {
                isomorphic: false,
                certified: false,
                left_matrix,
                right_matrix,
                residual: f64::INFINITY,
                unitary: None,
            });
        }
        let src = self.standard_frame(&left_matrix, tol)?;
        let dst = other.standard_frame(&left_matrix, tol)?;
        let (u, fit) = fit_linear_map(&src, &dst, tol)?;
        let residual = fit.max(self.intertwining_residual(other, &u));
        let certified = tol.accepts(residual, (self.h_dim() as f64).sqrt());
        Ok(IsoReport {
            isomorphic: true,
            certified,
            left_matrix,
            right_matrix,
            residual,
            unitary: Some(u),
        })
    }

    /// Orthonormal basis of `H` adapted to the block decomposition: vectors
    /// `ρ(e^k_{i1}) ρ'(e^l_{s1}) f` for `f` running over a basis of the range
    /// of `ρ(e^k_{11}) ρ'(e^l_{11})`.
    fn standard_frame(&self, matrix: &MultiplicityMatrix, tol: &Tolerance) -> Result<CMatrix> {
        let a = &self.left;
        let bp = self.right().commutant(tol)?;
        let mut cols = Vec::new();
        for (k, ablk) in a.blocks().iter().enumerate() {
            for (l, bblk) in bp.blocks().iter().enumerate() {
                let c = matrix.get(k, l) as usize;
                if c == 0 {
                    continue;
                }
                let p = self.left_rep.apply(&a.matrix_unit(k, 0, 0))
                    * self.rho_prime.apply(&bp.matrix_unit(l, 0, 0));
                let f = column_space(&p, tol).0;
                if f.ncols() != c {
                    return Err(Error::Numeric(format!(
                        "minimal projection of sector ({k},{l}) has rank {}, expected {c}",
                        f.ncols()
                    )));
                }
                for i in 0..ablk.size {
                    let ai = self.left_rep.apply(&a.matrix_unit(k, i, 0));
                    for s in 0..bblk.size {
                        let bs = self.rho_prime.apply(&bp.matrix_unit(l, s, 0));
                        cols.push(&ai * bs * &f);
                    }
                }
            }
        }
        Ok(hstack(self.h_dim(), &cols))
    }

    /// Worst violation of `u` being a unitary that intertwines both actions
    /// and carries this module onto `other`'s.
    pub fn intertwining_residual(&self, other: &Correspondence, u: &CMatrix) -> f64 {
        if u.shape() != (other.h_dim(), self.h_dim()) {
            return f64::INFINITY;
        }
        let (r1, r2) = unitarity_residuals(u);
        let mut worst = r1.max(r2);
        for a in self.left.generators() {
            let d = u * self.left_rep.apply(&a) - other.left_rep.apply(&a) * u;
            worst = worst.max(fro(&d));
        }
        for b in self.rho_prime.algebra().generators() {
            let d = u * self.rho_prime.apply(&b) - other.rho_prime.apply(&b) * u;
            worst = worst.max(fro(&d));
        }
        for x in self.module.basis() {
            worst = worst.max(other.module.span().residual(&(u * x)));
        }
        worst
    }

    /// `E' = {x : G_A → H | ρ(a) x = x a}` as a `B'`-`A'` correspondence.
    pub fn commutant(&self, tol: &Tolerance) -> Result<Correspondence> {
        let a = &self.left;
        let aprime = a.commutant(tol)?;
        let gens = a.generators();
        let lefts: Vec<CMatrix> = gens.iter().map(|g| self.left_rep.apply(g)).collect();
        let span = solve_intertwiners(&lefts, &gens, (self.h_dim(), a.rep_dim()), tol)?;
        let module = ConcreteModule::from_span(&aprime, span);
        let bprime = self.rho_prime.algebra().clone();
        Correspondence::assemble(&bprime, module, self.rho_prime.images().to_vec(), tol)
    }
}

/// Interior tensor product `E1 ⊙ E2` of an `A`-`B` and a `B`-`C` correspondence.
pub fn tensor(
    e1: &Correspondence,
    e2: &Correspondence,
    tol: &Tolerance,
) -> Result<(Correspondence, TensorMap)> {
    e1.right()
        .ensure_same(e2.left(), tol, "tensor factors do not share the middle algebra")?;
    let xs = e1.module.basis();
    let d1 = xs.len();
    let h2 = e2.h_dim();
    let mut gram = CMatrix::zeros(d1 * h2, d1 * h2);
    for i in 0..d1 {
        for j in i..d1 {
            let blk = e2.left_rep.apply(&(xs[i].adjoint() * &xs[j]));
            gram.view_mut((i * h2, j * h2), (h2, h2)).copy_from(&blk);
            if i != j {
                gram.view_mut((j * h2, i * h2), (h2, h2)).copy_from(&blk.adjoint());
            }
        }
    }
    let quotient = gram_quotient(&gram, tol)?;
    let map = TensorMap {
        quotient,
        first: e1.module.span().clone(),
        second_dim: h2,
    };
    let ys = e2.module.basis();
    let elems: Vec<CMatrix> = xs
        .iter()
        .flat_map(|x| ys.iter().map(|y| map.elem(x, y)).collect::<Vec<_>>())
        .collect();
    let span = hs_orthonormalize((map.dim(), e2.right().rep_dim()), &elems, tol)?;
    let module = ConcreteModule::from_span(e2.right(), span);
    let left_images = e1
        .left
        .span()
        .map(|a| map.lift_left(&e1.left_rep.apply(a)));
    let corr = Correspondence::assemble(&e1.left, module, left_images, tol)?;
    Ok((corr, map))
}

/// GNS correspondence of a CP map `T : A → B`.
///
/// `H` is the quotient of `A ⊗ G_B` under `⟨a ⊗ g, a' ⊗ g'⟩ = ⟨g, T(a*a') g'⟩`;
/// the frame of `H` puts the range of `ξ` first.
pub fn gns(t: &CPMap, tol: &Tolerance) -> Result<Gns> {
    let a = t.source();
    let b = t.target();
    let gb = b.rep_dim();
    let basis = a.basis();
    let gram = t.gram_kernel();
    let q = gram_quotient(&gram, tol).map_err(|e| match e {
        Error::NegativeEigenvalue { value } => Error::NotCompletelyPositive {
            min_eigenvalue: value,
        },
        other => other,
    })?;
    let unit_coeffs = a.span().coefficients(&a.unit());
    let unit_coeffs = CMatrix::from_column_slice(unit_coeffs.len(), 1, unit_coeffs.as_slice());
    let xi_raw = &q.factor * kron(&unit_coeffs, &identity(gb));
    // frame of H with the range of ξ first
    let r1 = column_space(&xi_raw, tol).0;
    let rest = kernel(&r1.adjoint(), tol);
    let w = hstack(q.dim(), &[r1, rest]);
    let factor = w.adjoint() * &q.factor;
    let right_inverse = &q.right_inverse * &w;
    let xi = w.adjoint() * xi_raw;
    let h = factor.nrows();
    let left_images: Vec<CMatrix> = basis
        .iter()
        .map(|x| {
            let mut coeffs = CMatrix::zeros(basis.len(), basis.len());
            for (i, ai) in basis.iter().enumerate() {
                coeffs.set_column(i, &a.span().coefficients(&(x * ai)));
            }
            &factor * kron(&coeffs, &identity(gb)) * &right_inverse
        })
        .collect();
    let gens: Vec<CMatrix> = left_images.iter().map(|m| m * &xi).collect();
    let module = ConcreteModule::new(b, h, &gens, tol)?;
    let correspondence = Correspondence::assemble(a, module, left_images, tol)?;
    Ok(Gns {
        correspondence,
        xi,
        factor,
        right_inverse,
    })
}

/// Largest `‖ξ* ρ(a) ξ − T(a)‖_F` over the source basis.
pub fn gns_reproduction_residual(g: &Gns, t: &CPMap) -> f64 {
    t.source()
        .basis()
        .iter()
        .map(|a| {
            let lhs = g.xi.adjoint() * g.correspondence.left_rep.apply(a) * &g.xi;
            fro(&(lhs - t.apply(a)))
        })
        .fold(0.0, f64::max)
}

/// Checks `(E1 ⊙ E2)' ≅ E2' ⊙ E1'` for two `B`-`B` correspondences, both by
/// multiplicity matrices and through the explicit flip
/// `x2' ⊙ (y1 g) ↦ y1 ⊙ (x2' g)`.
pub fn flip_check(e1: &Correspondence, e2: &Correspondence, tol: &Tolerance) -> Result<FlipReport> {
    e1.left.ensure_same(e1.right(), tol, "flip needs B-B correspondences")?;
    e2.left.ensure_same(e2.right(), tol, "flip needs B-B correspondences")?;
    e1.right().ensure_same(e2.right(), tol, "flip needs a common algebra")?;
    let (t12, map12) = tensor(e1, e2, tol)?;
    let lhs = t12.commutant(tol)?;
    let c1 = e1.commutant(tol)?;
    let c2 = e2.commutant(tol)?;
    let (rhs, map21) = tensor(&c2, &c1, tol)?;
    let iso = lhs.iso_check(&rhs, tol)?;

    let m1 = e1.multiplicity_matrix(tol)?;
    let m2 = e2.multiplicity_matrix(tol)?;
    let expected = m1.mul(&m2).transpose();
    let matrix_identity = expected == m2.transpose().mul(&m1.transpose())
        && iso.left_matrix == expected
        && iso.right_matrix == expected;

    // explicit flip H_rhs → H_lhs; c1 spans H1 and c2 spans H2 by totality
    let mut src = Vec::new();
    let mut dst = Vec::new();
    if c1.h_dim() == e1.h_dim() && c2.h_dim() == e2.h_dim() {
        for xp in c2.module.basis() {
            for y in e1.module.basis() {
                src.push(map21.elem(&xp, &y));
                dst.push(map12.elem(&y, &xp));
            }
        }
    }
    let flip_residual = if src.is_empty() {
        f64::INFINITY
    } else {
        let src = hstack(rhs.h_dim(), &src);
        let dst = hstack(lhs.h_dim(), &dst);
        let (u, fit) = fit_linear_map(&src, &dst, tol)?;
        fit.max(rhs.intertwining_residual(&lhs, &u))
    };
    let flip_certified = tol.accepts(flip_residual, (lhs.h_dim() as f64).sqrt());
    Ok(FlipReport {
        iso,
        flip_residual,
        flip_certified,
        first: m1,
        second: m2,
        matrix_identity,
        fiber_dims: (e1.dim(), e2.dim()),
    })
}

#[cfg(test)]
fn unit_column(n: usize, i: usize) -> CMatrix {
    let mut m = CMatrix::zeros(n, 1);
    m[(i, 0)] = crate::numeric::ONE;
    m
}
