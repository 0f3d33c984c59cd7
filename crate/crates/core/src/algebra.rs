//! Finite-dimensional von Neumann algebras in concrete position.
//!
//! An [`Algebra`] is `⊕_k M_{n_k} ⊗ 1_{m_k}` acting on
//! `G = ⊕_k C^{n_k} ⊗ C^{m_k}`, conjugated by a unitary *frame*. The frame
//! columns are the canonical coordinates `(k, i, j)` (block, matrix index,
//! multiplicity index), ordered block by block with `i` major. Every
//! algebra that shows up later (commutants, images of representations,
//! adjointable operators on a module) is an `Algebra` with its own frame,
//! so block components and matrix units are always available.

use std::sync::{Arc, OnceLock};

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{
    column_space, fro, hs_orthonormalize, identity, random_matrix, random_unitary, real,
    seeded_rng, solve_intertwiners, CMatrix, CVector, OperatorSpan, Tolerance,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Block {
    pub size: usize,
    pub multiplicity: usize,
}

#[derive(Debug)]
struct AlgebraData {
    blocks: Vec<Block>,
    offsets: Vec<usize>,
    rep_dim: usize,
    frame: CMatrix,
    span: OperatorSpan,
    labels: Vec<(usize, usize, usize)>,
    commutant: OnceLock<Algebra>,
}

/// A multimatrix algebra with a concrete unital representation on `C^rep_dim`.
#[derive(Debug, Clone)]
pub struct Algebra(Arc<AlgebraData>);

impl Algebra {
    /// Canonical model `⊕ M_{n_k} ⊗ 1_{m_k}`; blocks are sorted by
    /// `(size, multiplicity)`.
    pub fn multimatrix(blocks: &[(usize, usize)]) -> Result<Algebra> {
        if blocks.is_empty() {
            return Err(Error::Invalid("an algebra needs at least one block".into()));
        }
        let mut bs: Vec<Block> = blocks
            .iter()
            .map(|&(size, multiplicity)| Block { size, multiplicity })
            .collect();
        if bs.iter().any(|b| b.size == 0 || b.multiplicity == 0) {
            return Err(Error::Invalid(
                "block sizes and multiplicities must be at least 1".into(),
            ));
        }
        bs.sort();
        let dim: usize = bs.iter().map(|b| b.size * b.multiplicity).sum();
        Ok(Algebra::with_frame(bs, identity(dim)))
    }

    /// `M_n` acting on `C^n`.
    pub fn full(n: usize) -> Result<Algebra> {
        Algebra::multimatrix(&[(n, 1)])
    }

    /// The scalars acting on `C`.
    pub fn scalars() -> Algebra {
        Algebra::full(1).expect("1x1 algebra")
    }

    /// Builds an algebra from blocks in the given order and a unitary frame.
    pub(crate) fn with_frame(blocks: Vec<Block>, frame: CMatrix) -> Algebra {
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for b in &blocks {
            offsets.push(acc);
            acc += b.size * b.multiplicity;
        }
        assert_eq!(frame.shape(), (acc, acc), "frame must be square of rep_dim");
        let mut stack = CMatrix::zeros(acc * acc, blocks.iter().map(|b| b.size * b.size).sum());
        let mut labels = Vec::new();
        let mut col = 0;
        for (k, b) in blocks.iter().enumerate() {
            let norm = real(1.0 / (b.multiplicity as f64).sqrt());
            for i in 0..b.size {
                for j in 0..b.size {
                    let u = unit_in_frame(&frame, offsets[k], b, i, j) * norm;
                    stack.column_mut(col).copy_from_slice(u.as_slice());
                    labels.push((k, i, j));
                    col += 1;
                }
            }
        }
        let span = OperatorSpan::from_orthonormal_stack(acc, acc, stack);
        Algebra(Arc::new(AlgebraData {
            blocks,
            offsets,
            rep_dim: acc,
            frame,
            span,
            labels,
            commutant: OnceLock::new(),
        }))
    }

    pub fn blocks(&self) -> &[Block] {
        &self.0.blocks
    }

    pub fn rep_dim(&self) -> usize {
        self.0.rep_dim
    }

    /// Dimension as a vector space, `Σ n_k²`.
    pub fn dim(&self) -> usize {
        self.0.span.dim()
    }

    pub fn span(&self) -> &OperatorSpan {
        &self.0.span
    }

    pub fn basis(&self) -> Vec<CMatrix> {
        self.0.span.basis()
    }

    pub fn basis_element(&self, i: usize) -> CMatrix {
        self.0.span.element(i)
    }

    /// `(block, row, column)` of the `i`-th basis element.
    pub fn basis_label(&self, i: usize) -> (usize, usize, usize) {
        self.0.labels[i]
    }

    pub fn frame(&self) -> &CMatrix {
        &self.0.frame
    }

    pub fn unit(&self) -> CMatrix {
        identity(self.rep_dim())
    }

    /// Index of the canonical coordinate `(k, i, j)` in `G`.
    pub fn coordinate(&self, k: usize, i: usize, j: usize) -> usize {
        self.0.offsets[k] + i * self.0.blocks[k].multiplicity + j
    }

    /// The frame vector for canonical coordinate `(k, i, j)`.
    pub fn frame_vector(&self, k: usize, i: usize, j: usize) -> CVector {
        self.0.frame.column(self.coordinate(k, i, j)).into_owned()
    }

    /// Matrix unit `e^{(k)}_{ij} ⊗ 1_{m_k}` in concrete position.
    pub fn matrix_unit(&self, k: usize, i: usize, j: usize) -> CMatrix {
        unit_in_frame(&self.0.frame, self.0.offsets[k], &self.0.blocks[k], i, j)
    }

    pub fn central_projection(&self, k: usize) -> CMatrix {
        let b = self.0.blocks[k];
        let cols = self
            .0
            .frame
            .columns(self.0.offsets[k], b.size * b.multiplicity);
        &cols * cols.adjoint()
    }

    /// `⊕_k a_k ⊗ 1_{m_k}` in concrete position.
    pub fn element_from_blocks(&self, parts: &[CMatrix]) -> Result<CMatrix> {
        if parts.len() != self.0.blocks.len() {
            return Err(Error::Shape(format!(
                "{} block components for {} blocks",
                parts.len(),
                self.0.blocks.len()
            )));
        }
        let mut canonical = CMatrix::zeros(self.rep_dim(), self.rep_dim());
        for (k, (b, a)) in self.0.blocks.iter().zip(parts).enumerate() {
            if a.shape() != (b.size, b.size) {
                return Err(Error::Shape(format!(
                    "block {k} needs a {}x{} component",
                    b.size, b.size
                )));
            }
            for i in 0..b.size {
                for j in 0..b.size {
                    for m in 0..b.multiplicity {
                        canonical[(self.coordinate(k, i, m), self.coordinate(k, j, m))] = a[(i, j)];
                    }
                }
            }
        }
        Ok(&self.0.frame * canonical * self.0.frame.adjoint())
    }

    /// Block components `a_k` of an element (read off the first multiplicity copy).
    pub fn block_components(&self, x: &CMatrix) -> Vec<CMatrix> {
        let y = self.0.frame.adjoint() * x * &self.0.frame;
        self.0
            .blocks
            .iter()
            .enumerate()
            .map(|(k, b)| {
                CMatrix::from_fn(b.size, b.size, |i, j| {
                    y[(self.coordinate(k, i, 0), self.coordinate(k, j, 0))]
                })
            })
            .collect()
    }

    /// A small set of elements generating the algebra as a *-algebra with unit.
    pub fn generators(&self) -> Vec<CMatrix> {
        let mut out = Vec::new();
        for (k, b) in self.0.blocks.iter().enumerate() {
            out.push(self.central_projection(k));
            for i in 0..b.size.saturating_sub(1) {
                out.push(self.matrix_unit(k, i, i + 1));
                out.push(self.matrix_unit(k, i + 1, i));
            }
        }
        out
    }

    pub fn contains(&self, x: &CMatrix, tol: &Tolerance) -> Result<(bool, f64)> {
        if x.shape() != (self.rep_dim(), self.rep_dim()) {
            return Err(Error::Shape(format!(
                "element is {}x{}, algebra acts on dimension {}",
                x.nrows(),
                x.ncols(),
                self.rep_dim()
            )));
        }
        Ok(self.0.span.contains(x, tol))
    }

    /// True when both algebras have the same blocks and the same represented span.
    pub fn same_as(&self, other: &Algebra, tol: &Tolerance) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        self.blocks() == other.blocks() && self.span().same_span(other.span(), tol).0
    }

    pub fn ensure_same(&self, other: &Algebra, tol: &Tolerance, what: &str) -> Result<()> {
        if self.same_as(other, tol) {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(what.to_string()))
        }
    }

    /// The commutant `⊕ 1_{n_k} ⊗ M_{m_k}` on the same space.
    ///
    /// The commutant is first solved for as an intertwiner space against
    /// the generators; the block model (block `k` of the commutant has size
    /// `m_k` and multiplicity `n_k`, block order kept) is then checked to
    /// span exactly the solution.
    pub fn commutant(&self, tol: &Tolerance) -> Result<Algebra> {
        if let Some(c) = self.0.commutant.get() {
            return Ok(c.clone());
        }
        let c = self.compute_commutant(tol)?;
        Ok(self.0.commutant.get_or_init(|| c).clone())
    }

    fn compute_commutant(&self, tol: &Tolerance) -> Result<Algebra> {
        let gens = self.generators();
        let d = self.rep_dim();
        let solved = solve_intertwiners(&gens, &gens, (d, d), tol)?;
        let blocks: Vec<Block> = self
            .0
            .blocks
            .iter()
            .map(|b| Block {
                size: b.multiplicity,
                multiplicity: b.size,
            })
            .collect();
        let mut frame = CMatrix::zeros(d, d);
        for (k, b) in self.0.blocks.iter().enumerate() {
            for i in 0..b.size {
                for j in 0..b.multiplicity {
                    // commutant coordinate (k, j, i) is our coordinate (k, i, j)
                    let dst = self.0.offsets[k] + j * b.size + i;
                    frame.set_column(dst, &self.0.frame.column(self.coordinate(k, i, j)));
                }
            }
        }
        let model = Algebra::with_frame(blocks, frame);
        let (ok, residual) = model.span().same_span(&solved, tol);
        if !ok {
            return Err(Error::Numeric(format!(
                "commutant block model does not match the solved commutant \
                 (dims {} vs {}, distance {residual:.3e})",
                model.dim(),
                solved.dim()
            )));
        }
        Ok(model)
    }

    /// The center `⊕ C·1` spanned by the central projections.
    pub fn center(&self, tol: &Tolerance) -> Result<OperatorSpan> {
        let ps: Vec<CMatrix> = (0..self.0.blocks.len())
            .map(|k| self.central_projection(k))
            .collect();
        hs_orthonormalize((self.rep_dim(), self.rep_dim()), &ps, tol)
    }

    pub fn random_element(&self, rng: &mut ChaCha8Rng) -> CMatrix {
        let parts: Vec<CMatrix> = self
            .0
            .blocks
            .iter()
            .map(|b| random_matrix(b.size, b.size, rng))
            .collect();
        self.element_from_blocks(&parts).expect("shapes match")
    }

    /// The defining (identity) representation.
    pub fn defining_representation(&self) -> Representation {
        Representation {
            algebra: self.clone(),
            space_dim: self.rep_dim(),
            images: self.basis(),
        }
    }

    /// Representation on `⊕ C^{n_k} ⊗ C^{r_k}` twisted by a random unitary.
    pub fn random_representation(&self, multiplicities: &[usize], seed: u64) -> Result<Representation> {
        if multiplicities.len() != self.0.blocks.len() {
            return Err(Error::Invalid(format!(
                "{} multiplicities for {} blocks",
                multiplicities.len(),
                self.0.blocks.len()
            )));
        }
        let dim: usize = self
            .0
            .blocks
            .iter()
            .zip(multiplicities)
            .map(|(b, r)| b.size * r)
            .sum();
        if dim == 0 {
            return Err(Error::Invalid(
                "representation would act on the zero space".into(),
            ));
        }
        let mut rng = seeded_rng(seed);
        let w = random_unitary(dim, &mut rng);
        let mut offsets = Vec::new();
        let mut acc = 0;
        for (b, r) in self.0.blocks.iter().zip(multiplicities) {
            offsets.push(acc);
            acc += b.size * r;
        }
        let images = (0..self.dim())
            .map(|idx| {
                let (k, i, j) = self.0.labels[idx];
                let b = self.0.blocks[k];
                let r = multiplicities[k];
                let mut m = CMatrix::zeros(dim, dim);
                let s = real(1.0 / (b.multiplicity as f64).sqrt());
                for c in 0..r {
                    m[(offsets[k] + i * r + c, offsets[k] + j * r + c)] = s;
                }
                &w * m * w.adjoint()
            })
            .collect();
        Ok(Representation {
            algebra: self.clone(),
            space_dim: dim,
            images,
        })
    }
}

fn unit_in_frame(frame: &CMatrix, offset: usize, b: &Block, i: usize, j: usize) -> CMatrix {
    let m = b.multiplicity;
    let left = frame.columns(offset + i * m, m);
    let right = frame.columns(offset + j * m, m);
    left * right.adjoint()
}

/// A linear map of an algebra into `B(C^space_dim)`, given on the HS basis.
#[derive(Debug, Clone)]
pub struct Representation {
    algebra: Algebra,
    space_dim: usize,
    images: Vec<CMatrix>,
}

impl Representation {
    pub fn new(algebra: &Algebra, space_dim: usize, images: Vec<CMatrix>) -> Result<Representation> {
        if images.len() != algebra.dim() {
            return Err(Error::Shape(format!(
                "{} images for an algebra of dimension {}",
                images.len(),
                algebra.dim()
            )));
        }
        if let Some(bad) = images.iter().find(|m| m.shape() != (space_dim, space_dim)) {
            return Err(Error::Shape(format!(
                "image of shape {}x{} on a space of dimension {space_dim}",
                bad.nrows(),
                bad.ncols()
            )));
        }
        Ok(Representation {
            algebra: algebra.clone(),
            space_dim,
            images,
        })
    }

    /// Representation defined by evaluating `f` on each basis element.
    pub fn from_fn(
        algebra: &Algebra,
        space_dim: usize,
        f: impl Fn(&CMatrix) -> CMatrix,
    ) -> Result<Representation> {
        let images = algebra.span().map(f);
        Representation::new(algebra, space_dim, images)
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn images(&self) -> &[CMatrix] {
        &self.images
    }

    pub fn apply(&self, x: &CMatrix) -> CMatrix {
        let c = self.algebra.span().coefficients(x);
        let mut out = CMatrix::zeros(self.space_dim, self.space_dim);
        for (ci, img) in c.iter().zip(&self.images) {
            if ci.norm() > 0.0 {
                out += img * *ci;
            }
        }
        out
    }

    /// Conjugates every image by a coordinate change `V` (`space → V^* space`).
    pub fn compressed(&self, v: &CMatrix) -> Representation {
        Representation {
            algebra: self.algebra.clone(),
            space_dim: v.ncols(),
            images: self.images.iter().map(|m| v.adjoint() * m * v).collect(),
        }
    }

    /// Largest violation of the matrix-unit relations
    /// `π(e_ij)^* = π(e_ji)`, `π(e_ij) π(e_kl) = δ_jk π(e_il)` across all blocks.
    pub fn homomorphism_residual(&self) -> f64 {
        let a = &self.algebra;
        let mut worst = 0.0f64;
        let units: Vec<Vec<Vec<CMatrix>>> = a
            .blocks()
            .iter()
            .enumerate()
            .map(|(k, b)| {
                (0..b.size)
                    .map(|i| (0..b.size).map(|j| self.apply(&a.matrix_unit(k, i, j))).collect())
                    .collect()
            })
            .collect();
        for (k, bk) in a.blocks().iter().enumerate() {
            let u = &units[k];
            for i in 0..bk.size {
                for j in 0..bk.size {
                    worst = worst.max(fro(&(u[i][j].adjoint() - &u[j][i])));
                    // e_ij = e_i1 e_1j and e_1i e_j1 = δ_ij e_11
                    worst = worst.max(fro(&(&u[i][0] * &u[0][j] - &u[i][j])));
                    let prod = &u[0][i] * &u[j][0];
                    let expect = if i == j { u[0][0].clone() } else { CMatrix::zeros(self.space_dim, self.space_dim) };
                    worst = worst.max(fro(&(prod - expect)));
                }
            }
            for (l, _) in a.blocks().iter().enumerate().skip(k + 1) {
                worst = worst.max(fro(&(&u[0][0] * &units[l][0][0])));
            }
        }
        worst
    }

    pub fn unital_residual(&self) -> f64 {
        fro(&(self.apply(&self.algebra.unit()) - identity(self.space_dim)))
    }

    pub fn check(&self, tol: &Tolerance, require_unital: bool) -> Result<()> {
        let h = self.homomorphism_residual();
        let u = if require_unital { self.unital_residual() } else { 0.0 };
        let scale = (self.space_dim as f64).sqrt();
        if !tol.accepts(h.max(u), scale) {
            return Err(Error::NotHomomorphism { residual: h.max(u) });
        }
        Ok(())
    }

    /// Multiplicity `r_k = rank π(e^{(k)}_{11})` of each block.
    pub fn multiplicities(&self, tol: &Tolerance) -> Vec<usize> {
        (0..self.algebra.blocks().len())
            .map(|k| {
                let p = self.apply(&self.algebra.matrix_unit(k, 0, 0));
                crate::numeric::rank(&p, tol)
            })
            .collect()
    }

    /// The represented algebra `π(A) ⊂ B(C^space_dim)` with a canonical frame.
    ///
    /// Block `k` of the image corresponds to block `k` of the source, so
    /// block components transfer verbatim. The representation must be
    /// unital and faithful.
    pub fn image_algebra(&self, tol: &Tolerance) -> Result<Algebra> {
        let (img, kept) = self.image_algebra_partial(tol)?;
        if let Some(k) = (0..self.algebra.blocks().len()).find(|k| !kept.contains(k)) {
            return Err(Error::Refused(format!(
                "representation is not faithful: block {k} acts as zero"
            )));
        }
        Ok(img)
    }

    /// Like [`Representation::image_algebra`] but drops blocks that act as
    /// zero; returns the indices of the source blocks that survive.
    pub fn image_algebra_partial(&self, tol: &Tolerance) -> Result<(Algebra, Vec<usize>)> {
        let a = &self.algebra;
        let mut kept = Vec::new();
        let mut frame = CMatrix::zeros(self.space_dim, self.space_dim);
        let mut blocks = Vec::new();
        let mut col = 0;
        for (k, b) in a.blocks().iter().enumerate() {
            let p = self.apply(&a.matrix_unit(k, 0, 0));
            let (range, _) = column_space(&p, tol);
            let r = range.ncols();
            if r == 0 {
                continue;
            }
            kept.push(k);
            if col + b.size * r > self.space_dim {
                return Err(Error::NotHomomorphism {
                    residual: f64::INFINITY,
                });
            }
            for i in 0..b.size {
                let lift = self.apply(&a.matrix_unit(k, i, 0));
                let v = lift * &range;
                for j in 0..r {
                    frame.set_column(col + i * r + j, &v.column(j));
                }
            }
            col += b.size * r;
            blocks.push(Block {
                size: b.size,
                multiplicity: r,
            });
        }
        if col != self.space_dim {
            return Err(Error::Refused(
                "representation is not unital: block ranges do not fill the space".into(),
            ));
        }
        let (u1, u2) = crate::numeric::unitarity_residuals(&frame);
        if !tol.accepts(u1.max(u2), (self.space_dim as f64).sqrt()) {
            return Err(Error::NotHomomorphism {
                residual: u1.max(u2),
            });
        }
        Ok((Algebra::with_frame(blocks, frame), kept))
    }
}

/// Element of `target` with the same block components as `x ∈ source`.
///
/// Both algebras must have matching block sizes in the same order.
pub fn transfer(source: &Algebra, target: &Algebra, x: &CMatrix) -> Result<CMatrix> {
    let sizes = |a: &Algebra| a.blocks().iter().map(|b| b.size).collect::<Vec<_>>();
    if sizes(source) != sizes(target) {
        return Err(Error::AlgebraMismatch(
            "cannot transfer elements between algebras with different block sizes".into(),
        ));
    }
    target.element_from_blocks(&source.block_components(x))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{matrix_unit, ONE};

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn multimatrix_dimensions() {
        let a = Algebra::multimatrix(&[(3, 1)]).unwrap();
        assert_eq!((a.dim(), a.rep_dim()), (9, 3));
        let b = Algebra::multimatrix(&[(2, 1), (1, 1)]).unwrap();
        assert_eq!((b.dim(), b.rep_dim()), (5, 3));
        assert_eq!(b.blocks()[0], Block { size: 1, multiplicity: 1 });
        let c = Algebra::multimatrix(&[(2, 3)]).unwrap();
        assert_eq!((c.dim(), c.rep_dim()), (4, 6));
        assert!(Algebra::multimatrix(&[]).is_err());
        assert!(Algebra::multimatrix(&[(0, 1)]).is_err());
    }

    #[test]
    fn basis_is_star_closed_and_multiplicative() {
        let a = Algebra::multimatrix(&[(1, 2), (2, 1)]).unwrap();
        assert!(a.span().orthonormality_residual() < 1e-12);
        for x in a.basis() {
            assert!(a.contains(&x.adjoint(), &tol()).unwrap().0);
            for y in a.basis() {
                assert!(a.contains(&(&x * &y), &tol()).unwrap().0);
            }
        }
    }

    #[test]
    fn commutant_examples() {
        let full = Algebra::full(3).unwrap();
        assert_eq!(full.commutant(&tol()).unwrap().dim(), 1);

        let b = Algebra::multimatrix(&[(1, 1), (2, 1)]).unwrap();
        let bc = b.commutant(&tol()).unwrap();
        assert_eq!(bc.dim(), 2);
        // oracle: kernel of [x, b_i] = 0 over all five basis elements
        let basis = b.basis();
        let oracle = solve_intertwiners(&basis, &basis, (3, 3), &tol()).unwrap();
        assert_eq!(oracle.dim(), 2);
        assert!(bc.span().same_span(&oracle, &tol()).0);

        let m2x3 = Algebra::multimatrix(&[(2, 3)]).unwrap();
        let c = m2x3.commutant(&tol()).unwrap();
        assert_eq!(c.dim(), 9);
        let basis = m2x3.basis();
        let oracle = solve_intertwiners(&basis, &basis, (6, 6), &tol()).unwrap();
        assert_eq!(oracle.dim(), 9);
    }

    #[test]
    fn double_commutant_is_identity() {
        for blocks in [vec![(1, 1), (2, 1)], vec![(2, 3)], vec![(1, 2), (3, 1), (2, 2)]] {
            let a = Algebra::multimatrix(&blocks).unwrap();
            let cc = a.commutant(&tol()).unwrap().commutant(&tol()).unwrap();
            assert!(cc.same_as(&a, &tol()));
            assert_eq!(cc.blocks(), a.blocks());
        }
    }

    #[test]
    fn commutant_commutes() {
        let a = Algebra::multimatrix(&[(1, 2), (2, 2)]).unwrap();
        let c = a.commutant(&tol()).unwrap();
        let mut worst = 0.0f64;
        for x in a.basis() {
            for y in c.basis() {
                worst = worst.max(fro(&(&x * &y - &y * &x)));
            }
        }
        assert!(worst < 1e-10);
        // block pattern: n_k² and m_k² each appear once per block
        for (b, bc) in a.blocks().iter().zip(c.blocks()) {
            assert_eq!((b.size, b.multiplicity), (bc.multiplicity, bc.size));
        }
    }

    #[test]
    fn contains_examples() {
        let b = Algebra::multimatrix(&[(1, 1), (2, 1)]).unwrap();
        assert!(b.contains(&identity(3), &tol()).unwrap().0);
        let (inside, residual) = b.contains(&matrix_unit(3, 3, 0, 1), &tol()).unwrap();
        assert!(!inside);
        assert!((residual - 1.0).abs() < 1e-12);
        let mut rng = seeded_rng(1);
        let x = b.random_element(&mut rng);
        let (inside, residual) = b.contains(&x, &tol()).unwrap();
        assert!(inside && residual < 1e-12);
        assert!(b.contains(&identity(2), &tol()).is_err());
    }

    #[test]
    fn random_representations() {
        let cc = Algebra::multimatrix(&[(1, 1), (1, 1)]).unwrap();
        let r = cc.random_representation(&[1, 1], 4).unwrap();
        assert_eq!(r.space_dim(), 2);
        assert!(r.homomorphism_residual() < 1e-10 && r.unital_residual() < 1e-10);

        let bprime = Algebra::multimatrix(&[(1, 1), (2, 1)])
            .unwrap()
            .commutant(&tol())
            .unwrap();
        let r = bprime.random_representation(&[1, 3], 9).unwrap();
        assert_eq!(r.space_dim(), 4);
        assert!(r.homomorphism_residual() < 1e-10 && r.unital_residual() < 1e-10);

        let m2 = Algebra::full(2).unwrap();
        assert!(m2.random_representation(&[0], 1).is_err());
        let r = m2.random_representation(&[2], 1).unwrap();
        assert_eq!(r.space_dim(), 4);
        assert_eq!(r.multiplicities(&tol()), vec![2]);
    }

    #[test]
    fn image_algebra_transfers_blocks() {
        let a = Algebra::multimatrix(&[(1, 1), (2, 1)]).unwrap();
        let r = a.random_representation(&[2, 1], 17).unwrap();
        let img = r.image_algebra(&tol()).unwrap();
        assert_eq!(img.blocks()[0], Block { size: 1, multiplicity: 2 });
        assert_eq!(img.blocks()[1], Block { size: 2, multiplicity: 1 });
        let mut rng = seeded_rng(2);
        let x = a.random_element(&mut rng);
        let y = r.apply(&x);
        assert!(img.contains(&y, &tol()).unwrap().0);
        let back = transfer(&img, &a, &y).unwrap();
        assert!(fro(&(back - x)) < 1e-10);
    }

    #[test]
    fn non_faithful_image_is_refused() {
        let a = Algebra::multimatrix(&[(1, 1), (1, 1)]).unwrap();
        let r = a.random_representation(&[1, 0], 3).unwrap();
        assert!(matches!(r.image_algebra(&tol()), Err(Error::Refused(_))));
        let _ = ONE;
    }
}
