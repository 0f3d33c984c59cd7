//! Discrete product systems generated by a single `B`-`B` correspondence.
//!
//! The `n`-th fiber is `E_1^{⊙n}`, bracketed from the left. Elements of the
//! form `x_1 ⊙ … ⊙ x_n` are called words; associators are the unitaries that
//! send `(x_1 ⊙ … ⊙ x_m) ⊙ (y_1 ⊙ … ⊙ y_n)` to the word of length `m + n`.

use std::collections::BTreeMap;
use std::sync::{Arc, RwLock};

use crate::algebra::Algebra;
use crate::correspondence::{tensor, Correspondence, MultiplicityMatrix, TensorMap};
use crate::cp::CPMap;
use crate::error::{Error, Result};
use crate::module::ConcreteModule;
use crate::numeric::{
    column_space, fit_linear_map, fro, hs_orthonormalize, hstack, identity, random_matrix,
    seeded_rng, unitarity_residuals, CMatrix, OperatorSpan, Tolerance,
};

/// One cached fiber together with the map used to build it from the
/// previous one.
#[derive(Debug)]
struct Level {
    fiber: Correspondence,
    // E_{n-1} ⊙ E_1 coordinates; absent for n ≤ 1
    step: Option<TensorMap>,
}

#[derive(Debug)]
struct Inner {
    base: Algebra,
    generator: Correspondence,
    levels: RwLock<BTreeMap<usize, Arc<Level>>>,
}

/// The product system `(E_n)` generated by one `B`-`B` correspondence.
///
/// Clones share the power cache. Cache population is pure memoization, so
/// concurrent callers may compute a level twice without affecting results.
#[derive(Debug, Clone)]
pub struct FiberSystem {
    inner: Arc<Inner>,
}

/// Verified re-bracketing unitary `E_m ⊙ E_n → E_{m+n}`.
#[derive(Debug, Clone)]
pub struct Associator {
    pub m: usize,
    pub n: usize,
    pub unitary: CMatrix,
    /// Fit residual on words, unitarity and intertwining, whichever is worst.
    pub residual: f64,
    pub certified: bool,
}

impl FiberSystem {
    pub fn new(generator: Correspondence, tol: &Tolerance) -> Result<FiberSystem> {
        generator.left().ensure_same(
            generator.right(),
            tol,
            "a product system needs a B-B correspondence",
        )?;
        let mut levels = BTreeMap::new();
        levels.insert(
            0,
            Arc::new(Level {
                fiber: Correspondence::identity(generator.right(), tol)?,
                step: None,
            }),
        );
        levels.insert(
            1,
            Arc::new(Level {
                fiber: generator.clone(),
                step: None,
            }),
        );
        Ok(FiberSystem {
            inner: Arc::new(Inner {
                base: generator.right().clone(),
                generator,
                levels: RwLock::new(levels),
            }),
        })
    }

    pub fn base(&self) -> &Algebra {
        &self.inner.base
    }

    pub fn generator(&self) -> &Correspondence {
        &self.inner.generator
    }

    fn level(&self, n: usize, tol: &Tolerance) -> Result<Arc<Level>> {
        if let Some(l) = self.inner.levels.read().expect("cache lock").get(&n) {
            return Ok(l.clone());
        }
        let prev = self.level(n - 1, tol)?;
        let (fiber, map) = tensor(&prev.fiber, &self.inner.generator, tol)?;
        let level = Arc::new(Level {
            fiber,
            step: Some(map),
        });
        let mut cache = self.inner.levels.write().expect("cache lock");
        Ok(cache.entry(n).or_insert(level).clone())
    }

    /// `E_n = E_1^{⊙n}`; `E_0` is the identity correspondence of `B`.
    pub fn power(&self, n: usize, tol: &Tolerance) -> Result<Correspondence> {
        Ok(self.level(n, tol)?.fiber.clone())
    }

    /// The word `x_1 ⊙ … ⊙ x_n ∈ E_n`; the empty word is `1 ∈ E_0`.
    pub fn word(&self, xs: &[CMatrix], tol: &Tolerance) -> Result<CMatrix> {
        let Some(first) = xs.first() else {
            return Ok(self.base().unit());
        };
        let mut w = first.clone();
        for (i, x) in xs.iter().enumerate().skip(1) {
            let level = self.level(i + 1, tol)?;
            let step = level.step.as_ref().expect("levels above one carry a step map");
            w = step.elem(&w, x);
        }
        Ok(w)
    }

    /// Builds and verifies the associator `E_m ⊙ E_n → E_{m+n}` by fitting it
    /// on random words.
    pub fn associator(&self, m: usize, n: usize, seed: u64, tol: &Tolerance) -> Result<Associator> {
        let target = self.power(m + n, tol)?;
        if m == 0 || n == 0 {
            let h = target.h_dim();
            return Ok(Associator {
                m,
                n,
                unitary: identity(h),
                residual: 0.0,
                certified: true,
            });
        }
        let em = self.power(m, tol)?;
        let en = self.power(n, tol)?;
        let (joined, map) = tensor(&em, &en, tol)?;
        let basis = self.generator().module().basis();
        let mut rng = seeded_rng(seed);
        let mut random_element = || {
            let c = random_matrix(basis.len(), 1, &mut rng);
            basis
                .iter()
                .zip(c.iter())
                .fold(CMatrix::zeros(basis[0].nrows(), basis[0].ncols()), |acc, (b, z)| {
                    acc + b * *z
                })
        };
        let g = self.base().rep_dim();
        let samples = target.h_dim().div_ceil(g) + 2;
        let mut src = Vec::with_capacity(samples);
        let mut dst = Vec::with_capacity(samples);
        for _ in 0..samples {
            let xs: Vec<CMatrix> = (0..m + n).map(|_| random_element()).collect();
            let left = self.word(&xs[..m], tol)?;
            let right = self.word(&xs[m..], tol)?;
            src.push(map.elem(&left, &right));
            dst.push(self.word(&xs, tol)?);
        }
        let src = hstack(joined.h_dim(), &src);
        let dst = hstack(target.h_dim(), &dst);
        let reach = column_space(&src, tol).0.ncols();
        let (u, fit) = fit_linear_map(&src, &dst, tol)?;
        let mut residual = fit.max(joined.intertwining_residual(&target, &u));
        if reach < joined.h_dim() {
            residual = f64::INFINITY;
        }
        let certified = tol.accepts(residual, (target.h_dim() as f64).sqrt());
        Ok(Associator {
            m,
            n,
            unitary: u,
            residual,
            certified,
        })
    }

    /// Checks every associator with `m + n ≤ max_total` and `m, n ≥ 1`;
    /// returns the worst residual.
    pub fn associativity_residual(&self, max_total: usize, tol: &Tolerance) -> Result<f64> {
        let mut worst = 0.0f64;
        for total in 2..=max_total {
            for m in 1..total {
                let a = self.associator(m, total - m, (m * 31 + total) as u64, tol)?;
                worst = worst.max(a.residual);
            }
        }
        Ok(worst)
    }

    /// Multiplicity matrix of `E_1 ⊖ ωB`, the part of the fiber orthogonal to
    /// a central unital reference unit.
    pub fn complement_multiplicity(
        &self,
        omega: &CentralUnit,
        tol: &Tolerance,
    ) -> Result<MultiplicityMatrix> {
        omega.ensure_reference(tol)?;
        let e = self.generator();
        let w = omega.xi1();
        let p = identity(e.h_dim()) - w * w.adjoint();
        let q = column_space(&p, tol).0;
        let blocks = self.base().blocks().len();
        if q.ncols() == 0 {
            return Ok(MultiplicityMatrix::zeros(blocks, blocks));
        }
        e.restrict(&q, tol)?.multiplicity_matrix(tol)
    }
}

/// A unit `(ξ_n)` with `ξ_n = ξ_1^{⊙n}`.
#[derive(Debug, Clone)]
pub struct Unit {
    system: FiberSystem,
    xi1: CMatrix,
}

impl Unit {
    pub fn new(system: &FiberSystem, xi1: CMatrix, tol: &Tolerance) -> Result<Unit> {
        let e = system.generator();
        if xi1.shape() != (e.h_dim(), e.right().rep_dim()) {
            return Err(Error::Shape(format!(
                "unit element is {}x{}, the fiber lives in {}x{}",
                xi1.nrows(),
                xi1.ncols(),
                e.h_dim(),
                e.right().rep_dim()
            )));
        }
        let (inside, residual) = e.module().contains(&xi1, tol);
        if !inside {
            return Err(Error::Invalid(format!(
                "unit element is not in the fiber (residual {residual:.3e})"
            )));
        }
        Ok(Unit {
            system: system.clone(),
            xi1,
        })
    }

    pub fn system(&self) -> &FiberSystem {
        &self.system
    }

    pub fn xi1(&self) -> &CMatrix {
        &self.xi1
    }

    /// `ξ_n ∈ E_n`.
    pub fn xi(&self, n: usize, tol: &Tolerance) -> Result<CMatrix> {
        self.system.word(&vec![self.xi1.clone(); n], tol)
    }

    /// `‖⟨ξ_1, ξ_1⟩ − 1‖_F`.
    pub fn unital_residual(&self) -> f64 {
        let g = self.xi1.ncols();
        fro(&(self.xi1.adjoint() * &self.xi1 - identity(g)))
    }

    pub fn is_unital(&self, tol: &Tolerance) -> bool {
        tol.accepts(self.unital_residual(), 1.0)
    }

    /// `max_b ‖b ξ_1 − ξ_1 b‖_F` over a basis of `B`, with the verdict.
    pub fn is_central(&self, tol: &Tolerance) -> (bool, f64) {
        let e = self.system.generator();
        let residual = self
            .system
            .base()
            .basis()
            .iter()
            .map(|b| fro(&(e.act_left(b, &self.xi1) - &self.xi1 * b)))
            .fold(0.0, f64::max);
        (tol.accepts(residual, 1.0), residual)
    }

    /// `T_n(b) = ⟨ξ_n, b ξ_n⟩`.
    pub fn cp(&self, n: usize, tol: &Tolerance) -> Result<CPMap> {
        let b = self.system.base();
        if n == 0 {
            return Ok(CPMap::identity(b));
        }
        let en = self.system.power(n, tol)?;
        let xi = self.xi(n, tol)?;
        let images = b.span().map(|a| xi.adjoint() * en.left_rep().apply(a) * &xi);
        CPMap::from_action(b, b, images, tol)
    }

    /// `max_b ‖T_{m+n}(b) − T_n(T_m(b))‖_F`.
    pub fn semigroup_residual(&self, m: usize, n: usize, tol: &Tolerance) -> Result<f64> {
        let joint = self.cp(m + n, tol)?;
        let composed = self.cp(m, tol)?.then(&self.cp(n, tol)?, tol)?;
        Ok(joint.distance(&composed))
    }

    /// `‖α_{m,n}(ξ_m ⊙ ξ_n) − ξ_{m+n}‖_F` under the verified associator.
    pub fn multiplicativity_residual(&self, m: usize, n: usize, tol: &Tolerance) -> Result<f64> {
        let target = self.xi(m + n, tol)?;
        if m == 0 || n == 0 {
            let lhs = if m == 0 {
                self.xi(n, tol)?
            } else {
                self.xi(m, tol)?
            };
            return Ok(fro(&(lhs - target)));
        }
        let em = self.system.power(m, tol)?;
        let en = self.system.power(n, tol)?;
        let (_, map) = tensor(&em, &en, tol)?;
        let assoc = self.system.associator(m, n, 7, tol)?;
        let joined = map.elem(&self.xi(m, tol)?, &self.xi(n, tol)?);
        Ok(fro(&(&assoc.unitary * joined - target)).max(assoc.residual))
    }
}

/// A unit whose first element commutes with `B`.
#[derive(Debug, Clone)]
pub struct CentralUnit {
    unit: Unit,
    /// Largest commutator `‖b ξ_1 − ξ_1 b‖_F` seen.
    pub centrality_residual: f64,
}

impl CentralUnit {
    pub fn new(unit: Unit, tol: &Tolerance) -> Result<CentralUnit> {
        let (central, residual) = unit.is_central(tol);
        if !central {
            return Err(Error::Invalid(format!(
                "unit is not central (commutator residual {residual:.3e})"
            )));
        }
        Ok(CentralUnit {
            unit,
            centrality_residual: residual,
        })
    }

    pub fn unit(&self) -> &Unit {
        &self.unit
    }

    pub fn xi1(&self) -> &CMatrix {
        self.unit.xi1()
    }

    fn ensure_reference(&self, tol: &Tolerance) -> Result<()> {
        if !self.unit.is_unital(tol) {
            return Err(Error::Invalid(format!(
                "reference unit is not unital (residual {:.3e})",
                self.unit.unital_residual()
            )));
        }
        Ok(())
    }
}

/// Spatial product of two systems amalgamated over their reference units.
#[derive(Debug, Clone)]
pub struct SpatialProduct {
    pub system: FiberSystem,
    pub omega: CentralUnit,
    /// Isometric bimodule embeddings `H_i → H_F` of the two generator spaces.
    pub first: CMatrix,
    pub second: CMatrix,
}

/// Isometry, bimodule-linearity and intersection diagnostics of a spatial
/// product.
#[derive(Debug, Clone)]
pub struct EmbeddingReport {
    pub isometry_residual: f64,
    pub intertwining_residual: f64,
    /// `dim(J_1 E¹ ∩ J_2 E²)` computed from the dimension of the sum.
    pub intersection_dim: usize,
    /// `dim ωB`.
    pub reference_dim: usize,
    /// Largest distance of `ωb` from either embedded factor.
    pub reference_residual: f64,
    /// Largest `‖⟨J_1 x, J_2 y⟩‖` over complements `x ⊥ ω¹B`, `y ⊥ ω²B`.
    pub cross_complement_residual: f64,
}

/// `E¹ ⊛ E²`: the quotient of `H_1 ⊕ H_2` under the inner product that keeps
/// each factor and pairs `x ∈ E¹`, `y ∈ E²` to `⟨x, ω¹⟩⟨ω², y⟩`.
pub fn spatial_product(
    s1: &FiberSystem,
    w1: &CentralUnit,
    s2: &FiberSystem,
    w2: &CentralUnit,
    tol: &Tolerance,
) -> Result<SpatialProduct> {
    let b = s1.base();
    b.ensure_same(s2.base(), tol, "spatial product of systems over different algebras")?;
    w1.ensure_reference(tol)?;
    w2.ensure_reference(tol)?;
    for w in [w1, w2] {
        let (central, r) = w.unit.is_central(tol);
        if !central {
            return Err(Error::Invalid(format!(
                "reference unit is not central (commutator residual {r:.3e})"
            )));
        }
    }
    let (e1, e2) = (s1.generator(), s2.generator());
    let (h1, h2) = (e1.h_dim(), e2.h_dim());
    let mut gram = identity(h1 + h2);
    let cross = w1.xi1() * w2.xi1().adjoint();
    gram.view_mut((0, h1), (h1, h2)).copy_from(&cross);
    gram.view_mut((h1, 0), (h2, h1)).copy_from(&cross.adjoint());
    let q = crate::numeric::gram_quotient(&gram, tol)?;
    let hf = q.dim();
    let j1 = q.factor.columns(0, h1).into_owned();
    let j2 = q.factor.columns(h1, h2).into_owned();

    let mut gens: Vec<CMatrix> = e1.module().basis().iter().map(|x| &j1 * x).collect();
    gens.extend(e2.module().basis().iter().map(|y| &j2 * y));
    let span = hs_orthonormalize((hf, b.rep_dim()), &gens, tol)?;
    let module = ConcreteModule::from_span(b, span);
    let images = b.span().map(|a| {
        let sum = crate::numeric::direct_sum(&e1.left_rep().apply(a), &e2.left_rep().apply(a));
        &q.factor * sum * &q.right_inverse
    });
    let fiber = Correspondence::new(b, module, images, tol)?;
    let system = FiberSystem::new(fiber, tol)?;
    let omega = Unit::new(&system, &j1 * w1.xi1(), tol)?;
    let omega = CentralUnit::new(omega, tol)?;
    Ok(SpatialProduct {
        system,
        omega,
        first: j1,
        second: j2,
    })
}

impl SpatialProduct {
    /// Checks that both generators embed isometrically and bimodule-linearly
    /// and meet exactly in `ωB`.
    pub fn embedding_report(
        &self,
        s1: &FiberSystem,
        w1: &CentralUnit,
        s2: &FiberSystem,
        w2: &CentralUnit,
        tol: &Tolerance,
    ) -> Result<EmbeddingReport> {
        let f = self.system.generator();
        let b = self.system.base();
        let g = b.rep_dim();
        let hf = f.h_dim();
        let mut isometry_residual = 0.0f64;
        let mut intertwining_residual = 0.0f64;
        let mut spans = Vec::new();
        let mut complements = Vec::new();
        for (j, s, w) in [(&self.first, s1, w1), (&self.second, s2, w2)] {
            let e = s.generator();
            isometry_residual = isometry_residual.max(unitarity_residuals(j).0);
            for a in b.generators() {
                let d = j * e.left_rep().apply(&a) - f.left_rep().apply(&a) * j;
                intertwining_residual = intertwining_residual.max(fro(&d));
            }
            let embedded: Vec<CMatrix> = e.module().basis().iter().map(|x| j * x).collect();
            spans.push(hs_orthonormalize((hf, g), &embedded, tol)?);
            let p = identity(e.h_dim()) - w.xi1() * w.xi1().adjoint();
            complements.push(
                e.module()
                    .basis()
                    .iter()
                    .map(|x| j * &p * x)
                    .collect::<Vec<_>>(),
            );
        }
        let mut all = spans[0].basis();
        all.extend(spans[1].basis());
        let sum = hs_orthonormalize((hf, g), &all, tol)?;
        let intersection_dim = spans[0].dim() + spans[1].dim() - sum.dim();
        let omega_b: Vec<CMatrix> = b.basis().iter().map(|x| self.omega.xi1() * x).collect();
        let reference = hs_orthonormalize((hf, g), &omega_b, tol)?;
        let reference_residual = omega_b
            .iter()
            .map(|v| spans[0].residual(v).max(spans[1].residual(v)))
            .fold(0.0, f64::max);
        let mut cross_complement_residual = 0.0f64;
        for x in &complements[0] {
            for y in &complements[1] {
                cross_complement_residual =
                    cross_complement_residual.max(fro(&(x.adjoint() * y)));
            }
        }
        Ok(EmbeddingReport {
            isometry_residual,
            intertwining_residual,
            intersection_dim,
            reference_dim: reference.dim(),
            reference_residual,
            cross_complement_residual,
        })
    }

    /// `⟨J_1 x, J_2 y⟩_F` for `x ∈ E¹`, `y ∈ E²`.
    pub fn mixed_inner(&self, x: &CMatrix, y: &CMatrix) -> CMatrix {
        (&self.first * x).adjoint() * (&self.second * y)
    }
}

/// The system generated by `C^k` over `C`, with `ω` as reference unit.
pub fn scalar_system(omega: &CMatrix, tol: &Tolerance) -> Result<(FiberSystem, CentralUnit)> {
    let k = omega.nrows();
    if omega.ncols() != 1 || k == 0 {
        return Err(Error::Shape(format!(
            "reference vector must be a nonempty column, found {}x{}",
            omega.nrows(),
            omega.ncols()
        )));
    }
    let c = Algebra::scalars();
    let gens: Vec<CMatrix> = (0..k).map(|i| crate::numeric::matrix_unit(k, 1, i, 0)).collect();
    let module = ConcreteModule::new(&c, k, &gens, tol)?;
    let e = Correspondence::new(&c, module, vec![identity(k)], tol)?;
    let system = FiberSystem::new(e, tol)?;
    let unit = CentralUnit::new(Unit::new(&system, omega.clone(), tol)?, tol)?;
    unit.ensure_reference(tol)?;
    Ok((system, unit))
}

/// Span of `ωB` inside a module, as an operator span.
pub fn reference_span(omega: &CentralUnit, tol: &Tolerance) -> Result<OperatorSpan> {
    let b = omega.unit.system.base();
    let gens: Vec<CMatrix> = b.basis().iter().map(|x| omega.xi1() * x).collect();
    hs_orthonormalize(omega.xi1().shape(), &gens, tol)
}
