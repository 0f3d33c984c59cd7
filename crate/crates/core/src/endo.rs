//! Product systems of unital endomorphisms of `B^a(E)`.
//!
//! A module `E ⊂ B(G, H)` spanning `H` is represented through `π`, the
//! identity action of `B^a(E) = ρ'(B')'` on `H`. An endomorphism is stored
//! as a representation of that algebra on `H`. Two routes lead to its
//! fiber: the range of `ϑ(ξξ*)` for a unit vector `ξ`, and the space of
//! intertwiners of `ϑ` with the identity, which yields the commutant fiber
//! and needs no unit vector.

use serde::Serialize;

use crate::algebra::{Algebra, Representation};
use crate::correspondence::{tensor, Correspondence, IsoReport};
use crate::cp::CPMap;
use crate::error::{Error, Result};
use crate::module::ConcreteModule;
use crate::numeric::{
    column_space, fit_linear_map, fro, hs_orthonormalize, hstack, identity, matrix_unit,
    solve_intertwiners, unitarity_residuals, vectorize, CMatrix, Tolerance,
};
use crate::product_system::{FiberSystem, Unit};

/// A unital `*`-endomorphism `ϑ` of `B^a(E)`.
#[derive(Debug, Clone)]
pub struct Endomorphism {
    // E as a C-B correspondence, spanning H
    scalar: Correspondence,
    adjointables: Algebra,
    theta: Representation,
}

/// Result of building the fiber from a unit vector.
#[derive(Debug, Clone)]
pub struct UnitConstruction {
    /// `p_1 E` with left action `b · x = ϑ(ξ b ξ*) x`, on the range of `p_1`.
    pub fiber: Correspondence,
    /// `p_1 = ϑ(ξξ*)` on `H`.
    pub p1: CMatrix,
    /// Isometry from the fiber's space onto the range of `p_1`.
    pub range: CMatrix,
    /// `E ⊙ E_1 → E`, `x ⊙ y ↦ ϑ(xξ*) y`.
    pub unitary: CMatrix,
    /// Fit, unitarity and module-mapping residual of `unitary`.
    pub unitary_residual: f64,
    /// `max_a ‖ϑ(a) − u (a ⊙ id) u*‖_F`.
    pub reconstruction_residual: f64,
    pub certified: bool,
    pub notes: Vec<String>,
}

/// Result of building the fiber from intertwiners.
#[derive(Debug, Clone)]
pub struct CommutantConstruction {
    /// `{x' : ϑ(a) x' = x' a}` as a `B'`-`B'` correspondence.
    pub fiber_prime: Correspondence,
    /// Its commutant, a `B`-`B` correspondence.
    pub fiber: Correspondence,
    /// Whether the intertwiners span `H`.
    pub total: bool,
    /// `E ⊙ E_1 → E`, `x ⊙ (y' ⊙ g) ↦ y' x g`.
    pub unitary: CMatrix,
    pub unitary_residual: f64,
    pub reconstruction_residual: f64,
    pub certified: bool,
}

#[derive(Debug, Clone)]
pub struct DualityReport {
    /// `commutant(fiber via unit)` against the intertwiner fiber.
    pub duality: IsoReport,
    /// `fiber(ϑ²)` against `fiber(ϑ) ⊙ fiber(ϑ)` for the unit route.
    pub unit_square: IsoReport,
    /// The same comparison for the intertwiner route.
    pub commutant_square: IsoReport,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct DilationReport {
    pub p0: CMatrix,
    pub p1: CMatrix,
    /// `‖p_1 ξ − ξ‖_F`.
    pub order_residual: f64,
    pub order_holds: bool,
    /// `T(b) = ⟨ξ, ϑ(ξ b ξ*) ξ⟩`, present when the order holds.
    pub extracted_cp: Option<CPMap>,
    /// `ξ` as a unit of the fiber system, present when the order holds.
    pub unit: Option<Unit>,
    /// `max_{n ≤ 3} max_b ‖⟨ξ_n, b ξ_n⟩ − T^n(b)‖_F`.
    pub semigroup_residual: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MoritaReport {
    pub holds: bool,
    /// Span distance between `B^a(E)'` and `ρ'(B')`.
    pub distance: f64,
}

impl Endomorphism {
    /// `E` as a `C`-`B` correspondence, cut to its reachable span, together
    /// with `B^a(E)` acting on that span.
    fn prepare(module: ConcreteModule, tol: &Tolerance) -> Result<(Correspondence, Algebra)> {
        if module.is_empty() {
            return Err(Error::Refused("the zero module has no adjointable algebra".into()));
        }
        let scalar = Correspondence::with_scalar_left(module, tol)?;
        let (img, _) = scalar.rho_prime().image_algebra_partial(tol)?;
        let adjointables = img.commutant(tol)?;
        Ok((scalar, adjointables))
    }

    /// The algebra `B^a(E) ⊂ B(H)` on which endomorphisms act, where `H` is
    /// the reachable span of `module` (the target itself for total modules).
    pub fn adjointables_of(module: &ConcreteModule, tol: &Tolerance) -> Result<Algebra> {
        Ok(Endomorphism::prepare(module.clone(), tol)?.1)
    }

    /// Endomorphism given by its images on the basis of
    /// [`Endomorphism::adjointables_of`].
    pub fn from_images(
        module: ConcreteModule,
        images: Vec<CMatrix>,
        tol: &Tolerance,
    ) -> Result<Endomorphism> {
        let (scalar, adjointables) = Endomorphism::prepare(module, tol)?;
        let h = scalar.h_dim();
        let theta = Representation::new(&adjointables, h, images)?;
        let e = Endomorphism {
            scalar,
            adjointables,
            theta,
        };
        e.validate(tol)?;
        Ok(e)
    }

    pub fn from_fn(
        module: ConcreteModule,
        f: impl Fn(&CMatrix) -> CMatrix,
        tol: &Tolerance,
    ) -> Result<Endomorphism> {
        let (scalar, adjointables) = Endomorphism::prepare(module, tol)?;
        let theta = Representation::from_fn(&adjointables, scalar.h_dim(), f)?;
        let e = Endomorphism {
            scalar,
            adjointables,
            theta,
        };
        e.validate(tol)?;
        Ok(e)
    }

    pub fn identity(module: ConcreteModule, tol: &Tolerance) -> Result<Endomorphism> {
        Endomorphism::from_fn(module, |a| a.clone(), tol)
    }

    /// `a ↦ u a u*` for a unitary `u` on `H`.
    pub fn inner(module: ConcreteModule, u: &CMatrix, tol: &Tolerance) -> Result<Endomorphism> {
        let (r1, r2) = unitarity_residuals(u);
        if !tol.accepts(r1.max(r2), (u.nrows() as f64).sqrt()) {
            return Err(Error::Invalid(format!(
                "implementing operator is not unitary (residual {:.3e})",
                r1.max(r2)
            )));
        }
        Endomorphism::from_fn(module, |a| u * a * u.adjoint(), tol)
    }

    /// Moves block `k` of `B^a(E)` to block `perm[k]`; paired blocks must
    /// have equal size.
    pub fn block_permutation(
        module: ConcreteModule,
        perm: &[usize],
        tol: &Tolerance,
    ) -> Result<Endomorphism> {
        let adj = Endomorphism::adjointables_of(&module, tol)?;
        let blocks = adj.blocks();
        let mut seen = vec![false; blocks.len()];
        if perm.len() != blocks.len() || perm.iter().any(|&p| p >= blocks.len() || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::Invalid(format!(
                "{perm:?} is not a permutation of the {} blocks",
                blocks.len()
            )));
        }
        if let Some(k) = (0..blocks.len()).find(|&k| blocks[k].size != blocks[perm[k]].size) {
            return Err(Error::Invalid(format!(
                "block {k} has size {}, its target block {} has size {}",
                blocks[k].size,
                perm[k],
                blocks[perm[k]].size
            )));
        }
        let adj2 = adj.clone();
        Endomorphism::from_fn(
            module,
            move |a| {
                let parts = adj2.block_components(a);
                let mut moved = parts.clone();
                for (k, &p) in perm.iter().enumerate() {
                    moved[p] = parts[k].clone();
                }
                adj2.element_from_blocks(&moved).expect("block shapes checked")
            },
            tol,
        )
    }

    fn validate(&self, tol: &Tolerance) -> Result<()> {
        self.theta.check(tol, true)?;
        for img in self.theta.images() {
            let (inside, residual) = self.adjointables.contains(img, tol)?;
            if !inside {
                return Err(Error::Invalid(format!(
                    "endomorphism leaves B^a(E) (residual {residual:.3e})"
                )));
            }
        }
        Ok(())
    }

    pub fn module(&self) -> &ConcreteModule {
        self.scalar.module()
    }

    pub fn base(&self) -> &Algebra {
        self.scalar.right()
    }

    pub fn adjointables(&self) -> &Algebra {
        &self.adjointables
    }

    pub fn h_dim(&self) -> usize {
        self.scalar.h_dim()
    }

    pub fn images(&self) -> &[CMatrix] {
        self.theta.images()
    }

    pub fn apply(&self, a: &CMatrix) -> CMatrix {
        self.theta.apply(a)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Endomorphism, tol: &Tolerance) -> Result<Endomorphism> {
        self.adjointables
            .ensure_same(&other.adjointables, tol, "endomorphisms of different algebras")?;
        let theta = Representation::from_fn(&self.adjointables, self.h_dim(), |a| {
            self.apply(&other.apply(a))
        })?;
        Ok(Endomorphism {
            scalar: self.scalar.clone(),
            adjointables: self.adjointables.clone(),
            theta,
        })
    }

    pub fn power(&self, n: usize, tol: &Tolerance) -> Result<Endomorphism> {
        let mut out = Endomorphism::identity(self.module().clone(), tol)?;
        for _ in 0..n {
            out = self.compose(&out, tol)?;
        }
        Ok(out)
    }

    /// `B^a(E)' = ρ'(B')` inside `B(H)`.
    pub fn morita_check(&self, tol: &Tolerance) -> Result<MoritaReport> {
        let lhs = self.adjointables.commutant(tol)?;
        let (rhs, _) = self.scalar.rho_prime().image_algebra_partial(tol)?;
        let (holds, distance) = lhs.span().same_span(rhs.span(), tol);
        Ok(MoritaReport { holds, distance })
    }

    fn check_unit_vector(&self, xi: &CMatrix, tol: &Tolerance) -> Result<()> {
        let g = self.base().rep_dim();
        if xi.shape() != (self.h_dim(), g) {
            return Err(Error::Shape(format!(
                "unit vector is {}x{}, expected {}x{g}",
                xi.nrows(),
                xi.ncols(),
                self.h_dim()
            )));
        }
        let (inside, r) = self.module().contains(xi, tol);
        if !inside {
            return Err(Error::Invalid(format!(
                "unit vector is not in the module (residual {r:.3e})"
            )));
        }
        let r = fro(&(xi.adjoint() * xi - identity(g)));
        if !tol.accepts(r, 1.0) {
            return Err(Error::Invalid(format!(
                "⟨ξ, ξ⟩ differs from the unit by {r:.3e}"
            )));
        }
        Ok(())
    }

    /// Fiber `p_1 E` from a unit vector `ξ`, with the unitary `E ⊙ E_1 → E`.
    pub fn construct_via_unit(&self, xi: &CMatrix, tol: &Tolerance) -> Result<UnitConstruction> {
        self.check_unit_vector(xi, tol)?;
        let b = self.base().clone();
        let p1 = self.apply(&(xi * xi.adjoint()));
        let q = column_space(&p1, tol).0;
        let qa = q.adjoint();
        let gens: Vec<CMatrix> = self.module().basis().iter().map(|x| &qa * &p1 * x).collect();
        let span = hs_orthonormalize((q.ncols(), b.rep_dim()), &gens, tol)?;
        let module = ConcreteModule::from_span(&b, span);
        let images = b
            .span()
            .map(|x| &qa * self.apply(&(xi * x * xi.adjoint())) * &q);
        let fiber = Correspondence::new(&b, module, images, tol)?;

        let (joined, map) = tensor(&self.scalar, &fiber, tol)?;
        let mut src = Vec::new();
        let mut dst = Vec::new();
        for x in self.module().basis() {
            let lift = self.apply(&(&x * xi.adjoint()));
            for y in fiber.module().basis() {
                src.push(map.elem(&x, &y));
                dst.push(&lift * &q * &y);
            }
        }
        let (u, fit) = fit_linear_map(
            &hstack(joined.h_dim(), &src),
            &hstack(self.h_dim(), &dst),
            tol,
        )?;
        let unitary_residual = fit.max(joined.intertwining_residual(&self.scalar, &u));
        let reconstruction_residual = self.reconstruction(&u, |a| map.lift_left(a));
        let scale = (self.h_dim() as f64).sqrt();
        let certified = tol.accepts(unitary_residual, scale)
            && tol.accepts(reconstruction_residual, scale);
        let notes = vec![format!(
            "surjectivity of x ⊙ y ↦ ϑ(xξ*)y follows from dim E ⊙ E_1 = {} = dim H",
            joined.h_dim()
        )];
        Ok(UnitConstruction {
            fiber,
            p1,
            range: q,
            unitary: u,
            unitary_residual,
            reconstruction_residual,
            certified,
            notes,
        })
    }

    fn reconstruction(&self, u: &CMatrix, lift: impl Fn(&CMatrix) -> CMatrix) -> f64 {
        if u.shape() != (self.h_dim(), self.h_dim()) {
            return f64::INFINITY;
        }
        self.adjointables
            .basis()
            .iter()
            .map(|a| fro(&(self.apply(a) - u * lift(a) * u.adjoint())))
            .fold(0.0, f64::max)
    }

    /// Fiber from the intertwiners of `ϑ` with the identity; needs `E` full
    /// but no unit vector.
    pub fn construct_via_commutant(&self, tol: &Tolerance) -> Result<CommutantConstruction> {
        if !self.module().is_full(tol) {
            return Err(Error::Refused(
                "module is not full, so ρ' is not faithful; restrict B to the range of the inner product first".into(),
            ));
        }
        let h = self.h_dim();
        let rho_prime = self.scalar.rho_prime();
        let bprime = rho_prime.algebra().clone();
        let r = rho_prime.image_algebra(tol)?;

        let gens = self.adjointables.generators();
        let lefts: Vec<CMatrix> = gens.iter().map(|a| self.apply(a)).collect();
        let span = solve_intertwiners(&lefts, &gens, (h, h), tol)?;
        let total = if span.dim() == 0 {
            false
        } else {
            let cols: Vec<CMatrix> = span.basis();
            column_space(&hstack(h, &cols), tol).0.ncols() == h
        };
        if !total {
            return Err(Error::Numeric(
                "intertwiners of the endomorphism do not span the space".into(),
            ));
        }
        let inter = Correspondence::new(
            &r,
            ConcreteModule::from_span(&r, span),
            r.basis(),
            tol,
        )?;

        // B' on G as a correspondence with left action of ρ'(B') through ρ'^{-1}
        let g = bprime.rep_dim();
        let stacked = hstack(
            h * h,
            &rho_prime
                .images()
                .iter()
                .map(|m| {
                    let v = vectorize(m);
                    CMatrix::from_column_slice(h * h, 1, v.as_slice())
                })
                .collect::<Vec<_>>(),
        );
        let (coeff_map, fit) = fit_linear_map(&stacked, &identity(bprime.dim()), tol)?;
        if !tol.accepts(fit, 1.0) {
            return Err(Error::Numeric(format!(
                "ρ' could not be inverted on its image (residual {fit:.3e})"
            )));
        }
        let bprime_basis = bprime.basis();
        let phi = |x: &CMatrix| {
            let c = &coeff_map * vectorize(x);
            bprime_basis
                .iter()
                .zip(c.iter())
                .fold(CMatrix::zeros(g, g), |acc, (b, z)| acc + b * *z)
        };
        let through = Correspondence::new(
            &r,
            ConcreteModule::identity(&bprime),
            r.span().map(|x| phi(x)),
            tol,
        )?;
        let (joined, map) = tensor(&inter, &through, tol)?;
        let fiber_prime = Correspondence::new(
            &bprime,
            joined.module().clone(),
            bprime
                .span()
                .map(|b| joined.left_rep().apply(&rho_prime.apply(b))),
            tol,
        )?;
        let fiber = fiber_prime.commutant(tol)?;
        if fiber.h_dim() != fiber_prime.h_dim() {
            return Err(Error::Numeric(
                "commutant of the intertwiner fiber does not span its space".into(),
            ));
        }

        // x ⊙ (y' ⊙ g) ↦ y' x g
        let (outer, map2) = tensor(&self.scalar, &fiber, tol)?;
        let mut src = Vec::new();
        let mut dst = Vec::new();
        for x in self.module().basis() {
            for y in inter.module().basis() {
                for i in 0..g {
                    let e = matrix_unit(g, 1, i, 0);
                    src.push(map2.elem(&x, &map.elem(&y, &e)));
                    dst.push(&y * &x * &e);
                }
            }
        }
        let (u, fit) = fit_linear_map(&hstack(outer.h_dim(), &src), &hstack(h, &dst), tol)?;
        let unitary_residual = fit.max(outer.intertwining_residual(&self.scalar, &u));
        let reconstruction_residual = self.reconstruction(&u, |a| map2.lift_left(a));
        let scale = (h as f64).sqrt();
        let certified = tol.accepts(unitary_residual, scale)
            && tol.accepts(reconstruction_residual, scale);
        Ok(CommutantConstruction {
            fiber_prime,
            fiber,
            total,
            unitary: u,
            unitary_residual,
            reconstruction_residual,
            certified,
        })
    }

    /// Compares the two constructions and their behaviour under `ϑ ↦ ϑ²`.
    pub fn duality_check(&self, xi: &CMatrix, tol: &Tolerance) -> Result<DualityReport> {
        let via_unit = self.construct_via_unit(xi, tol)?;
        let via_commutant = self.construct_via_commutant(tol)?;
        let duality = via_unit
            .fiber
            .commutant(tol)?
            .iso_check(&via_commutant.fiber_prime, tol)?;

        let square = self.compose(self, tol)?;
        let unit2 = square.construct_via_unit(xi, tol)?;
        let (tensor_unit, _) = tensor(&via_unit.fiber, &via_unit.fiber, tol)?;
        let unit_square = unit2.fiber.iso_check(&tensor_unit, tol)?;
        let comm2 = square.construct_via_commutant(tol)?;
        let (tensor_comm, _) = tensor(&via_commutant.fiber_prime, &via_commutant.fiber_prime, tol)?;
        let commutant_square = comm2.fiber_prime.iso_check(&tensor_comm, tol)?;
        let passed = duality.certified
            && unit_square.certified
            && commutant_square.certified
            && via_unit.certified
            && via_commutant.certified;
        Ok(DualityReport {
            duality,
            unit_square,
            commutant_square,
            passed,
        })
    }

    /// Tests `ϑ(ξξ*) ≥ ξξ*` and, when it holds, extracts the compressed CP
    /// map and checks it against the unit `ξ` of the fiber system.
    pub fn dilation_check(&self, xi: &CMatrix, tol: &Tolerance) -> Result<DilationReport> {
        self.check_unit_vector(xi, tol)?;
        let b = self.base().clone();
        let p0 = xi * xi.adjoint();
        let p1 = self.apply(&p0);
        let order_residual = fro(&(&p1 * xi - xi));
        let order_holds = tol.accepts(order_residual, 1.0);
        if !order_holds {
            return Ok(DilationReport {
                p0,
                p1,
                order_residual,
                order_holds,
                extracted_cp: None,
                unit: None,
                semigroup_residual: None,
            });
        }
        let images = b
            .span()
            .map(|x| xi.adjoint() * self.apply(&(xi * x * xi.adjoint())) * xi);
        let t = CPMap::from_action(&b, &b, images, tol)?;
        let construction = self.construct_via_unit(xi, tol)?;
        let system = FiberSystem::new(construction.fiber, tol)?;
        let unit = Unit::new(&system, construction.range.adjoint() * xi, tol)?;
        let mut worst = t.unital_residual();
        for n in 1..=3 {
            worst = worst.max(unit.cp(n, tol)?.distance(&t.power(n, tol)?));
        }
        Ok(DilationReport {
            p0,
            p1,
            order_residual,
            order_holds,
            extracted_cp: Some(t),
            unit: Some(unit),
            semigroup_residual: Some(worst),
        })
    }
}
