//! The block CP map built from two multiplicity spaces with reference
//! vectors, and the comparison of its GNS multiplicity space with the
//! spatial product.
//!
//! With `V_i = id_G ⊗ ω_i : G → G ⊗ C^{k_i}` the map sends
//! `[[a11, a12], [a21, a22]]` on `G ⊕ G` to
//! `[[a11 ⊗ 1, V_1 a12 V_2*], [V_2 a21 V_1*, a22 ⊗ 1]]` on
//! `(G ⊗ C^{k_1}) ⊕ (G ⊗ C^{k_2})`. Tensor indices are `G`-major.

use serde::Serialize;

use crate::algebra::{Algebra, Representation};
use crate::correspondence::{gns, gns_reproduction_residual, Correspondence, Gns, MultiplicityMatrix};
use crate::cp::CPMap;
use crate::error::{Error, Result};
use crate::module::ConcreteModule;
use crate::numeric::{
    column_space, direct_sum, fit_linear_map, fro, hstack, identity, kernel, kron, matrix_unit,
    rank, CMatrix, Tolerance,
};
use crate::product_system::{scalar_system, spatial_product, CentralUnit, FiberSystem};

/// A multiplicity space `C^k` with a unit reference vector `ω`.
#[derive(Debug, Clone)]
pub struct SpatialDatum {
    omega: CMatrix,
}

impl SpatialDatum {
    pub fn new(omega: CMatrix, tol: &Tolerance) -> Result<SpatialDatum> {
        if omega.ncols() != 1 || omega.nrows() == 0 {
            return Err(Error::Shape(format!(
                "reference vector must be a nonempty column, found {}x{}",
                omega.nrows(),
                omega.ncols()
            )));
        }
        let r = (omega.norm() - 1.0).abs();
        if !tol.accepts(r, 1.0) {
            return Err(Error::Invalid(format!(
                "reference vector has norm {}",
                omega.norm()
            )));
        }
        Ok(SpatialDatum { omega })
    }

    /// `C^k` with the first basis vector as reference.
    pub fn standard(k: usize, tol: &Tolerance) -> Result<SpatialDatum> {
        if k == 0 {
            return Err(Error::Invalid("multiplicity space must be nonzero".into()));
        }
        SpatialDatum::new(matrix_unit(k, 1, 0, 0), tol)
    }

    pub fn k(&self) -> usize {
        self.omega.nrows()
    }

    pub fn omega(&self) -> &CMatrix {
        &self.omega
    }

    /// `(C^k)^{⊗n}` with reference `ω^{⊗n}`.
    pub fn tensor_power(&self, n: usize, tol: &Tolerance) -> Result<SpatialDatum> {
        let mut w = CMatrix::from_element(1, 1, crate::numeric::ONE);
        for _ in 0..n {
            w = kron(&w, &self.omega);
        }
        SpatialDatum::new(w, tol)
    }
}

#[derive(Debug, Clone)]
pub struct PowersMap {
    g_dim: usize,
    first: SpatialDatum,
    second: SpatialDatum,
    cp: CPMap,
}

/// The explicit GNS model: `H = C ⊕ (C^{k_1} ⊖ ω_1) ⊕ (C^{k_2} ⊖ ω_2)`.
#[derive(Debug, Clone)]
pub struct PowersModel {
    pub dim: usize,
    /// Isometries `C^{k_i} → H`, `h ↦ (⟨ω_i, h⟩, p_i h)` in the matching slots.
    pub first: CMatrix,
    pub second: CMatrix,
    /// Cyclic vector `ξ : (G ⊗ C^{k_1}) ⊕ (G ⊗ C^{k_2}) → (G ⊕ G) ⊗ H`.
    pub xi: CMatrix,
    /// `max_a ‖⟨ξ, (a ⊗ 1) ξ⟩ − T(a)‖_F`.
    pub residual: f64,
}

/// A GNS correspondence matched against a model through the canonical map
/// `[a ⊗ k] ↦ ρ(a) ξ_model k`.
#[derive(Debug, Clone)]
pub struct ModelComparison {
    pub gns: Gns,
    pub model: Correspondence,
    pub unitary: CMatrix,
    /// Fit, unitarity and intertwining residual of `unitary`.
    pub iso_residual: f64,
    /// `‖u ξ − ξ_model‖_F`.
    pub xi_residual: f64,
    /// `max_a ‖⟨ξ, a ξ⟩ − T(a)‖_F` inside the GNS space.
    pub reproduction_residual: f64,
    pub gns_matrix: MultiplicityMatrix,
    pub model_matrix: MultiplicityMatrix,
}

impl ModelComparison {
    pub fn certified(&self, tol: &Tolerance) -> bool {
        let scale = (self.model.h_dim() as f64).sqrt();
        self.gns_matrix == self.model_matrix
            && tol.accepts(self.iso_residual, scale)
            && tol.accepts(self.xi_residual, scale)
            && tol.accepts(self.reproduction_residual, scale)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PowersGnsReport {
    pub gns_h_dim: usize,
    pub gns_module_dim: usize,
    /// Rank of the Gram kernel of `T`.
    pub gram_rank: usize,
    pub multiplicity: u64,
    pub expected_multiplicity: usize,
    pub iso_residual: f64,
    pub xi_residual: f64,
    pub reproduction_residual: f64,
    pub certified: bool,
}

/// Inner products of the two embedded multiplicity spaces inside the GNS
/// space, matched against the spatial product.
#[derive(Debug, Clone, Serialize)]
pub struct SpatialComparison {
    pub spatial_dim: usize,
    pub tensor_dim: usize,
    pub not_tensor_product: bool,
    /// Same-factor pairs, first factor.
    pub first_residual: f64,
    pub second_residual: f64,
    /// Cross pairs against `⟨x, ω_1⟩⟨ω_2, y⟩` and its mirror.
    pub mixed_residual: f64,
    /// Fit residual of `J_1 h ↦ x¹_h`, `J_2 h ↦ x²_h`.
    pub map_residual: f64,
    pub isometry_residual: f64,
    /// `‖W ω − x¹_{ω_1}‖`.
    pub omega_residual: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NStepReport {
    pub n: usize,
    pub gns_multiplicity: u64,
    pub expected_multiplicity: usize,
    /// `dim F^{⊙n}` from the product system of the spatial product.
    pub fiber_dim: usize,
    pub expected_fiber_dim: usize,
    /// Dimension of the span of both factor images inside `F^{⊙n}`.
    pub embedded_dim: usize,
    pub map_residual: f64,
    pub isometry_residual: f64,
    pub certified: bool,
}

impl PowersMap {
    pub fn build(
        g_dim: usize,
        first: SpatialDatum,
        second: SpatialDatum,
        tol: &Tolerance,
    ) -> Result<PowersMap> {
        if g_dim == 0 {
            return Err(Error::Invalid("G must be nonzero".into()));
        }
        let g = g_dim;
        let (k1, k2) = (first.k(), second.k());
        let v1 = kron(&identity(g), &first.omega);
        let v2 = kron(&identity(g), &second.omega);
        let source = Algebra::full(2 * g)?;
        let target = Algebra::full(g * (k1 + k2))?;
        let images = source.span().map(|a| {
            let a11 = a.view((0, 0), (g, g)).into_owned();
            let a12 = a.view((0, g), (g, g)).into_owned();
            let a21 = a.view((g, 0), (g, g)).into_owned();
            let a22 = a.view((g, g), (g, g)).into_owned();
            let mut out = direct_sum(&kron(&a11, &identity(k1)), &kron(&a22, &identity(k2)));
            out.view_mut((0, g * k1), (g * k1, g * k2))
                .copy_from(&(&v1 * a12 * v2.adjoint()));
            out.view_mut((g * k1, 0), (g * k2, g * k1))
                .copy_from(&(&v2 * a21 * v1.adjoint()));
            out
        });
        let cp = CPMap::from_action(&source, &target, images, tol)?;
        let r = cp.unital_residual();
        if !tol.accepts(r, (target.rep_dim() as f64).sqrt()) {
            return Err(Error::Numeric(format!("block map is not unital (residual {r:.3e})")));
        }
        Ok(PowersMap {
            g_dim,
            first,
            second,
            cp,
        })
    }

    pub fn g_dim(&self) -> usize {
        self.g_dim
    }

    pub fn first(&self) -> &SpatialDatum {
        &self.first
    }

    pub fn second(&self) -> &SpatialDatum {
        &self.second
    }

    pub fn cp(&self) -> &CPMap {
        &self.cp
    }

    fn ks(&self) -> (usize, usize) {
        (self.first.k(), self.second.k())
    }

    /// The model GNS space built from complements of the reference vectors.
    pub fn predicted_gns(&self, tol: &Tolerance) -> Result<PowersModel> {
        let g = self.g_dim;
        let (k1, k2) = self.ks();
        let dim = k1 + k2 - 1;
        let c1 = kernel(&self.first.omega.adjoint(), tol);
        let c2 = kernel(&self.second.omega.adjoint(), tol);
        let mut j1 = CMatrix::zeros(dim, k1);
        let mut j2 = CMatrix::zeros(dim, k2);
        j1.row_mut(0).copy_from(&self.first.omega.adjoint());
        j2.row_mut(0).copy_from(&self.second.omega.adjoint());
        j1.view_mut((1, 0), (k1 - 1, k1)).copy_from(&c1.adjoint());
        j2.view_mut((k1, 0), (k2 - 1, k2)).copy_from(&c2.adjoint());
        let slot = |i: usize| matrix_unit(2, 1, i, 0);
        let xi = hstack(
            2 * g * dim,
            &[
                kron(&kron(&slot(0), &identity(g)), &j1),
                kron(&kron(&slot(1), &identity(g)), &j2),
            ],
        );
        let residual = self
            .cp
            .source()
            .basis()
            .iter()
            .map(|a| fro(&(xi.adjoint() * kron(a, &identity(dim)) * &xi - self.cp.apply(a))))
            .fold(0.0, f64::max);
        if !tol.accepts(residual, (self.cp.target().rep_dim() as f64).sqrt()) {
            return Err(Error::Numeric(format!(
                "model vector does not reproduce the map (residual {residual:.3e})"
            )));
        }
        Ok(PowersModel {
            dim,
            first: j1,
            second: j2,
            xi,
            residual,
        })
    }

    /// GNS of the map from its Gram kernel, matched against the model.
    pub fn verify_powers_gns(&self, tol: &Tolerance) -> Result<(PowersGnsReport, ModelComparison)> {
        let model = self.predicted_gns(tol)?;
        let dim = model.dim;
        let cmp = compare_gns_with_model(
            &self.cp,
            2 * self.g_dim * dim,
            &|a| kron(a, &identity(dim)),
            &model.xi,
            tol,
        )?;
        let gram_rank = rank(&self.cp.gram_kernel(), tol);
        let multiplicity = cmp.gns_matrix.get(0, 0);
        let report = PowersGnsReport {
            gns_h_dim: cmp.gns.correspondence.h_dim(),
            gns_module_dim: cmp.gns.correspondence.dim(),
            gram_rank,
            multiplicity,
            expected_multiplicity: dim,
            iso_residual: cmp.iso_residual,
            xi_residual: cmp.xi_residual,
            reproduction_residual: cmp.reproduction_residual,
            certified: cmp.certified(tol)
                && multiplicity as usize == dim
                && gram_rank == cmp.gns.correspondence.h_dim(),
        };
        Ok((report, cmp))
    }

    /// Images of `C^{k_1}` and `C^{k_2}` inside the GNS space, moved into the
    /// slot of the first basis vector of the first copy of `G`.
    fn factor_images(&self, g: &Gns) -> (CMatrix, CMatrix) {
        let gd = self.g_dim;
        let (k1, k2) = self.ks();
        let x1 = g.xi.columns(0, k1).into_owned();
        let shift = g
            .correspondence
            .left_rep()
            .apply(&matrix_unit(2 * gd, 2 * gd, 0, gd));
        let x2 = shift * g.xi.columns(gd * k1, k2);
        (x1, x2)
    }

    /// Builds the spatial product of `(C^{k_i}, ω_i)` over `C` and checks it
    /// against the inner products found inside the GNS space.
    pub fn compare_with_spatial_product(&self, tol: &Tolerance) -> Result<SpatialComparison> {
        let (k1, k2) = self.ks();
        let (s1, w1) = scalar_system(&self.first.omega, tol)?;
        let (s2, w2) = scalar_system(&self.second.omega, tol)?;
        let p = spatial_product(&s1, &w1, &s2, &w2, tol)?;
        let g = gns(&self.cp, tol)?;
        let (x1, x2) = self.factor_images(&g);

        let o1 = &self.first.omega;
        let o2 = &self.second.omega;
        let first_residual = fro(&(x1.adjoint() * &x1 - identity(k1)));
        let second_residual = fro(&(x2.adjoint() * &x2 - identity(k2)));
        let mixed_residual = fro(&(x1.adjoint() * &x2 - o1 * o2.adjoint()))
            .max(fro(&(x2.adjoint() * &x1 - o2 * o1.adjoint())));

        let src = hstack(p.first.nrows(), &[p.first.clone(), p.second.clone()]);
        let dst = hstack(x1.nrows(), &[x1.clone(), x2]);
        let (w, map_residual) = fit_linear_map(&src, &dst, tol)?;
        let spatial_dim = p.system.generator().h_dim();
        let isometry_residual = fro(&(w.adjoint() * &w - identity(spatial_dim)));
        let omega_residual = fro(&(&w * p.omega.xi1() - &x1 * o1));
        let scale = (spatial_dim as f64).sqrt();
        let certified = [
            first_residual,
            second_residual,
            mixed_residual,
            map_residual,
            isometry_residual,
            omega_residual,
        ]
        .iter()
        .all(|&r| tol.accepts(r, scale));
        Ok(SpatialComparison {
            spatial_dim,
            tensor_dim: k1 * k2,
            not_tensor_product: spatial_dim < k1 * k2,
            first_residual,
            second_residual,
            mixed_residual,
            map_residual,
            isometry_residual,
            omega_residual,
            certified,
        })
    }

    /// The map built from `((C^{k_i})^{⊗n}, ω_i^{⊗n})`, embedded into the
    /// `n`-th fiber of the one-step spatial product.
    pub fn n_step(&self, n: usize, tol: &Tolerance) -> Result<NStepReport> {
        if n == 0 {
            return Err(Error::Invalid("n-step check needs n ≥ 1".into()));
        }
        let (k1, k2) = self.ks();
        let step = PowersMap::build(
            self.g_dim,
            self.first.tensor_power(n, tol)?,
            self.second.tensor_power(n, tol)?,
            tol,
        )?;
        let g = gns(&step.cp, tol)?;
        let gns_multiplicity = g.correspondence.multiplicity_matrix(tol)?.get(0, 0);
        let (x1, x2) = step.factor_images(&g);

        let (s1, w1) = scalar_system(&self.first.omega, tol)?;
        let (s2, w2) = scalar_system(&self.second.omega, tol)?;
        let p = spatial_product(&s1, &w1, &s2, &w2, tol)?;
        let f = p.system.generator().h_dim();
        let fiber_dim = p.system.power(n, tol)?.h_dim();
        let words = |j: &CMatrix, k: usize| -> Result<Vec<CMatrix>> {
            let cols: Vec<CMatrix> = (0..k).map(|i| j.columns(i, 1).into_owned()).collect();
            (0..k.pow(n as u32))
                .map(|mut idx| {
                    let mut letters = vec![CMatrix::zeros(0, 0); n];
                    for slot in (0..n).rev() {
                        letters[slot] = cols[idx % k].clone();
                        idx /= k;
                    }
                    p.system.word(&letters, tol)
                })
                .collect()
        };
        let mut src = words(&p.first, k1)?;
        src.extend(words(&p.second, k2)?);
        let src = hstack(fiber_dim, &src);
        let dst = hstack(x1.nrows(), &[x1, x2]);
        let (w, map_residual) = fit_linear_map(&src, &dst, tol)?;
        let q = column_space(&src, tol).0;
        let wq = &w * &q;
        let isometry_residual = fro(&(wq.adjoint() * &wq - identity(q.ncols())));
        let expected_multiplicity = k1.pow(n as u32) + k2.pow(n as u32) - 1;
        let expected_fiber_dim = f.pow(n as u32);
        let scale = (fiber_dim as f64).sqrt();
        let certified = gns_multiplicity as usize == expected_multiplicity
            && q.ncols() == expected_multiplicity
            && fiber_dim == expected_fiber_dim
            && tol.accepts(map_residual, scale)
            && tol.accepts(isometry_residual, scale);
        Ok(NStepReport {
            n,
            gns_multiplicity,
            expected_multiplicity,
            fiber_dim,
            expected_fiber_dim,
            embedded_dim: q.ncols(),
            map_residual,
            isometry_residual,
            certified,
        })
    }
}

/// Builds the model correspondence generated by `xi_model` under `model_left`
/// and the canonical unitary from the GNS space of `t` onto it.
pub fn compare_gns_with_model(
    t: &CPMap,
    model_dim: usize,
    model_left: &dyn Fn(&CMatrix) -> CMatrix,
    xi_model: &CMatrix,
    tol: &Tolerance,
) -> Result<ModelComparison> {
    let source = t.source();
    let target = t.target();
    let g = gns(t, tol)?;
    let images = source.span().map(model_left);
    let gens: Vec<CMatrix> = images.iter().map(|m| m * xi_model).collect();
    let module = ConcreteModule::new(target, model_dim, &gens, tol)?;
    let model = Correspondence::new(source, module, images.clone(), tol)?;
    if model.h_dim() != model_dim {
        return Err(Error::Numeric(format!(
            "model vector generates {} of {model_dim} dimensions",
            model.h_dim()
        )));
    }
    let gb = target.rep_dim();
    let mut dst = Vec::with_capacity(images.len() * gb);
    for img in &images {
        let v = img * xi_model;
        for j in 0..gb {
            dst.push(v.columns(j, 1).into_owned());
        }
    }
    let (u, fit) = fit_linear_map(&g.factor, &hstack(model_dim, &dst), tol)?;
    let iso_residual = fit.max(g.correspondence.intertwining_residual(&model, &u));
    let xi_residual = fro(&(&u * &g.xi - xi_model));
    let reproduction_residual = gns_reproduction_residual(&g, t);
    let gns_matrix = g.correspondence.multiplicity_matrix(tol)?;
    let model_matrix = model.multiplicity_matrix(tol)?;
    Ok(ModelComparison {
        gns: g,
        model,
        unitary: u,
        iso_residual,
        xi_residual,
        reproduction_residual,
        gns_matrix,
        model_matrix,
    })
}

/// The block map with `G ⊕ G` replaced by `B ⊕ B` for two systems over a
/// general `B`: `M_2(B) → B^a(F¹ ⊕ F²)`, with diagonal blocks acting from
/// the left on `F^i` and off-diagonal blocks `ω_1 a12 ω_2*`.
#[derive(Debug, Clone)]
pub struct ModulePowers {
    pub cp: CPMap,
    first: FiberSystem,
    second: FiberSystem,
    omega1: CentralUnit,
    omega2: CentralUnit,
}

#[derive(Debug, Clone)]
pub struct ModulePowersReport {
    pub comparison: ModelComparison,
    pub spatial_dim: usize,
    /// Complement multiplicities of the two factors and of the product.
    pub complements: (MultiplicityMatrix, MultiplicityMatrix, MultiplicityMatrix),
    pub additive: bool,
    pub certified: bool,
}

impl ModulePowers {
    pub fn build(
        s1: &FiberSystem,
        w1: &CentralUnit,
        s2: &FiberSystem,
        w2: &CentralUnit,
        tol: &Tolerance,
    ) -> Result<ModulePowers> {
        let b = s1.base();
        b.ensure_same(s2.base(), tol, "block map over different algebras")?;
        let g = b.rep_dim();
        let (e1, e2) = (s1.generator(), s2.generator());

        // M_2(B) on G ⊕ G
        let doubled: Vec<(usize, usize)> =
            b.blocks().iter().map(|k| (2 * k.size, k.multiplicity)).collect();
        let abstract_source = Algebra::multimatrix(&doubled)?;
        let embed = |x: &CMatrix| -> CMatrix {
            let parts = abstract_source.block_components(x);
            let mut out = CMatrix::zeros(2 * g, 2 * g);
            for (r, c) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                let quarter: Vec<CMatrix> = parts
                    .iter()
                    .zip(b.blocks())
                    .map(|(p, blk)| p.view((r * blk.size, c * blk.size), (blk.size, blk.size)).into_owned())
                    .collect();
                let piece = b.element_from_blocks(&quarter).expect("block shapes match");
                out.view_mut((r * g, c * g), (g, g)).copy_from(&piece);
            }
            out
        };
        let source = Representation::from_fn(&abstract_source, 2 * g, embed)?.image_algebra(tol)?;

        // B^a(F¹ ⊕ F²) = (ρ'_1 ⊕ ρ'_2)(B')'
        let (h1, h2) = (e1.h_dim(), e2.h_dim());
        let bprime = e1.rho_prime().algebra().clone();
        let joint = Representation::from_fn(&bprime, h1 + h2, |x| {
            direct_sum(&e1.rho_prime().apply(x), &e2.rho_prime().apply(x))
        })?;
        let target = joint.image_algebra_partial(tol)?.0.commutant(tol)?;

        let (o1, o2) = (w1.xi1(), w2.xi1());
        let images = source.span().map(|a| {
            let q = |r: usize, c: usize| a.view((r * g, c * g), (g, g)).into_owned();
            let mut out = direct_sum(&e1.left_rep().apply(&q(0, 0)), &e2.left_rep().apply(&q(1, 1)));
            out.view_mut((0, h1), (h1, h2)).copy_from(&(o1 * q(0, 1) * o2.adjoint()));
            out.view_mut((h1, 0), (h2, h1)).copy_from(&(o2 * q(1, 0) * o1.adjoint()));
            out
        });
        let cp = CPMap::from_action(&source, &target, images, tol)?;
        Ok(ModulePowers {
            cp,
            first: s1.clone(),
            second: s2.clone(),
            omega1: w1.clone(),
            omega2: w2.clone(),
        })
    }

    /// Matches the GNS space of the block map with `(B ⊕ B) ⊙ F`, where `F`
    /// is the spatial product fiber and `ξ = J_1 ⊕ J_2`.
    pub fn verify(&self, tol: &Tolerance) -> Result<ModulePowersReport> {
        let p = spatial_product(&self.first, &self.omega1, &self.second, &self.omega2, tol)?;
        let f = p.system.generator();
        let hf = f.h_dim();
        let g = self.first.base().rep_dim();
        let xi = direct_sum(&p.first, &p.second);
        let left = |a: &CMatrix| {
            let mut out = CMatrix::zeros(2 * hf, 2 * hf);
            for r in 0..2 {
                for c in 0..2 {
                    let piece = a.view((r * g, c * g), (g, g)).into_owned();
                    out.view_mut((r * hf, c * hf), (hf, hf))
                        .copy_from(&f.left_rep().apply(&piece));
                }
            }
            out
        };
        let comparison = compare_gns_with_model(&self.cp, 2 * hf, &left, &xi, tol)?;
        let c1 = self.first.complement_multiplicity(&self.omega1, tol)?;
        let c2 = self.second.complement_multiplicity(&self.omega2, tol)?;
        let c = p.system.complement_multiplicity(&p.omega, tol)?;
        let additive = c == c1.add(&c2);
        let certified = comparison.certified(tol) && additive;
        Ok(ModulePowersReport {
            comparison,
            spatial_dim: hf,
            complements: (c1, c2, c),
            additive,
            certified,
        })
    }
}
