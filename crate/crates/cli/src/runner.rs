use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use corrlab_core::correspondence::{gns_reproduction_residual, tensor};
use corrlab_core::cp::depolarizing;
use corrlab_core::module::corner_module;
use corrlab_core::numeric::{
    fro, hstack, matrix_unit, random_matrix, random_unit_vector, random_unitary, rank, seeded_rng,
    vectorize,
};
use corrlab_core::product_system::scalar_system;
use corrlab_core::{
    flip_check, gns, intertwiner_module, spatial_product, Algebra, CMatrix, CPMap, ConcreteModule,
    Correspondence, Endomorphism, Error, MultiplicityMatrix, PowersMap, SpatialDatum, Tolerance,
    Verdict as Certificate,
};

use crate::error::CliError;
use crate::report::{FileError, Report, SuiteReport, Verdict};
use crate::scenario::{
    matrix, vector, CommutantInput, CorrespondenceSpec, EndoInput, EndoSpec, GnsInput, Kind,
    LemmaInput, MapSpec, PairInput, PowersInput, ReferenceSpec, Scenario, SpatialInput,
};

/// Command-line settings that take precedence over the scenario file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    /// Replaces the absolute tolerance.
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

enum Failure {
    Cli(CliError),
    Core(Error),
}

impl From<CliError> for Failure {
    fn from(e: CliError) -> Self {
        Failure::Cli(e)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Step = Result<(), Failure>;

struct Ctx {
    tol: Tolerance,
    seed: u64,
}

impl Ctx {
    fn accepts(&self, residual: f64, dim: usize) -> bool {
        self.tol.accepts(residual, (dim.max(1) as f64).sqrt())
    }
}

pub fn run_file(path: &Path, overrides: &Overrides) -> Result<Report, CliError> {
    run_scenario(&Scenario::load(path)?, overrides)
}

pub fn run_scenario(s: &Scenario, overrides: &Overrides) -> Result<Report, CliError> {
    let start = Instant::now();
    let seed = overrides.seed.unwrap_or(s.seed);
    let mut spec = s.tolerance.unwrap_or_default();
    if let Some(t) = overrides.tol {
        spec.abs = t;
    }
    let ctx = Ctx {
        tol: spec.build()?,
        seed,
    };
    let mut r = Report::new(&s.name, s.kind, seed, spec);
    let step = match s.kind {
        Kind::Commutant => commutant(&s.inputs()?, &ctx, &mut r),
        Kind::Lemma => lemma(&s.inputs()?, &ctx, &mut r),
        Kind::Gns => gns_check(&s.inputs()?, &ctx, &mut r),
        Kind::Tensor => tensor_check(&s.inputs()?, &ctx, &mut r),
        Kind::Flip => flip(&s.inputs()?, &ctx, &mut r),
        Kind::EndoUnit => endo_unit(&s.inputs()?, &ctx, &mut r),
        Kind::EndoCommutant => endo_commutant(&s.inputs()?, &ctx, &mut r),
        Kind::Duality => duality(&s.inputs()?, &ctx, &mut r),
        Kind::Dilation => dilation(&s.inputs()?, &ctx, &mut r),
        Kind::SpatialProduct => spatial(&s.inputs()?, &ctx, &mut r),
        Kind::Powers => powers(&s.inputs()?, &ctx, &mut r),
    };
    match step {
        Ok(()) => {}
        Err(Failure::Cli(e)) => return Err(e),
        Err(Failure::Core(Error::Refused(msg))) => {
            r.verdict = Verdict::Refused;
            r.message = Some(msg);
        }
        Err(Failure::Core(e @ (Error::Shape(_) | Error::Invalid(_) | Error::AlgebraMismatch(_)))) => {
            return Err(CliError::Schema(e.to_string()));
        }
        Err(Failure::Core(e)) => {
            r.verdict = Verdict::Fail;
            r.message = Some(e.to_string());
        }
    }
    r.duration = start.elapsed();
    Ok(r)
}

/// Runs every `*.json` file in `dir` on at most `jobs` threads.
pub fn run_suite(dir: &Path, jobs: usize) -> Result<SuiteReport, CliError> {
    let start = Instant::now();
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Io(e.to_string()))?;
    let results: Vec<(PathBuf, Result<Report, CliError>)> = pool.install(|| {
        files
            .par_iter()
            .map(|p| (p.clone(), run_file(p, &Overrides::default())))
            .collect()
    });
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for (path, res) in results {
        match res {
            Ok(r) => reports.push(r),
            Err(e) => errors.push(FileError {
                file: path.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                message: e.to_string(),
            }),
        }
    }
    Ok(SuiteReport::aggregate(reports, errors, start.elapsed()))
}

fn commutant(input: &CommutantInput, ctx: &Ctx, r: &mut Report) -> Step {
    let a = input.algebra.build()?;
    let ap = a.commutant(&ctx.tol)?;
    let app = ap.commutant(&ctx.tol)?;
    r.dim("space", a.rep_dim());
    r.dim("algebra", a.dim());
    r.dim("commutant", ap.dim());
    let mut worst = 0.0f64;
    for x in a.basis() {
        for y in ap.basis() {
            worst = worst.max(fro(&(&x * &y - &y * &x)));
        }
    }
    let (same, distance) = app.span().same_span(a.span(), &ctx.tol);
    r.residual("commutation", worst);
    r.residual("double_commutant", distance);
    let blocks: Vec<(usize, usize)> = ap.blocks().iter().map(|k| (k.size, k.multiplicity)).collect();
    r.detail("commutant_blocks", json!(blocks));
    let mut swapped: Vec<(usize, usize)> = a.blocks().iter().map(|k| (k.multiplicity, k.size)).collect();
    let mut found = blocks.clone();
    swapped.sort();
    found.sort();
    r.require(ctx.accepts(worst, a.rep_dim()), "commutant does not commute");
    r.require(same, "double commutant differs from the algebra");
    r.require(swapped == found, "block sizes and multiplicities are not exchanged");
    Ok(())
}

fn lemma(input: &LemmaInput, ctx: &Ctx, r: &mut Report) -> Step {
    let b = input.algebra.build()?;
    let bp = b.commutant(&ctx.tol)?;
    if input.multiplicities.len() != bp.blocks().len() {
        return Err(CliError::Schema(format!(
            "{} multiplicities for a commutant with {} blocks",
            input.multiplicities.len(),
            bp.blocks().len()
        ))
        .into());
    }
    let rho = bp.random_representation(&input.multiplicities, ctx.seed)?;
    let e = intertwiner_module(&b, &rho, &ctx.tol)?;
    let t = e.check_totality(&ctx.tol);
    r.dim("space", t.target_dim);
    r.dim("reachable", t.reachable_dim);
    r.dim("module", e.dim());
    let mut intertwining = 0.0f64;
    for x in e.basis() {
        for g in bp.generators() {
            intertwining = intertwining.max(fro(&(rho.apply(&g) * &x - &x * &g)));
        }
    }
    r.residual("intertwining", intertwining);
    r.detail("total", t.total);
    r.require(t.total, "intertwiners do not span the space");
    if t.total {
        let ind = e.induced_rep(&ctx.tol)?;
        let mut rep_distance = 0.0f64;
        for x in bp.basis() {
            let moved = &ind.coords * ind.rho_prime.apply(&x) * ind.coords.adjoint();
            rep_distance = rep_distance.max(fro(&(moved - rho.apply(&x))));
        }
        let back = intertwiner_module(&b, &ind.rho_prime, &ctx.tol)?;
        let lifted = back.map_left(&ind.coords, &ctx.tol)?;
        let (same, distance) = lifted.span().same_span(e.span(), &ctx.tol);
        r.residual("representation_round_trip", rep_distance);
        r.residual("module_round_trip", distance);
        r.require(ctx.accepts(rep_distance, t.target_dim), "representation round trip failed");
        r.require(same, "module round trip failed");
    }
    r.require(ctx.accepts(intertwining, t.target_dim), "intertwining residual too large");
    Ok(())
}

fn block_offsets(b: &Algebra) -> Vec<usize> {
    b.blocks()
        .iter()
        .scan(0, |acc, k| {
            let o = *acc;
            *acc += k.size * k.multiplicity;
            Some(o)
        })
        .collect()
}

/// Kraus rank of each block-to-block piece; only meaningful when every
/// block has multiplicity one.
fn kraus_ranks(b: &Algebra, ops: &[CMatrix], tol: &Tolerance) -> MultiplicityMatrix {
    let offsets = block_offsets(b);
    let n = b.blocks().len();
    let mut rows = vec![vec![0u64; n]; n];
    for (k, row) in rows.iter_mut().enumerate() {
        for (l, entry) in row.iter_mut().enumerate() {
            let (nk, nl) = (b.blocks()[k].size, b.blocks()[l].size);
            let pieces: Vec<CMatrix> = ops
                .iter()
                .map(|m| {
                    let v = vectorize(&m.view((offsets[l], offsets[k]), (nl, nk)).into_owned());
                    CMatrix::from_column_slice(v.len(), 1, v.as_slice())
                })
                .collect();
            *entry = rank(&hstack(nk * nl, &pieces), tol) as u64;
        }
    }
    MultiplicityMatrix::from_rows(rows)
}

fn gns_check(input: &GnsInput, ctx: &Ctx, r: &mut Report) -> Step {
    let b = input.algebra.build()?;
    let n = b.rep_dim();
    let (t, ops) = match &input.map {
        MapSpec::Kraus(ms) => {
            let ops: Vec<CMatrix> = ms
                .iter()
                .map(|m| matrix(m, "Kraus operator"))
                .collect::<Result<_, _>>()?;
            (CPMap::from_kraus(&b, &b, ops.clone(), &ctx.tol)?, Some(ops))
        }
        MapSpec::RandomKraus(count) => {
            let mut rng = seeded_rng(ctx.seed);
            let offsets = block_offsets(&b);
            let blocks = b.blocks();
            let ops: Vec<CMatrix> = (0..*count)
                .map(|i| {
                    // cycle through block pairs so every seed is reproducible
                    let k = i % blocks.len();
                    let l = (i / blocks.len()) % blocks.len();
                    let mut m = CMatrix::zeros(n, n);
                    m.view_mut((offsets[l], offsets[k]), (blocks[l].size, blocks[k].size))
                        .copy_from(&random_matrix(blocks[l].size, blocks[k].size, &mut rng));
                    m
                })
                .collect();
            (CPMap::from_kraus(&b, &b, ops.clone(), &ctx.tol)?, Some(ops))
        }
        MapSpec::Depolarizing(p) => {
            if b.blocks().len() != 1 || b.blocks()[0].multiplicity != 1 {
                return Err(CliError::Schema("depolarizing maps need a single full block".into()).into());
            }
            (depolarizing(n, *p, &ctx.tol)?, None)
        }
    };
    let g = gns(&t, &ctx.tol)?;
    let reproduction = gns_reproduction_residual(&g, &t);
    let found = g.correspondence.multiplicity_matrix(&ctx.tol)?;
    r.dim("space", g.correspondence.h_dim());
    r.dim("module", g.correspondence.dim());
    r.residual("reproduction", reproduction);
    r.matrix("multiplicity", &found);
    r.require(ctx.accepts(reproduction, n), "cyclic vector does not reproduce the map");
    if let Some(ops) = ops {
        if b.blocks().iter().all(|k| k.multiplicity == 1) {
            let expected = kraus_ranks(&b, &ops, &ctx.tol);
            r.matrix("kraus_rank", &expected);
            r.require(found == expected, "GNS multiplicity differs from the Kraus rank");
        }
    }
    Ok(())
}

fn pair(input: &PairInput, ctx: &Ctx) -> Result<(Algebra, [(Correspondence, MultiplicityMatrix); 2]), Failure> {
    let b = input.algebra.build()?;
    let make = |spec: &CorrespondenceSpec, offset: u64| -> Result<_, Failure> {
        let m = MultiplicityMatrix::from_rows(spec.multiplicity.clone());
        let seed = spec.seed.unwrap_or(ctx.seed.wrapping_add(offset));
        Ok((Correspondence::random(&b, &b, &m, seed, &ctx.tol)?, m))
    };
    let first = make(&input.first, 0)?;
    let second = make(&input.second, 1)?;
    Ok((b, [first, second]))
}

fn tensor_check(input: &PairInput, ctx: &Ctx, r: &mut Report) -> Step {
    let (b, [(e1, m1), (e2, m2)]) = pair(input, ctx)?;
    let (t, map) = tensor(&e1, &e2, &ctx.tol)?;
    let found = t.multiplicity_matrix(&ctx.tol)?;
    let expected = m1.mul(&m2);
    // x b ⊙ y = x ⊙ b y
    let mut balance = 0.0f64;
    for x in e1.module().basis() {
        for g in b.generators() {
            for y in e2.module().basis() {
                let lhs = map.elem(&(&x * &g), &y);
                let rhs = map.elem(&x, &e2.act_left(&g, &y));
                balance = balance.max(fro(&(lhs - rhs)));
            }
        }
    }
    r.dim("first", e1.h_dim());
    r.dim("second", e2.h_dim());
    r.dim("product", t.h_dim());
    r.residual("balance", balance);
    r.matrix("first", &m1);
    r.matrix("second", &m2);
    r.matrix("product", &found);
    r.matrix("expected", &expected);
    r.require(found == expected, "multiplicity matrix is not the product");
    r.require(ctx.accepts(balance, t.h_dim()), "tensor product is not balanced");
    Ok(())
}

fn flip(input: &PairInput, ctx: &Ctx, r: &mut Report) -> Step {
    let (_, [(e1, m1), (e2, m2)]) = pair(input, ctx)?;
    let f = flip_check(&e1, &e2, &ctx.tol)?;
    r.dim("first", e1.h_dim());
    r.dim("second", e2.h_dim());
    r.residual("isomorphism", f.iso.residual);
    r.residual("flip", f.flip_residual);
    r.matrix("first", &m1);
    r.matrix("second", &m2);
    r.matrix("commutant_of_product", &f.iso.left_matrix);
    r.matrix("product_of_commutants", &f.iso.right_matrix);
    r.matrix("expected", &m1.mul(&m2).transpose());
    r.detail("matrix_identity", f.matrix_identity);
    r.require(f.matrix_identity, "(C1 C2)^T identity failed");
    r.require(f.iso.certified, "commutant of the product is not isomorphic");
    r.require(f.flip_certified, "flip unitary not certified");
    Ok(())
}

fn hilbert(d: usize, tol: &Tolerance) -> Result<ConcreteModule, Error> {
    let c = Algebra::scalars();
    let gens: Vec<CMatrix> = (0..d).map(|i| matrix_unit(d, 1, i, 0)).collect();
    ConcreteModule::new(&c, d, &gens, tol)
}

fn endomorphism(spec: &EndoSpec, ctx: &Ctx) -> Result<Endomorphism, Failure> {
    let tol = &ctx.tol;
    Ok(match spec {
        EndoSpec::Identity { algebra } => {
            Endomorphism::identity(ConcreteModule::identity(&algebra.build()?), tol)?
        }
        EndoSpec::Module {
            algebra,
            target_dim,
            generators,
        } => {
            let gens: Vec<CMatrix> = generators
                .iter()
                .map(|m| matrix(m, "generator"))
                .collect::<Result<_, _>>()?;
            Endomorphism::identity(ConcreteModule::new(&algebra.build()?, *target_dim, &gens, tol)?, tol)?
        }
        EndoSpec::Inner { dimension, unitary } => {
            if *dimension == 0 {
                return Err(CliError::Schema("dimension must be positive".into()).into());
            }
            let u = match unitary {
                Some(m) => matrix(m, "unitary")?,
                None => random_unitary(*dimension, &mut seeded_rng(ctx.seed)),
            };
            Endomorphism::inner(hilbert(*dimension, tol)?, &u, tol)?
        }
        EndoSpec::BlockPermutation {
            algebra,
            permutation,
        } => Endomorphism::block_permutation(ConcreteModule::identity(&algebra.build()?), permutation, tol)?,
        EndoSpec::Corner => Endomorphism::identity(corner_module(tol)?, tol)?,
    })
}

/// The unit vector to use, recording the certificate when none was given.
fn unit_vector(theta: &Endomorphism, input: &EndoInput, ctx: &Ctx, r: &mut Report) -> Result<Option<CMatrix>, Failure> {
    r.detail("full", theta.module().is_full(&ctx.tol));
    if let Some(m) = &input.xi {
        return Ok(Some(matrix(m, "xi")?));
    }
    let cert = theta.module().unit_vector_certificate(&ctx.tol);
    r.detail("certificate", serde_json::to_value(cert.verdict).expect("verdicts serialize"));
    r.detail("obstruction", serde_json::to_value(&cert.obstruction).expect("ranks serialize"));
    Ok(cert.witness)
}

fn endo_unit(input: &EndoInput, ctx: &Ctx, r: &mut Report) -> Step {
    let theta = endomorphism(&input.endomorphism, ctx)?;
    r.dim("space", theta.h_dim());
    let Some(xi) = unit_vector(&theta, input, ctx, r)? else {
        // an impossibility certificate is itself the result
        let cert = theta.module().unit_vector_certificate(&ctx.tol);
        r.require(cert.verdict == Certificate::Impossible, "unit vector search was inconclusive");
        return Ok(());
    };
    let c = theta.construct_via_unit(&xi, &ctx.tol)?;
    r.dim("fiber", c.fiber.h_dim());
    r.residual("unitary", c.unitary_residual);
    r.residual("reconstruction", c.reconstruction_residual);
    r.matrix("fiber", &c.fiber.multiplicity_matrix(&ctx.tol)?);
    r.require(c.certified, "unit construction not certified");
    Ok(())
}

fn endo_commutant(input: &EndoInput, ctx: &Ctx, r: &mut Report) -> Step {
    let theta = endomorphism(&input.endomorphism, ctx)?;
    r.dim("space", theta.h_dim());
    r.detail("full", theta.module().is_full(&ctx.tol));
    let c = theta.construct_via_commutant(&ctx.tol)?;
    r.dim("fiber", c.fiber.h_dim());
    r.detail("total", c.total);
    r.residual("unitary", c.unitary_residual);
    r.residual("reconstruction", c.reconstruction_residual);
    r.matrix("fiber", &c.fiber.multiplicity_matrix(&ctx.tol)?);
    r.matrix("fiber_commutant", &c.fiber_prime.multiplicity_matrix(&ctx.tol)?);
    r.require(c.certified, "commutant construction not certified");
    Ok(())
}

fn duality(input: &EndoInput, ctx: &Ctx, r: &mut Report) -> Step {
    let theta = endomorphism(&input.endomorphism, ctx)?;
    r.dim("space", theta.h_dim());
    let Some(xi) = unit_vector(&theta, input, ctx, r)? else {
        return Err(Error::Refused("duality needs a unit vector of the module".into()).into());
    };
    let d = theta.duality_check(&xi, &ctx.tol)?;
    r.residual("duality", d.duality.residual);
    r.residual("unit_square", d.unit_square.residual);
    r.residual("commutant_square", d.commutant_square.residual);
    r.matrix("fiber_commutant", &d.duality.left_matrix);
    r.require(d.passed, "the two constructions do not match");
    Ok(())
}

fn dilation(input: &EndoInput, ctx: &Ctx, r: &mut Report) -> Step {
    let theta = endomorphism(&input.endomorphism, ctx)?;
    r.dim("space", theta.h_dim());
    let Some(xi) = unit_vector(&theta, input, ctx, r)? else {
        return Err(Error::Refused("dilation needs a unit vector of the module".into()).into());
    };
    let d = theta.dilation_check(&xi, &ctx.tol)?;
    r.detail("order_holds", d.order_holds);
    r.residual("order", d.order_residual);
    if let Some(s) = d.semigroup_residual {
        r.residual("semigroup", s);
        r.require(ctx.accepts(s, theta.h_dim()), "compressed semigroup does not match the unit");
    }
    Ok(())
}

fn reference(spec: &ReferenceSpec, rng: &mut rand_chacha::ChaCha8Rng, tol: &Tolerance) -> Result<SpatialDatum, Failure> {
    Ok(match spec {
        ReferenceSpec::Standard(k) => SpatialDatum::standard(*k, tol)?,
        ReferenceSpec::Random(k) => {
            if *k == 0 {
                return Err(CliError::Schema("multiplicity space must be nonzero".into()).into());
            }
            let v = random_unit_vector(*k, rng);
            SpatialDatum::new(CMatrix::from_column_slice(*k, 1, v.as_slice()), tol)?
        }
        ReferenceSpec::Vector(v) => SpatialDatum::new(vector(v, "reference vector")?, tol)?,
    })
}

fn spatial(input: &SpatialInput, ctx: &Ctx, r: &mut Report) -> Step {
    let mut rng = seeded_rng(ctx.seed);
    let d1 = reference(&input.first, &mut rng, &ctx.tol)?;
    let d2 = reference(&input.second, &mut rng, &ctx.tol)?;
    let (k1, k2) = (d1.k(), d2.k());
    let (s1, w1) = scalar_system(d1.omega(), &ctx.tol)?;
    let (s2, w2) = scalar_system(d2.omega(), &ctx.tol)?;
    let p = spatial_product(&s1, &w1, &s2, &w2, &ctx.tol)?;
    let fiber = p.system.generator().h_dim();
    let e = p.embedding_report(&s1, &w1, &s2, &w2, &ctx.tol)?;
    let c1 = s1.complement_multiplicity(&w1, &ctx.tol)?;
    let c2 = s2.complement_multiplicity(&w2, &ctx.tol)?;
    let c = p.system.complement_multiplicity(&p.omega, &ctx.tol)?;
    r.dim("first", k1);
    r.dim("second", k2);
    r.dim("fiber", fiber);
    r.dim("tensor", k1 * k2);
    r.dim("intersection", e.intersection_dim);
    r.residual("isometry", e.isometry_residual);
    r.residual("intertwining", e.intertwining_residual);
    r.residual("reference", e.reference_residual);
    r.residual("cross_complement", e.cross_complement_residual);
    r.matrix("first_complement", &c1);
    r.matrix("second_complement", &c2);
    r.matrix("complement", &c);
    r.detail("not_tensor_product", fiber < k1 * k2);
    r.require(fiber == k1 + k2 - 1, "fiber dimension is not k1 + k2 - 1");
    r.require(c == c1.add(&c2), "complement multiplicities are not additive");
    r.require(e.intersection_dim == e.reference_dim, "factors meet outside the reference");
    for (name, v) in [
        ("embeddings are not isometric", e.isometry_residual),
        ("embeddings are not bimodule maps", e.intertwining_residual),
        ("reference is not in both factors", e.reference_residual),
        ("complements are not orthogonal", e.cross_complement_residual),
    ] {
        r.require(ctx.accepts(v, fiber), name);
    }
    Ok(())
}

fn powers(input: &PowersInput, ctx: &Ctx, r: &mut Report) -> Step {
    let mut rng = seeded_rng(ctx.seed);
    let d1 = reference(&input.first, &mut rng, &ctx.tol)?;
    let d2 = reference(&input.second, &mut rng, &ctx.tol)?;
    let (k1, k2) = (d1.k(), d2.k());
    let p = PowersMap::build(input.g_dim, d1, d2, &ctx.tol)?;
    let model = p.predicted_gns(&ctx.tol)?;
    let (g, _) = p.verify_powers_gns(&ctx.tol)?;
    let c = p.compare_with_spatial_product(&ctx.tol)?;
    r.dim("g", input.g_dim);
    r.dim("first", k1);
    r.dim("second", k2);
    r.dim("multiplicity", g.multiplicity as usize);
    r.dim("fiber", c.spatial_dim);
    r.dim("tensor", c.tensor_dim);
    r.dim("gns_module", g.gns_module_dim);
    r.residual("model", model.residual);
    r.residual("gns_isomorphism", g.iso_residual);
    r.residual("gns_cyclic_vector", g.xi_residual);
    r.residual("reproduction", g.reproduction_residual);
    r.residual("same_factor", c.first_residual.max(c.second_residual));
    r.residual("mixed", c.mixed_residual);
    r.residual("spatial_map", c.map_residual.max(c.isometry_residual));
    r.detail("not_tensor_product", c.not_tensor_product);
    r.require(g.multiplicity as usize == k1 + k2 - 1, "multiplicity is not k1 + k2 - 1");
    r.require(g.certified, "GNS space does not match the model");
    r.require(c.certified, "inner products do not match the spatial product");
    for n in 1..=input.n_steps {
        let s = p.n_step(n, &ctx.tol)?;
        r.dim(&format!("step{n}_multiplicity"), s.gns_multiplicity as usize);
        r.dim(&format!("step{n}_fiber"), s.fiber_dim);
        r.residual(&format!("step{n}_map"), s.map_residual.max(s.isometry_residual));
        r.require(s.certified, &format!("{n}-step embedding failed"));
    }
    Ok(())
}
