//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use corrlab_core::correspondence::{gns_reproduction_residual, tensor};
use corrlab_core::cp::depolarizing;
use corrlab_core::module::corner_module;
use corrlab_core::numeric::{
    fro, hstack, identity, matrix_unit, random_matrix, random_unit_vector, random_unitary, rank,
    seeded_rng, vectorize,
};
use corrlab_core::powers::ModulePowers;
use corrlab_core::product_system::scalar_system;
use corrlab_core::{
    flip_check, gns, intertwiner_module, spatial_product, Algebra, CMatrix, CPMap, CentralUnit,
    ConcreteModule, Correspondence, Endomorphism, FiberSystem, MultiplicityMatrix, PowersMap,
    SpatialDatum, Tolerance, Unit, Verdict,
};

type Outcome = Result<String, String>;

fn tol() -> Tolerance {
    Tolerance::default()
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: std::result::Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn random_multimatrix(rng: &mut ChaCha8Rng) -> Algebra {
    let blocks: Vec<(usize, usize)> = (0..rng.random_range(1..=3))
        .map(|_| (rng.random_range(1..=3), rng.random_range(1..=2)))
        .collect();
    Algebra::multimatrix(&blocks).unwrap()
}

fn random_rep_multiplicities(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    loop {
        let m: Vec<usize> = (0..n).map(|_| rng.random_range(0..=2)).collect();
        if m.iter().any(|&x| x > 0) {
            return m;
        }
    }
}

fn totality() -> Outcome {
    let mut rng = seeded_rng(1001);
    let mut worst = 0.0f64;
    for case in 0..100 {
        let b = random_multimatrix(&mut rng);
        let bprime = ok(b.commutant(&tol()), "commutant")?;
        let mults = random_rep_multiplicities(bprime.blocks().len(), &mut rng);
        let rho = ok(bprime.random_representation(&mults, case), "representation")?;
        let e = ok(intertwiner_module(&b, &rho, &tol()), "intertwiners")?;
        ensure!(e.check_totality(&tol()).total, "case {case}: not total");
        // independent: the columns of all basis vectors reach every direction
        ensure!(
            rank(&e.columns(), &tol()) == rho.space_dim(),
            "case {case}: column rank below {}",
            rho.space_dim()
        );
        for x in e.basis() {
            for g in bprime.generators() {
                worst = worst.max(fro(&(rho.apply(&g) * &x - &x * &g)));
            }
        }
    }
    ensure!(worst <= 1e-8, "intertwining residual {worst:.2e}");
    Ok(format!("100 instances, residual {worst:.1e}"))
}

fn round_trips() -> Outcome {
    let mut rng = seeded_rng(2002);
    let mut worst = 0.0f64;
    for case in 0..50 {
        let b = random_multimatrix(&mut rng);
        // a submodule generated by random elements of a full intertwiner module
        let bprime = ok(b.commutant(&tol()), "commutant")?;
        let mults = random_rep_multiplicities(bprime.blocks().len(), &mut rng);
        let ambient = ok(bprime.random_representation(&mults, 900 + case), "representation")?;
        let ambient = ok(intertwiner_module(&b, &ambient, &tol()), "intertwiners")?;
        let gens: Vec<CMatrix> = (0..rng.random_range(1..=2))
            .map(|_| {
                let c = random_matrix(ambient.dim(), 1, &mut rng);
                ambient.span().combine(c.as_slice())
            })
            .collect();
        let e = ok(ConcreteModule::new(&b, ambient.target_dim(), &gens, &tol()), "module")?;
        let ind = ok(e.induced_rep(&tol()), "induced representation")?;
        let back = ok(intertwiner_module(&b, &ind.rho_prime, &tol()), "intertwiners")?;
        let lifted = ok(back.map_left(&ind.coords, &tol()), "lift")?;
        let (same, d) = lifted.span().same_span(e.span(), &tol());
        ensure!(same, "case {case}: module round trip distance {d:.2e}");
        worst = worst.max(d);

        let bprime = ok(b.commutant(&tol()), "commutant")?;
        let mults = random_rep_multiplicities(bprime.blocks().len(), &mut rng);
        let rho = ok(bprime.random_representation(&mults, 500 + case), "representation")?;
        let e = ok(intertwiner_module(&b, &rho, &tol()), "intertwiners")?;
        let ind = ok(e.induced_rep(&tol()), "induced representation")?;
        ensure!(ind.h_dim() == rho.space_dim(), "case {case}: induced space shrank");
        for bp in bprime.basis() {
            let moved = &ind.coords * ind.rho_prime.apply(&bp) * ind.coords.adjoint();
            worst = worst.max(fro(&(moved - rho.apply(&bp))));
        }
    }
    ensure!(worst <= 1e-8, "span distance {worst:.2e}");
    Ok(format!("50 instances each way, distance {worst:.1e}"))
}

fn flip_corpus() -> Vec<(Correspondence, Correspondence, MultiplicityMatrix, MultiplicityMatrix)> {
    let algebras = [
        Algebra::multimatrix(&[(1, 1), (1, 1)]).unwrap(),
        Algebra::multimatrix(&[(1, 1), (2, 1)]).unwrap(),
    ];
    let mut rng = seeded_rng(3003);
    let mut out = Vec::new();
    let mut seed = 0;
    while out.len() < 50 {
        let b = &algebras[out.len() % 2];
        let sizes: Vec<usize> = b.blocks().iter().map(|k| k.size).collect();
        let mut draw = || loop {
            let rows: Vec<Vec<u64>> = (0..2)
                .map(|_| (0..2).map(|_| rng.random_range(0..=2)).collect())
                .collect();
            let nonzero = (0..2).all(|i| rows[i].iter().any(|&c| c > 0))
                && (0..2).all(|j| rows.iter().any(|r| r[j] > 0));
            let h: usize = (0..2)
                .flat_map(|k| (0..2).map(move |l| (k, l)))
                .map(|(k, l)| sizes[k] * rows[k][l] as usize)
                .sum();
            if nonzero && h <= 12 {
                return MultiplicityMatrix::from_rows(rows);
            }
        };
        let (m1, m2) = (draw(), draw());
        seed += 2;
        let e1 = Correspondence::random(b, b, &m1, seed, &tol()).unwrap();
        let e2 = Correspondence::random(b, b, &m2, seed + 1, &tol()).unwrap();
        out.push((e1, e2, m1, m2));
    }
    out
}

fn transpose(m: &[[u64; 2]; 2]) -> [[u64; 2]; 2] {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

fn product(a: &[[u64; 2]; 2], b: &[[u64; 2]; 2]) -> [[u64; 2]; 2] {
    let mut c = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

fn as_array(m: &MultiplicityMatrix) -> [[u64; 2]; 2] {
    [[m.get(0, 0), m.get(0, 1)], [m.get(1, 0), m.get(1, 1)]]
}

fn flip() -> Outcome {
    let mut worst = 0.0f64;
    for (i, (e1, e2, m1, m2)) in flip_corpus().iter().enumerate() {
        ensure!(e1.h_dim() <= 12 && e2.h_dim() <= 12, "pair {i}: fiber too large");
        let r = ok(flip_check(e1, e2, &tol()), "flip")?;
        ensure!(r.iso.certified, "pair {i}: iso residual {:.2e}", r.iso.residual);
        ensure!(r.flip_certified, "pair {i}: flip residual {:.2e}", r.flip_residual);
        ensure!(r.flip_residual <= 1e-8, "pair {i}: flip residual {:.2e}", r.flip_residual);
        let (a, b) = (as_array(m1), as_array(m2));
        let lhs = transpose(&product(&a, &b));
        ensure!(
            lhs == product(&transpose(&b), &transpose(&a)),
            "pair {i}: integer identity"
        );
        ensure!(
            as_array(&r.iso.left_matrix) == lhs && as_array(&r.iso.right_matrix) == lhs,
            "pair {i}: commutant matrices {:?} {:?}, expected {lhs:?}",
            r.iso.left_matrix,
            r.iso.right_matrix
        );
        worst = worst.max(r.iso.residual).max(r.flip_residual);
    }
    Ok(format!("50 pairs, residual {worst:.1e}"))
}

fn double_commutant() -> Outcome {
    let mut worst = 0.0f64;
    for (i, (e1, e2, m1, m2)) in flip_corpus().iter().enumerate() {
        for (e, m) in [(e1, m1), (e2, m2)] {
            let ee = ok(e.commutant(&tol()).and_then(|c| c.commutant(&tol())), "commutant")?;
            let r = ok(ee.iso_check(e, &tol()), "iso")?;
            ensure!(r.certified, "case {i}: residual {:.2e}", r.residual);
            ensure!(
                &ok(ee.multiplicity_matrix(&tol()), "multiplicity")? == m,
                "case {i}: multiplicity changed"
            );
            worst = worst.max(r.residual);
        }
    }
    Ok(format!("100 correspondences, residual {worst:.1e}"))
}

/// Kraus operators supported between one source block and one target block,
/// so that the map stays inside `B`.
fn block_kraus(b: &Algebra, count: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize, CMatrix)> {
    let n = b.rep_dim();
    let offsets: Vec<usize> = b
        .blocks()
        .iter()
        .scan(0, |acc, k| {
            let o = *acc;
            *acc += k.size;
            Some(o)
        })
        .collect();
    (0..count)
        .map(|_| {
            let k = rng.random_range(0..b.blocks().len());
            let l = rng.random_range(0..b.blocks().len());
            let (nk, nl) = (b.blocks()[k].size, b.blocks()[l].size);
            let mut m = CMatrix::zeros(n, n);
            m.view_mut((offsets[l], offsets[k]), (nl, nk))
                .copy_from(&random_matrix(nl, nk, rng));
            (k, l, m)
        })
        .collect()
}

fn gns_criterion() -> Outcome {
    let algebras = [
        Algebra::full(2).unwrap(),
        Algebra::full(3).unwrap(),
        Algebra::multimatrix(&[(1, 1), (2, 1)]).unwrap(),
    ];
    let mut rng = seeded_rng(5005);
    let mut worst = 0.0f64;
    for case in 0..20 {
        let b = &algebras[case % 3];
        let kraus = block_kraus(b, rng.random_range(1..=4), &mut rng);
        let t = ok(
            CPMap::from_kraus(b, b, kraus.iter().map(|(_, _, k)| k.clone()).collect(), &tol()),
            "kraus map",
        )?;
        let g = ok(gns(&t, &tol()), "gns")?;
        let r = gns_reproduction_residual(&g, &t);
        ensure!(r <= 1e-9, "case {case}: reproduction {r:.2e}");
        worst = worst.max(r);
        // Kraus rank of each block-to-block piece
        let blocks = b.blocks().len();
        let mut expected = vec![vec![0u64; blocks]; blocks];
        for (k, row) in expected.iter_mut().enumerate() {
            for (l, entry) in row.iter_mut().enumerate() {
                let vecs: Vec<CMatrix> = kraus
                    .iter()
                    .filter(|(kk, ll, _)| *kk == k && *ll == l)
                    .map(|(_, _, m)| {
                        let v = vectorize(m);
                        CMatrix::from_column_slice(v.len(), 1, v.as_slice())
                    })
                    .collect();
                if !vecs.is_empty() {
                    *entry = rank(&hstack(vecs[0].nrows(), &vecs), &tol()) as u64;
                }
            }
        }
        let found = ok(g.correspondence.multiplicity_matrix(&tol()), "multiplicity")?;
        ensure!(
            found == MultiplicityMatrix::from_rows(expected.clone()),
            "case {case}: GNS multiplicity {found:?}, Kraus rank {expected:?}"
        );
    }
    Ok(format!("20 maps, reproduction {worst:.1e}"))
}

fn hilbert(d: usize) -> ConcreteModule {
    let c = Algebra::scalars();
    let gens: Vec<CMatrix> = (0..d).map(|i| matrix_unit(d, 1, i, 0)).collect();
    ConcreteModule::new(&c, d, &gens, &tol()).unwrap()
}

/// Unital endomorphisms with a unit vector of `E`.
fn endo_corpus() -> Vec<(String, Endomorphism, CMatrix)> {
    let mut out = Vec::new();
    let b = Algebra::multimatrix(&[(1, 1), (2, 1)]).unwrap();
    out.push((
        "identity on C+M2".to_string(),
        Endomorphism::identity(ConcreteModule::identity(&b), &tol()).unwrap(),
        b.unit(),
    ));
    let mut rng = seeded_rng(6006);
    for d in 1..=5 {
        let u = random_unitary(d, &mut rng);
        let e0 = matrix_unit(d, 1, 0, 0);
        out.push((
            format!("Ad(U) on M{d}"),
            Endomorphism::inner(hilbert(d), &u, &tol()).unwrap(),
            e0,
        ));
    }
    let cc = Algebra::multimatrix(&[(1, 1), (1, 1)]).unwrap();
    out.push((
        "block swap".to_string(),
        Endomorphism::block_permutation(ConcreteModule::identity(&cc), &[1, 0], &tol()).unwrap(),
        cc.unit(),
    ));
    out
}

fn endo_construction() -> Outcome {
    let mut worst = 0.0f64;
    for (name, theta, xi) in endo_corpus() {
        let c = ok(theta.construct_via_unit(&xi, &tol()), &name)?;
        let (r1, r2) = corrlab_core::numeric::unitarity_residuals(&c.unitary);
        ensure!(r1 <= 1e-9 && r2 <= 1e-9, "{name}: unitarity {r1:.2e} {r2:.2e}");
        ensure!(
            c.reconstruction_residual <= 1e-9,
            "{name}: reconstruction {:.2e}",
            c.reconstruction_residual
        );
        let square = ok(theta.power(2, &tol()), "square")?;
        let c2 = ok(square.construct_via_unit(&xi, &tol()), "square fiber")?;
        let (tt, _) = ok(tensor(&c.fiber, &c.fiber, &tol()), "tensor")?;
        let iso = ok(c2.fiber.iso_check(&tt, &tol()), "iso")?;
        ensure!(iso.certified, "{name}: square fiber residual {:.2e}", iso.residual);
        worst = worst.max(r1).max(r2).max(c.reconstruction_residual).max(iso.residual);
    }
    Ok(format!("7 endomorphisms, residual {worst:.1e}"))
}

fn duality() -> Outcome {
    let mut corpus = endo_corpus();
    // a proper (non-automorphic) example: Ad(u) on an amplified module over M2
    let m2 = Algebra::full(2).unwrap();
    let e = Correspondence::random(
        &Algebra::scalars(),
        &m2,
        &MultiplicityMatrix::from_rows(vec![vec![2]]),
        3,
        &tol(),
    )
    .unwrap();
    let module = e.module().clone();
    let adj = Endomorphism::adjointables_of(&module, &tol()).unwrap();
    let w = random_unitary(adj.blocks()[0].size, &mut seeded_rng(7));
    let u = adj.element_from_blocks(&[w]).unwrap();
    let xi = module.unit_vector_certificate(&tol()).witness.unwrap();
    corpus.push((
        "inner on amplified M2".into(),
        Endomorphism::inner(module, &u, &tol()).unwrap(),
        xi,
    ));
    let mut checked = 0;
    for (name, theta, xi) in corpus {
        let unital = fro(&(xi.adjoint() * &xi - theta.base().unit())) <= 1e-9;
        if !(unital && theta.module().is_full(&tol())) {
            continue;
        }
        let d = ok(theta.duality_check(&xi, &tol()), &name)?;
        ensure!(
            d.passed,
            "{name}: duality {:.2e}, squares {:.2e} {:.2e}",
            d.duality.residual,
            d.unit_square.residual,
            d.commutant_square.residual
        );
        checked += 1;
    }
    ensure!(checked == 8, "only {checked} of 8 endomorphisms qualified");
    Ok(format!("{checked} endomorphisms"))
}

fn non1ex() -> Outcome {
    let e = ok(corner_module(&tol()), "corner module")?;
    ensure!(e.is_full(&tol()), "module is not full");
    let cert = e.unit_vector_certificate(&tol());
    ensure!(cert.verdict == Verdict::Impossible, "verdict {:?}", cert.verdict);
    let blocked: Vec<_> = cert
        .obstruction
        .iter()
        .filter(|r| r.available_rank < r.size)
        .collect();
    ensure!(
        blocked.len() == 1 && blocked[0].size == 2 && blocked[0].available_rank == 1,
        "obstruction {:?}",
        cert.obstruction
    );
    let theta = ok(Endomorphism::identity(e, &tol()), "identity")?;
    let c = ok(theta.construct_via_commutant(&tol()), "commutant route")?;
    ensure!(
        c.certified,
        "commutant route residuals {:.2e} {:.2e}",
        c.unitary_residual,
        c.reconstruction_residual
    );
    Ok("impossible, rank 1 < 2 on the M2 block; commutant route certified".into())
}

fn dilation() -> Outcome {
    let d = 3;
    let xi = matrix_unit(d, 1, 0, 0);
    let mut rng = seeded_rng(9009);
    let mut cases: Vec<CMatrix> = vec![identity(d)];
    for _ in 0..3 {
        cases.push(random_unitary(d, &mut rng));
        // fixes ξ up to a phase
        let mut u = identity(d);
        u.view_mut((1, 1), (2, 2)).copy_from(&random_unitary(2, &mut rng));
        u[(0, 0)] = corrlab_core::C64::from_polar(1.0, rng.random_range(0.0..6.0));
        cases.push(u);
    }
    let (mut positive, mut negative, mut worst) = (0, 0, 0.0f64);
    for (i, u) in cases.iter().enumerate() {
        let theta = ok(Endomorphism::inner(hilbert(d), u, &tol()), "endomorphism")?;
        let r = ok(theta.dilation_check(&xi, &tol()), "dilation")?;
        // Ad(u)(ξξ*) ≥ ξξ* iff uξ is a multiple of ξ
        let expected = ((xi.adjoint() * u * &xi)[(0, 0)].norm() - 1.0).abs() < 1e-9;
        ensure!(r.order_holds == expected, "case {i}: order {} expected {expected}", r.order_holds);
        if expected {
            positive += 1;
            let s = r.semigroup_residual.unwrap_or(f64::INFINITY);
            ensure!(s <= 1e-8, "case {i}: semigroup residual {s:.2e}");
            worst = worst.max(s);
        } else {
            negative += 1;
        }
    }
    ensure!(positive > 0 && negative > 0, "corpus lacks both cases");

    let t = ok(depolarizing(2, 0.5, &tol()), "depolarizing")?;
    let expected = ok(depolarizing(2, 0.75, &tol()), "depolarizing")?;
    let direct = ok(t.then(&t, &tol()), "compose")?.distance(&expected);
    let g = ok(gns(&t, &tol()), "gns")?;
    let s = ok(FiberSystem::new(g.correspondence.clone(), &tol()), "system")?;
    let unit = ok(Unit::new(&s, g.xi.clone(), &tol()), "unit")?;
    let via_unit = ok(unit.cp(2, &tol()), "unit cp")?.distance(&expected);
    ensure!(direct <= 1e-10 && via_unit <= 1e-10, "depolarizing {direct:.2e} {via_unit:.2e}");
    Ok(format!(
        "{positive} positive, {negative} negative, semigroup {worst:.1e}, depolarizing {via_unit:.1e}"
    ))
}

fn powers() -> Outcome {
    let mut worst_model = 0.0f64;
    let mut count = 0;
    for g in 1..=2 {
        for k1 in 1..=3 {
            for k2 in 1..=3 {
                let p = ok(
                    PowersMap::build(
                        g,
                        SpatialDatum::standard(k1, &tol()).unwrap(),
                        SpatialDatum::standard(k2, &tol()).unwrap(),
                        &tol(),
                    ),
                    "build",
                )?;
                let model = ok(p.predicted_gns(&tol()), "model")?;
                ensure!(model.residual <= 1e-10, "({g},{k1},{k2}): model {:.2e}", model.residual);
                worst_model = worst_model.max(model.residual);
                let (r, _) = ok(p.verify_powers_gns(&tol()), "gns")?;
                ensure!(
                    r.multiplicity as usize == k1 + k2 - 1 && r.certified,
                    "({g},{k1},{k2}): multiplicity {} certified {}",
                    r.multiplicity,
                    r.certified
                );
                let c = ok(p.compare_with_spatial_product(&tol()), "spatial")?;
                ensure!(c.certified, "({g},{k1},{k2}): spatial comparison {c:?}");
                ensure!(
                    c.not_tensor_product == (k1 >= 2 && k2 >= 2),
                    "({g},{k1},{k2}): not-tensor verdict {}",
                    c.not_tensor_product
                );
                count += 1;
            }
        }
    }
    let mut rng = seeded_rng(1010);
    let w1 = random_unit_vector(2, &mut rng);
    let w2 = random_unit_vector(2, &mut rng);
    let p = ok(
        PowersMap::build(
            1,
            SpatialDatum::new(CMatrix::from_column_slice(2, 1, w1.as_slice()), &tol()).unwrap(),
            SpatialDatum::new(CMatrix::from_column_slice(2, 1, w2.as_slice()), &tol()).unwrap(),
            &tol(),
        ),
        "build",
    )?;
    for n in 1..=3 {
        let r = ok(p.n_step(n, &tol()), "n-step")?;
        ensure!(r.certified, "n = {n}: {r:?}");
    }
    Ok(format!("{count} configurations, n-step up to 3, model {worst_model:.1e}"))
}

fn spatial() -> Outcome {
    let mut rng = seeded_rng(1111);
    for k1 in 1..=3 {
        for k2 in 1..=3 {
            let w1 = random_unit_vector(k1, &mut rng);
            let w2 = random_unit_vector(k2, &mut rng);
            let (s1, o1) = ok(
                scalar_system(&CMatrix::from_column_slice(k1, 1, w1.as_slice()), &tol()),
                "system",
            )?;
            let (s2, o2) = ok(
                scalar_system(&CMatrix::from_column_slice(k2, 1, w2.as_slice()), &tol()),
                "system",
            )?;
            let p = ok(spatial_product(&s1, &o1, &s2, &o2, &tol()), "product")?;
            let dim = p.system.generator().h_dim();
            ensure!(dim == k1 + k2 - 1, "({k1},{k2}): fiber dimension {dim}");
            check_product(&p, &s1, &o1, &s2, &o2, &format!("({k1},{k2})"))?;
        }
    }

    let cc = Algebra::multimatrix(&[(1, 1), (1, 1)]).unwrap();
    let id = Correspondence::identity(&cc, &tol()).unwrap();
    let mut parts = Vec::new();
    for (rows, seed) in [(vec![vec![0, 1], vec![1, 0]], 1), (vec![vec![1, 2], vec![0, 1]], 2)] {
        let m = MultiplicityMatrix::from_rows(rows);
        let extra = Correspondence::random(&cc, &cc, &m, seed, &tol()).unwrap();
        let s = FiberSystem::new(id.direct_sum(&extra, &tol()).unwrap(), &tol()).unwrap();
        let mut w = CMatrix::zeros(s.generator().h_dim(), 2);
        w.view_mut((0, 0), (2, 2)).copy_from(&identity(2));
        let w = CentralUnit::new(Unit::new(&s, w, &tol()).unwrap(), &tol()).unwrap();
        parts.push((s, w, m));
    }
    let (s1, o1, m1) = &parts[0];
    let (s2, o2, m2) = &parts[1];
    let p = ok(spatial_product(s1, o1, s2, o2, &tol()), "product")?;
    check_product(&p, s1, o1, s2, o2, "C+C")?;
    let c = ok(p.system.complement_multiplicity(&p.omega, &tol()), "complement")?;
    ensure!(c == m1.add(m2), "complement {c:?} is not {:?} + {:?}", m1, m2);

    let m = ok(ModulePowers::build(s1, o1, s2, o2, &tol()), "block map")?;
    let r = ok(m.verify(&tol()), "block map")?;
    ensure!(r.certified, "block map over C+C not certified");
    Ok("9 scalar products and one over C+C".into())
}

fn check_product(
    p: &corrlab_core::SpatialProduct,
    s1: &FiberSystem,
    o1: &CentralUnit,
    s2: &FiberSystem,
    o2: &CentralUnit,
    label: &str,
) -> Result<(), String> {
    let c1 = ok(s1.complement_multiplicity(o1, &tol()), "complement")?;
    let c2 = ok(s2.complement_multiplicity(o2, &tol()), "complement")?;
    let c = ok(p.system.complement_multiplicity(&p.omega, &tol()), "complement")?;
    ensure!(c == c1.add(&c2), "{label}: complements not additive");
    let r = ok(p.embedding_report(s1, o1, s2, o2, &tol()), "embedding")?;
    ensure!(
        r.isometry_residual <= 1e-9 && r.intertwining_residual <= 1e-9,
        "{label}: embedding residuals {:.2e} {:.2e}",
        r.isometry_residual,
        r.intertwining_residual
    );
    ensure!(
        r.intersection_dim == r.reference_dim && r.reference_residual <= 1e-9,
        "{label}: intersection {} vs reference {}",
        r.intersection_dim,
        r.reference_dim
    );
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 11] = [
        ("totality", totality, Duration::from_secs(10)),
        ("round-trip", round_trips, Duration::from_secs(60)),
        ("flip", flip, Duration::from_secs(30)),
        ("double-commutant", double_commutant, Duration::from_secs(60)),
        ("gns", gns_criterion, Duration::from_secs(60)),
        ("endo-construction", endo_construction, Duration::from_secs(60)),
        ("duality", duality, Duration::from_secs(60)),
        ("non1ex", non1ex, Duration::from_secs(1)),
        ("dilation", dilation, Duration::from_secs(60)),
        ("powers", powers, Duration::from_secs(60)),
        ("spatial-product", spatial, Duration::from_secs(60)),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let elapsed = t.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > *budget => Err(format!("{msg}; over budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name:<18} {:>7.2}s  {msg}", i + 1, elapsed.as_secs_f64()),
            Err(msg) => {
                failures += 1;
                println!("FAIL {:>2} {name:<18} {:>7.2}s  {msg}", i + 1, elapsed.as_secs_f64());
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failures,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
