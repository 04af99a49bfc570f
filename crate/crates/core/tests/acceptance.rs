//! Acceptance run: prints one PASS/FAIL line per criterion and a summary.
//! With `AUXETICA_ACCEPTANCE_STRICT=1` any failing criterion makes the run
//! exit non-zero; otherwise the run only reports, so that a known failure
//! does not stop the remaining test binaries of a workspace run.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};
use std::time::{Duration, Instant};

use auxetica::deformation::{
    auxetic_cone, check_expansive, check_path_contraction, check_path_psd, check_volume, integrate_trajectory,
    ConeVerdict, DeformationPath, PsdVerdict, Selector, VolumeVerdict, DEFAULT_CONE_BUDGET, DEFAULT_DENSITY,
};
use auxetica::framework::{catalog, honeycomb_equal_edge, silica_gram_derivative, CatalogId, CatalogKind};
use auxetica::planar::{
    enumerate_refinements, honeycomb_auxetic_test, is_ppt, period_triangle_class, random_ppt, HoneycombPoint,
    HoneycombVerdict, TriangleClass,
};
use auxetica::study3d::{
    cayley_nodes, cone_inclusion_check, expansive_rays, quartic_f, quartic_gradient, ProjectivePoint5, StudyPoint,
    DEFAULT_R2,
};
use auxetica::symcone::{eig_sym, LinearMap};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (u32, fn() -> Check, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn proj(v: [f64; 5]) -> ProjectivePoint5 {
    ProjectivePoint5::new(v).unwrap().canonical()
}

fn random_lattice(rng: &mut ChaCha8Rng) -> LinearMap {
    loop {
        let cols = vec![
            vec![1.0 + rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)],
            vec![rng.gen_range(-0.5..0.5), 1.0 + rng.gen_range(-0.3..0.3)],
        ];
        let l = LinearMap::from_columns(&cols).unwrap();
        if l.determinant().abs() > 0.5 {
            return l;
        }
    }
}

fn criterion_1() -> Check {
    let p = StudyPoint::new([1.6, 1.6, 1.6, 0.8, 0.8], DEFAULT_R2);
    let f = quartic_f(&p);
    ensure(f.abs() < 1e-12, || format!("f(a0) = {f:e}"))?;
    let g = proj(quartic_gradient(&p));
    ensure(g.approx_eq(&proj([1.0, 1.0, -4.0, 4.0, 4.0]), 1e-10), || format!("gradient {:?}", g.v))?;
    let r2 = 2f64.sqrt();
    let nodes = [
        [0.0, 2.0 * (r2 - 1.0), (r2 + 1.0) / 2.0, 0.0, 1.0],
        [0.0, 2.0 * (r2 + 1.0), (r2 - 1.0) / 2.0, 0.0, -1.0],
        [2.0 * (r2 - 1.0), 0.0, (r2 + 1.0) / 2.0, 1.0, 0.0],
        [2.0 * (r2 + 1.0), 0.0, (r2 - 1.0) / 2.0, -1.0, 0.0],
    ];
    let computed = cayley_nodes(&p).map_err(err)?;
    for n in nodes {
        let want = proj(n);
        ensure(computed.iter().any(|c| c.canonical().approx_eq(&want, 1e-10)), || format!("node {n:?} missing"))?;
    }
    let rays = [[4.0, 0.0, 1.0, 0.0, 0.0], [4.0, 0.0, 5.0, 4.0, 0.0], [0.0, 4.0, 1.0, 0.0, 0.0], [0.0, 4.0, 5.0, 0.0, 4.0]];
    let computed = expansive_rays(&p).map_err(err)?;
    for r in rays {
        let want = proj(r);
        ensure(computed.iter().any(|c| c.canonical().approx_eq(&want, 1e-10)), || format!("ray {r:?} missing"))?;
    }
    Ok("quartic, gradient, 4 nodes and 4 rays reproduced".into())
}

fn criterion_2() -> Check {
    let p = StudyPoint::initial();
    let rep = cone_inclusion_check(&p, 10).map_err(err)?;
    ensure(rep.min_grid_eigenvalue >= -1e-9, || format!("grid min eigenvalue {:e}", rep.min_grid_eigenvalue))?;
    ensure(rep.node_min_eigenvalues.iter().all(|e| e.abs() < 1e-9), || format!("nodes {:?}", rep.node_min_eigenvalues))?;
    ensure(rep.outside_spectrahedron >= 1000, || {
        format!("only {} non-PSD random directions sampled", rep.outside_spectrahedron)
    })?;
    Ok(format!(
        "{} grid points PSD, nodes on boundary, {} non-PSD directions all outside the tetrahedron",
        rep.grid_points, rep.outside_spectrahedron
    ))
}

fn criterion_3() -> Check {
    for (kind, folds) in [(CatalogKind::QuartzBeta, 3), (CatalogKind::CristobaliteBeta, 4)] {
        let p = DeformationPath::silica_tilt(kind, FRAC_PI_3, 0.05, 200).map_err(err)?;
        let psd = check_path_psd(&p, 1e-9).map_err(err)?;
        let con = check_path_contraction(&p, 1e-9).map_err(err)?;
        ensure(psd == PsdVerdict::Auxetic && con.is_auxetic(), || format!("{kind}: {psd:?} / {con:?}"))?;
        let r = p.reversed();
        let psd = check_path_psd(&r, 1e-9).map_err(err)?;
        let con = check_path_contraction(&r, 1e-9).map_err(err)?;
        ensure(!psd.is_auxetic() && !con.is_auxetic(), || format!("{kind} reversed: {psd:?} / {con:?}"))?;
        for k in 0..100 {
            let theta = 0.05 + (FRAC_PI_2 - 0.1) * (k as f64 + 0.5) / 100.0;
            let top = eig_sym(&silica_gram_derivative(folds, theta)).map_err(err)?.into_iter().fold(f64::MIN, f64::max);
            ensure(top < -1e-9, || format!("{kind}: dω/dθ not negative definite at θ = {theta}"))?;
        }
    }
    Ok("quartz and cristobalite auxetic forward, not reversed; dω/dθ negative definite".into())
}

fn random_lattice_path(rng: &mut ChaCha8Rng, d: usize, auxetic: bool) -> DeformationPath {
    let l0: Vec<Vec<f64>> =
        (0..d).map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 } + rng.gen_range(-0.2..0.2)).collect()).collect();
    let l0 = LinearMap::from_rows(&l0).unwrap();
    let a: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut p = LinearMap::from_rows(&a).unwrap();
    if auxetic {
        // Symmetric positive semidefinite generator: AᵀA.
        p = p.transpose().mul(&p).scale(0.5);
    }
    let b: Vec<Vec<f64>> = (0..d).map(|_| (0..d).map(|_| rng.gen_range(-0.3..0.3)).collect()).collect();
    let b = LinearMap::from_rows(&b).unwrap();
    DeformationPath::lattice_fn((0.0, 0.5), DEFAULT_DENSITY, move |t| {
        if auxetic {
            // (I + tP)Λ₀ with P ⪰ 0 has a positive semidefinite Gram velocity.
            LinearMap::identity(d).add(&p.scale(t)).mul(&l0)
        } else {
            l0.add(&p.scale(t)).add(&b.scale(t * t))
        }
    })
    .unwrap()
}

fn criterion_4() -> Check {
    let mut paths = Vec::new();
    for kind in [CatalogKind::QuartzBeta, CatalogKind::CristobaliteBeta] {
        let p = DeformationPath::silica_tilt(kind, FRAC_PI_3, 0.05, 200).map_err(err)?;
        paths.push(p.reversed());
        paths.push(p);
    }
    let f = catalog(&CatalogId::new(CatalogKind::ReentrantHoneycomb)).map_err(err)?;
    paths.push(integrate_trajectory(&f, &Selector::AuxeticWitness, 10, 0.01).map_err(err)?);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for k in 0..50 {
        paths.push(random_lattice_path(&mut rng, 2 + k % 2, k % 3 == 0));
    }
    let mut auxetic = 0;
    for (i, p) in paths.iter().enumerate() {
        let a = check_path_psd(p, 1e-9).map_err(err)?.is_auxetic();
        let b = check_path_contraction(p, 1e-9).map_err(err)?.is_auxetic();
        ensure(a == b, || format!("path {i}: PSD says {a}, contraction says {b}"))?;
        auxetic += a as usize;
    }
    Ok(format!("{} paths agree ({auxetic} auxetic)", paths.len()))
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut compared, mut obtuse) = (0, 0);
    for _ in 0..200 {
        let a11: f64 = rng.gen_range(0.5..2.0);
        let a22 = rng.gen_range(0.5..2.0);
        let phi = rng.gen_range(0.15..std::f64::consts::PI - 0.15);
        let a12 = (a11 * a22).sqrt() * phi.cos();
        let pt = HoneycombPoint::from_gram(a11, a12, a22).map_err(err)?;
        let verdict = honeycomb_auxetic_test(&pt).map_err(err)?;
        if verdict == HoneycombVerdict::Boundary {
            continue;
        }
        let class = period_triangle_class(a11, a12, a22, 1e-9).map_err(err)?;
        let expected = match class {
            TriangleClass::Obtuse => HoneycombVerdict::Nontrivial,
            TriangleClass::Acute => HoneycombVerdict::TrivialOnly,
            TriangleClass::Right => continue,
        };
        ensure(verdict == expected, || format!("({a11}, {a12}, {a22}): {verdict:?} vs {class:?}"))?;
        let f = honeycomb_equal_edge(a11, a12, a22).map_err(err)?;
        let cone = auxetic_cone(&f, 1e-9, DEFAULT_CONE_BUDGET).map_err(err)?;
        let nontrivial = cone.verdict != ConeVerdict::TrivialOnly;
        ensure(nontrivial == (verdict == HoneycombVerdict::Nontrivial), || {
            format!("({a11}, {a12}, {a22}): surface test {verdict:?}, cone {:?}", cone.verdict)
        })?;
        compared += 1;
        obtuse += (class == TriangleClass::Obtuse) as usize;
    }
    Ok(format!("{compared} triangles agree ({obtuse} obtuse)"))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut failures = Vec::new();
    for run in 0..100u64 {
        let n = 1 + (run % 4) as usize;
        let l = random_lattice(&mut rng);
        match random_ppt(&l, n, run) {
            Ok(f) => {
                let dof = f.dof().map_err(err)?;
                if f.m() != 2 * n || !is_ppt(&f) || dof != 1 {
                    failures.push(format!("run {run} (n = {n}): m = {}, dof = {dof}", f.m()));
                }
            }
            Err(e) => failures.push(format!("run {run} (n = {n}): {e}")),
        }
    }
    ensure(failures.is_empty(), || {
        let per_n: Vec<String> = (1..=4)
            .map(|n| format!("n = {n}: {}", failures.iter().filter(|f| f.contains(&format!("(n = {n})"))).count()))
            .collect();
        format!("{} of 100 runs failed [{}], first: {}", failures.len(), per_n.join(", "), failures[0])
    })?;
    Ok("100 runs reach m = 2n with one degree of freedom".into())
}

fn criterion_7() -> Check {
    for (kind, want) in [(CatalogKind::ReentrantHoneycomb, 2), (CatalogKind::ReentrantHoneycombRelaxed, 4)] {
        let f = catalog(&CatalogId::new(kind)).map_err(err)?;
        let got = enumerate_refinements(&f, 2).map_err(err)?.len();
        ensure(got == want, || format!("{kind}: {got} refinements, expected {want}"))?;
    }
    Ok("2 and 4 refinements".into())
}

/// Prefix of a one-dof trajectory along which the framework stays a
/// pseudo-triangulation.
fn ppt_trajectory(seed: u64, rng: &mut ChaCha8Rng) -> Result<DeformationPath, String> {
    let l = random_lattice(rng);
    let n = 2 + (seed % 3) as usize;
    let f = random_ppt(&l, n, seed).map_err(err)?;
    let p = integrate_trajectory(&f, &Selector::KernelOneDof { orient: None }, 30, 0.005).map_err(err)?;
    let keep = (0..p.len()).take_while(|&i| is_ppt(&p.framework_at(i))).count();
    ensure(keep >= 2, || format!("seed {seed}: pseudo-triangulation lost immediately"))?;
    DeformationPath::new(p.framework0.clone(), p.samples[..keep].to_vec()).map_err(err)
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut paths = Vec::new();
    for seed in 0..10 {
        let p = ppt_trajectory(seed, &mut rng)?;
        let v = check_expansive(&p, 2, 1e-9).map_err(err)?;
        ensure(v.is_expansive(), || format!("seed {seed}: {v:?}"))?;
        paths.push(p);
    }
    for (i, p) in paths.iter().enumerate() {
        let psd = check_path_psd(p, 1e-9).map_err(err)?;
        ensure(psd.is_auxetic(), || format!("expansive path {i} is {psd:?}"))?;
        if psd == PsdVerdict::Auxetic {
            let vol = check_volume(p).map_err(err)?;
            ensure(vol == VolumeVerdict::NonDecreasing, || format!("auxetic path {i}: {vol:?}"))?;
        }
    }
    let shear = DeformationPath::lattice_fn((0.0, 1.0), 50, |t| LinearMap::from_rows(&[vec![1.0, t], vec![0.0, 1.0]]).unwrap())
        .map_err(err)?;
    let vol = check_volume(&shear).map_err(err)?;
    let psd = check_path_psd(&shear, 1e-9).map_err(err)?;
    ensure(vol == VolumeVerdict::NonDecreasing && !psd.is_auxetic(), || format!("shear: {vol:?}, {psd:?}"))?;
    Ok("10 PPT trajectories expansive and auxetic; shear keeps volume but is not auxetic".into())
}

fn criterion_9() -> Check {
    let table = [
        (CatalogKind::ReentrantHoneycomb, 2),
        (CatalogKind::ReentrantHoneycombRelaxed, 3),
        (CatalogKind::MissingRibEquivalent, 2),
        (CatalogKind::Pyramid3D, 4),
    ];
    for (kind, want) in table {
        let got = catalog(&CatalogId::new(kind)).map_err(err)?.dof().map_err(err)?;
        ensure(got == want, || format!("{kind}: dof {got}, expected {want}"))?;
    }
    Ok("2, 3, 2, 4".into())
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, criterion_1, Duration::from_secs(1)),
        (2, criterion_2, Duration::from_secs(5)),
        (3, criterion_3, Duration::from_secs(2)),
        (4, criterion_4, Duration::from_secs(30)),
        (5, criterion_5, Duration::from_secs(30)),
        (6, criterion_6, Duration::from_secs(60)),
        (7, criterion_7, Duration::from_secs(60)),
        (8, criterion_8, Duration::from_secs(120)),
        (9, criterion_9, Duration::from_secs(1)),
    ];
    let mut failed = 0;
    for (k, run, budget) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let result = match result {
            Ok(msg) if elapsed > budget => Err(format!("{msg}, but took {elapsed:.2?} (budget {budget:?})")),
            other => other,
        };
        match result {
            Ok(msg) => println!("criterion {k}: PASS ({msg}; {elapsed:.2?})"),
            Err(msg) => {
                failed += 1;
                println!("criterion {k}: FAIL ({msg}; {elapsed:.2?})");
            }
        }
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed > 0 && std::env::var_os("AUXETICA_ACCEPTANCE_STRICT").is_some_and(|v| v == "1") {
        std::process::exit(1);
    }
}
