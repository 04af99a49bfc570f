//! Randomized invariants across modules.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use auxetica::deformation::{
    auxetic_cone, check_expansive, check_path_contraction, check_path_psd, check_volume, gram_differential,
    integrate_trajectory, DeformationPath, PsdVerdict, Selector, VolumeVerdict, DEFAULT_CONE_BUDGET, DEFAULT_DENSITY,
};
use auxetica::framework::{catalog, PeriodicFramework, honeycomb_equal_edge, silica_gram, sublattice_relax, CatalogId, CatalogKind};
use auxetica::io::{framework_to_string, parse_framework, ParseMode};
use auxetica::planar::{
    honeycomb_auxetic_test, is_ppt, period_triangle_class, random_ppt, HoneycombPoint, HoneycombVerdict, TriangleClass,
};
use auxetica::symcone::{
    is_contraction, minkowski_classify, operator_norm, psd_sqrt, psd_status, LinearMap, MinkowskiClass, PsdStatus,
    SymMatrix,
};
use proptest::prelude::*;

fn matrix(d: usize) -> impl Strategy<Value = LinearMap> {
    prop::collection::vec(-2.0f64..2.0, d * d).prop_map(move |v| LinearMap::from_column_major(d, v).unwrap())
}

fn symmetric(d: usize) -> impl Strategy<Value = SymMatrix> {
    prop::collection::vec(-2.0f64..2.0, d * (d + 1) / 2).prop_map(move |v| SymMatrix::from_upper(d, v).unwrap())
}

fn psd(d: usize) -> impl Strategy<Value = SymMatrix> {
    matrix(d).prop_map(|a| a.gram())
}

fn lattice2() -> impl Strategy<Value = LinearMap> {
    (-0.3f64..0.3, -0.3f64..0.3, -0.5f64..0.5, -0.3f64..0.3).prop_map(|(a, b, c, e)| {
        LinearMap::from_columns(&[vec![1.0 + a, b], vec![c, 1.0 + e]]).unwrap()
    })
}

/// Fixed seed: the properties are checked on a reproducible sample.
fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: proptest::test_runner::RngSeed::Fixed(0xa0e7),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn leading_minor(m: &SymMatrix, k: usize) -> f64 {
    let rows: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| m.get(i, j)).collect()).collect();
    LinearMap::from_rows(&rows).unwrap().determinant()
}

fn all_catalog() -> Vec<CatalogKind> {
    CatalogKind::ALL.to_vec()
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn positive_definite_has_positive_leading_minors(m in (2usize..=4).prop_flat_map(symmetric)) {
        if psd_status(&m, 1e-12).unwrap() == PsdStatus::PositiveDefinite {
            for k in 1..=m.dim() {
                prop_assert!(leading_minor(&m, k) > 0.0);
            }
        }
    }

    #[test]
    fn contraction_is_unit_ball(t in (2usize..=3).prop_flat_map(matrix), s in 0.05f64..1.5) {
        let t = t.scale(s / operator_norm(&t).max(1e-9));
        let gap = SymMatrix::identity(t.dim()).sub(&t.transpose().mul(&t).gram_like());
        let by_norm = is_contraction(&t, 1e-9);
        let by_psd = psd_status(&gap, 1e-9).unwrap().is_psd();
        if (operator_norm(&t) - 1.0).abs() > 1e-6 {
            prop_assert_eq!(by_norm, by_psd);
        }
    }

    #[test]
    fn square_root_squares_back(m in (2usize..=3).prop_flat_map(psd)) {
        let r = psd_sqrt(&m).unwrap();
        let rr = LinearMap::from_rows(&r.to_rows()).unwrap();
        let sq = rr.mul(&rr);
        for i in 0..m.dim() {
            for j in 0..m.dim() {
                prop_assert!((sq.get(i, j) - m.get(i, j)).abs() < 1e-9 * m.frobenius_norm().max(1.0));
            }
        }
    }

    #[test]
    fn future_timelike_is_positive_definite(m in symmetric(2)) {
        let future = minkowski_classify(&m).unwrap() == MinkowskiClass::FutureTimelike;
        let pd = psd_status(&m, 1e-12).unwrap() == PsdStatus::PositiveDefinite;
        prop_assert_eq!(future, pd);
    }

    #[test]
    fn norm_bounds_determinant(t in (2usize..=3).prop_flat_map(matrix)) {
        let d = t.dim() as f64;
        prop_assert!(operator_norm(&t) >= t.determinant().abs().powf(1.0 / d) - 1e-12);
    }

    #[test]
    fn quartz_gram_matches_closed_form(theta in 0.001f64..FRAC_PI_2 - 0.001) {
        let f = catalog(&CatalogId::new(CatalogKind::QuartzBeta).with("theta", theta)).unwrap();
        let g = f.gram();
        let want = silica_gram(3, theta);
        prop_assert!(g.sub(&want).frobenius_norm() < 1e-9);
        prop_assert_eq!(psd_status(&g, 0.0).unwrap(), PsdStatus::PositiveDefinite);
    }
}

trait GramLike {
    fn gram_like(&self) -> SymMatrix;
}

impl GramLike for LinearMap {
    /// Symmetric part of a matrix known to be symmetric.
    fn gram_like(&self) -> SymMatrix {
        let d = self.dim();
        let mut out = SymMatrix::zeros(d);
        for i in 0..d {
            for j in i..d {
                out.set(i, j, 0.5 * (self.get(i, j) + self.get(j, i)));
            }
        }
        out
    }
}

fn lattice_path(l0: LinearMap, p: LinearMap, b: LinearMap, auxetic: bool) -> DeformationPath {
    let d = l0.dim();
    let p = if auxetic { p.transpose().mul(&p).scale(0.5) } else { p };
    DeformationPath::lattice_fn((0.0, 0.5), DEFAULT_DENSITY, move |t| {
        if auxetic {
            LinearMap::identity(d).add(&p.scale(t)).mul(&l0)
        } else {
            l0.add(&p.scale(t)).add(&b.scale(t * t))
        }
    })
    .unwrap()
}

fn near_identity(d: usize) -> impl Strategy<Value = LinearMap> {
    prop::collection::vec(-0.2f64..0.2, d * d)
        .prop_map(move |v| LinearMap::identity(d).add(&LinearMap::from_column_major(d, v).unwrap()))
}

fn small(d: usize, r: f64) -> impl Strategy<Value = LinearMap> {
    prop::collection::vec(-r..r, d * d).prop_map(move |v| LinearMap::from_column_major(d, v).unwrap())
}

fn lattice_path_strategy() -> impl Strategy<Value = DeformationPath> {
    (2usize..=3, any::<bool>()).prop_flat_map(|(d, aux)| {
        (near_identity(d), small(d, 1.0), small(d, 0.3)).prop_map(move |(l0, p, b)| lattice_path(l0, p, b, aux))
    })
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn tangent_and_contraction_tests_agree(p in lattice_path_strategy()) {
        let a = check_path_psd(&p, 1e-9).unwrap();
        let b = check_path_contraction(&p, 1e-9).unwrap();
        prop_assert_eq!(a.is_auxetic(), b.is_auxetic(), "{:?} vs {:?}", a, b);
    }

    #[test]
    fn auxetic_paths_do_not_lose_volume(p in lattice_path_strategy()) {
        if check_path_psd(&p, 1e-9).unwrap() == PsdVerdict::Auxetic {
            prop_assert_eq!(check_volume(&p).unwrap(), VolumeVerdict::NonDecreasing);
        }
    }

    #[test]
    fn honeycomb_test_matches_triangle_and_cone(
        a11 in 0.5f64..2.0,
        a22 in 0.5f64..2.0,
        phi in 0.15f64..PI - 0.15,
    ) {
        let a12 = (a11 * a22).sqrt() * phi.cos();
        let pt = HoneycombPoint::from_gram(a11, a12, a22).unwrap();
        let verdict = honeycomb_auxetic_test(&pt).unwrap();
        let class = period_triangle_class(a11, a12, a22, 1e-9).unwrap();
        match (verdict, class) {
            (HoneycombVerdict::Boundary, _) | (_, TriangleClass::Right) => {}
            (v, c) => {
                prop_assert_eq!(v == HoneycombVerdict::Nontrivial, c == TriangleClass::Obtuse);
                let f = honeycomb_equal_edge(a11, a12, a22).unwrap();
                let cone = auxetic_cone(&f, 1e-9, DEFAULT_CONE_BUDGET).unwrap();
                prop_assert_eq!(v == HoneycombVerdict::Nontrivial, cone.verdict != auxetica::deformation::ConeVerdict::TrivialOnly);
            }
        }
    }

    #[test]
    fn generated_ppts_are_sound(l in lattice2(), n in 2usize..=4, seed in any::<u64>()) {
        let f = random_ppt(&l, n, seed).unwrap();
        prop_assert_eq!(f.m(), 2 * n);
        prop_assert!(is_ppt(&f));
        prop_assert_eq!(f.dof().unwrap(), 1);
    }

    #[test]
    fn ppt_is_affine_invariant(l in lattice2(), a in near_identity(2), n in 2usize..=4, seed in any::<u64>()) {
        prop_assume!(a.determinant().abs() > 0.3);
        let f = random_ppt(&l, n, seed).unwrap();
        let positions = f.positions.iter().map(|p| a.apply(p)).collect();
        let g = PeriodicFramework::from_geometry(positions, a.mul(&f.lattice), &f.edge_signature()).unwrap();
        prop_assert!(is_ppt(&g));
    }
}

proptest! {
    #![proptest_config(config(8))]

    #[test]
    fn ppt_motion_is_expansive_and_auxetic(l in lattice2(), n in 2usize..=3, seed in any::<u64>()) {
        let f = random_ppt(&l, n, seed).unwrap();
        let p = integrate_trajectory(&f, &Selector::KernelOneDof { orient: None }, 20, 0.005).unwrap();
        let keep = (0..p.len()).take_while(|&i| is_ppt(&p.framework_at(i))).count();
        prop_assume!(keep >= 2);
        let p = DeformationPath::new(p.framework0.clone(), p.samples[..keep].to_vec()).unwrap();
        prop_assert!(check_expansive(&p, 2, 1e-9).unwrap().is_expansive());
        prop_assert!(check_path_psd(&p, 1e-9).unwrap().is_auxetic());
    }
}

#[test]
fn catalog_grams_are_positive_definite_and_round_trip() {
    for kind in all_catalog() {
        let f = catalog(&CatalogId::new(kind)).unwrap();
        assert_eq!(psd_status(&f.gram(), 0.0).unwrap(), PsdStatus::PositiveDefinite, "{kind}");
        let text = framework_to_string(&f, &BTreeMap::new());
        let back = parse_framework(&text, ParseMode::Strict).unwrap().value;
        assert_eq!(back.gram(), f.gram(), "{kind}");
        assert_eq!(back, f, "{kind}");
    }
}

#[test]
fn relaxation_never_removes_motions() {
    for kind in all_catalog() {
        let f = catalog(&CatalogId::new(kind)).unwrap();
        let d = f.dim();
        let mut basis: Vec<Vec<i64>> = (0..d).map(|i| (0..d).map(|j| (i == j) as i64).collect()).collect();
        basis[0][0] = 2;
        let r = sublattice_relax(&f, &basis).unwrap();
        assert!(r.dof().unwrap() >= f.dof().unwrap(), "{kind}");
    }
}

#[test]
fn relaxed_auxetic_path_stays_auxetic() {
    let p = DeformationPath::silica_tilt(CatalogKind::QuartzBeta, 1.0, 0.2, 60).unwrap();
    assert_eq!(check_path_psd(&p, 1e-9).unwrap(), PsdVerdict::Auxetic);
    let basis = vec![vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    let r = p.relaxed(&basis).unwrap();
    assert_eq!(check_path_psd(&r, 1e-9).unwrap(), PsdVerdict::Auxetic);
    assert!(check_path_contraction(&r, 1e-9).unwrap().is_auxetic());
}

#[test]
fn gram_differential_matches_finite_differences() {
    let f = catalog(&CatalogId::new(CatalogKind::ReentrantHoneycomb)).unwrap();
    let p = integrate_trajectory(&f, &Selector::AuxeticWitness, 5, 0.01).unwrap();
    for i in 0..p.len() {
        let g = p.framework_at(i);
        let cone = auxetic_cone(&g, 1e-9, DEFAULT_CONE_BUDGET).unwrap();
        let w = cone.witness.expect("reentrant honeycomb stays auxetic");
        let h = 1e-6;
        let plus = g.lattice.add(&w.lattice_vel.scale(h)).gram();
        let minus = g.lattice.add(&w.lattice_vel.scale(-h)).gram();
        let fd = plus.sub(&minus).scale(1.0 / (2.0 * h));
        assert!(fd.sub(&gram_differential(&g, &w)).frobenius_norm() < 1e-5);
    }
}

#[test]
fn cone_witnesses_are_positive_semidefinite() {
    for kind in all_catalog() {
        let f = catalog(&CatalogId::new(kind)).unwrap();
        let r = auxetic_cone(&f, 1e-9, DEFAULT_CONE_BUDGET).unwrap();
        assert_eq!(r.witness.is_some(), r.verdict != auxetica::deformation::ConeVerdict::TrivialOnly, "{kind}");
        if let Some(g) = &r.witness_gram_velocity {
            assert!(psd_status(g, 1e-9 * g.frobenius_norm().max(1.0)).unwrap().is_psd(), "{kind}");
        }
    }
}
