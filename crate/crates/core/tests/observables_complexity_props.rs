use nilskew::arith::AlphaSpec;
use nilskew::complexity::{
    bar_d_n, build_grid_f, covering_number, recount, CloudSource, GridParams, SampleCloud,
};
use nilskew::flows::{ConjugacySetup, SkewProduct};
use nilskew::heisenberg::{haar_sample, HeisenbergElement, PhasePoint};
use nilskew::observables::{
    eval_observable, eval_psi, eval_psi_star, tail_bound, ObservableSpec, PsiFamily, THETA_SUP,
};
use nilskew::periodic::PeriodicFunction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type H = HeisenbergElement;

fn element() -> impl Strategy<Value = H> {
    (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y, z)| H::new(x, y, z))
}

fn index() -> impl Strategy<Value = (i64, i64)> {
    (1i64..6).prop_flat_map(|m| (Just(m), 0..m))
}

fn family() -> impl Strategy<Value = PsiFamily> {
    prop_oneof![
        Just(PsiFamily::Psi),
        Just(PsiFamily::PsiBar),
        Just(PsiFamily::PsiStar),
        Just(PsiFamily::PsiStarBar)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn lattice_invariance((m, j) in index(), g in element(), a in -2i32..=2, b in -2i32..=2, c in -2i32..=2) {
        let gamma = H::new(a as f64, b as f64, c as f64);
        let h = gamma.mul(g);
        prop_assert!((eval_psi(m, j, h, 12).unwrap() - eval_psi(m, j, g, 12).unwrap()).norm() < 1e-10);
        prop_assert!((eval_psi_star(m, j, h, 12).unwrap() - eval_psi_star(m, j, g, 12).unwrap()).norm() < 1e-10);
    }

    #[test]
    fn class_a_is_well_defined_on_cosets(
        (m, j) in index(), fam in family(), xi in (-3i64..=3, -3i64..=3, -3i64..=3), g in element(), t in 0.0..1.0f64
    ) {
        let spec = ObservableSpec::ClassA { xi1: xi.0, xi2: xi.1, xi3: xi.2, m, j, family: fam };
        let canonical = PhasePoint::from_parts(t, g);
        let v = eval_observable(&spec, &canonical, 12).unwrap();
        let shifted = PhasePoint::from_parts(t, H::new(1.0, -1.0, 2.0).mul(g));
        prop_assert!((eval_observable(&spec, &shifted, 12).unwrap() - v).norm() < 1e-10);
        prop_assert!(v.norm() <= THETA_SUP + 1e-12);
    }

    #[test]
    fn truncation_within_tail_bound((m, j) in index(), g in element()) {
        let d = (eval_psi(m, j, g, 20).unwrap() - eval_psi(m, j, g, 12).unwrap()).norm();
        prop_assert!(d <= tail_bound(12));
        let d = (eval_psi_star(m, j, g, 20).unwrap() - eval_psi_star(m, j, g, 12).unwrap()).norm();
        prop_assert!(d <= tail_bound(12));
    }
}

#[test]
fn bounded_and_stable_on_haar_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut sup12 = 0.0f64;
    let mut sup20 = 0.0f64;
    for _ in 0..10_000 {
        let g = haar_sample(&mut rng).rep();
        for (m, j) in [(1, 0), (2, 1), (3, 2)] {
            sup12 = sup12.max(eval_psi(m, j, g, 12).unwrap().norm());
            sup20 = sup20.max(eval_psi(m, j, g, 20).unwrap().norm());
        }
    }
    assert!(sup12 <= THETA_SUP + 1e-12);
    assert!((sup12 - sup20).abs() < 1e-12);
}

fn golden_t1() -> SkewProduct {
    let setup = ConjugacySetup::new(
        AlphaSpec::golden(),
        2.0,
        PeriodicFunction::cos(),
        PeriodicFunction::sin(),
        3.0,
    )
    .unwrap();
    SkewProduct::new(setup.t1_spec()).unwrap()
}

#[test]
fn covers_survive_recount_and_shrink_with_epsilon() {
    let map = golden_t1();
    let cloud = SampleCloud::new(&map, CloudSource::HaarUniform { seed: 2 }, 400, 20);
    for n in [1, 5, 20] {
        let mut last = usize::MAX;
        for eps in [0.1, 0.2, 0.4] {
            let rep = covering_number(&cloud, n, eps).unwrap();
            assert!(recount(&cloud, &rep).unwrap() > 1.0 - eps);
            assert!(rep.covered_mass > 1.0 - eps && rep.covered_mass <= 1.0);
            assert!(rep.s_n <= last, "n = {n}, eps = {eps}");
            last = rep.s_n;
        }
    }
}

#[test]
fn cached_orbits_match_direct_iteration() {
    let map = golden_t1();
    let cloud = SampleCloud::new(&map, CloudSource::HaarUniform { seed: 4 }, 50, 30);
    for i in [0, 17, 49] {
        let p = cloud.point(i);
        let direct: Vec<PhasePoint> = map.iter_from(p).take(31).collect();
        assert_eq!(cloud.orbit(i)[1], direct[1]);
        assert_eq!(cloud.orbit(i)[30], direct[30]);
    }
}

#[test]
fn central_translation_keeps_bowen_distances() {
    let setup = ConjugacySetup::new(
        AlphaSpec::golden(),
        2.0,
        PeriodicFunction::cos(),
        PeriodicFunction::sin(),
        3.0,
    )
    .unwrap();
    let map = SkewProduct::new(setup.t1_tilde_spec()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let (p, q) = (haar_sample(&mut rng), haar_sample(&mut rng));
        let d1 = bar_d_n(&map, p, q, 1).unwrap();
        for n in [2, 10, 100] {
            assert!((bar_d_n(&map, p, q, n).unwrap() - d1).abs() < 1e-10);
        }
    }
}

#[test]
fn grid_cardinality_formula() {
    for (eps_inv, l, q) in [
        (10u64, 2u64, 2u64),
        (5, 3, 2),
        (4, 2, 3),
        (100, 3, 2),
        (2, 1, 4),
    ] {
        let p = GridParams { q, eps_inv, l };
        let expected = eps_inv as u128 * (l as u128).pow(4) * (q as u128).pow(7);
        assert_eq!(p.cardinality(), expected);
        assert_eq!(build_grid_f(p, 10_000_000).unwrap().len() as u128, expected);
    }
    let too_big = GridParams {
        q: 10,
        eps_inv: 10,
        l: 10,
    };
    assert!(build_grid_f(too_big, 10_000_000).is_err());
}
