use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use strat_core::gaussmanin::{
    base_change_check, external_product, fiber_restrict, gm_pushforward, h0_fiber_scan, maximal_pullback_sub, pullback,
    relative_h0, tau_action, tau_action_lifted, RelativeSplit,
};
use strat_core::testkit::{random_poly, random_tower};
use strat_core::{gauge_equivalent, Error, Mode, MultiIndex, Poly, PrimeField, Tower, F2, F3};

fn random_relative<F: PrimeField>(rng: &mut ChaCha8Rng) -> Tower<F> {
    let rank = rng.gen_range(1..=2);
    random_tower::<F, _>(rng, &["x"], &["s"], Mode::Absolute, rank, 2, 1)
}

fn cap<F: PrimeField>() -> u32 {
    F::CHARACTERISTIC - 1
}

fn stable_under_base_operators<F: PrimeField>(seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_relative::<F>(&mut rng);
    let split = RelativeSplit::of(&t);
    let m = relative_h0(&t, &split, 2, cap::<F>()).unwrap();
    let q = F::CHARACTERISTIC * F::CHARACTERISTIC;
    for g in &m.generators {
        for k in 0..q {
            let img = t.stratified_action(&MultiIndex::new(vec![0, k]), g).unwrap();
            for n in 1..q {
                let out = t.stratified_action(&MultiIndex::new(vec![n, 0]), &img).unwrap();
                assert!(out.iter().all(|e| e.is_zero()));
            }
        }
    }
}

fn lift_independent<F: PrimeField>(seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_relative::<F>(&mut rng);
    let split = RelativeSplit::of(&t);
    let m = relative_h0(&t, &split, 2, cap::<F>()).unwrap();
    let h = random_poly::<F, _>(&mut rng, t.vars(), 2, 0.6);
    for k in 0..F::CHARACTERISTIC {
        match (tau_action(&t, &split, &m, k), tau_action_lifted(&t, &split, &m, k, std::slice::from_ref(&h))) {
            (Ok(a), Ok(b)) => assert_eq!(a, b),
            (Err(a), Err(b)) => assert_eq!(a, b),
            (a, b) => panic!("lifts disagree: {a:?} vs {b:?}"),
        }
    }
}

fn projection_formula<F: PrimeField>(seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = rng.gen_range(1..=2);
    let m = random_tower::<F, _>(&mut rng, &["s"], &[], Mode::Absolute, rank, 2, 2);
    let up = pullback(&m, &["x"]).unwrap();
    let split = RelativeSplit::of(&up);
    let gm = gm_pushforward(&up, &split, 2, 0, None).unwrap();
    assert_eq!(gm.rank(), rank);
    assert!(gauge_equivalent(&gm.tower, &m, 4).unwrap().is_some());
    let report = base_change_check(&up, &split, 2, 0, None).unwrap();
    assert!(report.all_equal());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn relative_sections_are_stable(seed in any::<u64>()) {
        stable_under_base_operators::<F2>(seed);
        stable_under_base_operators::<F3>(seed);
    }

    #[test]
    fn tau_action_ignores_the_lift(seed in any::<u64>()) {
        lift_independent::<F2>(seed);
        lift_independent::<F3>(seed);
    }

    #[test]
    fn pushforward_of_pullback(seed in any::<u64>()) {
        projection_formula::<F2>(seed);
        projection_formula::<F3>(seed);
    }

    #[test]
    fn relative_h0_is_deterministic(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_relative::<F2>(&mut rng);
        let split = RelativeSplit::of(&t);
        let a = relative_h0(&t, &split, 2, 3).unwrap();
        let b = relative_h0(&t, &split, 2, 3).unwrap();
        prop_assert_eq!(a.generators, b.generators);
    }

    #[test]
    fn stabilized_towers_satisfy_base_change(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_relative::<F2>(&mut rng);
        let split = RelativeSplit::of(&t);
        let report = base_change_check(&t, &split, 2, 1, None).unwrap();
        if report.stabilized {
            prop_assert!(report.all_equal());
            let dims: Vec<usize> = report.points.iter().map(|p| p.fiber_dimension).collect();
            prop_assert!(dims.windows(2).all(|w| w[0] == w[1]));
            prop_assert!(maximal_pullback_sub(&t, &split, 2, 1, None).unwrap().all_equal());
        } else {
            prop_assert!(report.inconclusive());
        }
    }
}

#[test]
fn identity_pushes_forward_to_identity() {
    for r in 1..=2 {
        let t = Tower::<F3>::identity(vec!["x".into()], vec!["s".into()], Mode::Absolute, r, 2).unwrap();
        let split = RelativeSplit::of(&t);
        let gm = gm_pushforward(&t, &split, 2, 2, None).unwrap();
        assert!(gm.stabilized);
        assert_eq!(gm.rank(), r);
        assert!(gm.tower.sigmas().iter().all(|s| s.is_identity()));
        let q = tau_action(&t, &split, &relative_h0(&t, &split, 2, 2).unwrap(), 1).unwrap();
        assert!(q.is_zero());
    }
}

#[test]
fn rank_two_example_pipeline() {
    let rows =
        |m: &[&[&str]]| -> Vec<Vec<String>> { m.iter().map(|r| r.iter().map(|e| e.to_string()).collect()).collect() };
    let t = Tower::<F2>::from_strings(
        vec!["x".into()],
        vec!["s".into()],
        Mode::Absolute,
        2,
        &[rows(&[&["1", "s*x^2"], &["0", "1"]])],
    )
    .unwrap()
    .extend(3);
    let split = RelativeSplit::of(&t);
    let gm = gm_pushforward(&t, &split, 3, 3, None).unwrap();
    // x^2 is killed by D_1, so level one also sees (x^2, 0) and (0, x^2).
    assert_eq!(gm.ranks, vec![4, 2, 2]);
    assert!(gm.stabilized);
    // The generators are horizontal for the absolute stratification, so
    // the level-one Gauss-Manin connection vanishes.
    assert!(gm.tower.level1_connection().unwrap().matrices()[0].is_zero());
    let v = t.vars();
    assert_eq!(gm.embedding[1], vec![Poly::parse("s*x^2", v).unwrap(), Poly::one(v)]);
}

#[test]
fn relative_mode_scan_is_recorded() {
    let rows = vec![vec!["1".to_string(), "s*x".to_string()], vec!["0".to_string(), "1".to_string()]];
    let t = Tower::<F2>::from_strings(vec!["x".into()], vec!["s".into()], Mode::Relative, 2, &[rows]).unwrap();
    let split = RelativeSplit::of(&t);
    let table = h0_fiber_scan(&t, &split, 1, 1).unwrap();
    assert_eq!(table.iter().map(|r| r.dimension).collect::<Vec<_>>(), vec![2, 2]);
    assert!(matches!(tau_action(&t, &split, &relative_h0(&t, &split, 1, 1).unwrap(), 1), Err(Error::Mode(_))));
}

#[test]
fn fiber_restrict_rejects_bad_arity() {
    let t = Tower::<F2>::identity(vec!["x".into()], vec!["s".into()], Mode::Absolute, 1, 1).unwrap();
    let split = RelativeSplit::of(&t);
    assert!(fiber_restrict(&t, &split, &[]).is_err());
}

#[test]
fn external_product_of_units() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let b = random_tower::<F2, _>(&mut rng, &["y"], &[], Mode::Absolute, 2, 1, 2);
    let unit = Tower::<F2>::identity(vec!["x".into()], vec![], Mode::Absolute, 1, 1).unwrap();
    let ub = external_product(&unit, &b).unwrap();
    assert_eq!(ub.vars().to_vec(), vec!["x".to_string(), "y".to_string()]);
    assert_eq!(ub.sigmas()[0].to_strings(), b.sigmas()[0].to_strings());
}

#[test]
fn special_fiber_dimension_dominates() {
    let rows = |e: &str| vec![vec!["1".to_string(), e.to_string()], vec!["0".to_string(), "1".to_string()]];
    for e in ["s*x", "s*x^2", "s^2*x", "s*x + x^2", "s*x^3"] {
        for (level, degree) in [(1, 1), (1, 3), (2, 3)] {
            let t = Tower::<F2>::from_strings(vec!["x".into()], vec!["s".into()], Mode::Relative, 2, &[rows(e)])
                .unwrap()
                .extend(2);
            let table = h0_fiber_scan(&t, &RelativeSplit::of(&t), level, degree).unwrap();
            assert!(table.iter().all(|r| table[0].dimension >= r.dimension), "{e}: {table:?}");
            let t = Tower::<F3>::from_strings(vec!["x".into()], vec!["s".into()], Mode::Relative, 2, &[rows(e)])
                .unwrap()
                .extend(2);
            let table = h0_fiber_scan(&t, &RelativeSplit::of(&t), level, degree).unwrap();
            assert!(table.iter().all(|r| table[0].dimension >= r.dimension), "{e}: {table:?}");
        }
    }
}
