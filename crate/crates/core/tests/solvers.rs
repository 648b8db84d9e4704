mod common;

use common::*;
use mmssl::solvers::*;
use mmssl::Error;
use nalgebra::DVector;
use proptest::prelude::*;
use rand::Rng;

fn random_state(r: &mut rand_chacha::ChaCha8Rng, k: usize, n: usize) -> AlmState<f64> {
    let mut state = AlmState::new(k, n, r.random_range(0.5..20.0));
    for i in 0..k {
        state.relaxed[i] = uniform_vector(r, n);
        state.multipliers[i] = uniform_vector(r, n);
    }
    state
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_matches_stacked_system(seed in any::<u64>(), k in 1usize..5, tau in 0.0f64..10.0) {
        let mut r = rng(seed);
        let n = r.random_range(1..=20);
        let dicts: Vec<_> = (0..k).map(|_| {
            let m = r.random_range(1..=12);
            uniform_matrix(&mut r, m, n)
        }).collect();
        let ys: Vec<_> = dicts.iter().map(|d| uniform_vector(&mut r, d.nrows())).collect();
        let s: Vec<_> = (0..k).map(|_| uniform_vector(&mut r, n)).collect();
        let state = random_state(&mut r, k, n);
        let got = update_alpha_c(&dicts, &ys, &s, &state, tau).unwrap();
        let want = stacked_alpha_c(&dicts, &ys, &s, &state, tau);
        prop_assert!(relative_error(&got, &want) <= 1e-8);
    }

    #[test]
    fn ipm_reaches_the_oracle_objective(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.random_range(2..=8);
        let n = r.random_range(1..=10);
        let d = uniform_matrix(&mut r, m, n);
        let y = uniform_vector(&mut r, m);
        let lambda = r.random_range(0.05..1.0);
        let cfg = MmsslConfig { max_inner: 20_000, ..MmsslConfig::default() };
        let s = solve_lasso_ipm(&d, &y, &DVector::zeros(n), lambda, &cfg).unwrap();
        let oracle = lasso_bruteforce_oracle(&d, &y, lambda).unwrap();
        let gap = lasso_objective(&d, &y, &s, lambda) - lasso_objective(&d, &y, &oracle, lambda);
        prop_assert!(gap <= 1e-6, "gap {gap}");
        prop_assert!(gap >= -1e-9, "beat the oracle by {gap}");
    }
}

#[test]
fn tau_zero_decouples_into_lassos() {
    for seed in 0..6 {
        let (dicts, ys) = multimodal_instance(seed);
        let lambda = 0.1;
        let cfg = MmsslConfig { tau: 0.0, lambda, ..MmsslConfig::default() };
        let sol = mmssl_solve(&dicts, &ys, &cfg).unwrap();
        assert!(sol.primal_residual <= 1e-6);
        for k in 0..3 {
            let d = &dicts[k].matrix;
            let oracle = lasso_bruteforce_oracle(d, &ys[k], lambda).unwrap();
            let combined = sol.pairs[k].combined();
            let fit = (&ys[k] - d * &combined).norm_squared()
                + lambda * (sol.pairs[k].alpha_c.lp_norm(1) + sol.pairs[k].alpha_s.lp_norm(1));
            let best = lasso_objective(d, &ys[k], &oracle, lambda);
            assert!(fit - best <= 1e-6, "seed {seed} modality {k}: {fit} vs {best}");
        }
    }
}

#[test]
fn single_modality_ignores_tau() {
    let (dicts, ys) = multimodal_instance(3);
    let one = &dicts[..1];
    let y = &ys[..1];
    let a = mmssl_solve(one, y, &MmsslConfig { tau: 0.0, lambda: 0.1, ..Default::default() }).unwrap();
    let b = mmssl_solve(one, y, &MmsslConfig { tau: 5.0, lambda: 0.1, ..Default::default() }).unwrap();
    assert!((a.objective - b.objective).abs() < 1e-8, "{} vs {}", a.objective, b.objective);
}

#[test]
fn zero_samples_give_zero_codes() {
    let (dicts, ys) = multimodal_instance(1);
    let zeros: Vec<_> = ys.iter().map(|y| DVector::zeros(y.len())).collect();
    let sol = mmssl_solve(&dicts, &zeros, &MmsslConfig::default()).unwrap();
    for p in &sol.pairs {
        assert_eq!(p.alpha_c.amax(), 0.0);
        assert_eq!(p.alpha_s.amax(), 0.0);
    }
    assert!(sol.converged);
    assert_eq!(sol.objective, 0.0);
}

#[test]
fn solves_are_bit_identical() {
    let (dicts, ys) = multimodal_instance(9);
    let cfg = MmsslConfig { lambda: 0.05, ..Default::default() };
    let solver = MmsslSolver::new(&dicts, &cfg).unwrap();
    let a = solver.solve(&ys).unwrap();
    let b = solver.solve(&ys).unwrap();
    let c = mmssl_solve(&dicts, &ys, &cfg).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn objective_matches_reported_value() {
    let (dicts, ys) = multimodal_instance(4);
    let cfg = MmsslConfig { lambda: 0.05, tau: 0.5, ..Default::default() };
    let sol = mmssl_solve(&dicts, &ys, &cfg).unwrap();
    let recomputed = mmssl_objective(&dicts, &ys, &sol.pairs, cfg.tau, cfg.lambda);
    assert!((recomputed - sol.objective).abs() <= 1e-12 * sol.objective.max(1.0));
    let zero = vec![CoefficientPair::zeros(dicts[0].atoms()); 3];
    let start = mmssl_objective(&dicts, &ys, &zero, cfg.tau, cfg.lambda);
    assert!(sol.objective < start);
}

#[test]
fn similarity_spread_shrinks_with_tau() {
    let (dicts, ys) = multimodal_instance(17);
    let mut prev = f64::INFINITY;
    for tau in [0.01, 0.1, 1.0, 10.0] {
        let cfg = MmsslConfig { tau, lambda: 0.1, ..Default::default() };
        let spread = similarity_spread(&mmssl_solve(&dicts, &ys, &cfg).unwrap().pairs);
        assert!(spread <= prev + 1e-6, "tau {tau}: {spread} > {prev}");
        prev = spread;
    }
}

#[test]
fn rejects_inconsistent_inputs() {
    let (dicts, ys) = multimodal_instance(2);
    let cfg = MmsslConfig::default();
    assert!(matches!(
        mmssl_solve(&dicts, &ys[..2], &cfg),
        Err(Error::DimensionMismatch(_))
    ));
    let mut short = ys.clone();
    short[1] = DVector::zeros(short[1].len() + 1);
    assert!(matches!(mmssl_solve(&dicts, &short, &cfg), Err(Error::DimensionMismatch(_))));
    let mut r = rng(5);
    let other = random_dicts(&mut r, 1, 3..=3, dicts[0].atoms() + 1);
    let mixed = vec![dicts[0].clone(), other[0].clone()];
    assert!(MmsslSolver::new(&mixed, &cfg).is_err());
    assert!(MmsslSolver::new(&dicts, &MmsslConfig { lambda: -1.0, ..cfg.clone() }).is_err());
    let mut nan = ys.clone();
    nan[0][0] = f64::NAN;
    assert!(mmssl_solve(&dicts, &nan, &cfg).is_err());
}

#[test]
fn single_precision_tracks_double() {
    let (dicts, ys) = multimodal_instance(3);
    let cfg = mmssl::Config { lambda: 0.1, ..Default::default() };
    let wide = mmssl_solve(&dicts, &ys, &cfg).unwrap();
    let narrow_dicts: Vec<mmssl::Dictionary32> = dicts
        .iter()
        .map(|d| mmssl::Dictionary32::new(d.matrix.map(|x| x as f32), d.class_slices.clone()).unwrap())
        .collect();
    let narrow_ys: Vec<_> = ys.iter().map(|y| y.map(|x| x as f32)).collect();
    let cfg32 = mmssl::Config32 { lambda: 0.1, tol_outer: 1e-5, tol_inner: 1e-6, ..Default::default() };
    let narrow: mmssl::Solution32 = mmssl_solve(&narrow_dicts, &narrow_ys, &cfg32).unwrap();
    for (a, b) in wide.pairs.iter().zip(&narrow.pairs) {
        let diff = a.combined() - b.combined().map(f64::from);
        assert!(diff.amax() < 1e-2, "{diff}");
    }
}
