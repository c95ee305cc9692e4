use proptest::prelude::*;
use stabnoise::mixing::*;
use stabnoise::rng::seeded;

const TAU_025: [usize; 5] = [1, 3, 6, 10, 14];

#[test]
fn pinned_pessimistic_times() {
    for (i, n) in (2..=6).enumerate() {
        let cfg = ChainConfig::new(n, 2).unwrap();
        let mt = mixing_times(&cfg, 0.25, &all_weight_starts(n), &Method::Exact, 200).unwrap();
        assert_eq!(mt.tau_upper, Some(TAU_025[i]), "n = {n}");
        assert_eq!(mt.per_start[0], mt.tau_upper, "weight-1 start mixes slowest");
    }
}

#[test]
fn pinned_scrambling_gap() {
    let g = scrambling_gap(&ChainConfig::new(5, 2).unwrap(), 0.1, 200).unwrap();
    assert_eq!(g.tau_lower, 6);
    assert!((g.eta - 0.474_337_697).abs() < 1e-8, "{}", g.eta);
    let g6 = scrambling_gap(&ChainConfig::new(6, 2).unwrap(), 0.25, 200).unwrap();
    let (w1, wn) = (g6.per_weight[0].0, g6.per_weight.iter().map(|p| p.0).min().unwrap());
    assert_eq!((w1, wn), (14, 5));
    assert!(g6.eta >= 0.25);
}

#[test]
fn fit_against_n_log_n() {
    let pts: Vec<(usize, f64)> = (3..=6).map(|n| (n, TAU_025[n - 2] as f64)).collect();
    let f = fit_n_log_n(&pts, 0.25).unwrap();
    assert!(f.r_squared >= 0.9, "{f:?}");
}

#[test]
fn monte_carlo_within_bootstrap_band() {
    for n in [2, 4] {
        let cfg = ChainConfig::new(n, 2).unwrap();
        let q = exact_transition(&cfg).unwrap();
        let s = weight_class_start(n, 1).unwrap();
        let exact = exact_tv_curve(&q, &s, 8).unwrap();
        let mc = MonteCarlo { trajectories: 40_000, bootstrap: 300, alpha: 0.01, seed: 61 + n as u64 };
        for (e, x) in mc_tv_curve(&cfg, &s, 8, &mc).unwrap().iter().zip(&exact) {
            assert!(e.ci_low - 0.01 <= *x && *x <= e.ci_high + 0.01, "n = {n}: {e:?} vs {x}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn steps_never_reach_zero(seed in any::<u64>(), n in 1usize..8, t in 1usize..4, letters in proptest::collection::vec(0u8..4, 8)) {
        prop_assume!(t <= n);
        let mut s: Vec<u8> = letters[..n].to_vec();
        prop_assume!(s.iter().any(|&l| l != 0));
        let cfg = ChainConfig::new(n, t).unwrap();
        let mut rng = seeded(seed);
        for _ in 0..50 {
            s = chain_step(&s, &cfg, &mut rng).unwrap();
            prop_assert!(s.iter().any(|&l| l != 0));
        }
    }

    #[test]
    fn exact_curves_nonincreasing(n in 2usize..5, t in 1usize..3, w in 1usize..5) {
        prop_assume!(t <= n && w <= n);
        let q = exact_transition(&ChainConfig::new(n, t).unwrap()).unwrap();
        let c = exact_tv_curve(&q, &weight_class_start(n, w).unwrap(), 30).unwrap();
        prop_assert!(c.windows(2).all(|p| p[1] <= p[0] + 1e-10));
    }

    #[test]
    fn coupon_bound_is_monotone(n in 3usize..30, t in 1usize..3, eps in 0.01f64..1.0) {
        prop_assume!(t < n);
        let b = coupon_lower(n, t, eps, 40).unwrap();
        prop_assert!(b.threshold >= 0.0);
        prop_assert!(b.miss_probability.windows(2).all(|p| p[1] <= p[0]));
    }
}
