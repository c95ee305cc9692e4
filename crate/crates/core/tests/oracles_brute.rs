//! The exact oracles against direct enumeration written independently here.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stabnoise::noise::{exact_depol_dist, BernParam, DepolParam};
use stabnoise::oracles::*;
use stabnoise::problems::{random_isotropic, sample_lpn, sample_lsn_classical, sample_symplpn};
use stabnoise::{BitVec, IsotropicSet, PauliVec};

fn close(a: f64, b: f64) -> bool {
    (a == f64::NEG_INFINITY && b == f64::NEG_INFINITY) || (a - b).abs() < 1e-9 * (1.0 + b.abs())
}

fn lex(k: usize, u: u64) -> BitVec {
    BitVec::from_bools(&(0..k).map(|j| u >> (k - 1 - j) & 1 == 1).collect::<Vec<_>>())
}

#[test]
fn lpn_matches_row_products() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for &p in &[0.0, 0.1, 0.3] {
        for _ in 0..10 {
            let inst = sample_lpn(4, 9, BernParam::new(p).unwrap(), true, &mut rng).unwrap();
            let ll = lpn_log_likelihoods(&inst).unwrap();
            let mut best = (f64::NEG_INFINITY, 0);
            for u in 0..16u64 {
                let x = lex(4, u);
                let pred = inst.public.a.mul_vec(&x);
                let mut pr = 1.0f64;
                for i in 0..9 {
                    pr *= if pred.get(i) == inst.public.y.get(i) { 1.0 - p } else { p };
                }
                assert!(close(ll[u as usize], pr.ln()));
                if pr.ln() > best.0 + 1e-12 {
                    best = (pr.ln(), u);
                }
            }
            assert_eq!(lpn_ml_search(&inst).unwrap(), lex(4, best.1));
        }
    }
}

/// `Pr[z | y]` for one sample, summing over junk directly.
fn sample_probability(table: &[f64], a: &IsotropicSet, b: &IsotropicSet, z: &BitVec, y: &BitVec) -> f64 {
    let n = a.n();
    let base = z.xor(&b.matrix().mul_vec(y));
    let mut acc = 0.0;
    for r in 0..1u64 << n {
        let e = base.xor(&a.matrix().mul_vec(&BitVec::from_u64(n, r)));
        acc += table[e.as_u64() as usize] / (1u64 << n) as f64;
    }
    acc
}

#[test]
fn lsn_matches_direct_marginals() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for (k, n, m) in [(1, 2, 3), (2, 3, 2), (1, 4, 1)] {
        for &p in &[0.0, 0.15, 0.5] {
            for structured in [true, false] {
                let d = DepolParam::new(p).unwrap();
                let inst = sample_lsn_classical(k, n, d, m, structured, &mut rng).unwrap();
                let table = exact_depol_dist(n, d).unwrap();
                let ll = lsn_log_likelihoods(&inst).unwrap();
                let mut marginal = 0.0;
                for u in 0..1u64 << k {
                    let y = lex(k, u);
                    let pr: f64 =
                        inst.public.samples.iter().map(|s| sample_probability(&table, &s.a, &s.b, &s.z, &y)).product();
                    assert!(close(ll[u as usize], pr.ln()), "{} vs {}", ll[u as usize], pr.ln());
                    marginal += pr / (1u64 << k) as f64;
                }
                let (s, un) = lsn_decision_log_likelihoods(&inst).unwrap();
                assert!(close(s, marginal.ln()));
                assert!(close(un, -((2 * n * m) as f64) * std::f64::consts::LN_2));
                assert_eq!(lsn_lr_decision(&inst).unwrap(), marginal.ln() > un + 1e-9);
            }
        }
    }
}

#[test]
fn symplpn_decision_matches_direct_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for n in 1..=3 {
        let d = DepolParam::new(0.2).unwrap();
        let table = exact_depol_dist(n, d).unwrap();
        for structured in [true, false] {
            let inst = sample_symplpn(n, d, structured, &mut rng).unwrap();
            let mut acc = 0.0;
            for x in 0..1u64 << n {
                let e = inst.public.z.xor(&inst.public.a.matrix().mul_vec(&BitVec::from_u64(n, x)));
                acc += table[e.as_u64() as usize] / (1u64 << n) as f64;
            }
            let (s, _) = symplpn_decision_log_likelihoods(&inst).unwrap();
            assert!(close(s, acc.ln()));
            let best = symplpn_ml_search(&inst).unwrap();
            let score = |x: &BitVec| table[inst.public.z.xor(&inst.public.a.matrix().mul_vec(x)).as_u64() as usize];
            for u in 0..1u64 << n {
                assert!(score(&lex(n, u)) <= score(&best) + 1e-15);
            }
        }
    }
}

fn all_paulis(n: usize) -> Vec<PauliVec> {
    common::all_paulis(n)
}

#[test]
fn syndrome_decoding_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for n in 2..=5 {
        for r in 1..n {
            let h = random_isotropic(n, r, &mut rng).unwrap();
            let paulis = all_paulis(n);
            let pure = paulis.iter().filter(|p| !p.is_identity() && h.syndrome(p).is_zero()).map(|p| p.weight()).min();
            assert_eq!(pure_distance(&h, n).unwrap(), pure);
            let logical = paulis
                .iter()
                .filter(|p| h.syndrome(p).is_zero() && !h.matrix().col_span_contains(p.bits()))
                .map(|p| p.weight())
                .min();
            assert_eq!(code_distance(&h, n).unwrap(), logical);
            for _ in 0..5 {
                let v = BitVec::random(r, &mut rng);
                let min = paulis.iter().filter(|p| h.syndrome(p) == v).map(|p| p.weight()).min().unwrap();
                for w in 0..=n {
                    let got = qsdp_min_weight(&h, &v, w).unwrap();
                    assert_eq!(qsdp_exists(&h, &v, w).unwrap(), w >= min);
                    match got {
                        Some(e) => {
                            assert_eq!(e.weight(), min);
                            assert_eq!(h.syndrome(&e), v);
                        }
                        None => assert!(w < min),
                    }
                }
            }
        }
    }
}
