use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use stabnoise::gf2::BitVec;
use stabnoise::mixing::{self, ChainConfig, Method, MonteCarlo};
use stabnoise::noise::{BernParam, DepolParam};
use stabnoise::oracles::{self, OracleReport};
use stabnoise::problems::*;
use stabnoise::reductions::*;
use stabnoise::rng::{seeded, trial_rng, Rng};
use stabnoise::stats::{advantage_ci, rate_sigma, AdvantageEstimate};
use stabnoise::symplectic::{count_codes, count_tableaus, pauli_of_symp, sparse_bound};

use crate::config::*;
use crate::{emit, CliError, CliResult};

fn to_json<T: Serialize>(v: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn read_instance(path: Option<&std::path::Path>) -> CliResult<Instance> {
    let path = path.ok_or_else(|| CliError::Usage("--input is required".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn bits(v: &BitVec) -> String {
    (0..v.len()).map(|i| if v.get(i) { '1' } else { '0' }).collect()
}

fn depol(r: &Rate) -> CliResult<DepolParam> {
    Ok(DepolParam::new(r.f64())?)
}

fn mismatch(chain: &str, want: &str, got: &Instance) -> CliError {
    CliError::Usage(format!("{chain} expects a {want} instance, got {}", got.name()))
}

// gen -----------------------------------------------------------------------

pub fn gen(a: &GenArgs) -> CliResult<bool> {
    let mut rng = seeded(a.seed);
    let rng = &mut rng;
    let mut inst = match a.problem {
        ProblemKind::Lpn => Instance::Lpn(sample_lpn(a.k, a.n, BernParam::new(a.p.f64())?, a.structured, rng)?),
        ProblemKind::Symplpn => Instance::Symplpn(sample_symplpn(a.n, depol(&a.p)?, a.structured, rng)?),
        ProblemKind::Lsn => Instance::Lsn(sample_lsn_classical(a.k, a.n, depol(&a.p)?, a.m, a.structured, rng)?),
        ProblemKind::LsnQuantum => {
            Instance::LsnQuantum(sample_lsn_quantum(a.k, a.n, depol(&a.p)?, a.m, a.structured, rng)?)
        }
        ProblemKind::Qsdp => Instance::Qsdp(sample_qsdp(a.n, a.k, a.w, rng)?),
    };
    if a.public_only {
        inst.strip_hidden();
    }
    emit(a.out.as_deref(), &to_json(&inst)?)?;
    Ok(true)
}

// reduce --------------------------------------------------------------------

pub fn reduce(a: &ReduceArgs) -> CliResult<bool> {
    let input = read_instance(a.input.as_deref())?;
    let mut rng = seeded(a.seed);
    let rng = &mut rng;
    let name = serde_json::to_value(a.chain)?;
    let name = name.as_str().unwrap_or("reduce");
    let (key, output, trace): (&str, Value, Value) = match (a.chain, &input) {
        (ReduceChain::LpnSymplpn, Instance::Lpn(i)) => {
            let cfg = LpnToSympConfig {
                eps: a.eps.exact().clone(),
                p: a.p.as_ref().map(|r| r.exact().clone()),
                q: a.q.as_ref().map(|r| r.exact().clone()),
            };
            let (out, tr) = lpn_to_symplpn(i, &cfg, rng)?;
            ("instance", serde_json::to_value(Instance::Symplpn(out))?, serde_json::to_value(tr)?)
        }
        (ReduceChain::SymplpnLsn, Instance::Symplpn(i)) => {
            let (out, tr) = symplpn_to_lsn_multi(i, a.k, a.m, rng)?;
            ("instance", serde_json::to_value(Instance::Lsn(out))?, serde_json::to_value(tr)?)
        }
        (ReduceChain::LsnQuantum, Instance::Lsn(i)) => {
            ("instance", serde_json::to_value(Instance::LsnQuantum(lsn_quantum_of_classical(i, rng)?))?, Value::Null)
        }
        (ReduceChain::LsnClassical, Instance::LsnQuantum(i)) => {
            let conv = lsn_classical_of_quantum(i, rng)?;
            ("instance", serde_json::to_value(Instance::Lsn(conv.instance))?, json!({ "shift": conv.shift }))
        }
        (ReduceChain::Rerandomize, Instance::Lsn(i)) => {
            let (out, shift) = rerandomize_secret(i, rng);
            ("instance", serde_json::to_value(Instance::Lsn(out))?, json!({ "shift": shift }))
        }
        (ReduceChain::IncreaseNoise, inst) => {
            let target =
                a.target.as_ref().ok_or_else(|| CliError::Usage("increase-noise needs --target".into()))?.f64();
            let out = match inst {
                Instance::Lpn(i) => Instance::Lpn(increase_noise(i, target, rng)?),
                Instance::Symplpn(i) => Instance::Symplpn(increase_noise(i, target, rng)?),
                Instance::Lsn(i) => Instance::Lsn(increase_noise(i, target, rng)?),
                other => return Err(mismatch(name, "lpn, symplpn or lsn", other)),
            };
            ("instance", serde_json::to_value(out)?, json!({ "target": target }))
        }
        (ReduceChain::QncpQsdp, Instance::LsnQuantum(i)) => {
            let s = i.public.samples.first().ok_or_else(|| CliError::Usage("instance has no samples".into()))?;
            let out = qncp_to_qsdp(&s.clifford, &s.state, i.params.k, a.w, rng)?;
            ("instance", serde_json::to_value(Instance::Qsdp(out))?, Value::Null)
        }
        (ReduceChain::QsdpQncp, Instance::Qsdp(i)) => {
            let sample = qsdp_to_qncp(&i.public.h, &i.public.v, rng)?;
            ("sample", serde_json::to_value(sample)?, Value::Null)
        }
        (chain, other) => {
            let want = match chain {
                ReduceChain::LpnSymplpn => "lpn",
                ReduceChain::SymplpnLsn => "symplpn",
                ReduceChain::LsnQuantum | ReduceChain::Rerandomize => "lsn",
                ReduceChain::LsnClassical | ReduceChain::QncpQsdp => "lsn-quantum",
                ReduceChain::QsdpQncp => "qsdp",
                ReduceChain::IncreaseNoise => "lpn, symplpn or lsn",
            };
            return Err(mismatch(name, want, other));
        }
    };
    let mut report = json!({ "config": Command::Reduce(a.clone()), "chain": name, "trace": trace });
    report[key] = output;
    emit(a.out.as_deref(), &to_json(&report)?)?;
    Ok(true)
}

// solve ---------------------------------------------------------------------

struct Solved {
    answer: Value,
    lls: Vec<f64>,
    correct: Option<bool>,
    holds: bool,
}

fn search_answer(x: &BitVec, lls: Vec<f64>, secret: Option<&BitVec>) -> Solved {
    Solved { answer: json!(bits(x)), lls, correct: secret.map(|s| s == x), holds: true }
}

fn decision_answer(structured: bool, lls: Vec<f64>, truth: Option<bool>) -> Solved {
    let answer = json!(if structured { "structured" } else { "unstructured" });
    Solved { answer, lls, correct: truth.map(|t| t == structured), holds: true }
}

pub fn solve(a: &SolveArgs) -> CliResult<bool> {
    let inst = read_instance(a.input.as_deref())?;
    let oracle = a.oracle.unwrap_or(match inst {
        Instance::Qsdp(_) => OracleKind::MinWeight,
        _ => OracleKind::Ml,
    });
    let mut rng = seeded(a.seed);
    let t0 = Instant::now();
    let (params, solved) = match (&inst, oracle) {
        (Instance::Lpn(i), OracleKind::Ml) => {
            let secret = i.hidden.as_ref().and_then(|h| h.secret.as_ref());
            (json!(i.params), search_answer(&oracles::lpn_ml_search(i)?, oracles::lpn_log_likelihoods(i)?, secret))
        }
        (Instance::Lpn(i), OracleKind::Lr) => {
            let truth = i.hidden.as_ref().map(|h| h.structured);
            (json!(i.params), decision_answer(oracles::lpn_lr_decision(i)?, Vec::new(), truth))
        }
        (Instance::Symplpn(i), OracleKind::Ml) => {
            let secret = i.hidden.as_ref().and_then(|h| h.secret.as_ref());
            (json!(i.params), search_answer(&oracles::symplpn_ml_search(i)?, Vec::new(), secret))
        }
        (Instance::Symplpn(i), OracleKind::Lr) => {
            let (s, u) = oracles::symplpn_decision_log_likelihoods(i)?;
            let truth = i.hidden.as_ref().map(|h| h.structured);
            (json!(i.params), decision_answer(oracles::symplpn_lr_decision(i)?, vec![s, u], truth))
        }
        (Instance::Lsn(i), OracleKind::Ml) => {
            let secret = i.hidden.as_ref().and_then(|h| h.secret.as_ref());
            (json!(i.params), search_answer(&oracles::lsn_ml_search(i)?, oracles::lsn_log_likelihoods(i)?, secret))
        }
        (Instance::Lsn(i), OracleKind::Lr) => {
            let (s, u) = oracles::lsn_decision_log_likelihoods(i)?;
            let truth = i.hidden.as_ref().map(|h| h.structured);
            (json!(i.params), decision_answer(oracles::lsn_lr_decision(i)?, vec![s, u], truth))
        }
        (Instance::LsnQuantum(i), OracleKind::Ml) => {
            let secret = i.hidden.as_ref().and_then(|h| h.secret.as_ref());
            (json!(i.params), search_answer(&oracles::lsn_quantum_ml_search(i, &mut rng)?, Vec::new(), secret))
        }
        (Instance::LsnQuantum(i), OracleKind::Lr) => {
            let truth = i.hidden.as_ref().map(|h| h.structured);
            (json!(i.params), decision_answer(oracles::lsn_quantum_lr_decision(i, &mut rng)?, Vec::new(), truth))
        }
        (Instance::Qsdp(i), OracleKind::MinWeight) => {
            let found = oracles::qsdp_min_weight(&i.public.h, &i.public.v, i.params.w)?;
            let holds =
                found.as_ref().is_some_and(|e| e.weight() <= i.params.w && i.public.h.syndrome(e) == i.public.v);
            let correct = i.hidden.as_ref().map(|_| holds);
            let answer = found.as_ref().map_or(Value::Null, |e| json!(pauli_of_symp(e)));
            (json!(i.params), Solved { answer, lls: Vec::new(), correct, holds })
        }
        (other, o) => {
            return Err(CliError::Usage(format!(
                "oracle {} does not apply to {} instances",
                serde_json::to_value(o)?.as_str().unwrap_or("?"),
                other.name()
            )))
        }
    };
    let report = OracleReport {
        oracle: serde_json::to_value(oracle)?.as_str().unwrap_or("?").to_string(),
        answer: solved.answer,
        log_likelihoods: solved.lls,
        runtime_ms: t0.elapsed().as_secs_f64() * 1e3,
        params,
    };
    let out = json!({
        "config": Command::Solve(a.clone()),
        "problem": inst.name(),
        "report": report,
        "correct": solved.correct,
    });
    emit(a.out.as_deref(), &to_json(&out)?)?;
    Ok(solved.holds)
}

// verify --------------------------------------------------------------------

/// Successes over `trials` independent trials; trial `i` of arm `arm` draws
/// from its own stream, so the count does not depend on scheduling.
fn count_arm<F>(seed: u64, arm: u64, trials: u64, f: F) -> CliResult<u64>
where
    F: Fn(u64, &mut Rng) -> stabnoise::Result<bool> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|i| f(i, &mut trial_rng(seed, arm * trials + i)).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
        .map_err(CliError::from)
}

#[derive(Serialize)]
struct VerifyReport {
    config: Command,
    chain: VerifyChain,
    /// Estimate under test (transformed instances, or the reduction's decision).
    advantage: Option<AdvantageEstimate>,
    /// Native-instance estimate the transformed one is compared against.
    native: Option<AdvantageEstimate>,
    recovery: Option<Recovery>,
    /// Value the predicate compares against.
    expected: f64,
    /// Combined sigma used by the predicate.
    sigma: f64,
    predicate: bool,
    details: Value,
}

#[derive(Serialize)]
struct Recovery {
    rate: f64,
    trials: u64,
    sigma: f64,
    chance: f64,
    margin_sigmas: f64,
}

fn estimate(s: u64, u: u64, trials: u64, alpha: f64) -> CliResult<AdvantageEstimate> {
    Ok(advantage_ci(s, trials, u, trials, alpha)?)
}

fn scaled_comparison(
    a: &VerifyArgs,
    native: AdvantageEstimate,
    transformed: AdvantageEstimate,
    scale: f64,
    extra_ok: bool,
    details: Value,
) -> VerifyReport {
    let expected = native.advantage * scale;
    let sigma = (transformed.sigma.powi(2) + (native.sigma * scale).powi(2)).sqrt();
    let predicate = extra_ok && (transformed.advantage - expected).abs() <= a.sigmas * sigma;
    VerifyReport {
        config: Command::Verify(a.clone()),
        chain: a.chain,
        advantage: Some(transformed),
        native: Some(native),
        recovery: None,
        expected,
        sigma,
        predicate,
        details,
    }
}

fn native_lsn(a: &VerifyArgs, p: DepolParam) -> CliResult<AdvantageEstimate> {
    let (k, n, m) = (a.k, a.n, a.m);
    let arm = |structured: bool, id: u64| {
        count_arm(a.seed, id, a.trials, move |_, r| {
            oracles::lsn_lr_decision(&sample_lsn_classical(k, n, p, m, structured, r)?)
        })
    };
    estimate(arm(true, 0)?, arm(false, 1)?, a.trials, a.alpha)
}

pub fn verify(a: &VerifyArgs) -> CliResult<bool> {
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be positive".into()));
    }
    let p = depol(&a.p)?;
    let (k, n, m) = (a.k, a.n, a.m);
    let report = match a.chain {
        VerifyChain::LpnSymplpnLsn => {
            let chain = hardness_chain(n, a.p.exact(), a.eps.exact())?;
            let exact = chain.p_final == *a.p.exact();
            let native = native_lsn(a, p)?;
            let arm = |structured: bool, id: u64| {
                count_arm(a.seed, id, a.trials, |_, r| {
                    let (inst, _) = hardness_chain_sample(&chain, k, m, structured, r)?;
                    oracles::lsn_lr_decision(&inst)
                })
            };
            let transformed = estimate(arm(true, 2)?, arm(false, 3)?, a.trials, a.alpha)?;
            let details = json!({ "hardness_chain": chain, "p_final_exact": exact });
            scaled_comparison(a, native, transformed, 1.0 / m as f64, exact, details)
        }
        VerifyChain::SymplpnLsn => {
            let native = native_lsn(a, p)?;
            let arm = |structured: bool, id: u64| {
                count_arm(a.seed, id, a.trials, |_, r| {
                    let symp = sample_symplpn(n, p, structured, r)?;
                    oracles::lsn_lr_decision(&symplpn_to_lsn_multi(&symp, k, m, r)?.0)
                })
            };
            let transformed = estimate(arm(true, 2)?, arm(false, 3)?, a.trials, a.alpha)?;
            scaled_comparison(a, native, transformed, 1.0 / m as f64, true, Value::Null)
        }
        VerifyChain::LsnRoundTrip => {
            // Paired: both oracles see the same instance.
            let pairs = |structured: bool, id: u64| -> CliResult<(u64, u64)> {
                (0..a.trials)
                    .into_par_iter()
                    .map(|i| {
                        let r = &mut trial_rng(a.seed, id * a.trials + i);
                        let inst = sample_lsn_classical(k, n, p, m, structured, r)?;
                        let q = lsn_quantum_of_classical(&inst, r)?;
                        let back = lsn_classical_of_quantum(&q, r)?.instance;
                        Ok::<_, stabnoise::Error>((
                            u64::from(oracles::lsn_lr_decision(&inst)?),
                            u64::from(oracles::lsn_lr_decision(&back)?),
                        ))
                    })
                    .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))
                    .map_err(CliError::from)
            };
            let (ns, ts) = pairs(true, 0)?;
            let (nu, tu) = pairs(false, 1)?;
            let native = estimate(ns, nu, a.trials, a.alpha)?;
            let transformed = estimate(ts, tu, a.trials, a.alpha)?;
            scaled_comparison(a, native, transformed, 1.0, true, Value::Null)
        }
        VerifyChain::DecisionToSearch => {
            let hits = count_arm(a.seed, 0, a.trials, |_, r| {
                let inst = sample_lsn_classical(k, n, p, m, true, r)?;
                let secret = inst.hidden.as_ref().and_then(|h| h.secret.clone());
                Ok(Some(oracles::lsn_ml_search(&inst)?) == secret)
            })?;
            let s_star = hits as f64 / a.trials as f64;
            let arm = |structured: bool, id: u64| {
                count_arm(a.seed, id, a.trials, |_, r| {
                    let inst = sample_lsn_classical(k, n, p, 2 * m, structured, r)?;
                    lsn_decision_to_search(&inst, oracles::lsn_ml_search, r)
                })
            };
            let adv = estimate(arm(true, 1)?, arm(false, 2)?, a.trials, a.alpha)?;
            let sigma = (adv.sigma.powi(2) + (2.0 * s_star * rate_sigma(a.trials)).powi(2)).sqrt();
            let expected = s_star * s_star - 0.5;
            VerifyReport {
                config: Command::Verify(a.clone()),
                chain: a.chain,
                predicate: adv.advantage >= expected - a.sigmas * sigma,
                advantage: Some(adv),
                native: None,
                recovery: None,
                expected,
                sigma,
                details: json!({ "s_star": s_star }),
            }
        }
        VerifyChain::SearchToDecision => {
            let hits = count_arm(a.seed, 0, a.trials, |i, r| {
                let inst = sample_lsn_quantum(k, n, p, k * m, true, r)?;
                let mut dr = trial_rng(a.seed ^ 0x5eed, i);
                let got = lsn_search_to_decision(&inst, m, 1, |s| oracles::lsn_quantum_lr_decision(s, &mut dr), r)?;
                Ok(inst.hidden.as_ref().and_then(|h| h.secret.as_ref()) == Some(&got))
            })?;
            let rate = hits as f64 / a.trials as f64;
            let chance = 0.5f64.powi(k as i32);
            let sigma = rate_sigma(a.trials);
            let margin = (rate - chance) / sigma;
            VerifyReport {
                config: Command::Verify(a.clone()),
                chain: a.chain,
                advantage: None,
                native: None,
                recovery: Some(Recovery { rate, trials: a.trials, sigma, chance, margin_sigmas: margin }),
                expected: chance,
                sigma,
                predicate: margin >= a.sigmas,
                details: json!({ "per_call": m, "rounds": 1 }),
            }
        }
    };
    emit(a.out.as_deref(), &to_json(&report)?)?;
    Ok(report.predicate)
}

// mix -----------------------------------------------------------------------

pub fn mix(a: &MixArgs) -> CliResult<bool> {
    let cfg = ChainConfig::new(a.n, a.t)?;
    let method = match a.method {
        MixMethod::Exact => Method::Exact,
        MixMethod::Mc => Method::MonteCarlo(MonteCarlo {
            trajectories: a.trajectories as usize,
            bootstrap: a.bootstrap,
            alpha: a.alpha,
            seed: a.seed,
        }),
    };
    let rows = mixing::mix_rows(&cfg, a.steps, &method)?;
    let mut csv = Vec::new();
    mixing::write_csv(&rows, &mut csv)?;
    if let Some(eps) = a.eps {
        let path = a.summary.as_deref().ok_or_else(|| CliError::Usage("--eps needs --summary".into()))?;
        let times = mixing::mixing_times(&cfg, eps, &mixing::all_weight_starts(a.n), &method, a.steps)?;
        let gap = if a.n <= mixing::MAX_EXACT_N { Some(mixing::scrambling_gap(&cfg, eps, a.steps)?) } else { None };
        let summary = json!({ "config": Command::Mix(a.clone()), "mixing_times": times, "scrambling_gap": gap });
        emit(Some(path), &to_json(&summary)?)?;
    }
    emit(a.out.as_deref(), &String::from_utf8_lossy(&csv))?;
    Ok(true)
}

// count ---------------------------------------------------------------------

pub fn count(a: &CountArgs) -> CliResult<bool> {
    let text = match (a.codes.as_deref(), a.tableaus.as_deref(), a.sparse.as_deref()) {
        (Some(&[n, k]), None, None) => format!("{}\n", count_codes(n, k)?),
        (None, Some(&[n, m]), None) => format!("{}\n", count_tableaus(n, m)?),
        (None, None, Some(&[n, k, d])) => to_json(&sparse_bound(n, k, d)?)?,
        _ => return Err(CliError::Usage("give exactly one of --codes, --tableaus, --sparse".into())),
    };
    emit(None, &text)?;
    Ok(true)
}
