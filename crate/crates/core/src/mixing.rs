//! The t-local Clifford chain on nonzero Pauli symbols.
//!
//! A state is a string of letters in `{0, 1, 2, 3}` (index `x + 2z`), never
//! all zero. One step picks `t` distinct positions uniformly; if they are all
//! zero nothing happens, otherwise they are replaced by a uniform nonzero
//! `t`-tuple. Internally a state is packed two bits per letter into a `u64`.

use std::io::Write;

use rand::seq::index::sample as sample_positions;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::trial_rng;
use crate::stats::tv_exact;

/// Largest `n` for the exact transition matrix (4095 states).
pub const MAX_EXACT_N: usize = 6;
/// Largest `n` for Monte Carlo histograms.
pub const MAX_MC_N: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub n: usize,
    pub t: usize,
}

impl ChainConfig {
    pub fn new(n: usize, t: usize) -> Result<Self> {
        if t == 0 || t > n {
            return Err(invalid(format!("need 1 <= t <= n, got n = {n}, t = {t}")));
        }
        if n > 31 {
            return Err(Error::TooLarge("symbols are packed into 64 bits".into()));
        }
        Ok(ChainConfig { n, t })
    }

    /// `4^n - 1`.
    pub fn states(&self) -> usize {
        (1usize << (2 * self.n)) - 1
    }
}

pub fn encode(s: &[u8]) -> u64 {
    s.iter().enumerate().fold(0, |acc, (i, &l)| acc | (u64::from(l & 3) << (2 * i)))
}

pub fn decode(n: usize, code: u64) -> Vec<u8> {
    (0..n).map(|i| ((code >> (2 * i)) & 3) as u8).collect()
}

fn check_symbol(cfg: &ChainConfig, s: &[u8]) -> Result<()> {
    if s.len() != cfg.n {
        return Err(Error::Dimension(format!("symbol has {} letters, chain has {}", s.len(), cfg.n)));
    }
    if s.iter().any(|&l| l > 3) {
        return Err(invalid("letters must lie in 0..4"));
    }
    if s.iter().all(|&l| l == 0) {
        return Err(invalid("the all-zero symbol is not a chain state"));
    }
    Ok(())
}

fn step_code<R: Rng + ?Sized>(code: u64, cfg: &ChainConfig, rng: &mut R) -> u64 {
    let pos = sample_positions(rng, cfg.n, cfg.t);
    let mask = pos.iter().fold(0u64, |m, i| m | (3 << (2 * i)));
    if code & mask == 0 {
        return code;
    }
    let tuple = rng.random_range(1..1u64 << (2 * cfg.t));
    let mut out = code & !mask;
    for (j, i) in pos.iter().enumerate() {
        out |= ((tuple >> (2 * j)) & 3) << (2 * i);
    }
    out
}

pub fn chain_step<R: Rng + ?Sized>(state: &[u8], cfg: &ChainConfig, rng: &mut R) -> Result<Vec<u8>> {
    check_symbol(cfg, state)?;
    Ok(decode(cfg.n, step_code(encode(state), cfg, rng)))
}

/// Weight-`w` representative `X^w I^{n-w}`. By the symmetries of the chain,
/// every start of weight `w` has the same TV curve.
pub fn weight_class_start(n: usize, w: usize) -> Result<Vec<u8>> {
    if w == 0 || w > n {
        return Err(invalid(format!("weight {w} outside 1..={n}")));
    }
    Ok((0..n).map(|i| u8::from(i < w)).collect())
}

pub fn start_label(s: &[u8]) -> String {
    format!("w{}", s.iter().filter(|&&l| l != 0).count())
}

/// Row-stochastic transition matrix in CSR form; state `c` sits at index `c - 1`.
#[derive(Clone, Debug)]
pub struct Transition {
    pub cfg: ChainConfig,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

fn subsets(n: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn rec(start: usize, n: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, t, cur, out);
            cur.pop();
        }
    }
    rec(0, n, t, &mut cur, &mut out);
    out
}

pub fn exact_transition(cfg: &ChainConfig) -> Result<Transition> {
    if cfg.n > MAX_EXACT_N {
        return Err(Error::TooLarge(format!("exact chain needs n <= {MAX_EXACT_N}")));
    }
    let subs = subsets(cfg.n, cfg.t);
    let w_sub = 1.0 / subs.len() as f64;
    let tuples = (1u64 << (2 * cfg.t)) - 1;
    let w_tuple = w_sub / tuples as f64;
    let rows: Vec<Vec<(usize, f64)>> = (1..=cfg.states() as u64)
        .into_par_iter()
        .map(|code| {
            let mut row: Vec<(usize, f64)> = Vec::new();
            for pos in &subs {
                let mask = pos.iter().fold(0u64, |m, i| m | (3 << (2 * i)));
                if code & mask == 0 {
                    row.push((code as usize - 1, w_sub));
                    continue;
                }
                for u in 1..=tuples {
                    let mut next = code & !mask;
                    for (j, i) in pos.iter().enumerate() {
                        next |= ((u >> (2 * j)) & 3) << (2 * i);
                    }
                    row.push((next as usize - 1, w_tuple));
                }
            }
            row.sort_unstable_by_key(|e| e.0);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (c, v) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == c => last.1 += v,
                    _ => merged.push((c, v)),
                }
            }
            merged
        })
        .collect();
    let mut row_ptr = Vec::with_capacity(rows.len() + 1);
    let (mut cols, mut vals) = (Vec::new(), Vec::new());
    row_ptr.push(0);
    for row in rows {
        for (c, v) in row {
            cols.push(c);
            vals.push(v);
        }
        row_ptr.push(cols.len());
    }
    Ok(Transition { cfg: *cfg, row_ptr, cols, vals })
}

impl Transition {
    pub fn states(&self) -> usize {
        self.row_ptr.len() - 1
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    /// `mu Q` for a row vector `mu`.
    pub fn push(&self, mu: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; mu.len()];
        for (i, &m) in mu.iter().enumerate() {
            if m == 0.0 {
                continue;
            }
            for (j, v) in self.row(i) {
                out[j] += m * v;
            }
        }
        out
    }
}

/// A law over the `4^n - 1` nonzero symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ChainDist {
    Exact {
        n: usize,
        probs: Vec<f64>,
    },
    /// Sorted packed codes with their counts.
    Empirical {
        n: usize,
        counts: Vec<(u64, u64)>,
        samples: u64,
    },
}

impl ChainDist {
    pub fn point(n: usize, s: &[u8]) -> Self {
        let mut probs = vec![0.0; (1 << (2 * n)) - 1];
        probs[encode(s) as usize - 1] = 1.0;
        ChainDist::Exact { n, probs }
    }

    pub fn uniform(n: usize) -> Self {
        let k = (1usize << (2 * n)) - 1;
        ChainDist::Exact { n, probs: vec![1.0 / k as f64; k] }
    }

    pub fn from_codes(n: usize, codes: &[u64]) -> Self {
        let mut sorted = codes.to_vec();
        sorted.sort_unstable();
        let mut counts: Vec<(u64, u64)> = Vec::new();
        for c in sorted {
            match counts.last_mut() {
                Some(last) if last.0 == c => last.1 += 1,
                _ => counts.push((c, 1)),
            }
        }
        ChainDist::Empirical { n, counts, samples: codes.len() as u64 }
    }

    pub fn tv_to_uniform(&self) -> f64 {
        match self {
            ChainDist::Exact { probs, .. } => {
                let u = 1.0 / probs.len() as f64;
                0.5 * probs.iter().map(|p| (p - u).abs()).sum::<f64>()
            }
            ChainDist::Empirical { n, counts, samples } => plugin_tv(*n, counts.iter().map(|c| c.1), *samples),
        }
    }
}

/// Plug-in TV to uniform from the counts of the occupied cells.
fn plugin_tv(n: usize, occupied: impl Iterator<Item = u64>, total: u64) -> f64 {
    let k = ((1u64 << (2 * n)) - 1) as f64;
    let u = 1.0 / k;
    let (mut s, mut occ) = (0.0, 0usize);
    for c in occupied {
        s += (c as f64 / total as f64 - u).abs();
        occ += 1;
    }
    0.5 * (s + (k - occ as f64) * u)
}

/// TV to uniform after `0..=steps` steps from `start`.
pub fn exact_tv_curve(q: &Transition, start: &[u8], steps: usize) -> Result<Vec<f64>> {
    check_symbol(&q.cfg, start)?;
    let mut mu = match ChainDist::point(q.cfg.n, start) {
        ChainDist::Exact { probs, .. } => probs,
        ChainDist::Empirical { .. } => unreachable!(),
    };
    let u = ChainDist::uniform(q.cfg.n);
    let ChainDist::Exact { probs: uni, .. } = &u else { unreachable!() };
    let mut out = Vec::with_capacity(steps + 1);
    out.push(tv_exact(&mu, uni)?);
    for _ in 0..steps {
        mu = q.push(&mu);
        out.push(0.5 * mu.iter().zip(uni).map(|(a, b)| (a - b).abs()).sum::<f64>());
    }
    Ok(out)
}

/// First step with TV at most `eps`, stepping up to `max_steps`.
pub fn exact_hitting_time(q: &Transition, start: &[u8], eps: f64, max_steps: usize) -> Result<Option<usize>> {
    check_symbol(&q.cfg, start)?;
    let mut mu = match ChainDist::point(q.cfg.n, start) {
        ChainDist::Exact { probs, .. } => probs,
        ChainDist::Empirical { .. } => unreachable!(),
    };
    let u = 1.0 / mu.len() as f64;
    let tv = |mu: &[f64]| 0.5 * mu.iter().map(|p| (p - u).abs()).sum::<f64>();
    for d in 0..=max_steps {
        if tv(&mu) <= eps {
            return Ok(Some(d));
        }
        mu = q.push(&mu);
    }
    Ok(None)
}

/// One point of a Monte Carlo TV curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TvEstimate {
    pub tv: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarlo {
    pub trajectories: usize,
    pub bootstrap: usize,
    /// Two-sided level of the basic bootstrap interval.
    pub alpha: f64,
    pub seed: u64,
}

impl Default for MonteCarlo {
    fn default() -> Self {
        MonteCarlo { trajectories: 20_000, bootstrap: 200, alpha: 0.05, seed: 0 }
    }
}

fn bootstrap_tv(n: usize, codes: &[u64], mc: &MonteCarlo, step: usize) -> TvEstimate {
    let tv = ChainDist::from_codes(n, codes).tv_to_uniform();
    if mc.bootstrap == 0 {
        return TvEstimate { tv, ci_low: tv, ci_high: tv };
    }
    let mut reps: Vec<f64> = (0..mc.bootstrap)
        .into_par_iter()
        .map(|b| {
            let mut rng = trial_rng(mc.seed ^ 0x9e37_79b9_7f4a_7c15, (step * mc.bootstrap + b) as u64);
            let draw: Vec<u64> = (0..codes.len()).map(|_| codes[rng.random_range(0..codes.len())]).collect();
            ChainDist::from_codes(n, &draw).tv_to_uniform()
        })
        .collect();
    reps.sort_by(f64::total_cmp);
    let quant = |q: f64| reps[((q * (reps.len() - 1) as f64).round() as usize).min(reps.len() - 1)];
    let (lo, hi) = (quant(mc.alpha / 2.0), quant(1.0 - mc.alpha / 2.0));
    TvEstimate { tv, ci_low: (2.0 * tv - hi).clamp(0.0, 1.0), ci_high: (2.0 * tv - lo).clamp(0.0, 1.0) }
}

/// Plug-in TV with a basic bootstrap band after `0..=steps` steps, from
/// independent trajectories seeded per index.
pub fn mc_tv_curve(cfg: &ChainConfig, start: &[u8], steps: usize, mc: &MonteCarlo) -> Result<Vec<TvEstimate>> {
    check_symbol(cfg, start)?;
    if cfg.n > MAX_MC_N {
        return Err(Error::TooLarge(format!("Monte Carlo histograms need n <= {MAX_MC_N}")));
    }
    if mc.trajectories == 0 {
        return Err(invalid("need at least one trajectory"));
    }
    let mut rngs: Vec<_> = (0..mc.trajectories).map(|i| trial_rng(mc.seed, i as u64)).collect();
    let mut codes = vec![encode(start); mc.trajectories];
    let mut out = Vec::with_capacity(steps + 1);
    out.push(bootstrap_tv(cfg.n, &codes, mc, 0));
    for d in 1..=steps {
        codes.par_iter_mut().zip(rngs.par_iter_mut()).for_each(|(c, r)| *c = step_code(*c, cfg, r));
        out.push(bootstrap_tv(cfg.n, &codes, mc, d));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum Method {
    Exact,
    MonteCarlo(MonteCarlo),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingTimes {
    pub eps: f64,
    /// Hitting time per start; `None` if not reached within the step cap.
    pub per_start: Vec<Option<usize>>,
    /// Optimistic time: best start.
    pub tau_lower: Option<usize>,
    /// Pessimistic time: worst start.
    pub tau_upper: Option<usize>,
}

pub fn mixing_times(
    cfg: &ChainConfig,
    eps: f64,
    starts: &[Vec<u8>],
    method: &Method,
    max_steps: usize,
) -> Result<MixingTimes> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps must lie in (0, 1)"));
    }
    if starts.is_empty() {
        return Err(invalid("need at least one start"));
    }
    let per_start: Vec<Option<usize>> = match method {
        Method::Exact => {
            let q = exact_transition(cfg)?;
            starts.iter().map(|s| exact_hitting_time(&q, s, eps, max_steps)).collect::<Result<_>>()?
        }
        Method::MonteCarlo(mc) => starts
            .iter()
            .map(|s| Ok(mc_tv_curve(cfg, s, max_steps, mc)?.iter().position(|e| e.tv <= eps)))
            .collect::<Result<_>>()?,
    };
    let tau_lower = per_start.iter().copied().flatten().min();
    let tau_upper =
        if per_start.iter().all(Option::is_some) { per_start.iter().copied().flatten().max() } else { None };
    Ok(MixingTimes { eps, per_start, tau_lower, tau_upper })
}

/// One start per weight class `1..=n`, which covers every start up to symmetry.
pub fn all_weight_starts(n: usize) -> Vec<Vec<u8>> {
    (1..=n).map(|w| weight_class_start(n, w).expect("weight in range")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScramblingGap {
    pub eps: f64,
    /// Step at which the best start first reaches `eps`.
    pub tau_lower: usize,
    /// Worst start's TV at that step, floored at `eps`.
    pub eta: f64,
    /// Hitting time and TV at `tau_lower` per weight class.
    pub per_weight: Vec<(usize, f64)>,
}

pub fn scrambling_gap(cfg: &ChainConfig, eps: f64, max_steps: usize) -> Result<ScramblingGap> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps must lie in (0, 1)"));
    }
    let q = exact_transition(cfg)?;
    let starts = all_weight_starts(cfg.n);
    let mut mus: Vec<Vec<f64>> = starts
        .iter()
        .map(|s| match ChainDist::point(cfg.n, s) {
            ChainDist::Exact { probs, .. } => probs,
            ChainDist::Empirical { .. } => unreachable!(),
        })
        .collect();
    let u = 1.0 / q.states() as f64;
    let tv = |mu: &[f64]| 0.5 * mu.iter().map(|p| (p - u).abs()).sum::<f64>();
    let mut hits: Vec<Option<usize>> = vec![None; starts.len()];
    let mut at_lower: Option<(usize, Vec<f64>)> = None;
    for d in 0..=max_steps {
        let tvs: Vec<f64> = mus.iter().map(|m| tv(m)).collect();
        for (h, &v) in hits.iter_mut().zip(&tvs) {
            if h.is_none() && v <= eps {
                *h = Some(d);
            }
        }
        if at_lower.is_none() && hits.iter().any(Option::is_some) {
            at_lower = Some((d, tvs));
        }
        if hits.iter().all(Option::is_some) || d == max_steps {
            break;
        }
        mus = mus.par_iter().map(|m| q.push(m)).collect();
    }
    let (tau_lower, tvs) =
        at_lower.ok_or_else(|| Error::Infeasible(format!("no start reached {eps} within {max_steps} steps")))?;
    let per_weight: Vec<(usize, f64)> = hits.iter().zip(&tvs).map(|(h, &v)| (h.unwrap_or(usize::MAX), v)).collect();
    let eta = tvs.iter().copied().fold(eps, f64::max);
    Ok(ScramblingGap { eps, tau_lower, eta, per_weight })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouponBound {
    pub n: usize,
    pub t: usize,
    pub eps: f64,
    /// `(n/t - 1) ln(1/eps)`: fewer draws leave a fixed position untouched
    /// with probability above `eps`.
    pub threshold: f64,
    /// `(1 - t/n)^m` for `m = 0..=max_draws`.
    pub miss_probability: Vec<f64>,
}

pub fn coupon_lower(n: usize, t: usize, eps: f64, max_draws: usize) -> Result<CouponBound> {
    if t == 0 || n <= t {
        return Err(invalid(format!("need 0 < t < n, got n = {n}, t = {t}")));
    }
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(invalid("eps must lie in (0, 1]"));
    }
    let threshold = (n as f64 / t as f64 - 1.0) * (1.0 / eps).ln();
    let base = 1.0 - t as f64 / n as f64;
    let miss_probability = (0..=max_draws).map(|m| base.powi(m as i32)).collect();
    Ok(CouponBound { n, t, eps, threshold, miss_probability })
}

/// Fraction of runs in which position 0 is never among `m` random `t`-subsets.
pub fn simulate_coupon_miss(n: usize, t: usize, m: usize, trials: u64, seed: u64) -> Result<f64> {
    if t == 0 || t > n || trials == 0 {
        return Err(invalid("need 0 < t <= n and at least one trial"));
    }
    let misses: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let hit = (0..m).any(|_| sample_positions(&mut rng, n, t).iter().any(|p| p == 0));
            u64::from(!hit)
        })
        .sum();
    Ok(misses as f64 / trials as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NLogNFit {
    /// Ordinary least squares `tau = a x + b` with `x = n ln(n / eps)`.
    pub a: f64,
    pub b: f64,
    pub r_squared: f64,
    /// Same regression forced through the origin.
    pub a_origin: f64,
    /// Centered coefficient of determination of the origin fit.
    pub r_squared_origin: f64,
}

pub fn fit_n_log_n(points: &[(usize, f64)], eps: f64) -> Result<NLogNFit> {
    if points.len() < 3 {
        return Err(invalid("need at least three points"));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| n as f64 * (n as f64 / eps).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let len = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / len, ys.iter().sum::<f64>() / len);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let det = |res: f64| {
        if syy == 0.0 {
            if res < 1e-20 {
                1.0
            } else {
                0.0
            }
        } else {
            1.0 - res / syy
        }
    };
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - a * x - b).powi(2)).sum();
    let a_origin = xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>() / xs.iter().map(|x| x * x).sum::<f64>();
    let ss_origin: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - a_origin * x).powi(2)).sum();
    Ok(NLogNFit { a, b, r_squared: det(ss_res), a_origin, r_squared_origin: det(ss_origin) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixRow {
    pub step: usize,
    pub start_class: String,
    pub tv: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

/// Curves for every weight class, exact when `method` is exact.
pub fn mix_rows(cfg: &ChainConfig, steps: usize, method: &Method) -> Result<Vec<MixRow>> {
    let starts = all_weight_starts(cfg.n);
    let mut rows = Vec::new();
    match method {
        Method::Exact => {
            let q = exact_transition(cfg)?;
            for s in &starts {
                for (step, tv) in exact_tv_curve(&q, s, steps)?.into_iter().enumerate() {
                    rows.push(MixRow { step, start_class: start_label(s), tv, ci_low: tv, ci_high: tv });
                }
            }
        }
        Method::MonteCarlo(mc) => {
            for s in &starts {
                for (step, e) in mc_tv_curve(cfg, s, steps, mc)?.into_iter().enumerate() {
                    rows.push(MixRow {
                        step,
                        start_class: start_label(s),
                        tv: e.tv,
                        ci_low: e.ci_low,
                        ci_high: e.ci_high,
                    });
                }
            }
        }
    }
    Ok(rows)
}

pub fn write_csv<W: Write>(rows: &[MixRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "step,start_class,tv,ci_low,ci_high")?;
    for r in rows {
        writeln!(w, "{},{},{:.12},{:.12},{:.12}", r.step, r.start_class, r.tv, r.ci_low, r.ci_high)?;
    }
    Ok(())
}
