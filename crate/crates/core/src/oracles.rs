//! Exact exponential-time solvers: maximum likelihood for LPN / SympLPN / LSN,
//! and minimum-weight syndrome decoding.
//!
//! All oracles are deterministic. Ties resolve to the lexicographically
//! smallest candidate (bit 0 compared first, 0 < 1); likelihood-ratio tests
//! resolve ties to "unstructured".

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{BitMat, BitVec};
use crate::noise::{depol_log_prob, DepolParam};
use crate::problems::{LpnInstance, LsnClassicalInstance, LsnPublic, LsnQuantumInstance, SympLpnInstance};
use crate::symplectic::{IsotropicSet, PauliVec};

pub const MAX_LPN_K: usize = 20;
pub const MAX_LSN_BITS: usize = 22;
pub const MAX_QSDP_N: usize = 8;

/// Relative slack below which two log-likelihoods count as tied.
const TIE_EPS: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub oracle: String,
    /// Secret as a bit string, or "structured" / "unstructured", or a Pauli.
    pub answer: serde_json::Value,
    pub log_likelihoods: Vec<f64>,
    pub runtime_ms: f64,
    pub params: serde_json::Value,
}

fn log_sum_exp(xs: impl IntoIterator<Item = f64>) -> f64 {
    let xs: Vec<f64> = xs.into_iter().collect();
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn ln_or_neg_inf(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// Candidate index `u` in lexicographic order: bit `j` of the candidate is
/// bit `k - 1 - j` of `u`.
fn lex_candidate(k: usize, u: u64) -> BitVec {
    let mut x = BitVec::zeros(k);
    for j in 0..k {
        if (u >> (k - 1 - j)) & 1 == 1 {
            x.set(j, true);
        }
    }
    x
}

fn strictly_better(a: f64, b: f64) -> bool {
    if b == f64::NEG_INFINITY {
        return a > b;
    }
    a > b && (a - b) > TIE_EPS * b.abs().max(1.0)
}

/// Argmax of per-candidate scores in lexicographic order, first wins ties.
fn lex_argmax(k: usize, scores: &[f64]) -> BitVec {
    let mut best = 0usize;
    for u in 1..scores.len() {
        if strictly_better(scores[u], scores[best]) {
            best = u;
        }
    }
    lex_candidate(k, best as u64)
}

/// Per-candidate log-likelihoods of an LPN instance.
pub fn lpn_log_likelihoods(inst: &LpnInstance) -> Result<Vec<f64>> {
    let (k, n) = (inst.params.k, inst.params.n);
    if k > MAX_LPN_K {
        return Err(Error::TooLarge(format!("2^{k} candidates exceeds 2^{MAX_LPN_K}")));
    }
    let p = inst.params.p.value();
    let (lp, lq) = (ln_or_neg_inf(p), ln_or_neg_inf(1.0 - p));
    let cols = inst.public.a.col_vecs();
    let y = &inst.public.y;
    Ok((0..1u64 << k)
        .into_par_iter()
        .map(|u| {
            let x = lex_candidate(k, u);
            let mut r = y.clone();
            for j in x.iter_ones() {
                r.xor_assign(&cols[j]);
            }
            let w = r.count_ones();
            let a = if w == 0 { 0.0 } else { w as f64 * lp };
            let b = if w == n { 0.0 } else { (n - w) as f64 * lq };
            a + b
        })
        .collect())
}

pub fn lpn_ml_search(inst: &LpnInstance) -> Result<BitVec> {
    Ok(lex_argmax(inst.params.k, &lpn_log_likelihoods(inst)?))
}

/// Exact likelihood-ratio test; `true` means structured.
pub fn lpn_lr_decision(inst: &LpnInstance) -> Result<bool> {
    let (k, n) = (inst.params.k, inst.params.n);
    let ll = lpn_log_likelihoods(inst)?;
    let s = log_sum_exp(ll) - k as f64 * std::f64::consts::LN_2;
    let u = -(n as f64) * std::f64::consts::LN_2;
    Ok(strictly_better(s, u))
}

/// Packs a 2n-bit vector into a u64.
fn pack(v: &BitVec) -> u64 {
    debug_assert!(v.len() <= 64);
    v.as_u64()
}

#[inline]
fn packed_weight(v: u64, n: usize) -> usize {
    let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    ((v & mask) | (v >> n)).count_ones() as usize
}

/// `ln sum_r Pr[Depol(p)^n = base + sum_j r_j cols_j]` over all `r`.
fn coset_log_likelihood(base: u64, cols: &[u64], n: usize, lp: &[f64]) -> f64 {
    let mut hist = vec![0u64; n + 1];
    let mut v = base;
    hist[packed_weight(v, n)] += 1;
    for step in 1u64..(1u64 << cols.len()) {
        v ^= cols[step.trailing_zeros() as usize];
        hist[packed_weight(v, n)] += 1;
    }
    log_sum_exp(hist.iter().enumerate().filter(|(_, &c)| c > 0).map(|(w, &c)| (c as f64).ln() + lp[w]))
}

fn weight_table(n: usize, p: DepolParam) -> Vec<f64> {
    (0..=n).map(|w| depol_log_prob(n, w, p)).collect()
}

/// `ln Pr[data | secret y]` for every candidate y, in lexicographic order,
/// marginalizing the junk of each sample.
pub fn lsn_log_likelihoods(inst: &LsnClassicalInstance) -> Result<Vec<f64>> {
    let (k, n) = (inst.params.k, inst.params.n);
    if n + k > MAX_LSN_BITS {
        return Err(Error::TooLarge(format!("n + k = {} exceeds {MAX_LSN_BITS}", n + k)));
    }
    let lp = weight_table(n, inst.params.p);
    let samples: Vec<(Vec<u64>, Vec<u64>, u64)> = inst
        .public
        .samples
        .iter()
        .map(|s| {
            let a = s.a.columns().iter().map(|c| pack(c.bits())).collect();
            let b = s.b.columns().iter().map(|c| pack(c.bits())).collect();
            (a, b, pack(&s.z))
        })
        .collect();
    let norm = n as f64 * std::f64::consts::LN_2;
    Ok((0..1u64 << k)
        .into_par_iter()
        .map(|u| {
            let y = lex_candidate(k, u);
            samples
                .iter()
                .map(|(a, b, z)| {
                    let mut base = *z;
                    for j in y.iter_ones() {
                        base ^= b[j];
                    }
                    coset_log_likelihood(base, a, n, &lp) - norm
                })
                .sum()
        })
        .collect())
}

pub fn lsn_ml_search(inst: &LsnClassicalInstance) -> Result<BitVec> {
    Ok(lex_argmax(inst.params.k, &lsn_log_likelihoods(inst)?))
}

/// `(ln Pr[data | structured], ln Pr[data | uniform])`.
pub fn lsn_decision_log_likelihoods(inst: &LsnClassicalInstance) -> Result<(f64, f64)> {
    let (k, n) = (inst.params.k, inst.params.n);
    let m = inst.public.samples.len();
    let ll = lsn_log_likelihoods(inst)?;
    let s = log_sum_exp(ll) - k as f64 * std::f64::consts::LN_2;
    let u = -((2 * n * m) as f64) * std::f64::consts::LN_2;
    Ok((s, u))
}

pub fn lsn_lr_decision(inst: &LsnClassicalInstance) -> Result<bool> {
    let (s, u) = lsn_decision_log_likelihoods(inst)?;
    Ok(strictly_better(s, u))
}

/// Likelihood-ratio test on quantum samples. Measuring in the basis of each
/// sample's Clifford loses nothing: both hypotheses are diagonal there.
pub fn lsn_quantum_lr_decision<R: rand::Rng + ?Sized>(inst: &LsnQuantumInstance, rng: &mut R) -> Result<bool> {
    lsn_lr_decision(&measured_classical(inst, rng)?)
}

/// ML search on quantum samples, via the same measurement.
pub fn lsn_quantum_ml_search<R: rand::Rng + ?Sized>(inst: &LsnQuantumInstance, rng: &mut R) -> Result<BitVec> {
    lsn_ml_search(&measured_classical(inst, rng)?)
}

fn measured_classical<R: rand::Rng + ?Sized>(inst: &LsnQuantumInstance, rng: &mut R) -> Result<LsnClassicalInstance> {
    let k = inst.params.k;
    let samples = inst.public.samples.iter().map(|s| s.measure_code_basis(k, rng)).collect::<Result<Vec<_>>>()?;
    let mut params = inst.params.clone();
    params.m = samples.len();
    Ok(LsnClassicalInstance { params, public: LsnPublic { samples }, hidden: None })
}

pub fn symplpn_decision_log_likelihoods(inst: &SympLpnInstance) -> Result<(f64, f64)> {
    let n = inst.params.n;
    if n > MAX_LSN_BITS {
        return Err(Error::TooLarge(format!("n = {n} exceeds {MAX_LSN_BITS}")));
    }
    let lp = weight_table(n, inst.params.p);
    let cols: Vec<u64> = inst.public.a.columns().iter().map(|c| pack(c.bits())).collect();
    let s = coset_log_likelihood(pack(&inst.public.z), &cols, n, &lp) - n as f64 * std::f64::consts::LN_2;
    let u = -((2 * n) as f64) * std::f64::consts::LN_2;
    Ok((s, u))
}

pub fn symplpn_lr_decision(inst: &SympLpnInstance) -> Result<bool> {
    let (s, u) = symplpn_decision_log_likelihoods(inst)?;
    Ok(strictly_better(s, u))
}

pub fn symplpn_ml_search(inst: &SympLpnInstance) -> Result<BitVec> {
    let n = inst.params.n;
    if n > MAX_LPN_K {
        return Err(Error::TooLarge(format!("2^{n} candidates exceeds 2^{MAX_LPN_K}")));
    }
    let lp = weight_table(n, inst.params.p);
    let cols: Vec<u64> = inst.public.a.columns().iter().map(|c| pack(c.bits())).collect();
    let z = pack(&inst.public.z);
    let scores: Vec<f64> = (0..1u64 << n)
        .into_par_iter()
        .map(|u| {
            let x = lex_candidate(n, u);
            let mut v = z;
            for j in x.iter_ones() {
                v ^= cols[j];
            }
            lp[packed_weight(v, n)]
        })
        .collect();
    Ok(lex_argmax(n, &scores))
}

/// Per-qubit syndrome masks of X and Z on each qubit.
struct SyndromeTable {
    n: usize,
    sx: Vec<u64>,
    sz: Vec<u64>,
}

impl SyndromeTable {
    fn new(h: &IsotropicSet) -> Result<Self> {
        let n = h.n();
        if h.len() > 64 {
            return Err(Error::TooLarge("more than 64 generators".into()));
        }
        let mut sx = vec![0u64; n];
        let mut sz = vec![0u64; n];
        for (j, g) in h.columns().iter().enumerate() {
            for q in 0..n {
                if g.z(q) {
                    sx[q] |= 1 << j;
                }
                if g.x(q) {
                    sz[q] |= 1 << j;
                }
            }
        }
        Ok(SyndromeTable { n, sx, sz })
    }

    fn letter_syndrome(&self, q: usize, letter: u8) -> u64 {
        match letter {
            1 => self.sx[q],
            2 => self.sz[q],
            _ => self.sx[q] ^ self.sz[q],
        }
    }
}

/// Calls `f(x_mask, z_mask)` on every Pauli of weight exactly `w` (supports in
/// combination order, letters X, Z, Y); stops early when `f` returns true.
fn for_each_weight(t: &SyndromeTable, w: usize, f: &mut dyn FnMut(u64, u64, u64) -> bool) -> bool {
    fn rec(
        t: &SyndromeTable,
        start: usize,
        left: usize,
        x: u64,
        z: u64,
        s: u64,
        f: &mut dyn FnMut(u64, u64, u64) -> bool,
    ) -> bool {
        if left == 0 {
            return f(x, z, s);
        }
        for q in start..=t.n - left {
            for letter in 1u8..=3 {
                let bx = if letter & 1 == 1 { 1u64 << q } else { 0 };
                let bz = if letter & 2 == 2 { 1u64 << q } else { 0 };
                if rec(t, q + 1, left - 1, x | bx, z | bz, s ^ t.letter_syndrome(q, letter), f) {
                    return true;
                }
            }
        }
        false
    }
    if w > t.n {
        return false;
    }
    rec(t, 0, w, 0, 0, 0, f)
}

fn unpack_pauli(n: usize, x: u64, z: u64) -> PauliVec {
    PauliVec::from_xz(&BitVec::from_u64(n, x), &BitVec::from_u64(n, z)).expect("equal lengths")
}

fn check_qsdp_size(h: &IsotropicSet, v: &BitVec) -> Result<()> {
    if h.n() > MAX_QSDP_N {
        return Err(Error::TooLarge(format!("n = {} exceeds {MAX_QSDP_N}", h.n())));
    }
    if v.len() != h.len() {
        return Err(Error::Dimension("syndrome length differs from generator count".into()));
    }
    Ok(())
}

/// Minimum-weight Pauli with syndrome `v`, if one of weight at most `w` exists.
pub fn qsdp_min_weight(h: &IsotropicSet, v: &BitVec, w: usize) -> Result<Option<PauliVec>> {
    check_qsdp_size(h, v)?;
    let t = SyndromeTable::new(h)?;
    let target = v.as_u64();
    for wt in 0..=w.min(h.n()) {
        let mut best: Option<PauliVec> = None;
        for_each_weight(&t, wt, &mut |x, z, s| {
            if s == target {
                let p = unpack_pauli(t.n, x, z);
                if best.as_ref().is_none_or(|b| p < *b) {
                    best = Some(p);
                }
            }
            false
        });
        if best.is_some() {
            return Ok(best);
        }
    }
    Ok(None)
}

/// Whether some Pauli of weight at most `w` has syndrome `v`.
pub fn qsdp_exists(h: &IsotropicSet, v: &BitVec, w: usize) -> Result<bool> {
    check_qsdp_size(h, v)?;
    let t = SyndromeTable::new(h)?;
    let target = v.as_u64();
    Ok((0..=w.min(h.n())).any(|wt| for_each_weight(&t, wt, &mut |_, _, s| s == target)))
}

/// Smallest weight of a nonzero Pauli commuting with every generator
/// (stabilizers included), searching up to weight `cap`.
pub fn pure_distance(h: &IsotropicSet, cap: usize) -> Result<Option<usize>> {
    if h.n() > MAX_QSDP_N {
        return Err(Error::TooLarge(format!("n = {} exceeds {MAX_QSDP_N}", h.n())));
    }
    let t = SyndromeTable::new(h)?;
    Ok((1..=cap.min(h.n())).find(|&wt| for_each_weight(&t, wt, &mut |_, _, s| s == 0)))
}

/// Smallest weight of a logical operator (normalizer minus stabilizer group).
pub fn code_distance(h: &IsotropicSet, cap: usize) -> Result<Option<usize>> {
    if h.n() > MAX_QSDP_N {
        return Err(Error::TooLarge(format!("n = {} exceeds {MAX_QSDP_N}", h.n())));
    }
    let t = SyndromeTable::new(h)?;
    let stab = h.matrix();
    let n = h.n();
    Ok((1..=cap.min(n)).find(|&wt| {
        for_each_weight(&t, wt, &mut |x, z, s| s == 0 && !stab.col_span_contains(unpack_pauli(n, x, z).bits()))
    }))
}

/// Check matrix (generators as rows) of an isotropic set.
pub fn check_matrix(h: &IsotropicSet) -> BitMat {
    h.check_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::symp_of_pauli;

    pub(crate) fn five_qubit_code() -> IsotropicSet {
        let gens = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"];
        IsotropicSet::new(5, gens.iter().map(|g| symp_of_pauli(g).unwrap()).collect()).unwrap()
    }

    #[test]
    fn five_qubit_code_distances() {
        let h = five_qubit_code();
        assert_eq!(code_distance(&h, 5).unwrap(), Some(3));
        assert_eq!(pure_distance(&h, 5).unwrap(), Some(3));
    }

    #[test]
    fn min_weight_decodes_weight_one() {
        let h = five_qubit_code();
        let v0 = BitVec::zeros(4);
        assert!(qsdp_min_weight(&h, &v0, 1).unwrap().unwrap().is_identity());
        let e = symp_of_pauli("XIIII").unwrap();
        let s = h.syndrome(&e);
        let found = qsdp_min_weight(&h, &s, 1).unwrap().unwrap();
        assert_eq!(found, e);
        assert!(qsdp_exists(&h, &s, 1).unwrap());
        assert!(!qsdp_exists(&h, &s, 0).unwrap());
    }

    #[test]
    fn lex_candidates_ordered() {
        let xs: Vec<BitVec> = (0..8).map(|u| lex_candidate(3, u)).collect();
        for w in xs.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn log_sum_exp_handles_infinities() {
        assert_eq!(log_sum_exp([f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert!((log_sum_exp([0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
    }
}
