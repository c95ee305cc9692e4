//! Reductions between the problems as executable transformations.
//!
//! Randomized reductions return a trace holding every internal draw. The
//! chain reductions can be replayed from input plus trace, bit for bit.
//! Parameters along the LPN to LSN chain are tracked as exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gf2::{BitMat, BitVec};
use crate::noise::{bern_convolve_param, depol_convolve_param, sample_bern, sample_depol, BernParam, DepolParam};
use crate::problems::{
    code_label, random_complement, random_isotropic, sample_lpn, sample_symplpn, LpnInstance, LsnClassicalInstance,
    LsnHidden, LsnParams, LsnPublic, LsnQuantumHidden, LsnQuantumInstance, LsnQuantumPublic, LsnSample, QsdpInstance,
    QsdpParams, QsdpPublic, QuantumSample, SympLpnHidden, SympLpnInstance, SympLpnParams, SympLpnPublic,
};
use crate::stabsim::{controlled_pauli, CliffordDesc, StabState};
use crate::symplectic::{
    extend_to_symplectic, sample_constrained, sample_isotropic_extension, ExtensionConstraints, IsotropicSet, PauliVec,
    SympMat,
};

// ---------------------------------------------------------------------------
// Exact parameters

/// Parses `"3/10"`, `"0.3"` or `"2"` exactly.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| bad())? };
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Ok(if neg { -r } else { r })
}

/// The rational spelled by the shortest decimal that round-trips `x`.
pub fn rational_of_f64(x: f64) -> BigRational {
    parse_rational(&format!("{x}")).expect("finite float prints as a decimal")
}

fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("bounded rational")
}

fn ratio(a: usize, b: usize) -> BigRational {
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

mod ratio_str {
    use super::parse_rational;
    use num_rational::BigRational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// `ell (1 + eps)`, which must be a whole number.
pub fn extension_rows(ell: usize, eps: &BigRational) -> Result<usize> {
    let m = BigRational::from_integer(BigInt::from(ell)) * (BigRational::one() + eps);
    if !m.is_integer() || m < BigRational::zero() {
        return Err(invalid(format!("ell (1 + eps) = {m} is not a whole number")));
    }
    m.to_integer().to_usize().ok_or_else(|| invalid("extension size overflows"))
}

/// Noise parameters along the LPN to SympLPN pipeline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamChain {
    /// Input Bernoulli rate.
    #[serde(with = "ratio_str")]
    pub p: BigRational,
    /// Rate of the padded-and-extended bottom-half noise, `ell (1 + eps)^2 / (2n)`.
    #[serde(with = "ratio_str")]
    pub r: BigRational,
    /// `p + r - 2 p r`.
    #[serde(with = "ratio_str")]
    pub q_natural: BigRational,
    /// Common Bernoulli rate of both halves after top-up, at least `q_natural`.
    #[serde(with = "ratio_str")]
    pub q: BigRational,
    #[serde(with = "ratio_str")]
    pub top_up_top: BigRational,
    #[serde(with = "ratio_str")]
    pub top_up_bottom: BigRational,
    /// Depolarizing rate after the shared Bernoulli vector: `3 q (1 - q)`.
    #[serde(with = "ratio_str")]
    pub depol_shared: BigRational,
    #[serde(with = "ratio_str")]
    pub top_up_final: BigRational,
    /// Output depolarizing rate `3 q`.
    #[serde(with = "ratio_str")]
    pub p_out: BigRational,
}

fn bern_top_up(p: &BigRational, q: &BigRational) -> BigRational {
    let two = BigRational::from_integer(BigInt::from(2));
    (q - p) / (BigRational::one() - two * p)
}

fn depol_top_up(p: &BigRational, q: &BigRational) -> BigRational {
    let c = BigRational::new(BigInt::from(4), BigInt::from(3));
    (q - p) / (BigRational::one() - c * p)
}

/// Bookkeeping for an LPN input of rate `p`, secret length `ell`, `m_ext`
/// padded rows and output size `n`, optionally raising `q` to `q_target`.
pub fn lpn_to_symplpn_params(
    p: &BigRational,
    ell: usize,
    m_ext: usize,
    n: usize,
    q_target: Option<&BigRational>,
) -> Result<ParamChain> {
    let zero = BigRational::zero();
    let half = ratio(1, 2);
    if *p < zero || *p >= half {
        return Err(invalid(format!("Bernoulli rate {p} outside [0, 1/2)")));
    }
    let r = if ell == 0 { zero.clone() } else { ratio(m_ext * m_ext, 2 * n * ell) };
    let two = BigRational::from_integer(BigInt::from(2));
    let q_natural = p + &r - &two * p * &r;
    let q = match q_target {
        Some(t) if *t < q_natural => {
            return Err(invalid(format!("target rate {t} below the pipeline's natural rate {q_natural}")))
        }
        Some(t) => t.clone(),
        None => q_natural.clone(),
    };
    let three = BigRational::from_integer(BigInt::from(3));
    let p_out = &three * &q;
    if p_out > ratio(3, 4) {
        return Err(invalid(format!("output depolarizing rate {p_out} exceeds 3/4")));
    }
    if q_natural >= half {
        return Err(invalid("bottom-half rate reached 1/2"));
    }
    let depol_shared = &three * &q * (BigRational::one() - &q);
    Ok(ParamChain {
        top_up_top: bern_top_up(p, &q),
        top_up_bottom: bern_top_up(&q_natural, &q),
        top_up_final: depol_top_up(&depol_shared, &p_out),
        p: p.clone(),
        r,
        q_natural,
        q,
        depol_shared,
        p_out,
    })
}

/// Parameters of the composed LPN to LSN chain targeting LSN rate `p` on `n` qubits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardnessChain {
    pub n: usize,
    #[serde(with = "ratio_str")]
    pub p: BigRational,
    #[serde(with = "ratio_str")]
    pub eps: BigRational,
    /// LPN rate `p / 6`.
    #[serde(with = "ratio_str")]
    pub p_lpn: BigRational,
    /// LPN secret length `floor(n p / 6)`.
    pub ell: usize,
    pub m_ext: usize,
    /// `2n - ell (1 + eps)`.
    pub lpn_rows: usize,
    /// `(1 + (1 + 3 eps) / 2) p / 6`.
    #[serde(with = "ratio_str")]
    pub q: BigRational,
    #[serde(with = "ratio_str")]
    pub p_final: BigRational,
}

pub fn hardness_chain(n: usize, p: &BigRational, eps: &BigRational) -> Result<HardnessChain> {
    let six = BigRational::from_integer(BigInt::from(6));
    let p_lpn = p / &six;
    let ell = (&p_lpn * BigRational::from_integer(BigInt::from(n)))
        .floor()
        .to_integer()
        .to_usize()
        .ok_or_else(|| invalid("negative rate"))?;
    let m_ext = extension_rows(ell, eps)?;
    if m_ext > n {
        return Err(invalid("ell (1 + eps) exceeds n"));
    }
    let one = BigRational::one();
    let three = BigRational::from_integer(BigInt::from(3));
    let q = (&one + (&one + &three * eps) / BigRational::from_integer(BigInt::from(2))) * &p_lpn;
    Ok(HardnessChain {
        n,
        p: p.clone(),
        eps: eps.clone(),
        p_final: &three * &q,
        p_lpn,
        ell,
        m_ext,
        lpn_rows: 2 * n - m_ext,
        q,
    })
}

// ---------------------------------------------------------------------------
// Noise and secret transforms

/// Instances whose noise can be raised by convolving in extra noise.
pub trait IncreaseNoise: Sized {
    fn increase_noise<R: Rng + ?Sized>(&self, target: f64, rng: &mut R) -> Result<Self>;
}

impl IncreaseNoise for LpnInstance {
    fn increase_noise<R: Rng + ?Sized>(&self, target: f64, rng: &mut R) -> Result<Self> {
        let target = BernParam::new(target)?;
        let u = bern_convolve_param(self.params.p, target)?;
        let f = sample_bern(self.params.n, u, rng);
        let mut out = self.clone();
        out.params.p = target;
        out.public.y.xor_assign(&f);
        if let Some(e) = out.hidden.as_mut().and_then(|h| h.error.as_mut()) {
            e.xor_assign(&f);
        }
        Ok(out)
    }
}

impl IncreaseNoise for SympLpnInstance {
    fn increase_noise<R: Rng + ?Sized>(&self, target: f64, rng: &mut R) -> Result<Self> {
        let target = DepolParam::new(target)?;
        let u = depol_convolve_param(self.params.p, target)?;
        let f = sample_depol(self.params.n, u, rng);
        let mut out = self.clone();
        out.params.p = target;
        out.public.z.xor_assign(f.bits());
        if let Some(e) = out.hidden.as_mut().and_then(|h| h.error.as_mut()) {
            e.mul_assign(&f);
        }
        Ok(out)
    }
}

impl IncreaseNoise for LsnClassicalInstance {
    fn increase_noise<R: Rng + ?Sized>(&self, target: f64, rng: &mut R) -> Result<Self> {
        let target = DepolParam::new(target)?;
        let u = depol_convolve_param(self.params.p, target)?;
        let mut out = self.clone();
        out.params.p = target;
        let n = self.params.n;
        let extra: Vec<PauliVec> = (0..out.public.samples.len()).map(|_| sample_depol(n, u, rng)).collect();
        for (s, f) in out.public.samples.iter_mut().zip(&extra) {
            s.z.xor_assign(f.bits());
        }
        if let Some(h) = out.hidden.as_mut() {
            for (e, f) in h.errors.iter_mut().zip(&extra) {
                e.mul_assign(f);
            }
        }
        Ok(out)
    }
}

pub fn increase_noise<I: IncreaseNoise, R: Rng + ?Sized>(inst: &I, target: f64, rng: &mut R) -> Result<I> {
    inst.increase_noise(target, rng)
}

/// Adds `B_i y'` to every sample for one uniform `y'`; returns `y'`.
pub fn rerandomize_secret<R: Rng + ?Sized>(inst: &LsnClassicalInstance, rng: &mut R) -> (LsnClassicalInstance, BitVec) {
    let shift = BitVec::random(inst.params.k, rng);
    (shift_secret(inst, &shift), shift)
}

/// Deterministic core of [`rerandomize_secret`].
pub fn shift_secret(inst: &LsnClassicalInstance, shift: &BitVec) -> LsnClassicalInstance {
    let mut out = inst.clone();
    for s in &mut out.public.samples {
        let d = s.b.matrix().mul_vec(shift);
        s.z.xor_assign(&d);
    }
    if let Some(y) = out.hidden.as_mut().and_then(|h| h.secret.as_mut()) {
        y.xor_assign(shift);
    }
    out
}

/// Output of [`symplectic_extension`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymplecticExtension {
    /// `[A; A']`, 2n x ell.
    pub b: BitMat,
    pub s_prime: BitMat,
    pub a_prime: BitMat,
    /// False when the linear system had no solution and `A'` is zero.
    pub feasible: bool,
}

/// Appends `ell (1 + eps)` rows to `a` so that its columns become pairwise
/// symplectically orthogonal.
pub fn symplectic_extension<R: Rng + ?Sized>(
    a: &BitMat,
    n: usize,
    eps: &BigRational,
    rng: &mut R,
) -> Result<SymplecticExtension> {
    let ell = a.cols();
    let m = extension_rows(ell, eps)?;
    if m > n {
        return Err(invalid(format!("ell (1 + eps) = {m} exceeds n = {n}")));
    }
    if a.rows() != 2 * n - m {
        return Err(Error::Dimension(format!("expected {} rows, got {}", 2 * n - m, a.rows())));
    }
    let mut s_prime = BitMat::zeros(ell, ell);
    for i in 0..ell {
        for j in i..ell {
            let b: bool = rng.random();
            s_prime.set(i, j, b);
            s_prime.set(j, i, b);
        }
    }
    let a_prime = complete_rows(a, n, m, &s_prime, rng);
    let feasible = a_prime.is_some();
    let a_prime = a_prime.unwrap_or_else(|| BitMat::zeros(m, ell));
    Ok(SymplecticExtension { b: a.vstack(&a_prime), s_prime, a_prime, feasible })
}

/// Random `A'` with `N1^T N2 + M^T A' = S'`, if one exists.
fn complete_rows<R: Rng + ?Sized>(a: &BitMat, n: usize, m: usize, s_prime: &BitMat, rng: &mut R) -> Option<BitMat> {
    let ell = a.cols();
    let n1 = a.row_range(0, n - m);
    let mm = a.row_range(n - m, n);
    let n2 = a.row_range(n, 2 * n - m);
    let t = s_prime.add(&n1.transpose().mul(&n2));
    let mt = mm.transpose();
    let mut cols = Vec::with_capacity(ell);
    for j in 0..ell {
        cols.push(mt.solve_random(&t.col(j), rng)?);
    }
    Some(BitMat::from_cols(m, &cols))
}

/// Returns `(T, e')`: `T ~ Bin(n, 2p)` with `p = m (1 + delta) / (2n)`, and
/// `e'` zero on the first `n - T` coordinates and uniform on the rest.
pub fn error_extension<R: Rng + ?Sized>(n: usize, m: usize, delta: f64, rng: &mut R) -> Result<(usize, BitVec)> {
    if m > n {
        return Err(invalid(format!("m = {m} exceeds n = {n}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(invalid("delta must lie in (0, 1)"));
    }
    error_extension_at(n, m as f64 * (1.0 + delta) / n as f64, rng)
}

fn error_extension_at<R: Rng + ?Sized>(n: usize, two_p: f64, rng: &mut R) -> Result<(usize, BitVec)> {
    if !(0.0..=1.0).contains(&two_p) {
        return Err(invalid(format!("extension rate {} exceeds 1/2", two_p / 2.0)));
    }
    let t = Binomial::new(n as u64, two_p).map_err(|e| invalid(e.to_string()))?.sample(rng) as usize;
    let mut e = BitVec::zeros(n);
    for i in n - t..n {
        e.set(i, rng.random());
    }
    Ok((t, e))
}

// ---------------------------------------------------------------------------
// LPN to SympLPN

fn permute_half(v: &BitVec, perm: &[usize]) -> BitVec {
    BitVec::from_bools(&perm.iter().map(|&j| v.get(j)).collect::<Vec<_>>())
}

/// `pi + pi` acting on a 2n vector.
fn permute_symp(v: &BitVec, perm: &[usize]) -> BitVec {
    let n = perm.len();
    permute_half(&v.slice(0, n), perm).concat(&permute_half(&v.slice(n, 2 * n), perm))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpnToSympConfig {
    #[serde(with = "ratio_str")]
    pub eps: BigRational,
    /// Exact input rate; defaults to the decimal spelled by the instance's rate.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_ratio")]
    pub p: Option<BigRational>,
    /// Raise both halves to this Bernoulli rate before the shared vector.
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_ratio")]
    pub q: Option<BigRational>,
}

mod opt_ratio {
    use super::parse_rational;
    use num_rational::BigRational;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<BigRational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigRational>, D::Error> {
        Option::<String>::deserialize(d)?.map(|s| parse_rational(&s).map_err(D::Error::custom)).transpose()
    }
}

/// Every draw made by [`lpn_to_symplpn`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpnToSympTrace {
    pub n: usize,
    pub ell: usize,
    pub m_ext: usize,
    pub extension: SymplecticExtension,
    /// Uniform padding appended to `y`.
    pub pad: BitVec,
    /// `out[i] = in[perm[i]]` on each half.
    pub perm: Vec<usize>,
    pub t_ext: usize,
    pub e_ext: BitVec,
    pub g_top: BitVec,
    pub g_bottom: BitVec,
    /// Isotropic completion `L` of `K`.
    pub completion: Vec<PauliVec>,
    /// Fresh secret extension.
    pub w: BitVec,
    /// Shared Bernoulli vector added to both halves.
    pub h: BitVec,
    pub final_noise: PauliVec,
    /// `K` failed to be isotropic of full rank; the output is a fresh
    /// unstructured sample.
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fresh: Option<SympLpnPublic>,
    pub params: ParamChain,
}

fn check_ell(inst: &LpnInstance, eps: &BigRational) -> Result<(usize, usize, usize)> {
    let ell = inst.params.k;
    let m_ext = extension_rows(ell, eps)?;
    let rows = inst.params.n;
    if !(rows + m_ext).is_multiple_of(2) {
        return Err(invalid("rows + ell (1 + eps) must be even"));
    }
    let n = (rows + m_ext) / 2;
    if m_ext > n {
        return Err(invalid("ell (1 + eps) exceeds n"));
    }
    Ok((ell, m_ext, n))
}

fn chain_for(inst: &LpnInstance, cfg: &LpnToSympConfig, ell: usize, m_ext: usize, n: usize) -> Result<ParamChain> {
    let p = cfg.p.clone().unwrap_or_else(|| rational_of_f64(inst.params.p.value()));
    if (to_f64(&p) - inst.params.p.value()).abs() > 1e-12 {
        return Err(invalid("exact rate does not match the instance"));
    }
    lpn_to_symplpn_params(&p, ell, m_ext, n, cfg.q.as_ref())
}

/// LPN with `ell` secret bits and `2n - ell (1 + eps)` rows to SympLPN on `n`
/// qubits with rate `3q`.
pub fn lpn_to_symplpn<R: Rng + ?Sized>(
    inst: &LpnInstance,
    cfg: &LpnToSympConfig,
    rng: &mut R,
) -> Result<(SympLpnInstance, LpnToSympTrace)> {
    let (ell, m_ext, n) = check_ell(inst, &cfg.eps)?;
    let params = chain_for(inst, cfg, ell, m_ext, n)?;
    let extension = symplectic_extension(&inst.public.a, n, &cfg.eps, rng)?;
    let pad = BitVec::random(m_ext, rng);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let (t_ext, e_ext) = error_extension_at(n, 2.0 * to_f64(&params.r), rng)?;
    let g_top = sample_bern(n, BernParam::new(to_f64(&params.top_up_top))?, rng);
    let g_bottom = sample_bern(n, BernParam::new(to_f64(&params.top_up_bottom))?, rng);
    let k_cols: Vec<PauliVec> =
        extension.b.col_vecs().iter().map(|c| PauliVec::from_bits(n, permute_symp(c, &perm))).collect::<Result<_>>()?;
    let degenerate = IsotropicSet::new(n, k_cols.clone()).is_err();
    let p_out = DepolParam::new(to_f64(&params.p_out))?;
    let mut trace = LpnToSympTrace {
        n,
        ell,
        m_ext,
        extension,
        pad,
        perm,
        t_ext,
        e_ext,
        g_top,
        g_bottom,
        completion: Vec::new(),
        w: BitVec::zeros(n - ell),
        h: BitVec::zeros(n),
        final_noise: PauliVec::identity(n),
        degenerate,
        fresh: None,
        params,
    };
    if degenerate {
        trace.fresh = Some(sample_symplpn(n, p_out, false, rng)?.public);
    } else {
        trace.completion = sample_isotropic_extension(n, &k_cols, n - ell, ExtensionConstraints::default(), rng)?;
        trace.w = BitVec::random(n - ell, rng);
        trace.h = sample_bern(n, BernParam::new(to_f64(&trace.params.q))?, rng);
        trace.final_noise = sample_depol(n, DepolParam::new(to_f64(&trace.params.top_up_final))?, rng);
    }
    let out = replay_lpn_to_symplpn(inst, &trace)?;
    Ok((out, trace))
}

/// Rebuilds the output of [`lpn_to_symplpn`] from its input and trace.
pub fn replay_lpn_to_symplpn(inst: &LpnInstance, tr: &LpnToSympTrace) -> Result<SympLpnInstance> {
    let n = tr.n;
    if inst.params.n + tr.m_ext != 2 * n || inst.params.k != tr.ell {
        return Err(Error::Dimension("trace does not match the instance".into()));
    }
    let p = DepolParam::new(to_f64(&tr.params.p_out))?;
    let structured = inst.hidden.as_ref().map(|h| h.structured);
    if tr.degenerate {
        let public = tr.fresh.clone().ok_or_else(|| invalid("degenerate trace lacks its sample"))?;
        let hidden = structured.map(|_| SympLpnHidden { structured: false, secret: None, error: None });
        return Ok(SympLpnInstance { params: SympLpnParams { n, p }, public, hidden });
    }
    let b = inst.public.a.vstack(&tr.extension.a_prime);
    let y = inst.public.y.concat(&tr.pad);
    let y1 = y.slice(0, n);
    let y2 = y.slice(n, 2 * n).xor(&tr.e_ext);
    let z1 = permute_half(&y1, &tr.perm).xor(&tr.g_top).xor(&tr.h);
    let z2 = permute_half(&y2, &tr.perm).xor(&tr.g_bottom).xor(&tr.h);
    let mut cols: Vec<PauliVec> =
        b.col_vecs().iter().map(|c| PauliVec::from_bits(n, permute_symp(c, &tr.perm))).collect::<Result<_>>()?;
    cols.extend(tr.completion.iter().cloned());
    let a_out = IsotropicSet::new(n, cols)?;
    let l = crate::symplectic::columns_matrix(n, &tr.completion);
    let z = z1.concat(&z2).xor(&l.mul_vec(&tr.w)).xor(tr.final_noise.bits());
    let hidden = inst.hidden.as_ref().map(|h| match (&h.secret, h.structured) {
        (Some(x), true) => {
            let secret = x.concat(&tr.w);
            let e = z.xor(&a_out.matrix().mul_vec(&secret));
            SympLpnHidden {
                structured: true,
                secret: Some(secret),
                error: Some(PauliVec::from_bits(n, e).expect("length 2n")),
            }
        }
        _ => SympLpnHidden { structured: h.structured, secret: None, error: None },
    });
    Ok(SympLpnInstance { params: SympLpnParams { n, p }, public: SympLpnPublic { a: a_out, z }, hidden })
}

// ---------------------------------------------------------------------------
// SympLPN to multi-sample LSN

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridDraw {
    pub a: IsotropicSet,
    pub b: IsotropicSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub junk: Option<BitVec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<PauliVec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<BitVec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridTrace {
    /// Embedding index, 0-based: later samples are structured, earlier uniform.
    pub j: usize,
    pub y: BitVec,
    pub draws: Vec<HybridDraw>,
}

/// Embeds the SympLPN sample at a uniform index of an `m`-sample LSN instance.
pub fn symplpn_to_lsn_multi<R: Rng + ?Sized>(
    inst: &SympLpnInstance,
    k: usize,
    m: usize,
    rng: &mut R,
) -> Result<(LsnClassicalInstance, HybridTrace)> {
    let n = inst.params.n;
    if k == 0 || k > n {
        return Err(invalid(format!("need 1 <= k <= n, got k = {k}")));
    }
    if m == 0 {
        return Err(invalid("need at least one sample"));
    }
    let j = rng.random_range(0..m);
    let y = BitVec::random(k, rng);
    let mut draws = Vec::with_capacity(m);
    for i in 0..m {
        let a = if i == j { inst.public.a.clone() } else { random_isotropic(n, n, rng)? };
        let b = random_complement(&a, k, rng)?;
        let mut d = HybridDraw { a, b, junk: None, error: None, uniform: None };
        if i > j {
            d.junk = Some(BitVec::random(n, rng));
            d.error = Some(sample_depol(n, inst.params.p, rng));
        } else if i < j {
            d.uniform = Some(BitVec::random(2 * n, rng));
        }
        draws.push(d);
    }
    let trace = HybridTrace { j, y, draws };
    Ok((replay_symplpn_to_lsn(inst, &trace)?, trace))
}

pub fn replay_symplpn_to_lsn(inst: &SympLpnInstance, tr: &HybridTrace) -> Result<LsnClassicalInstance> {
    let n = inst.params.n;
    let k = tr.y.len();
    let mut samples = Vec::with_capacity(tr.draws.len());
    for (i, d) in tr.draws.iter().enumerate() {
        let by = d.b.matrix().mul_vec(&tr.y);
        let z = if i == tr.j {
            by.xor(&inst.public.z)
        } else if i > tr.j {
            let (r, e) = d.junk.as_ref().zip(d.error.as_ref()).ok_or_else(|| invalid("structured draw incomplete"))?;
            d.a.matrix().mul_vec(r).xor(&by).xor(e.bits())
        } else {
            d.uniform.clone().ok_or_else(|| invalid("uniform draw missing"))?
        };
        samples.push(LsnSample { a: d.a.clone(), b: d.b.clone(), z });
    }
    let hidden = inst.hidden.as_ref().map(|h| LsnHidden {
        structured: h.structured,
        secret: Some(tr.y.clone()),
        junk: Vec::new(),
        errors: Vec::new(),
    });
    Ok(LsnClassicalInstance {
        params: LsnParams { k, n, p: inst.params.p, m: samples.len() },
        public: LsnPublic { samples },
        hidden,
    })
}

/// Draws of the composed LPN to LSN chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub chain: HardnessChain,
    pub lpn_to_symplpn: LpnToSympTrace,
    pub symplpn_to_lsn: HybridTrace,
}

/// Fresh LPN sample pushed through both chain reductions to `m`-sample LSN.
pub fn hardness_chain_sample<R: Rng + ?Sized>(
    chain: &HardnessChain,
    k: usize,
    m: usize,
    structured: bool,
    rng: &mut R,
) -> Result<(LsnClassicalInstance, ChainTrace)> {
    let p_lpn = BernParam::new(to_f64(&chain.p_lpn))?;
    let lpn = sample_lpn(chain.ell, chain.lpn_rows, p_lpn, structured, rng)?;
    let cfg = LpnToSympConfig { eps: chain.eps.clone(), p: Some(chain.p_lpn.clone()), q: Some(chain.q.clone()) };
    let (symp, t1) = lpn_to_symplpn(&lpn, &cfg, rng)?;
    let (lsn, t2) = symplpn_to_lsn_multi(&symp, k, m, rng)?;
    Ok((lsn, ChainTrace { chain: chain.clone(), lpn_to_symplpn: t1, symplpn_to_lsn: t2 }))
}

// ---------------------------------------------------------------------------
// Average-case decision and search

/// Decision from two search calls on the two halves, the second half shifted
/// by a random `y`; accepts iff the answers differ by `y`.
pub fn lsn_decision_to_search<R, F>(inst: &LsnClassicalInstance, mut search: F, rng: &mut R) -> Result<bool>
where
    R: Rng + ?Sized,
    F: FnMut(&LsnClassicalInstance) -> Result<BitVec>,
{
    let total = inst.public.samples.len();
    if total == 0 || !total.is_multiple_of(2) {
        return Err(invalid("need an even, positive number of samples"));
    }
    let half = total / 2;
    let split = |range: std::ops::Range<usize>| LsnClassicalInstance {
        params: LsnParams { m: half, ..inst.params.clone() },
        public: LsnPublic { samples: inst.public.samples[range].to_vec() },
        hidden: None,
    };
    let first = split(0..half);
    let (second, y) = rerandomize_secret(&split(half..total), rng);
    let z1 = search(&first)?;
    let z2 = search(&second)?;
    Ok(z1.xor(&z2) == y)
}

fn x_logical(n: usize, k: usize, y: &BitVec) -> PauliVec {
    let mut p = PauliVec::identity(n);
    for j in y.iter_ones() {
        p.set_x(n - k + j, true);
    }
    p
}

/// One transformed sample for extracting secret bit `bit`: the new Clifford
/// is `C (controlled-P) X_y` and the state gets `C P C^dag`.
pub fn controlled_shift_sample<R: Rng + ?Sized>(
    sample: &QuantumSample,
    k: usize,
    bit: usize,
    y: &BitVec,
    rng: &mut R,
) -> Result<QuantumSample> {
    let n = sample.clifford.n;
    let control = n - k + bit;
    let mut p = PauliVec::random(n, rng);
    p.set_x(control, false);
    p.set_z(control, false);
    let cp = CliffordDesc::from_gates(n, controlled_pauli(n, control, &p)?)?;
    let clifford = CliffordDesc::pauli(x_logical(n, k, y)).then(&cp).then(&sample.clifford);
    let mut state = sample.state.clone();
    state.apply_pauli(&sample.clifford.conjugate(&p))?;
    Ok(QuantumSample { clifford, state })
}

/// Recovers each secret bit by majority over `rounds` decision calls, each on
/// `per_call` fresh samples. Consumes `k * rounds * per_call` samples.
pub fn lsn_search_to_decision<R, F>(
    inst: &LsnQuantumInstance,
    per_call: usize,
    rounds: usize,
    mut decide: F,
    rng: &mut R,
) -> Result<BitVec>
where
    R: Rng + ?Sized,
    F: FnMut(&LsnQuantumInstance) -> Result<bool>,
{
    let LsnParams { k, .. } = inst.params;
    if per_call == 0 || rounds == 0 {
        return Err(invalid("need at least one sample and one round per bit"));
    }
    let need = k * rounds * per_call;
    if inst.public.samples.len() < need {
        return Err(invalid(format!("need {need} samples, have {}", inst.public.samples.len())));
    }
    let mut chunks = inst.public.samples.chunks(per_call);
    let mut out = BitVec::zeros(k);
    for bit in 0..k {
        let mut votes = Vec::with_capacity(rounds);
        for _ in 0..rounds {
            let chunk = chunks.next().expect("sample count checked");
            let y = BitVec::random(k, rng);
            let samples =
                chunk.iter().map(|s| controlled_shift_sample(s, k, bit, &y, rng)).collect::<Result<Vec<_>>>()?;
            let sub = LsnQuantumInstance {
                params: LsnParams { m: per_call, ..inst.params.clone() },
                public: LsnQuantumPublic { samples },
                hidden: None,
            };
            votes.push(decide(&sub)?);
        }
        out.set(bit, majority(&votes, rng));
    }
    Ok(out)
}

/// Majority of boolean votes, fair coin on ties.
pub fn majority<R: Rng + ?Sized>(votes: &[bool], rng: &mut R) -> bool {
    let yes = votes.iter().filter(|&&v| v).count();
    match (2 * yes).cmp(&votes.len()) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => rng.random(),
    }
}

/// Runs `f` `rounds` times and returns the most frequent answer, smallest on ties.
pub fn amplify<T: Ord + Clone, F: FnMut() -> Result<T>>(rounds: usize, mut f: F) -> Result<T> {
    if rounds == 0 {
        return Err(invalid("need at least one round"));
    }
    let mut seen: std::collections::BTreeMap<T, usize> = std::collections::BTreeMap::new();
    for _ in 0..rounds {
        *seen.entry(f()?).or_default() += 1;
    }
    let best = *seen.values().max().expect("nonempty");
    Ok(seen.into_iter().find(|(_, c)| *c == best).expect("maximum exists").0)
}

// ---------------------------------------------------------------------------
// Representation conversions

/// Result of [`lsn_classical_of_quantum`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassicalConversion {
    pub instance: LsnClassicalInstance,
    /// Quantum secret = classical secret + shift.
    pub shift: BitVec,
}

/// Measures each syndrome, picks a uniform Pauli with that syndrome, aligns
/// the logical X parts across samples, and re-bases the Z images randomly.
pub fn lsn_classical_of_quantum<R: Rng + ?Sized>(
    inst: &LsnQuantumInstance,
    rng: &mut R,
) -> Result<ClassicalConversion> {
    let LsnParams { k, n, .. } = inst.params;
    let mut samples = Vec::with_capacity(inst.public.samples.len());
    let mut shift: Option<BitVec> = None;
    for s in &inst.public.samples {
        let tab = s.clifford.tableau();
        let stabs: Vec<(PauliVec, bool)> =
            (0..n - k).map(|i| (tab.stabilizer(i).0.clone(), tab.stabilizer(i).1)).collect();
        let mut st = s.state.clone();
        let syn = st.measure_syndrome(&stabs, rng)?;
        let cons: Vec<(&PauliVec, bool)> =
            stabs.iter().zip(syn.iter_ones_vec(n - k)).map(|((g, _), b)| (g, b)).collect();
        let mut p = sample_constrained(n, &cons, &[], rng)?;
        st.apply_pauli(&p)?;
        let mut w = BitVec::zeros(k);
        for j in 0..k {
            let (g, sign) = tab.stabilizer(n - k + j);
            w.set(j, st.measure_pauli(g, sign, rng).bit);
        }
        match &shift {
            None => shift = Some(w),
            Some(w0) => {
                for j in w.xor(w0).iter_ones() {
                    p.mul_assign(tab.destabilizer(n - k + j).0);
                }
            }
        }
        let z_images =
            crate::symplectic::columns_matrix(n, &(0..n).map(|i| tab.stabilizer(i).0.clone()).collect::<Vec<_>>());
        let r = BitMat::random_invertible(n, rng);
        let a = IsotropicSet::from_matrix(n, &z_images.mul(&r))?;
        let b = IsotropicSet::new(n, (n - k..n).map(|i| tab.destabilizer(i).0.clone()).collect())?;
        samples.push(LsnSample { a, b, z: p.into_bits() });
    }
    let shift = shift.unwrap_or_else(|| BitVec::zeros(k));
    let hidden = inst.hidden.as_ref().map(|h| LsnHidden {
        structured: h.structured,
        secret: h.secret.as_ref().map(|x| x.xor(&shift)),
        junk: Vec::new(),
        errors: if h.structured { h.errors.clone() } else { Vec::new() },
    });
    let instance = LsnClassicalInstance {
        params: LsnParams { m: samples.len(), ..inst.params.clone() },
        public: LsnPublic { samples },
        hidden,
    };
    Ok(ClassicalConversion { instance, shift })
}

trait OnesVec {
    fn iter_ones_vec(&self, len: usize) -> Vec<bool>;
}

impl OnesVec for BitVec {
    fn iter_ones_vec(&self, len: usize) -> Vec<bool> {
        (0..len).map(|i| self.get(i)).collect()
    }
}

/// Uniform Clifford whose Z images span `im(a)` and whose last `k` X images
/// are the columns of `b`; uniform image signs.
pub fn clifford_for_frame<R: Rng + ?Sized>(a: &IsotropicSet, b: &IsotropicSet, rng: &mut R) -> Result<CliffordDesc> {
    let n = a.n();
    let k = b.len();
    if a.len() != n || k == 0 || k > n || b.n() != n {
        return Err(Error::Dimension("frame must be 2n x n and 2n x k".into()));
    }
    let a_cols = a.columns();
    let b_cols = b.columns();
    let mut orth: Vec<PauliVec> = a_cols.to_vec();
    orth.extend(b_cols.iter().cloned());
    let extra = ExtensionConstraints { orthogonal_to: &orth, anticommute_with: &[] };
    let mut z = sample_isotropic_extension(n, &[], n - k, extra, rng)?;
    for j in 0..k {
        let mut cons: Vec<(&PauliVec, bool)> = a_cols.iter().map(|c| (c, false)).collect();
        cons.extend(b_cols.iter().enumerate().map(|(t, c)| (c, t == j)));
        let v = sample_constrained(n, &cons, &z, rng)?;
        z.push(v);
    }
    let mut x: Vec<PauliVec> = Vec::with_capacity(n);
    for j in 0..n - k {
        let mut cons: Vec<(&PauliVec, bool)> = z.iter().enumerate().map(|(i, zi)| (zi, i == j)).collect();
        cons.extend(b_cols.iter().map(|c| (c, false)));
        cons.extend(x.iter().map(|c| (c, false)));
        x.push(sample_constrained(n, &cons, &[], rng)?);
    }
    x.extend(b_cols.iter().cloned());
    let t = SympMat::from_images(&x, &z)?;
    CliffordDesc::from_symp(&t, &BitVec::random(n, rng), &BitVec::random(n, rng))
}

/// Rebuilds a quantum sample per classical sample: a consistent uniform
/// Clifford, and the Pauli of `z_i` applied to `C_i |0^n>`.
pub fn lsn_quantum_of_classical<R: Rng + ?Sized>(
    inst: &LsnClassicalInstance,
    rng: &mut R,
) -> Result<LsnQuantumInstance> {
    let n = inst.params.n;
    let mut samples = Vec::with_capacity(inst.public.samples.len());
    let mut paulis = Vec::with_capacity(inst.public.samples.len());
    for s in &inst.public.samples {
        let c = clifford_for_frame(&s.a, &s.b, rng)?;
        let mut state = c.tableau();
        let p = PauliVec::from_bits(n, s.z.clone())?;
        state.apply_pauli(&p)?;
        paulis.push(p);
        samples.push(QuantumSample { clifford: c, state });
    }
    let hidden = inst.hidden.as_ref().map(|h| LsnQuantumHidden {
        structured: h.structured,
        secret: h.secret.clone(),
        errors: if h.structured { h.errors.clone() } else { paulis.clone() },
    });
    Ok(LsnQuantumInstance {
        params: LsnParams { m: samples.len(), ..inst.params.clone() },
        public: LsnQuantumPublic { samples },
        hidden,
    })
}

// ---------------------------------------------------------------------------
// Worst case

/// Outcome of [`wc_search_to_decision`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WcSearch {
    pub error: PauliVec,
    pub oracle_calls: usize,
    /// Weight found by the binary search.
    pub weight: usize,
}

/// Search from an existence oracle `decide(v, w')`: binary search for the
/// minimal weight, then fix one qubit at a time trying X, Z, Y.
pub fn wc_search_to_decision<F>(h: &IsotropicSet, v: &BitVec, w: usize, mut decide: F) -> Result<WcSearch>
where
    F: FnMut(&BitVec, usize) -> Result<bool>,
{
    let n = h.n();
    if v.len() != h.len() {
        return Err(Error::Dimension("syndrome length differs from generator count".into()));
    }
    let mut calls = 0usize;
    let mut ask = |v: &BitVec, w: usize| {
        calls += 1;
        decide(v, w)
    };
    let (mut lo, mut hi) = (0usize, w);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if ask(v, mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let weight = lo;
    let mut e = PauliVec::identity(n);
    let mut vh = v.clone();
    let mut budget = weight;
    for q in 0..n {
        if budget == 0 {
            break;
        }
        for letter in ['X', 'Z', 'Y'] {
            let step = PauliVec::single(n, q, letter)?;
            let cand = vh.xor(&h.syndrome(&step));
            if ask(&cand, budget - 1)? {
                vh = cand;
                budget -= 1;
                e.mul_assign(&step);
                break;
            }
        }
    }
    if h.syndrome(&e) != *v || e.weight() > w {
        return Err(Error::OracleInconsistent(format!(
            "answers led to {e} of weight {}, which does not explain the syndrome",
            e.weight()
        )));
    }
    Ok(WcSearch { error: e, oracle_calls: calls, weight })
}

/// Decision from a search oracle: YES iff the returned Pauli verifies.
pub fn wc_decision_to_search<F>(h: &IsotropicSet, v: &BitVec, w: usize, mut search: F) -> Result<bool>
where
    F: FnMut(&BitVec, usize) -> Result<Option<PauliVec>>,
{
    Ok(match search(v, w)? {
        Some(e) => e.n() == h.n() && e.weight() <= w && h.syndrome(&e) == *v,
        None => false,
    })
}

/// The first `n - k` signed stabilizers of `C |0^n>`.
pub fn code_stabilizers(c: &CliffordDesc, k: usize) -> Vec<(PauliVec, bool)> {
    let tab = c.tableau();
    (0..c.n - k).map(|i| (tab.stabilizer(i).0.clone(), tab.stabilizer(i).1)).collect()
}

/// Measures the syndrome of a noisy code state.
pub fn qncp_to_qsdp<R: Rng + ?Sized>(
    clifford: &CliffordDesc,
    state: &StabState,
    k: usize,
    w: usize,
    rng: &mut R,
) -> Result<QsdpInstance> {
    let n = clifford.n;
    if k > n || state.n() != n {
        return Err(Error::Dimension("state and code sizes differ".into()));
    }
    let stabs = code_stabilizers(clifford, k);
    let v = state.clone().measure_syndrome(&stabs, rng)?;
    let h = IsotropicSet::new(n, stabs.into_iter().map(|(g, _)| g).collect())?;
    Ok(QsdpInstance { params: QsdpParams { n, k, w }, public: QsdpPublic { h, v }, hidden: None })
}

/// Encoder for the code with `+h_j` stabilizers and a trial error with
/// syndrome `v` applied to its zero state.
pub fn qsdp_to_qncp<R: Rng + ?Sized>(h: &IsotropicSet, v: &BitVec, rng: &mut R) -> Result<QuantumSample> {
    let n = h.n();
    if v.len() != h.len() {
        return Err(Error::Dimension("syndrome length differs from generator count".into()));
    }
    let t = extend_to_symplectic(n, h.columns(), rng)?;
    let c = CliffordDesc::from_symp(&t, &BitVec::random(n, rng), &BitVec::zeros(n))?;
    let cons: Vec<(&PauliVec, bool)> = h.columns().iter().enumerate().map(|(j, g)| (g, v.get(j))).collect();
    let e = sample_constrained(n, &cons, &[], rng)?;
    let mut state = c.tableau();
    state.apply_pauli(&e)?;
    Ok(QuantumSample { clifford: c, state })
}

/// Quantum instance of code state `|0^{n-k}, x>` under explicit errors.
pub fn encode_with_errors(
    cliffords: &[CliffordDesc],
    k: usize,
    x: &BitVec,
    errors: &[PauliVec],
) -> Result<Vec<QuantumSample>> {
    cliffords
        .iter()
        .zip(errors)
        .map(|(c, e)| {
            let mut st = StabState::basis(c.n, &code_label(c.n, x))?;
            if x.len() != k {
                return Err(Error::Dimension("secret length differs from k".into()));
            }
            st.apply_clifford(c)?;
            st.apply_pauli(e)?;
            Ok(QuantumSample { clifford: c.clone(), state: st })
        })
        .collect()
}
