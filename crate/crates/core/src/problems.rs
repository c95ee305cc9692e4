//! Instance types and samplers: LPN, SympLPN, LSN (classical and quantum
//! representations) and QSDP.
//!
//! Every instance serializes as `{problem, params, public, hidden}`; `hidden`
//! carries ground truth for scoring and may be stripped.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gf2::{BitMat, BitVec};
use crate::noise::{sample_bern, sample_depol, BernParam, DepolParam};
use crate::oracles;
use crate::stabsim::{CliffordDesc, StabState};
use crate::symplectic::{columns_matrix, sample_isotropic_extension, ExtensionConstraints, IsotropicSet, PauliVec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpnParams {
    pub k: usize,
    pub n: usize,
    pub p: BernParam,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpnPublic {
    pub a: BitMat,
    pub y: BitVec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpnHidden {
    pub structured: bool,
    pub secret: Option<BitVec>,
    pub error: Option<BitVec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpnInstance {
    pub params: LpnParams,
    pub public: LpnPublic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<LpnHidden>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SympLpnParams {
    pub n: usize,
    pub p: DepolParam,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SympLpnPublic {
    /// 2n x n, full rank, isotropic.
    pub a: IsotropicSet,
    pub z: BitVec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SympLpnHidden {
    pub structured: bool,
    pub secret: Option<BitVec>,
    pub error: Option<PauliVec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SympLpnInstance {
    pub params: SympLpnParams,
    pub public: SympLpnPublic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<SympLpnHidden>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsnParams {
    pub k: usize,
    pub n: usize,
    pub p: DepolParam,
    pub m: usize,
}

/// One classical-representation sample `(A, B, z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsnSample {
    /// 2n x n: stabilizer and logical-Z images.
    pub a: IsotropicSet,
    /// 2n x k: logical-X images.
    pub b: IsotropicSet,
    pub z: BitVec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsnPublic {
    pub samples: Vec<LsnSample>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsnHidden {
    pub structured: bool,
    pub secret: Option<BitVec>,
    pub junk: Vec<BitVec>,
    pub errors: Vec<PauliVec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsnClassicalInstance {
    pub params: LsnParams,
    pub public: LsnPublic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<LsnHidden>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumSample {
    pub clifford: CliffordDesc,
    pub state: StabState,
}

impl QuantumSample {
    /// Measures every Z image of the Clifford and returns the equivalent
    /// classical sample: Z images as `a`, the last `k` X images as `b`, and a
    /// representative `z` with the measured commutation pattern.
    pub fn measure_code_basis<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<LsnSample> {
        let n = self.clifford.n;
        if k == 0 || k > n || self.state.n() != n {
            return Err(Error::Dimension("sample does not match (k, n)".into()));
        }
        let tab = self.clifford.tableau();
        let mut st = self.state.clone();
        let mut z = BitVec::zeros(2 * n);
        for i in 0..n {
            let (g, sign) = tab.stabilizer(i);
            if st.measure_pauli(g, sign, rng).bit {
                z.xor_assign(tab.destabilizer(i).0.bits());
            }
        }
        let a = IsotropicSet::new(n, (0..n).map(|i| tab.stabilizer(i).0.clone()).collect())?;
        let b = IsotropicSet::new(n, (n - k..n).map(|i| tab.destabilizer(i).0.clone()).collect())?;
        Ok(LsnSample { a, b, z })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsnQuantumPublic {
    pub samples: Vec<QuantumSample>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsnQuantumHidden {
    pub structured: bool,
    pub secret: Option<BitVec>,
    /// Structured: the depolarizing errors. Unstructured: the scrambling Paulis.
    pub errors: Vec<PauliVec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LsnQuantumInstance {
    pub params: LsnParams,
    pub public: LsnQuantumPublic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<LsnQuantumHidden>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsdpParams {
    pub n: usize,
    pub k: usize,
    pub w: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsdpPublic {
    /// Generators as columns (2n x (n - k)); rows of the check matrix.
    pub h: IsotropicSet,
    pub v: BitVec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsdpHidden {
    pub error: PauliVec,
    /// Code distance (normalizer minus stabilizer), `n + 1` if none up to `n`.
    pub distance: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QsdpInstance {
    pub params: QsdpParams,
    pub public: QsdpPublic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hidden: Option<QsdpHidden>,
}

/// Self-describing envelope used for files and the CLI.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "kebab-case")]
pub enum Instance {
    Lpn(LpnInstance),
    Symplpn(SympLpnInstance),
    Lsn(LsnClassicalInstance),
    LsnQuantum(LsnQuantumInstance),
    Qsdp(QsdpInstance),
}

impl Instance {
    pub fn name(&self) -> &'static str {
        match self {
            Instance::Lpn(_) => "lpn",
            Instance::Symplpn(_) => "symplpn",
            Instance::Lsn(_) => "lsn",
            Instance::LsnQuantum(_) => "lsn-quantum",
            Instance::Qsdp(_) => "qsdp",
        }
    }

    pub fn strip_hidden(&mut self) {
        match self {
            Instance::Lpn(i) => i.hidden = None,
            Instance::Symplpn(i) => i.hidden = None,
            Instance::Lsn(i) => i.hidden = None,
            Instance::LsnQuantum(i) => i.hidden = None,
            Instance::Qsdp(i) => i.hidden = None,
        }
    }
}

fn check_lsn_dims(k: usize, n: usize) -> Result<()> {
    if k == 0 {
        return Err(invalid("LSN needs k >= 1 logical qubits"));
    }
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    Ok(())
}

pub fn sample_lpn<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    p: BernParam,
    structured: bool,
    rng: &mut R,
) -> Result<LpnInstance> {
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    let a = BitMat::random(n, k, rng);
    let (y, hidden) = if structured {
        let x = BitVec::random(k, rng);
        let e = sample_bern(n, p, rng);
        let y = a.mul_vec(&x).xor(&e);
        (y, LpnHidden { structured, secret: Some(x), error: Some(e) })
    } else {
        (BitVec::random(n, rng), LpnHidden { structured, secret: None, error: None })
    };
    Ok(LpnInstance { params: LpnParams { k, n, p }, public: LpnPublic { a, y }, hidden: Some(hidden) })
}

/// Uniform full-rank isotropic 2n x m matrix.
pub fn random_isotropic<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<IsotropicSet> {
    let cols = sample_isotropic_extension(n, &[], m, ExtensionConstraints::default(), rng)?;
    IsotropicSet::new(n, cols)
}

/// Uniform isotropic 2n x k matrix `B` with `[A | B]` full rank, by rejection.
pub fn random_complement<R: Rng + ?Sized>(a: &IsotropicSet, k: usize, rng: &mut R) -> Result<IsotropicSet> {
    let n = a.n();
    if a.len() + k > 2 * n {
        return Err(invalid("joint rank would exceed 2n"));
    }
    loop {
        let b = random_isotropic(n, k, rng)?;
        let mut all = a.columns().to_vec();
        all.extend(b.columns().iter().cloned());
        if columns_matrix(n, &all).rank() == a.len() + k {
            return Ok(b);
        }
    }
}

pub fn sample_symplpn<R: Rng + ?Sized>(
    n: usize,
    p: DepolParam,
    structured: bool,
    rng: &mut R,
) -> Result<SympLpnInstance> {
    if n == 0 {
        return Err(invalid("n must be positive"));
    }
    let a = random_isotropic(n, n, rng)?;
    let (z, hidden) = if structured {
        let x = BitVec::random(n, rng);
        let e = sample_depol(n, p, rng);
        let z = a.matrix().mul_vec(&x).xor(e.bits());
        (z, SympLpnHidden { structured, secret: Some(x), error: Some(e) })
    } else {
        (BitVec::random(2 * n, rng), SympLpnHidden { structured, secret: None, error: None })
    };
    Ok(SympLpnInstance { params: SympLpnParams { n, p }, public: SympLpnPublic { a, z }, hidden: Some(hidden) })
}

/// `A r + B y + e` for one sample.
pub fn lsn_codeword(s: &LsnSample, r: &BitVec, y: &BitVec) -> BitVec {
    s.a.matrix().mul_vec(r).xor(&s.b.matrix().mul_vec(y))
}

pub fn sample_lsn_classical<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    p: DepolParam,
    m: usize,
    structured: bool,
    rng: &mut R,
) -> Result<LsnClassicalInstance> {
    check_lsn_dims(k, n)?;
    let y = structured.then(|| BitVec::random(k, rng));
    let mut samples = Vec::with_capacity(m);
    let mut junk = Vec::new();
    let mut errors = Vec::new();
    for _ in 0..m {
        let a = random_isotropic(n, n, rng)?;
        let b = random_complement(&a, k, rng)?;
        let z = match &y {
            Some(y) => {
                let r = BitVec::random(n, rng);
                let e = sample_depol(n, p, rng);
                let mut s = LsnSample { a, b, z: BitVec::zeros(2 * n) };
                s.z = lsn_codeword(&s, &r, y).xor(e.bits());
                junk.push(r);
                errors.push(e);
                samples.push(s);
                continue;
            }
            None => BitVec::random(2 * n, rng),
        };
        samples.push(LsnSample { a, b, z });
    }
    Ok(LsnClassicalInstance {
        params: LsnParams { k, n, p, m },
        public: LsnPublic { samples },
        hidden: Some(LsnHidden { structured, secret: y, junk, errors }),
    })
}

/// Label `(0^{n-k}, x)` of the code-state preparation.
pub fn code_label(n: usize, x: &BitVec) -> BitVec {
    BitVec::zeros(n - x.len()).concat(x)
}

pub fn sample_lsn_quantum<R: Rng + ?Sized>(
    k: usize,
    n: usize,
    p: DepolParam,
    m: usize,
    structured: bool,
    rng: &mut R,
) -> Result<LsnQuantumInstance> {
    check_lsn_dims(k, n)?;
    let x = structured.then(|| BitVec::random(k, rng));
    let mut samples = Vec::with_capacity(m);
    let mut errors = Vec::with_capacity(m);
    for _ in 0..m {
        let c = CliffordDesc::random(n, rng);
        let (mut state, e) = match &x {
            Some(x) => (StabState::basis(n, &code_label(n, x))?, sample_depol(n, p, rng)),
            None => (StabState::zero(n), PauliVec::random(n, rng)),
        };
        state.apply_clifford(&c)?;
        state.apply_pauli(&e)?;
        errors.push(e);
        samples.push(QuantumSample { clifford: c, state });
    }
    Ok(LsnQuantumInstance {
        params: LsnParams { k, n, p, m },
        public: LsnQuantumPublic { samples },
        hidden: Some(LsnQuantumHidden { structured, secret: x, errors }),
    })
}

pub const QSDP_RETRIES: usize = 10_000;

/// Number of Paulis of weight exactly `w` on `n` qubits.
fn weight_class_size(n: usize, w: usize) -> f64 {
    let mut c = 1.0;
    for i in 0..w {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c * 3f64.powi(w as i32)
}

/// Uniform Pauli among those of weight at most `w`.
pub fn random_low_weight_pauli<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> PauliVec {
    let sizes: Vec<f64> = (0..=w.min(n)).map(|j| weight_class_size(n, j)).collect();
    let total: f64 = sizes.iter().sum();
    let mut u = rng.random::<f64>() * total;
    let mut wt = sizes.len() - 1;
    for (j, &s) in sizes.iter().enumerate() {
        if u < s {
            wt = j;
            break;
        }
        u -= s;
    }
    let mut qubits: Vec<usize> = (0..n).collect();
    let (chosen, _) = qubits.partial_shuffle(rng, wt);
    let mut e = PauliVec::identity(n);
    for &q in chosen.iter() {
        let letter = ['X', 'Y', 'Z'][rng.random_range(0..3)];
        e.set_letter(q, letter).expect("valid letter");
    }
    e
}

/// Random code whose code distance is at least `2w + 1`, with a random error
/// of weight at most `w` and its syndrome.
pub fn sample_qsdp<R: Rng + ?Sized>(n: usize, k: usize, w: usize, rng: &mut R) -> Result<QsdpInstance> {
    if n > oracles::MAX_QSDP_N {
        return Err(Error::TooLarge(format!("distance check needs n <= {}", oracles::MAX_QSDP_N)));
    }
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    for _ in 0..QSDP_RETRIES {
        let h = random_isotropic(n, n - k, rng)?;
        let d = oracles::code_distance(&h, 2 * w)?;
        if d.is_some() {
            continue;
        }
        let e = random_low_weight_pauli(n, w, rng);
        let v = h.syndrome(&e);
        let distance = oracles::code_distance(&h, n)?.unwrap_or(n + 1);
        return Ok(QsdpInstance {
            params: QsdpParams { n, k, w },
            public: QsdpPublic { h, v },
            hidden: Some(QsdpHidden { error: e, distance }),
        });
    }
    Err(Error::Infeasible(format!("no [[{n},{k}]] code with distance >= {} found in {QSDP_RETRIES} draws", 2 * w + 1)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d(p: f64) -> DepolParam {
        DepolParam::new(p).unwrap()
    }

    #[test]
    fn lpn_noiseless_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let inst = sample_lpn(3, 10, BernParam::new(0.0).unwrap(), true, &mut rng).unwrap();
        let h = inst.hidden.unwrap();
        assert_eq!(inst.public.a.mul_vec(h.secret.as_ref().unwrap()), inst.public.y);
    }

    #[test]
    fn lsn_rejects_zero_logical_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_lsn_classical(0, 3, d(0.1), 1, true, &mut rng).is_err());
        assert!(sample_lsn_quantum(4, 3, d(0.1), 1, true, &mut rng).is_err());
    }

    #[test]
    fn lsn_frames_are_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let inst = sample_lsn_classical(1, 3, d(0.2), 1, true, &mut rng).unwrap();
            let s = &inst.public.samples[0];
            assert_eq!(s.a.matrix().hstack(&s.b.matrix()).rank(), 4);
        }
    }

    #[test]
    fn envelope_round_trip_and_strip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = Instance::Lsn(sample_lsn_classical(1, 3, d(0.2), 2, true, &mut rng).unwrap());
        let j = serde_json::to_value(&inst).unwrap();
        assert_eq!(j["problem"], "lsn");
        assert!(j.get("hidden").is_some());
        let back: Instance = serde_json::from_value(j).unwrap();
        assert_eq!(back, inst);
        let mut stripped = inst.clone();
        stripped.strip_hidden();
        assert!(serde_json::to_value(&stripped).unwrap().get("hidden").is_none());
    }

    #[test]
    fn qsdp_syndrome_matches_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let inst = sample_qsdp(5, 1, 1, &mut rng).unwrap();
        let hid = inst.hidden.unwrap();
        assert_eq!(inst.public.h.syndrome(&hid.error), inst.public.v);
        assert!(hid.error.weight() <= 1);
        assert!(hid.distance >= 3);
        let zero = sample_qsdp(4, 1, 0, &mut rng).unwrap();
        assert!(zero.public.v.is_zero());
    }
}
