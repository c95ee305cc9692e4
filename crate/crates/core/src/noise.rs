//! Bernoulli and depolarizing noise, and the identities relating them.
//!
//! Single-qubit tables are indexed by `x + 2z`, i.e. `[I, X, Z, Y]`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gf2::BitVec;
use crate::symplectic::PauliVec;

const TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct DepolParam(f64);

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BernParam(f64);

impl DepolParam {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=0.75).contains(&p) {
            return Err(invalid(format!("depolarizing parameter {p} outside [0, 3/4]")));
        }
        Ok(DepolParam(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl BernParam {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(invalid(format!("Bernoulli parameter {p} outside [0, 1/2]")));
        }
        Ok(BernParam(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for DepolParam {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        DepolParam::new(p)
    }
}

impl TryFrom<f64> for BernParam {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        BernParam::new(p)
    }
}

impl From<DepolParam> for f64 {
    fn from(p: DepolParam) -> f64 {
        p.0
    }
}

impl From<BernParam> for f64 {
    fn from(p: BernParam) -> f64 {
        p.0
    }
}

pub fn sample_depol<R: Rng + ?Sized>(n: usize, p: DepolParam, rng: &mut R) -> PauliVec {
    let mut e = PauliVec::identity(n);
    for i in 0..n {
        if rng.random_bool(p.0) {
            match rng.random_range(0..3) {
                0 => e.set_x(i, true),
                1 => e.set_z(i, true),
                _ => {
                    e.set_x(i, true);
                    e.set_z(i, true);
                }
            }
        }
    }
    e
}

pub fn sample_bern<R: Rng + ?Sized>(n: usize, p: BernParam, rng: &mut R) -> BitVec {
    BitVec::bernoulli(n, p.0, rng)
}

/// `3 q (1 - q)`, the depolarizing rate of `(a + h, b + h)` with a, b, h ~ Ber(q).
pub fn depol_of_bern(q: BernParam) -> DepolParam {
    let q = q.0;
    DepolParam((3.0 * (q * q * (1.0 - q) + q * (1.0 - q) * (1.0 - q))).clamp(0.0, 0.75))
}

/// Inverse of [`depol_of_bern`] on `[0, 1/2]`.
pub fn bern_of_depol(p: DepolParam) -> BernParam {
    let disc = (1.0 - 4.0 * p.0 / 3.0).max(0.0);
    BernParam(((1.0 - disc.sqrt()) / 2.0).clamp(0.0, 0.5))
}

/// Same inverse by bisection, as an independent cross-check.
pub fn bern_of_depol_bisect(p: DepolParam) -> BernParam {
    let f = |q: f64| 3.0 * (q * q * (1.0 - q) + q * (1.0 - q) * (1.0 - q)) - p.0;
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BernParam(0.5 * (lo + hi))
}

/// `u` with Ber(p) + Ber(u) = Ber(q).
pub fn bern_convolve_param(p: BernParam, q: BernParam) -> Result<BernParam> {
    let (p, q) = (p.0, q.0);
    if p >= 0.5 {
        return Err(invalid("Bernoulli convolution undefined at p = 1/2"));
    }
    if q < p - TOL {
        return Err(invalid(format!("target {q} below source {p}")));
    }
    BernParam::new(((q - p) / (1.0 - 2.0 * p)).clamp(0.0, 0.5))
}

/// `u` with Depol(p) * Depol(u) = Depol(q).
pub fn depol_convolve_param(p: DepolParam, q: DepolParam) -> Result<DepolParam> {
    let (p, q) = (p.0, q.0);
    if p >= 0.75 {
        return Err(invalid("depolarizing convolution undefined at p = 3/4"));
    }
    if q < p - TOL {
        return Err(invalid(format!("target {q} below source {p}")));
    }
    DepolParam::new(((q - p) / (1.0 - 4.0 * p / 3.0)).clamp(0.0, 0.75))
}

pub fn depol_qubit(p: DepolParam) -> [f64; 4] {
    let t = p.0 / 3.0;
    [1.0 - p.0, t, t, t]
}

pub fn bern_bit(p: BernParam) -> [f64; 2] {
    [1.0 - p.0, p.0]
}

/// Law of `(a + h, b + h)` for independent a, b, h ~ Ber(q).
pub fn qubit_of_bern_triple(q: BernParam) -> [f64; 4] {
    let b = bern_bit(q);
    let mut out = [0.0; 4];
    for a in 0..2 {
        for c in 0..2 {
            for h in 0..2 {
                let x = a ^ h;
                let z = c ^ h;
                out[x + 2 * z] += b[a] * b[c] * b[h];
            }
        }
    }
    out
}

/// Law of the product of independent single-qubit Paulis.
pub fn convolve_qubit(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i ^ j] += a[i] * b[j];
        }
    }
    out
}

pub fn convolve_bit(a: &[f64; 2], b: &[f64; 2]) -> [f64; 2] {
    [a[0] * b[0] + a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
}

pub const MAX_EXACT_QUBITS: usize = 8;

/// Probability of every n-qubit Pauli; entry index is the 2n-bit symplectic
/// vector read as an integer (bit i = X on qubit i, bit n + i = Z on qubit i).
pub fn exact_depol_dist(n: usize, p: DepolParam) -> Result<Vec<f64>> {
    if n > MAX_EXACT_QUBITS {
        return Err(Error::TooLarge(format!("exact table needs n <= {MAX_EXACT_QUBITS}")));
    }
    let q = depol_qubit(p);
    let mut out = vec![0.0; 1 << (2 * n)];
    for (idx, slot) in out.iter_mut().enumerate() {
        let mut pr = 1.0;
        for i in 0..n {
            let x = (idx >> i) & 1;
            let z = (idx >> (n + i)) & 1;
            pr *= q[x + 2 * z];
        }
        *slot = pr;
    }
    Ok(out)
}

/// `ln Pr[E]` for a Pauli of the given weight under Depol(p)^n.
pub fn depol_log_prob(n: usize, weight: usize, p: DepolParam) -> f64 {
    let a = if weight == 0 { 0.0 } else { weight as f64 * (p.0 / 3.0).ln() };
    let b = if weight == n { 0.0 } else { (n - weight) as f64 * (1.0 - p.0).ln() };
    a + b
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d(p: f64) -> DepolParam {
        DepolParam::new(p).unwrap()
    }

    fn b(p: f64) -> BernParam {
        BernParam::new(p).unwrap()
    }

    #[test]
    fn bern_of_depol_examples() {
        assert_eq!(bern_of_depol(d(0.0)).value(), 0.0);
        assert!((bern_of_depol(d(0.75)).value() - 0.5).abs() < 1e-12);
        let q = bern_of_depol(d(0.1)).value();
        assert!((q - 0.0345255).abs() < 1e-6, "{q}");
        assert!((q - bern_of_depol_bisect(d(0.1)).value()).abs() < 1e-12);
        let table = qubit_of_bern_triple(b(q));
        for (x, y) in table.iter().zip(depol_qubit(d(0.1))) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn convolution_examples() {
        assert!((bern_convolve_param(b(0.1), b(0.3)).unwrap().value() - 0.25).abs() < 1e-15);
        assert_eq!(bern_convolve_param(b(0.2), b(0.2)).unwrap().value(), 0.0);
        assert_eq!(bern_convolve_param(b(0.0), b(0.2)).unwrap().value(), 0.2);
        assert!(bern_convolve_param(b(0.3), b(0.2)).is_err());
        assert!(bern_convolve_param(b(0.5), b(0.5)).is_err());
        let u = depol_convolve_param(d(0.15), d(0.3)).unwrap();
        assert!((u.value() - 0.1875).abs() < 1e-15);
        let c = convolve_qubit(&depol_qubit(d(0.15)), &depol_qubit(u));
        for (x, y) in c.iter().zip(depol_qubit(d(0.3))) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_table_examples() {
        let t = exact_depol_dist(1, d(0.3)).unwrap();
        for (x, y) in t.iter().zip([0.7, 0.1, 0.1, 0.1]) {
            assert!((x - y).abs() < 1e-15);
        }
        let t2 = exact_depol_dist(2, d(0.3)).unwrap();
        assert!((t2[0b0001] - 0.07).abs() < 1e-15);
        assert!((t2.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(exact_depol_dist(9, d(0.1)).is_err());
    }

    #[test]
    fn samplers_match_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let trials = 100_000;
        let mut hist = [0usize; 4];
        for _ in 0..trials {
            hist[sample_depol(1, d(0.3), &mut rng).bits().as_u64() as usize] += 1;
        }
        assert!((hist[1] as f64 / trials as f64 - 0.1).abs() < 0.005);
        let mut hist = [0usize; 4];
        for _ in 0..trials {
            hist[sample_depol(1, d(0.75), &mut rng).bits().as_u64() as usize] += 1;
        }
        for h in hist {
            assert!((h as f64 / trials as f64 - 0.25).abs() < 0.01);
        }
        assert!(sample_depol(5, d(0.0), &mut rng).is_identity());
    }

    #[test]
    fn params_reject_out_of_range() {
        assert!(DepolParam::new(0.8).is_err());
        assert!(BernParam::new(-0.1).is_err());
        assert!(serde_json::from_str::<DepolParam>("0.9").is_err());
    }
}
