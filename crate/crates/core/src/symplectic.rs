//! Symplectic representation of phase-free Paulis and Cliffords over GF(2)^{2n}.
//!
//! Qubit `i` of a Pauli lives at positions `i` (X part) and `i + n` (Z part):
//! I = (0,0), X = (1,0), Z = (0,1), Y = (1,1).

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::gf2::{BitMat, BitVec};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliVec {
    n: usize,
    v: BitVec,
}

impl PauliVec {
    pub fn identity(n: usize) -> Self {
        PauliVec { n, v: BitVec::zeros(2 * n) }
    }

    pub fn from_bits(n: usize, v: BitVec) -> Result<Self> {
        if v.len() != 2 * n {
            return Err(Error::Dimension(format!("expected {} bits, got {}", 2 * n, v.len())));
        }
        Ok(PauliVec { n, v })
    }

    pub fn from_xz(x: &BitVec, z: &BitVec) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::Dimension("x and z parts differ in length".into()));
        }
        Ok(PauliVec { n: x.len(), v: x.concat(z) })
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        PauliVec { n, v: BitVec::random(2 * n, rng) }
    }

    pub fn single(n: usize, qubit: usize, letter: char) -> Result<Self> {
        let mut p = Self::identity(n);
        p.set_letter(qubit, letter)?;
        Ok(p)
    }

    pub fn x_on(n: usize, qubit: usize) -> Self {
        let mut p = Self::identity(n);
        p.v.set(qubit, true);
        p
    }

    pub fn z_on(n: usize, qubit: usize) -> Self {
        let mut p = Self::identity(n);
        p.v.set(qubit + n, true);
        p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn bits(&self) -> &BitVec {
        &self.v
    }

    pub fn into_bits(self) -> BitVec {
        self.v
    }

    pub fn x_part(&self) -> BitVec {
        self.v.slice(0, self.n)
    }

    pub fn z_part(&self) -> BitVec {
        self.v.slice(self.n, 2 * self.n)
    }

    #[inline]
    pub fn x(&self, i: usize) -> bool {
        self.v.get(i)
    }

    #[inline]
    pub fn z(&self, i: usize) -> bool {
        self.v.get(i + self.n)
    }

    pub fn set_x(&mut self, i: usize, b: bool) {
        self.v.set(i, b)
    }

    pub fn set_z(&mut self, i: usize, b: bool) {
        self.v.set(i + self.n, b)
    }

    pub fn letter(&self, i: usize) -> char {
        match (self.x(i), self.z(i)) {
            (false, false) => 'I',
            (true, false) => 'X',
            (false, true) => 'Z',
            (true, true) => 'Y',
        }
    }

    pub fn set_letter(&mut self, i: usize, c: char) -> Result<()> {
        let (x, z) = match c {
            'I' => (false, false),
            'X' => (true, false),
            'Z' => (false, true),
            'Y' => (true, true),
            other => return Err(invalid(format!("invalid Pauli symbol {other:?}"))),
        };
        self.set_x(i, x);
        self.set_z(i, z);
        Ok(())
    }

    pub fn is_identity(&self) -> bool {
        self.v.is_zero()
    }

    /// `v^T Omega w`; zero iff the Paulis commute.
    pub fn symp_inner(&self, w: &PauliVec) -> bool {
        symp_inner(self, w)
    }

    pub fn weight(&self) -> usize {
        pauli_weight(self)
    }

    pub fn mul(&self, w: &PauliVec) -> PauliVec {
        pauli_mul(self, w)
    }

    pub fn mul_assign(&mut self, w: &PauliVec) {
        assert_eq!(self.n, w.n, "qubit count mismatch");
        self.v.xor_assign(&w.v);
    }

    /// `Omega v`: the vector whose ordinary dot product with `w` is `v ⊙ w`.
    pub fn omega(&self) -> BitVec {
        self.z_part().concat(&self.x_part())
    }
}

impl fmt::Display for PauliVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.n).map(|i| self.letter(i)).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for PauliVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Pauli({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct PauliRepr {
    n: usize,
    x_hex: String,
    z_hex: String,
}

impl Serialize for PauliVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PauliRepr { n: self.n, x_hex: self.x_part().to_hex(), z_hex: self.z_part().to_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = PauliRepr::deserialize(d)?;
        let x = BitVec::from_hex(r.n, &r.x_hex).map_err(D::Error::custom)?;
        let z = BitVec::from_hex(r.n, &r.z_hex).map_err(D::Error::custom)?;
        PauliVec::from_xz(&x, &z).map_err(D::Error::custom)
    }
}

pub fn symp_inner(v: &PauliVec, w: &PauliVec) -> bool {
    assert_eq!(v.n, w.n, "qubit count mismatch");
    let n = v.n;
    let mut acc = false;
    for i in 0..n {
        acc ^= (v.v.get(i) & w.v.get(i + n)) ^ (v.v.get(i + n) & w.v.get(i));
    }
    acc
}

pub fn symp_of_pauli(letters: &str) -> Result<PauliVec> {
    let chars: Vec<char> = letters.chars().collect();
    let mut p = PauliVec::identity(chars.len());
    for (i, c) in chars.into_iter().enumerate() {
        p.set_letter(i, c)?;
    }
    Ok(p)
}

pub fn pauli_of_symp(v: &PauliVec) -> String {
    v.to_string()
}

pub fn pauli_weight(v: &PauliVec) -> usize {
    (0..v.n).filter(|&i| v.x(i) || v.z(i)).count()
}

pub fn pauli_mul(v: &PauliVec, w: &PauliVec) -> PauliVec {
    assert_eq!(v.n, w.n, "qubit count mismatch");
    PauliVec { n: v.n, v: v.v.xor(&w.v) }
}

/// Column matrix `[v_1 ... v_m]` of size 2n x m.
pub fn columns_matrix(n: usize, cols: &[PauliVec]) -> BitMat {
    let bits: Vec<BitVec> = cols.iter().map(|c| c.v.clone()).collect();
    BitMat::from_cols(2 * n, &bits)
}

pub fn matrix_columns(n: usize, m: &BitMat) -> Result<Vec<PauliVec>> {
    if m.rows() != 2 * n {
        return Err(Error::Dimension(format!("expected {} rows, got {}", 2 * n, m.rows())));
    }
    (0..m.cols()).map(|j| PauliVec::from_bits(n, m.col(j))).collect()
}

pub fn is_isotropic(cols: &[PauliVec]) -> bool {
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            if symp_inner(&cols[i], &cols[j]) {
                return false;
            }
        }
    }
    true
}

/// Linearly independent, pairwise commuting Paulis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicSet {
    n: usize,
    cols: Vec<PauliVec>,
}

impl IsotropicSet {
    pub fn new(n: usize, cols: Vec<PauliVec>) -> Result<Self> {
        if cols.iter().any(|c| c.n != n) {
            return Err(Error::Dimension("column qubit count mismatch".into()));
        }
        if !is_isotropic(&cols) {
            return Err(invalid("columns are not pairwise symplectically orthogonal"));
        }
        if columns_matrix(n, &cols).rank() != cols.len() {
            return Err(invalid("columns are linearly dependent"));
        }
        Ok(IsotropicSet { n, cols })
    }

    pub fn empty(n: usize) -> Self {
        IsotropicSet { n, cols: Vec::new() }
    }

    pub fn from_matrix(n: usize, m: &BitMat) -> Result<Self> {
        Self::new(n, matrix_columns(n, m)?)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn columns(&self) -> &[PauliVec] {
        &self.cols
    }

    pub fn into_columns(self) -> Vec<PauliVec> {
        self.cols
    }

    /// 2n x m matrix with the generators as columns.
    pub fn matrix(&self) -> BitMat {
        columns_matrix(self.n, &self.cols)
    }

    /// (m x 2n) check matrix with the generators as rows.
    pub fn check_matrix(&self) -> BitMat {
        BitMat::from_rows(2 * self.n, self.cols.iter().map(|c| c.v.clone()).collect())
    }

    /// Syndrome `H Omega e`.
    pub fn syndrome(&self, e: &PauliVec) -> BitVec {
        let mut s = BitVec::zeros(self.cols.len());
        for (j, c) in self.cols.iter().enumerate() {
            if symp_inner(c, e) {
                s.set(j, true);
            }
        }
        s
    }
}

impl Serialize for IsotropicSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.matrix().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IsotropicSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = BitMat::deserialize(d)?;
        if m.rows() % 2 != 0 {
            return Err(D::Error::custom("isotropic set needs an even row count"));
        }
        IsotropicSet::from_matrix(m.rows() / 2, &m).map_err(D::Error::custom)
    }
}

/// Uniform vector `v` with `c ⊙ v = b` for each `(c, b)`, outside `span(avoid)`.
pub fn sample_constrained<R: Rng + ?Sized>(
    n: usize,
    constraints: &[(&PauliVec, bool)],
    avoid: &[PauliVec],
    rng: &mut R,
) -> Result<PauliVec> {
    let rows: Vec<BitVec> = constraints.iter().map(|(c, _)| c.omega()).collect();
    let a = BitMat::from_rows(2 * n, rows);
    let b = BitVec::from_bools(&constraints.iter().map(|&(_, v)| v).collect::<Vec<_>>());
    let Some(x0) = a.solve_any(&b) else {
        return Err(Error::Infeasible("linear constraints are inconsistent".into()));
    };
    let span = columns_matrix(n, avoid);
    let in_span = |v: &BitVec| span.col_span_contains(v);
    if in_span(&x0) && a.nullspace_basis().iter().all(in_span) {
        return Err(Error::Infeasible("every solution lies in the excluded span".into()));
    }
    loop {
        let v = a.solve_random(&b, rng).expect("system already known consistent");
        if !in_span(&v) {
            return Ok(PauliVec { n, v });
        }
    }
}

/// Extra constraints applied to every newly sampled column.
#[derive(Clone, Copy, Default)]
pub struct ExtensionConstraints<'a> {
    /// New columns must commute with these.
    pub orthogonal_to: &'a [PauliVec],
    /// New columns must anticommute with these.
    pub anticommute_with: &'a [PauliVec],
}

/// Appends `m` columns, each uniform among vectors that commute with all
/// columns so far, satisfy `extra`, and are independent of all columns so far.
pub fn sample_isotropic_extension<R: Rng + ?Sized>(
    n: usize,
    existing: &[PauliVec],
    m: usize,
    extra: ExtensionConstraints<'_>,
    rng: &mut R,
) -> Result<Vec<PauliVec>> {
    let mut all: Vec<PauliVec> = existing.to_vec();
    let mut out = Vec::with_capacity(m);
    for _ in 0..m {
        let mut cons: Vec<(&PauliVec, bool)> = all.iter().map(|c| (c, false)).collect();
        cons.extend(extra.orthogonal_to.iter().map(|c| (c, false)));
        cons.extend(extra.anticommute_with.iter().map(|c| (c, true)));
        let v = sample_constrained(n, &cons, &all, rng)?;
        all.push(v.clone());
        out.push(v);
    }
    Ok(out)
}

/// Symplectic 2n x 2n matrix; column `i` is the image of X_i, column `n + i`
/// the image of Z_i.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SympMat {
    n: usize,
    t: BitMat,
}

impl SympMat {
    pub fn new(n: usize, t: BitMat) -> Result<Self> {
        if t.rows() != 2 * n || t.cols() != 2 * n {
            return Err(Error::Dimension(format!("expected {0}x{0} matrix", 2 * n)));
        }
        let s = SympMat { n, t };
        if !s.is_symplectic() {
            return Err(invalid("matrix does not preserve the symplectic form"));
        }
        Ok(s)
    }

    pub fn identity(n: usize) -> Self {
        SympMat { n, t: BitMat::identity(2 * n) }
    }

    /// From the images of X_1..X_n and Z_1..Z_n.
    pub fn from_images(x_images: &[PauliVec], z_images: &[PauliVec]) -> Result<Self> {
        let n = x_images.len();
        if z_images.len() != n {
            return Err(Error::Dimension("image lists differ in length".into()));
        }
        let cols: Vec<PauliVec> = x_images.iter().chain(z_images).cloned().collect();
        Self::new(n, columns_matrix(n, &cols))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &BitMat {
        &self.t
    }

    pub fn x_image(&self, i: usize) -> PauliVec {
        PauliVec { n: self.n, v: self.t.col(i) }
    }

    pub fn z_image(&self, i: usize) -> PauliVec {
        PauliVec { n: self.n, v: self.t.col(self.n + i) }
    }

    pub fn apply(&self, p: &PauliVec) -> PauliVec {
        PauliVec { n: self.n, v: self.t.mul_vec(&p.v) }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &SympMat) -> SympMat {
        SympMat { n: self.n, t: self.t.mul(&other.t) }
    }

    /// `Omega T^T Omega`.
    pub fn inverse(&self) -> SympMat {
        let n = self.n;
        let tt = self.t.transpose();
        let sw = |i: usize| if i < n { i + n } else { i - n };
        let inv = BitMat::from_fn(2 * n, 2 * n, |i, j| tt.get(sw(i), sw(j)));
        SympMat { n, t: inv }
    }

    pub fn is_symplectic(&self) -> bool {
        let cols = matrix_columns(self.n, &self.t).expect("square");
        for i in 0..2 * self.n {
            for j in 0..2 * self.n {
                let expect = (i + self.n == j) || (j + self.n == i);
                if symp_inner(&cols[i], &cols[j]) != expect {
                    return false;
                }
            }
        }
        true
    }
}

impl fmt::Debug for SympMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SympMat(n={}) {:?}", self.n, self.t)
    }
}

#[derive(Serialize, Deserialize)]
struct SympRepr {
    n: usize,
    #[serde(flatten)]
    t: BitMat,
}

impl Serialize for SympMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SympRepr { n: self.n, t: self.t.clone() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for SympMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = SympRepr::deserialize(d)?;
        SympMat::new(r.n, r.t).map_err(D::Error::custom)
    }
}

/// Uniform symplectic matrix whose first Z images are `z_prefix`.
///
/// Remaining Z images are sampled as an isotropic extension; X image `j` then
/// anticommutes with Z image `j` only and commutes with earlier X images.
pub fn extend_to_symplectic<R: Rng + ?Sized>(n: usize, z_prefix: &[PauliVec], rng: &mut R) -> Result<SympMat> {
    if z_prefix.len() > n {
        return Err(invalid("more than n commuting generators requested"));
    }
    IsotropicSet::new(n, z_prefix.to_vec())?;
    let mut z = z_prefix.to_vec();
    z.extend(sample_isotropic_extension(n, z_prefix, n - z_prefix.len(), ExtensionConstraints::default(), rng)?);
    let x = sample_x_images(n, &z, &[], rng)?;
    SympMat::from_images(&x, &z)
}

/// X images paired with the given Z images, each commuting with `fixed_x`
/// and all previously drawn X images.
pub fn sample_x_images<R: Rng + ?Sized>(
    n: usize,
    z: &[PauliVec],
    fixed_x: &[PauliVec],
    rng: &mut R,
) -> Result<Vec<PauliVec>> {
    let mut x: Vec<PauliVec> = Vec::with_capacity(z.len());
    for j in 0..z.len() {
        let mut cons: Vec<(&PauliVec, bool)> = z.iter().enumerate().map(|(i, zi)| (zi, i == j)).collect();
        cons.extend(x.iter().map(|xi| (xi, false)));
        cons.extend(fixed_x.iter().map(|xi| (xi, false)));
        x.push(sample_constrained(n, &cons, &[], rng)?);
    }
    Ok(x)
}

/// Uniform element of Sp(2n, GF(2)).
pub fn random_clifford_symp<R: Rng + ?Sized>(n: usize, rng: &mut R) -> SympMat {
    extend_to_symplectic(n, &[], rng).expect("unconstrained extension is always feasible")
}

/// Ordered tuples of `m` independent commuting Paulis on `n` qubits.
pub fn count_tableaus(n: usize, m: usize) -> Result<BigUint> {
    if m > n {
        return Err(invalid(format!("m = {m} exceeds n = {n}")));
    }
    let mut acc = BigUint::one();
    for i in 1..=m {
        let a = BigUint::one() << (2 * n - i + 1);
        let b = BigUint::one() << (i - 1);
        acc *= a - b;
    }
    Ok(acc)
}

pub fn gl_order(r: usize) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..r {
        acc *= (BigUint::one() << r) - (BigUint::one() << i);
    }
    acc
}

/// Number of distinct [[n, k]] stabilizer groups.
pub fn count_codes(n: usize, k: usize) -> Result<BigUint> {
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    Ok(count_tableaus(n, n - k)? / gl_order(n - k))
}

/// `log2` of a big integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    if bits <= 64 {
        return (x.to_u64().unwrap() as f64).log2();
    }
    let shift = bits - 64;
    ((x >> shift).to_u64().unwrap() as f64).log2() + shift as f64
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseBound {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    /// log2 of the number of [[n, k]] stabilizer codes.
    pub log2_codes: f64,
    /// Exact log2 of (sum_{i <= d} C(2n, i))^{2n}: tableaus with d-sparse columns.
    pub log2_sparse_tableaus: f64,
    /// Entropy estimate 2n * 2n * H2(d / 2n) of the same quantity.
    pub entropy_estimate: f64,
}

/// Counting comparison behind the sparse-Clifford no-go argument.
pub fn sparse_bound(n: usize, k: usize, d: usize) -> Result<SparseBound> {
    if d > 2 * n {
        return Err(invalid(format!("d = {d} exceeds 2n = {}", 2 * n)));
    }
    let codes = count_codes(n, k)?;
    let mut ball = BigUint::zero();
    for i in 0..=d {
        ball += binomial(2 * n as u64, i as u64);
    }
    let frac = d as f64 / (2 * n) as f64;
    let h2 = if frac <= 0.0 || frac >= 1.0 { 0.0 } else { -frac * frac.log2() - (1.0 - frac) * (1.0 - frac).log2() };
    Ok(SparseBound {
        n,
        k,
        d,
        log2_codes: log2_big(&codes),
        log2_sparse_tableaus: 2.0 * n as f64 * log2_big(&ball),
        entropy_estimate: (2 * n * 2 * n) as f64 * h2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inner_product_examples() {
        let x = symp_of_pauli("X").unwrap();
        let z = symp_of_pauli("Z").unwrap();
        assert!(x.symp_inner(&z));
        assert!(!x.symp_inner(&x));
        let a = symp_of_pauli("XZ").unwrap();
        let b = symp_of_pauli("ZX").unwrap();
        assert!(!a.symp_inner(&b));
    }

    #[test]
    fn letters_layout() {
        let p = symp_of_pauli("XZ").unwrap();
        assert_eq!(p.bits().to_bools(), vec![true, false, false, true]);
        assert_eq!(pauli_weight(&p), 2);
        let y = symp_of_pauli("YII").unwrap();
        assert_eq!(y.bits().to_bools(), vec![true, false, false, true, false, false]);
        assert_eq!(pauli_weight(&y), 1);
        assert!(symp_of_pauli("XQ").is_err());
        let prod = pauli_mul(&symp_of_pauli("X").unwrap(), &symp_of_pauli("Z").unwrap());
        assert_eq!(prod.to_string(), "Y");
    }

    #[test]
    fn json_shape() {
        let p = symp_of_pauli("XYZI").unwrap();
        let j = serde_json::to_value(&p).unwrap();
        assert_eq!(j, serde_json::json!({"n": 4, "x_hex": "03", "z_hex": "06"}));
        let back: PauliVec = serde_json::from_value(j).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn n1_extension_uniform_over_nonzero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut hist = [0usize; 4];
        let trials = 30_000;
        for _ in 0..trials {
            let v = sample_isotropic_extension(1, &[], 1, Default::default(), &mut rng).unwrap();
            hist[v[0].bits().as_u64() as usize] += 1;
        }
        assert_eq!(hist[0], 0);
        for &h in &hist[1..] {
            assert!((h as f64 / trials as f64 - 1.0 / 3.0).abs() < 0.015);
        }
    }

    #[test]
    fn overfull_isotropic_request_is_infeasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let r = sample_isotropic_extension(2, &[], 3, Default::default(), &mut rng);
        assert!(matches!(r, Err(Error::Infeasible(_))));
        let logical = [symp_of_pauli("XI").unwrap(), symp_of_pauli("IX").unwrap()];
        let ext = ExtensionConstraints { orthogonal_to: &[], anticommute_with: &logical };
        assert!(sample_isotropic_extension(2, &[], 3, ext, &mut rng).is_err());
    }

    #[test]
    fn random_symplectic_pairs_images() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..6 {
            let t = random_clifford_symp(n, &mut rng);
            assert!(t.is_symplectic());
            assert!(t.z_image(0).symp_inner(&t.x_image(0)));
            assert_eq!(t.compose(&t.inverse()), SympMat::identity(n));
        }
    }

    #[test]
    fn counting_examples() {
        assert_eq!(count_tableaus(1, 1).unwrap(), BigUint::from(3u32));
        assert_eq!(count_tableaus(2, 2).unwrap(), BigUint::from(90u32));
        assert_eq!(count_codes(2, 1).unwrap(), BigUint::from(15u32));
        assert_eq!(gl_order(2), BigUint::from(6u32));
        assert!(count_tableaus(2, 3).is_err());
        assert!((log2_big(&(BigUint::one() << 100)) - 100.0).abs() < 1e-12);
    }
}
