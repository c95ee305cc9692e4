//! Dense bit-packed linear algebra over GF(2).
//!
//! Bits are stored least-significant-first inside `u64` words. Hex encodings
//! use `ceil(len / 8)` bytes, least-significant byte first, lowercase.

use std::cmp::Ordering;
use std::fmt;

use rand::Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

const W: usize = 64;

#[inline]
fn nwords(len: usize) -> usize {
    len.div_ceil(W)
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; nwords(len)] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Low `len` bits of `x`, bit `i` of the vector is bit `i` of `x`.
    pub fn from_u64(len: usize, x: u64) -> Self {
        assert!(len <= W);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = if len == W { x } else { x & ((1u64 << len) - 1) };
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.random();
        }
        v.trim();
        v
    }

    /// Independent Bernoulli(p) bits.
    pub fn bernoulli<R: Rng + ?Sized>(len: usize, p: f64, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            if rng.random_bool(p) {
                v.set(i, true);
            }
        }
        v
    }

    fn trim(&mut self) {
        let r = self.len % W;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// First word; only meaningful for vectors of length at most 64.
    #[inline]
    pub fn as_u64(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / W] >> (i % W)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, b: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i % W);
        if b {
            self.words[i / W] |= m;
        } else {
            self.words[i / W] &= !m;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / W] ^= 1u64 << (i % W);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut v = self.clone();
        v.xor_assign(other);
        v
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones();
        }
        acc & 1 == 1
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        assert!(start <= end && end <= self.len);
        let mut v = BitVec::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                v.set(i - start, true);
            }
        }
        v
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut v = BitVec::zeros(self.len + other.len);
        for i in self.iter_ones() {
            v.set(i, true);
        }
        for i in other.iter_ones() {
            v.set(self.len + i, true);
        }
        v
    }

    pub fn to_hex(&self) -> String {
        let nbytes = self.len.div_ceil(8);
        let mut bytes = Vec::with_capacity(nbytes);
        for b in 0..nbytes {
            bytes.push((self.words[b / 8] >> (8 * (b % 8))) as u8);
        }
        hex::encode(bytes)
    }

    pub fn from_hex(len: usize, s: &str) -> Result<Self> {
        let bytes = hex::decode(s).map_err(|e| Error::Parse(format!("bad hex: {e}")))?;
        if bytes.len() != len.div_ceil(8) {
            return Err(Error::Parse(format!("hex of {} bytes cannot encode {} bits", bytes.len(), len)));
        }
        let mut v = BitVec::zeros(len);
        for (b, &byte) in bytes.iter().enumerate() {
            v.words[b / 8] |= (byte as u64) << (8 * (b % 8));
        }
        let before = v.clone();
        v.trim();
        if v != before {
            return Err(Error::Parse("hex has bits set beyond length".into()));
        }
        Ok(v)
    }
}

impl Ord for BitVec {
    /// Lexicographic in bit index order with 0 < 1; shorter vectors first.
    fn cmp(&self, other: &Self) -> Ordering {
        match self.len.cmp(&other.len) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.words.iter().zip(&other.words) {
            if a != b {
                let d = a ^ b;
                let low = d.trailing_zeros();
                return if (a >> low) & 1 == 0 { Ordering::Less } else { Ordering::Greater };
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for BitVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "BitVec({s})")
    }
}

#[derive(Serialize, Deserialize)]
struct BitVecRepr {
    len: usize,
    hex: String,
}

impl Serialize for BitVec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BitVecRepr { len: self.len, hex: self.to_hex() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitVec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BitVecRepr::deserialize(d)?;
        BitVec::from_hex(r.len, &r.hex).map_err(D::Error::custom)
    }
}

/// Row-major dense matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMat {
    rows: usize,
    cols: usize,
    data: Vec<BitVec>,
}

/// Reduced row echelon form together with its pivot columns.
pub struct Rref {
    pub mat: BitMat,
    pub pivots: Vec<usize>,
}

impl BitMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMat { rows, cols, data: vec![BitVec::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        BitMat { rows, cols, data: (0..rows).map(|_| BitVec::random(cols, rng)).collect() }
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVec>) -> Self {
        assert!(rows.iter().all(|r| r.len() == cols), "row length mismatch");
        BitMat { rows: rows.len(), cols, data: rows }
    }

    pub fn from_cols(rows: usize, cols: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column length mismatch");
            for i in c.iter_ones() {
                m.set(i, j, true);
            }
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        self.data[i].set(j, b)
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.data[i]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut BitVec {
        &mut self.data[i]
    }

    pub fn row_vecs(&self) -> &[BitVec] {
        &self.data
    }

    pub fn col(&self, j: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.get(i, j) {
                v.set(i, true);
            }
        }
        v
    }

    pub fn col_vecs(&self) -> Vec<BitVec> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn transpose(&self) -> BitMat {
        let mut t = BitMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.data[i].iter_ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &BitVec) -> BitVec {
        assert_eq!(self.cols, x.len(), "dimension mismatch");
        let mut y = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            if self.data[i].dot(x) {
                y.set(i, true);
            }
        }
        y
    }

    pub fn mul(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = BitMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let mut acc = BitVec::zeros(other.cols);
            for k in self.data[i].iter_ones() {
                acc.xor_assign(&other.data[k]);
            }
            out.data[i] = acc;
        }
        out
    }

    pub fn add(&self, other: &BitMat) -> BitMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.xor_assign(b);
        }
        out
    }

    pub fn hstack(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.rows, other.rows);
        BitMat {
            rows: self.rows,
            cols: self.cols + other.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a.concat(b)).collect(),
        }
    }

    pub fn vstack(&self, other: &BitMat) -> BitMat {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        BitMat { rows: self.rows + other.rows, cols: self.cols, data }
    }

    pub fn row_range(&self, start: usize, end: usize) -> BitMat {
        BitMat { rows: end - start, cols: self.cols, data: self.data[start..end].to_vec() }
    }

    pub fn col_range(&self, start: usize, end: usize) -> BitMat {
        BitMat { rows: self.rows, cols: end - start, data: self.data.iter().map(|r| r.slice(start, end)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|r| r.is_zero())
    }

    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| m.data[i].get(c)) else { continue };
            m.data.swap(r, p);
            let prow = m.data[r].clone();
            for i in 0..self.rows {
                if i != r && m.data[i].get(c) {
                    m.data[i].xor_assign(&prow);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { mat: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().pivots.len()
    }

    pub fn is_full_col_rank(&self) -> bool {
        self.rank() == self.cols
    }

    /// True iff `v` lies in the column span.
    pub fn col_span_contains(&self, v: &BitVec) -> bool {
        self.solve_any(v).is_some()
    }

    fn solve_inner(&self, b: &BitVec, mut free: impl FnMut() -> bool) -> Option<BitVec> {
        assert_eq!(b.len(), self.rows, "rhs length mismatch");
        let aug = self.hstack(&BitMat::from_cols(self.rows, std::slice::from_ref(b)));
        let Rref { mat, pivots } = aug.rref();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = BitVec::zeros(self.cols);
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        for (j, &piv) in is_pivot.iter().enumerate() {
            if !piv && free() {
                x.set(j, true);
            }
        }
        for (r, &p) in pivots.iter().enumerate() {
            let row = &mat.data[r];
            let mut val = row.get(self.cols);
            for j in row.iter_ones() {
                if j != p && j < self.cols && x.get(j) {
                    val = !val;
                }
            }
            x.set(p, val);
        }
        Some(x)
    }

    /// Solution of `A x = b` with all free variables zero.
    pub fn solve_any(&self, b: &BitVec) -> Option<BitVec> {
        self.solve_inner(b, || false)
    }

    /// Uniformly random solution of `A x = b`, or `None` if inconsistent.
    pub fn solve_random<R: Rng + ?Sized>(&self, b: &BitVec, rng: &mut R) -> Option<BitVec> {
        self.solve_inner(b, || rng.random())
    }

    /// Basis of `{x : A x = 0}`, one vector per free column.
    pub fn nullspace_basis(&self) -> Vec<BitVec> {
        let Rref { mat, pivots } = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for f in (0..self.cols).filter(|&j| !is_pivot[j]) {
            let mut x = BitVec::unit(self.cols, f);
            for (r, &p) in pivots.iter().enumerate() {
                if mat.data[r].get(f) {
                    x.set(p, true);
                }
            }
            basis.push(x);
        }
        basis
    }

    pub fn inverse(&self) -> Option<BitMat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let Rref { mat, pivots } = self.hstack(&BitMat::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        Some(mat.col_range(n, 2 * n))
    }

    /// Uniform element of GL_n(GF(2)) by rejection.
    pub fn random_invertible<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BitMat {
        loop {
            let m = BitMat::random(n, n, rng);
            if m.rank() == n {
                return m;
            }
        }
    }
}

impl fmt::Debug for BitMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMat {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            let s: String = (0..self.cols).map(|j| if r.get(j) { '1' } else { '.' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct BitMatRepr {
    rows: usize,
    cols: usize,
    data: Vec<String>,
}

impl BitMat {
    pub fn from_hex_rows(rows: usize, cols: usize, data: &[String]) -> Result<Self> {
        if data.len() != rows {
            return Err(Error::Parse(format!("expected {rows} rows, got {}", data.len())));
        }
        let data = data.iter().map(|h| BitVec::from_hex(cols, h)).collect::<Result<Vec<_>>>()?;
        Ok(BitMat { rows, cols, data })
    }
}

impl Serialize for BitMat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BitMatRepr { rows: self.rows, cols: self.cols, data: self.data.iter().map(|r| r.to_hex()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitMat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = BitMatRepr::deserialize(d)?;
        BitMat::from_hex_rows(r.rows, r.cols, &r.data).map_err(D::Error::custom)
    }
}

/// Number of invertible n x n matrices over GF(2), as f64 (exact for n <= 8).
pub fn gl_order_f64(n: usize) -> f64 {
    (0..n).map(|i| 2f64.powi(n as i32) - 2f64.powi(i as i32)).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn brute_rank(rows: &[u64], cols: usize) -> usize {
        // size of the row span, by enumeration
        let mut span = std::collections::HashSet::new();
        for mask in 0u64..(1 << rows.len()) {
            let mut acc = 0u64;
            for (i, r) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    acc ^= r;
                }
            }
            span.insert(acc & ((1 << cols) - 1));
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_matches_span_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let r = rng.random_range(1..6);
            let c = rng.random_range(1..7);
            let m = BitMat::random(r, c, &mut rng);
            let raw: Vec<u64> = m.row_vecs().iter().map(|v| v.as_u64()).collect();
            assert_eq!(m.rank(), brute_rank(&raw, c));
        }
    }

    #[test]
    fn rank_small_examples() {
        assert_eq!(BitMat::identity(5).rank(), 5);
        assert_eq!(BitMat::zeros(3, 4).rank(), 0);
        let m = BitMat::from_rows(
            3,
            vec![BitVec::from_u64(3, 0b011), BitVec::from_u64(3, 0b110), BitVec::from_u64(3, 0b101)],
        );
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn solve_random_is_uniform_over_solution_coset() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        // rank-2 system in 4 unknowns: 4 solutions
        let a = BitMat::from_rows(4, vec![BitVec::from_u64(4, 0b0011), BitVec::from_u64(4, 0b0110)]);
        let b = BitVec::from_u64(2, 0b01);
        let mut hist: HashMap<u64, usize> = HashMap::new();
        let trials = 40_000;
        for _ in 0..trials {
            let x = a.solve_random(&b, &mut rng).unwrap();
            assert_eq!(a.mul_vec(&x), b);
            *hist.entry(x.as_u64()).or_default() += 1;
        }
        let brute: Vec<u64> = (0..16).filter(|&x| a.mul_vec(&BitVec::from_u64(4, x)) == b).collect();
        assert_eq!(hist.len(), brute.len());
        for x in brute {
            let f = hist[&x] as f64 / trials as f64;
            assert!((f - 0.25).abs() < 0.015, "freq {f}");
        }
    }

    #[test]
    fn inconsistent_system_has_no_solution() {
        let a = BitMat::from_rows(2, vec![BitVec::from_u64(2, 0b11), BitVec::from_u64(2, 0b11)]);
        assert!(a.solve_any(&BitVec::from_u64(2, 0b01)).is_none());
    }

    #[test]
    fn gl2_sampler_hits_all_six_uniformly() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hist: HashMap<Vec<u64>, usize> = HashMap::new();
        let trials = 60_000;
        for _ in 0..trials {
            let m = BitMat::random_invertible(2, &mut rng);
            *hist.entry(m.row_vecs().iter().map(|r| r.as_u64()).collect()).or_default() += 1;
        }
        assert_eq!(hist.len(), 6);
        for (_, c) in hist {
            assert!((c as f64 / trials as f64 - 1.0 / 6.0).abs() < 0.01);
        }
    }

    #[test]
    fn nullspace_dimension_and_membership() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let m = BitMat::random(4, 7, &mut rng);
            let ns = m.nullspace_basis();
            assert_eq!(ns.len(), 7 - m.rank());
            for v in &ns {
                assert!(m.mul_vec(v).is_zero());
            }
            assert_eq!(BitMat::from_cols(7, &ns).rank(), ns.len());
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = BitMat::random_invertible(9, &mut rng);
        assert_eq!(m.mul(&m.inverse().unwrap()), BitMat::identity(9));
    }

    #[test]
    fn hex_layout() {
        let v = BitVec::from_bools(&[true, false, false, false, false, false, false, false, false, true]);
        assert_eq!(v.to_hex(), "0102");
        assert_eq!(BitVec::from_hex(10, "0102").unwrap(), v);
        assert!(BitVec::from_hex(10, "01f2").is_err());
    }

    #[test]
    fn lex_order_is_bit_zero_first() {
        let a = BitVec::from_u64(3, 0b100);
        let b = BitVec::from_u64(3, 0b001);
        assert!(a < b);
    }
}
