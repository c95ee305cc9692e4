//! Sign-tracking stabilizer tableau simulator.
//!
//! Rows `0..n` are destabilizers, rows `n..2n` stabilizers. A row `(P, r)`
//! stands for `(-1)^r P` with `P` a tensor product of Hermitian letters.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gf2::{BitMat, BitVec};
use crate::symplectic::{random_clifford_symp, symp_inner, PauliVec, SympMat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    S(usize),
    CX(usize, usize),
}

#[derive(Serialize, Deserialize)]
struct GateRepr {
    op: String,
    targets: Vec<usize>,
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (op, targets) = match *self {
            Gate::H(a) => ("H", vec![a]),
            Gate::S(a) => ("S", vec![a]),
            Gate::CX(a, b) => ("CX", vec![a, b]),
        };
        GateRepr { op: op.into(), targets }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = GateRepr::deserialize(d)?;
        match (r.op.as_str(), r.targets.as_slice()) {
            ("H", &[a]) => Ok(Gate::H(a)),
            ("S", &[a]) => Ok(Gate::S(a)),
            ("CX", &[a, b]) if a != b => Ok(Gate::CX(a, b)),
            _ => Err(D::Error::custom(format!("bad gate {} {:?}", r.op, r.targets))),
        }
    }
}

impl Gate {
    fn check(&self, n: usize) -> Result<()> {
        let ok = match *self {
            Gate::H(a) | Gate::S(a) => a < n,
            Gate::CX(a, b) => a < n && b < n && a != b,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(format!("gate {self:?} out of range for {n} qubits")))
        }
    }

    /// Conjugates `(P, r)` in place; returns the new sign.
    #[inline]
    fn conj(&self, p: &mut PauliVec, r: bool) -> bool {
        match *self {
            Gate::H(a) => {
                let (x, z) = (p.x(a), p.z(a));
                p.set_x(a, z);
                p.set_z(a, x);
                r ^ (x & z)
            }
            Gate::S(a) => {
                let (x, z) = (p.x(a), p.z(a));
                p.set_z(a, z ^ x);
                r ^ (x & z)
            }
            Gate::CX(a, b) => {
                let (xa, za, xb, zb) = (p.x(a), p.z(a), p.x(b), p.z(b));
                p.set_x(b, xb ^ xa);
                p.set_z(a, za ^ zb);
                r ^ (xa & zb & !(xb ^ za))
            }
        }
    }
}

/// Exponent of `i` in `P(x1,z1) P(x2,z2) = i^g P(x1+x2, z1+z2)`.
#[inline]
fn g(x1: bool, z1: bool, x2: bool, z2: bool) -> i32 {
    let (x2, z2) = (x2 as i32, z2 as i32);
    match (x1, z1) {
        (false, false) => 0,
        (true, true) => z2 - x2,
        (true, false) => z2 * (2 * x2 - 1),
        (false, true) => x2 * (1 - 2 * z2),
    }
}

/// Signed product `a * b` of two commuting signed Paulis.
fn signed_product(a: &PauliVec, ra: bool, b: &PauliVec, rb: bool) -> (PauliVec, bool) {
    let n = a.n();
    let mut e = 2 * (ra as i32) + 2 * (rb as i32);
    for j in 0..n {
        e += g(a.x(j), a.z(j), b.x(j), b.z(j));
    }
    let e = e.rem_euclid(4);
    debug_assert!(e % 2 == 0, "product of anticommuting rows");
    (a.mul(b), e == 2)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabState {
    n: usize,
    rows: Vec<PauliVec>,
    signs: Vec<bool>,
}

/// Result of measuring a Pauli observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// 0 for the +1 eigenvalue, 1 for -1.
    pub bit: bool,
    pub deterministic: bool,
}

impl StabState {
    /// `|x>` in the computational basis.
    pub fn basis(n: usize, x: &BitVec) -> Result<Self> {
        if x.len() != n {
            return Err(Error::Dimension(format!("basis label has {} bits, need {n}", x.len())));
        }
        let mut rows = Vec::with_capacity(2 * n);
        let mut signs = vec![false; 2 * n];
        for i in 0..n {
            rows.push(PauliVec::x_on(n, i));
        }
        for i in 0..n {
            rows.push(PauliVec::z_on(n, i));
            signs[n + i] = x.get(i);
        }
        Ok(StabState { n, rows, signs })
    }

    pub fn zero(n: usize) -> Self {
        Self::basis(n, &BitVec::zeros(n)).expect("length matches")
    }

    /// Tableau with the given signed destabilizers and stabilizers.
    pub fn from_generators(destabilizers: Vec<(PauliVec, bool)>, stabilizers: Vec<(PauliVec, bool)>) -> Result<Self> {
        let n = stabilizers.len();
        if destabilizers.len() != n {
            return Err(Error::Dimension("need n destabilizers and n stabilizers".into()));
        }
        let (mut rows, mut signs): (Vec<_>, Vec<_>) = destabilizers.into_iter().unzip();
        let (r2, s2): (Vec<_>, Vec<_>) = stabilizers.into_iter().unzip();
        rows.extend(r2);
        signs.extend(s2);
        let st = StabState { n, rows, signs };
        st.check_invariants()?;
        Ok(st)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn stabilizers(&self) -> Vec<(PauliVec, bool)> {
        (self.n..2 * self.n).map(|i| (self.rows[i].clone(), self.signs[i])).collect()
    }

    pub fn destabilizers(&self) -> Vec<(PauliVec, bool)> {
        (0..self.n).map(|i| (self.rows[i].clone(), self.signs[i])).collect()
    }

    pub fn stabilizer(&self, i: usize) -> (&PauliVec, bool) {
        (&self.rows[self.n + i], self.signs[self.n + i])
    }

    pub fn destabilizer(&self, i: usize) -> (&PauliVec, bool) {
        (&self.rows[i], self.signs[i])
    }

    /// Commutation, pairing and rank invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n;
        for i in 0..2 * n {
            for j in i + 1..2 * n {
                let expect = j == i + n && i < n;
                if symp_inner(&self.rows[i], &self.rows[j]) != expect {
                    return Err(invalid(format!("tableau rows {i} and {j} pair incorrectly")));
                }
            }
        }
        let m = BitMat::from_rows(2 * n, self.rows.iter().map(|r| r.bits().clone()).collect());
        if m.rank() != 2 * n {
            return Err(invalid("tableau rows are dependent"));
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: Gate) -> Result<()> {
        gate.check(self.n)?;
        for (row, s) in self.rows.iter_mut().zip(self.signs.iter_mut()) {
            *s = gate.conj(row, *s);
        }
        Ok(())
    }

    /// Conjugation by a phase-free Pauli: flips the sign of anticommuting rows.
    pub fn apply_pauli(&mut self, p: &PauliVec) -> Result<()> {
        if p.n() != self.n {
            return Err(Error::Dimension("Pauli qubit count mismatch".into()));
        }
        for (row, s) in self.rows.iter().zip(self.signs.iter_mut()) {
            *s ^= symp_inner(row, p);
        }
        Ok(())
    }

    pub fn apply_clifford(&mut self, c: &CliffordDesc) -> Result<()> {
        if c.n != self.n {
            return Err(Error::Dimension("Clifford qubit count mismatch".into()));
        }
        for &gate in &c.gates {
            self.apply_gate(gate)?;
        }
        self.apply_pauli(&c.pauli_frame)?;
        debug_assert!(self.check_invariants().is_ok());
        Ok(())
    }

    /// Outcome of measuring `(-1)^sign P` if it is deterministic.
    pub fn peek(&self, p: &PauliVec, sign: bool) -> Option<bool> {
        let n = self.n;
        if (n..2 * n).any(|i| symp_inner(&self.rows[i], p)) {
            return None;
        }
        let mut acc = PauliVec::identity(n);
        let mut r = false;
        for i in 0..n {
            if symp_inner(&self.rows[i], p) {
                let (prod, rr) = signed_product(&self.rows[n + i], self.signs[n + i], &acc, r);
                acc = prod;
                r = rr;
            }
        }
        debug_assert_eq!(&acc, p);
        Some(r ^ sign)
    }

    /// Projective measurement of `(-1)^sign P`.
    pub fn measure_pauli<R: Rng + ?Sized>(&mut self, p: &PauliVec, sign: bool, rng: &mut R) -> Outcome {
        assert_eq!(p.n(), self.n, "Pauli qubit count mismatch");
        if let Some(bit) = self.peek(p, sign) {
            return Outcome { bit, deterministic: true };
        }
        let n = self.n;
        let piv = (n..2 * n).find(|&i| symp_inner(&self.rows[i], p)).expect("anticommuting row");
        let (prow, psign) = (self.rows[piv].clone(), self.signs[piv]);
        for i in 0..2 * n {
            if i != piv && i != piv - n && symp_inner(&self.rows[i], p) {
                let (prod, r) = signed_product(&prow, psign, &self.rows[i], self.signs[i]);
                self.rows[i] = prod;
                self.signs[i] = r;
            }
        }
        let bit: bool = rng.random();
        self.rows[piv - n] = prow;
        self.signs[piv - n] = psign;
        self.rows[piv] = p.clone();
        self.signs[piv] = bit ^ sign;
        debug_assert!(self.check_invariants().is_ok());
        Outcome { bit, deterministic: false }
    }

    /// Syndrome of the state with respect to signed commuting generators.
    pub fn measure_syndrome<R: Rng + ?Sized>(
        &mut self,
        generators: &[(PauliVec, bool)],
        rng: &mut R,
    ) -> Result<BitVec> {
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if symp_inner(&generators[i].0, &generators[j].0) {
                    return Err(invalid("syndrome generators do not commute"));
                }
            }
        }
        let mut s = BitVec::zeros(generators.len());
        for (j, (g, sign)) in generators.iter().enumerate() {
            if self.measure_pauli(g, *sign, rng).bit {
                s.set(j, true);
            }
        }
        Ok(s)
    }

    pub fn measure_all_z<R: Rng + ?Sized>(&mut self, rng: &mut R) -> BitVec {
        let mut out = BitVec::zeros(self.n);
        for i in 0..self.n {
            if self.measure_pauli(&PauliVec::z_on(self.n, i), false, rng).bit {
                out.set(i, true);
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct SignedRepr {
    pauli: PauliVec,
    sign: bool,
}

#[derive(Serialize, Deserialize)]
struct StateRepr {
    n: usize,
    destabilizers: Vec<SignedRepr>,
    stabilizers: Vec<SignedRepr>,
}

impl Serialize for StabState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let conv = |v: Vec<(PauliVec, bool)>| v.into_iter().map(|(pauli, sign)| SignedRepr { pauli, sign }).collect();
        StateRepr { n: self.n, destabilizers: conv(self.destabilizers()), stabilizers: conv(self.stabilizers()) }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StabState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = StateRepr::deserialize(d)?;
        let conv = |v: Vec<SignedRepr>| v.into_iter().map(|s| (s.pauli, s.sign)).collect();
        let st = StabState::from_generators(conv(r.destabilizers), conv(r.stabilizers)).map_err(D::Error::custom)?;
        if st.n != r.n {
            return Err(D::Error::custom("generator count differs from n"));
        }
        Ok(st)
    }
}

/// Gate sequence followed by a Pauli frame.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordDesc {
    pub n: usize,
    pub gates: Vec<Gate>,
    pub pauli_frame: PauliVec,
}

impl CliffordDesc {
    pub fn identity(n: usize) -> Self {
        CliffordDesc { n, gates: Vec::new(), pauli_frame: PauliVec::identity(n) }
    }

    pub fn pauli(p: PauliVec) -> Self {
        CliffordDesc { n: p.n(), gates: Vec::new(), pauli_frame: p }
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> Result<Self> {
        for g in &gates {
            g.check(n)?;
        }
        Ok(CliffordDesc { n, gates, pauli_frame: PauliVec::identity(n) })
    }

    pub fn validate(&self) -> Result<()> {
        if self.pauli_frame.n() != self.n {
            return Err(Error::Dimension("Pauli frame qubit count mismatch".into()));
        }
        for g in &self.gates {
            g.check(self.n)?;
        }
        Ok(())
    }

    /// Phase-free action.
    pub fn symp(&self) -> SympMat {
        let t = self.tableau();
        let x: Vec<PauliVec> = (0..self.n).map(|i| t.rows[i].clone()).collect();
        let z: Vec<PauliVec> = (0..self.n).map(|i| t.rows[self.n + i].clone()).collect();
        SympMat::from_images(&x, &z).expect("gates preserve the symplectic form")
    }

    /// `C |0^n>`; destabilizer `i` is `C X_i C^dag`, stabilizer `i` is `C Z_i C^dag`, with signs.
    pub fn tableau(&self) -> StabState {
        let mut st = StabState::zero(self.n);
        st.apply_clifford(self).expect("validated description");
        st
    }

    /// `C P C^dag` up to phase.
    pub fn conjugate(&self, p: &PauliVec) -> PauliVec {
        let mut q = p.clone();
        for g in &self.gates {
            g.conj(&mut q, false);
        }
        q
    }

    /// Circuit running `self` first, then `next`.
    pub fn then(&self, next: &CliffordDesc) -> CliffordDesc {
        assert_eq!(self.n, next.n, "qubit count mismatch");
        let mut gates = self.gates.clone();
        gates.extend(next.gates.iter().copied());
        let frame = next.conjugate(&self.pauli_frame).mul(&next.pauli_frame);
        CliffordDesc { n: self.n, gates, pauli_frame: frame }
    }

    /// Circuit with the given symplectic action and image signs:
    /// `C X_i C^dag = (-1)^{x_signs_i} T(X_i)`, likewise for Z.
    pub fn from_symp(t: &SympMat, x_signs: &BitVec, z_signs: &BitVec) -> Result<Self> {
        let n = t.n();
        if x_signs.len() != n || z_signs.len() != n {
            return Err(Error::Dimension("sign vectors must have length n".into()));
        }
        let gates = synthesize(t);
        let mut c = CliffordDesc { n, gates, pauli_frame: PauliVec::identity(n) };
        let tab = c.tableau();
        let mut rows = Vec::with_capacity(2 * n);
        let mut rhs = BitVec::zeros(2 * n);
        for i in 0..2 * n {
            rows.push(tab.rows[i].omega());
            let want = if i < n { x_signs.get(i) } else { z_signs.get(i - n) };
            rhs.set(i, want ^ tab.signs[i]);
        }
        let f = BitMat::from_rows(2 * n, rows).solve_any(&rhs).expect("images form a basis");
        c.pauli_frame = PauliVec::from_bits(n, f)?;
        Ok(c)
    }

    /// Uniform symplectic action with uniform image signs.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let t = random_clifford_symp(n, rng);
        let xs = BitVec::random(n, rng);
        let zs = BitVec::random(n, rng);
        Self::from_symp(&t, &xs, &zs).expect("valid symplectic input")
    }
}

/// Gate list whose phase-free action is `t`, by qubit-wise elimination.
pub fn synthesize(t: &SympMat) -> Vec<Gate> {
    let n = t.n();
    let mut d: Vec<PauliVec> = (0..n).map(|i| t.x_image(i)).collect();
    let mut s: Vec<PauliVec> = (0..n).map(|i| t.z_image(i)).collect();
    let mut rec: Vec<Gate> = Vec::new();
    let mut apply = |gate: Gate, d: &mut Vec<PauliVec>, s: &mut Vec<PauliVec>| {
        for p in d.iter_mut().chain(s.iter_mut()) {
            gate.conj(p, false);
        }
        rec.push(gate);
    };
    for i in 0..n {
        for q in i..n {
            match d[i].letter(q) {
                'Z' => apply(Gate::H(q), &mut d, &mut s),
                'Y' => apply(Gate::S(q), &mut d, &mut s),
                _ => {}
            }
        }
        if !d[i].x(i) {
            let q = (i + 1..n).find(|&q| d[i].x(q)).expect("image of X_i is supported on qubits >= i");
            apply(Gate::CX(q, i), &mut d, &mut s);
        }
        for q in i + 1..n {
            if d[i].x(q) {
                apply(Gate::CX(i, q), &mut d, &mut s);
            }
        }
        for q in i + 1..n {
            match s[i].letter(q) {
                'X' => apply(Gate::H(q), &mut d, &mut s),
                'Y' => {
                    apply(Gate::S(q), &mut d, &mut s);
                    apply(Gate::H(q), &mut d, &mut s);
                }
                _ => {}
            }
        }
        for q in i + 1..n {
            if s[i].z(q) {
                apply(Gate::CX(q, i), &mut d, &mut s);
            }
        }
        if s[i].x(i) {
            apply(Gate::H(i), &mut d, &mut s);
            apply(Gate::S(i), &mut d, &mut s);
            apply(Gate::H(i), &mut d, &mut s);
        }
    }
    let mut out = Vec::with_capacity(rec.len());
    for &g in rec.iter().rev() {
        match g {
            Gate::S(a) => out.extend([Gate::S(a); 3]),
            other => out.push(other),
        }
    }
    out
}

/// Controlled version of a phase-free Pauli, exact up to global phase.
pub fn controlled_pauli(n: usize, control: usize, p: &PauliVec) -> Result<Vec<Gate>> {
    if control >= n || p.n() != n || p.x(control) || p.z(control) {
        return Err(invalid("controlled Pauli must avoid the control qubit"));
    }
    let mut gates = Vec::new();
    for q in 0..n {
        match p.letter(q) {
            'X' => gates.push(Gate::CX(control, q)),
            'Z' => gates.extend([Gate::H(q), Gate::CX(control, q), Gate::H(q)]),
            'Y' => gates.extend([Gate::S(q), Gate::S(q), Gate::S(q), Gate::CX(control, q), Gate::S(q)]),
            _ => {}
        }
    }
    Ok(gates)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn basis_state_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let x = BitVec::from_bools(&[true, false, true]);
        let mut st = StabState::basis(3, &x).unwrap();
        assert!(st.stabilizer(0).1);
        assert!(!st.stabilizer(1).1);
        assert_eq!(st.measure_all_z(&mut rng), x);
    }

    #[test]
    fn hadamard_gives_fair_coin() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut ones = 0;
        for _ in 0..10_000 {
            let mut st = StabState::zero(1);
            st.apply_gate(Gate::H(0)).unwrap();
            ones += st.measure_all_z(&mut rng).get(0) as usize;
        }
        assert!((ones as f64 / 1e4 - 0.5).abs() < 0.02);
    }

    #[test]
    fn cnot_truth_table_and_pauli() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut st = StabState::basis(2, &BitVec::from_bools(&[true, false])).unwrap();
        st.apply_gate(Gate::CX(0, 1)).unwrap();
        assert_eq!(st.measure_all_z(&mut rng).to_bools(), vec![true, true]);
        let mut st = StabState::zero(3);
        st.apply_pauli(&PauliVec::x_on(3, 0)).unwrap();
        assert_eq!(st.measure_all_z(&mut rng).to_bools(), vec![true, false, false]);
        assert!(st.apply_gate(Gate::CX(1, 1)).is_err());
        assert!(st.apply_gate(Gate::H(3)).is_err());
    }

    #[test]
    fn synthesis_reproduces_symplectic_action_and_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..7 {
            for _ in 0..20 {
                let t = random_clifford_symp(n, &mut rng);
                let xs = BitVec::random(n, &mut rng);
                let zs = BitVec::random(n, &mut rng);
                let c = CliffordDesc::from_symp(&t, &xs, &zs).unwrap();
                assert_eq!(c.symp(), t);
                let tab = c.tableau();
                for i in 0..n {
                    assert_eq!(tab.destabilizer(i).1, xs.get(i));
                    assert_eq!(tab.stabilizer(i).1, zs.get(i));
                }
            }
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let a = CliffordDesc::random(4, &mut rng);
            let b = CliffordDesc::random(4, &mut rng);
            let mut s1 = StabState::zero(4);
            s1.apply_clifford(&a).unwrap();
            s1.apply_clifford(&b).unwrap();
            assert_eq!(s1, a.then(&b).tableau());
        }
    }

    #[test]
    fn controlled_pauli_acts_by_control() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = PauliVec::from_bits(3, BitVec::from_bools(&[false, true, true, false, true, false])).unwrap();
        let gates = controlled_pauli(3, 0, &p).unwrap();
        let c = CliffordDesc::from_gates(3, gates).unwrap();
        for ctrl in [false, true] {
            let x = BitVec::from_bools(&[ctrl, false, true]);
            let mut via = StabState::basis(3, &x).unwrap();
            via.apply_clifford(&c).unwrap();
            let mut direct = StabState::basis(3, &x).unwrap();
            if ctrl {
                direct.apply_pauli(&p).unwrap();
            }
            for i in 0..3 {
                let z = PauliVec::z_on(3, i);
                assert_eq!(via.peek(&z, false), direct.peek(&z, false));
            }
            let mut v2 = via.clone();
            let mut d2 = direct.clone();
            assert_eq!(v2.measure_all_z(&mut rng), d2.measure_all_z(&mut rng));
        }
    }
}
