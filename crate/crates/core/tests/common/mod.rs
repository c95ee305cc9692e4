//! Dense-matrix and state-vector references shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64 as C;
use stabnoise::stabsim::{CliffordDesc, Gate};
use stabnoise::{BitVec, PauliVec};

pub type Mat = Vec<Vec<C>>;

pub fn zeros(d: usize) -> Mat {
    vec![vec![C::new(0.0, 0.0); d]; d]
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut out = zeros(d);
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn close(a: &Mat, b: &Mat) -> bool {
    a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - y).norm() < 1e-9)
}

/// `a = c b` for some unit `c`.
pub fn equal_up_to_phase(a: &Mat, b: &Mat) -> bool {
    let Some((x, y)) = a.iter().flatten().zip(b.iter().flatten()).find(|(_, y)| y.norm() > 1e-9) else {
        return false;
    };
    let c = x / y;
    (c.norm() - 1.0).abs() < 1e-9 && a.iter().flatten().zip(b.iter().flatten()).all(|(x, y)| (x - c * y).norm() < 1e-9)
}

/// Hermitian Pauli `i^{x.z} X^x Z^z`; basis index bit `q` is qubit `q`.
pub fn pauli_matrix(p: &PauliVec) -> Mat {
    let n = p.n();
    let d = 1usize << n;
    let mut m = zeros(d);
    let xmask: usize = (0..n).filter(|&q| p.x(q)).map(|q| 1 << q).sum();
    let zmask: usize = (0..n).filter(|&q| p.z(q)).map(|q| 1 << q).sum();
    let ys = (xmask & zmask).count_ones();
    let phase = C::i().powu(ys);
    for col in 0..d {
        let sign = if (col & zmask).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m[col ^ xmask][col] = phase * sign;
    }
    m
}

pub fn all_paulis(n: usize) -> Vec<PauliVec> {
    (0..1u64 << (2 * n)).map(|v| PauliVec::from_bits(n, BitVec::from_u64(2 * n, v)).unwrap()).collect()
}

pub fn commute(a: &Mat, b: &Mat) -> bool {
    close(&matmul(a, b), &matmul(b, a))
}

/// State vector with in-place gates.
#[derive(Clone, Debug)]
pub struct Sv {
    pub n: usize,
    pub amp: Vec<C>,
}

impl Sv {
    pub fn basis(n: usize, x: &BitVec) -> Self {
        let mut amp = vec![C::new(0.0, 0.0); 1 << n];
        let idx: usize = (0..n).filter(|&q| x.get(q)).map(|q| 1 << q).sum();
        amp[idx] = C::new(1.0, 0.0);
        Sv { n, amp }
    }

    pub fn gate(&mut self, g: Gate) {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match g {
            Gate::H(a) => {
                for i in 0..self.amp.len() {
                    if i & (1 << a) == 0 {
                        let j = i | (1 << a);
                        let (u, v) = (self.amp[i], self.amp[j]);
                        self.amp[i] = (u + v) * h;
                        self.amp[j] = (u - v) * h;
                    }
                }
            }
            Gate::S(a) => {
                for (i, z) in self.amp.iter_mut().enumerate() {
                    if i & (1 << a) != 0 {
                        *z *= C::i();
                    }
                }
            }
            Gate::CX(c, t) => {
                for i in 0..self.amp.len() {
                    if i & (1 << c) != 0 && i & (1 << t) == 0 {
                        self.amp.swap(i, i | (1 << t));
                    }
                }
            }
        }
    }

    pub fn apply_matrix(&mut self, m: &Mat) {
        let d = self.amp.len();
        let mut out = vec![C::new(0.0, 0.0); d];
        for i in 0..d {
            for j in 0..d {
                out[i] += m[i][j] * self.amp[j];
            }
        }
        self.amp = out;
    }

    pub fn apply_clifford(&mut self, c: &CliffordDesc) {
        for &g in &c.gates {
            self.gate(g);
        }
        self.apply_matrix(&pauli_matrix(&c.pauli_frame));
    }

    /// `<psi| (-1)^sign P |psi>`.
    pub fn expect(&self, p: &PauliVec, sign: bool) -> f64 {
        let m = pauli_matrix(p);
        let mut acc = C::new(0.0, 0.0);
        for i in 0..self.amp.len() {
            for j in 0..self.amp.len() {
                acc += self.amp[i].conj() * m[i][j] * self.amp[j];
            }
        }
        if sign {
            -acc.re
        } else {
            acc.re
        }
    }
}

/// Dense unitary of a Clifford description.
pub fn clifford_unitary(c: &CliffordDesc) -> Mat {
    let d = 1usize << c.n;
    let mut cols: Vec<Vec<C>> = Vec::with_capacity(d);
    for b in 0..d {
        let mut sv = Sv::basis(c.n, &BitVec::from_u64(c.n, b as u64));
        sv.apply_clifford(c);
        cols.push(sv.amp);
    }
    let mut m = zeros(d);
    for (j, col) in cols.iter().enumerate() {
        for (i, z) in col.iter().enumerate() {
            m[i][j] = *z;
        }
    }
    m
}

pub fn dagger(m: &Mat) -> Mat {
    let d = m.len();
    let mut out = zeros(d);
    for i in 0..d {
        for j in 0..d {
            out[j][i] = m[i][j].conj();
        }
    }
    out
}

pub fn scale(m: &Mat, s: f64) -> Mat {
    m.iter().map(|r| r.iter().map(|z| z * s).collect()).collect()
}
