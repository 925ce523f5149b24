//! Dense-matrix reference built only from textbook 2x2 matrices, Kronecker
//! products and basis permutations. Qubit `q` is bit `q` of a basis index.
#![allow(dead_code)]

use cliffscape::circuit::{Op, ParamCircuit};
use cliffscape::pauli::{Letter, PauliString};
use cliffscape::CliffordGate;
use num_complex::Complex64 as C;

pub type Mat = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn zeros(d: usize) -> Mat {
    vec![vec![c(0.0, 0.0); d]; d]
}

pub fn eye(d: usize) -> Mat {
    let mut m = zeros(d);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0, 0.0);
    }
    m
}

pub fn letter_matrix(l: Letter) -> Mat {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match l {
        Letter::I => vec![vec![o, z], vec![z, o]],
        Letter::X => vec![vec![z, o], vec![o, z]],
        Letter::Y => vec![vec![z, -i], vec![i, z]],
        Letter::Z => vec![vec![o, z], vec![z, -o]],
    }
}

/// `a ⊗ b` with `b` on the low bits.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (da, db) = (a.len(), b.len());
    let mut m = zeros(da * db);
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    m[i * db + k][j * db + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

pub fn mul(a: &Mat, b: &Mat) -> Mat {
    let d = a.len();
    let mut m = zeros(d);
    for i in 0..d {
        for k in 0..d {
            if a[i][k] == c(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                m[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    m
}

pub fn dagger(a: &Mat) -> Mat {
    let d = a.len();
    let mut m = zeros(d);
    for i in 0..d {
        for j in 0..d {
            m[i][j] = a[j][i].conj();
        }
    }
    m
}

pub fn scale(a: &Mat, s: C) -> Mat {
    a.iter().map(|r| r.iter().map(|x| x * s).collect()).collect()
}

pub fn add(a: &Mat, b: &Mat) -> Mat {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect()).collect()
}

pub fn max_diff(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(r, s)| r.iter().zip(s).map(|(x, y)| (x - y).norm()))
        .fold(0.0, f64::max)
}

/// Display scalar times the Kronecker product of the letters.
pub fn pauli_matrix(p: &PauliString) -> Mat {
    let n = p.num_qubits();
    let mut m = vec![vec![c(1.0, 0.0)]];
    for q in (0..n).rev() {
        m = kron(&m, &letter_matrix(p.letter(q)));
    }
    let s = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][p.sign_exponent() as usize];
    scale(&m, s)
}

fn on_qubit(n: usize, q: usize, g: &Mat) -> Mat {
    let id = letter_matrix(Letter::I);
    let mut m = vec![vec![c(1.0, 0.0)]];
    for k in (0..n).rev() {
        m = kron(&m, if k == q { g } else { &id });
    }
    m
}

fn permutation(n: usize, f: impl Fn(usize) -> usize) -> Mat {
    let mut m = zeros(1 << n);
    for b in 0..(1usize << n) {
        m[f(b)][b] = c(1.0, 0.0);
    }
    m
}

pub fn gate_matrix(n: usize, g: &CliffordGate) -> Mat {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match *g {
        CliffordGate::H(q) => on_qubit(n, q, &vec![vec![c(h, 0.0), c(h, 0.0)], vec![c(h, 0.0), c(-h, 0.0)]]),
        CliffordGate::S(q) => on_qubit(n, q, &vec![vec![o, z], vec![z, i]]),
        CliffordGate::Sdg(q) => on_qubit(n, q, &vec![vec![o, z], vec![z, -i]]),
        CliffordGate::X(q) => on_qubit(n, q, &letter_matrix(Letter::X)),
        CliffordGate::Y(q) => on_qubit(n, q, &letter_matrix(Letter::Y)),
        CliffordGate::Z(q) => on_qubit(n, q, &letter_matrix(Letter::Z)),
        CliffordGate::CX(ct, t) => permutation(n, |b| if b >> ct & 1 == 1 { b ^ (1 << t) } else { b }),
        CliffordGate::Swap(a, b2) => permutation(n, |b| {
            let (x, y) = (b >> a & 1, b >> b2 & 1);
            (b & !(1 << a) & !(1 << b2)) | (y << a) | (x << b2)
        }),
        CliffordGate::CZ(a, b2) => {
            let mut m = eye(1 << n);
            for (b, row) in m.iter_mut().enumerate() {
                if b >> a & 1 == 1 && b >> b2 & 1 == 1 {
                    row[b] = -o;
                }
            }
            m
        }
    }
}

/// `exp(-i G angle / 2)`.
pub fn rotation_matrix(g: &PauliString, angle: f64) -> Mat {
    let d = 1 << g.num_qubits();
    add(
        &scale(&eye(d), c((angle / 2.0).cos(), 0.0)),
        &scale(&pauli_matrix(g), c(0.0, -(angle / 2.0).sin())),
    )
}

/// Full circuit unitary; the first op acts first.
pub fn circuit_unitary(circuit: &ParamCircuit, angles: &[f64]) -> Mat {
    let n = circuit.num_qubits();
    let mut u = eye(1 << n);
    for op in circuit.ops() {
        let g = match op {
            Op::Gate(g) => gate_matrix(n, g),
            Op::Rotation { generator, param } => rotation_matrix(generator, angles[*param]),
        };
        u = mul(&g, &u);
    }
    u
}

/// `<0...0| U† P U |0...0>`.
pub fn zero_state_expectation(u: &Mat, p: &PauliString) -> f64 {
    let m = mul(&dagger(u), &mul(&pauli_matrix(p), u));
    m[0][0].re
}

/// All `4^n` unsigned Pauli strings.
pub fn all_paulis(n: usize) -> Vec<PauliString> {
    const L: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    (0..1usize << (2 * n))
        .map(|idx| PauliString::from_letters(&(0..n).map(|q| L[idx >> (2 * q) & 3]).collect::<Vec<_>>(), 0))
        .collect()
}

pub fn all_gates(n: usize) -> Vec<CliffordGate> {
    let mut gs = Vec::new();
    for q in 0..n {
        gs.extend([
            CliffordGate::H(q),
            CliffordGate::S(q),
            CliffordGate::Sdg(q),
            CliffordGate::X(q),
            CliffordGate::Y(q),
            CliffordGate::Z(q),
        ]);
        for t in 0..n {
            if t != q {
                gs.extend([CliffordGate::CX(q, t), CliffordGate::CZ(q, t), CliffordGate::Swap(q, t)]);
            }
        }
    }
    gs
}
