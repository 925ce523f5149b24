//! Dense statevector reference engine. Qubit `q` is bit `q` of the
//! amplitude index.

use num_complex::Complex64;

use crate::circuit::{Op, ParamCircuit, ParamPoint};
use crate::clifford::{CliffordGate, StabilizerState};
use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Default qubit cap for dense simulation.
pub const DEFAULT_STATEVECTOR_CAP: usize = 14;
const HARD_CAP: usize = 30;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => -I,
    }
}

fn masks(p: &PauliString) -> (usize, usize) {
    // n <= HARD_CAP so one word holds everything
    let x = p.x_words().first().copied().unwrap_or(0) as usize;
    let z = p.z_words().first().copied().unwrap_or(0) as usize;
    (x, z)
}

/// `i^k (-1)^{z.b}`: the scalar picked up by basis state `b` under `P`.
#[inline]
fn pauli_factor(k: u8, z: usize, b: usize) -> Complex64 {
    let k = k + 2 * ((z & b).count_ones() & 1) as u8;
    i_pow(k)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<Complex64>,
}

impl Statevector {
    pub fn zero(n: usize, cap: usize) -> Result<Self> {
        let cap = cap.min(HARD_CAP);
        if n > cap {
            return Err(Error::StatevectorCap { n, cap });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Statevector { n, amps })
    }

    /// Projects a basis state onto the stabilized subspace.
    pub fn from_stabilizer(s: &StabilizerState, cap: usize) -> Result<Self> {
        let n = s.num_qubits();
        let mut sv = Statevector::zero(n, cap)?;
        if s.is_zero_state() {
            return Ok(sv);
        }
        for b in 0..(1usize << n) {
            let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
            amps[b] = Complex64::new(1.0, 0.0);
            sv.amps = amps;
            for g in s.generators() {
                let gp = sv.apply_pauli(g);
                for (a, t) in sv.amps.iter_mut().zip(gp) {
                    *a = (*a + t) * 0.5;
                }
            }
            let norm: f64 = sv.amps.iter().map(|a| a.norm_sqr()).sum();
            if norm > 1e-6 {
                let scale = 1.0 / norm.sqrt();
                sv.amps.iter_mut().for_each(|a| *a *= scale);
                return Ok(sv);
            }
        }
        unreachable!("some basis state overlaps every stabilizer state")
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn apply_pauli(&self, p: &PauliString) -> Vec<Complex64> {
        let (x, z) = masks(p);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            out[b ^ x] = pauli_factor(p.phase(), z, b) * a;
        }
        out
    }

    fn single_qubit(&mut self, q: usize, m: [[Complex64; 2]; 2]) {
        let bit = 1usize << q;
        for b in 0..self.amps.len() {
            if b & bit == 0 {
                let (a0, a1) = (self.amps[b], self.amps[b | bit]);
                self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[b | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    pub fn apply_gate(&mut self, g: &CliffordGate) {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match *g {
            CliffordGate::H(q) => self.single_qubit(q, [[h, h], [h, -h]]),
            CliffordGate::S(q) => self.single_qubit(q, [[one, zero], [zero, I]]),
            CliffordGate::Sdg(q) => self.single_qubit(q, [[one, zero], [zero, -I]]),
            CliffordGate::X(q) => self.single_qubit(q, [[zero, one], [one, zero]]),
            CliffordGate::Y(q) => self.single_qubit(q, [[zero, -I], [I, zero]]),
            CliffordGate::Z(q) => self.single_qubit(q, [[one, zero], [zero, -one]]),
            CliffordGate::CX(c, t) => {
                let (cb, tb) = (1usize << c, 1usize << t);
                for b in 0..self.amps.len() {
                    if b & cb != 0 && b & tb == 0 {
                        self.amps.swap(b, b | tb);
                    }
                }
            }
            CliffordGate::CZ(a, c) => {
                let mask = (1usize << a) | (1usize << c);
                for (b, amp) in self.amps.iter_mut().enumerate() {
                    if b & mask == mask {
                        *amp = -*amp;
                    }
                }
            }
            CliffordGate::Swap(a, c) => {
                let (ab, cb) = (1usize << a, 1usize << c);
                for b in 0..self.amps.len() {
                    if b & ab != 0 && b & cb == 0 {
                        self.amps.swap(b, (b ^ ab) | cb);
                    }
                }
            }
        }
    }

    /// `psi <- exp(-i G angle/2) psi = cos(angle/2) psi - i sin(angle/2) G psi`.
    pub fn apply_rotation(&mut self, generator: &PauliString, angle: f64) {
        let (x, z) = masks(generator);
        let k = generator.phase();
        let c = Complex64::new((angle / 2.0).cos(), 0.0);
        let mis = Complex64::new(0.0, -(angle / 2.0).sin());
        if x == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a *= c + mis * pauli_factor(k, z, b);
            }
            return;
        }
        for b in 0..self.amps.len() {
            let partner = b ^ x;
            if b < partner {
                let (ab, ap) = (self.amps[b], self.amps[partner]);
                // (G psi)[b ^ x] = f(b) psi[b]
                self.amps[partner] = c * ap + mis * pauli_factor(k, z, b) * ab;
                self.amps[b] = c * ab + mis * pauli_factor(k, z, partner) * ap;
            }
        }
    }

    /// Real part of `<psi|P|psi>`.
    pub fn expectation(&self, p: &PauliString) -> f64 {
        let (x, z) = masks(p);
        let k = p.phase();
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, a) in self.amps.iter().enumerate() {
            acc += self.amps[b ^ x].conj() * pauli_factor(k, z, b) * a;
        }
        acc.re
    }
}

/// `U(p)|rho>` as a dense vector.
pub fn final_state(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    p: &ParamPoint,
    cap: usize,
) -> Result<Statevector> {
    if p.len() != circuit.num_params() {
        return Err(Error::PointLength { expected: circuit.num_params(), got: p.len() });
    }
    if state.num_qubits() != circuit.num_qubits() {
        return Err(Error::SizeMismatch(circuit.num_qubits(), state.num_qubits()));
    }
    let mut sv = Statevector::from_stabilizer(state, cap)?;
    let angles = p.angles();
    for op in circuit.ops() {
        match op {
            Op::Gate(g) => sv.apply_gate(g),
            Op::Rotation { generator, param } => sv.apply_rotation(generator, angles[*param]),
        }
    }
    Ok(sv)
}
