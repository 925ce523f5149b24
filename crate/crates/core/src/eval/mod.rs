//! Loss, gradient and Hessian evaluation.
//!
//! Three engines share one interface:
//! - the exact Clifford path (integer quarter-turn points only),
//! - dense statevector simulation (reference oracle),
//! - branching Pauli propagation, which doubles as a Fourier analyzer.

pub mod pauliprop;
pub mod statevector;
pub mod variance;

use std::f64::consts::FRAC_PI_2;

use crate::circuit::{CliffordPoint, ParamCircuit, ParamPoint};
use crate::clifford::StabilizerState;
use crate::error::{Error, Result};
use crate::pauli::{Observable, PauliString};

pub use pauliprop::{
    eval_pauliprop, fourier_expand, fourier_expand_observable, FourierExpansion, FourierTerm,
    TrigSymbol, DEFAULT_TERM_CAP,
};
pub use statevector::{final_state, Statevector, DEFAULT_STATEVECTOR_CAP};
pub use variance::{variance_scan, SampleMode, VarianceReport};

/// Default largest `m` for exact enumeration of all `4^m` Clifford points.
pub const DEFAULT_EXACT_MAX_PARAMS: usize = 10;

/// A circuit, observable and initial stabilizer state.
#[derive(Clone, Copy, Debug)]
pub struct Vqa<'a> {
    pub circuit: &'a ParamCircuit,
    pub observable: &'a Observable,
    pub state: &'a StabilizerState,
}

impl<'a> Vqa<'a> {
    pub fn new(
        circuit: &'a ParamCircuit,
        observable: &'a Observable,
        state: &'a StabilizerState,
    ) -> Result<Self> {
        let n = circuit.num_qubits();
        if observable.num_qubits() != n {
            return Err(Error::SizeMismatch(n, observable.num_qubits()));
        }
        if state.num_qubits() != n {
            return Err(Error::SizeMismatch(n, state.num_qubits()));
        }
        Ok(Vqa { circuit, observable, state })
    }

    pub fn num_params(&self) -> usize {
        self.circuit.num_params()
    }
}

/// Value of one Hermitian Pauli at a Clifford point: -1, 0 or +1.
#[inline]
pub fn pauli_value_clifford(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    p: &PauliString,
    quarters: &[u8],
) -> i8 {
    let mut q = p.clone();
    circuit.propagate_clifford_in_place(quarters, &mut q);
    state.expectation_unchecked(&q)
}

/// Exact loss at a Clifford point.
pub fn eval_clifford(vqa: &Vqa, c: &CliffordPoint) -> Result<f64> {
    if c.len() != vqa.num_params() {
        return Err(Error::PointLength { expected: vqa.num_params(), got: c.len() });
    }
    Ok(eval_clifford_unchecked(vqa, c.quarters()))
}

fn eval_clifford_unchecked(vqa: &Vqa, quarters: &[u8]) -> f64 {
    vqa.observable
        .terms()
        .iter()
        .map(|(coef, p)| coef * pauli_value_clifford(vqa.circuit, vqa.state, p, quarters) as f64)
        .sum()
}

/// Dense-simulation loss.
pub fn eval_statevector(vqa: &Vqa, p: &ParamPoint, cap: usize) -> Result<f64> {
    let sv = final_state(vqa.circuit, vqa.state, p, cap)?;
    Ok(vqa
        .observable
        .terms()
        .iter()
        .map(|(c, q)| c * sv.expectation(q))
        .sum())
}

/// Loss engine selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    /// Exact; points must lie on the quarter-turn grid.
    Clifford,
    Statevector { cap: usize },
    PauliProp { cap: usize },
}

impl Engine {
    pub fn statevector() -> Self {
        Engine::Statevector { cap: DEFAULT_STATEVECTOR_CAP }
    }

    pub fn pauliprop() -> Self {
        Engine::PauliProp { cap: DEFAULT_TERM_CAP }
    }

    pub fn loss(&self, vqa: &Vqa, p: &ParamPoint) -> Result<f64> {
        match *self {
            Engine::Clifford => eval_clifford(vqa, &CliffordPoint::try_from_param(p, 1e-9)?),
            Engine::Statevector { cap } => eval_statevector(vqa, p, cap),
            Engine::PauliProp { cap } => {
                let mut total = 0.0;
                for (c, q) in vqa.observable.terms() {
                    total += c * eval_pauliprop(vqa.circuit, vqa.state, q, p, cap)?;
                }
                Ok(total)
            }
        }
    }
}

fn check_index(vqa: &Vqa, k: usize) -> Result<()> {
    if k >= vqa.num_params() {
        Err(Error::InvalidArgument(format!(
            "parameter {k} out of range for m = {}",
            vqa.num_params()
        )))
    } else {
        Ok(())
    }
}

/// Parameter-shift gradient `(L(p + pi/2 e_k) - L(p - pi/2 e_k)) / 2`.
pub fn gradient_shift(engine: Engine, vqa: &Vqa, p: &ParamPoint, k: usize) -> Result<f64> {
    check_index(vqa, k)?;
    let plus = engine.loss(vqa, &p.shifted(k, FRAC_PI_2))?;
    let minus = engine.loss(vqa, &p.shifted(k, -FRAC_PI_2))?;
    Ok(0.5 * (plus - minus))
}

/// Nested parameter-shift Hessian entry (four evaluations).
pub fn hessian_shift(engine: Engine, vqa: &Vqa, p: &ParamPoint, k: usize, l: usize) -> Result<f64> {
    check_index(vqa, k)?;
    check_index(vqa, l)?;
    let mut acc = 0.0;
    for (dk, dl, sign) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
        let q = p.shifted(k, dk * FRAC_PI_2).shifted(l, dl * FRAC_PI_2);
        acc += sign * engine.loss(vqa, &q)?;
    }
    Ok(0.25 * acc)
}

/// Exact gradient at a Clifford point: both shifted points stay on the grid.
pub fn clifford_gradient(vqa: &Vqa, c: &CliffordPoint, k: usize) -> Result<f64> {
    check_index(vqa, k)?;
    if c.len() != vqa.num_params() {
        return Err(Error::PointLength { expected: vqa.num_params(), got: c.len() });
    }
    let plus = eval_clifford_unchecked(vqa, c.shifted(k, 1).quarters());
    let minus = eval_clifford_unchecked(vqa, c.shifted(k, -1).quarters());
    Ok(0.5 * (plus - minus))
}

/// Exact Hessian entry at a Clifford point.
pub fn clifford_hessian(vqa: &Vqa, c: &CliffordPoint, k: usize, l: usize) -> Result<f64> {
    check_index(vqa, k)?;
    check_index(vqa, l)?;
    if c.len() != vqa.num_params() {
        return Err(Error::PointLength { expected: vqa.num_params(), got: c.len() });
    }
    let mut acc = 0.0;
    for (dk, dl, sign) in [(1i8, 1i8, 1.0), (1, -1, -1.0), (-1, 1, -1.0), (-1, -1, 1.0)] {
        let q = c.shifted(k, dk).shifted(l, dl);
        acc += sign * eval_clifford_unchecked(vqa, q.quarters());
    }
    Ok(0.25 * acc)
}

fn decode_point(mut index: u64, m: usize, out: &mut [u8]) {
    for slot in out.iter_mut().take(m) {
        *slot = (index & 3) as u8;
        index >>= 2;
    }
}

/// Exact average over all `4^m` Clifford points (`m <= max_params`).
pub fn mean_over_clifford(vqa: &Vqa, max_params: usize) -> Result<f64> {
    let m = vqa.num_params();
    if m > max_params || m > 30 {
        return Err(Error::ExactBudget { m, budget: 1u64 << (2 * max_params.min(30)) });
    }
    let total = 1u64 << (2 * m);
    let chunk = 4096u64;
    let chunks = total.div_ceil(chunk) as usize;
    let terms = vqa.observable.terms();
    // integer sums per term keep the result independent of evaluation order
    let partial: Vec<Vec<i64>> = crate::par::map_range(chunks, |ci| {
        let mut sums = vec![0i64; terms.len()];
        let mut quarters = vec![0u8; m];
        let start = ci as u64 * chunk;
        for idx in start..(start + chunk).min(total) {
            decode_point(idx, m, &mut quarters);
            for (s, (_, p)) in sums.iter_mut().zip(terms) {
                *s += pauli_value_clifford(vqa.circuit, vqa.state, p, &quarters) as i64;
            }
        }
        sums
    });
    let mut sums = vec![0i64; terms.len()];
    for part in partial {
        for (s, v) in sums.iter_mut().zip(part) {
            *s += v;
        }
    }
    Ok(terms
        .iter()
        .zip(sums)
        .map(|((c, _), s)| c * s as f64 / total as f64)
        .sum())
}

/// Unbiased Monte Carlo estimate of the Clifford-point average.
pub fn clifford_mean_sampled(vqa: &Vqa, samples: usize, seed: u64) -> f64 {
    let m = vqa.num_params();
    let values = crate::par::map_range(samples, |i| {
        let c = crate::circuit::sample_clifford(m, seed, i as u64);
        eval_clifford_unchecked(vqa, c.quarters())
    });
    crate::par::pairwise_sum(&values) / samples.max(1) as f64
}
