//! Null directions, siloed-minimum search and local-minimum verification.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::DMatrix;
use rand::seq::index::sample as sample_indices;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{CliffordPoint, Op, ParamCircuit, SplitPoint};
use crate::clifford::{conj_gate_in_place, conj_rotation_in_place, StabilizerState};
use crate::error::{Error, Result};
use crate::eval::{clifford_gradient, clifford_hessian, final_state, pauli_value_clifford, Vqa};
use crate::par::map_range;
use crate::pauli::{Observable, PauliString, SymplecticBasis};
use crate::rng::{derive_seed, stream};

/// Absolute threshold below which a value counts as exactly zero.
pub const ZERO_TOL: f64 = 1e-12;
/// Default uniform completions per exact-zero check.
pub const DEFAULT_VERIFY_SAMPLES: usize = 10;
/// Default largest `m` for which the full Hessian is built.
pub const DEFAULT_HESSIAN_CAP: usize = 128;

/// Indices `k` whose generator commutes with `P` propagated back through
/// everything after rotation `k`, all angles at `c`.
pub fn null_directions(circuit: &ParamCircuit, c: &CliffordPoint, p: &PauliString) -> Result<Vec<usize>> {
    let mask = null_mask(circuit, c, p)?;
    Ok((0..mask.len()).filter(|&k| mask[k]).collect())
}

fn null_mask(circuit: &ParamCircuit, c: &CliffordPoint, p: &PauliString) -> Result<Vec<bool>> {
    if c.len() != circuit.num_params() {
        return Err(Error::PointLength { expected: circuit.num_params(), got: c.len() });
    }
    if p.num_qubits() != circuit.num_qubits() {
        return Err(Error::SizeMismatch(circuit.num_qubits(), p.num_qubits()));
    }
    let mut q = p.clone();
    let mut mask = vec![false; c.len()];
    for op in circuit.ops().iter().rev() {
        match op {
            Op::Gate(g) => conj_gate_in_place(g, &mut q),
            Op::Rotation { generator, param } => {
                mask[*param] = q.commutes_with(generator);
                conj_rotation_in_place(generator, c.quarters()[*param], &mut q);
            }
        }
    }
    Ok(mask)
}

/// Per-stage sample count `floor(30 * 2^n / family_size)`.
pub fn stage_budget(n: usize, family_size: usize) -> usize {
    if family_size == 0 {
        return 0;
    }
    ((30u128 << n.min(100)) / family_size as u128).min(usize::MAX as u128) as usize
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    /// Clifford points sampled per stage before giving up.
    pub stage_samples: usize,
    /// Upper bound on accepted Paulis.
    pub max_stages: usize,
    /// Uniform completions used by the exact-zero checks.
    pub verify_samples: usize,
    pub seed: u64,
}

impl SearchBudget {
    pub fn for_family(n: usize, family_size: usize, seed: u64) -> Self {
        SearchBudget {
            stage_samples: stage_budget(n, family_size),
            max_stages: 2 * n,
            verify_samples: DEFAULT_VERIFY_SAMPLES,
            seed,
        }
    }
}

/// A Pauli reaching -1 and the sample it was found at.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliHit {
    pub family_index: usize,
    pub pauli: PauliString,
    pub point: CliffordPoint,
    pub sample_index: u64,
}

/// Samples the free coordinates of `split` and returns the first family
/// member, outside `exclude`, with value exactly -1. Scans samples in index
/// order and, within a sample, the family in order.
pub fn find_pauli_minimum(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    family: &[PauliString],
    exclude: &SymplecticBasis,
    split: &SplitPoint,
    samples: usize,
    seed: u64,
) -> Option<PauliHit> {
    let candidates: Vec<usize> = (0..family.len()).filter(|&j| !exclude.contains(&family[j])).collect();
    if split.free().is_empty() || candidates.is_empty() {
        return None;
    }
    let free = split.free().len();
    const CHUNK: usize = 64;
    let mut start = 0;
    while start < samples {
        let end = (start + CHUNK).min(samples);
        let hits = map_range(end - start, |i| {
            let idx = (start + i) as u64;
            let mut r = stream(seed, idx);
            let vals: Vec<u8> = (0..free).map(|_| r.random_range(0..4u8)).collect();
            let point = split.restrict_clifford(&vals).expect("free length matches");
            candidates
                .iter()
                .copied()
                .find(|&j| pauli_value_clifford(circuit, state, &family[j], point.quarters()) == -1)
                .map(|j| PauliHit { family_index: j, pauli: family[j].clone(), point, sample_index: idx })
        });
        if let Some(hit) = hits.into_iter().flatten().next() {
            return Some(hit);
        }
        start = end;
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub pauli: String,
    pub sample_index: u64,
    pub free_before: usize,
    pub free_after: usize,
}

/// Candidate exact minimum jointly optimizing several Paulis.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPoint {
    pub split: SplitPoint,
    pub optimized: Vec<PauliString>,
    /// Values of `optimized` at the base point.
    pub values: Vec<i8>,
    pub basis: SymplecticBasis,
    pub history: Vec<StageRecord>,
}

impl CriticalPoint {
    pub fn is_empty(&self) -> bool {
        self.optimized.is_empty()
    }

    /// True when every stage removed at least one free direction.
    pub fn strictly_decreasing(&self) -> bool {
        self.history.iter().all(|h| h.free_after < h.free_before)
    }
}

/// Repeats [`find_pauli_minimum`] on the shrinking free set until a stage
/// exhausts its budget or nothing is free. Fixed coordinates never move.
pub fn greedy_siloed_search(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    family: &[PauliString],
    budget: &SearchBudget,
) -> Result<CriticalPoint> {
    let n = circuit.num_qubits();
    let m = circuit.num_params();
    if let Some(p) = family.iter().find(|p| p.num_qubits() != n) {
        return Err(Error::SizeMismatch(n, p.num_qubits()));
    }
    if state.num_qubits() != n {
        return Err(Error::SizeMismatch(n, state.num_qubits()));
    }
    let mut split = SplitPoint::all_free(CliffordPoint::zeros(m));
    let mut basis = SymplecticBasis::new(n);
    let mut optimized = Vec::new();
    let mut history = Vec::new();
    for stage in 0..budget.max_stages {
        let seed = derive_seed(budget.seed, stage as u64);
        let Some(hit) = find_pauli_minimum(circuit, state, family, &basis, &split, budget.stage_samples, seed)
        else {
            break;
        };
        let null = null_mask(circuit, &hit.point, &hit.pauli)?;
        let free_before = split.free().len();
        let fixed: Vec<usize> = (0..m).filter(|&k| !(null[k] && split.free().binary_search(&k).is_ok())).collect();
        split = SplitPoint::new(hit.point, fixed)?;
        basis.insert(&hit.pauli);
        history.push(StageRecord {
            pauli: hit.pauli.to_string(),
            sample_index: hit.sample_index,
            free_before,
            free_after: split.free().len(),
        });
        optimized.push(hit.pauli);
        if split.free().is_empty() {
            break;
        }
    }
    let values = optimized
        .iter()
        .map(|p| pauli_value_clifford(circuit, state, p, split.base().quarters()))
        .collect();
    Ok(CriticalPoint { split, optimized, values, basis, history })
}

/// Family members outside the span of the optimized Paulis.
pub fn independent_remainder(family: &[PauliString], cp: &CriticalPoint) -> Vec<PauliString> {
    family.iter().filter(|p| !cp.basis.contains(p)).cloned().collect()
}

fn uniform_free(split: &SplitPoint, seed: u64, index: u64) -> Vec<f64> {
    let mut r = stream(seed, index);
    (0..split.free().len()).map(|_| r.random_range(0.0..TAU)).collect()
}

/// Outcome of the remainder checks at one critical point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderCheck {
    /// Fixed indices whose gradient components were examined.
    pub components: Vec<usize>,
    /// Per Pauli: value zero at every uniform completion.
    pub value_zero: Vec<bool>,
    /// Per Pauli: fraction of examined components vanishing at every completion.
    pub gradient_vanish: Vec<f64>,
}

impl RemainderCheck {
    pub fn value_vanish_fraction(&self) -> Option<f64> {
        let n = self.value_zero.len();
        (n > 0).then(|| self.value_zero.iter().filter(|&&z| z).count() as f64 / n as f64)
    }

    pub fn gradient_vanish_fraction(&self) -> Option<f64> {
        let n = self.gradient_vanish.len();
        (n > 0 && !self.components.is_empty()).then(|| self.gradient_vanish.iter().sum::<f64>() / n as f64)
    }
}

/// Checks every Pauli in `paulis` for an identically vanishing loss along the
/// free directions and for vanishing gradients along up to
/// `component_budget` randomly chosen fixed directions. Each uniform
/// completion is simulated once and shared by all Paulis.
#[allow(clippy::too_many_arguments)]
pub fn verify_remainder(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    split: &SplitPoint,
    paulis: &[PauliString],
    samples: usize,
    component_budget: usize,
    seed: u64,
    cap: usize,
) -> Result<RemainderCheck> {
    let fixed = split.fixed();
    let components: Vec<usize> = if fixed.len() <= component_budget {
        fixed.to_vec()
    } else {
        let mut r = stream(derive_seed(seed, 0xC0), 0);
        let mut picked: Vec<usize> = sample_indices(&mut r, fixed.len(), component_budget)
            .into_iter()
            .map(|i| fixed[i])
            .collect();
        picked.sort_unstable();
        picked
    };
    let value_seed = derive_seed(seed, 0xA1);
    let values: Vec<Vec<bool>> = map_range(samples, |s| -> Result<Vec<bool>> {
        let p = split.restrict_uniform(&uniform_free(split, value_seed, s as u64))?;
        let sv = final_state(circuit, state, &p, cap)?;
        Ok(paulis.iter().map(|q| sv.expectation(q).abs() <= ZERO_TOL).collect())
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let grad_seed = derive_seed(seed, 0xA2);
    let cells = samples * components.len();
    let grads: Vec<Vec<bool>> = map_range(cells, |cell| -> Result<Vec<bool>> {
        let (s, ci) = (cell / components.len(), cell % components.len());
        let k = components[ci];
        let p = split.restrict_uniform(&uniform_free(split, grad_seed, s as u64))?;
        let plus = final_state(circuit, state, &p.shifted(k, FRAC_PI_2), cap)?;
        let minus = final_state(circuit, state, &p.shifted(k, -FRAC_PI_2), cap)?;
        Ok(paulis
            .iter()
            .map(|q| (0.5 * (plus.expectation(q) - minus.expectation(q))).abs() <= ZERO_TOL)
            .collect())
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let value_zero = (0..paulis.len()).map(|j| values.iter().all(|row| row[j])).collect();
    let gradient_vanish = (0..paulis.len())
        .map(|j| {
            if components.is_empty() {
                return 0.0;
            }
            let vanishing = (0..components.len())
                .filter(|&ci| (0..samples).all(|s| grads[s * components.len() + ci][j]))
                .count();
            vanishing as f64 / components.len() as f64
        })
        .collect();
    Ok(RemainderCheck { components, value_zero, gradient_vanish })
}

/// Whether `P`'s loss vanishes at `samples` uniform completions of the free
/// coordinates.
pub fn verify_exact_zero(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    split: &SplitPoint,
    p: &PauliString,
    samples: usize,
    seed: u64,
    cap: usize,
) -> Result<bool> {
    let r = verify_remainder(circuit, state, split, std::slice::from_ref(p), samples, 0, seed, cap)?;
    Ok(r.value_zero[0])
}

/// Fraction of sampled fixed-direction gradient components of `P` that vanish.
#[allow(clippy::too_many_arguments)]
pub fn verify_gradients_vanish(
    circuit: &ParamCircuit,
    state: &StabilizerState,
    split: &SplitPoint,
    p: &PauliString,
    samples: usize,
    component_budget: usize,
    seed: u64,
    cap: usize,
) -> Result<f64> {
    let r = verify_remainder(circuit, state, split, std::slice::from_ref(p), samples, component_budget, seed, cap)?;
    Ok(r.gradient_vanish[0])
}

/// The signed Paulis whose joint minimum minimizes `o`: `sign(c) * P`.
pub fn signed_terms(o: &Observable) -> Vec<PauliString> {
    o.terms()
        .iter()
        .filter(|(c, _)| *c != 0.0)
        .map(|(c, p)| if *c < 0.0 { p.negated() } else { p.clone() })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Gradient exactly zero and Hessian (if built) positive semidefinite.
    ZeroApprox,
    EpsApprox,
    NotCritical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxLMReport {
    pub quarters: Vec<u8>,
    pub epsilon: f64,
    pub max_abs_gradient: f64,
    pub min_hessian_eigenvalue: Option<f64>,
    pub components_checked: usize,
    pub verdict: Verdict,
}

/// Gradient, and Hessian when `m <= hessian_cap`, at a Clifford point.
pub fn clifford_derivatives(vqa: &Vqa, point: &CliffordPoint, hessian_cap: usize) -> Result<(Vec<f64>, Option<DMatrix<f64>>)> {
    let m = vqa.num_params();
    let grad = map_range(m, |k| clifford_gradient(vqa, point, k)).into_iter().collect::<Result<Vec<_>>>()?;
    if m > hessian_cap {
        return Ok((grad, None));
    }
    let upper = map_range(m * m, |idx| {
        let (k, l) = (idx / m, idx % m);
        if l < k { Ok(0.0) } else { clifford_hessian(vqa, point, k, l) }
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let h = DMatrix::from_fn(m, m, |k, l| if l >= k { upper[k * m + l] } else { upper[l * m + k] });
    Ok((grad, Some(h)))
}

/// Classifies `point` against the epsilon-approximate minimum definition.
pub fn approximate_lm_check(vqa: &Vqa, point: &CliffordPoint, epsilon: f64, hessian_cap: usize) -> Result<ApproxLMReport> {
    if epsilon.is_nan() || epsilon < 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let (grad, hess) = clifford_derivatives(vqa, point, hessian_cap)?;
    let max_abs_gradient = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
    let min_hessian_eigenvalue = hess.map(|h| {
        if h.nrows() == 0 {
            0.0
        } else {
            h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
        }
    });
    let verdict = if max_abs_gradient == 0.0 && min_hessian_eigenvalue.is_none_or(|l| l >= -ZERO_TOL) {
        Verdict::ZeroApprox
    } else if max_abs_gradient <= epsilon && min_hessian_eigenvalue.is_none_or(|l| l >= -epsilon.sqrt()) {
        Verdict::EpsApprox
    } else {
        Verdict::NotCritical
    };
    Ok(ApproxLMReport {
        quarters: point.quarters().to_vec(),
        epsilon,
        max_abs_gradient,
        min_hessian_eigenvalue,
        components_checked: grad.len(),
        verdict,
    })
}
