//! Average of `E[L_P^2]` over all Pauli observables, expected to be `2^-n`.

use rand::Rng;
use serde_json::json;

use crate::circuit::{build_brickwork, build_fixture, CliffordPoint, FixtureKind, ParamCircuit};
use crate::clifford::StabilizerState;
use crate::error::{Error, Result};
use crate::eval::pauli_value_clifford;
use crate::experiment::output::{fmt_opt, CsvTable};
use crate::experiment::{cell_seed, CircuitKind, IdentityMode, RunConfig, RunOutput};
use crate::par::map_range;
use crate::pauli::{Letter, PauliString};
use crate::rng::stream;

/// Largest qubit count for the exhaustive mode.
pub const EXACT_MAX_QUBITS: usize = 6;
/// Largest `n + m` for the exhaustive mode (`4^(n+m)` evaluations).
pub const EXACT_MAX_LOG4: usize = 14;

pub const COLUMNS: [&str; 12] = [
    "n", "circuit", "layers", "m", "mode", "pairs", "estimate", "std_error", "target", "abs_error", "seed", "status",
];

/// All `4^n` Pauli strings, identity included, in base-4 order.
pub fn all_paulis(n: usize) -> Vec<PauliString> {
    const L: [Letter; 4] = [Letter::I, Letter::X, Letter::Y, Letter::Z];
    (0..1usize << (2 * n))
        .map(|mut idx| {
            let letters: Vec<Letter> = (0..n)
                .map(|_| {
                    let l = L[idx & 3];
                    idx >>= 2;
                    l
                })
                .collect();
            PauliString::from_letters(&letters, 0)
        })
        .collect()
}

/// `(1/4^n) sum_P (1/4^m) sum_c L_P(c)^2`, counted in integers.
pub fn identity_exact(circuit: &ParamCircuit, state: &StabilizerState, max_params: usize) -> Result<f64> {
    let n = circuit.num_qubits();
    let m = circuit.num_params();
    if n > EXACT_MAX_QUBITS || m > max_params || n + m > EXACT_MAX_LOG4 {
        return Err(Error::ExactBudget { m, budget: 1u64 << (2 * max_params.min(EXACT_MAX_LOG4)) });
    }
    let paulis = all_paulis(n);
    let points = 1u64 << (2 * m);
    let counts = map_range(points as usize, |idx| {
        let q: Vec<u8> = (0..m).map(|k| ((idx >> (2 * k)) & 3) as u8).collect();
        paulis
            .iter()
            .filter(|p| pauli_value_clifford(circuit, state, p, &q) != 0)
            .count() as u64
    });
    let total: u64 = counts.iter().sum();
    Ok(total as f64 / (paulis.len() as u64 * points) as f64)
}

/// Monte Carlo estimate over `(P, Clifford point)` pairs: `(mean, std error)`.
pub fn identity_sampled(circuit: &ParamCircuit, state: &StabilizerState, pairs: usize, seed: u64) -> (f64, f64) {
    let n = circuit.num_qubits();
    let m = circuit.num_params();
    let hits = map_range(pairs, |i| {
        let mut r = stream(seed, i as u64);
        let letters: Vec<Letter> = (0..n)
            .map(|_| [Letter::I, Letter::X, Letter::Y, Letter::Z][r.random_range(0..4)])
            .collect();
        let c = CliffordPoint::new((0..m).map(|_| r.random_range(0..4u8)).collect());
        let p = PauliString::from_letters(&letters, 0);
        (pauli_value_clifford(circuit, state, &p, c.quarters()) != 0) as u64
    });
    let k: u64 = hits.iter().sum();
    let mean = k as f64 / pairs as f64;
    let se = (mean * (1.0 - mean) / (pairs.max(2) - 1) as f64).sqrt();
    (mean, se)
}

fn pass_fail(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

fn circuit_for(kind: CircuitKind, n: usize, layers: usize) -> Result<ParamCircuit> {
    match kind {
        CircuitKind::Empty => Ok(ParamCircuit::empty(n)),
        CircuitKind::ProductRx => Ok(build_fixture(FixtureKind::ProductRx, n)?.0),
        CircuitKind::Brickwork => build_brickwork(n, layers),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityRow {
    pub n: usize,
    pub circuit: CircuitKind,
    pub layers: usize,
    pub m: usize,
    pub mode: IdentityMode,
    pub pairs: u64,
    pub estimate: f64,
    pub std_error: Option<f64>,
    pub target: f64,
    pub seed: u64,
    /// `pass`, `fail`, or `skipped` when the circuit is undefined at this n.
    pub status: &'static str,
}

pub fn compute_identity(config: &RunConfig) -> Result<Vec<IdentityRow>> {
    let mut rows = Vec::new();
    let layer_list: &[usize] = if config.circuit == CircuitKind::Brickwork { &config.layers } else { &[0] };
    for &n in &config.n {
        let state = config.initial_state.build(n)?;
        for &layers in layer_list {
            let target = 0.5f64.powi(n as i32);
            let seed = cell_seed(config.seed, n, layers);
            if config.circuit == CircuitKind::Brickwork && n < 2 {
                rows.push(IdentityRow {
                    n,
                    circuit: config.circuit,
                    layers,
                    m: 0,
                    mode: config.identity_mode,
                    pairs: 0,
                    estimate: f64::NAN,
                    std_error: None,
                    target,
                    seed,
                    status: "skipped",
                });
                continue;
            }
            let circuit = circuit_for(config.circuit, n, layers)?;
            let m = circuit.num_params();
            let row = match config.identity_mode {
                IdentityMode::Exact => {
                    let estimate = identity_exact(&circuit, &state, config.exact_max_params)?;
                    IdentityRow {
                        n,
                        circuit: config.circuit,
                        layers,
                        m,
                        mode: IdentityMode::Exact,
                        pairs: 1u64 << (2 * (n + m)),
                        estimate,
                        std_error: None,
                        target,
                        seed,
                        status: pass_fail((estimate - target).abs() <= 1e-12),
                    }
                }
                IdentityMode::Sampled => {
                    let (estimate, se) = identity_sampled(&circuit, &state, config.samples, seed);
                    let sigma = (target * (1.0 - target) / config.samples as f64).sqrt();
                    IdentityRow {
                        n,
                        circuit: config.circuit,
                        layers,
                        m,
                        mode: IdentityMode::Sampled,
                        pairs: config.samples as u64,
                        estimate,
                        std_error: Some(se),
                        target,
                        seed,
                        status: pass_fail((estimate - target).abs() <= 3.0 * sigma),
                    }
                }
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

fn skipped_none(r: &IdentityRow, v: f64) -> Option<f64> {
    (r.status != "skipped").then_some(v)
}

pub fn run_random_observable_identity(config: &RunConfig) -> Result<RunOutput> {
    let rows = compute_identity(config)?;
    let mut t = CsvTable::new(&COLUMNS);
    let mut out = RunOutput::default();
    for r in &rows {
        let mode = match r.mode {
            IdentityMode::Exact => "exact",
            IdentityMode::Sampled => "sampled",
        };
        t.row(vec![
            r.n.to_string(),
            r.circuit.name().to_string(),
            r.layers.to_string(),
            r.m.to_string(),
            mode.to_string(),
            r.pairs.to_string(),
            fmt_opt(skipped_none(r, r.estimate)),
            fmt_opt(r.std_error),
            r.target.to_string(),
            fmt_opt(skipped_none(r, (r.estimate - r.target).abs())),
            r.seed.to_string(),
            r.status.to_string(),
        ]);
        out.summary.push(format!(
            "n={} {} layers={} m={} {mode}: {} vs 2^-n = {} ({})",
            r.n,
            r.circuit.name(),
            r.layers,
            r.m,
            r.estimate,
            r.target,
            r.status
        ));
    }
    out.artifacts.push(t.finish("random_observable_identity.csv"));
    out.derived.insert("exact_tolerance".into(), json!(1e-12));
    out.derived.insert("sampled_tolerance".into(), json!("3 sigma, sigma^2 = 2^-n (1 - 2^-n) / pairs"));
    out.derived.insert("exact_max_qubits".into(), json!(EXACT_MAX_QUBITS));
    out.derived.insert("exact_max_log4".into(), json!(EXACT_MAX_LOG4));
    out.derived.insert("exact_max_params".into(), json!(config.exact_max_params));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_paulis_count_and_identity_first() {
        let ps = all_paulis(2);
        assert_eq!(ps.len(), 16);
        assert!(ps[0].is_identity_up_to_phase());
    }

    #[test]
    fn exact_identity_small_cases() {
        let (c, _) = build_fixture(FixtureKind::ProductRx, 2).unwrap();
        assert_eq!(identity_exact(&c, &StabilizerState::zero(2), 10).unwrap(), 0.25);
        let e = ParamCircuit::empty(3);
        assert_eq!(identity_exact(&e, &StabilizerState::zero(3), 10).unwrap(), 0.125);
    }

    #[test]
    fn exact_budget_error() {
        let c = build_brickwork(4, 4).unwrap();
        assert!(identity_exact(&c, &StabilizerState::zero(4), 10).unwrap_err().is_cap());
    }
}
