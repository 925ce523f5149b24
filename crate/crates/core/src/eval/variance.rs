//! Per-observable sample statistics over uniform and Clifford points.

use serde::{Deserialize, Serialize};

use crate::circuit::{sample_clifford, sample_uniform, ParamCircuit};
use crate::clifford::StabilizerState;
use crate::error::{Error, Result};
use crate::eval::{pauli_value_clifford, statevector::final_state};
use crate::par::{map_range, pairwise_sum};
use crate::pauli::PauliString;
use crate::rng::derive_seed;

const UNIFORM_STREAM: u64 = 0x55;
const CLIFFORD_STREAM: u64 = 0xC1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleMode {
    Uniform,
    Clifford,
    /// Clifford points where at least one family member is non-zero.
    CliffordConditioned,
}

impl SampleMode {
    pub fn name(self) -> &'static str {
        match self {
            SampleMode::Uniform => "uniform",
            SampleMode::Clifford => "clifford",
            SampleMode::CliffordConditioned => "clifford_conditioned",
        }
    }

    pub const ALL: [SampleMode; 3] =
        [SampleMode::Uniform, SampleMode::Clifford, SampleMode::CliffordConditioned];
}

/// Sample mean, unbiased variance, and mean of squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    /// Mean of `L^2`: the variance estimate when the true mean is known to be 0.
    pub second_moment: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Option<Moments> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = pairwise_sum(values) / n;
        let sq: Vec<f64> = values.iter().map(|v| v * v).collect();
        let dev: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
        let variance = if values.len() > 1 { pairwise_sum(&dev) / (n - 1.0) } else { 0.0 };
        Some(Moments { mean, variance, second_moment: pairwise_sum(&sq) / n })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    pub observable: String,
    pub mode: SampleMode,
    /// Points the statistics were computed over.
    pub samples: usize,
    /// `None` when no point survived conditioning.
    pub moments: Option<Moments>,
    pub nonzero_fraction: Option<f64>,
    /// Conditioned mode, variant that ignores the observable itself when
    /// deciding whether a point is retained.
    pub excl_trigger_samples: Option<usize>,
    pub excl_trigger_moments: Option<Moments>,
}

impl VarianceReport {
    pub fn variance(&self) -> Option<f64> {
        self.moments.map(|m| m.variance)
    }
}

/// Inputs shared by every mode of a scan.
#[derive(Clone, Copy, Debug)]
pub struct ScanSpec<'a> {
    pub circuit: &'a ParamCircuit,
    pub state: &'a StabilizerState,
    pub family: &'a [PauliString],
    pub samples: usize,
    pub seed: u64,
    pub statevector_cap: usize,
}

/// `values[i][j]`: family member `j` at the `i`-th sampled Clifford point.
pub fn clifford_value_matrix(spec: &ScanSpec) -> Vec<Vec<i8>> {
    let m = spec.circuit.num_params();
    let seed = derive_seed(spec.seed, CLIFFORD_STREAM);
    map_range(spec.samples, |i| {
        let c = sample_clifford(m, seed, i as u64);
        spec.family
            .iter()
            .map(|p| pauli_value_clifford(spec.circuit, spec.state, p, c.quarters()))
            .collect()
    })
}

/// `values[i][j]` at the `i`-th uniformly sampled point.
pub fn uniform_value_matrix(spec: &ScanSpec) -> Result<Vec<Vec<f64>>> {
    let m = spec.circuit.num_params();
    let seed = derive_seed(spec.seed, UNIFORM_STREAM);
    map_range(spec.samples, |i| {
        let p = sample_uniform(m, seed, i as u64);
        let sv = final_state(spec.circuit, spec.state, &p, spec.statevector_cap)?;
        Ok(spec.family.iter().map(|q| sv.expectation(q)).collect())
    })
    .into_iter()
    .collect()
}

fn column(values: &[Vec<f64>], j: usize) -> Vec<f64> {
    values.iter().map(|row| row[j]).collect()
}

fn check(spec: &ScanSpec) -> Result<()> {
    let n = spec.circuit.num_qubits();
    if spec.state.num_qubits() != n {
        return Err(Error::SizeMismatch(n, spec.state.num_qubits()));
    }
    for p in spec.family {
        if p.num_qubits() != n {
            return Err(Error::SizeMismatch(n, p.num_qubits()));
        }
        if !p.is_hermitian() {
            return Err(Error::NonHermitian(p.to_string()));
        }
    }
    Ok(())
}

/// One report per family member, in family order.
pub fn variance_scan(spec: &ScanSpec, mode: SampleMode) -> Result<Vec<VarianceReport>> {
    check(spec)?;
    let labels: Vec<String> = spec.family.iter().map(|p| p.to_string()).collect();
    match mode {
        SampleMode::Uniform => {
            let values = uniform_value_matrix(spec)?;
            Ok(labels
                .into_iter()
                .enumerate()
                .map(|(j, observable)| VarianceReport {
                    observable,
                    mode,
                    samples: values.len(),
                    moments: Moments::of(&column(&values, j)),
                    nonzero_fraction: None,
                    excl_trigger_samples: None,
                    excl_trigger_moments: None,
                })
                .collect())
        }
        SampleMode::Clifford | SampleMode::CliffordConditioned => {
            let raw = clifford_value_matrix(spec);
            Ok(clifford_reports(&raw, labels, mode))
        }
    }
}

/// Statistics from an already sampled Clifford value matrix.
pub fn clifford_reports(raw: &[Vec<i8>], labels: Vec<String>, mode: SampleMode) -> Vec<VarianceReport> {
    let values: Vec<Vec<f64>> = raw
        .iter()
        .map(|row| row.iter().map(|&v| v as f64).collect())
        .collect();
    let nonzero_per_row: Vec<usize> = raw.iter().map(|r| r.iter().filter(|&&v| v != 0).count()).collect();
    labels
        .into_iter()
        .enumerate()
        .map(|(j, observable)| {
            let retained: Vec<usize> = match mode {
                SampleMode::CliffordConditioned => (0..raw.len()).filter(|&i| nonzero_per_row[i] > 0).collect(),
                _ => (0..raw.len()).collect(),
            };
            let col: Vec<f64> = retained.iter().map(|&i| values[i][j]).collect();
            let nonzero = col.iter().filter(|v| **v != 0.0).count();
            let (excl_trigger_samples, excl_trigger_moments) = if mode == SampleMode::CliffordConditioned {
                let others: Vec<f64> = (0..raw.len())
                    .filter(|&i| nonzero_per_row[i] - (raw[i][j] != 0) as usize > 0)
                    .map(|i| values[i][j])
                    .collect();
                (Some(others.len()), Moments::of(&others))
            } else {
                (None, None)
            };
            VarianceReport {
                observable,
                mode,
                samples: col.len(),
                moments: Moments::of(&col),
                nonzero_fraction: (!col.is_empty()).then(|| nonzero as f64 / col.len() as f64),
                excl_trigger_samples,
                excl_trigger_moments,
            }
        })
        .collect()
}

/// Family average of per-observable statistics (plain mean over members).
pub fn family_average(reports: &[VarianceReport], label: &str) -> Option<VarianceReport> {
    let first = reports.first()?;
    let avg = |f: &dyn Fn(&VarianceReport) -> Option<f64>| -> Option<f64> {
        let v: Vec<f64> = reports.iter().filter_map(f).collect();
        (!v.is_empty()).then(|| pairwise_sum(&v) / v.len() as f64)
    };
    let moments = match (
        avg(&|r| r.moments.map(|m| m.mean)),
        avg(&|r| r.moments.map(|m| m.variance)),
        avg(&|r| r.moments.map(|m| m.second_moment)),
    ) {
        (Some(mean), Some(variance), Some(second_moment)) => Some(Moments { mean, variance, second_moment }),
        _ => None,
    };
    let excl = match (
        avg(&|r| r.excl_trigger_moments.map(|m| m.mean)),
        avg(&|r| r.excl_trigger_moments.map(|m| m.variance)),
        avg(&|r| r.excl_trigger_moments.map(|m| m.second_moment)),
    ) {
        (Some(mean), Some(variance), Some(second_moment)) => Some(Moments { mean, variance, second_moment }),
        _ => None,
    };
    Some(VarianceReport {
        observable: label.to_string(),
        mode: first.mode,
        samples: first.samples,
        moments,
        nonzero_fraction: avg(&|r| r.nonzero_fraction),
        excl_trigger_samples: first.excl_trigger_samples,
        excl_trigger_moments: excl,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::build_brickwork;
    use crate::pauli::{enumerate_family, FamilyKind};

    #[test]
    fn moments_basic() {
        let m = Moments::of(&[1.0, -1.0, 0.0, 0.0]).unwrap();
        assert_eq!(m.mean, 0.0);
        assert_eq!(m.second_moment, 0.5);
        assert!((m.variance - 2.0 / 3.0).abs() < 1e-15);
        assert!(Moments::of(&[]).is_none());
    }

    #[test]
    fn clifford_second_moment_is_nonzero_fraction() {
        let c = build_brickwork(4, 6).unwrap();
        let fam = enumerate_family(FamilyKind::Weight2Nn, 4).unwrap();
        let s = StabilizerState::zero(4);
        let spec = ScanSpec { circuit: &c, state: &s, family: &fam, samples: 200, seed: 3, statevector_cap: 14 };
        for r in variance_scan(&spec, SampleMode::Clifford).unwrap() {
            assert_eq!(r.moments.unwrap().second_moment, r.nonzero_fraction.unwrap());
        }
    }

    #[test]
    fn conditioned_can_be_empty() {
        let raw = vec![vec![0i8, 0], vec![0, 0]];
        let reports = clifford_reports(&raw, vec!["a".into(), "b".into()], SampleMode::CliffordConditioned);
        assert!(reports.iter().all(|r| r.samples == 0 && r.moments.is_none()));
        assert!(family_average(&reports, "avg").unwrap().moments.is_none());
    }

    #[test]
    fn conditioned_trigger_variants() {
        let raw = vec![vec![1i8, 0], vec![0, 0], vec![-1, 1]];
        let r = clifford_reports(&raw, vec!["a".into(), "b".into()], SampleMode::CliffordConditioned);
        assert_eq!(r[0].samples, 2);
        assert_eq!(r[0].excl_trigger_samples, Some(1));
        assert_eq!(r[1].excl_trigger_samples, Some(2));
    }
}
