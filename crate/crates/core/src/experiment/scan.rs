//! Variance of single-Pauli losses under uniform and Clifford sampling.

use serde_json::json;

use crate::circuit::build_brickwork;
use crate::error::Result;
use crate::eval::variance::{clifford_reports, clifford_value_matrix, family_average, ScanSpec};
use crate::eval::{variance_scan, SampleMode, VarianceReport};
use crate::experiment::output::{fmt_opt, CsvTable};
use crate::experiment::{cell_seed, RunConfig, RunOutput};
use crate::pauli::enumerate_family;

/// Label of the family-averaged rows.
pub const FAMILY_AVERAGE: &str = "family_average";
/// Allowed distance of log2(family-average variance) from -n.
pub const LOG2_TOLERANCE: f64 = 1.6;

pub const COLUMNS: [&str; 15] = [
    "n",
    "layers",
    "m",
    "observable",
    "mode",
    "N",
    "retained",
    "mean",
    "variance",
    "second_moment",
    "nonzero_fraction",
    "excl_trigger_retained",
    "excl_trigger_variance",
    "seed",
    "status",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ScanCell {
    pub n: usize,
    pub layers: usize,
    pub m: usize,
    pub seed: u64,
    /// Per-observable reports for each mode, each followed by its family average.
    pub reports: Vec<VarianceReport>,
}

impl ScanCell {
    pub fn average(&self, mode: SampleMode) -> Option<&VarianceReport> {
        self.reports.iter().find(|r| r.mode == mode && r.observable == FAMILY_AVERAGE)
    }
}

pub fn compute_variance_scan(config: &RunConfig) -> Result<Vec<ScanCell>> {
    let mut cells = Vec::new();
    for &n in &config.n {
        let family = enumerate_family(config.family, n)?;
        let state = config.initial_state.build(n)?;
        for &layers in &config.layers {
            let circuit = build_brickwork(n, layers)?;
            let seed = cell_seed(config.seed, n, layers);
            let spec = ScanSpec {
                circuit: &circuit,
                state: &state,
                family: &family,
                samples: config.samples,
                seed,
                statevector_cap: config.statevector_cap,
            };
            let labels: Vec<String> = family.iter().map(|p| p.to_string()).collect();
            let mut reports = Vec::new();
            let mut push = |mut rs: Vec<VarianceReport>| {
                if let Some(avg) = family_average(&rs, FAMILY_AVERAGE) {
                    rs.push(avg);
                }
                reports.extend(rs);
            };
            push(variance_scan(&spec, SampleMode::Uniform)?);
            let raw = clifford_value_matrix(&spec);
            push(clifford_reports(&raw, labels.clone(), SampleMode::Clifford));
            push(clifford_reports(&raw, labels, SampleMode::CliffordConditioned));
            cells.push(ScanCell { n, layers, m: circuit.num_params(), seed, reports });
        }
    }
    Ok(cells)
}

pub fn render(cells: &[ScanCell], requested: usize) -> CsvTable {
    let mut t = CsvTable::new(&COLUMNS);
    for c in cells {
        for r in &c.reports {
            let status = if r.moments.is_some() { "ok" } else { "empty" };
            t.row(vec![
                c.n.to_string(),
                c.layers.to_string(),
                c.m.to_string(),
                r.observable.clone(),
                r.mode.name().to_string(),
                requested.to_string(),
                r.samples.to_string(),
                fmt_opt(r.moments.map(|m| m.mean)),
                fmt_opt(r.moments.map(|m| m.variance)),
                fmt_opt(r.moments.map(|m| m.second_moment)),
                fmt_opt(r.nonzero_fraction),
                r.excl_trigger_samples.map(|s| s.to_string()).unwrap_or_default(),
                fmt_opt(r.excl_trigger_moments.map(|m| m.variance)),
                c.seed.to_string(),
                status.to_string(),
            ]);
        }
    }
    t
}

pub fn run_variance_scan(config: &RunConfig) -> Result<RunOutput> {
    let cells = compute_variance_scan(config)?;
    let mut out = RunOutput::default();
    out.artifacts.push(render(&cells, config.samples).finish("variance_scan.csv"));
    out.derived.insert("log2_variance_tolerance".into(), json!(LOG2_TOLERANCE));
    out.derived.insert("variance_denominator".into(), json!("N-1"));
    out.derived.insert(
        "cells".into(),
        json!(cells
            .iter()
            .map(|c| json!({
                "n": c.n,
                "layers": c.layers,
                "m": c.m,
                "family_size": config.family.size(c.n),
                "seed": c.seed,
            }))
            .collect::<Vec<_>>()),
    );
    for c in &cells {
        for mode in SampleMode::ALL {
            let line = match c.average(mode).and_then(|r| r.variance()) {
                Some(v) if v > 0.0 => format!("{:.2}", v.log2()),
                Some(_) => "-inf".to_string(),
                None => "empty".to_string(),
            };
            out.summary.push(format!(
                "n={} layers={} {:<20} log2(avg variance) = {line} (reference {})",
                c.n,
                c.layers,
                mode.name(),
                -(c.n as i64)
            ));
        }
    }
    Ok(out)
}
