//! Reproducible experiment runners. Every runner is a pure function of its
//! [`RunConfig`]: outputs are assembled in memory, in a fixed order, and are
//! byte-identical for any thread count.

pub mod checks;
pub mod config;
pub mod identity;
pub mod minima;
pub mod output;
pub mod plot;
pub mod scan;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use crate::error::Result;
use crate::rng::derive_seed;

pub use config::{CircuitKind, ConfigFile, ExperimentKind, IdentityMode, InitialState, RunConfig};
pub use output::{write_outputs, Artifact, RunManifest, SCHEMA_VERSION};
pub use plot::{emit_plot, PlotKind};

/// In-memory result of one run.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub artifacts: Vec<Artifact>,
    pub derived: BTreeMap<String, serde_json::Value>,
    /// Human-readable lines for the terminal.
    pub summary: Vec<String>,
}

/// Seed of the `(n, layers)` cell of a run.
pub fn cell_seed(seed: u64, n: usize, layers: usize) -> u64 {
    derive_seed(seed, ((n as u64) << 32) | layers as u64)
}

pub fn run(config: &RunConfig) -> Result<RunOutput> {
    match config.experiment {
        ExperimentKind::VarianceScan => scan::run_variance_scan(config),
        ExperimentKind::ExactMinima => minima::run_exact_minima(config),
        ExperimentKind::RandomObservableIdentity => identity::run_random_observable_identity(config),
        ExperimentKind::Fixtures => checks::run_fixtures(config),
        ExperimentKind::LemmaChecks => checks::run_lemma_checks(config),
    }
}

/// Runs `config` and writes the manifest and artifacts to `config.out_dir`.
pub fn run_and_write(config: &RunConfig) -> Result<(RunOutput, Vec<PathBuf>)> {
    let start = Instant::now();
    let out = run(config)?;
    let manifest = RunManifest::new(config, out.derived.clone(), start.elapsed().as_secs_f64(), &out.artifacts);
    let paths = write_outputs(&config.out_dir, &manifest, &out.artifacts)?;
    Ok((out, paths))
}
