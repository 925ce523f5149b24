//! Run configuration: a flat TOML file merged over per-experiment defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::clifford::StabilizerState;
use crate::error::{Error, Result};
use crate::eval::{DEFAULT_EXACT_MAX_PARAMS, DEFAULT_STATEVECTOR_CAP, DEFAULT_TERM_CAP};
use crate::landscape::{DEFAULT_HESSIAN_CAP, DEFAULT_VERIFY_SAMPLES};
use crate::pauli::{FamilyKind, Letter, PauliString};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    VarianceScan,
    ExactMinima,
    RandomObservableIdentity,
    Fixtures,
    LemmaChecks,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::VarianceScan => "variance_scan",
            ExperimentKind::ExactMinima => "exact_minima",
            ExperimentKind::RandomObservableIdentity => "random_observable_identity",
            ExperimentKind::Fixtures => "fixtures",
            ExperimentKind::LemmaChecks => "lemma_checks",
        }
    }
}

/// Circuit used by the random-observable identity run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CircuitKind {
    Empty,
    ProductRx,
    Brickwork,
}

impl CircuitKind {
    pub fn name(self) -> &'static str {
        match self {
            CircuitKind::Empty => "empty",
            CircuitKind::ProductRx => "product_rx",
            CircuitKind::Brickwork => "brickwork",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityMode {
    Exact,
    Sampled,
}

/// Initial stabilizer state, applied at every qubit count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    /// `|0...0>`
    Zero,
    /// `|+...+>`
    Plus,
    /// Explicit generators, e.g. `["+XX", "+ZZ"]`; fixes the qubit count.
    Generators(Vec<String>),
}

impl InitialState {
    pub fn build(&self, n: usize) -> Result<StabilizerState> {
        match self {
            InitialState::Zero => Ok(StabilizerState::zero(n)),
            InitialState::Plus => StabilizerState::from_generators(
                n,
                (0..n).map(|q| PauliString::single(n, q, Letter::X)).collect(),
            ),
            InitialState::Generators(g) => {
                let gens = g
                    .iter()
                    .map(|s| PauliString::from_str(s))
                    .collect::<Result<Vec<_>>>()?;
                StabilizerState::from_generators(n, gens)
            }
        }
    }
}

/// Keys accepted in the config file; everything is optional there.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<ExperimentKind>,
    pub n: Option<Vec<usize>>,
    pub layers: Option<Vec<usize>>,
    pub family: Option<FamilyKind>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub circuit: Option<CircuitKind>,
    pub identity_mode: Option<IdentityMode>,
    pub initial_state: Option<InitialState>,
    pub statevector_cap: Option<usize>,
    pub term_cap: Option<usize>,
    pub exact_max_params: Option<usize>,
    pub hessian_cap: Option<usize>,
    pub verify_samples: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Fully resolved configuration of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub experiment: ExperimentKind,
    pub n: Vec<usize>,
    pub layers: Vec<usize>,
    pub family: FamilyKind,
    /// Points per mode (variance scan), pairs (sampled identity), circuits
    /// (lemma checks) or points (fixtures).
    pub samples: usize,
    pub seed: u64,
    pub trials: usize,
    pub circuit: CircuitKind,
    pub identity_mode: IdentityMode,
    pub initial_state: InitialState,
    pub statevector_cap: usize,
    pub term_cap: usize,
    pub exact_max_params: usize,
    pub hessian_cap: usize,
    pub verify_samples: usize,
    pub out_dir: PathBuf,
}

impl RunConfig {
    /// Defaults for `kind` with a given seed.
    pub fn defaults(kind: ExperimentKind, seed: u64) -> Self {
        let (n, layers, family, samples) = match kind {
            ExperimentKind::VarianceScan => (vec![2, 4, 6, 8], vec![10, 30, 50], FamilyKind::Weight2Nn, 50),
            ExperimentKind::ExactMinima => (vec![4, 6, 8], vec![50], FamilyKind::Weight2All, 0),
            ExperimentKind::RandomObservableIdentity => (vec![1, 2, 3], vec![1], FamilyKind::Weight2Nn, 20_000),
            ExperimentKind::Fixtures => (vec![2, 4, 6], vec![1], FamilyKind::Weight2Nn, 100),
            ExperimentKind::LemmaChecks => (vec![1, 2, 3, 4], vec![1], FamilyKind::Weight2Nn, 20),
        };
        RunConfig {
            experiment: kind,
            n,
            layers,
            family,
            samples,
            seed,
            trials: 10,
            circuit: CircuitKind::Brickwork,
            identity_mode: IdentityMode::Exact,
            initial_state: InitialState::Zero,
            statevector_cap: DEFAULT_STATEVECTOR_CAP,
            term_cap: DEFAULT_TERM_CAP,
            exact_max_params: DEFAULT_EXACT_MAX_PARAMS,
            hessian_cap: DEFAULT_HESSIAN_CAP,
            verify_samples: DEFAULT_VERIFY_SAMPLES,
            out_dir: PathBuf::from("out"),
        }
    }

    /// Merges `file` and a command-line seed over the defaults for `kind`.
    pub fn resolve(kind: ExperimentKind, file: &ConfigFile, seed: Option<u64>) -> Result<Self> {
        if let Some(k) = file.experiment {
            if k != kind {
                return Err(Error::Config(format!(
                    "config is for experiment {}, not {}",
                    k.name(),
                    kind.name()
                )));
            }
        }
        let seed = seed
            .or(file.seed)
            .ok_or_else(|| Error::Config("a seed is required (config key `seed` or --seed)".into()))?;
        let mut c = RunConfig::defaults(kind, seed);
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = &file.$f { c.$f = v.clone(); } )* };
        }
        take!(n, layers, family, samples, trials, circuit, identity_mode, initial_state,
              statevector_cap, term_cap, exact_max_params, hessian_cap, verify_samples, out_dir);
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.n.is_empty() {
            return bad("`n` must not be empty");
        }
        if self.layers.is_empty() {
            return bad("`layers` must not be empty");
        }
        if self.n.contains(&0) {
            return bad("qubit counts must be positive");
        }
        match self.experiment {
            ExperimentKind::VarianceScan | ExperimentKind::ExactMinima => {
                if self.n.iter().any(|&n| n < 2) {
                    return bad("weight-two families need n >= 2");
                }
                if self.layers.contains(&0) {
                    return bad("layer counts must be positive");
                }
            }
            _ => {}
        }
        if self.experiment == ExperimentKind::VarianceScan && self.samples == 0 {
            return bad("`samples` must be positive");
        }
        if self.experiment == ExperimentKind::ExactMinima && (self.trials == 0 || self.verify_samples == 0) {
            return bad("`trials` and `verify_samples` must be positive");
        }
        if self.experiment == ExperimentKind::RandomObservableIdentity
            && self.identity_mode == IdentityMode::Sampled
            && self.samples == 0
        {
            return bad("`samples` must be positive");
        }
        if let InitialState::Generators(g) = &self.initial_state {
            if self.n.iter().any(|&n| n != g.len()) {
                return bad("explicit initial-state generators require every n to equal their count");
            }
        }
        for &n in &self.n {
            self.initial_state.build(n).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_is_mandatory() {
        let f = ConfigFile::parse("n = [2]").unwrap();
        assert!(matches!(
            RunConfig::resolve(ExperimentKind::VarianceScan, &f, None),
            Err(Error::Config(_))
        ));
        let c = RunConfig::resolve(ExperimentKind::VarianceScan, &f, Some(4)).unwrap();
        assert_eq!(c.n, vec![2]);
        assert_eq!(c.layers, vec![10, 30, 50]);
    }

    #[test]
    fn rejects_unknown_keys_and_empty_lists() {
        assert!(ConfigFile::parse("bogus = 1").is_err());
        let f = ConfigFile::parse("seed = 1\nn = []").unwrap();
        assert!(RunConfig::resolve(ExperimentKind::VarianceScan, &f, None).is_err());
    }

    #[test]
    fn experiment_must_match() {
        let f = ConfigFile::parse("seed = 1\nexperiment = \"exact_minima\"").unwrap();
        assert!(RunConfig::resolve(ExperimentKind::VarianceScan, &f, None).is_err());
        assert!(RunConfig::resolve(ExperimentKind::ExactMinima, &f, None).is_ok());
    }

    #[test]
    fn initial_state_forms() {
        let f = ConfigFile::parse("seed = 1\nn = [2]\ninitial_state = { generators = [\"+XX\", \"+ZZ\"] }").unwrap();
        let c = RunConfig::resolve(ExperimentKind::Fixtures, &f, None).unwrap();
        assert_eq!(c.initial_state.build(2).unwrap().generators().len(), 2);
        let f = ConfigFile::parse("seed = 1\ninitial_state = \"plus\"").unwrap();
        assert!(RunConfig::resolve(ExperimentKind::VarianceScan, &f, None).is_ok());
        let f = ConfigFile::parse("seed = 1\nn = [3]\ninitial_state = { generators = [\"+XX\", \"+ZZ\"] }").unwrap();
        assert!(RunConfig::resolve(ExperimentKind::Fixtures, &f, None).is_err());
    }
}
