//! Run configuration shared by the CLI and library callers.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::CasePolicy;
use crate::error::{LexdivError, Result};
use crate::indices::{IndexKind, IndexSpec, MaasVariant};
use crate::profiles::DEFAULT_PROFILE_COUNT;
use crate::sampling::{Conditions, Method, SweepValues, DEFAULT_DIVISORS, DEFAULT_ITERATIONS};

/// An index and any parameters that differ from its defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexEntry {
    pub kind: IndexKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub maas_variant: Option<MaasVariant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mtld_min_segment: Option<usize>,
}

impl IndexEntry {
    pub fn new(kind: IndexKind) -> Self {
        IndexEntry {
            kind,
            n: None,
            s: None,
            factor: None,
            maas_variant: None,
            mtld_min_segment: None,
        }
    }

    pub fn to_spec(&self) -> IndexSpec {
        let mut spec = IndexSpec::new(self.kind);
        if let Some(n) = self.n {
            spec.n = n;
        }
        if let Some(s) = self.s {
            spec.s = s;
        }
        if let Some(f) = self.factor {
            spec.factor = f;
        }
        if let Some(v) = self.maas_variant {
            spec.maas_variant = v;
        }
        if let Some(m) = self.mtld_min_segment {
            spec.mtld_min_segment = m;
        }
        spec
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Scores under the four evaluation methods at several text lengths.
    Length,
    /// Scores over a range of index parameter values.
    Parameter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub corpus: Option<PathBuf>,
    pub case: CasePolicy,
    /// `id,score` CSV of an external criterion such as proficiency ratings.
    pub scores: Option<PathBuf>,
    /// Texts shorter than this are dropped on load.
    pub min_length: usize,
    pub indices: Vec<IndexEntry>,
    pub methods: Vec<Method>,
    /// Defaults to the shortest text in the corpus.
    pub truncate_to: Option<usize>,
    pub divisors: Vec<usize>,
    /// Explicit sample lengths for random sampling, replacing the divisors.
    pub lengths: Option<Vec<usize>>,
    pub iterations: usize,
    pub seed: u64,
    /// `start:end:step` for parameter experiments; window lengths, or MTLD
    /// factors when the index is MTLD.
    pub parameter_range: Option<String>,
    pub profiles: usize,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: Experiment::Length,
            corpus: None,
            case: CasePolicy::Fold,
            scores: None,
            min_length: 1,
            indices: IndexKind::ALL.iter().map(|&k| IndexEntry::new(k)).collect(),
            methods: Method::ALL.to_vec(),
            truncate_to: None,
            divisors: DEFAULT_DIVISORS.to_vec(),
            lengths: None,
            iterations: DEFAULT_ITERATIONS,
            seed: crate::DEFAULT_SEED,
            parameter_range: None,
            profiles: DEFAULT_PROFILE_COUNT,
            out_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn from_toml(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| LexdivError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).map_err(|e| LexdivError::io(path, e))?;
        RunConfig::from_toml(&s).map_err(|e| LexdivError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is representable as TOML")
    }

    pub fn index_specs(&self) -> Vec<IndexSpec> {
        self.indices.iter().map(IndexEntry::to_spec).collect()
    }

    pub fn conditions(&self) -> Conditions {
        match &self.lengths {
            Some(l) => Conditions::Lengths(l.clone()),
            None => Conditions::Divisors(self.divisors.clone()),
        }
    }

    /// Sweep values for one index of a parameter experiment.
    pub fn sweep_values(&self, kind: IndexKind) -> Result<SweepValues> {
        match (&self.parameter_range, kind) {
            (Some(r), IndexKind::Mtld) => SweepValues::parse_factors(r),
            (Some(r), _) => SweepValues::parse_lengths(r),
            (None, IndexKind::Mtld) => Ok(SweepValues::default_mtld_factors()),
            (None, _) => SweepValues::parse_lengths("24:240:24"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.indices.is_empty() {
            return Err(LexdivError::Config("no indices configured".into()));
        }
        for spec in self.index_specs() {
            spec.validate()?;
        }
        if self.experiment == Experiment::Length && self.methods.is_empty() {
            return Err(LexdivError::Config("no methods configured".into()));
        }
        if self.iterations == 0 {
            return Err(LexdivError::Config("iterations must be at least 1".into()));
        }
        Ok(())
    }
}
