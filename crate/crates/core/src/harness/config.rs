use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifiers::ClassifierSpec;
use crate::dataset::LoadOptions;
use crate::error::{Error, Result};
use crate::fitness::FitnessConfig;
use crate::optimizers::{Algorithm, AlgorithmParams, RunConfig};
use crate::preprocess::PreprocessConfig;

/// Where the data comes from and how to read it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    /// Relative paths resolve against the config file's directory.
    pub path: PathBuf,
    #[serde(flatten)]
    pub load: LoadOptions,
}

/// Train/test split used by every repetition; the seed comes from the
/// master seed and the repetition number.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitConfig {
    pub train_fraction: f64,
    pub stratified: bool,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            stratified: true,
        }
    }
}

/// One experiment, as read from TOML.
///
/// ```toml
/// master_seed = 7
/// repetitions = 100
/// algorithms = ["woa", "pso", "ga"]
///
/// [dataset]
/// path = "pima.csv"
/// label_column = "Outcome"
/// zero_missing_columns = ["Glucose", "BloodPressure"]
///
/// [fitness]
/// alpha = 0.99
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: DatasetConfig,
    pub preprocess: PreprocessConfig,
    pub algorithms: Vec<Algorithm>,
    pub fitness: FitnessConfig,
    /// Agents, generations and termination. The run seed is derived from
    /// `master_seed` per algorithm; the `seed` field here is ignored.
    pub run: RunConfig,
    pub params: AlgorithmParams,
    pub classifiers: Vec<ClassifierSpec>,
    pub repetitions: usize,
    pub split: SplitConfig,
    pub master_seed: u64,
    /// Run repetitions on all cores. Timing is only comparable when false.
    pub parallel: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: DatasetConfig {
                path: PathBuf::new(),
                load: LoadOptions::default(),
            },
            preprocess: PreprocessConfig::default(),
            algorithms: vec![Algorithm::Bwoa, Algorithm::Bpso, Algorithm::Ga],
            fitness: FitnessConfig::default(),
            run: RunConfig::default(),
            params: AlgorithmParams::default(),
            classifiers: ClassifierSpec::standard_set(),
            repetitions: 100,
            split: SplitConfig::default(),
            master_seed: 0,
            parallel: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    /// Reads a config file and resolves the dataset path next to it.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        if cfg.dataset.path.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.dataset.path = dir.join(&cfg.dataset.path);
            }
        }
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::config("repetitions must be >= 1"));
        }
        if self.classifiers.is_empty() {
            return Err(Error::config("no classifiers configured"));
        }
        let mut seen = self.algorithms.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.algorithms.len() {
            return Err(Error::config("an algorithm is listed twice"));
        }
        if !(self.split.train_fraction > 0.0 && self.split.train_fraction < 1.0) {
            return Err(Error::config("split.train_fraction must be in (0, 1)"));
        }
        self.fitness.validate()?;
        self.run.validate()?;
        self.params.pso.validate()?;
        self.params.woa.validate()?;
        for c in &self.classifiers {
            c.validate()?;
        }
        if !self.dataset.path.is_file() {
            return Err(Error::config(format!(
                "dataset `{}` does not exist",
                self.dataset.path.display()
            )));
        }
        Ok(())
    }
}
