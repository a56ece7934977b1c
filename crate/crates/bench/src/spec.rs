//! Experiment descriptions, read from TOML key-value files.
//!
//! ```toml
//! variants = ["bea", "bihga", "hga"]
//! runs_per_instance = 10          # seeds default to 0..runs_per_instance
//!
//! [source]
//! kind = "random"
//! vars = 20
//! clauses = 91
//! instance_seeds = [1, 2, 3]
//!
//! [config]                        # any solver parameter may be overridden
//! max_high_level_generations = 200
//! ```
//!
//! A file-based source uses `kind = "files"` and `paths = [...]`; relative
//! paths are resolved against the directory holding the spec file.

use std::path::{Path, PathBuf};

use bea_sat::{SolverConfig, Variant};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

/// Where the formulas of an experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Source {
    /// Uniform random 3-SAT with an explicit variable and clause count, one
    /// formula per instance seed.
    Random {
        vars: usize,
        clauses: usize,
        instance_seeds: Vec<u64>,
    },
    /// DIMACS files.
    Files { paths: Vec<PathBuf> },
}

/// A fully resolved experiment: every run seed is listed explicitly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec")]
pub struct ExperimentSpec {
    pub source: Source,
    pub variants: Vec<Variant>,
    pub runs_per_instance: usize,
    pub seeds: Vec<u64>,
    /// Shared solver parameters; the `variant` field is replaced per run.
    pub config: SolverConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpec {
    source: Source,
    #[serde(default)]
    variants: Option<Vec<Variant>>,
    #[serde(default)]
    runs_per_instance: Option<usize>,
    #[serde(default)]
    seeds: Option<Vec<u64>>,
    #[serde(default)]
    config: SolverConfig,
}

impl TryFrom<RawSpec> for ExperimentSpec {
    type Error = BenchError;

    fn try_from(raw: RawSpec) -> Result<Self> {
        let seeds = match (raw.runs_per_instance, raw.seeds) {
            (_, Some(seeds)) => seeds,
            (Some(runs), None) => (0..runs as u64).collect(),
            (None, None) => {
                return Err(BenchError::Spec(
                    "either runs_per_instance or seeds must be given".into(),
                ))
            }
        };
        let runs_per_instance = raw.runs_per_instance.unwrap_or(seeds.len());
        if runs_per_instance != seeds.len() {
            return Err(BenchError::Spec(format!(
                "runs_per_instance is {runs_per_instance} but {} seeds are listed",
                seeds.len()
            )));
        }
        let spec = Self {
            source: raw.source,
            variants: raw.variants.unwrap_or_else(|| Variant::ALL.to_vec()),
            runs_per_instance,
            seeds,
            config: raw.config,
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl ExperimentSpec {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| BenchError::Spec(e.to_string()))
    }

    /// Reads a spec file, resolving relative instance paths against its
    /// directory.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
            path: path.to_owned(),
            source,
        })?;
        let mut spec = Self::from_toml_str(&text)?;
        if let Source::Files { paths } = &mut spec.source {
            let base = path.parent().unwrap_or(Path::new(""));
            for p in paths.iter_mut().filter(|p| p.is_relative()) {
                *p = base.join(&*p);
            }
        }
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs_per_instance == 0 || self.seeds.is_empty() {
            return Err(BenchError::Spec("runs_per_instance must be >= 1".into()));
        }
        if self.seeds.len() != self.runs_per_instance {
            return Err(BenchError::Spec(
                "seed list length must equal runs_per_instance".into(),
            ));
        }
        if self.variants.is_empty() {
            return Err(BenchError::Spec("at least one variant is required".into()));
        }
        if (1..self.variants.len()).any(|i| self.variants[..i].contains(&self.variants[i])) {
            return Err(BenchError::Spec("variants must not repeat".into()));
        }
        match &self.source {
            Source::Random {
                vars,
                clauses,
                instance_seeds,
            } => {
                if *vars < 3 || *clauses == 0 {
                    return Err(BenchError::Spec(format!(
                        "random 3-SAT needs at least 3 variables and 1 clause, got n={vars}, m={clauses}"
                    )));
                }
                if instance_seeds.is_empty() {
                    return Err(BenchError::Spec("instance_seeds must not be empty".into()));
                }
            }
            Source::Files { paths } => {
                if paths.is_empty() {
                    return Err(BenchError::Spec("paths must not be empty".into()));
                }
            }
        }
        self.config.validate()?;
        Ok(())
    }
}
