//! Running every (instance, variant, seed) cell of an experiment and
//! summarising the outcome.

use std::time::Instant;

use bea_sat::cnf::generate_random_3sat_sized;
use bea_sat::{solve, CnfFormula, SolverConfig, Variant};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::spec::{ExperimentSpec, Source};

/// Outcome of one solver run. Field order is the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub variant: Variant,
    pub seed: u64,
    pub solved: bool,
    pub generations: usize,
    pub best_fitness: usize,
    pub m: usize,
    pub n: usize,
    pub wall_ms: f64,
}

impl RunRecord {
    pub fn best_unsat(&self) -> usize {
        self.m - self.best_fitness
    }
}

/// An instance that could not be loaded; its cells are skipped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceError {
    pub instance: String,
    pub message: String,
}

/// Summary over a set of runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateStats {
    pub runs: usize,
    pub successes: usize,
    /// Mean high-level generations over successful runs only.
    pub mean_generations: Option<f64>,
    pub success_rate: f64,
    /// Mean of `m - best_fitness`.
    pub mean_best_unsat: f64,
}

impl AggregateStats {
    /// `None` when there are no records.
    pub fn from_records<'a>(records: impl IntoIterator<Item = &'a RunRecord>) -> Option<Self> {
        let (mut runs, mut successes, mut gens, mut unsat) = (0usize, 0usize, 0usize, 0usize);
        for r in records {
            runs += 1;
            unsat += r.best_unsat();
            if r.solved {
                successes += 1;
                gens += r.generations;
            }
        }
        (runs > 0).then(|| Self {
            runs,
            successes,
            mean_generations: (successes > 0).then(|| gens as f64 / successes as f64),
            success_rate: successes as f64 / runs as f64,
            mean_best_unsat: unsat as f64 / runs as f64,
        })
    }
}

/// Per-variant summary across all instances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariantSummary {
    pub variant: Variant,
    pub stats: AggregateStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResults {
    pub spec: ExperimentSpec,
    /// Sorted by instance (spec order), variant (spec order), seed (spec order).
    pub records: Vec<RunRecord>,
    pub errors: Vec<InstanceError>,
}

impl ExperimentResults {
    /// Names of instances with at least one record, in spec order.
    pub fn instances(&self) -> Vec<&str> {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.records {
            if names.last() != Some(&r.instance.as_str()) {
                names.push(&r.instance);
            }
        }
        names
    }

    pub fn stats_for(&self, instance: Option<&str>, variant: Variant) -> Option<AggregateStats> {
        AggregateStats::from_records(
            self.records
                .iter()
                .filter(|r| r.variant == variant && instance.is_none_or(|i| r.instance == i)),
        )
    }

    /// One summary per variant, in spec order.
    pub fn summaries(&self) -> Vec<VariantSummary> {
        self.spec
            .variants
            .iter()
            .filter_map(|&variant| {
                self.stats_for(None, variant)
                    .map(|stats| VariantSummary { variant, stats })
            })
            .collect()
    }
}

fn load_instances(
    source: &Source,
) -> Vec<std::result::Result<(String, CnfFormula), InstanceError>> {
    match source {
        Source::Random {
            vars,
            clauses,
            instance_seeds,
        } => instance_seeds
            .iter()
            .map(|&seed| {
                let name = format!("random-n{vars}-m{clauses}-s{seed}");
                generate_random_3sat_sized(*vars, *clauses, seed)
                    .map(|f| (name.clone(), f))
                    .map_err(|e| InstanceError {
                        instance: name,
                        message: e.to_string(),
                    })
            })
            .collect(),
        Source::Files { paths } => paths
            .iter()
            .map(|path| {
                let name = path.display().to_string();
                let fail = |message: String| InstanceError {
                    instance: name.clone(),
                    message,
                };
                let text = std::fs::read_to_string(path).map_err(|e| fail(e.to_string()))?;
                let formula = CnfFormula::parse_dimacs(&text).map_err(|e| fail(e.to_string()))?;
                if formula.num_clauses() == 0 {
                    return Err(fail("formula has no clauses".into()));
                }
                Ok((name, formula))
            })
            .collect(),
    }
}

/// Runs every cell of `spec`. Cells run concurrently; records come back in
/// a fixed order, so the results depend only on the spec.
///
/// An instance that cannot be read or parsed is reported in
/// [`ExperimentResults::errors`] and the remaining instances still run.
/// An invalid spec is rejected before anything runs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResults> {
    spec.validate()?;
    let mut instances = Vec::new();
    let mut errors = Vec::new();
    for loaded in load_instances(&spec.source) {
        match loaded {
            Ok(instance) => instances.push(instance),
            Err(e) => errors.push(e),
        }
    }

    let cells: Vec<(&str, &CnfFormula, Variant, u64)> = instances
        .iter()
        .flat_map(|(name, formula)| {
            spec.variants.iter().flat_map(move |&variant| {
                spec.seeds
                    .iter()
                    .map(move |&seed| (name.as_str(), formula, variant, seed))
            })
        })
        .collect();

    let records = cells
        .into_par_iter()
        .map(|(name, formula, variant, seed)| {
            let config = SolverConfig {
                variant,
                ..spec.config.clone()
            };
            let start = Instant::now();
            let result = solve(formula, &config, seed)?;
            Ok(RunRecord {
                instance: name.to_owned(),
                variant,
                seed,
                solved: result.solved,
                generations: result.generations,
                best_fitness: result.best_fitness,
                m: formula.num_clauses(),
                n: formula.num_vars(),
                wall_ms: start.elapsed().as_micros() as f64 / 1e3,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentResults {
        spec: spec.clone(),
        records,
        errors,
    })
}
