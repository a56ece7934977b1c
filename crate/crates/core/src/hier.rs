//! The high level of the hierarchy and the solver loop.
//!
//! One high-level generation runs a bottom epoch on every sub-population,
//! then selects, recombines and mutates whole sub-populations, optionally
//! reinserts the best individual seen so far, and cools the temperature once.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::annealing::{CrossoverAcceptRule, TemperatureSchedule};
use crate::bottom::{
    evolve_bottom_tracked, BottomOutcome, BottomParams, CrossoverRule, Individual, MutationRule,
    SubPopulation,
};
use crate::cnf::CnfFormula;
use crate::error::{invalid, Error, Result};
use crate::rng::{stream_rng, HIGH_LEVEL_STREAM, INIT_STREAM};

/// Best and mean member fitness of one sub-population.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubPopulationStats {
    pub best_fitness: usize,
    pub mean_fitness: f64,
}

pub fn population_stats(pop: &SubPopulation) -> Result<SubPopulationStats> {
    let members = pop.members();
    if members.is_empty() {
        return Err(invalid("cannot summarize an empty population"));
    }
    let best_fitness = members.iter().map(Individual::fitness).max().unwrap_or(0);
    let total: usize = members.iter().map(Individual::fitness).sum();
    Ok(SubPopulationStats {
        best_fitness,
        mean_fitness: total as f64 / members.len() as f64,
    })
}

/// Normalizes non-negative weights into a probability vector.
pub fn normalize_weights(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(invalid("no selection weights"));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
        return Err(invalid(format!(
            "selection weight {w} is not a finite non-negative number"
        )));
    }
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::DegenerateWeights(total));
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

/// High-level selection probabilities
/// `P_i = (alpha * g_i + beta * r_i) / sum_j (alpha * g_j + beta * r_j)`,
/// with `g_i` the best and `r_i` the mean fitness of sub-population `i`.
///
/// Returns [`Error::DegenerateWeights`] when every weight is zero.
pub fn high_level_selection_probs(
    stats: &[SubPopulationStats],
    alpha: f64,
    beta: f64,
) -> Result<Vec<f64>> {
    check_unit("alpha", alpha)?;
    check_unit("beta", beta)?;
    let weights: Vec<f64> = stats
        .iter()
        .map(|s| alpha * s.best_fitness as f64 + beta * s.mean_fitness)
        .collect();
    normalize_weights(&weights)
}

fn check_unit(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {value}")))
    }
}

fn sample_index(probs: &[f64], u: f64) -> usize {
    let mut cumulative = 0.0;
    for (i, p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return i;
        }
    }
    probs
        .iter()
        .rposition(|&p| p > 0.0)
        .unwrap_or(probs.len() - 1)
}

/// Draws `subpops.len()` sub-populations with replacement according to
/// `probs`. Each draw is an independent deep copy.
pub fn high_level_select<R: Rng + ?Sized>(
    subpops: &[SubPopulation],
    probs: &[f64],
    rng: &mut R,
) -> Result<Vec<SubPopulation>> {
    if subpops.len() != probs.len() {
        return Err(invalid(format!(
            "{} sub-populations but {} probabilities",
            subpops.len(),
            probs.len()
        )));
    }
    if probs.iter().any(|p| p.is_nan() || *p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(invalid(
            "selection probabilities must be non-negative and sum to 1",
        ));
    }
    Ok((0..subpops.len())
        .map(|_| subpops[sample_index(probs, rng.gen())].clone())
        .collect())
}

/// Swaps the members of `a` and `b` from position `cut` on.
pub fn exchange_members(a: &mut SubPopulation, b: &mut SubPopulation, cut: usize) -> Result<()> {
    if a.len() != b.len() {
        return Err(invalid("sub-populations must have equal scale"));
    }
    if cut == 0 || cut >= a.len() {
        return Err(invalid(format!("cut {cut} outside 1..{}", a.len())));
    }
    a.members_mut()[cut..].swap_with_slice(&mut b.members_mut()[cut..]);
    Ok(())
}

/// Pairs sub-populations at random and exchanges member tails past a
/// uniform cut. An unpaired sub-population is left alone.
pub fn high_level_crossover<R: Rng + ?Sized>(
    subpops: &mut [SubPopulation],
    rng: &mut R,
) -> Result<()> {
    if subpops.len() < 2 {
        return Ok(());
    }
    let scale = subpops[0].len();
    if subpops.iter().any(|p| p.len() != scale) {
        return Err(invalid("sub-populations must have equal scale"));
    }
    let mut order: Vec<usize> = (0..subpops.len()).collect();
    rand::seq::SliceRandom::shuffle(order.as_mut_slice(), rng);
    if scale < 2 {
        return Ok(());
    }
    for pair in order.chunks_exact(2) {
        let cut = rng.gen_range(1..scale);
        let (lo, hi) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        let (left, right) = subpops.split_at_mut(hi);
        exchange_members(&mut left[lo], &mut right[0], cut)?;
    }
    Ok(())
}

/// Replaces each member, independently with probability `rate`, by a fresh
/// random individual. Returns the number of replacements.
pub fn high_level_mutate<R: Rng + ?Sized>(
    subpops: &mut [SubPopulation],
    rate: f64,
    formula: &CnfFormula,
    rng: &mut R,
) -> Result<usize> {
    check_unit("mutation rate", rate)?;
    let mut replaced = 0;
    for member in subpops.iter_mut().flat_map(|p| p.members_mut().iter_mut()) {
        if rng.gen::<f64>() < rate {
            *member = Individual::random(formula, rng);
            replaced += 1;
        }
    }
    Ok(replaced)
}

/// Puts a copy of `global_best` in place of the worst member overall unless
/// some member is already at least as fit. Returns whether a replacement
/// happened.
pub fn elitism_guard(subpops: &mut [SubPopulation], global_best: &Individual) -> bool {
    let present = subpops
        .iter()
        .flat_map(|p| p.members())
        .any(|m| m.fitness() >= global_best.fitness());
    if present {
        return false;
    }
    let worst = subpops
        .iter_mut()
        .flat_map(|p| p.members_mut().iter_mut())
        .reduce(|w, m| if m.fitness() < w.fitness() { m } else { w });
    match worst {
        Some(slot) => {
            *slot = global_best.clone();
            true
        }
        None => false,
    }
}

/// Algorithm variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Annealed bottom operators, best-and-mean selection, elitism guard.
    Bea,
    /// Elitist bottom crossover, best-and-mean selection, elitism guard.
    Bihga,
    /// Elitist bottom crossover, mean-only selection.
    Hga,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Bea, Variant::Bihga, Variant::Hga];

    pub fn crossover_rule(self) -> CrossoverRule {
        match self {
            Self::Bea => CrossoverRule::Annealed,
            Self::Bihga | Self::Hga => CrossoverRule::Elitist,
        }
    }

    pub fn mutation_rule(self) -> MutationRule {
        match self {
            Self::Bea => MutationRule::Annealed,
            Self::Bihga | Self::Hga => MutationRule::Plain,
        }
    }

    pub fn uses_elitism_guard(self) -> bool {
        !matches!(self, Self::Hga)
    }

    /// `(alpha, beta)` actually used for high-level selection.
    pub fn selection_weights(self, alpha: f64, beta: f64) -> (f64, f64) {
        match self {
            Self::Bea | Self::Bihga => (alpha, beta),
            Self::Hga => (0.0, beta),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Bea => "BEA",
            Self::Bihga => "BIHGA",
            Self::Hga => "HGA",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "bea" => Ok(Self::Bea),
            "bihga" => Ok(Self::Bihga),
            "hga" => Ok(Self::Hga),
            other => Err(invalid(format!("unknown variant '{other}'"))),
        }
    }
}

/// Solver parameters. Defaults are 4 sub-populations of 5, 50 bottom
/// generations per epoch, at most 10000 high-level generations, cooling
/// factor 0.95, mutation rate 0.0001, `alpha = beta = 0.5` and clause
/// length 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub num_subpops: usize,
    pub subpop_scale: usize,
    pub bottom_generations: usize,
    pub max_high_level_generations: usize,
    pub cooling_factor: f64,
    pub mutation_rate: f64,
    pub alpha: f64,
    pub beta: f64,
    pub variant: Variant,
    pub crossover_accept_rule: CrossoverAcceptRule,
    /// Multiplies the clause count to give the initial temperature.
    pub clause_length: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            num_subpops: 4,
            subpop_scale: 5,
            bottom_generations: 50,
            max_high_level_generations: 10_000,
            cooling_factor: 0.95,
            mutation_rate: 0.0001,
            alpha: 0.5,
            beta: 0.5,
            variant: Variant::Bea,
            crossover_accept_rule: CrossoverAcceptRule::Absolute,
            clause_length: 3,
        }
    }
}

impl SolverConfig {
    pub fn with_variant(variant: Variant) -> Self {
        Self {
            variant,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_subpops == 0 {
            return Err(invalid("num_subpops must be >= 1"));
        }
        if self.subpop_scale == 0 {
            return Err(invalid("subpop_scale must be >= 1"));
        }
        if !(self.cooling_factor > 0.0 && self.cooling_factor < 1.0) {
            return Err(invalid(format!(
                "cooling_factor must lie in (0, 1), got {}",
                self.cooling_factor
            )));
        }
        check_unit("mutation_rate", self.mutation_rate)?;
        check_unit("alpha", self.alpha)?;
        check_unit("beta", self.beta)?;
        if self.variant != Variant::Hga && self.alpha + self.beta <= 0.0 {
            return Err(invalid("alpha + beta must be positive"));
        }
        if self.clause_length == 0 {
            return Err(invalid("clause_length must be >= 1"));
        }
        Ok(())
    }

    pub fn bottom_params(&self) -> BottomParams {
        BottomParams {
            mutation_rate: self.mutation_rate,
            crossover_rule: self.variant.crossover_rule(),
            mutation_rule: self.variant.mutation_rule(),
            generations_per_epoch: self.bottom_generations,
            accept_rule: self.crossover_accept_rule,
        }
    }
}

/// How bottom epochs are scheduled. Both produce identical results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Sequential,
    Parallel,
}

/// State after one high-level generation (generation 0 is initialization).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub generation: usize,
    /// Running maximum of every fitness observed so far.
    pub global_best: usize,
    /// Best fitness present in the sub-populations at the end of the
    /// generation.
    pub population_best: usize,
    /// Temperature after this generation's cooling step.
    pub temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub variant: Variant,
    pub seed: u64,
    pub solved: bool,
    pub generations: usize,
    pub best_individual: Individual,
    pub best_fitness: usize,
    pub num_clauses: usize,
    pub trace: Vec<TraceEntry>,
}

impl RunResult {
    pub fn unsatisfied(&self) -> usize {
        self.num_clauses - self.best_fitness
    }
}

/// Runs the configured variant sequentially.
pub fn solve(formula: &CnfFormula, config: &SolverConfig, seed: u64) -> Result<RunResult> {
    solve_with(formula, config, seed, Execution::Sequential)
}

/// Runs the configured variant until the best individual satisfies every
/// clause or the generation budget is spent.
pub fn solve_with(
    formula: &CnfFormula,
    config: &SolverConfig,
    seed: u64,
    execution: Execution,
) -> Result<RunResult> {
    config.validate()?;
    let mut schedule =
        TemperatureSchedule::for_formula(formula, config.clause_length, config.cooling_factor)?;
    let target = formula.num_clauses();
    let bottom = config.bottom_params();
    let (alpha, beta) = config.variant.selection_weights(config.alpha, config.beta);

    let mut init_rng = stream_rng(seed, 0, INIT_STREAM);
    let mut subpops = (0..config.num_subpops)
        .map(|_| SubPopulation::random(formula, config.subpop_scale, &mut init_rng))
        .collect::<Result<Vec<_>>>()?;
    let mut global_best = best_member(&subpops).clone();
    let mut trace = vec![TraceEntry {
        generation: 0,
        global_best: global_best.fitness(),
        population_best: global_best.fitness(),
        temperature: schedule.temperature(),
    }];

    let mut generation = 0;
    while global_best.fitness() < target && generation < config.max_high_level_generations {
        generation += 1;
        let temperature = schedule.temperature();
        let epoch = |(i, pop): (usize, &SubPopulation)| -> Result<BottomOutcome> {
            let mut rng = stream_rng(seed, generation as u64, i as u64);
            evolve_bottom_tracked(pop, formula, &bottom, temperature, &mut rng)
        };
        let outcomes: Vec<BottomOutcome> = match execution {
            Execution::Sequential => subpops.iter().enumerate().map(epoch).collect::<Result<_>>(),
            Execution::Parallel => subpops
                .par_iter()
                .enumerate()
                .map(epoch)
                .collect::<Result<_>>(),
        }?;
        subpops = Vec::with_capacity(outcomes.len());
        for outcome in outcomes {
            if outcome.best_seen.fitness() > global_best.fitness() {
                global_best = outcome.best_seen;
            }
            subpops.push(outcome.population);
        }

        let mut rng = stream_rng(seed, generation as u64, HIGH_LEVEL_STREAM);
        let stats = subpops
            .iter()
            .map(population_stats)
            .collect::<Result<Vec<_>>>()?;
        let probs = match high_level_selection_probs(&stats, alpha, beta) {
            Err(Error::DegenerateWeights(_)) => vec![1.0 / stats.len() as f64; stats.len()],
            other => other?,
        };
        subpops = high_level_select(&subpops, &probs, &mut rng)?;
        high_level_crossover(&mut subpops, &mut rng)?;
        high_level_mutate(&mut subpops, config.mutation_rate, formula, &mut rng)?;

        let current = best_member(&subpops);
        if current.fitness() > global_best.fitness() {
            global_best = current.clone();
        }
        if config.variant.uses_elitism_guard() {
            elitism_guard(&mut subpops, &global_best);
        }
        schedule.cool();
        trace.push(TraceEntry {
            generation,
            global_best: global_best.fitness(),
            population_best: best_member(&subpops).fitness(),
            temperature: schedule.temperature(),
        });
    }

    Ok(RunResult {
        variant: config.variant,
        seed,
        solved: global_best.fitness() == target,
        generations: generation,
        best_fitness: global_best.fitness(),
        best_individual: global_best,
        num_clauses: target,
        trace,
    })
}

fn best_member(subpops: &[SubPopulation]) -> &Individual {
    subpops
        .iter()
        .map(SubPopulation::best)
        .reduce(|b, m| if m.fitness() > b.fitness() { m } else { b })
        .expect("at least one sub-population")
}
