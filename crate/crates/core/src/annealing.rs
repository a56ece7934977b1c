//! Geometric cooling and the annealing acceptance rules.
//!
//! All acceptance functions take the uniform draw `u` as an argument, so they
//! are pure; callers own the random stream.

use serde::{Deserialize, Serialize};

use crate::cnf::CnfFormula;
use crate::error::{invalid, Result};

/// How an inferior crossover is scored against the temperature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverAcceptRule {
    /// `exp(-t2 / T)`, where `t2` is the children's best fitness.
    #[default]
    Absolute,
    /// `exp(-(t1 - t2) / T)`, the usual degradation form.
    Delta,
}

impl std::str::FromStr for CrossoverAcceptRule {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "absolute" => Ok(Self::Absolute),
            "delta" => Ok(Self::Delta),
            other => Err(invalid(format!("unknown crossover accept rule '{other}'"))),
        }
    }
}

impl std::fmt::Display for CrossoverAcceptRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Absolute => "absolute",
            Self::Delta => "delta",
        })
    }
}

/// Temperature `t0 * cooling_factor^step`.
///
/// The temperature is always recomputed from the step count instead of being
/// accumulated, and is floored at the smallest positive normal `f64`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSchedule {
    t0: f64,
    cooling_factor: f64,
    step: u32,
}

impl TemperatureSchedule {
    pub fn new(t0: f64, cooling_factor: f64) -> Result<Self> {
        if !(t0 > 0.0 && t0.is_finite()) {
            return Err(invalid(format!(
                "initial temperature must be positive, got {t0}"
            )));
        }
        if !(cooling_factor > 0.0 && cooling_factor < 1.0) {
            return Err(invalid(format!(
                "cooling factor must lie in (0, 1), got {cooling_factor}"
            )));
        }
        Ok(Self {
            t0,
            cooling_factor,
            step: 0,
        })
    }

    /// Schedule starting at [`initial_temperature`] for `formula`.
    pub fn for_formula(
        formula: &CnfFormula,
        clause_length: usize,
        cooling_factor: f64,
    ) -> Result<Self> {
        Self::new(initial_temperature(formula, clause_length)?, cooling_factor)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn cooling_factor(&self) -> f64 {
        self.cooling_factor
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    pub fn temperature(&self) -> f64 {
        (self.t0 * self.cooling_factor.powf(f64::from(self.step))).max(f64::MIN_POSITIVE)
    }

    /// One cooling step.
    #[must_use]
    pub fn cooled(self) -> Self {
        Self {
            step: self.step.saturating_add(1),
            ..self
        }
    }

    pub fn cool(&mut self) {
        *self = self.cooled();
    }
}

/// Clause count times clause length.
pub fn initial_temperature(formula: &CnfFormula, clause_length: usize) -> Result<f64> {
    if formula.num_clauses() == 0 {
        return Err(invalid("initial temperature needs at least one clause"));
    }
    if clause_length == 0 {
        return Err(invalid("clause length must be >= 1"));
    }
    Ok((formula.num_clauses() * clause_length) as f64)
}

fn check_temperature(temperature: f64) -> Result<()> {
    if temperature > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "temperature must be positive, got {temperature}"
        )))
    }
}

/// Metropolis rule: accept iff `min(1, exp(-delta / T)) >= u`.
pub fn metropolis_accept(delta: f64, temperature: f64, u: f64) -> Result<bool> {
    check_temperature(temperature)?;
    Ok((-delta / temperature).exp().min(1.0) >= u)
}

/// Acceptance for a crossover whose parents' best fitness is `parents_best`
/// and whose children's best fitness is `children_best`.
///
/// Non-inferior children are always accepted. Otherwise the crossover is
/// accepted iff `exp(-x / T) > u`, where `x` depends on `rule`.
pub fn crossover_accept(
    parents_best: usize,
    children_best: usize,
    temperature: f64,
    u: f64,
    rule: CrossoverAcceptRule,
) -> Result<bool> {
    check_temperature(temperature)?;
    if children_best >= parents_best {
        return Ok(true);
    }
    let exponent = match rule {
        CrossoverAcceptRule::Absolute => children_best as f64,
        CrossoverAcceptRule::Delta => (parents_best - children_best) as f64,
    };
    Ok((-exponent / temperature).exp() > u)
}

/// Acceptance for a mutation from fitness `old` to `new`. Ties are accepted;
/// a loss is accepted iff `exp(-(old - new) / T) > u`.
pub fn mutation_accept(old: usize, new: usize, temperature: f64, u: f64) -> Result<bool> {
    check_temperature(temperature)?;
    if new >= old {
        return Ok(true);
    }
    Ok((-((old - new) as f64) / temperature).exp() > u)
}
