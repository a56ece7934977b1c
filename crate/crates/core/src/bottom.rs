//! Bottom-level genetic operators and the per-sub-population evolution loop.
//!
//! Every operator takes the formula so that fitness caches are recomputed
//! whenever a genome changes, and draws randomness only from the generator
//! it is handed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::annealing::{crossover_accept, mutation_accept, CrossoverAcceptRule};
use crate::cnf::{Assignment, CnfFormula};
use crate::error::{invalid, Result};

/// A truth assignment together with its satisfied-clause count.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Individual {
    genome: Assignment,
    fitness: usize,
}

impl Individual {
    /// Evaluates `genome` against `formula`.
    pub fn new(genome: Assignment, formula: &CnfFormula) -> Result<Self> {
        let fitness = formula.count_satisfied(&genome)?;
        Ok(Self { genome, fitness })
    }

    /// Uniform random genome, each bit an independent fair coin.
    pub fn random<R: Rng + ?Sized>(formula: &CnfFormula, rng: &mut R) -> Self {
        let genome = Assignment::random(formula.num_vars(), rng);
        let fitness = formula.count_satisfied_bits(genome.bits());
        Self { genome, fitness }
    }

    pub fn genome(&self) -> &Assignment {
        &self.genome
    }

    pub fn fitness(&self) -> usize {
        self.fitness
    }

    pub fn into_genome(self) -> Assignment {
        self.genome
    }
}

/// A fixed-size bottom-level population.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubPopulation {
    members: Vec<Individual>,
}

impl SubPopulation {
    pub fn new(members: Vec<Individual>) -> Result<Self> {
        if members.is_empty() {
            return Err(invalid("sub-population must not be empty"));
        }
        Ok(Self { members })
    }

    pub fn random<R: Rng + ?Sized>(formula: &CnfFormula, size: usize, rng: &mut R) -> Result<Self> {
        Self::new(
            (0..size)
                .map(|_| Individual::random(formula, rng))
                .collect(),
        )
    }

    pub fn members(&self) -> &[Individual] {
        &self.members
    }

    pub fn members_mut(&mut self) -> &mut [Individual] {
        &mut self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// The first member with maximal fitness.
    pub fn best(&self) -> &Individual {
        self.members
            .iter()
            .reduce(|best, m| if m.fitness > best.fitness { m } else { best })
            .expect("sub-population is never empty")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossoverRule {
    /// One-point crossover gated by annealing acceptance.
    Annealed,
    /// One-point crossover keeping the two fittest of parents and children.
    Elitist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationRule {
    /// Bit-flip mutation gated by annealing acceptance.
    Annealed,
    /// Bit-flip mutation, always kept.
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BottomParams {
    /// Per-bit flip probability.
    pub mutation_rate: f64,
    pub crossover_rule: CrossoverRule,
    pub mutation_rule: MutationRule,
    pub generations_per_epoch: usize,
    pub accept_rule: CrossoverAcceptRule,
}

impl BottomParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return Err(invalid(format!(
                "mutation rate must lie in [0, 1], got {}",
                self.mutation_rate
            )));
        }
        Ok(())
    }
}

fn fitness_proportional_index(members: &[Individual], u: f64) -> usize {
    let total: usize = members.iter().map(|m| m.fitness).sum();
    if total == 0 {
        return ((u * members.len() as f64) as usize).min(members.len() - 1);
    }
    let target = u * total as f64;
    let mut cumulative = 0usize;
    for (i, m) in members.iter().enumerate() {
        cumulative += m.fitness;
        if cumulative as f64 > target {
            return i;
        }
    }
    // u < 1 keeps target below the total; reachable only through rounding.
    members.iter().rposition(|m| m.fitness > 0).unwrap_or(0)
}

/// Fitness-proportional selection driven by the uniform draw `u`.
/// Falls back to uniform selection when every fitness is zero.
pub fn roulette_select(pop: &SubPopulation, u: f64) -> Result<&Individual> {
    if pop.members.is_empty() {
        return Err(invalid("cannot select from an empty population"));
    }
    Ok(&pop.members[fitness_proportional_index(&pop.members, u)])
}

fn check_same_length(a: &Individual, b: &Individual) -> Result<()> {
    if a.genome.len() != b.genome.len() {
        return Err(invalid(format!(
            "genome lengths differ: {} vs {}",
            a.genome.len(),
            b.genome.len()
        )));
    }
    Ok(())
}

/// Swaps the tails of `a` and `b` from position `cut` on.
/// `cut` must lie in `1..n`.
pub fn one_point_crossover(
    a: &Individual,
    b: &Individual,
    cut: usize,
    formula: &CnfFormula,
) -> Result<(Individual, Individual)> {
    check_same_length(a, b)?;
    let n = a.genome.len();
    if cut == 0 || cut >= n {
        return Err(invalid(format!("cut {cut} outside 1..{n}")));
    }
    let (ab, bb) = (a.genome.bits(), b.genome.bits());
    let differing: Vec<usize> = (cut..n).filter(|&i| ab[i] != bb[i]).collect();
    if differing.is_empty() {
        return Ok((a.clone(), b.clone()));
    }
    let first = [&ab[..cut], &bb[cut..]].concat();
    let second = [&bb[..cut], &ab[cut..]].concat();
    let first_fitness = formula.count_satisfied_after_flips(ab, a.fitness, &first, &differing);
    let second_fitness = formula.count_satisfied_after_flips(bb, b.fitness, &second, &differing);
    Ok((
        Individual {
            genome: Assignment::new(first),
            fitness: first_fitness,
        },
        Individual {
            genome: Assignment::new(second),
            fitness: second_fitness,
        },
    ))
}

/// Uniform cut in `1..n`, or `None` when the genome is too short to cut.
fn random_cut<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Option<usize> {
    (n >= 2).then(|| rng.gen_range(1..n))
}

/// Flips each bit independently with probability `rate`.
///
/// Flip positions are drawn as geometric gaps, which has the same
/// distribution as one Bernoulli trial per bit.
pub fn bit_flip_mutate<R: Rng + ?Sized>(
    a: &Individual,
    rate: f64,
    formula: &CnfFormula,
    rng: &mut R,
) -> Individual {
    let n = a.genome.len();
    if rate <= 0.0 || n == 0 {
        return a.clone();
    }
    let mut genome = a.genome.clone();
    let bits = genome.bits_mut();
    let flipped: Vec<usize> = if rate >= 1.0 {
        (0..n).collect()
    } else {
        let log_keep = (-rate).ln_1p();
        let mut positions = Vec::new();
        let mut pos = 0usize;
        loop {
            let u: f64 = rng.gen();
            let gap = (-u).ln_1p() / log_keep;
            if gap >= (n - pos) as f64 {
                break;
            }
            pos += gap as usize;
            positions.push(pos);
            pos += 1;
        }
        positions
    };
    if flipped.is_empty() {
        return a.clone();
    }
    for &i in &flipped {
        bits[i] = !bits[i];
    }
    let fitness =
        formula.count_satisfied_after_flips(a.genome.bits(), a.fitness, genome.bits(), &flipped);
    Individual { genome, fitness }
}

/// Annealed crossover with an explicit cut and uniform draw.
///
/// With `t1` the parents' best fitness and `t2` the children's, the
/// children are returned when [`crossover_accept`] holds; otherwise the
/// parents are returned unchanged.
pub fn annealed_crossover_at(
    a: &Individual,
    b: &Individual,
    cut: usize,
    u: f64,
    temperature: f64,
    rule: CrossoverAcceptRule,
    formula: &CnfFormula,
) -> Result<(Individual, Individual)> {
    let (c, d) = one_point_crossover(a, b, cut, formula)?;
    let parents_best = a.fitness.max(b.fitness);
    let children_best = c.fitness.max(d.fitness);
    if crossover_accept(parents_best, children_best, temperature, u, rule)? {
        Ok((c, d))
    } else {
        Ok((a.clone(), b.clone()))
    }
}

/// Annealed crossover at a uniform random cut.
pub fn annealed_crossover<R: Rng + ?Sized>(
    a: &Individual,
    b: &Individual,
    temperature: f64,
    rule: CrossoverAcceptRule,
    formula: &CnfFormula,
    rng: &mut R,
) -> Result<(Individual, Individual)> {
    check_same_length(a, b)?;
    crossover_accept(1, 1, temperature, 0.0, rule)?;
    let Some(cut) = random_cut(a.genome.len(), rng) else {
        return Ok((a.clone(), b.clone()));
    };
    let u = rng.gen::<f64>();
    annealed_crossover_at(a, b, cut, u, temperature, rule, formula)
}

/// Bit-flip mutation kept when [`mutation_accept`] holds, otherwise `a` is
/// returned unchanged.
pub fn annealed_mutation<R: Rng + ?Sized>(
    a: &Individual,
    temperature: f64,
    rate: f64,
    formula: &CnfFormula,
    rng: &mut R,
) -> Result<Individual> {
    mutation_accept(0, 0, temperature, 0.0)?;
    let mutated = bit_flip_mutate(a, rate, formula, rng);
    if mutated.fitness >= a.fitness {
        return Ok(mutated);
    }
    let u = rng.gen::<f64>();
    if mutation_accept(a.fitness, mutated.fitness, temperature, u)? {
        Ok(mutated)
    } else {
        Ok(a.clone())
    }
}

/// One-point crossover at an explicit cut, keeping the two fittest of
/// `{a, b, c, d}`. Ties prefer children, then input order.
pub fn elitist_crossover_at(
    a: &Individual,
    b: &Individual,
    cut: usize,
    formula: &CnfFormula,
) -> Result<(Individual, Individual)> {
    let (c, d) = one_point_crossover(a, b, cut, formula)?;
    Ok(two_fittest([c, d, a.clone(), b.clone()]))
}

fn two_fittest(mut candidates: [Individual; 4]) -> (Individual, Individual) {
    // Stable sort keeps the preference order among equal fitness.
    candidates.sort_by_key(|c| std::cmp::Reverse(c.fitness));
    let [first, second, _, _] = candidates;
    (first, second)
}

/// Elitist crossover at a uniform random cut.
pub fn elitist_crossover<R: Rng + ?Sized>(
    a: &Individual,
    b: &Individual,
    formula: &CnfFormula,
    rng: &mut R,
) -> Result<(Individual, Individual)> {
    check_same_length(a, b)?;
    match random_cut(a.genome.len(), rng) {
        Some(cut) => elitist_crossover_at(a, b, cut, formula),
        None => Ok((a.clone(), b.clone())),
    }
}

/// Result of one bottom epoch.
#[derive(Debug, Clone)]
pub struct BottomOutcome {
    pub population: SubPopulation,
    /// Fittest individual present at the end of any generation in the
    /// epoch, including the starting population.
    pub best_seen: Individual,
}

/// Runs `params.generations_per_epoch` generations and returns the final
/// population.
pub fn evolve_bottom<R: Rng + ?Sized>(
    pop: &SubPopulation,
    formula: &CnfFormula,
    params: &BottomParams,
    temperature: f64,
    rng: &mut R,
) -> Result<SubPopulation> {
    evolve_bottom_tracked(pop, formula, params, temperature, rng).map(|o| o.population)
}

/// [`evolve_bottom`], also reporting the best individual seen along the way.
///
/// Each generation draws `ceil(size / 2)` roulette-selected parent pairs
/// from the current population. The configured crossover is applied to each
/// pair and its two results overwrite the parents' slots, so a rejected
/// crossover leaves those slots as they were. Every member then goes through
/// the configured mutation in place.
pub fn evolve_bottom_tracked<R: Rng + ?Sized>(
    pop: &SubPopulation,
    formula: &CnfFormula,
    params: &BottomParams,
    temperature: f64,
    rng: &mut R,
) -> Result<BottomOutcome> {
    params.validate()?;
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(invalid(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    let size = pop.len();
    let mut current = pop.members.clone();
    let mut best_seen = pop.best().clone();

    for _ in 0..params.generations_per_epoch {
        for _ in 0..size.div_ceil(2) {
            let i = fitness_proportional_index(&current, rng.gen());
            let j = fitness_proportional_index(&current, rng.gen());
            let (a, b) = (&current[i], &current[j]);
            let (c, d) = match params.crossover_rule {
                CrossoverRule::Annealed => {
                    annealed_crossover(a, b, temperature, params.accept_rule, formula, rng)?
                }
                CrossoverRule::Elitist => elitist_crossover(a, b, formula, rng)?,
            };
            // With i == j the first result lands last.
            current[j] = d;
            current[i] = c;
        }
        for member in &mut current {
            let mutated = match params.mutation_rule {
                MutationRule::Annealed => {
                    annealed_mutation(member, temperature, params.mutation_rate, formula, rng)?
                }
                MutationRule::Plain => bit_flip_mutate(member, params.mutation_rate, formula, rng),
            };
            *member = mutated;
        }
        let generation_best = current
            .iter()
            .reduce(|best, m| if m.fitness > best.fitness { m } else { best })
            .expect("sub-population is never empty");
        if generation_best.fitness > best_seen.fitness {
            best_seen = generation_best.clone();
        }
    }

    Ok(BottomOutcome {
        population: SubPopulation { members: current },
        best_seen,
    })
}
