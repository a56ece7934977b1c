//! Incomplete SAT solving with a hierarchical genetic algorithm.
//!
//! The solver keeps several small sub-populations of truth assignments. Each
//! one evolves on its own for a fixed number of generations (the *bottom*
//! level), then whole sub-populations are selected, recombined and mutated
//! as units (the *high* level). Three variants are provided:
//!
//! - [`Variant::Bea`]: bottom crossover and mutation gated by annealing
//!   acceptance, high-level selection weighted by best and mean fitness,
//!   plus an elitism guard.
//! - [`Variant::Bihga`]: elitist bottom crossover with the same high-level
//!   selection and guard.
//! - [`Variant::Hga`]: elitist bottom crossover and mean-fitness-only
//!   high-level selection.
//!
//! Fitness is the number of satisfied clauses, so a run succeeds when the
//! best individual reaches the clause count.
//!
//! ```
//! use bea_sat::{solve, CnfFormula, SolverConfig};
//!
//! let formula: CnfFormula = "p cnf 3 2\n1 -2 0\n2 3 0\n".parse().unwrap();
//! let result = solve(&formula, &SolverConfig::default(), 7).unwrap();
//! assert!(result.solved);
//! assert!(formula.is_satisfying(result.best_individual.genome()).unwrap());
//! ```

pub mod annealing;
pub mod bottom;
pub mod cnf;
mod error;
pub mod hier;
pub mod rng;

pub use annealing::{CrossoverAcceptRule, TemperatureSchedule};
pub use bottom::{BottomParams, CrossoverRule, Individual, MutationRule, SubPopulation};
pub use cnf::{Assignment, Clause, CnfFormula, Literal};
pub use error::{Error, Result};
pub use hier::{
    solve, solve_with, Execution, RunResult, SolverConfig, SubPopulationStats, TraceEntry, Variant,
};
