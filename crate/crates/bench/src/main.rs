use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use bea_bench::{emit_report, run_experiment, write_trace_csv, ExperimentSpec, Format};
use bea_sat::cnf::generate_random_3sat_sized;
use bea_sat::{solve, CnfFormula, CrossoverAcceptRule, SolverConfig, Variant};
use clap::{Parser, Subcommand};

/// Exit code when a satisfying assignment was found.
const EXIT_SATISFIABLE: u8 = 10;
/// Exit code when the generation budget ran out first.
const EXIT_UNKNOWN: u8 = 20;

#[derive(Parser)]
#[command(
    name = "bea",
    version,
    about = "Hierarchical genetic SAT solving and benchmarking"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one DIMACS CNF file.
    Solve {
        cnf: PathBuf,
        #[arg(long, default_value = "bea")]
        variant: Variant,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// High-level generation budget.
        #[arg(long)]
        max_gens: Option<usize>,
        #[arg(long, default_value = "absolute")]
        accept_rule: CrossoverAcceptRule,
        /// Also write the per-generation trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Generate a uniform random 3-SAT formula in DIMACS format.
    Gen {
        #[arg(long)]
        vars: usize,
        #[arg(long)]
        clauses: usize,
        #[arg(long)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Run an experiment described by a TOML spec file.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value = "table")]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors share the generic error exit code.
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve {
            cnf,
            variant,
            seed,
            max_gens,
            accept_rule,
            trace,
        } => {
            let text = std::fs::read_to_string(&cnf)
                .with_context(|| format!("cannot read {}", cnf.display()))?;
            let formula = CnfFormula::parse_dimacs(&text)
                .with_context(|| format!("cannot parse {}", cnf.display()))?;
            let defaults = SolverConfig::with_variant(variant);
            let config = SolverConfig {
                max_high_level_generations: max_gens.unwrap_or(defaults.max_high_level_generations),
                crossover_accept_rule: accept_rule,
                ..defaults
            };
            let result = solve(&formula, &config, seed)?;
            if let Some(path) = trace {
                let file = File::create(&path)
                    .with_context(|| format!("cannot create {}", path.display()))?;
                write_trace_csv(&result.trace, BufWriter::new(file))?;
            }

            let mut out = io::stdout().lock();
            writeln!(out, "c variant {} seed {seed}", result.variant)?;
            writeln!(out, "c generations {}", result.generations)?;
            writeln!(
                out,
                "c best_fitness {}/{}",
                result.best_fitness, result.num_clauses
            )?;
            if result.solved {
                writeln!(out, "s SATISFIABLE")?;
                let literals: Vec<String> = result
                    .best_individual
                    .genome()
                    .to_literals()
                    .iter()
                    .map(i64::to_string)
                    .collect();
                writeln!(out, "v {} 0", literals.join(" "))?;
                Ok(ExitCode::from(EXIT_SATISFIABLE))
            } else {
                writeln!(out, "s UNKNOWN")?;
                Ok(ExitCode::from(EXIT_UNKNOWN))
            }
        }
        Command::Gen {
            vars,
            clauses,
            seed,
            output,
        } => {
            let dimacs = generate_random_3sat_sized(vars, clauses, seed)?.to_dimacs();
            match output {
                Some(path) => std::fs::write(&path, dimacs)
                    .with_context(|| format!("cannot write {}", path.display()))?,
                None => io::stdout().lock().write_all(dimacs.as_bytes())?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { spec, format } => {
            let spec = ExperimentSpec::from_file(&spec)?;
            let results = run_experiment(&spec)?;
            io::stdout()
                .lock()
                .write_all(emit_report(&results, format)?.as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}
