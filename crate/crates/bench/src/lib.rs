//! Experiment harness for the `bea-sat` solver.
//!
//! An [`ExperimentSpec`] names a set of formulas, the solver variants to
//! compare and the run seeds. [`run_experiment`] executes every
//! (instance, variant, seed) cell and [`emit_report`] renders the results
//! as a table, CSV or JSON lines.

mod error;
pub mod experiment;
pub mod report;
pub mod spec;

pub use error::{BenchError, Result};
pub use experiment::{
    run_experiment, AggregateStats, ExperimentResults, InstanceError, RunRecord, VariantSummary,
};
pub use report::{
    emit_report, parse_csv_records, parse_jsonl, write_trace_csv, Format, ReportLine,
};
pub use spec::{ExperimentSpec, Source};
