//! Rendering experiment results as a table, CSV or JSON lines.
//!
//! Every format embeds the full spec (solver parameters, variants, seeds)
//! so a report is reproducible on its own. CSV and table reports carry it
//! in `#` comment lines ahead of the data.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use bea_sat::{TraceEntry, Variant};
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};
use crate::experiment::{AggregateStats, ExperimentResults, InstanceError, RunRecord};
use crate::spec::ExperimentSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "table" => Ok(Self::Table),
            "csv" => Ok(Self::Csv),
            "jsonl" | "json-lines" => Ok(Self::Jsonl),
            _ => Err(BenchError::UnknownFormat(s.to_owned())),
        }
    }
}

/// One line of a JSON-lines report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ReportLine {
    Spec(ExperimentSpec),
    Run(RunRecord),
    Error(InstanceError),
    Aggregate {
        variant: Variant,
        #[serde(flatten)]
        stats: AggregateStats,
    },
}

/// Renders `results`. Fails with [`BenchError::EmptyResults`] when there is
/// nothing to report.
pub fn emit_report(results: &ExperimentResults, format: Format) -> Result<String> {
    if results.records.is_empty() && results.errors.is_empty() {
        return Err(BenchError::EmptyResults);
    }
    match format {
        Format::Table => render_table(results),
        Format::Csv => render_csv(results),
        Format::Jsonl => render_jsonl(results),
    }
}

/// `"-"` when no run succeeded.
pub fn format_mean_generations(stats: Option<&AggregateStats>) -> String {
    match stats.and_then(|s| s.mean_generations) {
        Some(mean) => format!("{mean:.1}"),
        None => "-".to_owned(),
    }
}

fn preamble(results: &ExperimentResults) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "# spec: {}", serde_json::to_string(&results.spec)?).unwrap();
    for summary in results.summaries() {
        writeln!(
            out,
            "# aggregate {}: {}",
            summary.variant,
            serde_json::to_string(&summary.stats)?
        )
        .unwrap();
    }
    for error in &results.errors {
        writeln!(out, "# error {}: {}", error.instance, error.message).unwrap();
    }
    Ok(out)
}

fn render_table(results: &ExperimentResults) -> Result<String> {
    let mut out = preamble(results)?;
    let variants = &results.spec.variants;
    let name_width = results
        .instances()
        .iter()
        .map(|s| s.len())
        .chain([8])
        .max()
        .unwrap_or(8);

    let mut header = format!("{:<name_width$} {:>6} {:>6}", "instance", "m", "n");
    for v in variants {
        write!(
            header,
            " {:>12} {:>8}",
            format!("{v} gens"),
            format!("{v} rate")
        )
        .unwrap();
    }
    writeln!(out, "{header}").unwrap();

    let row =
        |out: &mut String, label: &str, dims: Option<(usize, usize)>, instance: Option<&str>| {
            let (m, n) = dims.map_or(("".into(), "".into()), |(m, n)| {
                (m.to_string(), n.to_string())
            });
            write!(out, "{label:<name_width$} {m:>6} {n:>6}").unwrap();
            for &v in variants {
                let stats = results.stats_for(instance, v);
                let rate = stats.as_ref().map_or("-".to_owned(), |s| {
                    format!("{:.0}%", 100.0 * s.success_rate)
                });
                write!(
                    out,
                    " {:>12} {:>8}",
                    format_mean_generations(stats.as_ref()),
                    rate
                )
                .unwrap();
            }
            out.push('\n');
        };
    for instance in results.instances() {
        let first = results
            .records
            .iter()
            .find(|r| r.instance == instance)
            .expect("instance has records");
        row(&mut out, instance, Some((first.m, first.n)), Some(instance));
    }
    if results.instances().len() > 1 {
        row(&mut out, "all", None, None);
    }

    writeln!(out).unwrap();
    writeln!(
        out,
        "{:<8} {:>6} {:>9} {:>12} {:>12} {:>15}",
        "variant", "runs", "successes", "success_rate", "mean_gens", "mean_best_unsat"
    )
    .unwrap();
    for s in results.summaries() {
        writeln!(
            out,
            "{:<8} {:>6} {:>9} {:>12.3} {:>12} {:>15.3}",
            s.variant.to_string(),
            s.stats.runs,
            s.stats.successes,
            s.stats.success_rate,
            format_mean_generations(Some(&s.stats)),
            s.stats.mean_best_unsat
        )
        .unwrap();
    }
    Ok(out)
}

fn render_csv(results: &ExperimentResults) -> Result<String> {
    let mut out = preamble(results)?.into_bytes();
    {
        let mut writer = csv::Writer::from_writer(&mut out);
        if results.records.is_empty() {
            writer.write_record([
                "instance",
                "variant",
                "seed",
                "solved",
                "generations",
                "best_fitness",
                "m",
                "n",
                "wall_ms",
            ])?;
        }
        for record in &results.records {
            writer.serialize(record)?;
        }
        writer.flush().map_err(csv::Error::from)?;
    }
    Ok(String::from_utf8(out).expect("CSV output is UTF-8"))
}

fn render_jsonl(results: &ExperimentResults) -> Result<String> {
    let mut lines = vec![ReportLine::Spec(results.spec.clone())];
    lines.extend(results.records.iter().cloned().map(ReportLine::Run));
    lines.extend(results.errors.iter().cloned().map(ReportLine::Error));
    lines.extend(
        results
            .summaries()
            .into_iter()
            .map(|s| ReportLine::Aggregate {
                variant: s.variant,
                stats: s.stats,
            }),
    );
    let mut out = String::new();
    for line in &lines {
        out.push_str(&serde_json::to_string(line)?);
        out.push('\n');
    }
    Ok(out)
}

/// Reads the run records back from a CSV report, skipping `#` lines.
pub fn parse_csv_records(text: &str) -> Result<Vec<RunRecord>> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(BenchError::from))
        .collect()
}

/// Parses every line of a JSON-lines report.
pub fn parse_jsonl(text: &str) -> Result<Vec<ReportLine>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(BenchError::from))
        .collect()
}

/// Writes a per-generation trace as CSV with columns
/// `generation,global_best,population_best,temperature`.
pub fn write_trace_csv<W: Write>(trace: &[TraceEntry], writer: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(writer);
    for entry in trace {
        writer.serialize(entry)?;
    }
    writer.flush().map_err(csv::Error::from)?;
    Ok(())
}
