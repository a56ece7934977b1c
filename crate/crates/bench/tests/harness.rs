use std::path::Path;

use bea_bench::{
    emit_report, parse_csv_records, parse_jsonl, run_experiment, AggregateStats, BenchError,
    ExperimentResults, ExperimentSpec, Format, ReportLine, RunRecord,
};
use bea_sat::Variant;

const CONTRADICTION: &str = "p cnf 1 2\n1 0\n-1 0\n";

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

fn contradiction_spec(dir: &Path) -> ExperimentSpec {
    write(dir, "contradiction.cnf", CONTRADICTION);
    write(
        dir,
        "spec.toml",
        r#"
runs_per_instance = 3

[source]
kind = "files"
paths = ["contradiction.cnf"]

[config]
max_high_level_generations = 20
"#,
    );
    ExperimentSpec::from_file(&dir.join("spec.toml")).unwrap()
}

fn random_spec(max_gens: usize) -> ExperimentSpec {
    ExperimentSpec::from_toml_str(&format!(
        r#"
seeds = [3, 1, 4]
variants = ["hga", "bea"]

[source]
kind = "random"
vars = 20
clauses = 91
instance_seeds = [7, 8]

[config]
max_high_level_generations = {max_gens}
"#
    ))
    .unwrap()
}

fn without_wall_time(mut results: ExperimentResults) -> ExperimentResults {
    for r in &mut results.records {
        r.wall_ms = 0.0;
    }
    results
}

#[test]
fn unsatisfiable_instance_never_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let results = run_experiment(&contradiction_spec(dir.path())).unwrap();
    assert_eq!(results.records.len(), 9);
    for summary in results.summaries() {
        assert_eq!(summary.stats.runs, 3);
        assert_eq!(summary.stats.success_rate, 0.0);
        assert_eq!(summary.stats.mean_best_unsat, 1.0);
        assert_eq!(summary.stats.mean_generations, None);
    }
}

#[test]
fn records_follow_spec_order() {
    let results = run_experiment(&random_spec(5)).unwrap();
    let keys: Vec<(String, Variant, u64)> = results
        .records
        .iter()
        .map(|r| (r.instance.clone(), r.variant, r.seed))
        .collect();
    let mut expected = Vec::new();
    for instance in ["random-n20-m91-s7", "random-n20-m91-s8"] {
        for variant in [Variant::Hga, Variant::Bea] {
            for seed in [3, 1, 4] {
                expected.push((instance.to_owned(), variant, seed));
            }
        }
    }
    assert_eq!(keys, expected);
    assert!(results.records.iter().all(|r| r.m == 91 && r.n == 20));
}

#[test]
fn identical_specs_give_identical_reports() {
    let spec = random_spec(30);
    let first = without_wall_time(run_experiment(&spec).unwrap());
    let second = without_wall_time(run_experiment(&spec).unwrap());
    for format in [Format::Table, Format::Csv, Format::Jsonl] {
        assert_eq!(
            emit_report(&first, format).unwrap(),
            emit_report(&second, format).unwrap()
        );
    }
}

#[test]
fn csv_has_exact_columns_and_reproduces_aggregates() {
    let results = run_experiment(&random_spec(30)).unwrap();
    let csv = emit_report(&results, Format::Csv).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(
        header,
        "instance,variant,seed,solved,generations,best_fitness,m,n,wall_ms"
    );
    let parsed = parse_csv_records(&csv).unwrap();
    assert_eq!(parsed, results.records);

    for summary in results.summaries() {
        let recomputed =
            AggregateStats::from_records(parsed.iter().filter(|r| r.variant == summary.variant))
                .unwrap();
        assert_eq!(recomputed, summary.stats);
        let line = format!(
            "# aggregate {}: {}",
            summary.variant,
            serde_json::to_string(&recomputed).unwrap()
        );
        assert!(csv.lines().any(|l| l == line), "missing {line}");
    }
}

#[test]
fn success_rate_is_exact_ratio() {
    let results = run_experiment(&random_spec(30)).unwrap();
    for summary in results.summaries() {
        let of_variant: Vec<&RunRecord> = results
            .records
            .iter()
            .filter(|r| r.variant == summary.variant)
            .collect();
        let successes = of_variant.iter().filter(|r| r.solved).count();
        assert_eq!(
            summary.stats.success_rate,
            successes as f64 / of_variant.len() as f64
        );
    }
}

#[test]
fn jsonl_parses_back_to_the_same_records() {
    let results = run_experiment(&random_spec(10)).unwrap();
    let lines = parse_jsonl(&emit_report(&results, Format::Jsonl).unwrap()).unwrap();
    let ReportLine::Spec(spec) = &lines[0] else {
        panic!("first line must carry the spec");
    };
    assert_eq!(spec, &results.spec);
    let runs: Vec<RunRecord> = lines
        .iter()
        .filter_map(|l| match l {
            ReportLine::Run(r) => Some(r.clone()),
            _ => None,
        })
        .collect();
    assert_eq!(runs, results.records);
    let aggregates = lines
        .iter()
        .filter(|l| matches!(l, ReportLine::Aggregate { .. }))
        .count();
    assert_eq!(aggregates, 2);
}

#[test]
fn reports_embed_the_effective_configuration() {
    let results = run_experiment(&random_spec(10)).unwrap();
    let spec_json = serde_json::to_string(&results.spec).unwrap();
    for format in [Format::Table, Format::Csv] {
        let report = emit_report(&results, format).unwrap();
        let embedded = report
            .lines()
            .next()
            .unwrap()
            .strip_prefix("# spec: ")
            .unwrap();
        assert_eq!(embedded, spec_json);
        let reparsed: ExperimentSpec = serde_json::from_str(embedded).unwrap();
        assert_eq!(reparsed, results.spec);
    }
    for key in ["mutation_rate", "cooling_factor", "alpha", "beta", "seeds"] {
        assert!(spec_json.contains(key), "{key}");
    }
}

#[test]
fn no_success_renders_a_dash() {
    let dir = tempfile::tempdir().unwrap();
    let results = run_experiment(&contradiction_spec(dir.path())).unwrap();
    let table = emit_report(&results, Format::Table).unwrap();
    let row = table
        .lines()
        .find(|l| l.contains("contradiction.cnf") && !l.starts_with('#'))
        .unwrap();
    let cells: Vec<&str> = row.split_whitespace().collect();
    // instance, m, n, then (gens, rate) per variant.
    assert_eq!(&cells[1..], ["2", "1", "-", "0%", "-", "0%", "-", "0%"]);
}

#[test]
fn one_solved_run_gives_one_true_row() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "unit.cnf", "p cnf 1 1\n1 0\n");
    write(
        dir.path(),
        "spec.toml",
        "seeds = [5]\nvariants = [\"bea\"]\n[source]\nkind = \"files\"\npaths = [\"unit.cnf\"]\n",
    );
    let spec = ExperimentSpec::from_file(&dir.path().join("spec.toml")).unwrap();
    let csv = emit_report(&run_experiment(&spec).unwrap(), Format::Csv).unwrap();
    let rows: Vec<&str> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .collect();
    assert_eq!(rows.len(), 1);
    let fields: Vec<&str> = rows[0].split(',').collect();
    assert_eq!(fields[1..4], ["bea", "5", "true"]);
}

#[test]
fn unreadable_file_is_recorded_and_the_rest_still_runs() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ok.cnf", "p cnf 2 1\n1 2 0\n");
    write(dir.path(), "bad.cnf", "p cnf 2 1\n1 3 0\n");
    write(
        dir.path(),
        "spec.toml",
        "runs_per_instance = 2\n[source]\nkind = \"files\"\npaths = [\"missing.cnf\", \"bad.cnf\", \"ok.cnf\"]\n",
    );
    let spec = ExperimentSpec::from_file(&dir.path().join("spec.toml")).unwrap();
    let results = run_experiment(&spec).unwrap();
    assert_eq!(results.errors.len(), 2);
    assert!(results.errors[0].instance.ends_with("missing.cnf"));
    assert!(results.errors[1].instance.ends_with("bad.cnf"));
    assert_eq!(results.records.len(), 6);
    assert!(results
        .records
        .iter()
        .all(|r| r.instance.ends_with("ok.cnf")));
    let table = emit_report(&results, Format::Table).unwrap();
    assert!(table.contains("# error"));
}

#[test]
fn invalid_specs_are_rejected_before_running() {
    let base = "[source]\nkind = \"random\"\nvars = 20\nclauses = 91\ninstance_seeds = [1]\n";
    for bad in [
        format!("runs_per_instance = 0\n{base}"),
        base.to_owned(),
        format!("runs_per_instance = 2\nseeds = [1]\n{base}"),
        format!("runs_per_instance = 1\nvariants = []\n{base}"),
        format!("runs_per_instance = 1\nvariants = [\"bea\", \"bea\"]\n{base}"),
        format!("runs_per_instance = 1\nvariants = [\"ga\"]\n{base}"),
        format!("runs_per_instance = 1\n{base}[config]\nalpha = 2.0\n"),
        format!("runs_per_instance = 1\n{base}[config]\nmutation_rte = 0.1\n"),
        format!("runs_per_instance = 1\nunknown = 1\n{base}"),
        "runs_per_instance = 1\n[source]\nkind = \"random\"\nvars = 2\nclauses = 9\ninstance_seeds = [1]\n"
            .to_owned(),
    ] {
        assert!(
            matches!(ExperimentSpec::from_toml_str(&bad), Err(BenchError::Spec(_))),
            "accepted:\n{bad}"
        );
    }

    let mut spec = random_spec(5);
    spec.config.cooling_factor = 1.0;
    assert!(run_experiment(&spec).is_err());
}

#[test]
fn format_names() {
    assert_eq!("csv".parse::<Format>().unwrap(), Format::Csv);
    assert_eq!("JSONL".parse::<Format>().unwrap(), Format::Jsonl);
    assert_eq!("table".parse::<Format>().unwrap(), Format::Table);
    assert!(matches!(
        "xml".parse::<Format>(),
        Err(BenchError::UnknownFormat(_))
    ));
}

#[test]
fn empty_results_cannot_be_reported() {
    let results = ExperimentResults {
        spec: random_spec(5),
        records: vec![],
        errors: vec![],
    };
    assert!(matches!(
        emit_report(&results, Format::Csv),
        Err(BenchError::EmptyResults)
    ));
}
