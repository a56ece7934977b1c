use std::process::{Command, Output};

use bea_sat::{Assignment, CnfFormula};

fn bea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bea"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

#[test]
fn gen_writes_dimacs_to_stdout_and_file() {
    let out = bea(&["gen", "--vars", "20", "--clauses", "91", "--seed", "4"]);
    assert!(out.status.success());
    let formula = CnfFormula::parse_dimacs(&stdout(&out)).unwrap();
    assert_eq!((formula.num_vars(), formula.num_clauses()), (20, 91));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.cnf");
    let out = bea(&[
        "gen",
        "--vars",
        "20",
        "--clauses",
        "91",
        "--seed",
        "4",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        CnfFormula::parse_dimacs(&std::fs::read_to_string(&path).unwrap()).unwrap(),
        formula
    );
}

#[test]
fn solve_reports_a_verified_assignment_with_exit_10() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("easy.cnf");
    let trace = dir.path().join("trace.csv");
    std::fs::write(&cnf, "p cnf 4 3\n1 -2 0\n2 3 0\n-1 4 0\n").unwrap();
    let out = bea(&[
        "solve",
        cnf.to_str().unwrap(),
        "--variant",
        "bihga",
        "--seed",
        "2",
        "--accept-rule",
        "delta",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(10));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "s SATISFIABLE"));
    let v_line = text.lines().find(|l| l.starts_with("v ")).unwrap();
    let literals: Vec<i64> = v_line[2..]
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(literals.last(), Some(&0));
    let bits: Vec<bool> = literals[..literals.len() - 1]
        .iter()
        .map(|&l| l > 0)
        .collect();
    let formula = CnfFormula::parse_dimacs(&std::fs::read_to_string(&cnf).unwrap()).unwrap();
    assert!(formula.is_satisfying(&Assignment::new(bits)).unwrap());

    let trace = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(
        trace.lines().next(),
        Some("generation,global_best,population_best,temperature")
    );
}

#[test]
fn solve_exhausting_the_budget_exits_20() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("unsat.cnf");
    std::fs::write(&cnf, "p cnf 1 2\n1 0\n-1 0\n").unwrap();
    let out = bea(&[
        "solve",
        cnf.to_str().unwrap(),
        "--seed",
        "1",
        "--max-gens",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(20));
    let text = stdout(&out);
    assert!(text.lines().any(|l| l == "s UNKNOWN"));
    assert!(text.lines().any(|l| l == "c generations 7"));
    assert!(text.lines().any(|l| l == "c best_fitness 1/2"));
    assert!(!text.lines().any(|l| l.starts_with("v ")));
}

#[test]
fn errors_exit_1() {
    assert_eq!(
        bea(&["solve", "/nonexistent/file.cnf"]).status.code(),
        Some(1)
    );
    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("broken.cnf");
    std::fs::write(&cnf, "p cnf 1 1\n2 0\n").unwrap();
    assert_eq!(
        bea(&["solve", cnf.to_str().unwrap()]).status.code(),
        Some(1)
    );
    assert_eq!(
        bea(&["solve", cnf.to_str().unwrap(), "--variant", "ga"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        bea(&["bench", "--spec", "/nonexistent.toml", "--format", "xml"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn bench_emits_csv() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.toml");
    std::fs::write(
        &spec,
        "seeds = [0, 1]\nvariants = [\"bea\"]\n[source]\nkind = \"random\"\nvars = 10\nclauses = 30\ninstance_seeds = [2]\n",
    )
    .unwrap();
    let out = bea(&["bench", "--spec", spec.to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    let records = bea_bench::parse_csv_records(&stdout(&out)).unwrap();
    assert_eq!(records.len(), 2);
    assert!(records.iter().all(|r| r.instance == "random-n10-m30-s2"));
}
