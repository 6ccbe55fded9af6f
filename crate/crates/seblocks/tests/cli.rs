use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_seblocks"))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

#[test]
fn rank_sum_on_bivariate_files() {
    let x = data("x_table4.csv");
    let y = data("y_table1.csv");
    let o = run(&[
        "test",
        "--x",
        x.to_str().unwrap(),
        "--y",
        y.to_str().unwrap(),
        "--test",
        "rs",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_eq!(v["statistic"], 40.0);
    assert_eq!(v["m"], 8);
    assert_eq!(v["n"], 6);
    assert_eq!(v["p"], 2);
    assert_eq!(v["plan"], "spiral");
    assert_eq!(v["method"], "exact");
    assert!((v["p_two_sided"].as_f64().unwrap() - 24.0 / 3003.0).abs() < 1e-12);
}

#[test]
fn decide_sets_exit_code_two_on_rejection() {
    let args = |x: &str, y: &str| {
        vec![
            "test".to_string(),
            "--x".into(),
            data(x).display().to_string(),
            "--y".into(),
            data(y).display().to_string(),
            "--test".into(),
            "runs".into(),
            "--decide".into(),
        ]
    };
    let o = bin()
        .args(args("shifted_x.csv", "shifted_y.csv"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert_eq!(json(&o)["statistic"], 2.0);
    let o = bin()
        .args(args("runs_x.csv", "runs_y.csv"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["reject"], false);
}

#[test]
fn identical_files_are_a_tie_error() {
    let x = data("runs_x.csv");
    let o = run(&[
        "test",
        "--x",
        x.to_str().unwrap(),
        "--y",
        x.to_str().unwrap(),
        "--test",
        "runs",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tie between samples"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn frequencies_can_be_given_directly() {
    let o = run(&[
        "test", "--freqs", "4,1,0,2", "--test", "eb", "--output", "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let row = rdr.records().next().unwrap().unwrap();
    let field = |k: &str| {
        row.get(headers.iter().position(|h| h == k).unwrap())
            .unwrap()
            .to_string()
    };
    assert_eq!(field("statistic"), "1");
    assert_eq!(field("m"), "7");
    assert_eq!(field("n"), "3");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["test", "--test", "rs"]).status.code(), Some(1));
    assert_eq!(
        run(&["test", "--freqs", "1,2", "--test", "linear_rank"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        run(&["test", "--freqs", "1,2", "--alpha", "1.5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let o = run(&[
        "test",
        "--x",
        data("runs_x.csv").to_str().unwrap(),
        "--y",
        data("y_table1.csv").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("dimension mismatch"), "{}", stderr(&o));
}

#[test]
fn dist_oracle_round_trips_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    for stat in [
        "empty_block",
        "runs",
        "precedence",
        "maximal_block",
        "interior_exterior",
    ] {
        let out = dir.path().join(format!("{stat}.csv"));
        let o = run(&[
            "dist",
            "--statistic",
            stat,
            "--m",
            "5",
            "--n",
            "4",
            "--oracle",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0), "{stat}: {}", stderr(&o));
        let mut rdr = csv::Reader::from_path(&out).unwrap();
        let col = rdr
            .headers()
            .unwrap()
            .iter()
            .position(|h| h == "probability")
            .unwrap();
        let total: f64 = rdr
            .records()
            .map(|r| r.unwrap()[col].parse::<f64>().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12, "{stat}: {total}");
    }
}

#[test]
fn power_from_a_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("small.toml");
    std::fs::write(
        &config,
        "m = 20\nn = 20\np = 2\nreplicates = 50\nseed = 3\n\n[[study]]\nscenario = \"alt1\"\nc = 2\ntests = [\"rs\", \"eb\"]\n",
    )
    .unwrap();
    let o = run(&[
        "power",
        "--config",
        config.to_str().unwrap(),
        "--threads",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rdr.records().count(), 2);
    let again = run(&[
        "power",
        "--config",
        config.to_str().unwrap(),
        "--threads",
        "1",
    ]);
    assert_eq!(stdout(&again), out);

    std::fs::write(
        &config,
        "m = 20\nn = 20\np = 2\nreplicates = 0\n[[study]]\nscenario = \"null\"\ntests = [\"rs\"]\n",
    )
    .unwrap();
    let o = run(&["power", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("small.toml:4:"), "{}", stderr(&o));
}
