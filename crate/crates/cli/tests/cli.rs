use std::io::Read;
use std::path::PathBuf;
use std::process::{Command, Output};

use flate2::read::GzDecoder;
use gelkit::{degree_distribution, size_distribution, state_from_density, FunctionalityDistribution, Method};
use serde_json::Value;

fn gelkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gelkit")).args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = gelkit(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(format!("{}-{name}", std::process::id()))
}

/// Data rows of a CSV table, skipping `#` summary lines and the header.
fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn gel_reports_the_trifunctional_gel_point() {
    let v: Value = serde_json::from_str(&stdout(&["gel", "--mix", "3:1"])).unwrap();
    assert_eq!(v["gels"], Value::Bool(true));
    assert_eq!(v["c_gel"].as_f64(), Some(0.5));
    assert_eq!(v["t_gel"].as_f64(), Some(1.0 / 3.0));
    let v: Value = serde_json::from_str(&stdout(&["gel", "--mix", "2:1"])).unwrap();
    assert_eq!(v["gels"], Value::Bool(false));
    assert_eq!(v["t_gel"], Value::String("inf".into()));
    let v: Value = serde_json::from_str(&stdout(&["gel", "--mix", "3:1", "--rate", "2"])).unwrap();
    assert_eq!(v["t_gel"].as_f64(), Some(1.0 / 6.0));
}

#[test]
fn sizedist_csv_rows() {
    let text = stdout(&["sizedist", "--mix", "3:1", "--conversion", "0.5", "--nmax", "4", "--format", "csv"]);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["n", "w"]);
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0], ["1", "0.125"]);
    let w2: f64 = rows[1][1].parse().unwrap();
    assert!((w2 - 0.09375).abs() < 1e-15);
    assert!(text.ends_with('\n') && !text.contains('\r'));
}

#[test]
fn emitted_numbers_round_trip() {
    let f: FunctionalityDistribution = "1:0.2,3:0.5,7:0.3".parse().unwrap();
    let sd = size_distribution(&degree_distribution(&f, &state_from_density(&f, 0.35).unwrap()), 200, Method::SeriesInversion)
        .unwrap();
    let args = ["sizedist", "--mix", "1:0.2,3:0.5,7:0.3", "--conversion", "0.35", "--nmax", "200"];
    let (_, rows) = csv_rows(&stdout(&args));
    for (row, (_, w)) in rows.iter().zip(sd.iter()) {
        assert_eq!(row[1].parse::<f64>().unwrap(), w);
    }
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&json_args)).unwrap();
    let ws = v["points"][0]["w"].as_array().unwrap();
    for (x, (_, w)) in ws.iter().zip(sd.iter()) {
        assert_eq!(x.as_f64().unwrap(), w);
    }
}

#[test]
fn sweeps_add_a_coordinate_column() {
    let (header, rows) = csv_rows(&stdout(&["sizedist", "--mix", "3:1", "--conversion", "0.1:0.1:0.3", "--nmax", "3"]));
    assert_eq!(header, ["c", "n", "w"]);
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[3][0], "0.2");
    let (header, rows) = csv_rows(&stdout(&["degree", "--mix", "2:1", "--time", "0,1"]));
    assert_eq!(header, ["t", "n", "u"]);
    assert_eq!(rows.len(), 6);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(gelkit(&["gel"]).status.code(), Some(2));
    assert_eq!(gelkit(&["stats", "--mix", "3:1"]).status.code(), Some(2));
    let both = gelkit(&["stats", "--mix", "3:1", "--conversion", "0.2", "--time", "1"]);
    assert_eq!(both.status.code(), Some(2));
    assert_eq!(gelkit(&["stats", "--mix", "3:1", "--conversion", "0:1"]).status.code(), Some(2));
    assert_eq!(gelkit(&["sizedist", "--mix", "3:1", "--conversion", "0.2", "--nmax", "0"]).status.code(), Some(2));
    let sweep = gelkit(&["mc", "--mix", "3:1", "--conversion", "0.1,0.2", "--vertices", "10"]);
    assert_eq!(sweep.status.code(), Some(2));
}

#[test]
fn domain_errors_exit_with_three() {
    for args in [
        &["gel", "--mix", "3:0.5"][..],
        &["gel", "--mix", "0:1"],
        &["gel", "--mix", "three"],
        &["stats", "--mix", "3:1", "--conversion", "1.5"],
        &["asymptote", "--mix", "3:1", "--conversion", "0"],
    ] {
        let out = gelkit(args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(!out.stderr.is_empty());
        assert!(out.stdout.is_empty());
    }
    let v: Value = serde_json::from_str(&stdout(&["gel", "--mix", "3:2,2:2", "--normalize"])).unwrap();
    assert_eq!(v["mixture"]["3"].as_f64(), Some(0.5));
}

#[test]
fn mixture_from_file_and_output_file() {
    let mix = scratch("mix.json");
    std::fs::write(&mix, r#"{"2": "49/50", "3": "1/50"}"#).unwrap();
    let out = scratch("gel.json");
    let text = stdout(&["gel", "--mix-file", mix.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(text.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!((v["c_gel"].as_f64().unwrap() - 101.0 / 104.0).abs() < 1e-12);
    let missing = gelkit(&["gel", "--mix-file", "/nonexistent/mix"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn stats_and_moments_tables() {
    let (header, rows) = csv_rows(&stdout(&["stats", "--mix", "3:1", "--conversion", "0.25,0.5,0.75"]));
    assert_eq!(header[..4], ["c", "t", "r0", "gel_fraction"]);
    assert!((rows[0][4].parse::<f64>().unwrap() - 2.5).abs() < 1e-12);
    assert_eq!(rows[1][5], "divergent");
    assert!((rows[2][3].parse::<f64>().unwrap() - 26.0 / 27.0).abs() < 1e-12);

    let (_, rows) = csv_rows(&stdout(&["moments", "--mix", "3:1", "--conversion", "0.5,1"]));
    assert_eq!(rows[0][2], "1.5");
    assert_eq!(rows[0][3], "3.0");
    assert_eq!(rows[1][5], "");

    let v: Value = serde_json::from_str(&stdout(&["stats", "--mix", "3:1", "--conversion", "1", "--format", "json"])).unwrap();
    assert_eq!(v["points"][0]["expected_size"]["kind"], "empty");
}

#[test]
fn simulation_is_reproducible_across_thread_counts() {
    let args = ["mc", "--mix", "3:1", "--conversion", "0.6", "--vertices", "3000", "--runs", "8", "--seed", "17"];
    let run = |threads: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_gelkit")).args(args).env("GELKIT_THREADS", threads).output().unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    assert_eq!(one, run("1"));
    let bad = Command::new(env!("CARGO_BIN_EXE_gelkit")).args(args).env("GELKIT_THREADS", "zero").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn component_dump_is_gzipped_totals() {
    let path = scratch("dump.tsv.gz");
    let text = stdout(&[
        "mc", "--mix", "1:1", "--conversion", "1", "--vertices", "10", "--runs", "3", "--dump-components",
        path.to_str().unwrap(),
    ]);
    assert!(text.contains("# largest_fraction=0.2"));
    let mut raw = String::new();
    GzDecoder::new(std::fs::File::open(&path).unwrap()).read_to_string(&mut raw).unwrap();
    assert_eq!(raw, "2\t15\n");
}

#[test]
fn validate_reports_distances_and_gel_fraction() {
    let text = stdout(&[
        "validate", "--mix", "3:1", "--conversion", "0.75", "--vertices", "20000", "--runs", "4", "--nmax", "20",
    ]);
    let summary: Vec<&str> = text.lines().filter(|l| l.starts_with('#')).collect();
    let get = |k: &str| -> f64 {
        let line = summary.iter().find(|l| l.starts_with(&format!("# {k}="))).unwrap();
        line.split_once('=').unwrap().1.parse().unwrap()
    };
    assert!((get("gel_fraction") - 26.0 / 27.0).abs() < 1e-12);
    assert!((get("largest_fraction") - 26.0 / 27.0).abs() < 0.02);
    assert!(get("tv_distance") < 0.02);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["n", "analytic", "empirical", "stderr", "z"]);
    assert_eq!(rows.len(), 20);

    let zero = stdout(&["validate", "--mix", "3:1", "--conversion", "0", "--vertices", "100", "--runs", "2", "--nmax", "3"]);
    let (_, rows) = csv_rows(&zero);
    assert_eq!(rows[0][1..3], ["1.0", "1.0"]);
}
