use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chunglu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chunglu")).args(args).output().unwrap()
}

fn write_dist(path: &Path, counts: &[u64]) {
    let mut s = String::from("degree,count\n");
    for (i, c) in counts.iter().enumerate() {
        s += &format!("{},{}\n", i + 1, c);
    }
    fs::write(path, s).unwrap();
}

#[test]
fn generate_writes_edge_lists_and_mean_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("d.csv");
    write_dist(&dist, &[60, 20, 10, 5]);
    let out = dir.path().join("g.txt");
    let o = chunglu(&["generate", "--dist", dist.to_str().unwrap(), "--sampler", "bernoulli", "--seed", "5", "--trials", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for t in 0..2 {
        let edges = fs::read_to_string(dir.path().join(format!("g.txt.{t}"))).unwrap();
        for line in edges.lines() {
            let (i, j) = line.split_once(' ').unwrap();
            assert!(i.parse::<usize>().unwrap() < j.parse::<usize>().unwrap());
        }
    }
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.starts_with("degree,count\n"));
    assert_eq!(stdout.lines().count(), 5);

    let again = chunglu(&["generate", "--dist", dist.to_str().unwrap(), "--sampler", "bernoulli", "--seed", "5", "--trials", "2"]);
    assert_eq!(again.stdout, stdout.as_bytes());
}

#[test]
fn predict_emits_model_output() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("d.csv");
    write_dist(&dist, &[1, 0]);
    let out = dir.path().join("p.csv");
    let o = chunglu(&["predict", "--dist", dist.to_str().unwrap(), "--m", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(out).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "degree,predicted_count");
    let v: f64 = rows[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - (-1f64).exp()).abs() < 1e-15);
}

#[test]
fn shift_exit_status_reflects_feasibility() {
    let dir = tempfile::tempdir().unwrap();
    let feasible = dir.path().join("f.csv");
    // P * (1000, 0) rounded well inside the image: a single class is always feasible.
    write_dist(&feasible, &[368]);
    let o = chunglu(&["shift", "--dist", feasible.to_str().unwrap(), "--digits", "60"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("degree,x_real,x_rounded\n1,"));
    assert!(text.trim_end().ends_with(",1000"));

    let raw = dir.path().join("r.csv");
    write_dist(&raw, &[500, 125, 56, 31]);
    let o = chunglu(&["shift", "--dist", raw.to_str().unwrap(), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["feasible"], false);
    assert!(!json["negative_classes"].as_array().unwrap().is_empty());
    assert!(json["rounding_residual"].is_string());
}

#[test]
fn check_reports_json() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("d.csv");
    write_dist(&dist, &[500, 125, 56, 31]);
    let o = chunglu(&["check", "--dist", dist.to_str().unwrap(), "--digits", "100", "--json"]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["m"], 4);
    assert_eq!(json["direct_feasible"], false);
    assert_eq!(json["bounds"].as_array().unwrap().len(), 4);
}

#[test]
fn project_writes_pairwise_cells() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("proj.csv");
    let o = chunglu(&["project", "--m", "3", "--count", "500", "--box", "100", "--seed", "1", "--bins", "5", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(out).unwrap();
    assert!(text.starts_with("pair,xi,xj,weight\n"));
    let total: u64 = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(total, 500 * 3);
}

#[test]
fn experiment_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = chunglu(&["experiment", "deficit", "--seed", "2", "--trials", "2", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["deficit.csv", "deficit.svg", "config.json"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn bad_input_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let dist = dir.path().join("d.csv");
    fs::write(&dist, "degree,count\n2,5\n").unwrap();
    let o = chunglu(&["predict", "--dist", dist.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = chunglu(&["experiment", "nope"]);
    assert!(!o.status.success());
}
