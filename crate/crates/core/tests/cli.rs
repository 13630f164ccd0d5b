use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wgslab(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wgslab"));
    cmd.args(args).env_remove("WGSLAB_WORKERS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim().to_string()
}

fn only_file(dir: &Path, ext: &str) -> String {
    let mut hits: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == ext))
        .collect();
    assert_eq!(hits.len(), 1, "expected one .{ext} in {}", dir.display());
    fs::read_to_string(hits.pop().unwrap()).unwrap()
}

#[test]
fn curve_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wgslab(&["ggm-curve", "--n", "4", "--alpha", "1,2", "--t", "0:pi:1", "--outdir", out], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let csv = only_file(dir.path(), "csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,ggm_alpha1,ggm_alpha2"));
    assert_eq!(lines.next(), Some("0.0,0.0,0.0"));
    assert_eq!(lines.count(), 3);

    let json: serde_json::Value = serde_json::from_str(&only_file(dir.path(), "json")).unwrap();
    assert_eq!(json["subcommand"], "ggm-curve");
    assert_eq!(json["rows"], 4);
    assert_eq!(json["config"]["ggm-curve"]["lattice"]["n"], 4);
    assert!(json["wall_time_s"].as_f64().unwrap() >= 0.0);
    assert!(json["version"].is_string());
}

#[test]
fn seeded_runs_are_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = wgslab(
            &["oracle", "--trials", "12", "--n-max", "8", "--seed", "7", "--outdir", d.path().to_str().unwrap()],
            &[],
        );
        assert!(o.status.success());
    }
    assert_eq!(only_file(a.path(), "csv"), only_file(b.path(), "csv"));
}

#[test]
fn exit_codes() {
    let o = wgslab(&["measure", "--n", "25", "--alpha", "1", "--t", "1", "--sites", "0", "--no-write"], &[]);
    assert_eq!(o.status.code(), Some(2));

    let o = wgslab(&["detect", "--n", "50", "--z", "1", "--alpha", "0.1:2:0.1", "--no-write"], &[]);
    assert_eq!(o.status.code(), Some(3));

    let o = wgslab(&["avg", "--lattice", "2d", "--l", "4", "--theta", "80", "--alpha", "1", "--no-write"], &[]);
    assert_eq!(o.status.code(), Some(1));

    let o = wgslab(&["zc", "--alpha", "1", "--no-write"], &[]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# critical range\nsubcommand = zc\nn = 120\nalpha = 1.82\neps = 1e-3\nno_write = true\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = wgslab(&["--config", cfg], &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "z_c=7 (eps=0.001)");

    // Command-line flags win over the file.
    let o = wgslab(&["zc", "--config", cfg, "--eps", "1e-4"], &[]);
    assert_eq!(stdout(&o), "z_c=18 (eps=0.0001)");
}

#[test]
fn worker_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = wgslab(&["avg", "--n", "10", "--alpha", "1", "--z", "1", "--outdir", out], &[("WGSLAB_WORKERS", "3")]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_str(&only_file(dir.path(), "json")).unwrap();
    assert_eq!(json["config"]["workers_resolved"], 3);

    let o = wgslab(&["avg", "--n", "10", "--alpha", "1", "--no-write"], &[("WGSLAB_WORKERS", "zero")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn measurement_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("post.wgsv");
    let o = wgslab(
        &[
            "measure", "--n", "5", "--alpha", "1", "--t", "1.3", "--sites", "1,3,4", "--outcomes", "1,0,1",
            "--dump", dump.to_str().unwrap(), "--no-write",
        ],
        &[],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let state = wgslab::exact::StateVector::read_wgsv(fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(state.n_qubits(), 2);
    assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
}
