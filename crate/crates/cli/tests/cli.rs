use std::process::Command;
use tempfile::tempdir;

fn weyl(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_weyl")).args(args).env("WEYL_THREADS", "1").output().expect("spawn weyl")
}

fn stdout(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_names_every_suite() {
    let o = weyl(&["verify", "list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["hs-identity", "projector", "thm-corthm12-trend", "modulation", "compare-thresholds"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn config_run_emits_tables_and_plot() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"suite":"hs-identity","grid":{"n":1,"L":8.0,"N":64},"seed":4,"cases":3}"#).unwrap();
    let out = dir.path().join("out");
    let o = weyl(&["verify", "hs-identity", "--config", cfg.to_str().unwrap(), "--emit-csv", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["cases"].as_array().unwrap().len(), 3);
    assert_eq!(report["config"]["seed"], 4);
    let cases = std::fs::read_to_string(out.join("hs-identity-cases.csv")).unwrap();
    assert_eq!(cases.lines().count(), 4);
    assert!(out.join("hs-identity-verdicts.csv").exists());
    assert!(std::fs::read_to_string(out.join("hs-identity-ratios.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn same_seed_gives_identical_reports() {
    let dir = tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for path in [&a, &b] {
        let o = weyl(&["verify", "schatten-monotone", "--cases", "3", "--seed", "9", "--out", path.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempdir().unwrap();
    let cfg = dir.path().join("strict.json");
    std::fs::write(
        &cfg,
        r#"{"suite":"hs-identity","grid":{"n":1,"L":8.0,"N":64},"cases":2,"tolerances":{"gap":1e-30}}"#,
    )
    .unwrap();
    assert_eq!(weyl(&["verify", "hs-identity", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(weyl(&["verify", "projector", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(weyl(&["verify", "no-such-suite"]).status.code(), Some(2));
    let o = weyl(&["verify", "hs-identity", "--grid", "1,8,512"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("resource limit"));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"suite":"hs-identity","grid":{"n":1,"L":8.0,"N":64},"colour":2}"#).unwrap();
    assert_eq!(weyl(&["verify", "hs-identity", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn thresholds_report_both_conditions() {
    let o = weyl(&["thresholds", "--spec=-1.35,-1.35,0.5,0.5,0.7,0.7", "--p", "1"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["first_holds"], true);
    assert_eq!(v["second_holds"], false);
    assert_eq!(weyl(&["thresholds", "--spec=-3,-3,1,1,1,1", "--p", "3"]).status.code(), Some(2));
}

#[test]
fn kappa_values() {
    let o = weyl(&["kappa", "--p", "1", "--n", "1"]);
    assert_eq!(stdout(&o).trim(), "kappa=3 kappa'=2 n_p=1");
}

#[test]
fn stored_symbol_round_trips_to_schatten_norms() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("a.wfld");
    let o = weyl(&[
        "symbol", "--spec=-2,-2,1,1,0,0", "--kind", "truncated", "--grid", "1,4,64", "--out", path.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = weyl(&["schatten", path.to_str().unwrap(), "--p", "1,inf"]);
    assert!(o.status.success());
    let vals: Vec<f64> = stdout(&o).lines().map(|l| l.split(" = ").nth(1).unwrap().parse().unwrap()).collect();
    assert_eq!(vals.len(), 2);
    assert!(vals[0] >= vals[1] && vals[1] > 0.0);
}
