use std::path::Path;

use mincast::harness::{compare, run, CompareOptions, ExperimentConfig, Scenario};
use mincast::netmodel::io::Table;

fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::from_toml(text).unwrap();
    cfg.output = out.to_path_buf();
    cfg
}

#[test]
fn butterfly_fixture_reports_both_optima() {
    let dir = tempfile::tempdir().unwrap();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/butterfly.toml");
    let mut cfg = ExperimentConfig::load(&path).unwrap();
    cfg.output = dir.path().to_path_buf();
    let s = run(&cfg).unwrap();
    assert!((s.mean(7, "lp").unwrap() - 9.5).abs() < 1e-8);
    assert_eq!(s.mean(7, "dst").unwrap(), 10.0);
    assert!(dir.path().join("results.csv").exists());
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn reruns_are_byte_identical() {
    let text = r#"
        scenario = "static_wireless"
        seed = 9
        replications = 3
        [instance]
        nodes = [12]
        sinks = 3
        [solver]
        iterations = 20
    "#;
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let mut ca = config(text, a.path());
    ca.workers = Some(1);
    let mut cb = config(text, b.path());
    cb.workers = Some(4);
    let ra = run(&ca).unwrap();
    run(&cb).unwrap();
    for f in ["results.csv", "summary.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    assert!(ra.artifacts.iter().any(|p| p.starts_with(a.path().join("traces"))));
}

fn per_method(t: &Table, method: &str) -> Table {
    let mut out = Table::new(&["instance", "cost"]);
    let (ids, methods, values) = (t.column("instance").unwrap(), t.column("method").unwrap(), t.column("value").unwrap());
    for ((id, m), v) in ids.iter().zip(methods).zip(values) {
        if m == method {
            out.push(vec![(*id).into(), v.parse::<f64>().unwrap().into()]);
        }
    }
    out
}

#[test]
fn wireless_lp_never_exceeds_the_heuristic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        r#"
        scenario = "static_wireless"
        seed = 5
        replications = 6
        [instance]
        nodes = [15]
        [solver]
        iterations = 0
        "#,
        dir.path(),
    );
    let s = run(&cfg).unwrap();
    assert_eq!(s.scenario, Scenario::StaticWireless);
    let (mip, lp) = (per_method(&s.results, "mip"), per_method(&s.results, "lp"));
    let c = compare(&mip, &lp, &CompareOptions::default()).unwrap();
    assert_eq!(c.rows.len(), 6);
    assert!(c.rows.iter().all(|r| r.b <= r.a * (1.0 + 1e-9)));
    assert!(c.mean >= 0.0);
}

#[test]
fn every_scenario_runs_on_a_small_instance() {
    for (scenario, extra) in [
        ("static_wireline", "[solver]\niterations = 10"),
        ("convex_pd", "[solver.pd]\niterations = 2000"),
        ("unicast_bench", "[solver]\npackets = 100"),
        ("dynamic", "[dynamic]\nhorizon = 50"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let text = format!("scenario = \"{scenario}\"\nreplications = 2\n[instance]\nnodes = [6]\nsinks = 2\n{extra}");
        let s = run(&config(&text, dir.path())).unwrap_or_else(|e| panic!("{scenario}: {e}"));
        assert!(!s.summary.is_empty(), "{scenario}");
    }
}

#[test]
fn unknown_fixture_sinks_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/butterfly.toml");
    let mut cfg = ExperimentConfig::load(&path).unwrap();
    cfg.output = dir.path().to_path_buf();
    cfg.instance.sink_names = vec!["nowhere".into()];
    assert!(run(&cfg).is_err());
}

#[test]
fn dynamic_summary_keeps_the_monte_carlo_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        "scenario = \"dynamic\"\nreplications = 50\n[instance]\nnodes = [6]\nsinks = 2\n[dynamic]\nhorizon = 2000",
        dir.path(),
    );
    let s = run(&cfg).unwrap();
    let row = s.summary.rows.iter().find(|r| r[1] == "fixed_broadcast").unwrap();
    assert!(row[3].parse::<f64>().unwrap() > 0.0);
}
