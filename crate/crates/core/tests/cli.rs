use std::path::Path;
use std::process::Command;

fn mincast(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mincast"))
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn solve_prints_the_coded_optimum() {
    let out = mincast(&["solve", "fixtures/butterfly.json", "--source", "s", "--sinks", "t1,t2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["cost"].as_f64().unwrap() - 9.5).abs() < 1e-8);
}

#[test]
fn errors_are_json_on_stderr_with_nonzero_exit() {
    let out = mincast(&["solve", "fixtures/butterfly.json", "--source", "s", "--sinks", "nowhere"]);
    assert!(!out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "unknown_node");
}

#[test]
fn bench_writes_csvs_and_compare_reads_them() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let out = mincast(&["bench", "--config", "configs/butterfly.toml", "--out", out_dir, "--iters", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("7,lp,9.5"));

    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    std::fs::write(&a, "instance,cost\nfixture,10\n").unwrap();
    std::fs::write(&b, "instance,cost\nfixture,9.5\n").unwrap();
    let out = mincast(&["compare", a.to_str().unwrap(), b.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["mean"].as_f64().unwrap() - 0.05).abs() < 1e-12);
}

#[test]
fn dynamic_refuses_a_static_config() {
    let out = mincast(&["dynamic", "--config", "configs/butterfly.toml"]);
    assert!(!out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(v["error"], "config");
    assert!(Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/dynamic.toml").exists());
}
