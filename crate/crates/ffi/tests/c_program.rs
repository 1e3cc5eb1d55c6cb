use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "mincast.h"

int main(void) {
    McNetwork *net = NULL;
    if (mc_network_butterfly(&net) != MC_STATUS_OK) return 1;
    const char *sinks[] = {"t1", "t2"};
    McSolution *sol = NULL;
    if (mc_solve(net, "s", sinks, 2, 1.0, MC_METHOD_LP, &sol) != MC_STATUS_OK) return 2;
    double cost = mc_solution_cost(sol);
    const char *bad[] = {"nowhere"};
    McSolution *none = NULL;
    if (mc_solve(net, "s", bad, 1, 1.0, MC_METHOD_LP, &none) != MC_STATUS_UNKNOWN_NODE) return 3;
    char msg[64];
    if (mc_last_error(msg, sizeof msg) == 0) return 4;
    printf("%.6f\n", cost);
    mc_solution_free(sol);
    mc_network_free(net);
    return fabs(cost - 9.5) < 1e-8 ? 0 : 5;
}
"#;

fn artifact_dir() -> PathBuf {
    // target/<profile>/deps/<test> -> target/<profile>
    std::env::current_exe().unwrap().parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_the_static_library() {
    let dir = artifact_dir();
    let Some(lib) = [dir.join("libmincast_ffi.a"), dir.join("deps/libmincast_ffi.a")].into_iter().find(|p| p.exists())
    else {
        eprintln!("skipping: no static library under {}", dir.display());
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = dir.path().join("main");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status.code());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "9.500000");
}
