//! Compiles and runs a C program against the generated header and the static
//! library. Skipped when no C compiler is on the path.

use std::path::{Path, PathBuf};
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "ndtrace.h"

int main(void) {
    NdtCoefficients *cs = NULL;
    if (ndt_coefficients_sech2(2, -2.0, &cs) != NDT_STATUS_OK) return 1;
    NdtComplex z = {-4.0, 0.0};
    NdtComplex d;
    if (ndt_normalized_wronskian(cs, z, 0.0, &d) != NDT_STATUS_OK) return 2;
    if (fabs(d.re - 1.0 / 3.0) > 1e-8 || fabs(d.im) > 1e-8) return 3;
    NdtComplex bad = {1.0, 0.0};
    if (ndt_normalized_wronskian(cs, bad, 0.0, &d) != NDT_STATUS_SPECTRAL_POINT) return 4;
    if (ndt_last_error_message() == NULL) return 5;
    ndt_coefficients_free(cs);
    printf("ok\n");
    return 0;
}
"#;

fn profile_dir() -> PathBuf {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

fn compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|c| Command::new(c).arg("--version").output().is_ok())
}

#[test]
fn c_program_links_and_runs() {
    let Some(cc) = compiler() else {
        eprintln!("no C compiler, skipping");
        return;
    };
    let lib = profile_dir().join("libndtrace_ffi.a");
    if !lib.exists() {
        eprintln!("{} not built, skipping", lib.display());
        return;
    }
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let tmp = tempfile::tempdir().unwrap();
    let src = tmp.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let exe = tmp.path().join("main");
    let status = Command::new(cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C build failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "C program exited with {:?}", out.status);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
