//! Golden cases shared by the golden tests and the acceptance run.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub struct Case {
    pub name: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

pub const CASES: &[Case] = &[
    Case { name: "spectrum_z2", args: &["spectrum", "--map", "z2.json", "--n", "1"], exit: 0 },
    Case { name: "spectrum_z2_sigma", args: &["spectrum", "--map", "z2.json", "--n", "1", "--sigma"], exit: 0 },
    Case { name: "tau_z2", args: &["tau", "--map", "z2.json", "--from", "1", "--to", "1"], exit: 2 },
    Case { name: "tau_basilica", args: &["tau", "--map", "basilica.json", "--from", "2", "--to", "2"], exit: 2 },
    Case { name: "tau_rational", args: &["tau", "--map", "rational.json", "--from", "1", "--to", "3"], exit: 0 },
    Case {
        name: "compare_self",
        args: &["compare", "--map-a", "rational.json", "--map-b", "rational.json", "--from", "1", "--to", "2"],
        exit: 0,
    },
    Case {
        name: "compare_distinct",
        args: &["compare", "--map-a", "rational.json", "--map-b", "rational2.json", "--from", "1", "--to", "2"],
        exit: 0,
    },
    Case { name: "lattes_family", args: &["lattes", "--family", "5", "--seed", "7", "--nmax", "2"], exit: 0 },
    Case {
        name: "probe_small",
        args: &[
            "probe",
            "--degree",
            "2",
            "--from",
            "1",
            "--to",
            "2",
            "--trials",
            "6",
            "--seed",
            "3",
            "--planted-duplicates",
            "1",
            "--planted-conjugates",
            "1",
        ],
        exit: 0,
    },
    Case { name: "shape_error", args: &["spectrum", "--map", "short.json", "--n", "1"], exit: 2 },
    Case { name: "degenerate", args: &["spectrum", "--map", "degenerate.json", "--n", "1"], exit: 2 },
    Case { name: "malformed", args: &["spectrum", "--map", "malformed.json", "--n", "1"], exit: 2 },
    Case { name: "missing_file", args: &["spectrum", "--map", "absent.json", "--n", "1"], exit: 2 },
    Case { name: "usage_error", args: &["spectrum", "--n", "1"], exit: 2 },
    Case {
        name: "numerical_failure",
        args: &["spectrum", "--map", "rational.json", "--n", "2", "--proj-tol", "1e-300", "--match-factor", "1e-300"],
        exit: 3,
    },
];

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(format!("{name}.json"))
}

/// Runs the binary inside the fixture directory with a clean precision
/// environment; returns `(exit status, stdout)`.
pub fn run(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_multspec"))
        .args(args)
        .current_dir(fixtures())
        .env_remove("MULTSPEC_PRECISION")
        .output()
        .expect("spawn multspec");
    (out.status.code().unwrap_or(-1), out.stdout)
}

/// Compares a case against its golden file, or rewrites the file when
/// `MULTSPEC_BLESS` is set. Returns a description of the mismatch.
pub fn check_case(case: &Case) -> Result<(), String> {
    let (code, stdout) = run(case.args);
    if code != case.exit {
        return Err(format!("{}: exit {code}, expected {}", case.name, case.exit));
    }
    let path = golden_path(case.name);
    if std::env::var_os("MULTSPEC_BLESS").is_some() {
        std::fs::write(&path, &stdout).map_err(|e| e.to_string())?;
        return Ok(());
    }
    let want = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    if want != stdout {
        return Err(format!("{}: output differs from {}", case.name, path.display()));
    }
    Ok(())
}
