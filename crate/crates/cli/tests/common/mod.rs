#![allow(dead_code)]
//! Helpers for running the binary against the fixtures in `tests/data`.

use std::path::Path;
use std::process::Command;

const BIN: &str = env!("CARGO_BIN_EXE_ensemble-metrics");

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

pub fn run(args: &[&str]) -> Run {
    run_with_env(args, None)
}

pub fn run_with_env(args: &[&str], seed_env: Option<&str>) -> Run {
    let mut cmd = Command::new(BIN);
    cmd.args(args).current_dir(env!("CARGO_MANIFEST_DIR")).env_remove("ENSEMBLE_METRICS_SEED");
    if let Some(s) = seed_env {
        cmd.env("ENSEMBLE_METRICS_SEED", s);
    }
    let out = cmd.output().expect("binary runs");
    Run {
        code: out.status.code().unwrap_or(-1),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

pub fn value(r: &Run) -> f64 {
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("bad report ({e}): {}", r.stdout));
    v["value"].as_f64().unwrap()
}

const D: &str = "tests/data/";

pub fn data(name: &str) -> String {
    format!("{D}{name}")
}

// (golden name, arguments, expected exit code)
pub fn cases() -> Vec<(&'static str, Vec<String>, i32)> {
    let c = |name: &'static str, args: &[&str], code: i32| {
        let args = args.iter().map(|a| if a.ends_with(".json") { data(a) } else { a.to_string() }).collect();
        (name, args, code)
    };
    vec![
        c("dist_orthogonal", &["dist", "ket0.json", "ket1.json"], 0),
        c("dist_same", &["dist", "mixed_qubits.json", "mixed_qubits.json"], 0),
        c("dist_bell_product_kantorovich", &["dist", "bell.json", "product.json", "--method", "kantorovich"], 0),
        c("dist_bell_product_ehs", &["dist", "bell.json", "product.json"], 0),
        c("dist_classical_kantorovich", &["dist", "classical_p.json", "classical_q.json", "--method", "kantorovich"], 0),
        c("dist_subgradient", &["dist", "mixed_qubits.json", "ket0.json", "--algorithm", "subgradient", "--seed", "3"], 0),
        c("fid_same", &["fid", "mixed_qubits.json", "mixed_qubits.json"], 0),
        c("fid_orthogonal", &["fid", "ket0.json", "ket1.json"], 0),
        c("fid_classical_ehs", &["fid", "classical_p.json", "classical_q.json"], 0),
        c("fid_bell_product_kantorovich", &["fid", "bell.json", "product.json", "--method", "kantorovich"], 0),
        c("channel_identical_dist", &["channel", "measure_z.json", "measure_z.json"], 0),
        c("channel_identical_fid", &["channel", "measure_z.json", "measure_z.json", "--measure", "fid"], 0),
        c("channel_z_x_kantorovich", &["channel", "measure_z.json", "measure_x.json", "--method", "kantorovich"], 0),
        c("channel_z_x_ehs", &["channel", "measure_z.json", "measure_x.json"], 0),
        c(
            "channel_worst_depolarize",
            &["channel", "identity.json", "depolarize.json", "--compare", "worst", "--method", "kantorovich", "--starts", "4"],
            0,
        ),
        c("channel_incomplete", &["channel", "measure_z.json", "measure_incomplete.json"], 5),
        c("povm_identical", &["povm", "povm_z.json", "povm_z.json"], 0),
        c("povm_z_x_kantorovich", &["povm", "povm_z.json", "povm_x.json", "--method", "kantorovich"], 0),
        c("povm_z_x_fid", &["povm", "povm_z.json", "povm_x.json", "--measure", "fid"], 0),
        c("povm_not_resolving", &["povm", "povm_z.json", "povm_bad.json"], 5),
        c("dist_dim_mismatch", &["dist", "bell.json", "ket1.json"], 3),
        c("dist_bad_shape", &["dist", "malformed.json", "ket1.json"], 2),
        c("dist_bad_syntax", &["dist", "broken_syntax.json", "ket1.json"], 2),
        c("dist_missing_file", &["dist", "absent.json", "ket1.json"], 2),
        c(
            "dist_not_converged",
            &["dist", "mixed_qubits.json", "ket0.json", "--algorithm", "subgradient", "--max-iter", "3", "--tol", "1e-12"],
            4,
        ),
    ]
}

pub fn transcript(r: &Run) -> String {
    format!("exit: {}\n--- stdout\n{}--- stderr\n{}", r.code, r.stdout, r.stderr)
}


/// Runs every golden case and returns a description of each mismatch. With
/// `update` set the transcripts are rewritten instead.
pub fn golden_mismatches(update: bool) -> Vec<String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut mismatches = Vec::new();
    for (name, args, code) in cases() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let r = run(&args);
        if r.code != code {
            mismatches.push(format!("{name}: exit code {} (want {code}), stderr: {}", r.code, r.stderr));
            continue;
        }
        let path = dir.join(format!("{name}.txt"));
        let text = transcript(&r);
        if update {
            std::fs::write(&path, &text).unwrap();
        } else {
            match std::fs::read_to_string(&path) {
                Ok(want) if want == text => {}
                Ok(want) => mismatches.push(format!("{name}:\n--- want\n{want}\n--- got\n{text}")),
                Err(_) => mismatches.push(format!("{name}: missing golden file {}", path.display())),
            }
        }
    }
    mismatches
}
