//! Batch front end for the ensemble measures: parses description files,
//! runs one measure and renders a JSON report.

pub mod format;
pub mod report;
pub mod selftest;

use std::path::Path;

use ensemble_metrics::channels::{dist_max, fid_min, jamiolkowski_ensemble, povm_to_ensemble, WorstCaseOptions};
use ensemble_metrics::ehs::{ehs_distance, ehs_fidelity, DistanceAlgorithm, SolverOptions};
use ensemble_metrics::ensembles::Ensemble;
use ensemble_metrics::kantorovich::{kantorovich_distance, kantorovich_fidelity};
use ensemble_metrics::Error;
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use report::{InputDigest, Report, SolverInfo};

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "ENSEMBLE_METRICS_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DIM: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_INVALID_MEASUREMENT: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("{path}: {source}")]
    InvalidMeasurement { path: String, source: Error },
    #[error("dimension mismatch: {left} has dimension {left_dim}, {right} has dimension {right_dim}")]
    DimMismatch { left: String, right: String, left_dim: usize, right_dim: usize },
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    /// Classifies a library error raised while building an input object.
    pub fn from_core(path: &str, e: Error) -> Self {
        match e {
            Error::InvalidMeasurement { .. } | Error::InvalidPovm { .. } => {
                CliError::InvalidMeasurement { path: path.to_string(), source: e }
            }
            other => CliError::Parse { path: path.to_string(), msg: other.to_string() },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => EXIT_PARSE,
            CliError::InvalidMeasurement { .. } => EXIT_INVALID_MEASUREMENT,
            CliError::DimMismatch { .. } | CliError::Core(Error::DimMismatch { .. }) => EXIT_DIM,
            CliError::Core(_) => EXIT_FAILURE,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Kantorovich,
    Ehs,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Kantorovich => "kantorovich",
            Method::Ehs => "ehs",
        }
    }

    fn library(self) -> ensemble_metrics::channels::Method {
        match self {
            Method::Kantorovich => ensemble_metrics::channels::Method::Kantorovich,
            Method::Ehs => ensemble_metrics::channels::Method::Ehs,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    Distance,
    Fidelity,
}

impl Measure {
    pub fn name(self) -> &'static str {
        match self {
            Measure::Distance => "distance",
            Measure::Fidelity => "fidelity",
        }
    }
}

/// Solver settings shared by every command.
#[derive(Clone, Debug)]
pub struct Settings {
    pub method: Method,
    pub tol: f64,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    pub algorithm: DistanceAlgorithm,
}

impl Default for Settings {
    fn default() -> Self {
        let o = SolverOptions::default();
        Self { method: Method::Ehs, tol: o.tol, seed: o.seed, restarts: o.restarts, max_iter: o.max_iter, algorithm: o.algorithm }
    }
}

impl Settings {
    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            restarts: self.restarts,
            seed: self.seed,
            algorithm: self.algorithm,
            ..SolverOptions::default()
        }
    }
}

/// Seed from the environment, or 0 when unset. Unparseable values are an error.
pub fn default_seed() -> Result<u64, CliError> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Parse { path: SEED_ENV.into(), msg: format!("not an unsigned integer: {v:?}") }),
        Err(_) => Ok(0),
    }
}

fn digest(name: &str, bytes: &[u8]) -> InputDigest {
    InputDigest { path: name.to_string(), sha256: format!("{:x}", Sha256::digest(bytes)) }
}

fn algorithm_name(a: DistanceAlgorithm) -> &'static str {
    match a {
        DistanceAlgorithm::CuttingPlane => "cutting-plane",
        DistanceAlgorithm::ProjectedSubgradient => "projected-subgradient",
    }
}

fn check_dims(left: &str, a: usize, right: &str, b: usize) -> Result<(), CliError> {
    if a != b {
        return Err(CliError::DimMismatch { left: left.into(), right: right.into(), left_dim: a, right_dim: b });
    }
    Ok(())
}

/// Runs one measure between two ensembles and fills in everything but the
/// command name and inputs.
pub fn measure_ensembles(a: &Ensemble, b: &Ensemble, measure: Measure, s: &Settings) -> Result<Report, CliError> {
    let mut r = Report::new(measure, s.method);
    match s.method {
        Method::Kantorovich => {
            let k = match measure {
                Measure::Distance => kantorovich_distance(a, b)?,
                Measure::Fidelity => kantorovich_fidelity(a, b)?,
            };
            r.value = k.value;
            r.solver = SolverInfo { algorithm: "transportation-simplex".into(), iterations: k.iterations, converged: true, ..SolverInfo::default() };
        }
        Method::Ehs => {
            let opts = s.solver_options();
            let (rep, algorithm) = match measure {
                Measure::Distance => (ehs_distance(a, b, &opts)?, algorithm_name(s.algorithm)),
                Measure::Fidelity => (ehs_fidelity(a, b, &opts)?, "block-coordinate-ascent"),
            };
            r.value = rep.value;
            r.bracket = Some([rep.bracket.0, rep.bracket.1]);
            r.solver = SolverInfo {
                algorithm: algorithm.into(),
                iterations: rep.iterations,
                converged: rep.converged,
                certified_lower: rep.certified_lower,
                seed: Some(s.seed),
                restarts: Some(s.restarts),
                tol: Some(s.tol),
                ..SolverInfo::default()
            };
        }
    }
    Ok(r)
}

pub fn cmd_ensembles(command: &'static str, left: &Path, right: &Path, measure: Measure, s: &Settings) -> Result<Report, CliError> {
    let a = format::load_ensemble(left)?;
    let b = format::load_ensemble(right)?;
    check_dims(&a.name, a.value.dim(), &b.name, b.value.dim())?;
    let mut r = measure_ensembles(&a.value, &b.value, measure, s)?;
    r.command = command;
    r.inputs = vec![digest(&a.name, &a.bytes), digest(&b.name, &b.bytes)];
    Ok(r.rounded())
}

pub fn cmd_dist(left: &Path, right: &Path, s: &Settings) -> Result<Report, CliError> {
    cmd_ensembles("dist", left, right, Measure::Distance, s)
}

pub fn cmd_fid(left: &Path, right: &Path, s: &Settings) -> Result<Report, CliError> {
    cmd_ensembles("fid", left, right, Measure::Fidelity, s)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Compare {
    Iso,
    Worst,
}

/// Options for the worst-case search.
#[derive(Clone, Debug)]
pub struct WorstSettings {
    pub starts: usize,
    pub max_steps: usize,
    pub ancilla_dim: Option<usize>,
}

impl Default for WorstSettings {
    fn default() -> Self {
        let o = WorstCaseOptions::default();
        Self { starts: o.restarts, max_steps: o.max_steps, ancilla_dim: o.ancilla_dim }
    }
}

pub fn cmd_channel(left: &Path, right: &Path, compare: Compare, measure: Measure, s: &Settings, w: &WorstSettings) -> Result<Report, CliError> {
    let m = format::load_measurement(left)?;
    let n = format::load_measurement(right)?;
    check_dims(&m.name, m.value.dim(), &n.name, n.value.dim())?;
    let mut r = match compare {
        Compare::Iso => {
            let a = jamiolkowski_ensemble(&m.value)?.ensemble;
            let b = jamiolkowski_ensemble(&n.value)?.ensemble;
            let mut r = measure_ensembles(&a, &b, measure, s)?;
            r.compare = Some("iso");
            r
        }
        Compare::Worst => {
            let opts = WorstCaseOptions {
                solver: s.solver_options(),
                ancilla_dim: w.ancilla_dim,
                restarts: w.starts,
                max_steps: w.max_steps,
                seed: s.seed,
            };
            let wc = match measure {
                Measure::Distance => dist_max(&m.value, &n.value, s.method.library(), &opts)?,
                Measure::Fidelity => fid_min(&m.value, &n.value, s.method.library(), &opts)?,
            };
            let mut r = Report::new(measure, s.method);
            r.value = wc.value;
            r.compare = Some("worst");
            r.solver = SolverInfo {
                algorithm: "projected-gradient-ascent".into(),
                iterations: wc.steps,
                converged: wc.converged,
                seed: Some(s.seed),
                restarts: Some(w.starts),
                tol: Some(s.tol),
                ancilla_dim: Some(w.ancilla_dim.unwrap_or(m.value.dim())),
                ..SolverInfo::default()
            };
            r
        }
    };
    r.command = "channel";
    r.inputs = vec![digest(&m.name, &m.bytes), digest(&n.name, &n.bytes)];
    Ok(r.rounded())
}

pub fn cmd_povm(left: &Path, right: &Path, measure: Measure, s: &Settings) -> Result<Report, CliError> {
    let p = format::load_povm(left)?;
    let q = format::load_povm(right)?;
    check_dims(&p.name, p.value.dim(), &q.name, q.value.dim())?;
    let a = povm_to_ensemble(&p.value)?;
    let b = povm_to_ensemble(&q.value)?;
    let mut r = measure_ensembles(&a, &b, measure, s)?;
    r.command = "povm";
    r.inputs = vec![digest(&p.name, &p.bytes), digest(&q.name, &q.bytes)];
    Ok(r.rounded())
}
