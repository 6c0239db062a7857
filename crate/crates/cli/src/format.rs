//! JSON description files for ensembles, measurements and POVMs.
//!
//! Complex entries are `[re, im]` pairs and matrices are arrays of rows.

use std::path::Path;

use ensemble_metrics::channels::{GeneralizedMeasurement, Outcome, Povm};
use ensemble_metrics::ensembles::{make_ensemble, DensityMatrix, Ensemble};
use ensemble_metrics::linalg::ComplexMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EnsembleFile {
    pub version: u32,
    pub dim: usize,
    pub states: Vec<StateEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct StateEntry {
    pub p: f64,
    pub rho: JsonMatrix,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MeasurementFile {
    pub version: u32,
    pub dim: usize,
    pub outcomes: Vec<OutcomeEntry>,
}

/// With `weight`, the Kraus operators are normalized so that
/// Tr Σ M̄†M̄ = dim; without it they are the physical operators.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct OutcomeEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    pub kraus: Vec<JsonMatrix>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct PovmFile {
    pub version: u32,
    pub dim: usize,
    pub elements: Vec<JsonMatrix>,
}

fn parse_err(path: &str, msg: impl Into<String>) -> CliError {
    CliError::Parse { path: path.to_string(), msg: msg.into() }
}

fn read(path: &Path) -> Result<(String, Vec<u8>), CliError> {
    let name = path.display().to_string();
    let bytes = std::fs::read(path).map_err(|e| CliError::Io { path: name.clone(), msg: e.to_string() })?;
    Ok((name, bytes))
}

fn decode<T: for<'de> Deserialize<'de>>(name: &str, bytes: &[u8]) -> Result<T, CliError> {
    serde_json::from_slice(bytes).map_err(|e| parse_err(name, e.to_string()))
}

fn check_header(name: &str, version: u32, dim: usize) -> Result<(), CliError> {
    if version != FORMAT_VERSION {
        return Err(parse_err(name, format!("version: unsupported value {version}, expected {FORMAT_VERSION}")));
    }
    if dim == 0 {
        return Err(parse_err(name, "dim: must be positive"));
    }
    Ok(())
}

/// Converts a nested array into a matrix of the expected shape.
pub fn to_matrix(m: &JsonMatrix, rows: usize, cols: usize) -> Result<ComplexMatrix, String> {
    if m.len() != rows {
        return Err(format!("expected {rows} rows, found {}", m.len()));
    }
    let mut data = Vec::with_capacity(rows * cols);
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(format!("row {i} has {} entries, expected {cols}", row.len()));
        }
        data.extend(row.iter().map(|[re, im]| Complex64::new(*re, *im)));
    }
    ComplexMatrix::from_vec(rows, cols, data).map_err(|e| e.to_string())
}

pub fn from_matrix(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

impl EnsembleFile {
    pub fn to_ensemble(&self, name: &str) -> Result<Ensemble, CliError> {
        check_header(name, self.version, self.dim)?;
        if self.states.is_empty() {
            return Err(parse_err(name, "states: must not be empty"));
        }
        let mut pairs = Vec::with_capacity(self.states.len());
        for (k, s) in self.states.iter().enumerate() {
            let m = to_matrix(&s.rho, self.dim, self.dim).map_err(|e| parse_err(name, format!("states[{k}].rho: {e}")))?;
            let rho = DensityMatrix::new(m).map_err(|e| parse_err(name, format!("states[{k}].rho: {e}")))?;
            pairs.push((s.p, rho));
        }
        make_ensemble(pairs).map_err(|e| parse_err(name, format!("states: {e}")))
    }

    pub fn from_ensemble(e: &Ensemble) -> Self {
        let states = e.iter().map(|(p, rho)| StateEntry { p, rho: from_matrix(rho.mat()) }).collect();
        Self { version: FORMAT_VERSION, dim: e.dim(), states }
    }
}

impl MeasurementFile {
    /// Shape problems are parse errors; a well-formed file that is not a
    /// valid measurement surfaces as the library error.
    pub fn to_measurement(&self, name: &str) -> Result<GeneralizedMeasurement, CliError> {
        check_header(name, self.version, self.dim)?;
        if self.outcomes.is_empty() {
            return Err(parse_err(name, "outcomes: must not be empty"));
        }
        let mut sets = Vec::with_capacity(self.outcomes.len());
        for (i, o) in self.outcomes.iter().enumerate() {
            if o.kraus.is_empty() {
                return Err(parse_err(name, format!("outcomes[{i}].kraus: must not be empty")));
            }
            let mut ops = Vec::with_capacity(o.kraus.len());
            for (j, k) in o.kraus.iter().enumerate() {
                ops.push(to_matrix(k, self.dim, self.dim).map_err(|e| parse_err(name, format!("outcomes[{i}].kraus[{j}]: {e}")))?);
            }
            sets.push((o.weight, ops));
        }
        let result = if sets.iter().all(|(w, _)| w.is_some()) {
            GeneralizedMeasurement::new(sets.into_iter().map(|(w, kraus)| Outcome { weight: w.unwrap_or(0.0), kraus }).collect())
        } else if sets.iter().all(|(w, _)| w.is_none()) {
            GeneralizedMeasurement::from_kraus_sets(sets.into_iter().map(|(_, k)| k).collect())
        } else {
            return Err(parse_err(name, "outcomes: give a weight for every outcome or for none"));
        };
        result.map_err(|e| CliError::from_core(name, e))
    }

    pub fn from_measurement(m: &GeneralizedMeasurement) -> Self {
        let outcomes = m
            .outcomes()
            .iter()
            .map(|o| OutcomeEntry { weight: Some(o.weight), kraus: o.kraus.iter().map(from_matrix).collect() })
            .collect();
        Self { version: FORMAT_VERSION, dim: m.dim(), outcomes }
    }
}

impl PovmFile {
    pub fn to_povm(&self, name: &str) -> Result<Povm, CliError> {
        check_header(name, self.version, self.dim)?;
        if self.elements.is_empty() {
            return Err(parse_err(name, "elements: must not be empty"));
        }
        let mut elements = Vec::with_capacity(self.elements.len());
        for (i, e) in self.elements.iter().enumerate() {
            elements.push(to_matrix(e, self.dim, self.dim).map_err(|e| parse_err(name, format!("elements[{i}]: {e}")))?);
        }
        Povm::new(elements).map_err(|e| CliError::from_core(name, e))
    }

    pub fn from_povm(p: &Povm) -> Self {
        Self { version: FORMAT_VERSION, dim: p.dim(), elements: p.elements().iter().map(from_matrix).collect() }
    }
}

/// A parsed input together with the bytes it came from.
pub struct Loaded<T> {
    pub name: String,
    pub bytes: Vec<u8>,
    pub value: T,
}

pub fn load_ensemble(path: &Path) -> Result<Loaded<Ensemble>, CliError> {
    let (name, bytes) = read(path)?;
    let value = decode::<EnsembleFile>(&name, &bytes)?.to_ensemble(&name)?;
    Ok(Loaded { name, bytes, value })
}

pub fn load_measurement(path: &Path) -> Result<Loaded<GeneralizedMeasurement>, CliError> {
    let (name, bytes) = read(path)?;
    let value = decode::<MeasurementFile>(&name, &bytes)?.to_measurement(&name)?;
    Ok(Loaded { name, bytes, value })
}

pub fn load_povm(path: &Path) -> Result<Loaded<Povm>, CliError> {
    let (name, bytes) = read(path)?;
    let value = decode::<PovmFile>(&name, &bytes)?.to_povm(&name)?;
    Ok(Loaded { name, bytes, value })
}

pub fn parse_ensemble_str(text: &str) -> Result<Ensemble, CliError> {
    decode::<EnsembleFile>("<string>", text.as_bytes())?.to_ensemble("<string>")
}

pub fn parse_measurement_str(text: &str) -> Result<GeneralizedMeasurement, CliError> {
    decode::<MeasurementFile>("<string>", text.as_bytes())?.to_measurement("<string>")
}

pub fn parse_povm_str(text: &str) -> Result<Povm, CliError> {
    decode::<PovmFile>("<string>", text.as_bytes())?.to_povm("<string>")
}

pub fn ensemble_to_string(e: &Ensemble) -> String {
    serde_json::to_string_pretty(&EnsembleFile::from_ensemble(e)).expect("plain data serializes")
}

pub fn measurement_to_string(m: &GeneralizedMeasurement) -> String {
    serde_json::to_string_pretty(&MeasurementFile::from_measurement(m)).expect("plain data serializes")
}

pub fn povm_to_string(p: &Povm) -> String {
    serde_json::to_string_pretty(&PovmFile::from_povm(p)).expect("plain data serializes")
}
