use serde::Serialize;

use crate::{Measure, Method};

/// Significant digits kept in printed values.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Solver diagnostics, kept apart from the numerical result.
#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct SolverInfo {
    pub algorithm: String,
    pub iterations: usize,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ancilla_dim: Option<usize>,
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub measure: &'static str,
    pub method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub compare: Option<&'static str>,
    pub value: f64,
    /// Lower and upper bounds that bracket the EHS value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
    pub solver: SolverInfo,
    pub inputs: Vec<InputDigest>,
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits; −0 becomes 0.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

impl Report {
    pub fn new(measure: Measure, method: Method) -> Self {
        Self {
            command: "",
            measure: measure.name(),
            method: method.name(),
            compare: None,
            value: f64::NAN,
            bracket: None,
            solver: SolverInfo::default(),
            inputs: Vec::new(),
        }
    }

    pub fn rounded(mut self) -> Self {
        self.value = round_sig(self.value);
        self.bracket = self.bracket.map(|[a, b]| [round_sig(a), round_sig(b)]);
        self.solver.certified_lower = self.solver.certified_lower.map(round_sig);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(std::f64::consts::FRAC_1_SQRT_2), 0.707106781187);
        assert_eq!(round_sig(-0.0), 0.0);
        assert_eq!(round_sig(1.0), 1.0);
        assert_eq!(round_sig(123456.7890123456), 123456.789012);
        assert_eq!(round_sig(-1e-13 * 1.5), -1.5e-13);
    }
}
