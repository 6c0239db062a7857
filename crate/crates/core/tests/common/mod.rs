#![allow(dead_code)]

use ensemble_metrics::ensembles::{DensityMatrix, Ensemble};
use ensemble_metrics::linalg::ComplexMatrix;
use ensemble_metrics::oracle::random_cptp;
use ensemble_metrics::Complex64;

/// Hermitian matrix with Gaussian-like entries built from a random channel.
pub fn random_hermitian(d: usize, seed: u64) -> ComplexMatrix {
    let k = random_cptp(d, d, 1, seed).unwrap().remove(0);
    let mut h = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            h[(i, j)] = k[(i, j)] * Complex64::new(3.0, 0.0) + Complex64::new((i + j) as f64 * 0.1, 0.0);
        }
    }
    (&h + &h.adjoint()).scale(0.5)
}

/// Σ K ρ K† for a trace-preserving Kraus set, renormalized against rounding.
pub fn apply_channel(kraus: &[ComplexMatrix], rho: &DensityMatrix) -> DensityMatrix {
    let d = kraus[0].rows();
    let mut out = ComplexMatrix::zeros(d, d);
    for k in kraus {
        out += &k.conjugate(rho.mat());
    }
    DensityMatrix::from_unnormalized(out.hermitian_part()).unwrap()
}

pub fn map_ensemble(kraus: &[ComplexMatrix], e: &Ensemble) -> Ensemble {
    e.map_states(|s| Ok(apply_channel(kraus, s))).unwrap()
}
