//! Dense complex linear algebra and the matrix functionals behind every measure.

mod eig;
mod matrix;

pub use eig::{herm_eig, HermEig};
pub use matrix::{inner, norm, ComplexMatrix};

use num_complex::Complex64;

use crate::ensembles::DensityMatrix;
use crate::{Error, Result};

const PSD_TOL: f64 = 1e-10;

/// Which factor a partial trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Trace norm Tr√(O†O).
///
/// Hermitian input uses Σ|λ|; anything else goes through the spectrum of O†O.
pub fn trace_norm(o: &ComplexMatrix) -> Result<f64> {
    o.require_square()?;
    if o.hermitian_residual() <= 1e-12 * o.max_abs().max(1.0) {
        // Summing in order of magnitude makes ‖O‖ and ‖−O‖ bitwise equal.
        let mut mags: Vec<f64> = herm_eig(o)?.eigenvalues.iter().map(|x| x.abs()).collect();
        mags.sort_by(f64::total_cmp);
        return Ok(mags.iter().sum());
    }
    let e = herm_eig(&o.adjoint().matmul(o))?;
    let floor = e.noise_floor();
    Ok(e.eigenvalues.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum())
}

/// Trace distance ½‖ρ − σ‖.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let d = 0.5 * trace_norm(&(rho.mat() - sigma.mat()))?;
    Ok(d.clamp(0.0, 1.0))
}

/// Principal square root of a positive semidefinite matrix.
///
/// Eigenvalues down to `-1e-10` are treated as rounding and clamped to zero.
pub fn mat_sqrt_psd(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = herm_eig(a)?;
    check_psd(&e)?;
    let floor = e.noise_floor();
    Ok(e.reconstruct_with(|x| if x > floor { x.sqrt() } else { 0.0 }))
}

fn check_psd(e: &HermEig) -> Result<()> {
    let min = e.eigenvalues.last().copied().unwrap_or(0.0);
    if min < -PSD_TOL {
        return Err(Error::NotPsd { min_eigenvalue: min });
    }
    Ok(())
}

/// Square-root fidelity Tr√(√σ ρ √σ).
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let s = mat_sqrt_psd(sigma.mat())?;
    fidelity_with_sqrt(rho.mat(), &s)
}

/// Fidelity when √σ is already available.
pub(crate) fn fidelity_with_sqrt(rho: &ComplexMatrix, sqrt_sigma: &ComplexMatrix) -> Result<f64> {
    let inner = sqrt_sigma.matmul(rho).matmul(sqrt_sigma).hermitian_part();
    let e = herm_eig(&inner)?;
    let floor = e.noise_floor();
    let f: f64 = e.eigenvalues.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let e = herm_eig(rho.mat())?;
    Ok(shannon_bits(&e.eigenvalues))
}

/// −Σ x log₂ x over the positive entries.
pub fn shannon_bits(weights: &[f64]) -> f64 {
    let h: f64 = weights.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum();
    h.max(0.0)
}

/// Optimal two-state discrimination.
#[derive(Clone, Debug)]
pub struct Helstrom {
    /// Maximum average success probability.
    pub pmax: f64,
    /// Projector onto the positive eigenspace of pρ − (1−p)σ; outcome inside
    /// it means "guess ρ".
    pub projector: ComplexMatrix,
}

/// Helstrom bound ½(1 + ‖pρ − (1−p)σ‖) with its optimal measurement.
pub fn helstrom_pmax(rho: &DensityMatrix, sigma: &DensityMatrix, p: f64) -> Result<Helstrom> {
    same_dim(rho, sigma)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::OutOfRange { what: "prior must lie in [0,1]", value: p });
    }
    let gamma = &rho.mat().scale(p) - &sigma.mat().scale(1.0 - p);
    let e = herm_eig(&gamma)?;
    let norm: f64 = e.eigenvalues.iter().map(|x| x.abs()).sum();
    let floor = e.noise_floor();
    let projector = e.reconstruct_with(|x| if x > floor { 1.0 } else { 0.0 });
    Ok(Helstrom { pmax: 0.5 * (1.0 + norm), projector })
}

/// V sign(Λ) V†, with eigenvalues inside the noise floor mapped to zero.
pub fn sign_matrix(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let e = herm_eig(a)?;
    let floor = e.noise_floor();
    Ok(e.reconstruct_with(|x| {
        if x > floor {
            1.0
        } else if x < -floor {
            -1.0
        } else {
            0.0
        }
    }))
}

/// Kronecker product a ⊗ b.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    let mut out = ComplexMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let x = a[(i, j)];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of vectors.
pub fn tensor_vec(u: &[Complex64], v: &[Complex64]) -> Vec<Complex64> {
    u.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect()
}

/// Partial trace of an operator on A ⊗ B.
pub fn partial_trace(a: &ComplexMatrix, dims: (usize, usize), keep: Keep) -> Result<ComplexMatrix> {
    let n = a.require_square()?;
    let (da, db) = dims;
    if da * db != n {
        return Err(Error::DimMismatch { expected: da * db, found: n });
    }
    Ok(match keep {
        Keep::A => {
            let mut out = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    out[(i, j)] = (0..db).map(|k| a[(i * db + k, j * db + k)]).sum();
                }
            }
            out
        }
        Keep::B => {
            let mut out = ComplexMatrix::zeros(db, db);
            for k in 0..db {
                for l in 0..db {
                    out[(k, l)] = (0..da).map(|i| a[(i * db + k, i * db + l)]).sum();
                }
            }
            out
        }
    })
}

fn same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}
