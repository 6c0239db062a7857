use num_complex::Complex64;

use super::ComplexMatrix;
use crate::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;
const SWEEP_CAP: usize = 100;

/// Spectral decomposition A = V Λ V† of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermEig {
    /// Eigenvalues in descending order.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.col(k)
    }

    /// V f(Λ) V†.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let w = f(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = v[(i, k)] * w;
                if vik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vik * v[(j, k)].conj();
                }
            }
        }
        out
    }

    /// Resolution below which an eigenvalue cannot be told apart from zero.
    pub(crate) fn noise_floor(&self) -> f64 {
        let scale = self.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        8.0 * self.dim() as f64 * f64::EPSILON * scale
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input is symmetrized before iterating. Sweeps stop once the
/// off-diagonal Frobenius norm drops below `1e-12 * ||A||_F`.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermEig> {
    let n = a.require_square()?;
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let residual = a.hermitian_residual();
    if residual > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let threshold = 1e-12 * m.frobenius_norm();

    let mut converged = false;
    for _ in 0..=SWEEP_CAP {
        if off_diagonal_norm(&m) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence { sweeps: SWEEP_CAP });
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag = m.diag_real();
    // Stable sort keeps equal eigenvalues in solver order, so output is reproducible.
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let mut vecs = ComplexMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vecs.set_col(dst, &v.col(src));
    }
    Ok(HermEig {
        eigenvalues: order.iter().map(|&i| diag[i]).collect(),
        eigenvectors: vecs,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let n = m.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += m[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

// Annihilates m[p][q] with the unitary U = D R, where D removes the phase of
// m[p][q] and R is the real symmetric Jacobi rotation.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let upp = Complex64::new(c, 0.0);
    let upq = Complex64::new(s, 0.0);
    let uqp = -phase.conj() * s;
    let uqq = phase.conj() * c;

    let n = m.rows();
    for k in 0..n {
        let akp = m[(k, p)];
        let akq = m[(k, q)];
        m[(k, p)] = akp * upp + akq * uqp;
        m[(k, q)] = akp * upq + akq * uqq;
    }
    for k in 0..n {
        let apk = m[(p, k)];
        let aqk = m[(q, k)];
        m[(p, k)] = upp.conj() * apk + uqp.conj() * aqk;
        m[(q, k)] = upq.conj() * apk + uqq.conj() * aqk;
    }
    m[(p, q)] = Complex64::new(0.0, 0.0);
    m[(q, p)] = Complex64::new(0.0, 0.0);
    m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * upp + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * uqq;
    }
}
