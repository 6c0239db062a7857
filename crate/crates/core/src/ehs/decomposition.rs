use num_complex::Complex64;

use super::fidelity::maximize;
use super::{Restriction, SolverOptions};
use crate::ensembles::{make_ensemble, unify_support, DensityMatrix, Ensemble};
use crate::kantorovich::{transportation_lp, Sense};
use crate::linalg::{self, herm_eig, inner, mat_sqrt_psd, ComplexMatrix};
use crate::{Error, Result};

const PURITY_TOL: f64 = 1e-8;

/// Pure-state decompositions of ρ and σ whose paired overlaps attain F(ρ,σ).
#[derive(Clone, Debug)]
pub struct Theorem4Decomposition {
    pub ensemble_p: Ensemble,
    pub ensemble_q: Ensemble,
    /// |α_i| for the paired index i (zero entries included).
    pub alphas: Vec<f64>,
    /// |β_i| for the paired index i.
    pub betas: Vec<f64>,
    /// Σ |α_i||β_i||⟨ψ_i|φ_i⟩|.
    pub overlap_value: f64,
}

/// Builds α_i|ψ_i⟩ = √ρ|i⟩ and β_i|φ_i⟩ = √σ V|i⟩ with the unitary V that
/// aligns the two purifications, so that Σ|α_i||β_i||⟨ψ_i|φ_i⟩| = F(ρ,σ).
///
/// V = Y X† comes from the singular value decomposition √ρ√σ = X S Y†,
/// obtained from the spectrum of (√ρ√σ)†(√ρ√σ). Directions with zero
/// singular value are completed to an orthonormal basis, which keeps V
/// unitary for rank-deficient inputs.
pub fn theorem4_decomposition(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<Theorem4Decomposition> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    let d = rho.dim();
    let sr = mat_sqrt_psd(rho.mat())?;
    let ss = mat_sqrt_psd(sigma.mat())?;
    let a = sr.matmul(&ss);
    let e = herm_eig(&a.adjoint().matmul(&a).hermitian_part())?;
    let floor = e.noise_floor().max(1e-300);

    let mut x_cols: Vec<Vec<Complex64>> = Vec::with_capacity(d);
    for k in 0..d {
        let lam = e.eigenvalues[k];
        if lam > floor {
            let s = lam.sqrt();
            let col = a.apply(&e.vector(k));
            x_cols.push(col.iter().map(|z| z / s).collect());
        } else {
            break;
        }
    }
    complete_basis(&mut x_cols, d);
    let mut x = ComplexMatrix::zeros(d, d);
    for (k, col) in x_cols.iter().enumerate() {
        x.set_col(k, col);
    }
    let v = e.eigenvectors.matmul(&x.adjoint());
    let w = ss.matmul(&v);

    let mut alphas = Vec::with_capacity(d);
    let mut betas = Vec::with_capacity(d);
    let mut pairs_p = Vec::new();
    let mut pairs_q = Vec::new();
    let mut overlap = 0.0;
    for i in 0..d {
        let u = sr.col(i);
        let t = w.col(i);
        let (na, nb) = (linalg::norm(&u), linalg::norm(&t));
        alphas.push(na);
        betas.push(nb);
        overlap += inner(&u, &t).norm();
        if na > 1e-12 {
            pairs_p.push((na * na, DensityMatrix::pure(&u)?));
        }
        if nb > 1e-12 {
            pairs_q.push((nb * nb, DensityMatrix::pure(&t)?));
        }
    }
    Ok(Theorem4Decomposition {
        ensemble_p: make_ensemble(pairs_p)?,
        ensemble_q: make_ensemble(pairs_q)?,
        alphas,
        betas,
        overlap_value: overlap,
    })
}

// Extends orthonormal columns to a basis of C^d by Gram-Schmidt on the
// standard basis.
fn complete_basis(cols: &mut Vec<Vec<Complex64>>, d: usize) {
    for k in 0..d {
        if cols.len() == d {
            break;
        }
        let mut v = vec![Complex64::new(0.0, 0.0); d];
        v[k] = Complex64::new(1.0, 0.0);
        for _ in 0..2 {
            for c in cols.iter() {
                let proj = inner(c, &v);
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let n = linalg::norm(&v);
        if n > 1e-6 {
            cols.push(v.iter().map(|z| z / n).collect());
        }
    }
}

/// F^EHS of two pure-state ensembles, using |⟨ψ|φ⟩| = √Tr(ψφ) as the pairwise fidelity.
pub fn pure_ensemble_fidelity(a: &Ensemble, b: &Ensemble, opts: &SolverOptions) -> Result<f64> {
    for (index, s) in a.states().iter().chain(b.states()).enumerate() {
        let purity = s.purity();
        if purity < 1.0 - PURITY_TOL {
            return Err(Error::NotPure { index, purity });
        }
    }
    let sp = unify_support(a, b)?;
    let n = sp.len();
    let mut overlap = vec![vec![0.0; n]; n];
    for i in sp.p_support() {
        for j in sp.q_support() {
            overlap[i][j] = if i == j {
                1.0
            } else {
                sp.omega[i].mat().trace_product_re(sp.omega[j].mat()).max(0.0).sqrt().min(1.0)
            };
        }
    }
    let lp = transportation_lp(&sp.p, &sp.q, &overlap, Sense::Max)?;
    let restr = Restriction::new(&sp);
    let p: Vec<f64> = restr.rows.iter().map(|&i| sp.p[i]).collect();
    let q: Vec<f64> = restr.cols.iter().map(|&j| sp.q[j]).collect();
    let run = maximize(&p, &q, &restr.restrict(&overlap), &restr.restrict(&lp.coupling.table), opts);
    Ok(run.value.max(lp.value).clamp(0.0, 1.0))
}
