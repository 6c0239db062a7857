use super::{ensemble_distance, ensemble_fidelity, Method, MEASUREMENT_TOL};
use crate::ehs::SolverOptions;
use crate::ensembles::{make_ensemble, DensityMatrix, Ensemble};
use crate::linalg::{herm_eig, ComplexMatrix};
use crate::{Error, Result};

/// Positive operators E_i summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    /// Checks Hermiticity, positivity and Σ E_i = I, each within 1e-8.
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidPovm { reason: "no elements".into(), residual: 1.0 })?;
        let d = first.require_square()?;
        let mut total = ComplexMatrix::zeros(d, d);
        for (i, e) in elements.iter().enumerate() {
            if e.require_square()? != d {
                return Err(Error::DimMismatch { expected: d, found: e.rows() });
            }
            if !e.is_finite() {
                return Err(Error::NonFinite);
            }
            let residual = e.hermitian_residual();
            if residual > MEASUREMENT_TOL {
                return Err(Error::InvalidPovm { reason: format!("element {i} is not Hermitian"), residual });
            }
            let min = herm_eig(&e.hermitian_part())?.eigenvalues.last().copied().unwrap_or(0.0);
            if min < -MEASUREMENT_TOL {
                return Err(Error::InvalidPovm { reason: format!("element {i} is not positive"), residual: -min });
            }
            total += e;
        }
        let residual = total.max_diff(&ComplexMatrix::identity(d));
        if residual > MEASUREMENT_TOL {
            return Err(Error::InvalidPovm { reason: "elements do not sum to the identity".into(), residual });
        }
        Ok(Self { elements: elements.into_iter().map(|e| e.hermitian_part()).collect() })
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }
}

/// {(Tr E_i / d, E_i / Tr E_i)}; zero elements are dropped and equal
/// normalized elements merged.
pub fn povm_to_ensemble(p: &Povm) -> Result<Ensemble> {
    let d = p.dim() as f64;
    let mut pairs = Vec::with_capacity(p.elements.len());
    for e in &p.elements {
        let tr = e.trace().re;
        if tr > 0.0 {
            pairs.push((tr / d, DensityMatrix::from_unnormalized(e.clone())?));
        }
    }
    let total: f64 = pairs.iter().map(|(w, _)| w).sum();
    for (w, _) in &mut pairs {
        *w /= total;
    }
    make_ensemble(pairs)
}

fn pair(p: &Povm, q: &Povm) -> Result<(Ensemble, Ensemble)> {
    if p.dim() != q.dim() {
        return Err(Error::DimMismatch { expected: p.dim(), found: q.dim() });
    }
    Ok((povm_to_ensemble(p)?, povm_to_ensemble(q)?))
}

pub fn povm_distance(p: &Povm, q: &Povm, method: Method, opts: &SolverOptions) -> Result<f64> {
    let (a, b) = pair(p, q)?;
    ensemble_distance(&a, &b, method, opts)
}

pub fn povm_fidelity(p: &Povm, q: &Povm, method: Method, opts: &SolverOptions) -> Result<f64> {
    let (a, b) = pair(p, q)?;
    ensemble_fidelity(&a, &b, method, opts)
}
