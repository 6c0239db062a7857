//! Generalized measurements, POVMs and the ensemble-based measures between them.
//!
//! A generalized measurement is stored as outcomes (m_i, {M̄_ij}) where the
//! normalized Kraus operators satisfy Tr Σ_j M̄_ij†M̄_ij = d and the physical
//! Kraus operators are √m_i·M̄_ij.

mod povm;
mod worst;

pub use povm::{povm_distance, povm_fidelity, povm_to_ensemble, Povm};
pub use worst::{dist_max, fid_min, WorstCase, WorstCaseOptions};

use num_complex::Complex64;

use crate::ehs::{ehs_distance, ehs_fidelity, SolverOptions};
use crate::ensembles::{make_ensemble, DensityMatrix, Ensemble};
use crate::kantorovich::{kantorovich_distance, kantorovich_fidelity};
use crate::linalg::{self, ComplexMatrix};
use crate::{Error, Result};

/// Tolerance on weights, normalization and completeness.
pub const MEASUREMENT_TOL: f64 = 1e-8;
/// Outcomes whose normalized Choi states are this close are one outcome.
pub const OUTCOME_DEDUP_TOL: f64 = 1e-9;
/// Outcomes with smaller probability are dropped from output ensembles.
pub const ZERO_PROB: f64 = 1e-12;

/// One outcome: weight m_i and normalized Kraus operators M̄_ij.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub weight: f64,
    pub kraus: Vec<ComplexMatrix>,
}

/// A stochastic quantum channel split into distinct measurement outcomes.
#[derive(Clone, Debug)]
pub struct GeneralizedMeasurement {
    dim: usize,
    outcomes: Vec<Outcome>,
}

impl GeneralizedMeasurement {
    /// Validates weights, per-outcome normalization and completeness.
    /// Outcomes whose superoperators coincide are merged, weights added.
    pub fn new(outcomes: Vec<Outcome>) -> Result<Self> {
        let dim = check_shapes(outcomes.iter().flat_map(|o| o.kraus.iter()))?;
        let mut total = 0.0;
        for (i, o) in outcomes.iter().enumerate() {
            if !o.weight.is_finite() || o.weight < 0.0 {
                return Err(Error::InvalidMeasurement {
                    reason: format!("outcome {i} has weight {}", o.weight),
                    residual: o.weight.abs(),
                });
            }
            total += o.weight;
            let norm = gram(&o.kraus, dim).trace().re;
            let residual = (norm - dim as f64).abs();
            if residual > MEASUREMENT_TOL * dim as f64 {
                return Err(Error::InvalidMeasurement {
                    reason: format!("outcome {i} has Tr(sum M^dagger M) = {norm}, expected {dim}"),
                    residual,
                });
            }
        }
        if (total - 1.0).abs() > MEASUREMENT_TOL {
            return Err(Error::InvalidMeasurement {
                reason: format!("weights sum to {total}"),
                residual: (total - 1.0).abs(),
            });
        }
        let mut completeness = ComplexMatrix::zeros(dim, dim);
        for o in &outcomes {
            completeness += &gram(&o.kraus, dim).scale(o.weight);
        }
        let residual = completeness.max_diff(&ComplexMatrix::identity(dim));
        if residual > MEASUREMENT_TOL {
            return Err(Error::InvalidMeasurement {
                reason: "sum of m_i M^dagger M differs from the identity".into(),
                residual,
            });
        }
        Self::merged(dim, outcomes.into_iter().filter(|o| o.weight > 0.0).collect())
    }

    /// From physical Kraus sets {M_ij}: m_i = Tr(Σ_j M_ij†M_ij)/d and
    /// M̄_ij = M_ij/√m_i. Outcomes of zero weight are dropped.
    pub fn from_kraus_sets(sets: Vec<Vec<ComplexMatrix>>) -> Result<Self> {
        let dim = check_shapes(sets.iter().flatten())?;
        let mut outcomes = Vec::with_capacity(sets.len());
        for set in sets {
            let m = gram(&set, dim).trace().re / dim as f64;
            if m <= 0.0 {
                continue;
            }
            let s = 1.0 / m.sqrt();
            outcomes.push(Outcome { weight: m, kraus: set.iter().map(|k| k.scale(s)).collect() });
        }
        if outcomes.is_empty() {
            return Err(Error::InvalidMeasurement { reason: "no outcome carries weight".into(), residual: 1.0 });
        }
        Self::new(outcomes)
    }

    /// Single-outcome measurement implementing a channel.
    pub fn channel(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::from_kraus_sets(vec![kraus])
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, outcomes: vec![Outcome { weight: 1.0, kraus: vec![ComplexMatrix::identity(dim)] }] }
    }

    /// Projective measurement onto the given orthonormal vectors, which
    /// must span the space.
    pub fn projective(basis: &[Vec<Complex64>]) -> Result<Self> {
        Self::from_kraus_sets(basis.iter().map(|v| vec![ComplexMatrix::projector(v)]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn outcomes(&self) -> &[Outcome] {
        &self.outcomes
    }

    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    /// Physical Kraus operators √m_i·M̄_ij of outcome i.
    pub fn raw_kraus(&self, i: usize) -> Vec<ComplexMatrix> {
        let o = &self.outcomes[i];
        o.kraus.iter().map(|k| k.scale(o.weight.sqrt())).collect()
    }

    fn merged(dim: usize, outcomes: Vec<Outcome>) -> Result<Self> {
        let mut kept: Vec<Outcome> = Vec::new();
        let mut chois: Vec<DensityMatrix> = Vec::new();
        for o in outcomes {
            let c = choi(&o.kraus)?;
            let mut found = None;
            for (k, other) in chois.iter().enumerate() {
                if c.mat().max_diff(other.mat()) <= 2.0 * OUTCOME_DEDUP_TOL
                    && linalg::trace_distance(&c, other)? <= OUTCOME_DEDUP_TOL
                {
                    found = Some(k);
                    break;
                }
            }
            match found {
                Some(k) => kept[k].weight += o.weight,
                None => {
                    chois.push(c);
                    kept.push(o);
                }
            }
        }
        let total: f64 = kept.iter().map(|o| o.weight).sum();
        for o in &mut kept {
            o.weight /= total;
        }
        Ok(Self { dim, outcomes: kept })
    }
}

fn check_shapes<'a>(mut ops: impl Iterator<Item = &'a ComplexMatrix>) -> Result<usize> {
    let first = ops.next().ok_or_else(|| Error::InvalidMeasurement { reason: "no Kraus operators".into(), residual: 1.0 })?;
    let dim = first.require_square()?;
    for k in ops {
        let d = k.require_square()?;
        if d != dim {
            return Err(Error::DimMismatch { expected: dim, found: d });
        }
        if !k.is_finite() {
            return Err(Error::NonFinite);
        }
    }
    if !first.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(dim)
}

// Σ K†K.
fn gram(kraus: &[ComplexMatrix], dim: usize) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(dim, dim);
    for k in kraus {
        g += &k.adjoint().matmul(k);
    }
    g
}

/// |Φ⟩ = Σ_j |j⟩|j⟩/√d on A⊗S, ancilla first.
pub fn max_entangled(dim: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); dim * dim];
    let s = 1.0 / (dim as f64).sqrt();
    for j in 0..dim {
        v[j * dim + j] = Complex64::new(s, 0.0);
    }
    v
}

/// Normalized Choi state (I⊗E)(|Φ⟩⟨Φ|) of E(ρ) = Σ K ρ K†, where the Kraus
/// operators obey Tr Σ K†K = d.
pub fn choi(kraus: &[ComplexMatrix]) -> Result<DensityMatrix> {
    let d = check_shapes(kraus.iter())?;
    let mut j = ComplexMatrix::zeros(d * d, d * d);
    for k in kraus {
        let v = apply_local(k, &max_entangled(d), d);
        j += &ComplexMatrix::projector(&v);
    }
    DensityMatrix::from_unnormalized(j.hermitian_part())
}

// (I_A ⊗ K)ψ for ψ on A⊗S with dim S = d.
fn apply_local(k: &ComplexMatrix, psi: &[Complex64], d: usize) -> Vec<Complex64> {
    let da = psi.len() / d;
    let mut out = vec![Complex64::new(0.0, 0.0); da * d];
    for a in 0..da {
        let block = &psi[a * d..(a + 1) * d];
        out[a * d..(a + 1) * d].copy_from_slice(&k.apply(block));
    }
    out
}

/// Ensemble of normalized post-measurement states.
///
/// Outcome i occurs with probability m_i Tr M̄_i(ρ); outcomes below 1e-12
/// are dropped, the rest renormalized, and coinciding post-states merged.
pub fn apply_measurement(m: &GeneralizedMeasurement, rho: &DensityMatrix) -> Result<Ensemble> {
    if rho.dim() != m.dim {
        return Err(Error::DimMismatch { expected: m.dim, found: rho.dim() });
    }
    let mut pairs = Vec::with_capacity(m.len());
    for o in &m.outcomes {
        let mut out = ComplexMatrix::zeros(m.dim, m.dim);
        for k in &o.kraus {
            out += &k.conjugate(rho.mat());
        }
        pairs.push((o.weight, out));
    }
    collect_outcomes(pairs)
}

/// Measures every state of an ensemble: outcome i on ρ contributes
/// P(ρ)·m_i·Tr M̄_i(ρ) to the normalized post-state M̄_i(ρ)/Tr M̄_i(ρ).
pub fn apply_to_ensemble(m: &GeneralizedMeasurement, e: &Ensemble) -> Result<Ensemble> {
    if e.dim() != m.dim {
        return Err(Error::DimMismatch { expected: m.dim, found: e.dim() });
    }
    let mut raw = Vec::with_capacity(e.len() * m.len());
    for (p, rho) in e.iter() {
        for o in &m.outcomes {
            let mut out = ComplexMatrix::zeros(m.dim, m.dim);
            for k in &o.kraus {
                out += &k.conjugate(rho.mat());
            }
            raw.push((p * o.weight, out));
        }
    }
    collect_outcomes(raw)
}

/// Output ensemble of (I_A ⊗ M) on the pure state ψ ∈ A⊗S.
pub fn apply_to_pure(m: &GeneralizedMeasurement, psi: &[Complex64]) -> Result<Ensemble> {
    let d = m.dim;
    if psi.len() % d != 0 || psi.is_empty() {
        return Err(Error::DimMismatch { expected: d, found: psi.len() });
    }
    let n = linalg::norm(psi);
    if !(n > 0.0) {
        return Err(Error::InvalidState("zero state vector".into()));
    }
    let psi: Vec<Complex64> = psi.iter().map(|z| z / n).collect();
    let mut pairs = Vec::with_capacity(m.len());
    for o in &m.outcomes {
        let mut out = ComplexMatrix::zeros(psi.len(), psi.len());
        for k in &o.kraus {
            out += &ComplexMatrix::projector(&apply_local(k, &psi, d));
        }
        pairs.push((o.weight, out));
    }
    collect_outcomes(pairs)
}

fn collect_outcomes(raw: Vec<(f64, ComplexMatrix)>) -> Result<Ensemble> {
    let mut pairs = Vec::with_capacity(raw.len());
    for (w, out) in raw {
        let out = out.hermitian_part();
        let tr = out.trace().re;
        let p = w * tr;
        if p > ZERO_PROB {
            pairs.push((p, DensityMatrix::from_unnormalized(out)?));
        }
    }
    let total: f64 = pairs.iter().map(|(p, _)| p).sum();
    if pairs.is_empty() || !(total > 0.0) {
        return Err(Error::EmptyEnsemble);
    }
    for (p, _) in &mut pairs {
        *p /= total;
    }
    make_ensemble(pairs)
}

/// The same measurement acting on S inside A⊗S: Kraus operators I_A ⊗ M̄_ij.
pub fn tensor_identity_left(m: &GeneralizedMeasurement, ancilla_dim: usize) -> GeneralizedMeasurement {
    let id = ComplexMatrix::identity(ancilla_dim);
    GeneralizedMeasurement {
        dim: ancilla_dim * m.dim,
        outcomes: m
            .outcomes
            .iter()
            .map(|o| Outcome { weight: o.weight, kraus: o.kraus.iter().map(|k| linalg::tensor(&id, k)).collect() })
            .collect(),
    }
}

/// Output of the measurement on one half of |Φ⟩.
#[derive(Clone, Debug)]
pub struct ChoiEnsemble {
    pub ensemble: Ensemble,
    /// Dimension d of the measured system; states live on d².
    pub system_dim: usize,
}

/// Ensemble {(m_i, ρ_M̄_i)} of normalized Choi states.
pub fn jamiolkowski_ensemble(m: &GeneralizedMeasurement) -> Result<ChoiEnsemble> {
    Ok(ChoiEnsemble { ensemble: apply_to_pure(m, &max_entangled(m.dim))?, system_dim: m.dim })
}

/// Which ensemble measure to use between output ensembles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Kantorovich,
    Ehs,
}

pub fn ensemble_distance(a: &Ensemble, b: &Ensemble, method: Method, opts: &SolverOptions) -> Result<f64> {
    match method {
        Method::Kantorovich => Ok(kantorovich_distance(a, b)?.value),
        Method::Ehs => Ok(ehs_distance(a, b, opts)?.value),
    }
}

pub fn ensemble_fidelity(a: &Ensemble, b: &Ensemble, method: Method, opts: &SolverOptions) -> Result<f64> {
    match method {
        Method::Kantorovich => Ok(kantorovich_fidelity(a, b)?.value),
        Method::Ehs => Ok(ehs_fidelity(a, b, opts)?.value),
    }
}

fn same_dim(m: &GeneralizedMeasurement, n: &GeneralizedMeasurement) -> Result<()> {
    if m.dim != n.dim {
        return Err(Error::DimMismatch { expected: m.dim, found: n.dim });
    }
    Ok(())
}

/// Distance between the Jamiołkowski ensembles of two measurements.
pub fn dist_iso(m: &GeneralizedMeasurement, n: &GeneralizedMeasurement, method: Method, opts: &SolverOptions) -> Result<f64> {
    same_dim(m, n)?;
    ensemble_distance(&jamiolkowski_ensemble(m)?.ensemble, &jamiolkowski_ensemble(n)?.ensemble, method, opts)
}

/// Fidelity between the Jamiołkowski ensembles of two measurements.
pub fn fid_iso(m: &GeneralizedMeasurement, n: &GeneralizedMeasurement, method: Method, opts: &SolverOptions) -> Result<f64> {
    same_dim(m, n)?;
    ensemble_fidelity(&jamiolkowski_ensemble(m)?.ensemble, &jamiolkowski_ensemble(n)?.ensemble, method, opts)
}

/// `second ∘ first`: outcome (i, k) has Kraus operators √(m_i n_k) N̄_kl M̄_ij,
/// renormalized to the (m, M̄) convention with coinciding outcomes merged.
pub fn compose(second: &GeneralizedMeasurement, first: &GeneralizedMeasurement) -> Result<GeneralizedMeasurement> {
    same_dim(second, first)?;
    let mut sets = Vec::with_capacity(first.len() * second.len());
    for i in 0..first.len() {
        let a = first.raw_kraus(i);
        for k in 0..second.len() {
            let b = second.raw_kraus(k);
            sets.push(b.iter().flat_map(|y| a.iter().map(move |x| y.matmul(x))).collect());
        }
    }
    GeneralizedMeasurement::from_kraus_sets(sets)
}

/// Whether the overall channel maps I to I (within 1e-8).
pub fn is_unital(m: &GeneralizedMeasurement) -> bool {
    let mut total = ComplexMatrix::zeros(m.dim, m.dim);
    for o in &m.outcomes {
        for k in &o.kraus {
            total += &k.matmul(&k.adjoint()).scale(o.weight);
        }
    }
    total.max_diff(&ComplexMatrix::identity(m.dim)) <= MEASUREMENT_TOL
}

#[cfg(test)]
mod tests;
