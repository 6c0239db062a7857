//! Density matrices, ensembles over a shared support, and pointer (EHS) representations.

use num_complex::Complex64;

use crate::linalg::{self, herm_eig, ComplexMatrix};
use crate::{Error, Result};

/// Two states closer than this in trace distance are the same state.
pub const DEDUP_TOL: f64 = 1e-9;
/// Input probabilities may miss unit total by this much before rejection.
pub const PROB_SUM_TOL: f64 = 1e-8;

const STATE_TOL: f64 = 1e-10;

/// Validated density matrix: Hermitian, positive semidefinite, unit trace.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `mat`; tolerances are 1e-10 for Hermiticity, negativity and trace.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        mat.require_square()?;
        if !mat.is_finite() {
            return Err(Error::NonFinite);
        }
        let residual = mat.hermitian_residual();
        if residual > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (residual {residual:e})")));
        }
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let mat = mat.hermitian_part();
        let e = herm_eig(&mat)?;
        let min = e.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(Self { mat })
    }

    /// Rescales a nonzero positive operator to unit trace and validates it.
    pub fn from_unnormalized(mat: ComplexMatrix) -> Result<Self> {
        let tr = mat.trace().re;
        if !(tr > 0.0) {
            return Err(Error::InvalidState(format!("trace {tr} is not positive")));
        }
        Self::new(mat.scale(1.0 / tr))
    }

    /// |ψ⟩⟨ψ| for a nonzero vector, normalized.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let n = linalg::norm(psi);
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / n).collect();
        Ok(Self { mat: ComplexMatrix::projector(&v).hermitian_part() })
    }

    /// Computational basis state |k⟩⟨k|.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut d = vec![0.0; dim];
        d[k] = 1.0;
        Self { mat: ComplexMatrix::from_diag(&d) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { mat: ComplexMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> ComplexMatrix {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.mat.trace_product_re(&self.mat)
    }

    /// ρ ⊗ σ.
    pub fn tensor(&self, other: &Self) -> Self {
        Self { mat: linalg::tensor(&self.mat, &other.mat) }
    }
}

/// Probability-weighted collection of pairwise distinct density matrices.
#[derive(Clone, Debug)]
pub struct Ensemble {
    states: Vec<DensityMatrix>,
    probs: Vec<f64>,
}

impl Ensemble {
    pub fn singleton(state: DensityMatrix) -> Self {
        Self { states: vec![state], probs: vec![1.0] }
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &DensityMatrix)> {
        self.probs.iter().copied().zip(&self.states)
    }

    /// Applies `f` to every state and rebuilds the ensemble, merging states
    /// that become identical.
    pub fn map_states(&self, f: impl Fn(&DensityMatrix) -> Result<DensityMatrix>) -> Result<Self> {
        let pairs = self
            .iter()
            .map(|(p, s)| Ok((p, f(s)?)))
            .collect::<Result<Vec<_>>>()?;
        make_ensemble(pairs)
    }

    /// Ensemble of products ρ ⊗ τ with probabilities p·r.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let mut pairs = Vec::with_capacity(self.len() * other.len());
        for (p, a) in self.iter() {
            for (r, b) in other.iter() {
                pairs.push((p * r, a.tensor(b)));
            }
        }
        make_ensemble(pairs)
    }
}

/// Validates and normalizes a list of weighted states.
///
/// Probabilities must be nonnegative and sum to one within 1e-8; the sum is
/// then renormalized exactly. States within trace distance 1e-9 of an earlier
/// state are merged into it, and zero-weight entries are dropped.
pub fn make_ensemble(pairs: Vec<(f64, DensityMatrix)>) -> Result<Ensemble> {
    if pairs.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let dim = pairs[0].1.dim();
    let mut total = 0.0;
    for (p, s) in &pairs {
        if !p.is_finite() || *p < 0.0 {
            return Err(Error::InvalidProbabilities(format!("probability {p} is negative or not finite")));
        }
        if s.dim() != dim {
            return Err(Error::DimMismatch { expected: dim, found: s.dim() });
        }
        total += p;
    }
    if (total - 1.0).abs() > PROB_SUM_TOL {
        return Err(Error::InvalidProbabilities(format!("probabilities sum to {total}")));
    }

    let mut states: Vec<DensityMatrix> = Vec::new();
    let mut probs: Vec<f64> = Vec::new();
    for (p, s) in pairs {
        if p == 0.0 {
            continue;
        }
        match find_state(&states, &s)? {
            Some(k) => probs[k] += p,
            None => {
                states.push(s);
                probs.push(p);
            }
        }
    }
    if states.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let sum: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= sum;
    }
    Ok(Ensemble { states, probs })
}

/// Index of the first state in `list` within the dedup tolerance of `s`.
pub(crate) fn find_state(list: &[DensityMatrix], s: &DensityMatrix) -> Result<Option<usize>> {
    for (k, t) in list.iter().enumerate() {
        if same_state(t, s)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn same_state(a: &DensityMatrix, b: &DensityMatrix) -> Result<bool> {
    // Entries are bounded by the operator norm, so a large entrywise gap
    // settles the question without an eigendecomposition.
    if a.mat().max_diff(b.mat()) > 2.0 * DEDUP_TOL {
        return Ok(false);
    }
    Ok(linalg::trace_distance(a, b)? <= DEDUP_TOL)
}

/// Two ensembles written over one merged support Ω.
#[derive(Clone, Debug)]
pub struct SupportPair {
    pub omega: Vec<DensityMatrix>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
}

impl SupportPair {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Indices with positive weight under `p`.
    pub fn p_support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.p[i] > 0.0).collect()
    }

    /// Indices with positive weight under `q`.
    pub fn q_support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.q[i] > 0.0).collect()
    }
}

/// Merges the supports of `a` and `b` in first-seen order.
pub fn unify_support(a: &Ensemble, b: &Ensemble) -> Result<SupportPair> {
    if a.dim() != b.dim() {
        return Err(Error::DimMismatch { expected: a.dim(), found: b.dim() });
    }
    let mut omega: Vec<DensityMatrix> = a.states.clone();
    let mut p = a.probs.clone();
    let mut q = vec![0.0; omega.len()];
    for (w, s) in b.iter() {
        match find_state(&omega, s)? {
            Some(k) => q[k] += w,
            None => {
                omega.push(s.clone());
                p.push(0.0);
                q.push(w);
            }
        }
    }
    Ok(SupportPair { omega, p, q })
}

/// Whether (b, a) precedes (a, b) in a fixed total order on ensembles.
/// Symmetric measures solve the canonical orientation only, which makes
/// them exactly symmetric in their arguments.
pub(crate) fn canonical_swap(a: &Ensemble, b: &Ensemble) -> bool {
    let key = |e: &Ensemble| -> Vec<f64> {
        let mut k = vec![e.len() as f64];
        k.extend_from_slice(&e.probs);
        for s in &e.states {
            k.extend(s.mat().as_slice().iter().flat_map(|z| [z.re, z.im]));
        }
        k
    };
    let (ka, kb) = (key(a), key(b));
    for (x, y) in ka.iter().zip(&kb) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Less => return false,
            std::cmp::Ordering::Greater => return true,
            std::cmp::Ordering::Equal => {}
        }
    }
    kb.len() < ka.len()
}

/// For each state of `from.omega`, its index in `to.omega`.
pub(crate) fn support_map(from: &SupportPair, to: &SupportPair) -> Result<Vec<usize>> {
    from.omega
        .iter()
        .map(|s| find_state(&to.omega, s)?.ok_or_else(|| Error::InvalidState("supports do not match".into())))
        .collect()
}

/// Convex combination Σ_k w_k E_k of ensembles; weights must sum to one.
pub fn mix_ensembles(parts: &[(f64, &Ensemble)]) -> Result<Ensemble> {
    let mut pairs = Vec::new();
    for (w, e) in parts {
        for (p, s) in e.iter() {
            pairs.push((w * p, s.clone()));
        }
    }
    make_ensemble(pairs)
}

/// Σ p_x ρ_x.
pub fn average_state(e: &Ensemble) -> DensityMatrix {
    let mut acc = ComplexMatrix::zeros(e.dim(), e.dim());
    for (p, s) in e.iter() {
        acc += &s.mat().scale(p);
    }
    DensityMatrix { mat: acc.hermitian_part() }
}

/// Holevo information S(ρ̄) − Σ p S(ρ) in bits.
pub fn holevo_chi(e: &Ensemble) -> Result<f64> {
    let mut chi = linalg::von_neumann_entropy(&average_state(e))?;
    for (p, s) in e.iter() {
        chi -= p * linalg::von_neumann_entropy(s)?;
    }
    if chi < 0.0 && chi >= -1e-9 {
        chi = 0.0;
    }
    Ok(chi)
}

/// Average entropy S̄ = Σ p S(ρ).
pub fn average_entropy(e: &Ensemble) -> Result<f64> {
    e.iter().map(|(p, s)| Ok(p * linalg::von_neumann_entropy(s)?)).sum()
}

/// Binary Shannon entropy in bits, zero at both ends.
pub fn binary_entropy(x: f64) -> f64 {
    linalg::shannon_bits(&[x, 1.0 - x])
}

/// Fannes-type bound D log₂(d−1) + H(D, 1−D) on the gap between average entropies.
pub fn fannes_avg_entropy_bound(dk: f64, d: usize) -> Result<f64> {
    if !(0.0..=1.0).contains(&dk) {
        return Err(Error::OutOfRange { what: "distance must lie in [0,1]", value: dk });
    }
    if d < 2 {
        return Err(Error::OutOfRange { what: "dimension must be at least 2", value: d as f64 });
    }
    Ok(dk * ((d - 1) as f64).log2() + binary_entropy(dk))
}

/// Block-diagonal state on system ⊗ pointer.
#[derive(Clone, Debug)]
pub struct EhsState {
    pub mat: ComplexMatrix,
    pub system_dim: usize,
    pub pointer_dim: usize,
}

impl EhsState {
    /// The system state after discarding the pointer.
    pub fn reduced(&self) -> Result<ComplexMatrix> {
        linalg::partial_trace(&self.mat, (self.system_dim, self.pointer_dim), linalg::Keep::A)
    }

    /// The block of pointer `c`, an operator on the system.
    pub fn block(&self, c: usize) -> ComplexMatrix {
        let (d, k) = (self.system_dim, self.pointer_dim);
        let mut out = ComplexMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = self.mat[(i * k + c, j * k + c)];
            }
        }
        out
    }
}

/// Builds Σ_x Σ_c w_{x,c} ρ_x ⊗ |c⟩⟨c|.
///
/// `assignment[x]` lists the pointers and weights of state x. Each pointer may
/// serve a single state, and each state's weights must add up to its
/// probability within 1e-10.
pub fn make_ehs_state(e: &Ensemble, assignment: &[Vec<(usize, f64)>]) -> Result<EhsState> {
    if assignment.len() != e.len() {
        return Err(Error::LengthMismatch { left: e.len(), right: assignment.len() });
    }
    let mut owner: Vec<Option<usize>> = Vec::new();
    for (x, entries) in assignment.iter().enumerate() {
        let mut sum = 0.0;
        for &(c, w) in entries {
            if !(w >= 0.0) {
                return Err(Error::InvalidProbabilities(format!("pointer weight {w} is negative")));
            }
            if c >= owner.len() {
                owner.resize(c + 1, None);
            }
            match owner[c] {
                Some(o) if o != x => return Err(Error::PointerReuse { pointer: c }),
                _ => owner[c] = Some(x),
            }
            sum += w;
        }
        if (sum - e.probs[x]).abs() > STATE_TOL {
            return Err(Error::WeightMismatch { state: x, expected: e.probs[x], found: sum });
        }
    }
    let pointer_dim = owner.len().max(1);
    let d = e.dim();
    let mut mat = ComplexMatrix::zeros(d * pointer_dim, d * pointer_dim);
    for (x, entries) in assignment.iter().enumerate() {
        for &(c, w) in entries {
            let rho = e.states[x].mat();
            for i in 0..d {
                for j in 0..d {
                    mat[(i * pointer_dim + c, j * pointer_dim + c)] += rho[(i, j)] * w;
                }
            }
        }
    }
    Ok(EhsState { mat, system_dim: d, pointer_dim })
}

/// One pointer per state: Σ P(ρ) ρ ⊗ [ρ].
pub fn canonical_ehs_state(e: &Ensemble) -> EhsState {
    let assignment: Vec<Vec<(usize, f64)>> = e.probs.iter().enumerate().map(|(x, &p)| vec![(x, p)]).collect();
    make_ehs_state(e, &assignment).expect("canonical assignment is always valid")
}

/// Canonical pointer states of both sides of a support pair, using the index
/// in Ω as the pointer so that equal states share a pointer.
pub fn canonical_ehs_pair(sp: &SupportPair) -> (EhsState, EhsState) {
    let build = |w: &[f64]| {
        let n = sp.len();
        let d = sp.omega[0].dim();
        let mut mat = ComplexMatrix::zeros(d * n, d * n);
        for (c, (rho, &p)) in sp.omega.iter().zip(w).enumerate() {
            for i in 0..d {
                for j in 0..d {
                    mat[(i * n + c, j * n + c)] = rho.mat()[(i, j)] * p;
                }
            }
        }
        EhsState { mat, system_dim: d, pointer_dim: n }
    };
    (build(&sp.p), build(&sp.q))
}
