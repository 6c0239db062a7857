//! Kantorovich distance and fidelity between ensembles.

mod transport;

pub use transport::{transportation_lp, Coupling, LpSolution, LpStatus, Sense};

use crate::ensembles::{canonical_swap, support_map, unify_support, DensityMatrix, Ensemble, SupportPair};
use crate::linalg::{self, fidelity_with_sqrt, mat_sqrt_psd, ComplexMatrix};
use crate::{Error, Result};

/// Value of a Kantorovich measure with the optimal coupling that achieved it.
#[derive(Clone, Debug)]
pub struct KantorovichResult {
    pub value: f64,
    /// Optimal coupling over `support.omega`.
    pub coupling: Coupling,
    pub support: SupportPair,
    pub iterations: usize,
}

/// Pairwise trace distances over the rows and columns that carry mass;
/// other entries are left at zero.
pub fn distance_costs(sp: &SupportPair) -> Result<Vec<Vec<f64>>> {
    let n = sp.len();
    let mut cost = vec![vec![0.0; n]; n];
    for i in sp.p_support() {
        for j in sp.q_support() {
            if i != j {
                cost[i][j] = linalg::trace_distance(&sp.omega[i], &sp.omega[j])?;
            }
        }
    }
    Ok(cost)
}

/// Pairwise fidelities over the rows and columns that carry mass.
pub fn fidelity_costs(sp: &SupportPair) -> Result<Vec<Vec<f64>>> {
    let n = sp.len();
    let mut cost = vec![vec![0.0; n]; n];
    let roots: Vec<Option<ComplexMatrix>> = (0..n)
        .map(|j| if sp.q[j] > 0.0 { mat_sqrt_psd(sp.omega[j].mat()).map(Some) } else { Ok(None) })
        .collect::<Result<_>>()?;
    for i in sp.p_support() {
        for j in sp.q_support() {
            cost[i][j] = if i == j {
                1.0
            } else {
                fidelity_with_sqrt(sp.omega[i].mat(), roots[j].as_ref().expect("column carries mass"))?
            };
        }
    }
    Ok(cost)
}

/// D^K: minimal expected trace distance over couplings of the two ensembles.
pub fn kantorovich_distance(a: &Ensemble, b: &Ensemble) -> Result<KantorovichResult> {
    oriented(a, b, |sp| Ok((distance_costs(sp)?, Sense::Min)))
}

/// F^K: maximal expected fidelity over couplings of the two ensembles.
pub fn kantorovich_fidelity(a: &Ensemble, b: &Ensemble) -> Result<KantorovichResult> {
    oriented(a, b, |sp| Ok((fidelity_costs(sp)?, Sense::Max)))
}

// Solves in the canonical orientation and transposes the coupling back when
// the arguments came in the other order.
fn oriented(
    a: &Ensemble,
    b: &Ensemble,
    costs: impl Fn(&SupportPair) -> Result<(Vec<Vec<f64>>, Sense)>,
) -> Result<KantorovichResult> {
    let swap = canonical_swap(a, b);
    let (first, second) = if swap { (b, a) } else { (a, b) };
    let sp = unify_support(first, second)?;
    let (cost, sense) = costs(&sp)?;
    let lp = transportation_lp(&sp.p, &sp.q, &cost, sense)?;
    let value = lp.value.clamp(0.0, 1.0);
    if !swap {
        return Ok(KantorovichResult { value, coupling: lp.coupling, support: sp, iterations: lp.iterations });
    }
    let target = unify_support(a, b)?;
    let map = support_map(&sp, &target)?;
    let n = target.len();
    let mut table = vec![vec![0.0; n]; n];
    for (i, row) in lp.coupling.table.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            table[map[j]][map[i]] = w;
        }
    }
    Ok(KantorovichResult { value, coupling: Coupling { table }, support: target, iterations: lp.iterations })
}

/// Ensemble {(p_i, ρ_i ⊗ |i⟩⟨i|)} with orthogonal flags.
pub fn flag_ensemble(items: &[(f64, DensityMatrix)]) -> Result<Ensemble> {
    let n = items.len();
    let pairs = items
        .iter()
        .enumerate()
        .map(|(i, (p, rho))| (*p, rho.tensor(&DensityMatrix::basis(n, i))))
        .collect();
    crate::ensembles::make_ensemble(pairs)
}

fn check_flag_lengths(ps: &[(f64, DensityMatrix)], qs: &[(f64, DensityMatrix)]) -> Result<()> {
    if ps.len() != qs.len() {
        return Err(Error::LengthMismatch { left: ps.len(), right: qs.len() });
    }
    Ok(())
}

/// D^K between flagged ensembles: Σ min(p_i, q_i) Δ(ρ_i, σ_i) + ½|p_i − q_i|.
pub fn flagged_closed_form_distance(ps: &[(f64, DensityMatrix)], qs: &[(f64, DensityMatrix)]) -> Result<f64> {
    check_flag_lengths(ps, qs)?;
    ps.iter()
        .zip(qs)
        .map(|((p, rho), (q, sigma))| Ok(p.min(*q) * linalg::trace_distance(rho, sigma)? + 0.5 * (p - q).abs()))
        .sum()
}

/// F^K between flagged ensembles: Σ min(p_i, q_i) F(ρ_i, σ_i).
pub fn flagged_closed_form_fidelity(ps: &[(f64, DensityMatrix)], qs: &[(f64, DensityMatrix)]) -> Result<f64> {
    check_flag_lengths(ps, qs)?;
    ps.iter()
        .zip(qs)
        .map(|((p, rho), (q, sigma))| Ok(p.min(*q) * linalg::fidelity(rho, sigma)?))
        .sum()
}

/// Outcome of a continuity-bound check.
#[derive(Clone, Copy, Debug)]
pub struct BoundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Checks |h̄_P − h̄_Q| ≤ g(D^K) for ensemble averages computed by the caller.
pub fn lemma1_bound(h_bar_p: f64, h_bar_q: f64, dk: f64, g: impl Fn(f64) -> f64) -> BoundCheck {
    let lhs = (h_bar_p - h_bar_q).abs();
    let rhs = g(dk);
    BoundCheck { lhs, rhs, holds: lhs <= rhs + 1e-9 }
}
