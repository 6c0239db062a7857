//! Extended-Hilbert-space distance and fidelity.
//!
//! Both measures are optimized over pairs of joint tables P(ρ,σ), Q(ρ,σ) on
//! Ω×Ω whose left (resp. right) marginal is the first (resp. second)
//! ensemble. The pointer states never appear explicitly.

mod decomposition;
mod distance;
mod fidelity;

pub use decomposition::{pure_ensemble_fidelity, theorem4_decomposition, Theorem4Decomposition};
pub use distance::ehs_distance;
pub use fidelity::{ehs_bures, ehs_fidelity};

use crate::ensembles::{support_map, unify_support, Ensemble, SupportPair};
use crate::linalg::{self, herm_eig, sign_matrix, ComplexMatrix};
use crate::Result;

/// Pair of joint tables indexed by Ω×Ω.
#[derive(Clone, Debug, PartialEq)]
pub struct JointPair {
    pub p_table: Vec<Vec<f64>>,
    pub q_table: Vec<Vec<f64>>,
}

impl JointPair {
    pub fn zeros(n: usize) -> Self {
        Self { p_table: vec![vec![0.0; n]; n], q_table: vec![vec![0.0; n]; n] }
    }

    pub fn len(&self) -> usize {
        self.p_table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p_table.is_empty()
    }

    /// P(ρ,σ) = Q(ρ,σ) = P(ρ)Q(σ).
    pub fn product(p: &[f64], q: &[f64]) -> Self {
        let t: Vec<Vec<f64>> = p.iter().map(|&a| q.iter().map(|&b| a * b).collect()).collect();
        Self { p_table: t.clone(), q_table: t }
    }

    /// Both tables equal to one coupling.
    pub fn from_coupling(table: &[Vec<f64>]) -> Self {
        Self { p_table: table.to_vec(), q_table: table.to_vec() }
    }

    /// Worst violation of the marginal and sign constraints.
    pub fn marginal_residual(&self, p: &[f64], q: &[f64]) -> f64 {
        let n = p.len();
        if self.len() != n || q.len() != n {
            return f64::INFINITY;
        }
        let mut r: f64 = 0.0;
        for i in 0..n {
            r = r.max((self.p_table[i].iter().sum::<f64>() - p[i]).abs());
            r = r.max((self.q_table.iter().map(|row| row[i]).sum::<f64>() - q[i]).abs());
        }
        for x in self.p_table.iter().chain(&self.q_table).flatten() {
            r = r.max(-x);
        }
        r
    }

    /// Σ over both tables of entrywise products, treating the pair as one vector.
    pub fn dot(&self, other: &Self) -> f64 {
        let part = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> f64 {
            a.iter().flatten().zip(b.iter().flatten()).map(|(x, y)| x * y).sum()
        };
        part(&self.p_table, &other.p_table) + part(&self.q_table, &other.q_table)
    }

    /// self + t·dir.
    pub fn axpy(&self, t: f64, dir: &Self) -> Self {
        let mix = |a: &Vec<Vec<f64>>, b: &Vec<Vec<f64>>| -> Vec<Vec<f64>> {
            a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + t * y).collect()).collect()
        };
        Self { p_table: mix(&self.p_table, &dir.p_table), q_table: mix(&self.q_table, &dir.q_table) }
    }
}

/// Algorithm used for the distance program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DistanceAlgorithm {
    /// Kelley cutting planes on the exact support-function description of each
    /// cell; returns a certified lower bound alongside the primal value.
    CuttingPlane,
    /// Projected subgradient descent with steps c/√k and best-iterate tracking.
    ProjectedSubgradient,
}

/// Options shared by the EHS solvers.
#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Target accuracy used for the `converged` flag.
    pub tol: f64,
    /// Iteration cap: subgradient steps, cutting-plane rounds or ascent sweeps.
    pub max_iter: usize,
    /// Random restarts of the fidelity ascent.
    pub restarts: usize,
    pub seed: u64,
    pub algorithm: DistanceAlgorithm,
    /// Step constant c in c/√k for the subgradient method.
    pub step: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iter: 5000,
            restarts: 8,
            seed: 0,
            algorithm: DistanceAlgorithm::CuttingPlane,
            step: 0.5,
        }
    }
}

/// Result of an EHS optimization.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub value: f64,
    /// Optimizer over `support.omega`.
    pub joint_pair: JointPair,
    pub iterations: usize,
    /// (Δ(ρ̄_P,ρ̄_Q), D^K) for the distance, (F^K, F(ρ̄_P,ρ̄_Q)) for the fidelity.
    pub bracket: (f64, f64),
    pub converged: bool,
    /// Lower bound on the distance proven by the cutting-plane solver.
    pub certified_lower: Option<f64>,
    pub support: SupportPair,
}

/// Objective over joint pairs with an analytic (sub)gradient.
pub trait JointObjective {
    fn value(&self, jp: &JointPair) -> Result<f64>;
    fn gradient(&self, jp: &JointPair) -> Result<JointPair>;
    /// Whether cell (i, j) is a point of differentiability; finite-difference
    /// checks skip cells that are not.
    fn smooth_at(&self, _jp: &JointPair, _i: usize, _j: usize) -> Result<bool> {
        Ok(true)
    }
}

/// ½ Σ ‖P(ρ,σ)ρ − Q(ρ,σ)σ‖ over a fixed support.
pub struct DistanceObjective<'a> {
    pub support: &'a SupportPair,
}

fn cell_operator(sp: &SupportPair, jp: &JointPair, i: usize, j: usize) -> ComplexMatrix {
    &sp.omega[i].mat().scale(jp.p_table[i][j]) - &sp.omega[j].mat().scale(jp.q_table[i][j])
}

impl JointObjective for DistanceObjective<'_> {
    fn value(&self, jp: &JointPair) -> Result<f64> {
        let n = self.support.len();
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (jp.p_table[i][j], jp.q_table[i][j]);
                if a == 0.0 && b == 0.0 {
                    continue;
                }
                total += 0.5 * linalg::trace_norm(&cell_operator(self.support, jp, i, j))?;
            }
        }
        Ok(total)
    }

    fn gradient(&self, jp: &JointPair) -> Result<JointPair> {
        let sp = self.support;
        let n = sp.len();
        let mut g = JointPair::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let s = sign_matrix(&cell_operator(sp, jp, i, j))?;
                g.p_table[i][j] = 0.5 * s.trace_product_re(sp.omega[i].mat());
                g.q_table[i][j] = -0.5 * s.trace_product_re(sp.omega[j].mat());
            }
        }
        Ok(g)
    }

    fn smooth_at(&self, jp: &JointPair, i: usize, j: usize) -> Result<bool> {
        let a = cell_operator(self.support, jp, i, j);
        let e = herm_eig(&a)?;
        let scale = e.eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        Ok(scale > 0.0 && e.eigenvalues.iter().all(|x| x.abs() > 1e-6 * scale))
    }
}

/// Σ √(P(ρ,σ)Q(ρ,σ)) F(ρ,σ) over a fixed support.
pub struct FidelityObjective {
    pub fid: Vec<Vec<f64>>,
}

impl FidelityObjective {
    /// Pairwise fidelities over every cell of Ω×Ω.
    pub fn new(sp: &SupportPair) -> Result<Self> {
        let n = sp.len();
        let mut fid = vec![vec![0.0; n]; n];
        for j in 0..n {
            let root = linalg::mat_sqrt_psd(sp.omega[j].mat())?;
            for i in 0..n {
                fid[i][j] = if i == j { 1.0 } else { linalg::fidelity_with_sqrt(sp.omega[i].mat(), &root)? };
            }
        }
        Ok(Self { fid })
    }
}

impl JointObjective for FidelityObjective {
    fn value(&self, jp: &JointPair) -> Result<f64> {
        Ok(fidelity_value(&jp.p_table, &jp.q_table, &self.fid))
    }

    fn gradient(&self, jp: &JointPair) -> Result<JointPair> {
        let n = self.fid.len();
        let mut g = JointPair::zeros(n);
        for i in 0..n {
            for j in 0..n {
                let (a, b, f) = (jp.p_table[i][j], jp.q_table[i][j], self.fid[i][j]);
                if a > 0.0 && b > 0.0 {
                    g.p_table[i][j] = 0.5 * (b / a).sqrt() * f;
                    g.q_table[i][j] = 0.5 * (a / b).sqrt() * f;
                }
            }
        }
        Ok(g)
    }

    fn smooth_at(&self, jp: &JointPair, i: usize, j: usize) -> Result<bool> {
        Ok(jp.p_table[i][j] > 0.0 && jp.q_table[i][j] > 0.0)
    }
}

pub(crate) fn fidelity_value(a: &[Vec<f64>], b: &[Vec<f64>], fid: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for (i, row) in fid.iter().enumerate() {
        for (j, &f) in row.iter().enumerate() {
            let w = a[i][j] * b[i][j];
            if w > 0.0 {
                total += w.sqrt() * f;
            }
        }
    }
    total
}

// Rewrites a report computed for (b, a) as one for (a, b): the roles of the
// two tables exchange and both are transposed onto the (a, b) support.
pub(crate) fn swap_report(r: SolveReport, a: &Ensemble, b: &Ensemble) -> Result<SolveReport> {
    let target = unify_support(a, b)?;
    let map = support_map(&r.support, &target)?;
    let mut jp = JointPair::zeros(target.len());
    for i in 0..r.support.len() {
        for j in 0..r.support.len() {
            jp.p_table[map[j]][map[i]] = r.joint_pair.q_table[i][j];
            jp.q_table[map[j]][map[i]] = r.joint_pair.p_table[i][j];
        }
    }
    Ok(SolveReport { joint_pair: jp, support: target, ..r })
}

/// Rows of P and columns of Q that carry mass; everything else stays zero.
pub(crate) struct Restriction {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Restriction {
    pub fn new(sp: &SupportPair) -> Self {
        Self { rows: sp.p_support(), cols: sp.q_support() }
    }

    pub fn expand(&self, n: usize, a: &[Vec<f64>], b: &[Vec<f64>]) -> JointPair {
        let mut jp = JointPair::zeros(n);
        for (r, &i) in self.rows.iter().enumerate() {
            for (c, &j) in self.cols.iter().enumerate() {
                jp.p_table[i][j] = a[r][c];
                jp.q_table[i][j] = b[r][c];
            }
        }
        jp
    }

    pub fn restrict(&self, table: &[Vec<f64>]) -> Vec<Vec<f64>> {
        self.rows.iter().map(|&i| self.cols.iter().map(|&j| table[i][j]).collect()).collect()
    }
}
