use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{fidelity_value, swap_report, Restriction, SolveReport, SolverOptions};
use crate::ensembles::{average_state, canonical_swap, Ensemble};
use crate::kantorovich::{fidelity_costs, kantorovich_fidelity};
use crate::linalg;
use crate::Result;

const SWEEP_CAP: usize = 2000;
const SWEEP_TOL: f64 = 1e-10;

/// F^EHS: max Σ √(P(ρ,σ)Q(ρ,σ)) F(ρ,σ) over joint pairs.
///
/// Block coordinate ascent: with Q fixed, each row of P has the closed-form
/// optimum P(ρ,σ) ∝ Q(ρ,σ)F(ρ,σ)², and symmetrically for the columns of Q.
/// Starts from the product table, the Kantorovich coupling and
/// `opts.restarts` random tables, keeping the best run.
pub fn ehs_fidelity(a: &Ensemble, b: &Ensemble, opts: &SolverOptions) -> Result<SolveReport> {
    if canonical_swap(a, b) {
        return swap_report(solve(b, a, opts)?, a, b);
    }
    solve(a, b, opts)
}

fn solve(a: &Ensemble, b: &Ensemble, opts: &SolverOptions) -> Result<SolveReport> {
    let kf = kantorovich_fidelity(a, b)?;
    let sp = kf.support.clone();
    let upper = linalg::fidelity(&average_state(a), &average_state(b))?;
    let restr = Restriction::new(&sp);
    let fid = restr.restrict(&fidelity_costs(&sp)?);
    let p: Vec<f64> = restr.rows.iter().map(|&i| sp.p[i]).collect();
    let q: Vec<f64> = restr.cols.iter().map(|&j| sp.q[j]).collect();
    let coupling = restr.restrict(&kf.coupling.table);

    let run = maximize(&p, &q, &fid, &coupling, opts);
    Ok(SolveReport {
        value: run.value.max(kf.value).clamp(0.0, 1.0),
        joint_pair: restr.expand(sp.len(), &run.a, &run.b),
        iterations: run.sweeps,
        bracket: (kf.value, upper),
        converged: run.converged,
        certified_lower: None,
        support: sp,
    })
}

/// Bures distance √(1 − F^EHS) and angle arccos F^EHS.
pub fn ehs_bures(a: &Ensemble, b: &Ensemble, opts: &SolverOptions) -> Result<(f64, f64)> {
    let f = ehs_fidelity(a, b, opts)?.value;
    Ok(((1.0 - f).max(0.0).sqrt(), f.clamp(-1.0, 1.0).acos()))
}

pub(crate) struct AscentRun {
    pub value: f64,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Best ascent run over the deterministic and random starting points.
pub(crate) fn maximize(p: &[f64], q: &[f64], fid: &[Vec<f64>], coupling: &[Vec<f64>], opts: &SolverOptions) -> AscentRun {
    let product: Vec<Vec<f64>> = p.iter().map(|&x| q.iter().map(|&y| x * y).collect()).collect();
    let cap = opts.max_iter.clamp(1, SWEEP_CAP);
    let mut best = ascend(p, q, fid, product.clone(), product, cap);
    let warm = ascend(p, q, fid, coupling.to_vec(), coupling.to_vec(), cap);
    if warm.value > best.value {
        best = warm;
    }
    for restart in 0..opts.restarts {
        let seed = opts.seed.wrapping_add((restart as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (a, b) = random_tables(p, q, &mut rng);
        let run = ascend(p, q, fid, a, b, cap);
        if run.value > best.value {
            best = run;
        }
    }
    best
}

fn random_tables(p: &[f64], q: &[f64], rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let (nr, nc) = (p.len(), q.len());
    let mut draw = || -> f64 { -(1.0 - rng.random::<f64>()).ln() };
    let mut a = vec![vec![0.0; nc]; nr];
    for r in 0..nr {
        let w: Vec<f64> = (0..nc).map(|_| draw()).collect();
        let s: f64 = w.iter().sum();
        for c in 0..nc {
            a[r][c] = p[r] * w[c] / s;
        }
    }
    let mut b = vec![vec![0.0; nc]; nr];
    for c in 0..nc {
        let w: Vec<f64> = (0..nr).map(|_| draw()).collect();
        let s: f64 = w.iter().sum();
        for r in 0..nr {
            b[r][c] = q[c] * w[r] / s;
        }
    }
    (a, b)
}

fn ascend(p: &[f64], q: &[f64], fid: &[Vec<f64>], mut a: Vec<Vec<f64>>, mut b: Vec<Vec<f64>>, cap: usize) -> AscentRun {
    let (nr, nc) = (p.len(), q.len());
    let mut value = fidelity_value(&a, &b, fid);
    let mut sweeps = 0;
    let mut converged = false;
    while sweeps < cap {
        sweeps += 1;
        for r in 0..nr {
            let w: Vec<f64> = (0..nc).map(|c| b[r][c] * fid[r][c] * fid[r][c]).collect();
            let s: f64 = w.iter().sum();
            for c in 0..nc {
                a[r][c] = if s > 0.0 { p[r] * w[c] / s } else { p[r] / nc as f64 };
            }
        }
        for c in 0..nc {
            let w: Vec<f64> = (0..nr).map(|r| a[r][c] * fid[r][c] * fid[r][c]).collect();
            let s: f64 = w.iter().sum();
            for r in 0..nr {
                b[r][c] = if s > 0.0 { q[c] * w[r] / s } else { q[c] / nr as f64 };
            }
        }
        let next = fidelity_value(&a, &b, fid);
        let gain = next - value;
        value = value.max(next);
        if gain < SWEEP_TOL {
            converged = true;
            break;
        }
    }
    AscentRun { value, a, b, sweeps, converged }
}
