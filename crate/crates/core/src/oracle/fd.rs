use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::ehs::{JointObjective, JointPair};
use crate::Result;

// Cube root of machine epsilon, relative to the distance to the boundary:
// balances truncation against roundoff for central differences.
const STEP: f64 = 6e-6;
const DENOM_FLOOR: f64 = 1e-6;

/// Summary of a finite-difference check.
#[derive(Clone, Debug)]
pub struct FdReport {
    /// max |analytic − fd| / max(|analytic|, |fd|, 1e-6) over the directions.
    pub max_rel_error: f64,
    pub directions: usize,
    /// Table entries left out because the objective is not smooth there or
    /// the entry sits on the boundary.
    pub skipped: usize,
}

/// Compares the analytic gradient of `obj` with central differences along
/// random directions that keep every row sum of P and column sum of Q fixed.
///
/// Only entries that are positive and at which the objective reports
/// smoothness move; the rest of the direction is zero.
pub fn fd_subgradient_check(obj: &dyn JointObjective, point: &JointPair, directions: usize, seed: u64) -> Result<FdReport> {
    let n = point.len();
    let mut free_p = vec![vec![false; n]; n];
    let mut free_q = vec![vec![false; n]; n];
    let mut skipped = 0;
    for i in 0..n {
        for j in 0..n {
            let smooth = obj.smooth_at(point, i, j)?;
            free_p[i][j] = smooth && point.p_table[i][j] > 0.0;
            free_q[i][j] = smooth && point.q_table[i][j] > 0.0;
            skipped += usize::from(!free_p[i][j]) + usize::from(!free_q[i][j]);
        }
    }

    let grad = obj.gradient(point)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for _ in 0..directions {
        let Some(dir) = random_direction(n, &free_p, &free_q, &mut rng) else { break };
        // Keep the perturbed tables nonnegative.
        let mut room = f64::INFINITY;
        for (x, d) in point.p_table.iter().chain(&point.q_table).flatten().zip(dir.p_table.iter().chain(&dir.q_table).flatten()) {
            if *d != 0.0 {
                room = room.min(x / d.abs());
            }
        }
        let h = STEP * room.min(1.0);
        let up = obj.value(&point.axpy(h, &dir))?;
        let down = obj.value(&point.axpy(-h, &dir))?;
        let fd = (up - down) / (2.0 * h);
        let an = grad.dot(&dir);
        worst = worst.max((an - fd).abs() / an.abs().max(fd.abs()).max(DENOM_FLOOR));
        used += 1;
    }
    Ok(FdReport { max_rel_error: worst, directions: used, skipped })
}

// Gaussian entries on the free cells, centred within each row of P and each
// column of Q, scaled to unit max-norm. None if nothing can move.
fn random_direction(n: usize, free_p: &[Vec<bool>], free_q: &[Vec<bool>], rng: &mut ChaCha8Rng) -> Option<JointPair> {
    let mut dir = JointPair::zeros(n);
    for i in 0..n {
        let cells: Vec<usize> = (0..n).filter(|&j| free_p[i][j]).collect();
        if cells.len() < 2 {
            continue;
        }
        let w: Vec<f64> = cells.iter().map(|_| StandardNormal.sample(rng)).collect();
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        for (&j, v) in cells.iter().zip(&w) {
            dir.p_table[i][j] = v - mean;
        }
    }
    for j in 0..n {
        let cells: Vec<usize> = (0..n).filter(|&i| free_q[i][j]).collect();
        if cells.len() < 2 {
            continue;
        }
        let w: Vec<f64> = cells.iter().map(|_| StandardNormal.sample(rng)).collect();
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        for (&i, v) in cells.iter().zip(&w) {
            dir.q_table[i][j] = v - mean;
        }
    }
    let scale = dir.p_table.iter().chain(&dir.q_table).flatten().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    Some(dir.axpy(1.0 / scale - 1.0, &dir))
}
