use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ehs::JointPair;
use crate::ensembles::{unify_support, Ensemble};
use crate::kantorovich::Coupling;
use crate::linalg::{helstrom_pmax, ComplexMatrix};
use crate::{Error, Result};

const FEASIBILITY_TOL: f64 = 1e-8;

/// Outcome of a Monte Carlo discrimination game.
#[derive(Clone, Debug, PartialEq)]
pub struct GameResult {
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub stderr: f64,
}

impl GameResult {
    pub fn from_counts(trials: u64, successes: u64) -> Self {
        let estimate = if trials == 0 { 0.0 } else { successes as f64 / trials as f64 };
        let stderr = if trials == 0 { 0.0 } else { (estimate * (1.0 - estimate) / trials as f64).sqrt() };
        Self { trials, successes, estimate, stderr }
    }

    /// 2·estimate − 1, the implied distance.
    pub fn implied_distance(&self) -> f64 {
        2.0 * self.estimate - 1.0
    }
}

// One announced pair: selection weight, prior of the left state, and Bob's
// probabilities of guessing correctly given each sent state.
struct Round {
    weight: f64,
    prior: f64,
    hit_left: f64,
    hit_right: f64,
}

fn play(rounds: &[Round], trials: u64, seed: u64) -> GameResult {
    let mut cumulative = Vec::with_capacity(rounds.len());
    let mut acc = 0.0;
    for r in rounds {
        acc += r.weight;
        cumulative.push(acc);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    for _ in 0..trials {
        let u = rng.random::<f64>() * acc;
        let k = cumulative.partition_point(|&c| c <= u).min(rounds.len() - 1);
        let r = &rounds[k];
        let hit = if rng.random::<f64>() < r.prior { r.hit_left } else { r.hit_right };
        if rng.random::<f64>() < hit {
            successes += 1;
        }
    }
    GameResult::from_counts(trials, successes)
}

// Born probabilities of Bob's correct guess under the Helstrom measurement.
fn hits(proj: &ComplexMatrix, rho: &ComplexMatrix, sigma: &ComplexMatrix) -> (f64, f64) {
    let left = proj.trace_product_re(rho).clamp(0.0, 1.0);
    let right = (1.0 - proj.trace_product_re(sigma)).clamp(0.0, 1.0);
    (left, right)
}

/// Alice draws (ρ,σ) from the coupling, announces it, and sends one of the
/// two with equal probability; Bob answers with the Helstrom measurement.
/// With an optimal coupling, 2·estimate − 1 estimates D^K.
///
/// The coupling is indexed by the merged support of `a` and `b`.
pub fn simulate_kantorovich_game(a: &Ensemble, b: &Ensemble, coupling: &Coupling, trials: u64, seed: u64) -> Result<GameResult> {
    let sp = unify_support(a, b)?;
    let residual = if coupling.table.len() == sp.len() && coupling.table.iter().all(|r| r.len() == sp.len()) {
        coupling.marginal_residual(&sp.p, &sp.q)
    } else {
        f64::INFINITY
    };
    if !(residual <= FEASIBILITY_TOL) {
        return Err(Error::InfeasibleCoupling { residual });
    }
    let mut rounds = Vec::new();
    for (i, row) in coupling.table.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            let h = helstrom_pmax(&sp.omega[i], &sp.omega[j], 0.5)?;
            let (hit_left, hit_right) = hits(&h.projector, sp.omega[i].mat(), sp.omega[j].mat());
            rounds.push(Round { weight: w, prior: 0.5, hit_left, hit_right });
        }
    }
    Ok(play(&rounds, trials, seed))
}

/// Alice announces (ρ,σ) with probability (P(ρ,σ) + Q(ρ,σ))/2 and then sends
/// ρ with probability P/(P+Q), otherwise σ; Bob answers with the Helstrom
/// measurement for those priors. 2·estimate − 1 estimates the EHS distance
/// objective at the joint pair.
pub fn simulate_ehs_game(a: &Ensemble, b: &Ensemble, jp: &JointPair, trials: u64, seed: u64) -> Result<GameResult> {
    let sp = unify_support(a, b)?;
    let residual = if jp.len() == sp.len() { jp.marginal_residual(&sp.p, &sp.q) } else { f64::INFINITY };
    if !(residual <= FEASIBILITY_TOL) {
        return Err(Error::InfeasibleJointPair { residual });
    }
    let mut rounds = Vec::new();
    for i in 0..sp.len() {
        for j in 0..sp.len() {
            let (pw, qw) = (jp.p_table[i][j].max(0.0), jp.q_table[i][j].max(0.0));
            if pw + qw <= 0.0 {
                continue;
            }
            let prior = pw / (pw + qw);
            let h = helstrom_pmax(&sp.omega[i], &sp.omega[j], prior)?;
            let (hit_left, hit_right) = hits(&h.projector, sp.omega[i].mat(), sp.omega[j].mat());
            rounds.push(Round { weight: 0.5 * (pw + qw), prior, hit_left, hit_right });
        }
    }
    Ok(play(&rounds, trials, seed))
}
