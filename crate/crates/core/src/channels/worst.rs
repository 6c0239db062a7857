use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{apply_to_pure, ensemble_distance, ensemble_fidelity, max_entangled, same_dim, GeneralizedMeasurement, Method};
use crate::ehs::SolverOptions;
use crate::{Error, Result};

const FD_STEP: f64 = 1e-5;
const GRAD_TOL: f64 = 1e-6;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;

/// Settings for the worst-case search over input states.
#[derive(Clone, Debug)]
pub struct WorstCaseOptions {
    /// Options for the EHS solver used at each evaluation.
    pub solver: SolverOptions,
    /// Ancilla dimension; `None` means the system dimension.
    pub ancilla_dim: Option<usize>,
    /// Random starts in addition to the maximally entangled one.
    pub restarts: usize,
    /// Ascent steps per start.
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for WorstCaseOptions {
    fn default() -> Self {
        Self { solver: SolverOptions::default(), ancilla_dim: None, restarts: 32, max_steps: 500, seed: 0 }
    }
}

/// Best input found by the search. The value is attained at `state`, so it
/// bounds the true extremum from the inside.
#[derive(Clone, Debug)]
pub struct WorstCase {
    pub value: f64,
    /// Unit vector on A⊗S, ancilla first.
    pub state: Vec<Complex64>,
    /// Total ascent steps over all starts.
    pub steps: usize,
    /// Whether the best start stopped on the gradient criterion.
    pub converged: bool,
}

/// max over pure ψ on A⊗S of the distance between (I⊗M)(ψ) and (I⊗N)(ψ).
pub fn dist_max(m: &GeneralizedMeasurement, n: &GeneralizedMeasurement, method: Method, opts: &WorstCaseOptions) -> Result<WorstCase> {
    search(m, n, opts, |a, b| ensemble_distance(a, b, method, &opts.solver))
}

/// min over pure ψ on A⊗S of the fidelity between (I⊗M)(ψ) and (I⊗N)(ψ).
pub fn fid_min(m: &GeneralizedMeasurement, n: &GeneralizedMeasurement, method: Method, opts: &WorstCaseOptions) -> Result<WorstCase> {
    let mut r = search(m, n, opts, |a, b| Ok(-ensemble_fidelity(a, b, method, &opts.solver)?))?;
    r.value = -r.value;
    Ok(r)
}

struct Run {
    value: f64,
    x: Vec<f64>,
    steps: usize,
    converged: bool,
}

// Multi-start projected ascent of f on the unit sphere of real coordinates
// (re, im interleaved). Starts are |Φ⟩ and Haar-random vectors with seeds
// derived from opts.seed; the best run wins, earliest on ties.
fn search(
    m: &GeneralizedMeasurement,
    n: &GeneralizedMeasurement,
    opts: &WorstCaseOptions,
    f: impl Fn(&crate::ensembles::Ensemble, &crate::ensembles::Ensemble) -> Result<f64>,
) -> Result<WorstCase> {
    same_dim(m, n)?;
    let d = m.dim();
    let da = opts.ancilla_dim.unwrap_or(d);
    if da == 0 {
        return Err(Error::InvalidParams("ancilla dimension must be positive".into()));
    }
    let objective = |x: &[f64]| -> Result<f64> {
        let psi = to_complex(x);
        f(&apply_to_pure(m, &psi)?, &apply_to_pure(n, &psi)?)
    };

    let mut starts = vec![to_real(&embedded_max_entangled(d, da))];
    for r in 0..opts.restarts {
        let seed = opts.seed.wrapping_add((r as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        starts.push(haar_real(2 * d * da, &mut ChaCha8Rng::seed_from_u64(seed)));
    }

    let mut best: Option<Run> = None;
    let mut total_steps = 0;
    for x in starts {
        let run = ascend(&objective, x, opts.max_steps)?;
        total_steps += run.steps;
        if best.as_ref().is_none_or(|b| run.value > b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least one start");
    Ok(WorstCase { value: best.value, state: to_complex(&best.x), steps: total_steps, converged: best.converged })
}

fn ascend(f: &impl Fn(&[f64]) -> Result<f64>, mut x: Vec<f64>, max_steps: usize) -> Result<Run> {
    normalize(&mut x);
    let mut fx = f(&x)?;
    let mut t_prev = f64::INFINITY;
    let mut steps = 0;
    let mut converged = false;
    while steps < max_steps {
        let g = tangent_gradient(f, &x)?;
        let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if gn < GRAD_TOL {
            converged = true;
            break;
        }
        steps += 1;
        let mut t = (2.0 * t_prev).min(0.5 / gn);
        let mut moved = false;
        for _ in 0..MAX_HALVINGS {
            let mut y: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a + t * b).collect();
            normalize(&mut y);
            let fy = f(&y)?;
            if fy >= fx + ARMIJO * t * gn * gn {
                x = y;
                fx = fy;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
        t_prev = t;
    }
    Ok(Run { value: fx, x, steps, converged })
}

// Central differences along each coordinate, evaluated on the sphere, then
// projected onto the tangent space at x.
fn tangent_gradient(f: &impl Fn(&[f64]) -> Result<f64>, x: &[f64]) -> Result<Vec<f64>> {
    let mut g = vec![0.0; x.len()];
    let mut y = x.to_vec();
    for k in 0..x.len() {
        y[k] = x[k] + FD_STEP;
        let up = f(&unit(&y))?;
        y[k] = x[k] - FD_STEP;
        let down = f(&unit(&y))?;
        y[k] = x[k];
        g[k] = (up - down) / (2.0 * FD_STEP);
    }
    let radial: f64 = g.iter().zip(x).map(|(a, b)| a * b).sum();
    for (gk, xk) in g.iter_mut().zip(x) {
        *gk -= radial * xk;
    }
    Ok(g)
}

fn normalize(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    for v in x {
        *v /= n;
    }
}

fn unit(x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    normalize(&mut y);
    y
}

fn to_real(v: &[Complex64]) -> Vec<f64> {
    v.iter().flat_map(|z| [z.re, z.im]).collect()
}

fn to_complex(x: &[f64]) -> Vec<Complex64> {
    x.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

fn haar_real(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..len).map(|_| StandardNormal.sample(rng)).collect();
    normalize(&mut x);
    x
}

// Σ_{j<min(d,da)} |j⟩|j⟩ normalized, on an ancilla of dimension da.
fn embedded_max_entangled(d: usize, da: usize) -> Vec<Complex64> {
    if da == d {
        return max_entangled(d);
    }
    let r = d.min(da);
    let mut v = vec![Complex64::new(0.0, 0.0); da * d];
    for j in 0..r {
        v[j * d + j] = Complex64::new(1.0 / (r as f64).sqrt(), 0.0);
    }
    v
}
