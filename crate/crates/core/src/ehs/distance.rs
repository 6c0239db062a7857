use super::{swap_report, DistanceAlgorithm, Restriction, SolveReport, SolverOptions};
use crate::ensembles::{average_state, canonical_swap, DensityMatrix, Ensemble};
use crate::kantorovich::kantorovich_distance;
use crate::linalg::{self, herm_eig, ComplexMatrix};
use crate::lp::DualSimplex;
use crate::Result;

const INITIAL_RATIOS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
const CUT_VIOLATION: f64 = 1e-13;
const GAP_TARGET: f64 = 1e-10;

/// D^EHS: ½ min Σ ‖P(ρ,σ)ρ − Q(ρ,σ)σ‖ over joint pairs.
///
/// The default cutting-plane solver writes each cell term as the support
/// function h(a,b) = max_t [a·α(t) + b·β(t)], with α, β read off the sign
/// matrix of tρ − (1−t)σ, and refines a linear relaxation until the relaxed
/// value meets the best primal value. Both solvers are warm-started from the
/// product table and from the optimal Kantorovich coupling, so the result
/// never exceeds D^K.
pub fn ehs_distance(a: &Ensemble, b: &Ensemble, opts: &SolverOptions) -> Result<SolveReport> {
    if canonical_swap(a, b) {
        return swap_report(solve(b, a, opts)?, a, b);
    }
    solve(a, b, opts)
}

fn solve(a: &Ensemble, b: &Ensemble, opts: &SolverOptions) -> Result<SolveReport> {
    let kd = kantorovich_distance(a, b)?;
    let sp = kd.support.clone();
    let lower = linalg::trace_distance(&average_state(a), &average_state(b))?;
    let restr = Restriction::new(&sp);
    let cells = Cells::new(&sp.omega, &restr, &sp.p, &sp.q);

    let product = cells.product_start();
    let coupling = restr.restrict(&kd.coupling.table);
    let mut best = Candidate { value: cells.objective(&product.0, &product.1)?, a: product.0, b: product.1 };
    let k_value = cells.objective(&coupling, &coupling)?;
    if k_value < best.value {
        best = Candidate { value: k_value, a: coupling.clone(), b: coupling };
    }

    let (iterations, certified, converged) = match opts.algorithm {
        DistanceAlgorithm::CuttingPlane => cutting_plane(&cells, &mut best, opts)?,
        DistanceAlgorithm::ProjectedSubgradient => subgradient(&cells, &mut best, lower, opts)?,
    };

    let value = best.value.min(kd.value).clamp(0.0, 1.0);
    Ok(SolveReport {
        value,
        joint_pair: restr.expand(sp.len(), &best.a, &best.b),
        iterations,
        bracket: (lower, kd.value),
        converged,
        certified_lower: certified,
        support: sp,
    })
}

struct Candidate {
    value: f64,
    a: Vec<Vec<f64>>,
    b: Vec<Vec<f64>>,
}

/// The restricted problem: rows of P with mass, columns of Q with mass.
struct Cells<'a> {
    p: Vec<f64>,
    q: Vec<f64>,
    left: Vec<&'a DensityMatrix>,
    right: Vec<&'a DensityMatrix>,
}

/// Value and subgradient of one cell term at (a, b).
struct CellEval {
    h: f64,
    ga: f64,
    gb: f64,
}

impl<'a> Cells<'a> {
    fn new(omega: &'a [DensityMatrix], restr: &Restriction, p: &[f64], q: &[f64]) -> Self {
        Self {
            p: restr.rows.iter().map(|&i| p[i]).collect(),
            q: restr.cols.iter().map(|&j| q[j]).collect(),
            left: restr.rows.iter().map(|&i| &omega[i]).collect(),
            right: restr.cols.iter().map(|&j| &omega[j]).collect(),
        }
    }

    fn nr(&self) -> usize {
        self.p.len()
    }

    fn nc(&self) -> usize {
        self.q.len()
    }

    fn product_start(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let t: Vec<Vec<f64>> = self.p.iter().map(|&x| self.q.iter().map(|&y| x * y).collect()).collect();
        (t.clone(), t)
    }

    fn operator(&self, r: usize, c: usize, a: f64, b: f64) -> ComplexMatrix {
        &self.left[r].mat().scale(a) - &self.right[c].mat().scale(b)
    }

    fn eval(&self, r: usize, c: usize, a: f64, b: f64) -> Result<CellEval> {
        if a == 0.0 && b == 0.0 {
            return Ok(CellEval { h: 0.0, ga: 0.0, gb: 0.0 });
        }
        let e = herm_eig(&self.operator(r, c, a, b))?;
        let h = 0.5 * e.eigenvalues.iter().map(|x| x.abs()).sum::<f64>();
        let floor = e.noise_floor();
        let s = e.reconstruct_with(|x| {
            if x > floor {
                1.0
            } else if x < -floor {
                -1.0
            } else {
                0.0
            }
        });
        Ok(CellEval {
            h,
            ga: 0.5 * s.trace_product_re(self.left[r].mat()),
            gb: -0.5 * s.trace_product_re(self.right[c].mat()),
        })
    }

    // Supporting line of the cell term along the ray a:b = t:(1−t).
    fn cut(&self, r: usize, c: usize, t: f64) -> Result<(f64, f64)> {
        let e = self.eval(r, c, t, 1.0 - t)?;
        Ok((e.ga, e.gb))
    }

    fn objective(&self, a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
        let mut total = 0.0;
        for r in 0..self.nr() {
            for c in 0..self.nc() {
                let (x, y) = (a[r][c], b[r][c]);
                if x == 0.0 && y == 0.0 {
                    continue;
                }
                total += 0.5 * linalg::trace_norm(&self.operator(r, c, x, y))?;
            }
        }
        Ok(total)
    }
}

fn cutting_plane(cells: &Cells, best: &mut Candidate, opts: &SolverOptions) -> Result<(usize, Option<f64>, bool)> {
    let (nr, nc) = (cells.nr(), cells.nc());
    let k = nr * nc;
    let (va, vb, vz) = (|r: usize, c: usize| r * nc + c, |r: usize, c: usize| k + r * nc + c, |r: usize, c: usize| 2 * k + r * nc + c);

    let mut cost = vec![0.0; 3 * k];
    for z in &mut cost[2 * k..] {
        *z = 1.0;
    }
    let mut lp = DualSimplex::new(cost);
    for r in 0..nr {
        let row: Vec<(usize, f64)> = (0..nc).map(|c| (va(r, c), 1.0)).collect();
        lp.add_equality(&row, cells.p[r], va(r, 0))?;
    }
    for c in 0..nc {
        let col: Vec<(usize, f64)> = (0..nr).map(|r| (vb(r, c), 1.0)).collect();
        lp.add_equality(&col, cells.q[c], vb(0, c))?;
    }
    for r in 0..nr {
        for c in 0..nc {
            for &t in &INITIAL_RATIOS {
                let (alpha, beta) = cells.cut(r, c, t)?;
                lp.add_le(&[(va(r, c), alpha), (vb(r, c), beta), (vz(r, c), -1.0)], 0.0);
            }
        }
    }

    let pivot_budget = 200 * (lp.num_rows() + 3 * k) + 10_000;
    let mut lower = f64::NEG_INFINITY;
    let mut rounds = 0;
    while rounds < opts.max_iter.max(1) {
        rounds += 1;
        lp.solve(pivot_budget)?;
        lower = lower.max(lp.objective());
        let x = lp.primal(3 * k);
        let a: Vec<Vec<f64>> = (0..nr).map(|r| (0..nc).map(|c| x[va(r, c)]).collect()).collect();
        let b: Vec<Vec<f64>> = (0..nr).map(|r| (0..nc).map(|c| x[vb(r, c)]).collect()).collect();

        let mut value = 0.0;
        let mut new_cuts = Vec::new();
        for r in 0..nr {
            for c in 0..nc {
                let e = cells.eval(r, c, a[r][c], b[r][c])?;
                value += e.h;
                if e.h - x[vz(r, c)] > CUT_VIOLATION {
                    new_cuts.push((r, c, e.ga, e.gb));
                }
            }
        }
        if value < best.value {
            *best = Candidate { value, a, b };
        }
        if best.value - lower <= GAP_TARGET || new_cuts.is_empty() {
            break;
        }
        for (r, c, alpha, beta) in new_cuts {
            lp.add_le(&[(va(r, c), alpha), (vb(r, c), beta), (vz(r, c), -1.0)], 0.0);
        }
    }
    let lower = lower.min(best.value);
    Ok((rounds, Some(lower), best.value - lower <= opts.tol))
}

fn subgradient(cells: &Cells, best: &mut Candidate, lower: f64, opts: &SolverOptions) -> Result<(usize, Option<f64>, bool)> {
    let (nr, nc) = (cells.nr(), cells.nc());
    let mut a = best.a.clone();
    let mut b = best.b.clone();
    let mut last_gain = 0;
    let mut iterations = 0;
    for k in 1..=opts.max_iter {
        iterations = k;
        let mut value = 0.0;
        let mut ga = vec![vec![0.0; nc]; nr];
        let mut gb = vec![vec![0.0; nc]; nr];
        for r in 0..nr {
            for c in 0..nc {
                let e = cells.eval(r, c, a[r][c], b[r][c])?;
                value += e.h;
                ga[r][c] = e.ga;
                gb[r][c] = e.gb;
            }
        }
        if value < best.value - 1e-3 * opts.tol {
            last_gain = k;
        }
        if value < best.value {
            *best = Candidate { value, a: a.clone(), b: b.clone() };
        }
        if best.value - lower <= opts.tol || k - last_gain > 1000 {
            break;
        }
        let step = opts.step / (k as f64).sqrt();
        for r in 0..nr {
            let row: Vec<f64> = (0..nc).map(|c| a[r][c] - step * ga[r][c]).collect();
            a[r] = project_simplex(&row, cells.p[r]);
        }
        for c in 0..nc {
            let col: Vec<f64> = (0..nr).map(|r| b[r][c] - step * gb[r][c]).collect();
            for (r, v) in project_simplex(&col, cells.q[c]).into_iter().enumerate() {
                b[r][c] = v;
            }
        }
    }
    let converged = best.value - lower <= opts.tol || iterations - last_gain > 1000;
    Ok((iterations, None, converged))
}

/// Euclidean projection onto {x ≥ 0, Σx = mass} by sorting and thresholding.
pub(crate) fn project_simplex(y: &[f64], mass: f64) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|x, z| z.total_cmp(x));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (j, &v) in u.iter().enumerate() {
        cum += v;
        let t = (cum - mass) / (j + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|&v| (v - theta).max(0.0)).collect()
}
