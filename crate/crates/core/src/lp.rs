//! Small dense dual simplex used by the cutting-plane EHS distance solver.
//!
//! Every variable is nonnegative. The tableau is kept in dictionary form
//! (x_B + T x_N = rhs) and must stay dual feasible, which holds when the
//! caller starts from a basis whose reduced costs are nonnegative. Rows added
//! later enter with their slack basic, so dual feasibility is preserved and a
//! few dual pivots restore primal feasibility.

use crate::{Error, Result};

const PRIMAL_TOL: f64 = 1e-11;
const PIVOT_TOL: f64 = 1e-11;

pub(crate) struct DualSimplex {
    cost: Vec<f64>,
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    row_of: Vec<Option<usize>>,
    reduced: Vec<f64>,
    pub(crate) pivots: usize,
}

impl DualSimplex {
    /// Problem over `cost.len()` structural variables, with no constraints yet.
    /// Costs must be nonnegative so that the empty basis is dual feasible.
    pub(crate) fn new(cost: Vec<f64>) -> Self {
        debug_assert!(cost.iter().all(|&c| c >= 0.0));
        let n = cost.len();
        Self {
            reduced: cost.clone(),
            cost,
            rows: Vec::new(),
            rhs: Vec::new(),
            basis: Vec::new(),
            row_of: vec![None; n],
            pivots: 0,
        }
    }

    fn ncols(&self) -> usize {
        self.cost.len()
    }

    // Expresses a raw constraint row in terms of the nonbasic variables.
    fn reduce_row(&self, row: &mut [f64], rhs: &mut f64) {
        for (r, &b) in self.basis.iter().enumerate() {
            let coef = row[b];
            if coef != 0.0 {
                for (x, t) in row.iter_mut().zip(&self.rows[r]) {
                    *x -= coef * t;
                }
                *rhs -= coef * self.rhs[r];
                row[b] = 0.0;
            }
        }
    }

    /// Adds Σ a_k x_k = rhs and makes `basic` (which must have zero reduced
    /// cost) the basic variable of the new row.
    pub(crate) fn add_equality(&mut self, coeffs: &[(usize, f64)], rhs: f64, basic: usize) -> Result<()> {
        let mut row = vec![0.0; self.ncols()];
        for &(k, a) in coeffs {
            row[k] += a;
        }
        let mut rhs = rhs;
        self.reduce_row(&mut row, &mut rhs);
        if row[basic].abs() < PIVOT_TOL {
            return Err(Error::Infeasible);
        }
        self.rows.push(row);
        self.rhs.push(rhs);
        self.basis.push(usize::MAX);
        let r = self.rows.len() - 1;
        self.pivot(r, basic);
        Ok(())
    }

    /// Adds Σ a_k x_k ≤ rhs through a new basic slack. Returns the slack index.
    pub(crate) fn add_le(&mut self, coeffs: &[(usize, f64)], rhs: f64) -> usize {
        let slack = self.ncols();
        for row in &mut self.rows {
            row.push(0.0);
        }
        self.cost.push(0.0);
        self.reduced.push(0.0);
        self.row_of.push(None);
        let mut row = vec![0.0; slack + 1];
        for &(k, a) in coeffs {
            row[k] += a;
        }
        let mut rhs = rhs;
        self.reduce_row(&mut row, &mut rhs);
        row[slack] = 1.0;
        self.rows.push(row);
        self.rhs.push(rhs);
        self.basis.push(slack);
        self.row_of[slack] = Some(self.rows.len() - 1);
        slack
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for x in &mut self.rows[r] {
            *x /= piv;
        }
        self.rhs[r] /= piv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r];
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for (x, t) in self.rows[i].iter_mut().zip(&pivot_row) {
                    *x -= f * t;
                }
                self.rows[i][c] = 0.0;
                self.rhs[i] -= f * pivot_rhs;
            }
        }
        let f = self.reduced[c];
        if f != 0.0 {
            for (x, t) in self.reduced.iter_mut().zip(&pivot_row) {
                *x -= f * t;
            }
            self.reduced[c] = 0.0;
        }
        let old = self.basis[r];
        if old != usize::MAX {
            self.row_of[old] = None;
        }
        self.basis[r] = c;
        self.row_of[c] = Some(r);
    }

    /// Runs dual simplex pivots until the basis is primal feasible.
    pub(crate) fn solve(&mut self, max_pivots: usize) -> Result<()> {
        let start = self.pivots;
        loop {
            // Most infeasible row first; fall back to the lowest index after
            // a long run so that degenerate cycling cannot persist.
            let bland = self.pivots - start > max_pivots / 2;
            let mut leave = None;
            let mut worst = -PRIMAL_TOL;
            for (r, &v) in self.rhs.iter().enumerate() {
                if v < worst {
                    leave = Some(r);
                    if bland {
                        break;
                    }
                    worst = v;
                }
            }
            let Some(r) = leave else { return Ok(()) };

            let mut enter = None;
            let mut best_ratio = f64::INFINITY;
            let mut best_mag = 0.0;
            for (c, &a) in self.rows[r].iter().enumerate() {
                if a < -PIVOT_TOL && self.row_of[c].is_none() {
                    let ratio = self.reduced[c].max(0.0) / -a;
                    let better = ratio < best_ratio - 1e-13
                        || (!bland && ratio <= best_ratio + 1e-13 && -a > best_mag);
                    if better {
                        best_ratio = ratio;
                        best_mag = -a;
                        enter = Some(c);
                    }
                }
            }
            let Some(c) = enter else { return Err(Error::Infeasible) };
            self.pivot(r, c);
            self.pivots += 1;
            if self.pivots - start > max_pivots {
                return Err(Error::CycleDetected { pivots: self.pivots - start });
            }
        }
    }

    /// Values of the first `n` variables at the current basis.
    pub(crate) fn primal(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < n {
                x[b] = self.rhs[r].max(0.0);
            }
        }
        x
    }

    pub(crate) fn objective(&self) -> f64 {
        self.basis.iter().zip(&self.rhs).map(|(&b, &v)| self.cost[b] * v).sum()
    }

    pub(crate) fn num_rows(&self) -> usize {
        self.rows.len()
    }
}
