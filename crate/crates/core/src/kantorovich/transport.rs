use std::collections::VecDeque;

use crate::{Error, Result};

/// Optimization direction of a transportation program.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Min,
    Max,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    /// Optimal, with at least one zero-length pivot on the way.
    DegenerateResolved,
}

/// Joint table Π with prescribed row and column sums.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub table: Vec<Vec<f64>>,
}

impl Coupling {
    pub fn row_sums(&self) -> Vec<f64> {
        self.table.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        let n = self.table.first().map_or(0, |r| r.len());
        (0..n).map(|j| self.table.iter().map(|r| r[j]).sum()).collect()
    }

    /// Largest deviation of the marginals from (p, q), or infinity on a shape mismatch.
    pub fn marginal_residual(&self, p: &[f64], q: &[f64]) -> f64 {
        if self.table.len() != p.len() || self.table.iter().any(|r| r.len() != q.len()) {
            return f64::INFINITY;
        }
        let rows = self.row_sums().iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let cols = self.col_sums().iter().zip(q).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let neg = self.table.iter().flatten().fold(0.0f64, |m, &x| m.max(-x));
        rows.max(cols).max(neg)
    }

    /// Σ Π·cost.
    pub fn cost(&self, cost: &[Vec<f64>]) -> f64 {
        self.table
            .iter()
            .zip(cost)
            .map(|(r, c)| r.iter().zip(c).map(|(a, b)| a * b).sum::<f64>())
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub value: f64,
    pub coupling: Coupling,
    pub iterations: usize,
    pub status: LpStatus,
}

/// Exact optimum of Σ Π·cost over couplings of `p` and `q`.
///
/// Transportation simplex: northwest-corner start, potentials from the basis
/// tree, Bland's rule for both entering and leaving cells. Zero-mass rows and
/// columns are removed first and come back as zero rows of the coupling.
pub fn transportation_lp(p: &[f64], q: &[f64], cost: &[Vec<f64>], sense: Sense) -> Result<LpSolution> {
    validate(p, q, cost)?;
    let rows: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0).collect();
    let cols: Vec<usize> = (0..q.len()).filter(|&j| q[j] > 0.0).collect();
    let sign = match sense {
        Sense::Min => 1.0,
        Sense::Max => -1.0,
    };
    let sub_cost: Vec<Vec<f64>> = rows
        .iter()
        .map(|&i| cols.iter().map(|&j| sign * cost[i][j]).collect())
        .collect();
    let supply: Vec<f64> = rows.iter().map(|&i| p[i]).collect();
    let demand: Vec<f64> = cols.iter().map(|&j| q[j]).collect();

    let mut solver = Simplex::new(supply, demand, sub_cost);
    solver.run()?;

    let mut table = vec![vec![0.0; q.len()]; p.len()];
    for (a, &i) in rows.iter().enumerate() {
        for (b, &j) in cols.iter().enumerate() {
            table[i][j] = solver.flow[a * solver.n + b];
        }
    }
    let coupling = Coupling { table };
    Ok(LpSolution {
        value: coupling.cost(cost),
        coupling,
        iterations: solver.pivots,
        status: if solver.degenerate { LpStatus::DegenerateResolved } else { LpStatus::Optimal },
    })
}

fn validate(p: &[f64], q: &[f64], cost: &[Vec<f64>]) -> Result<()> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if cost.len() != p.len() {
        return Err(Error::LengthMismatch { left: p.len(), right: cost.len() });
    }
    for row in cost {
        if row.len() != q.len() {
            return Err(Error::LengthMismatch { left: q.len(), right: row.len() });
        }
        if row.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
    }
    if p.iter().chain(q).any(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(Error::InvalidProbabilities("marginals must be finite and nonnegative".into()));
    }
    let (sp, sq): (f64, f64) = (p.iter().sum(), q.iter().sum());
    if (sp - sq).abs() > 1e-9 || sp <= 0.0 {
        return Err(Error::Infeasible);
    }
    Ok(())
}

struct Simplex {
    m: usize,
    n: usize,
    supply: Vec<f64>,
    demand: Vec<f64>,
    cost: Vec<Vec<f64>>,
    flow: Vec<f64>,
    basic: Vec<bool>,
    pivots: usize,
    degenerate: bool,
}

impl Simplex {
    fn new(supply: Vec<f64>, demand: Vec<f64>, cost: Vec<Vec<f64>>) -> Self {
        let (m, n) = (supply.len(), demand.len());
        Self {
            m,
            n,
            supply,
            demand,
            cost,
            flow: vec![0.0; m * n],
            basic: vec![false; m * n],
            pivots: 0,
            degenerate: false,
        }
    }

    fn run(&mut self) -> Result<()> {
        self.northwest_corner();
        let scale = self.cost.iter().flatten().fold(1.0f64, |m, c| m.max(c.abs()));
        let tol = 1e-12 * scale;
        let cap = 50 * (self.m * self.n + 10) * (self.m + self.n);
        loop {
            let (u, v) = self.potentials();
            let entering = (0..self.m * self.n).find(|&k| {
                !self.basic[k] && self.cost[k / self.n][k % self.n] - u[k / self.n] - v[k % self.n] < -tol
            });
            let Some(enter) = entering else { break };
            self.pivot(enter);
            self.pivots += 1;
            if self.pivots > cap {
                return Err(Error::CycleDetected { pivots: self.pivots });
            }
        }
        self.refresh_flows();
        Ok(())
    }

    fn northwest_corner(&mut self) {
        let mut s = self.supply.clone();
        let mut d = self.demand.clone();
        let (mut i, mut j) = (0, 0);
        loop {
            let x = s[i].min(d[j]);
            self.flow[i * self.n + j] = x;
            self.basic[i * self.n + j] = true;
            s[i] -= x;
            d[j] -= x;
            if i == self.m - 1 && j == self.n - 1 {
                break;
            }
            if i == self.m - 1 {
                j += 1;
            } else if j == self.n - 1 || s[i] <= d[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
    }

    // Tree adjacency over nodes 0..m (rows) and m..m+n (columns).
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.m + self.n];
        for k in 0..self.m * self.n {
            if self.basic[k] {
                let (i, j) = (k / self.n, k % self.n);
                adj[i].push((self.m + j, k));
                adj[self.m + j].push((i, k));
            }
        }
        adj
    }

    fn potentials(&self) -> (Vec<f64>, Vec<f64>) {
        let adj = self.adjacency();
        let mut pot = vec![f64::NAN; self.m + self.n];
        pot[0] = 0.0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(a) = queue.pop_front() {
            for &(b, k) in &adj[a] {
                if pot[b].is_nan() {
                    let c = self.cost[k / self.n][k % self.n];
                    // u_i + v_j = c_ij on basic cells.
                    pot[b] = c - pot[a];
                    queue.push_back(b);
                }
            }
        }
        let u = pot[..self.m].to_vec();
        let v = pot[self.m..].to_vec();
        (u, v)
    }

    fn pivot(&mut self, enter: usize) {
        let (i, j) = (enter / self.n, enter % self.n);
        let adj = self.adjacency();
        // Path from column node j back to row node i through the tree.
        let start = self.m + j;
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.m + self.n];
        let mut seen = vec![false; self.m + self.n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(a) = queue.pop_front() {
            if a == i {
                break;
            }
            for &(b, k) in &adj[a] {
                if !seen[b] {
                    seen[b] = true;
                    parent[b] = Some((a, k));
                    queue.push_back(b);
                }
            }
        }
        let mut path = Vec::new();
        let mut node = i;
        while node != start {
            let (prev, k) = parent[node].expect("basis is a spanning tree");
            path.push(k);
            node = prev;
        }
        path.reverse();
        // path[0] touches column j and loses flow, then signs alternate.
        let mut theta = f64::INFINITY;
        let mut leave = usize::MAX;
        for &k in path.iter().step_by(2) {
            let f = self.flow[k];
            if f < theta || (f == theta && k < leave) {
                theta = f;
                leave = k;
            }
        }
        if theta <= 0.0 {
            self.degenerate = true;
            theta = 0.0;
        }
        for (t, &k) in path.iter().enumerate() {
            if t % 2 == 0 {
                self.flow[k] -= theta;
            } else {
                self.flow[k] += theta;
            }
        }
        self.flow[enter] = theta;
        self.flow[leave] = 0.0;
        self.basic[leave] = false;
        self.basic[enter] = true;
    }

    // Recomputes basic flows from the marginals by peeling leaves of the
    // basis tree, removing drift accumulated over pivots.
    fn refresh_flows(&mut self) {
        let adj = self.adjacency();
        let mut residual: Vec<f64> = self.supply.iter().chain(&self.demand).copied().collect();
        let mut degree: Vec<usize> = adj.iter().map(|a| a.len()).collect();
        let mut used = vec![false; self.m * self.n];
        let mut stack: Vec<usize> = (0..self.m + self.n).filter(|&a| degree[a] == 1).collect();
        for f in &mut self.flow {
            *f = 0.0;
        }
        while let Some(a) = stack.pop() {
            if degree[a] != 1 {
                continue;
            }
            let Some(&(b, k)) = adj[a].iter().find(|&&(_, k)| !used[k]) else { continue };
            let x = residual[a].max(0.0);
            self.flow[k] = x;
            used[k] = true;
            residual[a] -= x;
            residual[b] -= x;
            degree[a] -= 1;
            degree[b] -= 1;
            if degree[b] == 1 {
                stack.push(b);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one() {
        let s = transportation_lp(&[1.0], &[1.0], &[vec![0.3]], Sense::Min).unwrap();
        assert_eq!(s.value, 0.3);
    }

    #[test]
    fn diagonal_optimum() {
        let cost = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let s = transportation_lp(&[0.5, 0.5], &[0.5, 0.5], &cost, Sense::Min).unwrap();
        assert_eq!(s.value, 0.0);
        assert_eq!(s.coupling.table, vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
        let s = transportation_lp(&[0.5, 0.5], &[0.5, 0.5], &cost, Sense::Max).unwrap();
        assert_eq!(s.value, 1.0);
    }

    #[test]
    fn zero_rows_come_back_empty() {
        let cost = vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0], vec![7.0, 8.0, 0.5]];
        let s = transportation_lp(&[0.5, 0.0, 0.5], &[0.0, 0.5, 0.5], &cost, Sense::Min).unwrap();
        assert_eq!(s.coupling.table[1], vec![0.0, 0.0, 0.0]);
        assert!(s.coupling.table.iter().all(|r| r[0] == 0.0));
        assert!((s.value - (0.5 * 2.0 + 0.5 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn unbalanced_is_rejected() {
        let cost = vec![vec![0.0]];
        assert!(matches!(transportation_lp(&[1.0], &[0.5], &cost, Sense::Min), Err(Error::Infeasible)));
    }
}
