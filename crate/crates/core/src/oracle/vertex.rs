use crate::kantorovich::Sense;
use crate::{Error, Result};

const MAX_SIDE: usize = 5;
const FLOW_TOL: f64 = 1e-12;

/// Exact optimum of the transportation program by brute force.
///
/// Every basic solution corresponds to a spanning tree of the complete
/// bipartite graph between rows and columns, and its flows are forced by
/// peeling leaves. All spanning trees are enumerated; the best one with
/// nonnegative flows is the optimum.
pub fn lp_vertex_oracle(p: &[f64], q: &[f64], cost: &[Vec<f64>], sense: Sense) -> Result<f64> {
    let (m, n) = (p.len(), q.len());
    if m == 0 || n == 0 {
        return Err(Error::EmptyEnsemble);
    }
    if m.max(n) > MAX_SIDE {
        return Err(Error::TooLarge { size: m.max(n), limit: MAX_SIDE });
    }
    if cost.len() != m || cost.iter().any(|r| r.len() != n) {
        return Err(Error::LengthMismatch { left: m, right: cost.len() });
    }
    let edges: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let mut search = Search {
        p,
        q,
        cost,
        sense,
        edges: &edges,
        uf: UnionFind::new(m + n),
        chosen: Vec::with_capacity(m + n - 1),
        best: None,
    };
    search.dfs(0);
    search.best.ok_or(Error::Infeasible)
}

struct Search<'a> {
    p: &'a [f64],
    q: &'a [f64],
    cost: &'a [Vec<f64>],
    sense: Sense,
    edges: &'a [(usize, usize)],
    uf: UnionFind,
    chosen: Vec<usize>,
    best: Option<f64>,
}

impl Search<'_> {
    fn dfs(&mut self, next: usize) {
        let need = self.p.len() + self.q.len() - 1;
        if self.chosen.len() == need {
            self.evaluate();
            return;
        }
        if self.edges.len() - next < need - self.chosen.len() {
            return;
        }
        let (i, j) = self.edges[next];
        if let Some(undo) = self.uf.union(i, self.p.len() + j) {
            self.chosen.push(next);
            self.dfs(next + 1);
            self.chosen.pop();
            self.uf.rollback(undo);
        }
        self.dfs(next + 1);
    }

    fn evaluate(&mut self) {
        let m = self.p.len();
        let nodes = m + self.q.len();
        let mut left: Vec<f64> = self.p.iter().chain(self.q).copied().collect();
        let mut degree = vec![0usize; nodes];
        let tree: Vec<(usize, usize)> = self.chosen.iter().map(|&e| (self.edges[e].0, m + self.edges[e].1)).collect();
        for &(a, b) in &tree {
            degree[a] += 1;
            degree[b] += 1;
        }
        let mut done = vec![false; tree.len()];
        let mut value = 0.0;
        for _ in 0..tree.len() {
            // A leaf's single edge must carry the leaf's remaining mass.
            let (k, leaf) = (0..tree.len())
                .filter(|&k| !done[k])
                .find_map(|k| {
                    let (a, b) = tree[k];
                    if degree[a] == 1 {
                        Some((k, a))
                    } else if degree[b] == 1 {
                        Some((k, b))
                    } else {
                        None
                    }
                })
                .expect("a forest always has a leaf");
            let (a, b) = tree[k];
            let other = if leaf == a { b } else { a };
            let flow = left[leaf];
            if flow < -FLOW_TOL {
                return;
            }
            left[other] -= flow;
            left[leaf] = 0.0;
            degree[a] -= 1;
            degree[b] -= 1;
            done[k] = true;
            value += flow * self.cost[a][b - m];
        }
        if left.iter().any(|x| x.abs() > 1e-9) {
            return;
        }
        let better = match (self.best, self.sense) {
            (None, _) => true,
            (Some(b), Sense::Min) => value < b,
            (Some(b), Sense::Max) => value > b,
        };
        if better {
            self.best = Some(value);
        }
    }
}

// Union by size without path compression, so unions can be undone.
struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect(), size: vec![1; n] }
    }

    fn find(&self, mut x: usize) -> usize {
        while self.parent[x] != x {
            x = self.parent[x];
        }
        x
    }

    // Returns the absorbed root, or None when a and b are already joined.
    fn union(&mut self, a: usize, b: usize) -> Option<usize> {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return None;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        Some(rb)
    }

    fn rollback(&mut self, absorbed: usize) {
        let root = self.parent[absorbed];
        self.size[root] -= self.size[absorbed];
        self.parent[absorbed] = absorbed;
    }
}
