//! Exact transportation solver: primal network simplex on the complete
//! bipartite graph, started from an artificial-root spanning tree.
//!
//! The tree is kept strongly feasible (every zero-flow tree arc points toward
//! the root) by choosing the last blocking arc along the pivot cycle, which
//! rules out cycling on the heavily degenerate assignment-like instances that
//! uniform class weights produce.

use ndarray::{Array2, ArrayView1, ArrayView2};

use super::assignment::solve_assignment;
use super::{CostMatrix, CouplingMatrix, DiscreteMeasure};
use crate::error::{invalid, PotdError, Result};

const MASS_TOLERANCE: f64 = 1e-9;
const NONE: usize = usize::MAX;

/// Minimum-cost coupling between `mu` and `nu` for the given cost matrix.
///
/// Uniform measures of equal size take the assignment fast path, so the
/// returned plan is a permutation matrix scaled by `1/n`.
pub fn exact_ot(mu: &DiscreteMeasure, nu: &DiscreteMeasure, cost: &CostMatrix) -> Result<CouplingMatrix> {
    let (n, m) = cost.dim();
    if n != mu.len() || m != nu.len() {
        return invalid(format!(
            "cost is {}x{} but measures have {} and {} points",
            n,
            m,
            mu.len(),
            nu.len()
        ));
    }
    if n == m && mu.is_uniform() && nu.is_uniform() {
        let perm = solve_assignment(cost.entries())?;
        let w = 1.0 / n as f64;
        let mut g = Array2::zeros((n, n));
        for (row, &col) in perm.iter().enumerate() {
            g[[row, col]] = w;
        }
        return Ok(CouplingMatrix::with_marginals(
            g,
            mu.weights().to_owned(),
            nu.weights().to_owned(),
        ));
    }
    let g = transport_simplex(mu.weights(), nu.weights(), cost.entries())?;
    Ok(CouplingMatrix::with_marginals(
        g,
        mu.weights().to_owned(),
        nu.weights().to_owned(),
    ))
}

/// Solve the balanced transportation problem with supplies `a`, demands `b`
/// and cost `c` by network simplex. Returns the optimal flow matrix.
pub fn transport_simplex(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>, c: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let (n, m) = c.dim();
    if a.len() != n || b.len() != m {
        return invalid(format!(
            "cost is {}x{} but marginals have lengths {} and {}",
            n,
            m,
            a.len(),
            b.len()
        ));
    }
    if n == 0 || m == 0 {
        return invalid("empty transport problem");
    }
    if a.iter().chain(b.iter()).any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return invalid("marginals must be finite and nonnegative");
    }
    if c.iter().any(|v| !v.is_finite()) {
        return invalid("non-finite cost entry");
    }
    let (sa, sb) = (a.sum(), b.sum());
    if (sa - sb).abs() > MASS_TOLERANCE {
        return invalid(format!("infeasible marginals: supplies sum to {sa}, demands to {sb}"));
    }
    if !(sa > 0.0) {
        return invalid("marginals carry no mass");
    }
    // absorb the residual rounding imbalance into the demands
    let b_scaled: Vec<f64> = b.iter().map(|&x| x * (sa / sb)).collect();
    let mut solver = Simplex::new(a.to_vec(), b_scaled, c);
    solver.run()?;
    solver.flows()
}

struct Simplex<'a> {
    n: usize,
    m: usize,
    cost: ArrayView2<'a, f64>,
    art_cost: f64,
    root: usize,
    flow: Vec<f64>,
    in_tree: Vec<bool>,
    art_toward_root: Vec<bool>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    depth: Vec<usize>,
    pi: Vec<f64>,
    children: Vec<Vec<usize>>,
    next_arc: usize,
    block: usize,
    tol: f64,
}

impl<'a> Simplex<'a> {
    fn new(a: Vec<f64>, b: Vec<f64>, cost: ArrayView2<'a, f64>) -> Self {
        let (n, m) = cost.dim();
        let max_cost = cost.iter().copied().fold(0.0, f64::max);
        let nodes = n + m + 1;
        let root = n + m;
        let real = n * m;
        let art_cost = (max_cost + 1.0) * nodes as f64;
        let mut s = Simplex {
            n,
            m,
            cost,
            art_cost,
            root,
            flow: vec![0.0; real + n + m],
            in_tree: vec![false; real + n + m],
            art_toward_root: vec![true; n + m],
            parent: vec![NONE; nodes],
            pred: vec![NONE; nodes],
            depth: vec![0; nodes],
            pi: vec![0.0; nodes],
            children: vec![Vec::new(); nodes],
            next_arc: 0,
            block: ((real as f64).sqrt().ceil() as usize).max(10),
            tol: 1e-12 * (max_cost + 1.0),
        };
        for node in 0..n + m {
            let arc = real + node;
            let supply = if node < n { a[node] } else { -b[node - n] };
            s.flow[arc] = supply.abs();
            // arcs point toward the root unless they carry demand into a sink
            s.art_toward_root[node] = supply >= 0.0;
            s.in_tree[arc] = true;
            s.parent[node] = root;
            s.pred[node] = arc;
            s.depth[node] = 1;
            s.children[root].push(node);
            s.pi[node] = if s.arc_source(arc) == node { -art_cost } else { art_cost };
        }
        s
    }

    fn real_arcs(&self) -> usize {
        self.n * self.m
    }

    fn arc_source(&self, arc: usize) -> usize {
        let real = self.real_arcs();
        if arc < real {
            arc / self.m
        } else {
            let node = arc - real;
            if self.art_toward_root[node] {
                node
            } else {
                self.root
            }
        }
    }

    fn arc_target(&self, arc: usize) -> usize {
        let real = self.real_arcs();
        if arc < real {
            self.n + arc % self.m
        } else {
            let node = arc - real;
            if self.art_toward_root[node] {
                self.root
            } else {
                node
            }
        }
    }

    fn arc_cost(&self, arc: usize) -> f64 {
        if arc < self.real_arcs() {
            self.cost[[arc / self.m, arc % self.m]]
        } else {
            self.art_cost
        }
    }

    fn reduced_cost(&self, arc: usize) -> f64 {
        self.arc_cost(arc) + self.pi[self.arc_source(arc)] - self.pi[self.arc_target(arc)]
    }

    /// Block-search pricing over the real arcs.
    fn find_entering(&mut self) -> Option<usize> {
        let total = self.real_arcs();
        let mut best = NONE;
        let mut best_rc = -self.tol;
        let mut scanned_in_block = 0;
        let start = self.next_arc;
        for step in 0..total {
            let arc = (start + step) % total;
            if !self.in_tree[arc] {
                let rc = self.reduced_cost(arc);
                if rc < best_rc {
                    best_rc = rc;
                    best = arc;
                }
            }
            scanned_in_block += 1;
            if scanned_in_block == self.block {
                if best != NONE {
                    self.next_arc = (arc + 1) % total;
                    return Some(best);
                }
                scanned_in_block = 0;
            }
        }
        if best != NONE {
            self.next_arc = (best + 1) % total;
            Some(best)
        } else {
            None
        }
    }

    fn join(&self, mut x: usize, mut y: usize) -> usize {
        while x != y {
            if self.depth[x] > self.depth[y] {
                x = self.parent[x];
            } else if self.depth[y] > self.depth[x] {
                y = self.parent[y];
            } else {
                x = self.parent[x];
                y = self.parent[y];
            }
        }
        x
    }

    /// True when the tree arc above `node` is oriented toward the root.
    fn points_up(&self, node: usize) -> bool {
        self.arc_source(self.pred[node]) == node
    }

    fn pivot(&mut self, entering: usize) -> Result<()> {
        let u = self.arc_source(entering);
        let v = self.arc_target(entering);
        let apex = self.join(u, v);

        // leaving arc: the last blocking arc met when traversing the cycle
        // apex -> u -> v -> apex
        let mut delta = f64::INFINITY;
        let mut leaving_node = NONE;
        let mut on_u_side = true;
        let mut x = u;
        while x != apex {
            if self.points_up(x) {
                let f = self.flow[self.pred[x]];
                if f < delta {
                    delta = f;
                    leaving_node = x;
                }
            }
            x = self.parent[x];
        }
        let mut x = v;
        while x != apex {
            if !self.points_up(x) {
                let f = self.flow[self.pred[x]];
                if f <= delta {
                    delta = f;
                    leaving_node = x;
                    on_u_side = false;
                }
            }
            x = self.parent[x];
        }
        if leaving_node == NONE {
            return Err(PotdError::Numeric("transport simplex found an unbounded cycle".into()));
        }

        if delta > 0.0 {
            self.flow[entering] += delta;
            let mut x = u;
            while x != apex {
                let arc = self.pred[x];
                if self.points_up(x) {
                    self.flow[arc] -= delta;
                } else {
                    self.flow[arc] += delta;
                }
                x = self.parent[x];
            }
            let mut x = v;
            while x != apex {
                let arc = self.pred[x];
                if self.points_up(x) {
                    self.flow[arc] += delta;
                } else {
                    self.flow[arc] -= delta;
                }
                x = self.parent[x];
            }
        }
        let leaving_arc = self.pred[leaving_node];
        self.flow[leaving_arc] = 0.0;
        self.in_tree[leaving_arc] = false;
        self.in_tree[entering] = true;

        // detach the subtree under the leaving arc and re-hang it from the
        // entering arc
        let (inner, outer) = if on_u_side { (u, v) } else { (v, u) };
        let old_parent = self.parent[leaving_node];
        remove_child(&mut self.children[old_parent], leaving_node);

        let mut path = vec![inner];
        while *path.last().unwrap() != leaving_node {
            let last = *path.last().unwrap();
            path.push(self.parent[last]);
        }
        let old_preds: Vec<usize> = path.iter().map(|&w| self.pred[w]).collect();
        for t in 0..path.len() - 1 {
            let (lower, upper) = (path[t], path[t + 1]);
            remove_child(&mut self.children[upper], lower);
            self.children[lower].push(upper);
            self.parent[upper] = lower;
            self.pred[upper] = old_preds[t];
        }
        self.parent[inner] = outer;
        self.pred[inner] = entering;
        self.children[outer].push(inner);

        self.refresh_subtree(inner);
        Ok(())
    }

    fn refresh_subtree(&mut self, top: usize) {
        let mut stack = vec![top];
        while let Some(x) = stack.pop() {
            let p = self.parent[x];
            let arc = self.pred[x];
            let c = self.arc_cost(arc);
            self.depth[x] = self.depth[p] + 1;
            self.pi[x] = if self.arc_source(arc) == x {
                self.pi[p] - c
            } else {
                self.pi[p] + c
            };
            stack.extend(self.children[x].iter().copied());
        }
    }

    fn run(&mut self) -> Result<()> {
        let limit = 50 * (self.real_arcs() + self.n + self.m) + 1000;
        for _ in 0..limit {
            match self.find_entering() {
                Some(arc) => self.pivot(arc)?,
                None => return Ok(()),
            }
        }
        Err(PotdError::Numeric(format!(
            "transport simplex exceeded {limit} pivots"
        )))
    }

    fn flows(&self) -> Result<Array2<f64>> {
        let real = self.real_arcs();
        let residual: f64 = self.flow[real..].iter().sum();
        if residual > MASS_TOLERANCE {
            return Err(PotdError::Numeric(format!(
                "transport simplex left {residual:e} mass on artificial arcs"
            )));
        }
        Ok(Array2::from_shape_fn((self.n, self.m), |(i, j)| {
            self.flow[i * self.m + j].max(0.0)
        }))
    }
}

fn remove_child(children: &mut Vec<usize>, node: usize) {
    if let Some(pos) = children.iter().position(|&c| c == node) {
        children.remove(pos);
    }
}
