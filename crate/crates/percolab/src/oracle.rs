//! Exact brute-force percolation functionals on tiny graphs.
//!
//! Every quantity is an expectation over the 2^|E| edge configurations,
//! weighted by p^open * (1-p)^closed. The enumeration accumulates integer
//! totals per open-edge count, so the final value is a short dot product
//! with the binomial weights: dyadic p (1/2, 1/4, ...) gives exact results.
//! This module is the ground truth for every Monte Carlo estimator.

use crate::graphs::TransitiveGraph;
use crate::Error;

/// Hard limit on enumerable edges (2^24 configurations).
pub const MAX_ORACLE_EDGES: u64 = 24;

/// Percolation functionals the oracle can evaluate exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Two-point function P(x <-> y).
    Tau { x: u64, y: u64 },
    /// Susceptibility E|C(x)|.
    Chi { x: u64 },
    /// Triangle diagram sum_{u,v} tau(x,u) tau(u,v) tau(v,y).
    Nabla { x: u64, y: u64 },
    /// Mean intrinsic ball volume E|B_p(x, r)|.
    BallMean { x: u64, r: u64 },
    /// One-arm probability P(boundary of B_p(x, r) is non-empty).
    OneArm { x: u64, r: u64 },
    /// Mean size of the largest component.
    C1Mean,
    /// Distribution of the largest-component size.
    C1Distribution,
    /// Tail probability P(|C(x)| >= k).
    Tail { x: u64, k: u64 },
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Quantity::Tau { x, y } => write!(f, "tau({x},{y})"),
            Quantity::Chi { x } => write!(f, "chi({x})"),
            Quantity::Nabla { x, y } => write!(f, "nabla({x},{y})"),
            Quantity::BallMean { x, r } => write!(f, "ball_mean({x},r={r})"),
            Quantity::OneArm { x, r } => write!(f, "one_arm({x},r={r})"),
            Quantity::C1Mean => write!(f, "c1_mean"),
            Quantity::C1Distribution => write!(f, "c1_distribution"),
            Quantity::Tail { x, k } => write!(f, "tail({x},k={k})"),
        }
    }
}

/// An exactly computed value (plus the full distribution for
/// [`Quantity::C1Distribution`], indexed by component size).
#[derive(Debug, Clone)]
pub struct ExactResult {
    pub quantity: Quantity,
    pub p: f64,
    pub value: f64,
    pub distribution: Option<Vec<f64>>,
    /// Number of configurations enumerated (2^|E|).
    pub configurations: u64,
}

/// Exact value of a percolation functional by full enumeration.
pub fn exact(g: &TransitiveGraph, p: f64, quantity: Quantity) -> Result<ExactResult, Error> {
    check_enumerable(g)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Usage(format!("p = {p} outside [0,1]")));
    }
    check_vertices(g, quantity)?;
    let m = g.edge_count() as usize;
    let weights = binomial_weights(m, p);
    let mut enumerator = Enumerator::new(g);

    let (value, distribution) = match quantity {
        Quantity::Tau { x, y } => {
            let sums = enumerator.sums_by_open_count(|e| u64::from(e.connected(x, y)));
            (dot(&sums, &weights), None)
        }
        Quantity::Chi { x } => {
            let sums = enumerator.sums_by_open_count(|e| e.component_size(x));
            (dot(&sums, &weights), None)
        }
        Quantity::Nabla { x, y } => {
            let tau = tau_matrix(g, p)?;
            let n = g.n() as usize;
            let mut sum = KahanSum::default();
            for u in 0..n {
                for v in 0..n {
                    sum.add(tau[x as usize][u] * tau[u][v] * tau[v][y as usize]);
                }
            }
            (sum.total(), None)
        }
        Quantity::BallMean { x, r } => {
            let sums = enumerator.sums_by_open_count(|e| e.ball_size(x, r));
            (dot(&sums, &weights), None)
        }
        Quantity::OneArm { x, r } => {
            let sums = enumerator.sums_by_open_count(|e| u64::from(e.eccentricity(x) >= r));
            (dot(&sums, &weights), None)
        }
        Quantity::C1Mean => {
            let sums = enumerator.sums_by_open_count(|e| e.largest_component());
            (dot(&sums, &weights), None)
        }
        Quantity::C1Distribution => {
            let n = g.n() as usize;
            let mut by_size: Vec<Vec<u64>> = vec![vec![0; m + 1]; n + 1];
            enumerator.for_each_config(|e, open| {
                let c1 = e.largest_component() as usize;
                by_size[c1][open] += 1;
            });
            let dist: Vec<f64> = by_size.iter().map(|sums| dot(sums, &weights)).collect();
            let mean: f64 = dist.iter().enumerate().map(|(s, pr)| s as f64 * pr).sum();
            (mean, Some(dist))
        }
        Quantity::Tail { x, k } => {
            let sums = enumerator.sums_by_open_count(|e| u64::from(e.component_size(x) >= k));
            (dot(&sums, &weights), None)
        }
    };

    Ok(ExactResult {
        quantity,
        p,
        value,
        distribution,
        configurations: 1u64 << m,
    })
}

/// Exact two-point matrix tau_p(x, y) for all vertex pairs.
pub fn tau_matrix(g: &TransitiveGraph, p: f64) -> Result<Vec<Vec<f64>>, Error> {
    check_enumerable(g)?;
    let n = g.n() as usize;
    let m = g.edge_count() as usize;
    let weights = binomial_weights(m, p);
    // pair_sums[u][v][k] would be huge as a dense cube; accumulate per pair
    // using a flat [n*n][m+1] table instead (n is tiny here).
    let mut sums = vec![vec![0u64; m + 1]; n * n];
    let mut enumerator = Enumerator::new(g);
    enumerator.for_each_config(|e, open| {
        for v in 0..n {
            let root = e.find(v);
            for u in 0..n {
                if e.find(u) == root {
                    sums[v * n + u][open] += 1;
                }
            }
        }
    });
    let mut tau = vec![vec![0.0; n]; n];
    for v in 0..n {
        for u in 0..n {
            tau[v][u] = dot(&sums[v * n + u], &weights);
        }
    }
    Ok(tau)
}

/// The unique p with chi(p) = lambda * n^(1/3), solved by bisection on the
/// exact susceptibility polynomial to absolute tolerance 1e-12.
pub fn exact_pc(g: &TransitiveGraph, lambda: f64) -> Result<f64, Error> {
    check_enumerable(g)?;
    if !g.regular() {
        return Err(Error::Usage(
            "exact_pc requires a regular (transitive) graph".into(),
        ));
    }
    if g.ball_graph(0, g.n())?.len() as u64 != g.n() {
        return Err(Error::Usage("exact_pc requires a connected graph".into()));
    }
    let n = g.n() as f64;
    let target = lambda * n.cbrt();
    if !(1.0..=n).contains(&target) {
        let lo = 1.0 / n.cbrt();
        let hi = n / n.cbrt();
        return Err(Error::Infeasible(format!(
            "chi(p) ranges over [1, {n}]; lambda*n^(1/3) = {target} has no solution \
             (feasible lambda range is [{lo}, {hi}])"
        )));
    }
    // Boundary targets are exact: chi(0) = 1 and chi(1) = n, and chi is flat
    // to high order at p = 1, where bisection on the float polynomial stalls.
    if target <= 1.0 {
        return Ok(0.0);
    }
    if target >= n {
        return Ok(1.0);
    }
    let m = g.edge_count() as usize;
    let mut enumerator = Enumerator::new(g);
    let chi_sums = enumerator.sums_by_open_count(|e| e.component_size(0));
    let chi = |p: f64| dot(&chi_sums, &binomial_weights(m, p));

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if chi(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_enumerable(g: &TransitiveGraph) -> Result<(), Error> {
    if g.edge_count() > MAX_ORACLE_EDGES {
        return Err(Error::Usage(format!(
            "graph has {} edges; exact enumeration is limited to {} edges",
            g.edge_count(),
            MAX_ORACLE_EDGES
        )));
    }
    Ok(())
}

fn check_vertices(g: &TransitiveGraph, q: Quantity) -> Result<(), Error> {
    let check = |v: u64| -> Result<(), Error> {
        if v >= g.n() {
            Err(Error::Usage(format!("vertex {v} out of range (n={})", g.n())))
        } else {
            Ok(())
        }
    };
    match q {
        Quantity::Tau { x, y } | Quantity::Nabla { x, y } => {
            check(x)?;
            check(y)
        }
        Quantity::Chi { x }
        | Quantity::BallMean { x, .. }
        | Quantity::OneArm { x, .. }
        | Quantity::Tail { x, .. } => check(x),
        Quantity::C1Mean | Quantity::C1Distribution => Ok(()),
    }
}

/// Weights w_k = p^k (1-p)^(m-k) for k = 0..=m.
fn binomial_weights(m: usize, p: f64) -> Vec<f64> {
    let q = 1.0 - p;
    (0..=m)
        .map(|k| p.powi(k as i32) * q.powi((m - k) as i32))
        .collect()
}

fn dot(sums: &[u64], weights: &[f64]) -> f64 {
    let mut acc = KahanSum::default();
    for (&s, &w) in sums.iter().zip(weights) {
        acc.add(s as f64 * w);
    }
    acc.total()
}

/// Compensated summation; the per-popcount totals are exact integers, this
/// guards the final weighted reduction.
#[derive(Default)]
struct KahanSum {
    sum: f64,
    carry: f64,
}

impl KahanSum {
    fn add(&mut self, value: f64) {
        let y = value - self.carry;
        let t = self.sum + y;
        self.carry = (t - self.sum) - y;
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum
    }
}

/// Shared scratch for walking all 2^m edge configurations.
struct Enumerator {
    n: usize,
    edges: Vec<(u32, u32)>,
    parent: Vec<u32>,
    size: Vec<u32>,
    adj: Vec<Vec<u32>>,
    dist: Vec<u32>,
    queue: Vec<u32>,
}

/// View of one configuration, with union-find components already built.
struct Config<'a> {
    e: &'a mut Enumerator,
    mask: u64,
}

impl Enumerator {
    fn new(g: &TransitiveGraph) -> Self {
        let mut edges = Vec::with_capacity(g.edge_count() as usize);
        g.for_each_edge(|id, u, v| {
            debug_assert_eq!(id as usize, edges.len());
            edges.push((u as u32, v as u32));
        });
        // for_each_edge visits ids in a family-specific order; sort explicit
        // correspondence id -> endpoints.
        let n = g.n() as usize;
        Self {
            n,
            edges,
            parent: (0..n as u32).collect(),
            size: vec![1; n],
            adj: vec![Vec::new(); n],
            dist: vec![0; n],
            queue: Vec::with_capacity(n),
        }
    }

    /// Calls `f` once per configuration with components prepared.
    fn for_each_config<F: FnMut(&mut Config, usize)>(&mut self, mut f: F) {
        let m = self.edges.len();
        for mask in 0u64..(1u64 << m) {
            for v in 0..self.n {
                self.parent[v] = v as u32;
                self.size[v] = 1;
            }
            let mut bits = mask;
            while bits != 0 {
                let e = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let (u, v) = self.edges[e];
                self.union(u, v);
            }
            let mut config = Config { e: self, mask };
            f(&mut config, mask.count_ones() as usize);
        }
    }

    /// sums[k] = sum of f(config) over configurations with k open edges.
    fn sums_by_open_count<F: FnMut(&mut Config) -> u64>(&mut self, mut f: F) -> Vec<u64> {
        let m = self.edges.len();
        let mut sums = vec![0u64; m + 1];
        self.for_each_config(|config, open| {
            sums[open] += f(config);
        });
        sums
    }

    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a as usize);
        let rb = self.find(b as usize);
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra] >= self.size[rb] { (ra, rb) } else { (rb, ra) };
        self.parent[small] = big as u32;
        self.size[big] += self.size[small];
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let gp = self.parent[self.parent[x] as usize] as usize;
            self.parent[x] = gp as u32;
            x = gp;
        }
        x
    }
}

impl Config<'_> {
    fn find(&mut self, v: usize) -> usize {
        self.e.find(v)
    }

    fn connected(&mut self, x: u64, y: u64) -> bool {
        self.e.find(x as usize) == self.e.find(y as usize)
    }

    fn component_size(&mut self, x: u64) -> u64 {
        let root = self.e.find(x as usize);
        self.e.size[root] as u64
    }

    fn largest_component(&mut self) -> u64 {
        let mut best = 1;
        for v in 0..self.e.n {
            if self.e.parent[v] as usize == v {
                best = best.max(self.e.size[v]);
            }
        }
        best as u64
    }

    /// BFS distances from x over open edges; returns (ball size within r,
    /// eccentricity inside the cluster).
    fn bfs(&mut self, x: u64, r: u64) -> (u64, u64) {
        let n = self.e.n;
        for v in 0..n {
            self.e.adj[v].clear();
        }
        let mut bits = self.mask;
        while bits != 0 {
            let idx = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (u, v) = self.e.edges[idx];
            self.e.adj[u as usize].push(v);
            self.e.adj[v as usize].push(u);
        }
        self.e.dist.iter_mut().for_each(|d| *d = u32::MAX);
        self.e.queue.clear();
        self.e.dist[x as usize] = 0;
        self.e.queue.push(x as u32);
        let mut head = 0;
        let mut within = 0u64;
        let mut ecc = 0u64;
        while head < self.e.queue.len() {
            let u = self.e.queue[head] as usize;
            head += 1;
            let du = self.e.dist[u] as u64;
            ecc = ecc.max(du);
            if du <= r {
                within += 1;
            }
            for i in 0..self.e.adj[u].len() {
                let v = self.e.adj[u][i] as usize;
                if self.e.dist[v] == u32::MAX {
                    self.e.dist[v] = self.e.dist[u] + 1;
                    self.e.queue.push(v as u32);
                }
            }
        }
        (within, ecc)
    }

    fn ball_size(&mut self, x: u64, r: u64) -> u64 {
        self.bfs(x, r).0
    }

    fn eccentricity(&mut self, x: u64) -> u64 {
        self.bfs(x, u64::MAX).1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::TransitiveGraph;

    fn k3() -> TransitiveGraph {
        TransitiveGraph::complete(3).unwrap()
    }

    #[test]
    fn tau_on_triangle_is_five_eighths() {
        let res = exact(&k3(), 0.5, Quantity::Tau { x: 0, y: 1 }).unwrap();
        assert_eq!(res.value, 0.625);
        assert_eq!(res.configurations, 8);
    }

    #[test]
    fn chi_on_triangle() {
        let res = exact(&k3(), 0.5, Quantity::Chi { x: 0 }).unwrap();
        assert_eq!(res.value, 2.25); // 1 + 2 * 5/8
    }

    #[test]
    fn chi_at_p_zero_is_one() {
        for g in [k3(), TransitiveGraph::hamming(3).unwrap()] {
            let res = exact(&g, 0.0, Quantity::Chi { x: 0 }).unwrap();
            assert_eq!(res.value, 1.0);
        }
    }

    #[test]
    fn nabla_on_triangle() {
        let res = exact(&k3(), 0.5, Quantity::Nabla { x: 0, y: 0 }).unwrap();
        assert_eq!(res.value, 3.83203125);
    }

    #[test]
    fn nabla_dominates_tau_and_one() {
        let g = TransitiveGraph::torus(4, 1).unwrap();
        for &p in &[0.25, 0.5, 0.75] {
            let tau = exact(&g, p, Quantity::Tau { x: 0, y: 2 }).unwrap().value;
            let nab = exact(&g, p, Quantity::Nabla { x: 0, y: 2 }).unwrap().value;
            let nab_diag = exact(&g, p, Quantity::Nabla { x: 0, y: 0 }).unwrap().value;
            assert!(nab >= tau);
            assert!(nab_diag >= 1.0);
        }
    }

    #[test]
    fn one_arm_at_p_one_within_eccentricity() {
        let g = TransitiveGraph::torus(6, 1).unwrap();
        for r in 0..=3 {
            let res = exact(&g, 1.0, Quantity::OneArm { x: 0, r }).unwrap();
            assert_eq!(res.value, 1.0, "cycle eccentricity is 3");
        }
        let res = exact(&g, 1.0, Quantity::OneArm { x: 0, r: 4 }).unwrap();
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn one_arm_triangle_at_half() {
        // Complement is both incident edges closed: 1 - 1/4.
        let res = exact(&k3(), 0.5, Quantity::OneArm { x: 0, r: 1 }).unwrap();
        assert_eq!(res.value, 0.75);
    }

    #[test]
    fn ball_mean_on_single_edge() {
        let g = TransitiveGraph::complete(2).unwrap();
        let res = exact(&g, 0.5, Quantity::BallMean { x: 0, r: 1 }).unwrap();
        assert_eq!(res.value, 1.5);
    }

    #[test]
    fn c1_mean_on_triangle() {
        let res = exact(&k3(), 0.5, Quantity::C1Mean).unwrap();
        assert_eq!(res.value, 2.375); // 19/8
    }

    #[test]
    fn c1_distribution_sums_to_one() {
        let g = TransitiveGraph::hamming(2).unwrap();
        for &p in &[0.25, 0.5, 0.75] {
            let res = exact(&g, p, Quantity::C1Distribution).unwrap();
            let dist = res.distribution.unwrap();
            let total: f64 = dist.iter().sum();
            assert!((total - 1.0).abs() < 1e-12, "p={p} total={total}");
            assert!((res.value - exact(&g, p, Quantity::C1Mean).unwrap().value).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_on_triangle() {
        let res = exact(&k3(), 0.5, Quantity::Tail { x: 0, k: 3 }).unwrap();
        assert_eq!(res.value, 0.5);
        let res = exact(&k3(), 0.5, Quantity::Tail { x: 0, k: 1 }).unwrap();
        assert_eq!(res.value, 1.0);
        let res = exact(&k3(), 0.0, Quantity::Tail { x: 0, k: 2 }).unwrap();
        assert_eq!(res.value, 0.0);
    }

    #[test]
    fn tau_is_monotone_in_p() {
        let g = TransitiveGraph::torus(5, 1).unwrap();
        let mut last = -1.0;
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let tau = exact(&g, p, Quantity::Tau { x: 0, y: 2 }).unwrap().value;
            assert!(tau >= last - 1e-12, "tau must be nondecreasing");
            last = tau;
        }
    }

    #[test]
    fn values_invariant_under_relabeling() {
        // The 4-cycle 0-1-2-3 relabeled by the permutation (0 2 1 3).
        let g1 = TransitiveGraph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let g2 = TransitiveGraph::from_edge_list(4, &[(1, 2), (0, 1), (0, 3), (2, 3)]).unwrap();
        for &p in &[0.3, 0.6] {
            let a = exact(&g1, p, Quantity::Chi { x: 0 }).unwrap().value;
            let b = exact(&g2, p, Quantity::Chi { x: 2 }).unwrap().value;
            assert!((a - b).abs() < 1e-12);
            let a = exact(&g1, p, Quantity::C1Mean).unwrap().value;
            let b = exact(&g2, p, Quantity::C1Mean).unwrap().value;
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn refuses_large_graphs() {
        let g = TransitiveGraph::complete(8).unwrap(); // 28 edges
        let err = exact(&g, 0.5, Quantity::C1Mean).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("24"), "refusal names the limit: {msg}");
    }

    #[test]
    fn exact_pc_on_single_edge() {
        let g = TransitiveGraph::complete(2).unwrap();
        let pc = exact_pc(&g, 1.0).unwrap();
        assert!((pc - (2f64.cbrt() - 1.0)).abs() < 1e-10, "chi(p) = 1 + p");
    }

    #[test]
    fn exact_pc_full_connection() {
        // lambda * n^(1/3) = n forces p = 1; n = 8 keeps the target exact
        // in floating point (n^(1/3) = 2).
        let g = TransitiveGraph::hamming(3).unwrap();
        let pc = exact_pc(&g, 4.0).unwrap();
        assert!((pc - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_pc_on_triangle_solves_cubic() {
        let g = k3();
        let pc = exact_pc(&g, 1.0).unwrap();
        // chi(p) = 1 + 2(p + (1-p)p^2) must equal 3^(1/3) at the root.
        let chi = 1.0 + 2.0 * (pc + (1.0 - pc) * pc * pc);
        assert!((chi - 3f64.cbrt()).abs() < 1e-9, "chi={chi}");
    }

    #[test]
    fn exact_pc_infeasible_lambda() {
        let g = k3();
        let err = exact_pc(&g, 10.0).unwrap_err();
        assert!(matches!(err, Error::Infeasible(_)));
        let msg = format!("{err}");
        assert!(msg.contains("feasible lambda range"), "{msg}");
    }
}
