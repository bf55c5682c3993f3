//! Diameter and lazy random-walk mixing time of sampled clusters.
//!
//! A [`ClusterGraph`] is the open subgraph induced on one cluster's members,
//! reindexed to 0..len as a CSR adjacency. The mixing time follows one fixed
//! convention: lazy walk (hold with probability 1/2), worst-case start, and
//! total-variation threshold 1/4 against the degree-stationary distribution.
//! Above the exact-TV size limit a spectral relaxation-time proxy is
//! reported instead and labeled as such.

use crate::graphs::TransitiveGraph;
use crate::perc::{edge_open, largest_component, CouplingSeed, Cluster};
use crate::stats::par_replicas_scratch;
use crate::Error;
use std::collections::HashMap;

/// TV threshold defining the mixing time.
pub const TV_THRESHOLD: f64 = 0.25;

/// Default cluster size up to which diameters are computed exactly.
pub const EXACT_DIAMETER_LIMIT: u64 = 5000;

/// Default cluster size up to which mixing times use exact TV iteration.
pub const EXACT_TV_LIMIT: u64 = 2000;

const DOUBLE_SWEEPS: u32 = 20;

/// One cluster as a standalone graph: original vertex labels plus a local
/// CSR adjacency over the open edges within the cluster.
#[derive(Debug, Clone)]
pub struct ClusterGraph {
    pub vertices: Vec<u64>,
    offsets: Vec<u32>,
    adj: Vec<u32>,
}

impl ClusterGraph {
    /// Induces the open subgraph on a cluster's members.
    pub fn from_cluster(
        g: &TransitiveGraph,
        seed: &CouplingSeed,
        p: f64,
        cluster: &Cluster,
    ) -> Self {
        let vertices = cluster.members.clone();
        let index: HashMap<u64, u32> = vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let n = vertices.len();
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, &u) in vertices.iter().enumerate() {
            for slot in 0..g.degree_of(u) {
                let (v, eid) = g.incident(u, slot);
                if edge_open(seed, crate::graphs::EdgeId(eid), p) {
                    if let Some(&j) = index.get(&v) {
                        rows[i].push(j);
                    }
                }
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0u32);
        let mut adj = Vec::new();
        for row in &rows {
            adj.extend_from_slice(row);
            offsets.push(adj.len() as u32);
        }
        Self { vertices, offsets, adj }
    }

    #[cfg(test)]
    pub(crate) fn from_local_edges(n: usize, edges: &[(u32, u32)]) -> Self {
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(u, v) in edges {
            rows[u as usize].push(v);
            rows[v as usize].push(u);
        }
        let mut offsets = vec![0u32];
        let mut adj = Vec::new();
        for row in &rows {
            adj.extend_from_slice(row);
            offsets.push(adj.len() as u32);
        }
        Self { vertices: (0..n as u64).collect(), offsets, adj }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn neighbors_local(&self, i: usize) -> &[u32] {
        &self.adj[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    /// Open edges within the cluster (each adjacency entry is a half-edge).
    pub fn open_edges(&self) -> u64 {
        self.adj.len() as u64 / 2
    }

    fn bfs_dists(&self, start: u32, dist: &mut Vec<u32>) {
        dist.clear();
        dist.resize(self.len(), u32::MAX);
        dist[start as usize] = 0;
        let mut queue = Vec::with_capacity(self.len());
        queue.push(start);
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            let du = dist[u as usize];
            for &v in self.neighbors_local(u as usize) {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = du + 1;
                    queue.push(v);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiameterMethod {
    Exact,
    /// Best eccentricity found by iterated double sweeps; a lower bound.
    DoubleSweepLowerBound,
}

/// Maximal graph distance within the cluster.
///
/// Exact (BFS from every vertex) up to [`EXACT_DIAMETER_LIMIT`] vertices,
/// otherwise a double-sweep lower bound flagged approximate.
pub fn diameter(c: &ClusterGraph) -> Result<(u64, DiameterMethod), Error> {
    diameter_with(c, EXACT_DIAMETER_LIMIT)
}

pub fn diameter_with(c: &ClusterGraph, exact_limit: u64) -> Result<(u64, DiameterMethod), Error> {
    if c.is_empty() {
        return Err(Error::Usage("empty cluster".into()));
    }
    let mut dist = Vec::new();
    c.bfs_dists(0, &mut dist);
    if dist.iter().any(|&d| d == u32::MAX) {
        return Err(Error::Usage("cluster graph is disconnected".into()));
    }
    if (c.len() as u64) <= exact_limit {
        let mut best = dist.iter().copied().max().unwrap() as u64;
        for s in 1..c.len() as u32 {
            c.bfs_dists(s, &mut dist);
            best = best.max(dist.iter().copied().max().unwrap() as u64);
        }
        Ok((best, DiameterMethod::Exact))
    } else {
        Ok((double_sweep_lower_bound(c, DOUBLE_SWEEPS), DiameterMethod::DoubleSweepLowerBound))
    }
}

/// Iterated double sweep: BFS from a start, BFS again from the farthest
/// vertex found; the second eccentricity lower-bounds the diameter. Start
/// vertices are a deterministic pseudo-random sequence.
pub fn double_sweep_lower_bound(c: &ClusterGraph, sweeps: u32) -> u64 {
    let n = c.len() as u64;
    let mut dist = Vec::new();
    let mut best = 0u64;
    let mut state = 0x9E3779B97F4A7C15u64;
    for _ in 0..sweeps {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let start = (state >> 16) % n;
        c.bfs_dists(start as u32, &mut dist);
        let far = farthest(&dist);
        c.bfs_dists(far, &mut dist);
        best = best.max(dist.iter().copied().max().unwrap() as u64);
    }
    best
}

/// Smallest index among vertices at maximal distance.
fn farthest(dist: &[u32]) -> u32 {
    let mut best = 0u32;
    let mut best_d = 0u32;
    for (i, &d) in dist.iter().enumerate() {
        if d != u32::MAX && d > best_d {
            best_d = d;
            best = i as u32;
        }
    }
    best
}

/// Stationary distribution of the lazy walk: pi(v) = deg(v) / (2 * edges).
/// An isolated single-vertex cluster gets the point mass.
pub fn stationary_distribution(c: &ClusterGraph) -> Result<Vec<f64>, Error> {
    if c.is_empty() {
        return Err(Error::Usage("empty cluster".into()));
    }
    let two_m = c.adj.len() as f64;
    if two_m == 0.0 {
        if c.len() == 1 {
            return Ok(vec![1.0]);
        }
        return Err(Error::Usage("cluster graph is disconnected".into()));
    }
    let pi: Vec<f64> = (0..c.len()).map(|v| c.degree(v) as f64 / two_m).collect();
    debug_assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    Ok(pi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingMethod {
    ExactTv,
    SpectralBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StartPolicy {
    AllStarts,
    DoubleSweepEndpoint,
}

/// Mixing time of the lazy simple random walk on a cluster.
#[derive(Debug, Clone)]
pub struct MixingResult {
    pub t_mix: u64,
    pub method: MixingMethod,
    /// Worst-start TV at `t_mix` (NaN for the spectral proxy).
    pub tv_at_t_mix: f64,
    pub start_policy: StartPolicy,
    /// Labels the spectral path: a relaxation-time proxy, not a TV time.
    pub note: &'static str,
    /// 1 / (1 - lambda_2) of the lazy transition operator, when computed.
    pub relaxation_time: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct MixOpts {
    pub size_limit: u64,
    pub allow_spectral: bool,
    pub start_policy: StartPolicy,
    /// Safety bound on TV iterations per start.
    pub max_steps: u64,
}

impl Default for MixOpts {
    fn default() -> Self {
        Self {
            size_limit: EXACT_TV_LIMIT,
            allow_spectral: true,
            start_policy: StartPolicy::AllStarts,
            max_steps: 10_000_000,
        }
    }
}

/// First time the worst-start total-variation distance to stationarity
/// drops to 1/4 or below (exact path), or a spectral relaxation-time proxy
/// for clusters above `size_limit`.
pub fn mixing_time(c: &ClusterGraph, size_limit: u64) -> Result<MixingResult, Error> {
    mixing_time_with(c, MixOpts { size_limit, ..MixOpts::default() })
}

pub fn mixing_time_with(c: &ClusterGraph, opts: MixOpts) -> Result<MixingResult, Error> {
    if c.is_empty() {
        return Err(Error::Usage("empty cluster".into()));
    }
    if c.len() == 1 {
        // One-state chain is mixed at t = 0.
        return Ok(MixingResult {
            t_mix: 0,
            method: MixingMethod::ExactTv,
            tv_at_t_mix: 0.0,
            start_policy: opts.start_policy,
            note: "",
            relaxation_time: None,
        });
    }
    let pi = stationary_distribution(c)?;
    if (c.len() as u64) <= opts.size_limit {
        let starts: Vec<u32> = match opts.start_policy {
            StartPolicy::AllStarts => (0..c.len() as u32).collect(),
            StartPolicy::DoubleSweepEndpoint => {
                let mut dist = Vec::new();
                c.bfs_dists(0, &mut dist);
                let far = farthest(&dist);
                c.bfs_dists(far, &mut dist);
                vec![farthest(&dist)]
            }
        };
        let mut scratch = TvScratch::new(c.len());
        let mut t_mix = 0u64;
        let mut tv_at = 0.0f64;
        for &s in &starts {
            let (t, tv) = first_passage_tv(c, &pi, s, &mut scratch, opts.max_steps)?;
            if t >= t_mix {
                t_mix = t;
                tv_at = tv;
            }
        }
        Ok(MixingResult {
            t_mix,
            method: MixingMethod::ExactTv,
            tv_at_t_mix: tv_at,
            start_policy: opts.start_policy,
            note: "",
            relaxation_time: None,
        })
    } else if opts.allow_spectral {
        let lambda2 = lazy_lambda2(c, &pi, 1e-9, 100_000);
        let t_rel = 1.0 / (1.0 - lambda2);
        Ok(MixingResult {
            t_mix: t_rel.ceil() as u64,
            method: MixingMethod::SpectralBound,
            tv_at_t_mix: f64::NAN,
            start_policy: opts.start_policy,
            note: "proxy, not TV",
            relaxation_time: Some(t_rel),
        })
    } else {
        Err(Error::Usage(format!(
            "cluster size {} exceeds the exact-TV limit {} and the spectral \
             path is disabled",
            c.len(),
            opts.size_limit
        )))
    }
}

struct TvScratch {
    cur: Vec<f64>,
    next: Vec<f64>,
    inv_deg: Vec<f64>,
}

impl TvScratch {
    fn new(n: usize) -> Self {
        Self { cur: vec![0.0; n], next: vec![0.0; n], inv_deg: vec![0.0; n] }
    }
}

/// First t with TV(delta_s P^t, pi) <= 1/4; the TV sequence is verified to
/// be nonincreasing as it is produced.
fn first_passage_tv(
    c: &ClusterGraph,
    pi: &[f64],
    start: u32,
    ws: &mut TvScratch,
    max_steps: u64,
) -> Result<(u64, f64), Error> {
    let n = c.len();
    ws.cur.iter_mut().for_each(|x| *x = 0.0);
    ws.cur[start as usize] = 1.0;
    for v in 0..n {
        ws.inv_deg[v] = 1.0 / c.degree(v) as f64;
    }
    let tv_of = |mu: &[f64]| 0.5 * mu.iter().zip(pi).map(|(m, p)| (m - p).abs()).sum::<f64>();

    let mut tv = tv_of(&ws.cur);
    let mut t = 0u64;
    while tv > TV_THRESHOLD {
        if t >= max_steps {
            return Err(Error::Infeasible(format!(
                "lazy walk failed to reach TV <= 1/4 within {max_steps} steps"
            )));
        }
        // One lazy step: hold half the mass, spread the rest over neighbors.
        for v in 0..n {
            ws.next[v] = 0.5 * ws.cur[v];
        }
        for v in 0..n {
            let share = 0.5 * ws.cur[v] * ws.inv_deg[v];
            if share != 0.0 {
                for &u in c.neighbors_local(v) {
                    ws.next[u as usize] += share;
                }
            }
        }
        std::mem::swap(&mut ws.cur, &mut ws.next);
        t += 1;
        let new_tv = tv_of(&ws.cur);
        debug_assert!(new_tv <= tv + 1e-9, "TV must be nonincreasing: {new_tv} > {tv}");
        tv = new_tv;
    }
    Ok((t, tv))
}

/// Second-largest eigenvalue of the lazy transition operator via power
/// iteration on the symmetrized kernel, deflating the top eigenvector.
fn lazy_lambda2(c: &ClusterGraph, pi: &[f64], tol: f64, max_iter: u32) -> f64 {
    let n = c.len();
    let v1: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
    let inv_sqrt_deg: Vec<f64> = (0..n).map(|v| 1.0 / (c.degree(v) as f64).sqrt()).collect();

    // Deterministic pseudo-random start, deflated and normalized.
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let mut z = (i as u64).wrapping_add(0x9E3779B97F4A7C15);
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect();
    deflate(&mut x, &v1);
    normalize(&mut x);

    let mut y = vec![0.0; n];
    let mut lambda = 0.0f64;
    for _ in 0..max_iter {
        // y = S x with S = 1/2 I + 1/2 D^{-1/2} A D^{-1/2}.
        for v in 0..n {
            let mut acc = 0.0;
            for &u in c.neighbors_local(v) {
                acc += x[u as usize] * inv_sqrt_deg[u as usize];
            }
            y[v] = 0.5 * x[v] + 0.5 * inv_sqrt_deg[v] * acc;
        }
        deflate(&mut y, &v1);
        let new_lambda: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.5; // x happened to be orthogonal to everything left
        }
        for v in 0..n {
            x[v] = y[v] / norm;
        }
        if (new_lambda - lambda).abs() < tol {
            return new_lambda;
        }
        lambda = new_lambda;
    }
    lambda
}

fn deflate(x: &mut [f64], v1: &[f64]) {
    let dot: f64 = x.iter().zip(v1).map(|(a, b)| a * b).sum();
    for (xi, vi) in x.iter_mut().zip(v1) {
        *xi -= dot * vi;
    }
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Per-replica mixing outcome within a survey.
#[derive(Debug, Clone, Copy)]
pub enum MixOutcome {
    ExactTv { t_mix: u64, tv: f64 },
    /// Relaxation-time proxy for clusters above the exact-TV limit.
    Spectral { t_rel: f64 },
}

/// Per-replica largest-cluster geometry over many replicas.
#[derive(Debug, Clone)]
pub struct C1Survey {
    /// |C1| per replica, in replica order.
    pub sizes: Vec<u64>,
    /// (diameter, is_exact) per replica when requested.
    pub diameters: Vec<(u64, bool)>,
    /// Mixing outcome per replica when requested.
    pub mixing: Vec<MixOutcome>,
}

#[derive(Debug, Clone, Copy)]
pub struct SurveyOpts {
    pub want_diameter: bool,
    pub want_mixing: bool,
    pub exact_diameter_limit: u64,
    pub mixing_size_limit: u64,
}

impl Default for SurveyOpts {
    fn default() -> Self {
        Self {
            want_diameter: true,
            want_mixing: false,
            exact_diameter_limit: EXACT_DIAMETER_LIMIT,
            mixing_size_limit: EXACT_TV_LIMIT,
        }
    }
}

/// Scans every replica's largest component and measures its geometry.
///
/// One union-find pass per replica locates C1; the cluster is then re-derived
/// from the same labels, so the survey is a pure function of
/// (graph, master_seed, p, replica index).
pub fn survey_c1(
    g: &TransitiveGraph,
    p: f64,
    replicas: u64,
    master_seed: u64,
    opts: SurveyOpts,
) -> Result<C1Survey, Error> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Usage(format!("p = {p} outside [0,1]")));
    }
    if replicas < 1 {
        return Err(Error::Usage("need at least 1 replica".into()));
    }
    struct Acc {
        sizes: Vec<u64>,
        diameters: Vec<(u64, bool)>,
        mixing: Vec<MixOutcome>,
        error: Option<Error>,
    }
    let acc = par_replicas_scratch(
        replicas,
        1,
        || Acc { sizes: Vec::new(), diameters: Vec::new(), mixing: Vec::new(), error: None },
        || (),
        |_, acc, r| {
            if acc.error.is_some() {
                return;
            }
            let seed = CouplingSeed::new(master_seed, r);
            let (size, rep) = largest_component(g, &seed, p);
            acc.sizes.push(size);
            if !(opts.want_diameter || opts.want_mixing) {
                return;
            }
            let cluster = match crate::perc::explore_cluster(g, &seed, p, rep, u64::MAX) {
                Ok(c) => c,
                Err(e) => {
                    acc.error = Some(e);
                    return;
                }
            };
            debug_assert_eq!(cluster.size(), size);
            let cg = ClusterGraph::from_cluster(g, &seed, p, &cluster);
            if opts.want_diameter {
                match diameter_with(&cg, opts.exact_diameter_limit) {
                    Ok((d, method)) => {
                        acc.diameters.push((d, method == DiameterMethod::Exact))
                    }
                    Err(e) => acc.error = Some(e),
                }
            }
            if opts.want_mixing {
                match mixing_time_with(
                    &cg,
                    MixOpts { size_limit: opts.mixing_size_limit, ..MixOpts::default() },
                ) {
                    Ok(res) => acc.mixing.push(match res.method {
                        MixingMethod::ExactTv => {
                            MixOutcome::ExactTv { t_mix: res.t_mix, tv: res.tv_at_t_mix }
                        }
                        MixingMethod::SpectralBound => {
                            MixOutcome::Spectral { t_rel: res.relaxation_time.unwrap_or(f64::NAN) }
                        }
                    }),
                    Err(e) => acc.error = Some(e),
                }
            }
        },
        |a, mut b| {
            a.sizes.append(&mut b.sizes);
            a.diameters.append(&mut b.diameters);
            a.mixing.append(&mut b.mixing);
            if a.error.is_none() {
                a.error = b.error;
            }
        },
    );
    if let Some(e) = acc.error {
        return Err(e);
    }
    Ok(C1Survey { sizes: acc.sizes, diameters: acc.diameters, mixing: acc.mixing })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::TransitiveGraph;
    use crate::perc::explore_cluster;

    fn path3() -> ClusterGraph {
        ClusterGraph::from_local_edges(3, &[(0, 1), (1, 2)])
    }

    fn cycle(n: usize) -> ClusterGraph {
        let edges: Vec<(u32, u32)> = (0..n).map(|i| (i as u32, ((i + 1) % n) as u32)).collect();
        ClusterGraph::from_local_edges(n, &edges)
    }

    fn singleton() -> ClusterGraph {
        ClusterGraph::from_local_edges(1, &[])
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&singleton()).unwrap(), (0, DiameterMethod::Exact));
        assert_eq!(diameter(&path3()).unwrap(), (2, DiameterMethod::Exact));
        assert_eq!(diameter(&cycle(6)).unwrap(), (3, DiameterMethod::Exact));
    }

    #[test]
    fn diameter_rejects_disconnected_input() {
        let c = ClusterGraph::from_local_edges(4, &[(0, 1), (2, 3)]);
        assert!(matches!(diameter(&c), Err(Error::Usage(_))));
    }

    #[test]
    fn stationary_distribution_examples() {
        assert_eq!(stationary_distribution(&singleton()).unwrap(), vec![1.0]);
        let k2 = ClusterGraph::from_local_edges(2, &[(0, 1)]);
        assert_eq!(stationary_distribution(&k2).unwrap(), vec![0.5, 0.5]);
        assert_eq!(stationary_distribution(&path3()).unwrap(), vec![0.25, 0.5, 0.25]);
    }

    #[test]
    fn detailed_balance_on_sampled_cluster() {
        let g = TransitiveGraph::torus(5, 2).unwrap();
        let seed = CouplingSeed::new(31, 4);
        let cluster = explore_cluster(&g, &seed, 0.55, 0, u64::MAX).unwrap();
        let c = ClusterGraph::from_cluster(&g, &seed, 0.55, &cluster);
        let pi = stationary_distribution(&c).unwrap();
        for v in 0..c.len() {
            for &u in c.neighbors_local(v) {
                let fwd = pi[v] * 0.5 / c.degree(v) as f64;
                let back = pi[u as usize] * 0.5 / c.degree(u as usize) as f64;
                assert!((fwd - back).abs() < 1e-12, "detailed balance at ({v},{u})");
            }
        }
        let sum: f64 = pi.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixing_single_vertex_is_zero() {
        let res = mixing_time(&singleton(), 2000).unwrap();
        assert_eq!(res.t_mix, 0);
        assert_eq!(res.tv_at_t_mix, 0.0);
        assert_eq!(res.method, MixingMethod::ExactTv);
    }

    #[test]
    fn mixing_single_edge_is_one() {
        // The lazy 2x2 kernel sends both starts to exactly (1/2, 1/2) at t=1.
        let k2 = ClusterGraph::from_local_edges(2, &[(0, 1)]);
        let res = mixing_time(&k2, 2000).unwrap();
        assert_eq!(res.t_mix, 1);
        assert!(res.tv_at_t_mix.abs() < 1e-15);
    }

    /// Independent oracle: dense lazy transition matrix powers, worst-start
    /// TV against the degree-stationary distribution.
    fn dense_tmix(c: &ClusterGraph) -> u64 {
        use nalgebra::DMatrix;
        let n = c.len();
        let mut p = DMatrix::<f64>::zeros(n, n);
        for v in 0..n {
            p[(v, v)] += 0.5;
            for &u in c.neighbors_local(v) {
                p[(v, u as usize)] += 0.5 / c.degree(v) as f64;
            }
        }
        let pi = stationary_distribution(c).unwrap();
        let mut pow = DMatrix::<f64>::identity(n, n);
        for t in 0..10_000u64 {
            let worst = (0..n)
                .map(|s| {
                    0.5 * (0..n)
                        .map(|v| (pow[(s, v)] - pi[v]).abs())
                        .sum::<f64>()
                })
                .fold(0.0f64, f64::max);
            if worst <= TV_THRESHOLD {
                return t;
            }
            pow *= &p;
        }
        panic!("dense oracle did not mix");
    }

    #[test]
    fn mixing_matches_dense_matrix_oracle() {
        for c in [cycle(4), cycle(6), path3(), ClusterGraph::from_local_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)])] {
            let expected = dense_tmix(&c);
            let got = mixing_time(&c, 2000).unwrap();
            assert_eq!(got.t_mix, expected, "cluster of {} vertices", c.len());
            assert!(got.tv_at_t_mix <= TV_THRESHOLD);
        }
    }

    #[test]
    fn mixing_invariant_under_relabeling() {
        // The same 5-vertex tree with two different labelings.
        let a = ClusterGraph::from_local_edges(5, &[(0, 1), (1, 2), (1, 3), (3, 4)]);
        let b = ClusterGraph::from_local_edges(5, &[(4, 3), (3, 2), (3, 1), (1, 0)]);
        assert_eq!(
            mixing_time(&a, 2000).unwrap().t_mix,
            mixing_time(&b, 2000).unwrap().t_mix
        );
    }

    #[test]
    fn spectral_path_reports_proxy() {
        let c = cycle(12);
        let res = mixing_time(&c, 4).unwrap(); // force the spectral branch
        assert_eq!(res.method, MixingMethod::SpectralBound);
        assert_eq!(res.note, "proxy, not TV");
        assert!(res.tv_at_t_mix.is_nan());
        assert!(res.relaxation_time.unwrap() > 1.0);

        let err = mixing_time_with(
            &c,
            MixOpts { size_limit: 4, allow_spectral: false, ..MixOpts::default() },
        )
        .unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn spectral_lambda2_matches_dense_eigensolver() {
        use nalgebra::{DMatrix, SymmetricEigen};
        let c = ClusterGraph::from_local_edges(7, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 0), (1, 4)]);
        let pi = stationary_distribution(&c).unwrap();
        let n = c.len();
        let mut s = DMatrix::<f64>::zeros(n, n);
        for v in 0..n {
            s[(v, v)] += 0.5;
            for &u in c.neighbors_local(v) {
                s[(v, u as usize)] +=
                    0.5 / ((c.degree(v) as f64).sqrt() * (c.degree(u as usize) as f64).sqrt());
            }
        }
        let mut eigs: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let expected = eigs[1];
        let got = lazy_lambda2(&c, &pi, 1e-12, 200_000);
        assert!((got - expected).abs() < 1e-6, "{got} vs {expected}");
    }

    #[test]
    fn double_sweep_bounds_exact_diameter() {
        let g = TransitiveGraph::torus(8, 2).unwrap();
        let mut equal = 0u32;
        let mut total = 0u32;
        for rep in 0..1000 {
            let seed = CouplingSeed::new(5150, rep);
            let cluster = explore_cluster(&g, &seed, 0.45, 0, u64::MAX).unwrap();
            if cluster.size() < 2 {
                continue;
            }
            let c = ClusterGraph::from_cluster(&g, &seed, 0.45, &cluster);
            let (exact, m) = diameter(&c).unwrap();
            assert_eq!(m, DiameterMethod::Exact);
            let lower = double_sweep_lower_bound(&c, DOUBLE_SWEEPS);
            assert!(lower <= exact, "lower bound may not exceed the diameter");
            assert!(exact <= 2 * lower.max(1), "double sweep is a 2-approximation here");
            total += 1;
            equal += u32::from(lower == exact);
        }
        assert!(total > 500, "enough nontrivial clusters sampled: {total}");
        let rate = equal as f64 / total as f64;
        assert!(rate >= 0.95, "double sweep matched exact on {rate} of clusters");
    }

    #[test]
    fn survey_matches_estimator_samples() {
        let g = TransitiveGraph::hamming(6).unwrap();
        let survey = survey_c1(&g, 0.18, 40, 77, SurveyOpts::default()).unwrap();
        let stats = crate::estimators::estimate_c1(&g, 0.18, 40, 77).unwrap();
        assert_eq!(survey.sizes, stats.samples);
        assert_eq!(survey.diameters.len(), 40);
        for &(d, exact) in &survey.diameters {
            assert!(exact);
            assert!(d < 64);
        }
    }
}
