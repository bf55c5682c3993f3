//! Coupled bond-percolation sampling and cluster/ball exploration in the
//! intrinsic metric.
//!
//! Every edge gets a deterministic uniform label `X_e in [0,1)` computed by a
//! counter-based hash of `(master_seed, replica_index, edge id)`; an edge is
//! p-open iff `X_e < p`. One seed therefore realizes all retention
//! probabilities simultaneously: raising p only ever adds edges, clusters and
//! balls are nested across p, and results are bit-identical under any
//! parallel schedule because nothing is sampled sequentially.

use crate::graphs::{EdgeId, TransitiveGraph};
use crate::Error;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const STREAM_SALT: u64 = 0xD1B5_4A32_D192_ED03;
const TWO53: f64 = 9007199254740992.0; // 2^53

/// splitmix64 finalizer; bijective on u64 with good avalanche.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies one replica of the coupled edge labeling.
///
/// The induced labeling `X: edge id -> [0,1)` is a pure function of
/// `(master_seed, replica_index, edge id)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CouplingSeed {
    pub master_seed: u64,
    pub replica_index: u64,
    stream: u64,
}

impl CouplingSeed {
    pub fn new(master_seed: u64, replica_index: u64) -> Self {
        let stream = mix64(
            mix64(master_seed ^ GOLDEN).wrapping_add(replica_index.wrapping_mul(STREAM_SALT)),
        );
        Self { master_seed, replica_index, stream }
    }

    /// Raw 53-bit label of an edge, i.e. `X_e * 2^53` as an integer.
    #[inline]
    pub fn label_bits(&self, edge: u64) -> u64 {
        mix64(self.stream ^ (edge.wrapping_add(1)).wrapping_mul(GOLDEN)) >> 11
    }

    /// Uniform label `X_e in [0,1)` with 53-bit precision.
    #[inline]
    pub fn label(&self, e: EdgeId) -> f64 {
        self.label_bits(e.0) as f64 * (1.0 / TWO53)
    }
}

/// Integer threshold such that `X_e < p  <=>  label_bits(e) < threshold`.
///
/// `p * 2^53` is exact in f64 (multiplication by a power of two), so the
/// integer comparison reproduces the float comparison bit for bit.
#[inline]
pub(crate) fn open_threshold(p: f64) -> u64 {
    if p <= 0.0 {
        0
    } else if p >= 1.0 {
        1 << 53
    } else {
        (p * TWO53).ceil() as u64
    }
}

/// Whether edge `e` is p-open under the given replica labels.
pub fn edge_open(seed: &CouplingSeed, e: EdgeId, p: f64) -> bool {
    seed.label_bits(e.0) < open_threshold(p)
}

/// Connected component of an origin under the open edges, with intrinsic
/// distances. `members` is in BFS discovery order and `dists[i]` is the
/// intrinsic distance of `members[i]`.
#[derive(Debug, Clone)]
pub struct Cluster {
    pub origin: u64,
    pub members: Vec<u64>,
    pub dists: Vec<u32>,
    pub open_edges_within: u64,
    pub truncated: bool,
}

impl Cluster {
    pub fn size(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn dist_of(&self, v: u64) -> Option<u32> {
        self.members.iter().position(|&m| m == v).map(|i| self.dists[i])
    }
}

/// Intrinsic ball of one radius: vertex set, exact-distance shell, and the
/// number of open edges with both endpoints inside.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallSnapshot {
    pub radius: u64,
    pub ball: Vec<u64>,
    pub boundary: Vec<u64>,
    pub edge_count: u64,
}

/// Count of edges touched during an exploration whose label fell in
/// `[p_low, p_high)` — the sprinkled increment of the coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SprinkleReport {
    pub p_low: f64,
    pub p_high: f64,
    pub sprinkled_count: u64,
}

/// Exploration limits; `cap` bounds the member count, `r_max` the radius.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ExploreSpec {
    pub cap: u64,
    pub r_max: u32,
    /// Integer label thresholds `[lo, hi)` for sprinkle counting.
    pub sprinkle: Option<(u64, u64)>,
}

impl ExploreSpec {
    pub fn cluster(cap: u64) -> Self {
        Self { cap, r_max: u32::MAX, sprinkle: None }
    }

    pub fn ball(r_max: u32) -> Self {
        Self { cap: u64::MAX, r_max, sprinkle: None }
    }
}

/// Aggregate view of one exploration.
#[derive(Debug, Clone)]
pub(crate) struct ExploreStats {
    pub members: u64,
    pub max_dist: u32,
    pub truncated: bool,
    /// `level_sizes[r]` = number of vertices at intrinsic distance exactly r.
    pub level_sizes: Vec<u64>,
    /// `level_edges[r]` = open in-ball edges whose farther endpoint is at r.
    pub level_edges: Vec<u64>,
    pub sprinkled: u64,
}

/// Reusable BFS scratch. One instance per worker thread; all state is
/// epoch-stamped so consecutive explorations cost O(visited), not O(n).
pub(crate) struct Explorer {
    mark: Vec<u32>,
    done: Vec<u32>,
    dist: Vec<u32>,
    epoch: u32,
    /// Visit order; doubles as the BFS queue.
    pub order: Vec<u64>,
}

impl Explorer {
    pub fn new(n: u64) -> Self {
        let n = n as usize;
        Self {
            mark: vec![0; n],
            done: vec![0; n],
            dist: vec![0; n],
            epoch: 0,
            order: Vec::new(),
        }
    }

    pub fn dist_of(&self, v: u64) -> u32 {
        debug_assert_eq!(self.mark[v as usize], self.epoch);
        self.dist[v as usize]
    }

    pub fn visited(&self, v: u64) -> bool {
        self.mark[v as usize] == self.epoch
    }

    /// BFS from `origin` over p-open edges subject to `spec`.
    ///
    /// `truncated` is set only when the component provably exceeds `cap`
    /// (an open edge to an unvisited vertex was seen after the cap filled),
    /// so a component of exactly `cap` vertices is not flagged.
    pub fn explore(
        &mut self,
        g: &TransitiveGraph,
        seed: &CouplingSeed,
        p: f64,
        origin: u64,
        spec: ExploreSpec,
    ) -> ExploreStats {
        debug_assert!(origin < g.n());
        debug_assert!(spec.cap >= 1);
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            // Stamp arrays are only valid relative to the current epoch;
            // clear them on wraparound.
            self.mark.iter_mut().for_each(|m| *m = 0);
            self.done.iter_mut().for_each(|m| *m = 0);
            self.epoch = 1;
        }
        let threshold = open_threshold(p);
        let stream = seed.stream;
        let epoch = self.epoch;

        self.order.clear();
        self.order.push(origin);
        self.mark[origin as usize] = epoch;
        self.dist[origin as usize] = 0;

        let mut level_sizes = vec![1u64];
        let mut level_edges = vec![0u64];
        let mut sprinkled = 0u64;
        let mut truncated = false;
        let mut capped = self.order.len() as u64 >= spec.cap;

        let mut head = 0usize;
        'bfs: while head < self.order.len() {
            let u = self.order[head];
            head += 1;
            let du = self.dist[u as usize];
            self.done[u as usize] = epoch;
            let deg = g.degree_of(u);
            for slot in 0..deg {
                let (v, eid) = g.incident(u, slot);
                let vi = v as usize;
                let bits = mix64(stream ^ (eid.wrapping_add(1)).wrapping_mul(GOLDEN)) >> 11;
                let first_touch = self.done[vi] != epoch;
                if let Some((lo, hi)) = spec.sprinkle {
                    if first_touch && bits >= lo && bits < hi {
                        sprinkled += 1;
                    }
                }
                if bits >= threshold {
                    continue; // closed edge
                }
                if self.mark[vi] == epoch {
                    if first_touch {
                        // In-ball open edge, counted once from the endpoint
                        // processed first; the farther endpoint's level owns it.
                        level_edges[self.dist[vi] as usize] += 1;
                    }
                } else if capped {
                    truncated = true;
                    break 'bfs;
                } else if du < spec.r_max {
                    self.mark[vi] = epoch;
                    self.dist[vi] = du + 1;
                    self.order.push(v);
                    let level = (du + 1) as usize;
                    if level == level_sizes.len() {
                        level_sizes.push(0);
                        level_edges.push(0);
                    }
                    level_sizes[level] += 1;
                    level_edges[level] += 1;
                    if self.order.len() as u64 >= spec.cap {
                        capped = true;
                    }
                }
            }
        }

        ExploreStats {
            members: self.order.len() as u64,
            max_dist: (level_sizes.len() - 1) as u32,
            truncated,
            level_sizes,
            level_edges,
            sprinkled,
        }
    }
}

/// BFS over open edges from `origin`, visiting at most `cap` vertices.
///
/// Truncation is a flagged outcome, not an error; distances of returned
/// members are exact either way.
pub fn explore_cluster(
    g: &TransitiveGraph,
    seed: &CouplingSeed,
    p: f64,
    origin: u64,
    cap: u64,
) -> Result<Cluster, Error> {
    if origin >= g.n() {
        return Err(Error::Usage(format!("origin {origin} out of range (n={})", g.n())));
    }
    if cap < 1 {
        return Err(Error::Usage("exploration cap must be at least 1".into()));
    }
    let mut ex = Explorer::new(g.n());
    let stats = ex.explore(g, seed, p, origin, ExploreSpec::cluster(cap));
    let members = ex.order.clone();
    let dists = members.iter().map(|&v| ex.dist_of(v)).collect();
    Ok(Cluster {
        origin,
        members,
        dists,
        open_edges_within: stats.level_edges.iter().sum(),
        truncated: stats.truncated,
    })
}

/// Intrinsic balls `B_p(origin, r)` for r = 0..=r_max under one labeling.
///
/// The sequence is nested; once a shell is empty all later snapshots carry
/// the same ball with an empty boundary.
pub fn grow_ball(
    g: &TransitiveGraph,
    seed: &CouplingSeed,
    p: f64,
    origin: u64,
    r_max: u64,
) -> Result<Vec<BallSnapshot>, Error> {
    if origin >= g.n() {
        return Err(Error::Usage(format!("origin {origin} out of range (n={})", g.n())));
    }
    let horizon = r_max.min(u32::MAX as u64 - 1) as u32;
    let mut ex = Explorer::new(g.n());
    let stats = ex.explore(g, seed, p, origin, ExploreSpec::ball(horizon));

    let mut snapshots = Vec::with_capacity(r_max as usize + 1);
    let mut ball: Vec<u64> = Vec::new();
    let mut cursor = 0usize;
    let mut edge_count = 0u64;
    for r in 0..=r_max {
        let mut boundary = Vec::new();
        if r <= stats.max_dist as u64 {
            let level = stats.level_sizes[r as usize] as usize;
            for &v in &ex.order[cursor..cursor + level] {
                ball.push(v);
                boundary.push(v);
            }
            cursor += level;
            edge_count += stats.level_edges[r as usize];
        }
        let mut sorted_ball = ball.clone();
        sorted_ball.sort_unstable();
        boundary.sort_unstable();
        debug_assert!(
            edge_count + 1 >= sorted_ball.len() as u64,
            "ball is connected, so edges >= |ball| - 1"
        );
        snapshots.push(BallSnapshot { radius: r, ball: sorted_ball, boundary, edge_count });
    }
    Ok(snapshots)
}

/// Exact size of the largest open component and its smallest-index member.
///
/// Ties between equal-size components go to the smaller representative.
pub fn largest_component(g: &TransitiveGraph, seed: &CouplingSeed, p: f64) -> (u64, u64) {
    let mut uf = UnionFind::new(g.n());
    uf.populate(g, seed, p);
    uf.largest()
}

/// Union-find over the open edges of one replica; reusable scratch.
pub(crate) struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    pub fn new(n: u64) -> Self {
        assert!(n <= u32::MAX as u64, "full-graph scans need n <= u32::MAX");
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n as usize],
        }
    }

    pub fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i as u32;
        }
        self.size.iter_mut().for_each(|s| *s = 1);
    }

    #[inline]
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let gp = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = gp;
            x = gp;
        }
        x
    }

    #[inline]
    fn union(&mut self, a: u32, b: u32) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return;
        }
        let (big, small) = if self.size[ra as usize] >= self.size[rb as usize] {
            (ra, rb)
        } else {
            (rb, ra)
        };
        self.parent[small as usize] = big;
        self.size[big as usize] += self.size[small as usize];
    }

    /// Unions every p-open edge of the graph.
    pub fn populate(&mut self, g: &TransitiveGraph, seed: &CouplingSeed, p: f64) {
        let threshold = open_threshold(p);
        let stream = seed.stream;
        g.for_each_edge(|eid, u, v| {
            let bits = mix64(stream ^ (eid.wrapping_add(1)).wrapping_mul(GOLDEN)) >> 11;
            if bits < threshold {
                self.union(u as u32, v as u32);
            }
        });
    }

    /// `(size of C1, smallest vertex of C1)`; ties by smallest vertex.
    pub fn largest(&mut self) -> (u64, u64) {
        // Scanning vertices in ascending order means the first vertex seen
        // for each root is that component's smallest member.
        let mut seen_root = vec![false; self.parent.len()];
        let mut best_size = 0u32;
        let mut best_rep = 0u64;
        for v in 0..self.parent.len() as u32 {
            let r = self.find(v);
            if !seen_root[r as usize] {
                seen_root[r as usize] = true;
                let sz = self.size[r as usize];
                if sz > best_size {
                    best_size = sz;
                    best_rep = v as u64;
                }
            }
        }
        (best_size as u64, best_rep)
    }
}

/// Grows balls at each probability of an ascending list under one labeling
/// and reports the sprinkled edge count for each consecutive pair.
pub fn coupled_sweep(
    g: &TransitiveGraph,
    seed: &CouplingSeed,
    origin: u64,
    r_max: u64,
    p_list: &[f64],
) -> Result<(Vec<Vec<BallSnapshot>>, Vec<SprinkleReport>), Error> {
    if p_list.is_empty() {
        return Err(Error::Usage("p_list must be non-empty".into()));
    }
    for w in p_list.windows(2) {
        if w[0] > w[1] {
            return Err(Error::Usage("p_list must be ascending".into()));
        }
    }
    if p_list.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::Usage("probabilities must lie in [0,1]".into()));
    }
    if origin >= g.n() {
        return Err(Error::Usage(format!("origin {origin} out of range (n={})", g.n())));
    }

    let horizon = r_max.min(u32::MAX as u64 - 1) as u32;
    let mut ex = Explorer::new(g.n());
    let mut all_snapshots = Vec::with_capacity(p_list.len());
    let mut reports = Vec::new();
    for (i, &p) in p_list.iter().enumerate() {
        all_snapshots.push(grow_ball(g, seed, p, origin, r_max)?);
        if i > 0 {
            let lo = open_threshold(p_list[i - 1]);
            let hi = open_threshold(p);
            let stats = ex.explore(
                g,
                seed,
                p,
                origin,
                ExploreSpec { cap: u64::MAX, r_max: horizon, sprinkle: Some((lo, hi)) },
            );
            reports.push(SprinkleReport {
                p_low: p_list[i - 1],
                p_high: p,
                sprinkled_count: stats.sprinkled,
            });
        }
    }
    Ok((all_snapshots, reports))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::TransitiveGraph;

    fn three_path() -> TransitiveGraph {
        TransitiveGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn edge_open_extremes_and_monotonicity() {
        let seed = CouplingSeed::new(7, 0);
        for e in 0..1_000_000u64 {
            assert!(!edge_open(&seed, EdgeId(e), 0.0));
            assert!(edge_open(&seed, EdgeId(e), 1.0));
            if edge_open(&seed, EdgeId(e), 0.3) {
                assert!(edge_open(&seed, EdgeId(e), 0.7), "coupling monotone in p");
            }
        }
    }

    #[test]
    fn labels_are_deterministic_and_replica_dependent() {
        let a = CouplingSeed::new(42, 3);
        let b = CouplingSeed::new(42, 3);
        let c = CouplingSeed::new(42, 4);
        let labels_a: Vec<u64> = (0..64).map(|e| a.label_bits(e)).collect();
        let labels_b: Vec<u64> = (0..64).map(|e| b.label_bits(e)).collect();
        let labels_c: Vec<u64> = (0..64).map(|e| c.label_bits(e)).collect();
        assert_eq!(labels_a, labels_b);
        assert_ne!(labels_a, labels_c);
    }

    #[test]
    fn labels_look_uniform() {
        let seed = CouplingSeed::new(123, 0);
        let samples = 100_000u64;
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        let mut bins = [0u64; 16];
        for e in 0..samples {
            let x = seed.label(EdgeId(e));
            assert!((0.0..1.0).contains(&x));
            sum += x;
            sumsq += x * x;
            bins[(x * 16.0) as usize] += 1;
        }
        let mean = sum / samples as f64;
        let var = sumsq / samples as f64 - mean * mean;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
        assert!((var - 1.0 / 12.0).abs() < 0.002, "variance {var}");
        // Chi-square with 15 dof: 99.9% quantile is 37.7.
        let expected = samples as f64 / 16.0;
        let chi2: f64 = bins.iter().map(|&b| (b as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 45.0, "chi2 {chi2}");
    }

    #[test]
    fn explore_at_p_zero_is_singleton() {
        let g = TransitiveGraph::torus(5, 2).unwrap();
        let c = explore_cluster(&g, &CouplingSeed::new(1, 0), 0.0, 7, u64::MAX).unwrap();
        assert_eq!(c.members, vec![7]);
        assert_eq!(c.dists, vec![0]);
        assert_eq!(c.open_edges_within, 0);
        assert!(!c.truncated);
    }

    #[test]
    fn explore_full_three_path() {
        let g = three_path();
        let c = explore_cluster(&g, &CouplingSeed::new(9, 2), 1.0, 0, u64::MAX).unwrap();
        assert_eq!(c.members, vec![0, 1, 2]);
        assert_eq!(c.dists, vec![0, 1, 2]);
        assert_eq!(c.open_edges_within, 2);
    }

    #[test]
    fn truncation_flags_only_real_overflow() {
        let g = three_path();
        let seed = CouplingSeed::new(5, 0);
        let c = explore_cluster(&g, &seed, 1.0, 0, 2).unwrap();
        assert_eq!(c.size(), 2);
        assert!(c.truncated);
        // Cap equal to the true component size: complete, not truncated.
        let c = explore_cluster(&g, &seed, 1.0, 0, 3).unwrap();
        assert_eq!(c.size(), 3);
        assert!(!c.truncated);
        assert!(matches!(
            explore_cluster(&g, &seed, 1.0, 0, 0),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn grow_ball_on_six_cycle() {
        let g = TransitiveGraph::torus(6, 1).unwrap();
        let snaps = grow_ball(&g, &CouplingSeed::new(3, 1), 1.0, 0, 3).unwrap();
        let sizes: Vec<usize> = snaps.iter().map(|s| s.ball.len()).collect();
        let shells: Vec<usize> = snaps.iter().map(|s| s.boundary.len()).collect();
        assert_eq!(sizes, vec![1, 3, 5, 6]);
        assert_eq!(shells, vec![1, 2, 2, 1]);
        assert_eq!(snaps[3].edge_count, 6, "all cycle edges inside the full ball");
    }

    #[test]
    fn grow_ball_zero_radius() {
        let g = TransitiveGraph::complete(4).unwrap();
        let snaps = grow_ball(&g, &CouplingSeed::new(3, 1), 0.5, 2, 0).unwrap();
        assert_eq!(snaps.len(), 1);
        assert_eq!(snaps[0].ball, vec![2]);
        assert_eq!(snaps[0].boundary, vec![2]);
    }

    #[test]
    fn grow_ball_pads_after_exhaustion() {
        let g = three_path();
        let snaps = grow_ball(&g, &CouplingSeed::new(3, 1), 1.0, 0, 5).unwrap();
        assert_eq!(snaps[2].ball, vec![0, 1, 2]);
        for r in 3..=5 {
            assert_eq!(snaps[r].ball, snaps[2].ball);
            assert!(snaps[r].boundary.is_empty());
            assert_eq!(snaps[r].edge_count, snaps[2].edge_count);
        }
    }

    #[test]
    fn largest_component_extremes() {
        let g = TransitiveGraph::torus(4, 2).unwrap();
        let seed = CouplingSeed::new(11, 0);
        assert_eq!(largest_component(&g, &seed, 0.0), (1, 0));
        assert_eq!(largest_component(&g, &seed, 1.0), (16, 0));
    }

    #[test]
    fn largest_component_matches_bfs_scan() {
        let g = TransitiveGraph::hamming(6).unwrap();
        for rep in 0..20 {
            let seed = CouplingSeed::new(77, rep);
            for &p in &[0.1, 0.2, 0.35] {
                let (c1, _) = largest_component(&g, &seed, p);
                let mut best = 0u64;
                let mut seen = vec![false; g.n() as usize];
                for v in 0..g.n() {
                    if !seen[v as usize] {
                        let c = explore_cluster(&g, &seed, p, v, u64::MAX).unwrap();
                        for &m in &c.members {
                            seen[m as usize] = true;
                        }
                        best = best.max(c.size());
                    }
                }
                assert_eq!(c1, best, "p={p} rep={rep}");
            }
        }
    }

    #[test]
    fn coupled_sweep_identical_ps() {
        let g = TransitiveGraph::torus(4, 3).unwrap();
        let (snaps, reports) =
            coupled_sweep(&g, &CouplingSeed::new(8, 0), 0, 4, &[0.4, 0.4]).unwrap();
        assert_eq!(snaps[0], snaps[1]);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].sprinkled_count, 0);
    }

    #[test]
    fn coupled_sweep_zero_to_one_on_k4() {
        let g = TransitiveGraph::complete(4).unwrap();
        let (snaps, _) = coupled_sweep(&g, &CouplingSeed::new(8, 0), 0, 1, &[0.0, 1.0]).unwrap();
        assert_eq!(snaps[0][1].ball.len(), 1);
        assert_eq!(snaps[1][1].ball.len(), 4);
    }

    #[test]
    fn coupled_sweep_nesting_holds() {
        let g = TransitiveGraph::torus(4, 3).unwrap();
        for rep in 0..300 {
            let seed = CouplingSeed::new(4242, rep);
            let (snaps, _) = coupled_sweep(&g, &seed, 0, 5, &[0.1, 0.2, 0.3]).unwrap();
            for i in 1..snaps.len() {
                for r in 0..snaps[i].len() {
                    let smaller = &snaps[i - 1][r].ball;
                    let larger = &snaps[i][r].ball;
                    assert!(
                        smaller.iter().all(|v| larger.binary_search(v).is_ok()),
                        "nesting violated at rep={rep} i={i} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn sprinkle_counts_touched_edges_in_range() {
        // On the 3-path at p=1 every edge is explored once; labels fall in
        // [0,1), so the full range counts exactly the two edges.
        let g = three_path();
        let seed = CouplingSeed::new(1, 0);
        let (_, reports) = coupled_sweep(&g, &seed, 1, 2, &[0.0, 1.0]).unwrap();
        assert_eq!(reports[0].sprinkled_count, 2);
    }

    #[test]
    fn intrinsic_distances_shrink_with_p() {
        let g = TransitiveGraph::hamming(7).unwrap();
        for rep in 0..50 {
            let seed = CouplingSeed::new(99, rep);
            let lo = explore_cluster(&g, &seed, 0.15, 0, u64::MAX).unwrap();
            let hi = explore_cluster(&g, &seed, 0.4, 0, u64::MAX).unwrap();
            for (i, &v) in lo.members.iter().enumerate() {
                let dh = hi.dist_of(v).expect("cluster nesting");
                assert!(dh <= lo.dists[i], "distance monotone at rep={rep}");
            }
        }
    }
}
