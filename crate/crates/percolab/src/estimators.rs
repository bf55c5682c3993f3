//! Monte Carlo estimators with confidence intervals for the percolation
//! functionals: susceptibility, critical point, triangle diagram, intrinsic
//! ball growth, one-arm probability, cluster-size tail and largest-cluster
//! statistics.
//!
//! All estimators fix the origin at vertex 0 (transitivity makes the choice
//! arbitrary); explicit irregular graphs are refused unless they were marked
//! with [`TransitiveGraph::with_irregular_ok`]. Replicas aggregate through
//! integer moments folded in fixed chunk order, so every estimate is
//! bit-identical regardless of worker count.

use crate::graphs::TransitiveGraph;
use crate::perc::{open_threshold, CouplingSeed, ExploreSpec, Explorer, UnionFind};
use crate::stats::{par_replicas_scratch, quantiles, Estimate, Moments, Quantiles};
use crate::Error;

/// Above this size a full exploration cap must be chosen explicitly.
pub const CAP_MANDATORY_ABOVE: u64 = 1_000_000;

/// Vertex-count limit for the triangle estimator (component labeling of
/// three configurations per replica).
pub const TRIANGLE_MAX_N: u64 = 100_000;

/// Replica chunk for cheap per-replica work (single-cluster exploration).
const LIGHT_CHUNK: u64 = 512;

/// Replica chunk for expensive per-replica work (full-graph scans).
const HEAVY_CHUNK: u64 = 1;

pub const ORIGIN: u64 = 0;

/// The scaling window `p_center ± A / (d n^(1/3))`, clamped to [0,1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub a: f64,
    pub p_center: f64,
    pub half_width: f64,
    pub interval: (f64, f64),
}

impl WindowSpec {
    pub fn new(a: f64, p_center: f64, g: &TransitiveGraph) -> Self {
        let half_width = a / (g.degree() as f64 * (g.n() as f64).cbrt());
        let interval = (
            (p_center - half_width).max(0.0),
            (p_center + half_width).min(1.0),
        );
        Self { a, p_center, half_width, interval }
    }

    /// Evenly spaced grid across the window; 5 points give
    /// {-A, -A/2, 0, A/2, A} * d^(-1) n^(-1/3) around the center.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        assert!(points >= 1);
        if points == 1 {
            return vec![self.p_center.clamp(0.0, 1.0)];
        }
        (0..points)
            .map(|i| {
                let t = -1.0 + 2.0 * i as f64 / (points - 1) as f64;
                (self.p_center + t * self.half_width).clamp(0.0, 1.0)
            })
            .collect()
    }
}

fn check_p(p: f64) -> Result<(), Error> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Usage(format!("p = {p} outside [0,1]")));
    }
    Ok(())
}

fn check_origin_graph(g: &TransitiveGraph) -> Result<(), Error> {
    if !g.regular() && !g.irregular_ok() {
        return Err(Error::Usage(
            "graph is not regular; origin-based estimators assume transitivity \
             (use --force-irregular / with_irregular_ok to override)"
                .into(),
        ));
    }
    Ok(())
}

fn default_cap(g: &TransitiveGraph, cap: Option<u64>) -> Result<u64, Error> {
    match cap {
        Some(c) if c >= 1 => Ok(c),
        Some(_) => Err(Error::Usage("exploration cap must be at least 1".into())),
        None if g.n() <= CAP_MANDATORY_ABOVE => Ok(g.n()),
        None => Err(Error::Usage(format!(
            "an exploration cap is mandatory for n > {CAP_MANDATORY_ABOVE}"
        ))),
    }
}

/// Susceptibility estimate with its truncation tally.
#[derive(Debug, Clone)]
pub struct ChiOutcome {
    pub estimate: Estimate,
    /// Replicas whose cluster exceeded the cap and were recorded as `cap`;
    /// nonzero only in tail-safe mode, and a bias warning for the caller.
    pub truncated_replicas: u64,
}

/// Mean cluster size of the origin, `chi(p) = E|C(0)|`.
///
/// Truncated clusters abort the run unless `tail_safe` converts them to cap
/// values (see [`estimate_chi_with`]); the default cap of `n` never
/// truncates.
pub fn estimate_chi(
    g: &TransitiveGraph,
    p: f64,
    replicas: u64,
    master_seed: u64,
) -> Result<Estimate, Error> {
    Ok(estimate_chi_with(g, p, replicas, master_seed, None, false)?.estimate)
}

pub fn estimate_chi_with(
    g: &TransitiveGraph,
    p: f64,
    replicas: u64,
    master_seed: u64,
    cap: Option<u64>,
    tail_safe: bool,
) -> Result<ChiOutcome, Error> {
    check_p(p)?;
    check_origin_graph(g)?;
    if replicas < 2 {
        return Err(Error::Usage("chi needs at least 2 replicas".into()));
    }
    let cap = default_cap(g, cap)?;
    let probe = chi_probe(g, p, master_seed, 0, replicas, cap);
    if probe.truncated > 0 && !tail_safe {
        return Err(Error::Usage(format!(
            "{} of {} replicas exceeded the exploration cap {}; rerun with a \
             larger cap or tail_safe to accept cap-valued (biased-low) samples",
            probe.truncated, replicas, cap
        )));
    }
    Ok(ChiOutcome {
        estimate: probe.moments.estimate(false),
        truncated_replicas: probe.truncated,
    })
}

struct ChiProbe {
    moments: Moments,
    truncated: u64,
}

/// Samples `min(|C(0)|, cap)` over replica indices `[first, first+count)`.
fn chi_probe(
    g: &TransitiveGraph,
    p: f64,
    master_seed: u64,
    first_replica: u64,
    count: u64,
    cap: u64,
) -> ChiProbe {
    par_replicas_scratch(
        count,
        LIGHT_CHUNK,
        || ChiProbe { moments: Moments::default(), truncated: 0 },
        || Explorer::new(g.n()),
        |ex, acc, r| {
            let seed = CouplingSeed::new(master_seed, first_replica + r);
            let stats = ex.explore(g, &seed, p, ORIGIN, ExploreSpec::cluster(cap));
            acc.moments.push(stats.members);
            acc.truncated += u64::from(stats.truncated);
        },
        |a, b| {
            a.moments.merge(&b.moments);
            a.truncated += b.truncated;
        },
    )
}

/// Outcome of the noisy-bisection critical-point solve.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    pub p_c_hat: f64,
    pub lambda: f64,
    /// Final bisection bracket; contains `p_c_hat`.
    pub bracket: (f64, f64),
    /// Fresh-sample susceptibility estimate at `p_c_hat`.
    pub chi_at_p_c_hat: Estimate,
    /// Probe budget in force when the solve stopped.
    pub samples_per_probe: u64,
    /// Set when the retry budget ran out before the bracket hit tolerance.
    pub indistinguishable: bool,
    /// Whether `chi_at_p_c_hat`'s 99% CI contains `lambda * n^(1/3)`.
    pub self_consistent: bool,
    /// Total midpoint probes taken (diagnostic).
    pub probes: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOpts {
    /// Maximum probe-budget doublings across the whole solve.
    pub retry_cap: u32,
    /// Initial exploration cap for probes; escalates automatically.
    pub initial_cap: Option<u64>,
    /// Ceiling on the probe budget; defaults to a cost-based heuristic
    /// (roughly constant work per probe across graph sizes).
    pub max_probe_replicas: Option<u64>,
}

impl Default for SolveOpts {
    fn default() -> Self {
        Self { retry_cap: 20, initial_cap: None, max_probe_replicas: None }
    }
}

/// Solves `chi(p) = lambda n^(1/3)` by noisy bisection on the Monte Carlo
/// susceptibility; monotonicity of the true chi under the coupling makes
/// bisection valid.
///
/// The bracket starts at [0,1] and moves only when the target lies outside
/// the probe's 99% CI; otherwise the probe budget doubles, up to a retry
/// cap, after which the result carries the `indistinguishable` flag. Probe
/// explorations are capped for speed: capped samples lower-bound the true
/// susceptibility, so "move down" stays sound under truncation, while "move
/// up" is taken only from truncation-free probes; the cap escalates toward
/// `n` whenever truncation blocks a decision.
pub fn solve_pc(
    g: &TransitiveGraph,
    lambda: f64,
    tolerance: f64,
    replicas_per_probe: u64,
    master_seed: u64,
) -> Result<CriticalPoint, Error> {
    solve_pc_with(g, lambda, tolerance, replicas_per_probe, master_seed, SolveOpts::default())
}

pub fn solve_pc_with(
    g: &TransitiveGraph,
    lambda: f64,
    tolerance: f64,
    replicas_per_probe: u64,
    master_seed: u64,
    opts: SolveOpts,
) -> Result<CriticalPoint, Error> {
    check_origin_graph(g)?;
    if tolerance <= 0.0 {
        return Err(Error::Usage("tolerance must be positive".into()));
    }
    if replicas_per_probe < 2 {
        return Err(Error::Usage("need at least 2 replicas per probe".into()));
    }
    let n = g.n() as f64;
    let target = lambda * n.cbrt();
    if !(target > 1.0 && target < n) {
        return Err(Error::Infeasible(format!(
            "lambda * n^(1/3) = {target} must lie strictly inside (1, {n}); \
             feasible lambda range is ({}, {})",
            1.0 / n.cbrt(),
            n / n.cbrt()
        )));
    }

    let mut cap = opts
        .initial_cap
        .unwrap_or(((2.0 * target).ceil() as u64).max(64))
        .clamp(1, g.n());
    // Probe-budget ceiling keeping per-probe work near constant across
    // sizes: one cluster exploration costs about target * d edge checks.
    let budget_ceiling = opts
        .max_probe_replicas
        .unwrap_or_else(|| {
            let per_replica = (target * g.degree() as f64).max(1.0);
            ((2e11 / per_replica) as u64).clamp(100_000, 50_000_000)
        })
        .max(replicas_per_probe);
    let mut budget = replicas_per_probe;
    let mut doublings = 0u32;
    let mut next_replica = 0u64;
    let mut probes = 0u64;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut indistinguishable = false;

    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        loop {
            let probe = chi_probe(g, mid, master_seed, next_replica, budget, cap);
            next_replica += budget;
            probes += 1;
            let est = probe.moments.estimate(false);
            if est.ci99.0 > target {
                // Capped samples only understate chi, so this move is sound
                // even when clusters were truncated.
                hi = mid;
                break;
            }
            if est.ci99.1 < target && probe.truncated == 0 {
                lo = mid;
                break;
            }
            if probe.truncated > 0 && cap < g.n() {
                cap = cap.saturating_mul(4).min(g.n());
                continue;
            }
            if doublings < opts.retry_cap && budget < budget_ceiling {
                budget = (budget * 2).min(budget_ceiling);
                doublings += 1;
                continue;
            }
            indistinguishable = true;
            break;
        }
        if indistinguishable {
            break;
        }
    }

    let p_c_hat = 0.5 * (lo + hi);
    // Fresh, uncapped self-consistency estimate at the solution. Its budget
    // is a fraction of the final probe budget so the check's CI stays
    // commensurate with what a bracket of width `tolerance` can pin down.
    let check_budget = (budget / 16).max(replicas_per_probe).max(2);
    let check =
        chi_probe(g, p_c_hat, master_seed, next_replica, check_budget, default_cap(g, None)?);
    let chi_at_p_c_hat = check.moments.estimate(false);
    let self_consistent = check.truncated == 0 && chi_at_p_c_hat.contains99(target);

    Ok(CriticalPoint {
        p_c_hat,
        lambda,
        bracket: (lo, hi),
        chi_at_p_c_hat,
        samples_per_probe: budget,
        indistinguishable,
        self_consistent,
        probes,
    })
}

/// Per-pair triangle-diagram estimates and the triangle-condition excess.
#[derive(Debug, Clone)]
pub struct TriangleReport {
    pub per_pair: Vec<((u64, u64), Estimate)>,
    /// max over pairs of (nabla_hat - 1{x=y}).
    pub max_excess: f64,
    /// The mean-field threshold the excess is compared against (reported,
    /// never asserted): the finite triangle condition wants excess <= 1/4.
    pub a0_reference: f64,
}

/// Unbiased triangle-diagram estimator.
///
/// Each replica draws three independent configurations (replica indices
/// 3r, 3r+1, 3r+2) and evaluates `sum over u in C1(x) of |C2(u) ∩ C3(y)|`;
/// independence factorizes the expectation into the triple product defining
/// `nabla_p(x, y)`.
pub fn estimate_triangle(
    g: &TransitiveGraph,
    p: f64,
    pairs: &[(u64, u64)],
    replicas: u64,
    master_seed: u64,
) -> Result<TriangleReport, Error> {
    check_p(p)?;
    check_origin_graph(g)?;
    if g.n() > TRIANGLE_MAX_N {
        return Err(Error::Usage(format!(
            "triangle estimator is limited to n <= {TRIANGLE_MAX_N} \
             (component labeling of 3 configurations per replica)"
        )));
    }
    if replicas < 2 {
        return Err(Error::Usage("triangle needs at least 2 replicas".into()));
    }
    for &(x, y) in pairs {
        if x >= g.n() || y >= g.n() {
            return Err(Error::Usage(format!("pair ({x},{y}) out of range (n={})", g.n())));
        }
    }

    let mut per_pair = Vec::with_capacity(pairs.len());
    let mut max_excess = f64::NEG_INFINITY;
    for &(x, y) in pairs {
        let moments = par_replicas_scratch(
            replicas,
            32,
            Moments::default,
            || TriangleScratch::new(g.n()),
            |ws, acc, r| {
                acc.push(ws.sample(g, p, master_seed, r, x, y));
            },
            |a, b| a.merge(&b),
        );
        let est = moments.estimate(false);
        let excess = est.mean - f64::from(u8::from(x == y));
        max_excess = max_excess.max(excess);
        per_pair.push(((x, y), est));
    }
    Ok(TriangleReport { per_pair, max_excess, a0_reference: 0.25 })
}

/// Workspace for one triangle replica: two cluster explorers plus a
/// persistent component labeling of the middle configuration.
struct TriangleScratch {
    ex1: Explorer,
    ex3: Explorer,
    comp: Vec<u32>,
    stamp: Vec<u32>,
    epoch: u32,
    counts: Vec<u64>,
    queue: Vec<u64>,
}

impl TriangleScratch {
    fn new(n: u64) -> Self {
        Self {
            ex1: Explorer::new(n),
            ex3: Explorer::new(n),
            comp: vec![0; n as usize],
            stamp: vec![0; n as usize],
            epoch: 0,
            counts: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn sample(
        &mut self,
        g: &TransitiveGraph,
        p: f64,
        master_seed: u64,
        replica: u64,
        x: u64,
        y: u64,
    ) -> u64 {
        let s1 = CouplingSeed::new(master_seed, 3 * replica);
        let s2 = CouplingSeed::new(master_seed, 3 * replica + 1);
        let s3 = CouplingSeed::new(master_seed, 3 * replica + 2);
        self.ex3.explore(g, &s3, p, y, ExploreSpec::cluster(u64::MAX));
        self.ex1.explore(g, &s1, p, x, ExploreSpec::cluster(u64::MAX));

        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        self.counts.clear();
        let threshold = open_threshold(p);

        let mut total = 0u64;
        for i in 0..self.ex1.order.len() {
            let u = self.ex1.order[i];
            if self.stamp[u as usize] != self.epoch {
                // Label C2(u) and count its overlap with C3(y).
                let id = self.counts.len() as u32;
                let mut overlap = 0u64;
                self.queue.clear();
                self.queue.push(u);
                self.stamp[u as usize] = self.epoch;
                self.comp[u as usize] = id;
                let mut head = 0;
                while head < self.queue.len() {
                    let w = self.queue[head];
                    head += 1;
                    if self.ex3.visited(w) {
                        overlap += 1;
                    }
                    for slot in 0..g.degree_of(w) {
                        let (v, eid) = g.incident(w, slot);
                        if s2.label_bits(eid) < threshold && self.stamp[v as usize] != self.epoch {
                            self.stamp[v as usize] = self.epoch;
                            self.comp[v as usize] = id;
                            self.queue.push(v);
                        }
                    }
                }
                self.counts.push(overlap);
            }
            total += self.counts[self.comp[u as usize] as usize];
        }
        total
    }
}

/// Mean ball volumes `G(r) = E|B_p(0,r)|` and open-edge counts
/// `E|E(B_p(0,r))|` for r = 0..=r_max.
#[derive(Debug, Clone)]
pub struct BallGrowth {
    pub volume: Vec<Estimate>,
    pub edges: Vec<Estimate>,
}

pub fn estimate_ball_growth(
    g: &TransitiveGraph,
    p: f64,
    r_max: u64,
    replicas: u64,
    master_seed: u64,
) -> Result<BallGrowth, Error> {
    check_p(p)?;
    check_origin_graph(g)?;
    if r_max < 1 {
        return Err(Error::Usage("r_max must be at least 1".into()));
    }
    if replicas < 2 {
        return Err(Error::Usage("ball growth needs at least 2 replicas".into()));
    }
    let levels = r_max as usize + 1;
    let horizon = r_max.min(u32::MAX as u64 - 1) as u32;
    let acc = par_replicas_scratch(
        replicas,
        LIGHT_CHUNK,
        || (vec![Moments::default(); levels], vec![Moments::default(); levels]),
        || Explorer::new(g.n()),
        |ex, (vols, edges), r| {
            let seed = CouplingSeed::new(master_seed, r);
            let stats = ex.explore(g, &seed, p, ORIGIN, ExploreSpec::ball(horizon));
            let mut vol = 0u64;
            let mut edge = 0u64;
            for radius in 0..levels {
                if radius < stats.level_sizes.len() {
                    vol += stats.level_sizes[radius];
                    edge += stats.level_edges[radius];
                }
                vols[radius].push(vol);
                edges[radius].push(edge);
            }
        },
        |a, b| {
            for (x, y) in a.0.iter_mut().zip(&b.0) {
                x.merge(y);
            }
            for (x, y) in a.1.iter_mut().zip(&b.1) {
                x.merge(y);
            }
        },
    );
    Ok(BallGrowth {
        volume: acc.0.iter().map(|m| m.estimate(false)).collect(),
        edges: acc.1.iter().map(|m| m.estimate(false)).collect(),
    })
}

/// One-arm probabilities `P(H_p(r))` for each requested radius.
pub fn estimate_one_arm(
    g: &TransitiveGraph,
    p: f64,
    r_list: &[u64],
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<(u64, Estimate)>, Error> {
    let profile = estimate_cluster_profile(g, p, r_list, &[], replicas, master_seed)?;
    Ok(profile.one_arm)
}

/// Tail probabilities `P(|C(0)| >= k)` for each requested k.
pub fn estimate_tail(
    g: &TransitiveGraph,
    p: f64,
    k_list: &[u64],
    replicas: u64,
    master_seed: u64,
) -> Result<Vec<(u64, Estimate)>, Error> {
    let profile = estimate_cluster_profile(g, p, &[], k_list, replicas, master_seed)?;
    Ok(profile.tail)
}

/// Joint radial/tail profile of the origin cluster from a single
/// exploration per replica.
#[derive(Debug, Clone)]
pub struct ClusterProfile {
    pub chi: Estimate,
    pub one_arm: Vec<(u64, Estimate)>,
    pub tail: Vec<(u64, Estimate)>,
}

/// Shared exploration behind [`estimate_one_arm`], [`estimate_tail`] and a
/// free susceptibility estimate: each replica explores `C(0)` once (capped
/// at `max(k_list)` when no one-arm radii are requested, fully otherwise)
/// and reads off all three statistics.
pub fn estimate_cluster_profile(
    g: &TransitiveGraph,
    p: f64,
    r_list: &[u64],
    k_list: &[u64],
    replicas: u64,
    master_seed: u64,
) -> Result<ClusterProfile, Error> {
    check_p(p)?;
    check_origin_graph(g)?;
    if replicas < 2 {
        return Err(Error::Usage("need at least 2 replicas".into()));
    }
    if r_list.iter().any(|&r| r < 1) {
        return Err(Error::Usage("one-arm radii must be >= 1".into()));
    }
    if k_list.iter().any(|&k| k < 1) {
        return Err(Error::Usage("tail thresholds must be >= 1".into()));
    }
    // Tail-only runs may truncate at max(k); eccentricity queries need the
    // full cluster.
    let cap = if r_list.is_empty() {
        default_cap(g, k_list.iter().max().copied())?
    } else {
        default_cap(g, None)?
    };

    struct Acc {
        chi: Moments,
        arms: Vec<Moments>,
        tails: Vec<Moments>,
    }
    let acc = par_replicas_scratch(
        replicas,
        LIGHT_CHUNK,
        || Acc {
            chi: Moments::default(),
            arms: vec![Moments::default(); r_list.len()],
            tails: vec![Moments::default(); k_list.len()],
        },
        || Explorer::new(g.n()),
        |ex, acc, r| {
            let seed = CouplingSeed::new(master_seed, r);
            let stats = ex.explore(g, &seed, p, ORIGIN, ExploreSpec::cluster(cap));
            acc.chi.push(stats.members);
            for (i, &radius) in r_list.iter().enumerate() {
                acc.arms[i].push(u64::from(stats.max_dist as u64 >= radius));
            }
            for (i, &k) in k_list.iter().enumerate() {
                // Truncated clusters have >= cap >= k members.
                let reached = stats.truncated || stats.members >= k;
                acc.tails[i].push(u64::from(reached));
            }
        },
        |a, b| {
            a.chi.merge(&b.chi);
            for (x, y) in a.arms.iter_mut().zip(&b.arms) {
                x.merge(y);
            }
            for (x, y) in a.tails.iter_mut().zip(&b.tails) {
                x.merge(y);
            }
        },
    );
    Ok(ClusterProfile {
        chi: acc.chi.estimate(false),
        one_arm: r_list
            .iter()
            .zip(&acc.arms)
            .map(|(&r, m)| (r, m.estimate(true)))
            .collect(),
        tail: k_list
            .iter()
            .zip(&acc.tails)
            .map(|(&k, m)| (k, m.estimate(true)))
            .collect(),
    })
}

/// Largest-component statistics: mean with CI plus empirical quantiles, raw
/// and rescaled by n^(2/3).
#[derive(Debug, Clone)]
pub struct C1Stats {
    pub size: Estimate,
    pub quantiles: Quantiles,
    pub scaled_mean: f64,
    pub scaled: Quantiles,
    /// Raw per-replica |C1| in replica order.
    pub samples: Vec<u64>,
}

/// Full-graph component scan per replica; exact |C1| every time.
pub fn estimate_c1(
    g: &TransitiveGraph,
    p: f64,
    replicas: u64,
    master_seed: u64,
) -> Result<C1Stats, Error> {
    check_p(p)?;
    if replicas < 2 {
        return Err(Error::Usage("c1 needs at least 2 replicas".into()));
    }
    struct Acc {
        moments: Moments,
        samples: Vec<u64>,
    }
    let acc = par_replicas_scratch(
        replicas,
        HEAVY_CHUNK,
        || Acc { moments: Moments::default(), samples: Vec::new() },
        || UnionFind::new(g.n()),
        |uf, acc, r| {
            uf.reset();
            uf.populate(g, &CouplingSeed::new(master_seed, r), p);
            let (size, _) = uf.largest();
            acc.moments.push(size);
            acc.samples.push(size);
        },
        |a, mut b| {
            a.moments.merge(&b.moments);
            a.samples.append(&mut b.samples);
        },
    );
    let scale = (g.n() as f64).powf(2.0 / 3.0);
    let q = quantiles(&acc.samples);
    Ok(C1Stats {
        size: acc.moments.estimate(false),
        quantiles: q,
        scaled_mean: acc.moments.estimate(false).mean / scale,
        scaled: Quantiles {
            median: q.median / scale,
            q05: q.q05 / scale,
            q95: q.q95 / scale,
        },
        samples: acc.samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{self, Quantity};

    fn k3() -> TransitiveGraph {
        TransitiveGraph::complete(3).unwrap()
    }

    fn within_4se(est: &Estimate, exact: f64) -> bool {
        (est.mean - exact).abs() <= 4.0 * est.std_error.max(1e-12)
    }

    #[test]
    fn chi_trivial_endpoints() {
        let g = TransitiveGraph::torus(4, 2).unwrap();
        let e = estimate_chi(&g, 0.0, 100, 1).unwrap();
        assert_eq!(e.mean, 1.0);
        assert_eq!(e.std_error, 0.0);
        let e = estimate_chi(&g, 1.0, 100, 1).unwrap();
        assert_eq!(e.mean, 16.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn chi_matches_oracle_on_triangle() {
        let exact = oracle::exact(&k3(), 0.5, Quantity::Chi { x: 0 }).unwrap().value;
        let est = estimate_chi(&k3(), 0.5, 20_000, 7).unwrap();
        assert!(within_4se(&est, exact), "est {est:?} vs {exact}");
    }

    #[test]
    fn chi_rejects_small_budgets_and_irregular_graphs() {
        assert!(matches!(estimate_chi(&k3(), 0.5, 1, 7), Err(Error::Usage(_))));
        let path = TransitiveGraph::from_edge_list(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(matches!(estimate_chi(&path, 0.5, 10, 7), Err(Error::Usage(_))));
        let e = estimate_chi(&path.with_irregular_ok(), 1.0, 10, 7).unwrap();
        assert_eq!(e.mean, 3.0);
    }

    #[test]
    fn chi_truncation_fails_loudly_without_tail_safe() {
        let g = TransitiveGraph::torus(4, 2).unwrap();
        let err = estimate_chi_with(&g, 1.0, 10, 1, Some(4), false).unwrap_err();
        assert!(format!("{err}").contains("cap"));
        let out = estimate_chi_with(&g, 1.0, 10, 1, Some(4), true).unwrap();
        assert_eq!(out.estimate.mean, 4.0);
        assert_eq!(out.truncated_replicas, 10);
    }

    #[test]
    fn ball_growth_examples() {
        let g = TransitiveGraph::torus(6, 1).unwrap();
        let growth = estimate_ball_growth(&g, 1.0, 2, 50, 3).unwrap();
        assert_eq!(growth.volume[0].mean, 1.0);
        assert_eq!(growth.volume[2].mean, 5.0);
        assert_eq!(growth.volume[2].std_error, 0.0);

        let k2 = TransitiveGraph::complete(2).unwrap();
        let exact = oracle::exact(&k2, 0.5, Quantity::BallMean { x: 0, r: 1 }).unwrap().value;
        let growth = estimate_ball_growth(&k2, 0.5, 1, 20_000, 11).unwrap();
        assert!(within_4se(&growth.volume[1], exact));
    }

    #[test]
    fn ball_growth_is_monotone_in_r() {
        let g = TransitiveGraph::hamming(6).unwrap();
        let growth = estimate_ball_growth(&g, 0.2, 6, 2_000, 5).unwrap();
        for w in growth.volume.windows(2) {
            assert!(w[0].mean <= w[1].mean);
        }
        for w in growth.edges.windows(2) {
            assert!(w[0].mean <= w[1].mean);
        }
    }

    #[test]
    fn one_arm_trivial_and_oracle() {
        let g = TransitiveGraph::torus(6, 1).unwrap();
        let arms = estimate_one_arm(&g, 0.0, &[1], 100, 1).unwrap();
        assert_eq!(arms[0].1.mean, 0.0);
        let arms = estimate_one_arm(&g, 1.0, &[3], 100, 1).unwrap();
        assert_eq!(arms[0].1.mean, 1.0);
        assert!(arms[0].1.wilson99.is_some());

        let exact = oracle::exact(&k3(), 0.5, Quantity::OneArm { x: 0, r: 1 }).unwrap().value;
        let arms = estimate_one_arm(&k3(), 0.5, &[1], 20_000, 2).unwrap();
        assert!(within_4se(&arms[0].1, exact));
    }

    #[test]
    fn tail_trivial_and_oracle() {
        let g = k3();
        let tails = estimate_tail(&g, 0.5, &[1], 100, 1).unwrap();
        assert_eq!(tails[0].1.mean, 1.0);
        let tails = estimate_tail(&g, 0.0, &[2], 100, 1).unwrap();
        assert_eq!(tails[0].1.mean, 0.0);

        let exact = oracle::exact(&g, 0.5, Quantity::Tail { x: 0, k: 3 }).unwrap().value;
        let tails = estimate_tail(&g, 0.5, &[3], 20_000, 2).unwrap();
        assert!(within_4se(&tails[0].1, exact));
    }

    #[test]
    fn c1_trivial_and_oracle() {
        let g = k3();
        let stats = estimate_c1(&g, 0.0, 100, 1).unwrap();
        assert_eq!(stats.size.mean, 1.0);
        assert_eq!(stats.size.std_error, 0.0);
        let stats = estimate_c1(&g, 1.0, 100, 1).unwrap();
        assert_eq!(stats.size.mean, 3.0);

        let exact = oracle::exact(&g, 0.5, Quantity::C1Mean).unwrap().value;
        let stats = estimate_c1(&g, 0.5, 20_000, 9).unwrap();
        assert!(within_4se(&stats.size, exact));
    }

    #[test]
    fn triangle_trivial_endpoints() {
        let g = TransitiveGraph::torus(4, 2).unwrap();
        let rep = estimate_triangle(&g, 0.0, &[(0, 0), (0, 3)], 50, 1).unwrap();
        assert_eq!(rep.per_pair[0].1.mean, 1.0);
        assert_eq!(rep.per_pair[0].1.std_error, 0.0);
        assert_eq!(rep.per_pair[1].1.mean, 0.0);
        assert_eq!(rep.max_excess, 0.0);

        let rep = estimate_triangle(&g, 1.0, &[(0, 5)], 50, 1).unwrap();
        assert_eq!(rep.per_pair[0].1.mean, 256.0, "n^2 when connected");
    }

    #[test]
    fn triangle_matches_oracle_on_triangle_graph() {
        let exact = oracle::exact(&k3(), 0.5, Quantity::Nabla { x: 0, y: 0 }).unwrap().value;
        let rep = estimate_triangle(&k3(), 0.5, &[(0, 0)], 40_000, 13).unwrap();
        assert!(within_4se(&rep.per_pair[0].1, exact), "{rep:?} vs {exact}");
    }

    #[test]
    fn profile_components_agree_with_standalone_estimators() {
        let g = TransitiveGraph::hamming(4).unwrap();
        let profile = estimate_cluster_profile(&g, 0.3, &[1, 2], &[2, 4], 5_000, 21).unwrap();
        let arms = estimate_one_arm(&g, 0.3, &[1, 2], 5_000, 21).unwrap();
        let tails = estimate_tail(&g, 0.3, &[2, 4], 5_000, 21).unwrap();
        assert_eq!(profile.one_arm[0].1.mean, arms[0].1.mean);
        assert_eq!(profile.one_arm[1].1.mean, arms[1].1.mean);
        // Tail-only runs truncate at max(k); indicators are unaffected.
        assert_eq!(profile.tail[0].1.mean, tails[0].1.mean);
        assert_eq!(profile.tail[1].1.mean, tails[1].1.mean);
    }

    #[test]
    fn estimates_are_monotone_in_p_under_shared_seeds() {
        let g = TransitiveGraph::hamming(6).unwrap();
        let ps = [0.1, 0.18, 0.26];
        let mut last_chi = 0.0;
        let mut last_arm = -1.0;
        let mut last_tail = -1.0;
        for &p in &ps {
            let profile = estimate_cluster_profile(&g, p, &[2], &[4], 3_000, 31).unwrap();
            assert!(profile.chi.mean >= last_chi);
            assert!(profile.one_arm[0].1.mean >= last_arm);
            assert!(profile.tail[0].1.mean >= last_tail);
            last_chi = profile.chi.mean;
            last_arm = profile.one_arm[0].1.mean;
            last_tail = profile.tail[0].1.mean;
        }
    }

    #[test]
    fn solve_pc_on_single_edge() {
        // chi(p) = 1 + p, so p_c = 2^(1/3) - 1.
        let g = TransitiveGraph::complete(2).unwrap();
        let cp = solve_pc(&g, 1.0, 1e-3, 5_000, 99).unwrap();
        let exact = 2f64.cbrt() - 1.0;
        assert!(
            (cp.p_c_hat - exact).abs() <= 2e-3,
            "p_c_hat {} vs {exact} (bracket {:?})",
            cp.p_c_hat,
            cp.bracket
        );
        assert!(cp.bracket.0 <= cp.p_c_hat && cp.p_c_hat <= cp.bracket.1);
        assert!(cp.self_consistent, "{cp:?}");
    }

    #[test]
    fn solve_pc_rejects_infeasible_lambda() {
        let g = k3();
        let lambda = (g.n() as f64 + 1.0) / (g.n() as f64).cbrt();
        assert!(matches!(
            solve_pc(&g, lambda, 1e-3, 100, 1),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn window_spec_half_width_is_exact() {
        let g = TransitiveGraph::complete(1000).unwrap();
        let w = WindowSpec::new(1.0, 0.001, &g);
        assert_eq!(w.half_width, 1.0 / (999.0 * 1000f64.cbrt()));
        let grid = w.grid(5);
        assert_eq!(grid.len(), 5);
        assert!((grid[2] - 0.001).abs() < 1e-15);
        assert!((grid[4] - grid[0] - 2.0 * w.half_width).abs() < 1e-15);
        let single = w.grid(1);
        assert_eq!(single, vec![0.001]);
    }
}
