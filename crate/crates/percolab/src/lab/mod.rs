//! Experiment runner: configured sweeps over graph families, sizes and
//! probabilities in the scaling window, with resumable JSON-lines output
//! and scaling-exponent fits.

mod records;

pub use records::{
    export_csv, load_existing, read_records, ExperimentRecord, RecordWriter, SCHEMA_VERSION,
};

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::estimators::{
    estimate_ball_growth, estimate_c1, estimate_cluster_profile, estimate_triangle, solve_pc_with,
    SolveOpts, WindowSpec,
};
use crate::geometry::{survey_c1, MixOutcome, SurveyOpts};
use crate::graphs::TransitiveGraph;
use crate::stats::{ols, quantiles, Moments};
use crate::Error;

/// Which statistics a sweep computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistic {
    Chi,
    Pc,
    Triangle,
    Ball,
    Onearm,
    Tail,
    C1,
    Diam,
    Tmix,
}

impl Statistic {
    pub fn name(self) -> &'static str {
        match self {
            Statistic::Chi => "chi",
            Statistic::Pc => "pc",
            Statistic::Triangle => "triangle",
            Statistic::Ball => "ball",
            Statistic::Onearm => "onearm",
            Statistic::Tail => "tail",
            Statistic::C1 => "c1",
            Statistic::Diam => "diam",
            Statistic::Tmix => "tmix",
        }
    }
}

/// How the sweep chooses retention probabilities per ladder size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PMode {
    /// Solve the critical point and evaluate there.
    AtPcHat,
    /// Solve, then evaluate on a grid across the scaling window.
    WindowGrid,
    /// Evaluate at the probabilities given in `p_list`.
    Explicit,
}

/// A sweep configuration; the TOML schema of `percolab sweep --config`
/// mirrors this struct field for field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(default = "default_schema")]
    pub v: u32,
    /// "complete", "torus", "hamming" or "file:PATH".
    pub family: String,
    /// Ladder of size parameters: n for complete, side for torus, dimension
    /// for hamming; ignored for file graphs.
    #[serde(default)]
    pub sizes: Vec<u64>,
    /// Torus dimension (required for the torus family).
    #[serde(default)]
    pub dim: Option<u32>,
    #[serde(default = "default_one")]
    pub lambda: f64,
    #[serde(default = "default_one", rename = "A")]
    pub a: f64,
    pub p_mode: PMode,
    #[serde(default = "default_window_points")]
    pub window_points: usize,
    #[serde(default)]
    pub p_list: Vec<f64>,
    pub statistics: Vec<Statistic>,
    pub replicas: u64,
    pub master_seed: u64,
    pub out: PathBuf,
    /// Ball-growth radius; default ceil(n^(1/3)).
    #[serde(default)]
    pub r_max: Option<u64>,
    /// One-arm radii; default powers of two up to ceil(n^(1/3)).
    #[serde(default)]
    pub r_list: Vec<u64>,
    /// Tail thresholds; default powers of four up to ceil(n^(2/3)).
    #[serde(default)]
    pub k_list: Vec<u64>,
    /// Number of random off-diagonal triangle pairs besides (0,0).
    #[serde(default = "default_triangle_pairs")]
    pub triangle_pairs: u64,
    /// Bisection tolerance for the critical point; default is a quarter of
    /// the window half-width.
    #[serde(default)]
    pub solve_tolerance: Option<f64>,
    /// Initial probe budget for the critical-point solver.
    #[serde(default)]
    pub solve_replicas: Option<u64>,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_one() -> f64 {
    1.0
}

fn default_window_points() -> usize {
    5
}

fn default_triangle_pairs() -> u64 {
    10
}

impl ExperimentConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)?;
        let config: ExperimentConfig = toml::from_str(&text)
            .map_err(|e| Error::Usage(format!("bad config {}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.statistics.is_empty() {
            return Err(Error::Usage("statistics must be non-empty".into()));
        }
        if self.replicas < 2 {
            return Err(Error::Usage("replicas must be at least 2".into()));
        }
        if !self.family.starts_with("file:") && self.sizes.is_empty() {
            return Err(Error::Usage("size ladder must be non-empty".into()));
        }
        match self.p_mode {
            PMode::Explicit => {
                if self.p_list.is_empty() {
                    return Err(Error::Usage("explicit p_mode needs p_list".into()));
                }
                if self.p_list.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return Err(Error::Usage("p_list values must lie in [0,1]".into()));
                }
            }
            PMode::WindowGrid => {
                if self.window_points < 2 {
                    return Err(Error::Usage("window grid needs at least 2 points".into()));
                }
            }
            PMode::AtPcHat => {}
        }
        if self.a < 0.0 {
            return Err(Error::Usage("A must be nonnegative".into()));
        }
        Ok(())
    }

    /// Stable hex fingerprint of the full configuration (seed included).
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Builds the graph for one ladder entry.
    pub fn build_graph(&self, size: u64) -> Result<TransitiveGraph, Error> {
        if let Some(path) = self.family.strip_prefix("file:") {
            return TransitiveGraph::from_edge_file(path);
        }
        match self.family.as_str() {
            "complete" => TransitiveGraph::complete(size),
            "hamming" => TransitiveGraph::hamming(size as u32),
            "torus" => {
                let dim = self
                    .dim
                    .ok_or_else(|| Error::Usage("torus family needs dim".into()))?;
                TransitiveGraph::torus(size, dim)
            }
            other => Err(Error::Usage(format!(
                "unknown family {other:?}; expected complete|torus|hamming|file:PATH"
            ))),
        }
    }

    fn ladder(&self) -> Vec<u64> {
        if self.family.starts_with("file:") {
            vec![0]
        } else {
            self.sizes.clone()
        }
    }
}

/// Outcome of a sweep: newly written rows plus the skip count from resume.
#[derive(Debug)]
pub struct RunSummary {
    pub written: Vec<ExperimentRecord>,
    pub skipped: u64,
}

struct CellContext<'a> {
    config: &'a ExperimentConfig,
    fingerprint: String,
    g: &'a TransitiveGraph,
}

impl CellContext<'_> {
    fn blank(&self, p: f64, stat: &str) -> ExperimentRecord {
        ExperimentRecord {
            v: SCHEMA_VERSION,
            fingerprint: self.fingerprint.clone(),
            family: self.g.family().to_string(),
            n: self.g.n(),
            d: self.g.degree(),
            p,
            stat: stat.to_string(),
            idx: None,
            mean: 0.0,
            std_error: 0.0,
            ci99_lo: 0.0,
            ci99_hi: 0.0,
            wilson_lo: None,
            wilson_hi: None,
            median: None,
            q05: None,
            q95: None,
            samples: 0,
            seed: self.config.master_seed,
            replicas: self.config.replicas,
            wall_ms: 0,
            method: None,
        }
    }
}

/// Runs a sweep, appending records to `config.out` as they complete.
///
/// Cells already present in the output file (same fingerprint) are skipped,
/// which makes interrupted runs resumable: every estimator derives its
/// replica indices from the master seed alone, so a resumed run produces
/// exactly the rows the uninterrupted run would have.
pub fn run(config: &ExperimentConfig) -> Result<RunSummary, Error> {
    config.validate()?;
    let fingerprint = config.fingerprint();
    let existing = load_existing(&config.out, &fingerprint)?;
    let mut writer = RecordWriter::append(&config.out)?;
    let mut summary = RunSummary { written: Vec::new(), skipped: 0 };

    for size in config.ladder() {
        let g = config.build_graph(size)?;
        run_ladder_entry(config, &g, &fingerprint, &existing, &mut writer, &mut summary)?;
    }
    Ok(summary)
}

/// Runs the sweep cells against one prebuilt graph (used by the CLI for
/// explicit graphs with origin relabeling or forced irregularity).
pub fn run_on_graph(config: &ExperimentConfig, g: &TransitiveGraph) -> Result<RunSummary, Error> {
    config.validate()?;
    let fingerprint = config.fingerprint();
    let existing = load_existing(&config.out, &fingerprint)?;
    let mut writer = RecordWriter::append(&config.out)?;
    let mut summary = RunSummary { written: Vec::new(), skipped: 0 };
    run_ladder_entry(config, g, &fingerprint, &existing, &mut writer, &mut summary)?;
    Ok(summary)
}

fn run_ladder_entry(
    config: &ExperimentConfig,
    g: &TransitiveGraph,
    fingerprint: &str,
    existing: &records::ExistingRecords,
    writer: &mut RecordWriter,
    summary: &mut RunSummary,
) -> Result<(), Error> {
    let ctx = CellContext { config, fingerprint: fingerprint.to_string(), g };
    let needs_pc =
        !matches!(config.p_mode, PMode::Explicit) || config.statistics.contains(&Statistic::Pc);

    let p_center = if needs_pc {
        match solve_cell(&ctx, existing, writer, summary)? {
            Some(p) => Some(p),
            None => return Ok(()), // infeasible lambda: error row written
        }
    } else {
        None
    };

    let ps: Vec<f64> = match config.p_mode {
        PMode::AtPcHat => vec![p_center.expect("solved")],
        PMode::WindowGrid => {
            WindowSpec::new(config.a, p_center.expect("solved"), g).grid(config.window_points)
        }
        PMode::Explicit => config.p_list.clone(),
    };

    for &p in &ps {
        run_cell(&ctx, p, existing, writer, summary)?;
    }
    Ok(())
}

/// Solves (or reuses) the critical point for one ladder size, recording the
/// `pc` and `pc_chi` rows. Returns None when lambda is infeasible.
fn solve_cell(
    ctx: &CellContext,
    existing: &records::ExistingRecords,
    writer: &mut RecordWriter,
    summary: &mut RunSummary,
) -> Result<Option<f64>, Error> {
    if let Some(&p) = existing.pc_by_n.get(&ctx.g.n()) {
        summary.skipped += 1;
        return Ok(Some(p));
    }
    let config = ctx.config;
    let window = WindowSpec::new(config.a.max(1.0), 0.0, ctx.g);
    let tolerance = config.solve_tolerance.unwrap_or(0.25 * window.half_width).max(1e-15);
    let probe = config.solve_replicas.unwrap_or(2_000).max(2);
    let start = Instant::now();
    let cp = match solve_pc_with(
        ctx.g,
        config.lambda,
        tolerance,
        probe,
        config.master_seed,
        SolveOpts::default(),
    ) {
        Ok(cp) => cp,
        Err(Error::Infeasible(msg)) => {
            let mut rec = ctx.blank(f64::NAN, "error");
            rec.p = 0.0;
            rec.method = Some(format!("infeasible: {msg}"));
            rec.wall_ms = start.elapsed().as_millis() as u64;
            writer.write(&rec)?;
            summary.written.push(rec);
            return Ok(None);
        }
        Err(e) => return Err(e),
    };
    let wall = start.elapsed().as_millis() as u64;

    let mut flags = Vec::new();
    if cp.indistinguishable {
        flags.push("indistinguishable");
    }
    flags.push(if cp.self_consistent { "self_consistent" } else { "not_self_consistent" });

    let mut rec = ctx.blank(cp.p_c_hat, "pc");
    rec.mean = cp.p_c_hat;
    rec.ci99_lo = cp.bracket.0;
    rec.ci99_hi = cp.bracket.1;
    rec.samples = cp.samples_per_probe;
    rec.wall_ms = wall;
    rec.method = Some(format!("lambda={};probes={};{}", cp.lambda, cp.probes, flags.join(";")));
    writer.write(&rec)?;
    summary.written.push(rec);

    let mut chi_rec = ctx.blank(cp.p_c_hat, "pc_chi").with_estimate(&cp.chi_at_p_c_hat);
    chi_rec.wall_ms = wall;
    chi_rec.method = Some(format!(
        "target={};fresh self-consistency sample",
        cp.lambda * (ctx.g.n() as f64).cbrt()
    ));
    writer.write(&chi_rec)?;
    summary.written.push(chi_rec);

    Ok(Some(cp.p_c_hat))
}

fn emit_records(
    existing: &records::ExistingRecords,
    writer: &mut RecordWriter,
    summary: &mut RunSummary,
    recs: Vec<ExperimentRecord>,
) -> Result<(), Error> {
    for rec in recs {
        if existing.keys.contains(&rec.key()) {
            summary.skipped += 1;
            continue;
        }
        writer.write(&rec)?;
        summary.written.push(rec);
    }
    Ok(())
}

/// Runs every requested statistic at one (size, p) cell.
fn run_cell(
    ctx: &CellContext,
    p: f64,
    existing: &records::ExistingRecords,
    writer: &mut RecordWriter,
    summary: &mut RunSummary,
) -> Result<(), Error> {
    let config = ctx.config;
    let g = ctx.g;
    let n = g.n();
    // True when all rows a statistic would produce are already present;
    // such cells are skipped without recomputation.
    let have_all = |stats_and_idxs: &[(&str, Option<u64>)]| {
        stats_and_idxs.iter().all(|(stat, idx)| {
            existing.keys.contains(&records::RecordKey {
                n,
                stat: stat.to_string(),
                idx: *idx,
                p_bits: Some(p.to_bits()),
            })
        })
    };

    // diam/tmix share one survey per cell.
    let mut survey_done = false;

    for &stat in &config.statistics {
        match stat {
            Statistic::Pc => {} // handled per ladder size
            Statistic::Chi => {
                if have_all(&[("chi", None)]) {
                    summary.skipped += 1;
                    continue;
                }
                let start = Instant::now();
                let est =
                    crate::estimators::estimate_chi(g, p, config.replicas, config.master_seed)?;
                let mut rec = ctx.blank(p, "chi").with_estimate(&est);
                rec.wall_ms = start.elapsed().as_millis() as u64;
                emit_records(existing, writer, summary, vec![rec])?;
            }
            Statistic::Ball => {
                let r_max = config.r_max.unwrap_or(((n as f64).cbrt().ceil() as u64).max(1));
                let expected: Vec<(&str, Option<u64>)> = (0..=r_max)
                    .flat_map(|r| [("ball", Some(r)), ("ball_edges", Some(r))])
                    .collect();
                if have_all(&expected) {
                    summary.skipped += expected.len() as u64;
                    continue;
                }
                let start = Instant::now();
                let growth =
                    estimate_ball_growth(g, p, r_max, config.replicas, config.master_seed)?;
                let wall = start.elapsed().as_millis() as u64;
                let mut recs = Vec::new();
                for (r, est) in growth.volume.iter().enumerate() {
                    let mut rec = ctx.blank(p, "ball").with_estimate(est);
                    rec.idx = Some(r as u64);
                    rec.wall_ms = wall;
                    recs.push(rec);
                }
                for (r, est) in growth.edges.iter().enumerate() {
                    let mut rec = ctx.blank(p, "ball_edges").with_estimate(est);
                    rec.idx = Some(r as u64);
                    rec.wall_ms = wall;
                    recs.push(rec);
                }
                emit_records(existing, writer, summary, recs)?;
            }
            Statistic::Onearm | Statistic::Tail => {
                // Both come from one exploration pass; run it when either is
                // requested and emit only the requested rows (the other
                // statistic's pass emits its own).
                let r_list = default_r_list(config, n);
                let k_list = default_k_list(config, n);
                let expected: Vec<(&str, Option<u64>)> = if stat == Statistic::Onearm {
                    r_list.iter().map(|&r| ("onearm", Some(r))).collect()
                } else {
                    k_list.iter().map(|&k| ("tail", Some(k))).collect()
                };
                if have_all(&expected) {
                    summary.skipped += expected.len() as u64;
                    continue;
                }
                let start = Instant::now();
                let profile = estimate_cluster_profile(
                    g,
                    p,
                    &r_list,
                    &k_list,
                    config.replicas,
                    config.master_seed,
                )?;
                let wall = start.elapsed().as_millis() as u64;
                let mut recs = Vec::new();
                if stat == Statistic::Onearm {
                    for (r, est) in &profile.one_arm {
                        let mut rec = ctx.blank(p, "onearm").with_estimate(est);
                        rec.idx = Some(*r);
                        rec.wall_ms = wall;
                        recs.push(rec);
                    }
                } else {
                    for (k, est) in &profile.tail {
                        let mut rec = ctx.blank(p, "tail").with_estimate(est);
                        rec.idx = Some(*k);
                        rec.wall_ms = wall;
                        recs.push(rec);
                    }
                }
                emit_records(existing, writer, summary, recs)?;
            }
            Statistic::C1 => {
                if have_all(&[("c1", None), ("c1_scaled", None)]) {
                    summary.skipped += 2;
                    continue;
                }
                let start = Instant::now();
                let stats = estimate_c1(g, p, config.replicas, config.master_seed)?;
                let wall = start.elapsed().as_millis() as u64;
                let mut rec = ctx.blank(p, "c1").with_estimate(&stats.size);
                rec.median = Some(stats.quantiles.median);
                rec.q05 = Some(stats.quantiles.q05);
                rec.q95 = Some(stats.quantiles.q95);
                rec.wall_ms = wall;
                let mut scaled = ctx.blank(p, "c1_scaled");
                scaled.mean = stats.scaled_mean;
                scaled.median = Some(stats.scaled.median);
                scaled.q05 = Some(stats.scaled.q05);
                scaled.q95 = Some(stats.scaled.q95);
                scaled.samples = stats.samples.len() as u64;
                scaled.wall_ms = wall;
                scaled.method = Some("|C1| / n^(2/3)".into());
                emit_records(existing, writer, summary, vec![rec, scaled])?;
            }
            Statistic::Triangle => {
                let pairs = triangle_pairs(config, n);
                let expected: Vec<(&str, Option<u64>)> = (0..pairs.len())
                    .map(|i| ("triangle", Some(i as u64)))
                    .chain([("triangle_excess", None)])
                    .collect();
                if have_all(&expected) {
                    summary.skipped += expected.len() as u64;
                    continue;
                }
                let start = Instant::now();
                let report =
                    estimate_triangle(g, p, &pairs, config.replicas, config.master_seed)?;
                let wall = start.elapsed().as_millis() as u64;
                let mut recs = Vec::new();
                for (i, ((x, y), est)) in report.per_pair.iter().enumerate() {
                    let mut rec = ctx.blank(p, "triangle").with_estimate(est);
                    rec.idx = Some(i as u64);
                    rec.method = Some(format!("pair=({x},{y})"));
                    rec.wall_ms = wall;
                    recs.push(rec);
                }
                let mut excess = ctx.blank(p, "triangle_excess");
                excess.mean = report.max_excess;
                excess.samples = config.replicas;
                excess.wall_ms = wall;
                excess.method = Some(format!(
                    "max over pairs of nabla - 1(x=y); reference a0 = {}",
                    report.a0_reference
                ));
                recs.push(excess);
                emit_records(existing, writer, summary, recs)?;
            }
            Statistic::Diam | Statistic::Tmix => {
                if survey_done {
                    continue;
                }
                survey_done = true;
                let want_diam = config.statistics.contains(&Statistic::Diam);
                let want_tmix = config.statistics.contains(&Statistic::Tmix);
                let mut expected: Vec<(&str, Option<u64>)> = Vec::new();
                if want_diam {
                    expected.push(("diam", None));
                }
                if want_tmix {
                    expected.push(("tmix", None));
                }
                if have_all(&expected) {
                    summary.skipped += expected.len() as u64;
                    continue;
                }
                let start = Instant::now();
                let survey = survey_c1(
                    g,
                    p,
                    config.replicas,
                    config.master_seed,
                    SurveyOpts {
                        want_diameter: want_diam,
                        want_mixing: want_tmix,
                        ..SurveyOpts::default()
                    },
                )?;
                let wall = start.elapsed().as_millis() as u64;
                let mut recs = Vec::new();
                if want_diam {
                    let exact: Vec<u64> = survey
                        .diameters
                        .iter()
                        .filter(|&&(_, is_exact)| is_exact)
                        .map(|&(d, _)| d)
                        .collect();
                    let approx = survey.diameters.len() - exact.len();
                    let mut moments = Moments::default();
                    for &d in &exact {
                        moments.push(d);
                    }
                    let mut rec = ctx.blank(p, "diam");
                    if !exact.is_empty() {
                        rec = rec.with_estimate(&moments.estimate(false));
                        let q = quantiles(&exact);
                        rec.median = Some(q.median);
                        rec.q05 = Some(q.q05);
                        rec.q95 = Some(q.q95);
                    }
                    rec.wall_ms = wall;
                    rec.method = Some(format!("exact={};approx_excluded={approx}", exact.len()));
                    recs.push(rec);
                }
                if want_tmix {
                    let exact: Vec<u64> = survey
                        .mixing
                        .iter()
                        .filter_map(|m| match m {
                            MixOutcome::ExactTv { t_mix, .. } => Some(*t_mix),
                            MixOutcome::Spectral { .. } => None,
                        })
                        .collect();
                    let spectral = survey.mixing.len() - exact.len();
                    let mut moments = Moments::default();
                    for &t in &exact {
                        moments.push(t);
                    }
                    let mut rec = ctx.blank(p, "tmix");
                    if !exact.is_empty() {
                        rec = rec.with_estimate(&moments.estimate(false));
                        let q = quantiles(&exact);
                        rec.median = Some(q.median);
                        rec.q05 = Some(q.q05);
                        rec.q95 = Some(q.q95);
                    }
                    rec.wall_ms = wall;
                    rec.method =
                        Some(format!("exact_tv={};spectral_excluded={spectral}", exact.len()));
                    recs.push(rec);
                }
                emit_records(existing, writer, summary, recs)?;
            }
        }
    }
    Ok(())
}

fn default_r_list(config: &ExperimentConfig, n: u64) -> Vec<u64> {
    if !config.r_list.is_empty() {
        return config.r_list.clone();
    }
    let top = ((n as f64).cbrt().ceil() as u64).max(1);
    let mut out = Vec::new();
    let mut r = 1u64;
    while r < top {
        out.push(r);
        r *= 2;
    }
    out.push(top);
    out
}

fn default_k_list(config: &ExperimentConfig, n: u64) -> Vec<u64> {
    if !config.k_list.is_empty() {
        return config.k_list.clone();
    }
    let top = ((n as f64).powf(2.0 / 3.0).ceil() as u64).max(1);
    let mut out = Vec::new();
    let mut k = 1u64;
    while k < top {
        out.push(k);
        k *= 4;
    }
    out.push(top);
    out
}

/// (0,0) plus `triangle_pairs` deterministic pseudo-random pairs (0, y).
fn triangle_pairs(config: &ExperimentConfig, n: u64) -> Vec<(u64, u64)> {
    let mut pairs = vec![(0u64, 0u64)];
    if n > 1 {
        let mut state = config.master_seed ^ 0xA076_1D64_78BD_642F;
        for _ in 0..config.triangle_pairs {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let y = 1 + (state >> 33) % (n - 1);
            pairs.push((0, y));
        }
    }
    pairs
}

/// Summary statistic used by scaling fits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SummaryMode {
    Mean,
    Median,
}

/// Least-squares scaling exponent of one statistic against n.
#[derive(Debug, Clone)]
pub struct ScalingFit {
    pub statistic: String,
    pub exponent: f64,
    pub stderr: f64,
    pub r_squared: f64,
    pub points: usize,
    /// Rows dropped because their summary value was not positive.
    pub excluded_nonpositive: usize,
}

/// Ordinary least squares of log(summary value) against log(n).
///
/// The caller is responsible for passing records of a single statistic at a
/// consistent p per size (e.g. the window center).
pub fn fit_scaling(
    records: &[ExperimentRecord],
    statistic: &str,
    summary: SummaryMode,
) -> Result<ScalingFit, Error> {
    let mut points = Vec::new();
    let mut excluded = 0usize;
    for rec in records.iter().filter(|r| r.stat == statistic) {
        let value = match summary {
            SummaryMode::Mean => rec.mean,
            SummaryMode::Median => rec.median.unwrap_or(rec.mean),
        };
        if value > 0.0 {
            points.push(((rec.n as f64).ln(), value.ln()));
        } else {
            excluded += 1;
        }
    }
    if points.len() < 3 {
        return Err(Error::Usage(format!(
            "scaling fit for {statistic:?} needs at least 3 positive points, got {}",
            points.len()
        )));
    }
    let fit = ols(&points);
    Ok(ScalingFit {
        statistic: statistic.to_string(),
        exponent: fit.slope,
        stderr: fit.slope_stderr,
        r_squared: fit.r_squared,
        points: points.len(),
        excluded_nonpositive: excluded,
    })
}

/// Stability of one statistic across the scaling window.
#[derive(Debug, Clone)]
pub struct WindowStability {
    pub statistic: String,
    /// Per endpoint: (p offset sign, per-size ratios, fitted exponent of the
    /// ratio against n).
    pub endpoints: Vec<EndpointStability>,
    /// Set when some sizes were missing grid points and were skipped.
    pub partial: bool,
}

#[derive(Debug, Clone)]
pub struct EndpointStability {
    /// -1 for the lower window endpoint, +1 for the upper.
    pub side: i32,
    /// (n, endpoint summary / center summary).
    pub ratios: Vec<(u64, f64)>,
    pub exponent: f64,
    pub stderr: f64,
}

/// Compares window-endpoint summaries against the center per size and fits
/// the ratio's exponent in n (flat ratios mean the same scaling holds across
/// the window).
pub fn check_window_stability(
    records: &[ExperimentRecord],
    statistic: &str,
    summary: SummaryMode,
) -> Result<WindowStability, Error> {
    use std::collections::BTreeMap;
    let mut by_n: BTreeMap<u64, Vec<(f64, f64)>> = BTreeMap::new();
    for rec in records.iter().filter(|r| r.stat == statistic) {
        let value = match summary {
            SummaryMode::Mean => rec.mean,
            SummaryMode::Median => rec.median.unwrap_or(rec.mean),
        };
        by_n.entry(rec.n).or_default().push((rec.p, value));
    }
    if by_n.len() < 2 {
        return Err(Error::Usage(
            "window stability needs at least 2 ladder sizes".into(),
        ));
    }
    let grid_len = by_n.values().map(Vec::len).max().unwrap_or(0);
    if grid_len < 3 {
        return Err(Error::Usage(
            "window stability needs a p grid of at least 3 points per size".into(),
        ));
    }
    let mut partial = false;
    let mut low = Vec::new();
    let mut high = Vec::new();
    for (&n, cells) in &mut by_n {
        if cells.len() != grid_len {
            partial = true;
            continue;
        }
        cells.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let center = cells[cells.len() / 2].1;
        if center <= 0.0 {
            partial = true;
            continue;
        }
        low.push((n, cells[0].1 / center));
        high.push((n, cells[cells.len() - 1].1 / center));
    }
    let fit_side = |side: i32, ratios: Vec<(u64, f64)>| -> Result<EndpointStability, Error> {
        let pts: Vec<(f64, f64)> = ratios
            .iter()
            .filter(|&&(_, r)| r > 0.0)
            .map(|&(n, r)| ((n as f64).ln(), r.ln()))
            .collect();
        if pts.len() < 2 {
            return Err(Error::Usage("window stability: too few usable sizes".into()));
        }
        let fit = ols(&pts);
        Ok(EndpointStability { side, ratios, exponent: fit.slope, stderr: fit.slope_stderr })
    };
    Ok(WindowStability {
        statistic: statistic.to_string(),
        endpoints: vec![fit_side(-1, low)?, fit_side(1, high)?],
        partial,
    })
}
