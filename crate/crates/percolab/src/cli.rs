//! Command-line interface: estimate single statistics, run geometry
//! measurements, execute configured sweeps, query the exact oracle, and
//! export records to CSV.
//!
//! Exit codes: 0 success, 2 usage error, 3 infeasible parameter, 4 I/O.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::graphs::TransitiveGraph;
use crate::lab::{self, ExperimentConfig, PMode, Statistic};
use crate::oracle::{self, Quantity};
use crate::Error;

#[derive(Parser)]
#[command(name = "percolab", version, about = "Monte Carlo laboratory for critical bond percolation on finite transitive graphs")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a percolation statistic on one graph.
    Estimate(EstimateCmd),
    /// Measure largest-cluster geometry (diameter or mixing time).
    Geometry(GeometryCmd),
    /// Run a configured sweep over a size ladder.
    Sweep(SweepCmd),
    /// Evaluate a functional exactly by enumerating all configurations.
    Oracle(OracleCmd),
    /// Flatten a JSON-lines record file into CSV.
    Export(ExportCmd),
}

#[derive(Args)]
struct GraphArgs {
    /// Graph family: torus | hamming | complete | file:PATH.
    #[arg(long)]
    graph: String,
    /// Vertex count (complete) or side length (torus).
    #[arg(long)]
    side: Option<u64>,
    /// Dimension (torus, hamming).
    #[arg(long)]
    dim: Option<u32>,
    /// Accept irregular explicit graphs in origin-based estimators.
    #[arg(long)]
    force_irregular: bool,
    /// Relabel this vertex of an explicit graph as the origin (vertex 0).
    #[arg(long)]
    origin: Option<u64>,
}

impl GraphArgs {
    fn build(&self) -> Result<TransitiveGraph, Error> {
        let g = if let Some(path) = self.graph.strip_prefix("file:") {
            match self.origin {
                Some(origin) => TransitiveGraph::from_edge_file_relabeled(path, origin)?,
                None => TransitiveGraph::from_edge_file(path)?,
            }
        } else {
            match self.graph.as_str() {
                "complete" => TransitiveGraph::complete(
                    self.side.ok_or_else(|| Error::Usage("complete needs --side".into()))?,
                )?,
                "torus" => TransitiveGraph::torus(
                    self.side.ok_or_else(|| Error::Usage("torus needs --side".into()))?,
                    self.dim.ok_or_else(|| Error::Usage("torus needs --dim".into()))?,
                )?,
                "hamming" => TransitiveGraph::hamming(
                    self.dim.ok_or_else(|| Error::Usage("hamming needs --dim".into()))?,
                )?,
                other => {
                    return Err(Error::Usage(format!(
                        "unknown graph {other:?}; expected torus|hamming|complete|file:PATH"
                    )))
                }
            }
        };
        Ok(if self.force_irregular { g.with_irregular_ok() } else { g })
    }

    /// Family/size fields for an ExperimentConfig covering this graph.
    fn config_fields(&self) -> (String, Vec<u64>, Option<u32>) {
        if self.graph.starts_with("file:") {
            (self.graph.clone(), vec![], None)
        } else {
            let size = match self.graph.as_str() {
                "hamming" => self.dim.map(u64::from).unwrap_or(0),
                _ => self.side.unwrap_or(0),
            };
            (self.graph.clone(), vec![size], self.dim)
        }
    }
}

#[derive(Args)]
struct PArgs {
    /// Retention probability.
    #[arg(long, conflicts_with = "lambda")]
    p: Option<f64>,
    /// Solve chi(p_c) = lambda n^(1/3) and evaluate at p_c_hat.
    #[arg(long)]
    lambda: Option<f64>,
    /// Bisection tolerance for the solve (default: window/4).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Initial probe budget for the solve.
    #[arg(long)]
    probe_replicas: Option<u64>,
}

#[derive(Args)]
struct EstimateCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    p: PArgs,
    /// chi | pc | triangle | ball | onearm | tail | c1.
    #[arg(long)]
    stat: String,
    #[arg(long)]
    replicas: u64,
    #[arg(long)]
    seed: u64,
    /// Append records here; omitted = print JSON lines to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ball-growth radius (default ceil(n^(1/3))).
    #[arg(long)]
    r_max: Option<u64>,
    /// One-arm radii, comma separated.
    #[arg(long, value_delimiter = ',')]
    r_list: Vec<u64>,
    /// Tail thresholds, comma separated.
    #[arg(long, value_delimiter = ',')]
    k_list: Vec<u64>,
    /// Window parameter A.
    #[arg(long, default_value_t = 1.0)]
    a: f64,
}

#[derive(Args)]
struct GeometryCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    p: PArgs,
    /// diam | tmix.
    #[arg(long)]
    stat: String,
    #[arg(long)]
    replicas: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    a: f64,
}

#[derive(Args)]
struct SweepCmd {
    /// TOML config mirroring the ExperimentConfig schema.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct OracleCmd {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long)]
    p: f64,
    /// tau | chi | nabla | ball_mean | one_arm | c1_mean | c1_distribution | tail.
    #[arg(long)]
    quantity: String,
    #[arg(long, default_value_t = 0)]
    x: u64,
    #[arg(long, default_value_t = 0)]
    y: u64,
    #[arg(long, default_value_t = 1)]
    r: u64,
    #[arg(long, default_value_t = 1)]
    k: u64,
}

#[derive(Args)]
struct ExportCmd {
    #[arg(long)]
    records: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version, 2 for usage errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Estimate(cmd) => run_stat_command(
            &cmd.graph,
            &cmd.p,
            &cmd.stat,
            &["chi", "pc", "triangle", "ball", "onearm", "tail", "c1"],
            cmd.replicas,
            cmd.seed,
            cmd.a,
            cmd.out,
            cmd.r_max,
            cmd.r_list,
            cmd.k_list,
        ),
        Command::Geometry(cmd) => run_stat_command(
            &cmd.graph,
            &cmd.p,
            &cmd.stat,
            &["diam", "tmix"],
            cmd.replicas,
            cmd.seed,
            cmd.a,
            cmd.out,
            None,
            vec![],
            vec![],
        ),
        Command::Sweep(cmd) => {
            let config = ExperimentConfig::from_toml_file(&cmd.config)?;
            let summary = lab::run(&config)?;
            println!(
                "wrote {} records ({} skipped as already present) -> {}",
                summary.written.len(),
                summary.skipped,
                config.out.display()
            );
            Ok(())
        }
        Command::Oracle(cmd) => run_oracle(cmd),
        Command::Export(cmd) => {
            let rows = lab::export_csv(&cmd.records, &cmd.out)?;
            println!("exported {rows} records -> {}", cmd.out.display());
            Ok(())
        }
    }
}

fn parse_stat(name: &str, allowed: &[&str]) -> Result<Statistic, Error> {
    if !allowed.contains(&name) {
        return Err(Error::Usage(format!(
            "stat {name:?} not valid here; expected one of {allowed:?}"
        )));
    }
    Ok(match name {
        "chi" => Statistic::Chi,
        "pc" => Statistic::Pc,
        "triangle" => Statistic::Triangle,
        "ball" => Statistic::Ball,
        "onearm" => Statistic::Onearm,
        "tail" => Statistic::Tail,
        "c1" => Statistic::C1,
        "diam" => Statistic::Diam,
        "tmix" => Statistic::Tmix,
        _ => unreachable!(),
    })
}

#[allow(clippy::too_many_arguments)]
fn run_stat_command(
    graph: &GraphArgs,
    p_args: &PArgs,
    stat: &str,
    allowed: &[&str],
    replicas: u64,
    seed: u64,
    a: f64,
    out: Option<PathBuf>,
    r_max: Option<u64>,
    r_list: Vec<u64>,
    k_list: Vec<u64>,
) -> Result<(), Error> {
    let statistic = parse_stat(stat, allowed)?;
    // Validate the graph spec eagerly for a clean usage error.
    let g = graph.build()?;
    if graph.force_irregular && !g.regular() {
        eprintln!(
            "warning: graph is irregular (max degree {}); origin-based \
             estimators assume transitivity",
            g.degree()
        );
    }
    let (family, sizes, dim) = graph.config_fields();
    let p_mode = match (p_args.p, p_args.lambda) {
        (Some(_), Some(_)) => {
            return Err(Error::Usage("choose either --p or --lambda".into()));
        }
        (Some(p), None) => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Usage(format!("p = {p} outside [0,1]")));
            }
            PMode::Explicit
        }
        (None, Some(_)) => PMode::AtPcHat,
        (None, None) => {
            if statistic == Statistic::Pc {
                PMode::AtPcHat
            } else {
                return Err(Error::Usage("one of --p or --lambda is required".into()));
            }
        }
    };

    let (out_path, transient) = match out {
        Some(path) => (path, false),
        None => {
            let path = std::env::temp_dir().join(format!(
                "percolab-{}-{}.jsonl",
                std::process::id(),
                std::time::SystemTime::now()
                    .duration_since(std::time::UNIX_EPOCH)
                    .map(|d| d.as_nanos())
                    .unwrap_or(0)
            ));
            (path, true)
        }
    };

    let statistics = if statistic == Statistic::Pc { vec![] } else { vec![statistic] };
    let config = ExperimentConfig {
        v: lab::SCHEMA_VERSION,
        family,
        sizes,
        dim,
        lambda: p_args.lambda.unwrap_or(1.0),
        a,
        p_mode,
        window_points: 5,
        p_list: p_args.p.into_iter().collect(),
        statistics: if statistics.is_empty() { vec![Statistic::Pc] } else { statistics },
        replicas,
        master_seed: seed,
        out: out_path.clone(),
        r_max,
        r_list,
        k_list,
        triangle_pairs: 10,
        solve_tolerance: p_args.tolerance,
        solve_replicas: p_args.probe_replicas,
    };
    // The CLI path must also accept irregular explicit graphs when forced;
    // the runner rebuilds the graph, so thread the flag through the family.
    let summary = if graph.force_irregular || graph.origin.is_some() {
        run_with_prebuilt(&config, &g)?
    } else {
        lab::run(&config)?
    };
    // A sweep records infeasible sizes and moves on; a single-graph command
    // should fail loudly instead.
    if let Some(err_row) = summary.written.iter().find(|r| r.stat == "error") {
        let msg = err_row.method.clone().unwrap_or_else(|| "recorded error".into());
        if transient {
            let _ = std::fs::remove_file(&out_path);
        }
        return Err(Error::Infeasible(msg));
    }
    if transient {
        for rec in &summary.written {
            println!("{}", serde_json::to_string(rec).expect("record serializes"));
        }
        let _ = std::fs::remove_file(&out_path);
    } else {
        println!(
            "wrote {} records ({} skipped) -> {}",
            summary.written.len(),
            summary.skipped,
            out_path.display()
        );
    }
    Ok(())
}

/// Variant of [`lab::run`] for graphs that need CLI-side preparation
/// (irregular override, origin relabeling): runs the same cells against the
/// prebuilt graph.
fn run_with_prebuilt(
    config: &ExperimentConfig,
    g: &TransitiveGraph,
) -> Result<lab::RunSummary, Error> {
    lab::run_on_graph(config, g)
}

fn run_oracle(cmd: OracleCmd) -> Result<(), Error> {
    let g = cmd.graph.build()?;
    let quantity = match cmd.quantity.as_str() {
        "tau" => Quantity::Tau { x: cmd.x, y: cmd.y },
        "chi" => Quantity::Chi { x: cmd.x },
        "nabla" => Quantity::Nabla { x: cmd.x, y: cmd.y },
        "ball_mean" | "ball" => Quantity::BallMean { x: cmd.x, r: cmd.r },
        "one_arm" | "onearm" => Quantity::OneArm { x: cmd.x, r: cmd.r },
        "c1_mean" | "c1" => Quantity::C1Mean,
        "c1_distribution" | "c1dist" => Quantity::C1Distribution,
        "tail" => Quantity::Tail { x: cmd.x, k: cmd.k },
        other => {
            return Err(Error::Usage(format!(
                "unknown quantity {other:?}; expected tau|chi|nabla|ball_mean|one_arm|c1_mean|c1_distribution|tail"
            )))
        }
    };
    let result = oracle::exact(&g, cmd.p, quantity)?;
    println!(
        "{} p={} value={} configurations={}",
        result.quantity, result.p, result.value, result.configurations
    );
    if let Some(dist) = result.distribution {
        for (size, prob) in dist.iter().enumerate() {
            if *prob > 0.0 {
                println!("  P(|C1| = {size}) = {prob}");
            }
        }
    }
    Ok(())
}
