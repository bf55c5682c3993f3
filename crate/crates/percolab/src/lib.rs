//! percolab: a Monte Carlo laboratory for critical bond percolation on
//! finite transitive graphs.
//!
//! The crate samples bond percolation through a coupled labeling: every edge
//! carries a deterministic uniform label derived from a master seed, so a
//! single seed realizes all retention probabilities `p` simultaneously and
//! replicas are reproducible under any parallel schedule. On top of the
//! sampler sit estimators for the susceptibility `chi(p)`, the critical point
//! solving `chi(p_c) = lambda * n^(1/3)`, the triangle diagram, intrinsic
//! ball growth, one-arm probabilities, cluster-size tails and largest-cluster
//! statistics, plus exact geometry of sampled clusters (diameter, lazy-walk
//! mixing time) and an experiment runner that writes reproducible JSON-lines
//! records and fits scaling exponents.
//!
//! Modules:
//! - [`graphs`]: implicit transitive graphs (torus, Hamming cube, complete,
//!   explicit edge lists) with canonical edge ids.
//! - [`perc`]: coupled sampling, cluster/ball exploration, largest component.
//! - [`oracle`]: exact enumeration over all edge configurations on tiny
//!   graphs; ground truth for every estimator.
//! - [`estimators`]: Monte Carlo estimates with confidence intervals and the
//!   noisy-bisection critical-point solver.
//! - [`geometry`]: cluster diameter and lazy random-walk mixing time.
//! - [`lab`]: experiment configs, JSON-lines records, scaling fits, CLI.

pub mod cli;
pub mod estimators;
pub mod geometry;
pub mod graphs;
pub mod lab;
pub mod oracle;
pub mod perc;
pub mod stats;

pub use graphs::{EdgeId, Family, TransitiveGraph};
pub use perc::{BallSnapshot, Cluster, CouplingSeed, SprinkleReport};
pub use stats::Estimate;

/// Crate-wide error type; variants map onto CLI exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid arguments or input data (exit code 2).
    #[error("usage error: {0}")]
    Usage(String),
    /// Structurally valid request with no attainable answer (exit code 3).
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// Underlying I/O failure (exit code 4).
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// CLI exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Infeasible(_) => 3,
            Error::Io(_) => 4,
        }
    }
}
