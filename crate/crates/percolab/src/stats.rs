//! Estimate types and the deterministic accumulation helpers shared by the
//! estimators and the experiment runner.
//!
//! All primary statistics are integer-valued per replica (cluster sizes,
//! ball volumes, indicators, diameters, mixing times), so sums and sums of
//! squares are kept in integers. Integer addition is associative, which makes
//! every aggregate bit-identical no matter how replicas are partitioned
//! across worker threads.

use serde::{Deserialize, Serialize};

/// 99% normal quantile used throughout for confidence intervals.
pub const Z99: f64 = 2.576;

/// A Monte Carlo point estimate with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
    /// Normal-approximation 99% interval: mean ± 2.576 * std_error.
    pub ci99: (f64, f64),
    /// Wilson 99% interval, present for indicator-valued statistics where
    /// the plain CLT interval is unreliable near 0 and 1.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wilson99: Option<(f64, f64)>,
}

impl Estimate {
    pub fn contains99(&self, value: f64) -> bool {
        self.ci99.0 <= value && value <= self.ci99.1
    }
}

/// Running integer moments of one statistic.
#[derive(Debug, Clone, Copy, Default)]
pub struct Moments {
    pub count: u64,
    pub sum: u128,
    pub sum_sq: u128,
}

impl Moments {
    #[inline]
    pub fn push(&mut self, value: u64) {
        self.count += 1;
        self.sum += value as u128;
        self.sum_sq += (value as u128) * (value as u128);
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    /// Sample mean, standard error and 99% CI. `indicator` additionally
    /// fills the Wilson interval (values must then be 0/1).
    pub fn estimate(&self, indicator: bool) -> Estimate {
        let n = self.count as f64;
        let mean = self.sum as f64 / n;
        let var = if self.count > 1 {
            let num = self.sum_sq as f64 - (self.sum as f64) * (self.sum as f64) / n;
            (num / (n - 1.0)).max(0.0)
        } else {
            0.0
        };
        let std_error = (var / n).sqrt();
        let wilson99 = indicator.then(|| wilson_interval(self.sum as u64, self.count, Z99));
        Estimate {
            mean,
            std_error,
            samples: self.count,
            ci99: (mean - Z99 * std_error, mean + Z99 * std_error),
            wilson99,
        }
    }
}

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Empirical quantiles of an integer sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
}

/// Quantiles of a sample; sorts a copy. Median averages the two central
/// order statistics for even sizes, q05/q95 use the nearest-rank rule.
pub fn quantiles(values: &[u64]) -> Quantiles {
    assert!(!values.is_empty());
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let len = sorted.len();
    let median = if len % 2 == 1 {
        sorted[len / 2] as f64
    } else {
        (sorted[len / 2 - 1] as f64 + sorted[len / 2] as f64) / 2.0
    };
    let rank = |q: f64| -> f64 {
        let idx = ((q * len as f64).ceil() as usize).clamp(1, len) - 1;
        sorted[idx] as f64
    };
    Quantiles { median, q05: rank(0.05), q95: rank(0.95) }
}

/// Ordinary least squares fit y = intercept + slope * x.
#[derive(Debug, Clone, Copy)]
pub struct OlsFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub r_squared: f64,
    pub points: usize,
}

/// Least-squares line through `(x, y)` points; requires at least 2 points
/// with distinct x. The slope standard error uses the usual residual-based
/// formula (zero when the fit is exact or with only 2 points).
pub fn ols(points: &[(f64, f64)]) -> OlsFit {
    let n = points.len();
    assert!(n >= 2, "need at least two points for a line");
    let nf = n as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    assert!(sxx > 0.0, "x values must not be all equal");
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if ss_tot > 0.0 { 1.0 - ss_res / ss_tot } else { 1.0 };
    let slope_stderr = if n > 2 {
        (ss_res / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    OlsFit { slope, intercept, slope_stderr, r_squared, points: n }
}

/// Deterministic parallel map-reduce over replica indices.
///
/// Replicas are split into fixed-size chunks; each chunk folds sequentially
/// in index order and chunk results merge in chunk order, so the outcome
/// depends only on the replica index set, never on thread scheduling.
/// `scratch` builds per-chunk reusable workspace (BFS buffers and the like)
/// that never leaks into the accumulator.
pub fn par_replicas_scratch<A, S, F, M>(
    replicas: u64,
    chunk: u64,
    init: impl Fn() -> A + Sync,
    scratch: impl Fn() -> S + Sync,
    map: F,
    merge: M,
) -> A
where
    A: Send,
    F: Fn(&mut S, &mut A, u64) + Sync,
    M: Fn(&mut A, A),
{
    use rayon::prelude::*;
    let chunk = chunk.max(1);
    let chunks: Vec<u64> = (0..replicas).step_by(chunk as usize).collect();
    let partials: Vec<A> = chunks
        .par_iter()
        .map(|&start| {
            let mut acc = init();
            let mut ws = scratch();
            for r in start..(start + chunk).min(replicas) {
                map(&mut ws, &mut acc, r);
            }
            acc
        })
        .collect();
    let mut out = init();
    for part in partials {
        merge(&mut out, part);
    }
    out
}

/// [`par_replicas_scratch`] without workspace.
pub fn par_replicas<A, F, M>(replicas: u64, chunk: u64, init: impl Fn() -> A + Sync, map: F, merge: M) -> A
where
    A: Send,
    F: Fn(&mut A, u64) + Sync,
    M: Fn(&mut A, A),
{
    par_replicas_scratch(replicas, chunk, init, || (), |_, acc, r| map(acc, r), merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_basic() {
        let mut m = Moments::default();
        for v in [2u64, 4, 4, 4, 5, 5, 7, 9] {
            m.push(v);
        }
        let e = m.estimate(false);
        assert!((e.mean - 5.0).abs() < 1e-12);
        // Sample variance of this classic set is 32/7.
        let expected_se = (32.0_f64 / 7.0 / 8.0).sqrt();
        assert!((e.std_error - expected_se).abs() < 1e-12);
        assert!((e.ci99.1 - e.ci99.0 - 2.0 * Z99 * expected_se).abs() < 1e-12);
    }

    #[test]
    fn zero_variance_gives_zero_stderr() {
        let mut m = Moments::default();
        for _ in 0..100 {
            m.push(3);
        }
        let e = m.estimate(false);
        assert_eq!(e.mean, 3.0);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn wilson_is_inside_unit_interval() {
        let (lo, hi) = wilson_interval(0, 50, Z99);
        assert!(lo >= 0.0 && hi < 0.3);
        let (lo, hi) = wilson_interval(50, 50, Z99);
        assert!(lo > 0.7 && hi <= 1.0);
    }

    #[test]
    fn quantiles_of_small_sample() {
        let q = quantiles(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]);
        assert_eq!(q.median, 5.5);
        assert_eq!(q.q05, 1.0);
        assert_eq!(q.q95, 10.0);
    }

    #[test]
    fn ols_recovers_planted_line() {
        let pts: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, 3.0 + 0.5 * i as f64)).collect();
        let fit = ols(&pts);
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-12);
        assert!(fit.slope_stderr < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn par_replicas_is_schedule_independent() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                par_replicas(
                    10_000,
                    64,
                    Moments::default,
                    |acc, r| acc.push(r % 17),
                    |a, b| a.merge(&b),
                )
            })
        };
        let a = run(1);
        let b = run(4);
        assert_eq!(a.sum, b.sum);
        assert_eq!(a.sum_sq, b.sum_sq);
        assert_eq!(a.count, b.count);
    }
}
