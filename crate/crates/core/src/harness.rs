//! k-sweeps and seeded replications over a positive source.
//!
//! For every `(k, replication)` cell the harness draws `2 · n_pairs · k` raw
//! values from one seeded stream, uses the first half for the `X` blocks and
//! the second half for the independent `Y` blocks, averages each block of `k`
//! and computes a [`BoundReport`]. Cells run in parallel; each cell's seed is
//! derived from `(base_seed, replication, k)` so the output does not depend on
//! the thread count.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::bounds::{k_sample_pairs, sandwich_with_policy, BoundReport, BoundsError, CPolicy};
use crate::dists::{AnalyticDist, DistError};
use crate::rng::derive_seed;
use crate::stats::MeanVar;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid sweep config: {0}")]
    InvalidConfig(String),
    #[error("source failed: {0}")]
    SourceFailure(String),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
}

/// A sampler of a positive random variable.
pub trait PositiveSource: Sync {
    /// Whether draws are natural logs of the underlying positive values.
    fn log_domain(&self) -> bool;

    /// `n` i.i.d. draws, deterministic in `seed`.
    fn draw(&self, n: usize, seed: u64) -> Result<Vec<f64>, HarnessError>;
}

impl PositiveSource for AnalyticDist {
    fn log_domain(&self) -> bool {
        false
    }

    fn draw(&self, n: usize, seed: u64) -> Result<Vec<f64>, HarnessError> {
        if !self.is_positive() {
            return Err(HarnessError::SourceFailure(format!(
                "{self} is not a positive distribution"
            )));
        }
        self.sample(n, seed)
            .map_err(|e: DistError| HarnessError::SourceFailure(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Strictly increasing inner averaging counts.
    pub k_values: Vec<usize>,
    pub n_pairs: usize,
    pub replications: usize,
    pub base_seed: u64,
    pub c_policy: CPolicy,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidConfig(m.to_string()));
        if self.k_values.is_empty() {
            return bad("k_values is empty");
        }
        if self.k_values[0] == 0 {
            return bad("k values must be positive");
        }
        if self.k_values.windows(2).any(|w| w[0] >= w[1]) {
            return bad("k values must be strictly increasing");
        }
        if self.n_pairs < 2 {
            return bad("n_pairs must be at least 2");
        }
        if self.replications == 0 {
            return bad("replications must be at least 1");
        }
        Ok(())
    }

    /// Powers of two from 1 up to and including `max_k` (when `max_k` is one).
    pub fn powers_of_two(max_k: usize) -> Vec<usize> {
        std::iter::successors(Some(1usize), |k| k.checked_mul(2))
            .take_while(|&k| k <= max_k)
            .collect()
    }
}

/// Seed of replication `r`.
pub fn replication_seed(base_seed: u64, replication: usize) -> u64 {
    derive_seed(base_seed, replication as u64)
}

/// Seed of one sweep cell; no two `(replication, k)` cells share samples.
pub fn cell_seed(base_seed: u64, replication: usize, k: usize) -> u64 {
    derive_seed(replication_seed(base_seed, replication), k as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub replication: usize,
    pub seed: u64,
    pub report: BoundReport,
}

/// Across-replication summary for one k.
#[derive(Debug, Clone, PartialEq)]
pub struct KAggregate {
    pub k: usize,
    pub lower_mean: f64,
    pub lower_sd: f64,
    pub upper_mean: f64,
    pub upper_sd: f64,
    pub width_mean: f64,
    pub width_sd: f64,
    /// Mean of the within-run standard errors of the lower bound.
    pub lower_stderr_mean: f64,
    pub upper_stderr_mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Ordered by k, then replication.
    pub rows: Vec<SweepRow>,
    pub aggregates: Vec<KAggregate>,
}

fn sd_or_zero(acc: &MeanVar) -> f64 {
    if acc.count() < 2 {
        0.0
    } else {
        acc.stdev()
    }
}

fn aggregate(k: usize, rows: &[SweepRow]) -> KAggregate {
    let pick = |f: &dyn Fn(&BoundReport) -> f64| -> MeanVar {
        rows.iter().map(|r| f(&r.report)).collect()
    };
    let lower = pick(&|r| r.lower_mean);
    let upper = pick(&|r| r.upper_mean);
    let width = pick(&|r| r.width());
    KAggregate {
        k,
        lower_mean: lower.mean(),
        lower_sd: sd_or_zero(&lower),
        upper_mean: upper.mean(),
        upper_sd: sd_or_zero(&upper),
        width_mean: width.mean(),
        width_sd: sd_or_zero(&width),
        lower_stderr_mean: pick(&|r| r.lower_stderr).mean(),
        upper_stderr_mean: pick(&|r| r.upper_stderr).mean(),
    }
}

/// One sweep cell: draw, split, k-average, bound.
pub fn run_cell(
    source: &dyn PositiveSource,
    k: usize,
    n_pairs: usize,
    seed: u64,
    policy: CPolicy,
) -> Result<BoundReport, HarnessError> {
    let half = n_pairs
        .checked_mul(k)
        .ok_or_else(|| HarnessError::InvalidConfig("n_pairs * k overflows".into()))?;
    let raw = source.draw(2 * half, seed)?;
    if raw.len() != 2 * half {
        return Err(HarnessError::SourceFailure(format!(
            "source returned {} values, expected {}",
            raw.len(),
            2 * half
        )));
    }
    let (raw_x, raw_y) = raw.split_at(half);
    let pairs = k_sample_pairs(raw_x, raw_y, k, source.log_domain())?;
    Ok(sandwich_with_policy(&pairs, policy)?)
}

pub fn run_sweep(
    source: &dyn PositiveSource,
    cfg: &SweepConfig,
) -> Result<SweepResult, HarnessError> {
    cfg.validate()?;
    let cells: Vec<(usize, usize)> = cfg
        .k_values
        .iter()
        .flat_map(|&k| (0..cfg.replications).map(move |r| (k, r)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(k, replication)| {
            let seed = cell_seed(cfg.base_seed, replication, k);
            run_cell(source, k, cfg.n_pairs, seed, cfg.c_policy).map(|report| SweepRow {
                k,
                replication,
                seed,
                report,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let aggregates = rows
        .chunks(cfg.replications)
        .map(|chunk| aggregate(chunk[0].k, chunk))
        .collect();
    Ok(SweepResult { rows, aggregates })
}

pub const SWEEP_CSV_HEADER: [&str; 14] = [
    "dataset",
    "model",
    "k",
    "replication",
    "n_pairs",
    "seed",
    "lower_mean",
    "lower_stderr",
    "upper_mean",
    "upper_stderr",
    "ratio_mean",
    "c_used",
    "midpoint",
    "saturated_pairs",
];

/// LF-terminated CSV writer used for every table the crate emits.
pub fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Writes one CSV row per sweep cell under [`SWEEP_CSV_HEADER`].
///
/// `n_pairs` is the configured pair count per cell; the report's own `n` can
/// be smaller under the pilot policy.
pub fn write_sweep_csv<W: Write>(
    w: W,
    dataset: &str,
    model: &str,
    n_pairs: usize,
    rows: &[SweepRow],
) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(SWEEP_CSV_HEADER)?;
    for row in rows {
        let r = &row.report;
        out.write_record([
            dataset.to_string(),
            model.to_string(),
            row.k.to_string(),
            row.replication.to_string(),
            n_pairs.to_string(),
            row.seed.to_string(),
            r.lower_mean.to_string(),
            r.lower_stderr.to_string(),
            r.upper_mean.to_string(),
            r.upper_stderr.to_string(),
            r.ratio_mean.to_string(),
            r.c_used.to_string(),
            r.midpoint.to_string(),
            r.saturated.to_string(),
        ])?;
    }
    out.flush()
}
