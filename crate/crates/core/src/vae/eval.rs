//! Per-datapoint lower and upper evidence bounds.
//!
//! For datapoint `x_i`, draw `z_i1..z_ik` and `z̃_i1..z̃_ik` from `q(·|x_i)` and
//! set `l_j = log R(x_i, z_ij)`, `l̃_j = log R(x_i, z̃_ij)`. Then
//!
//! ```text
//! s_i = log (1/k) Σ_j exp(l_j)
//! S_i = s_i + C - 1 + exp(lse(l̃) - lse(l) - C)
//! ```
//!
//! and the dataset means satisfy `E s̄ <= evidence <= E S̄`.

use std::io::{self, Write};

use rayon::prelude::*;

use super::model::{CNet, ToyVae};
use super::VaeError;
use crate::bounds::saturating_exp;
use crate::harness::{csv_writer, HarnessError, PositiveSource};
use crate::rng::stream_rng;
use crate::stats::{log_sum_exp, MeanVar};

/// Where `C_x` comes from during evaluation.
#[derive(Debug, Clone, Copy)]
pub enum CSource<'a> {
    Net(&'a CNet),
    Fixed(f64),
}

impl CSource<'_> {
    pub fn c(&self, x: f64) -> f64 {
        match self {
            CSource::Net(net) => net.c(x),
            CSource::Fixed(c) => *c,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalRecord {
    pub x: f64,
    /// Lower bound `s_i`.
    pub lower: f64,
    /// Upper bound `S_i`.
    pub upper: f64,
    pub c: f64,
    pub k: usize,
    /// Mean of the `k` values of `log R` behind `s_i`: an ELBO estimate on
    /// the same draws.
    pub elbo: f64,
    /// `exp(lse(l̃) - lse(l))`.
    pub ratio: f64,
    pub saturated: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub records: Vec<EvalRecord>,
    pub k: usize,
    pub lower: f64,
    pub lower_stderr: f64,
    pub upper: f64,
    pub upper_stderr: f64,
    /// Standard error of the per-point `S_i - s_i`.
    pub width_stderr: f64,
    pub elbo: f64,
    pub elbo_stderr: f64,
    pub ratio_mean: f64,
    pub saturated: usize,
}

impl EvalSummary {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

fn eval_point(
    model: &ToyVae,
    c_source: CSource<'_>,
    x: f64,
    k: usize,
    seed: u64,
    i: usize,
) -> EvalRecord {
    let mut rng = stream_rng(seed, i as u64);
    let l = model.sample_log_r(x, k, &mut rng);
    let lt = model.sample_log_r(x, k, &mut rng);
    let lse = log_sum_exp(&l);
    let lower = lse - (k as f64).ln();
    let c = c_source.c(x);
    let (ratio, sat_r) = saturating_exp(log_sum_exp(&lt) - lse);
    let (scaled, sat_s) = saturating_exp(log_sum_exp(&lt) - lse - c);
    EvalRecord {
        x,
        lower,
        upper: lower + (c - 1.0 + scaled),
        c,
        k,
        elbo: l.iter().sum::<f64>() / k as f64,
        ratio,
        saturated: sat_r || sat_s,
    }
}

/// Evaluates both bounds on every datapoint, in parallel; datapoint `i` uses
/// stream `(seed, i)`.
pub fn evaluate(
    model: &ToyVae,
    c_source: CSource<'_>,
    data: &[f64],
    k: usize,
    seed: u64,
) -> Result<EvalSummary, VaeError> {
    if data.is_empty() {
        return Err(VaeError::EmptyData);
    }
    if k == 0 {
        return Err(VaeError::InvalidArgument("k must be at least 1".into()));
    }
    model.check_finite()?;
    let records: Vec<EvalRecord> = data
        .par_iter()
        .enumerate()
        .map(|(i, &x)| eval_point(model, c_source, x, k, seed, i))
        .collect();
    if records
        .iter()
        .any(|r| !r.lower.is_finite() || !r.upper.is_finite())
    {
        return Err(VaeError::NonFiniteParams);
    }
    let lower: MeanVar = records.iter().map(|r| r.lower).collect();
    let upper: MeanVar = records.iter().map(|r| r.upper).collect();
    let width: MeanVar = records.iter().map(|r| r.upper - r.lower).collect();
    let elbo: MeanVar = records.iter().map(|r| r.elbo).collect();
    let ratio: MeanVar = records.iter().map(|r| r.ratio).collect();
    Ok(EvalSummary {
        k,
        lower: lower.mean(),
        lower_stderr: lower.stderr(),
        upper: upper.mean(),
        upper_stderr: upper.stderr(),
        width_stderr: width.stderr(),
        elbo: elbo.mean(),
        elbo_stderr: elbo.stderr(),
        ratio_mean: ratio.mean(),
        saturated: records.iter().filter(|r| r.saturated).count(),
        records,
    })
}

/// Dataset mean of the per-point ELBO with `n_mc` draws each, and its stderr.
pub fn dataset_elbo(
    model: &ToyVae,
    data: &[f64],
    n_mc: usize,
    seed: u64,
) -> Result<(f64, f64), VaeError> {
    if data.is_empty() {
        return Err(VaeError::EmptyData);
    }
    if n_mc == 0 {
        return Err(VaeError::InvalidArgument("n_mc must be at least 1".into()));
    }
    model.check_finite()?;
    let per_point: Vec<f64> = data
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let l = model.sample_log_r(x, n_mc, &mut stream_rng(seed, i as u64));
            l.iter().sum::<f64>() / n_mc as f64
        })
        .collect();
    let acc: MeanVar = per_point.into_iter().collect();
    Ok((acc.mean(), acc.stderr()))
}

/// Writes `x,s,S,c,k` per record and a final `summary` row with the means.
pub fn write_eval_csv<W: Write>(w: W, summary: &EvalSummary) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(["x", "s", "S", "c", "k"])?;
    for r in &summary.records {
        out.write_record([
            r.x.to_string(),
            r.lower.to_string(),
            r.upper.to_string(),
            r.c.to_string(),
            r.k.to_string(),
        ])?;
    }
    let c_mean = summary.records.iter().map(|r| r.c).sum::<f64>() / summary.records.len() as f64;
    out.write_record([
        "summary".to_string(),
        summary.lower.to_string(),
        summary.upper.to_string(),
        c_mean.to_string(),
        summary.k.to_string(),
    ])?;
    out.flush()
}

/// `R(x, z)` with `z ~ q(·|x)` for one fixed datapoint, as log-domain draws.
///
/// Lets the generic sweep harness bound the evidence of a single point.
pub struct PosteriorRatioSource<'a> {
    pub model: &'a ToyVae,
    pub x: f64,
}

impl PositiveSource for PosteriorRatioSource<'_> {
    fn log_domain(&self) -> bool {
        true
    }

    fn draw(&self, n: usize, seed: u64) -> Result<Vec<f64>, HarnessError> {
        self.model
            .check_finite()
            .map_err(|e| HarnessError::SourceFailure(e.to_string()))?;
        Ok(self.model.sample_log_r(self.x, n, &mut stream_rng(seed, 0)))
    }
}
