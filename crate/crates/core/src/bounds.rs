//! Lower and upper bounds on `log E X` from paired samples.
//!
//! Every estimator here works on [`PairedSamples`]: draws `x_i` of a positive
//! variable `X` (optionally a k-sample mean) together with independent copies
//! `y_i` from the same law. With `r_i = y_i / x_i` the estimators are
//!
//! | quantity | per-pair term |
//! |---|---|
//! | Jensen lower bound `E log X` | `log x_i` |
//! | first-order gap `E[Y/X] - 1` | `r_i - 1` |
//! | C-bound `E log X - 1 + C + e^{-C} E[Y/X]` | `log x_i - 1 + C + exp(log r_i - C)` |
//!
//! and the non-additive quantities `C* = log E[Y/X]`, `E log X + C*` and the
//! midpoint `E log X + C*/2` built from a log-sum-exp over `log r_i`.
//!
//! All ratio arithmetic is done on `log y - log x`. A per-pair exponent above
//! [`SATURATION_EXPONENT`] saturates to `f64::MAX` and is counted in
//! [`Estimate::saturated`] instead of producing infinity.

use std::fmt;

use thiserror::Error;

use crate::stats::{LogSumExp, MeanVar};

/// Exponent (natural-log scale) above which a per-pair ratio term saturates.
pub const SATURATION_EXPONENT: f64 = 700.0;

/// Relative step used when probing the minimality half of [`lemma_check`].
pub const LEMMA_DELTA: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("no samples")]
    EmptySamples,
    #[error("xs has {xs} elements but ys has {ys}")]
    LengthMismatch { xs: usize, ys: usize },
    #[error("sample {index} is {value}, expected a positive finite value")]
    NonPositiveSample { index: usize, value: f64 },
    #[error("log-domain sample {index} is {value}, expected a finite value")]
    NonFiniteLogSample { index: usize, value: f64 },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("input length {len} is not divisible by k = {k}")]
    LengthNotDivisible { len: usize, k: usize },
    #[error("C must be finite, got {0}")]
    NonFiniteC(f64),
    #[error("the pilot-optimal policy needs at least 2 pairs, got {0}")]
    TooFewPairsForPilot(usize),
    #[error("empty g values or a grid")]
    EmptyGrid,
    #[error("a grid value {0} is not positive")]
    NonPositiveGrid(f64),
}

/// Paired draws of `X` and an independent copy `Y`.
///
/// Values are either linear (strictly positive) or natural logs of the
/// underlying samples. `k` records how many raw draws were averaged into each
/// element.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSamples {
    xs: Vec<f64>,
    ys: Vec<f64>,
    k: usize,
    log_domain: bool,
}

impl PairedSamples {
    pub fn new(
        xs: Vec<f64>,
        ys: Vec<f64>,
        k: usize,
        log_domain: bool,
    ) -> Result<Self, BoundsError> {
        if xs.len() != ys.len() {
            return Err(BoundsError::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(BoundsError::EmptySamples);
        }
        if k == 0 {
            return Err(BoundsError::InvalidK);
        }
        let n = xs.len();
        for (index, &value) in xs.iter().chain(ys.iter()).enumerate() {
            let index = index % n;
            if log_domain {
                if !value.is_finite() {
                    return Err(BoundsError::NonFiniteLogSample { index, value });
                }
            } else if !(value > 0.0 && value.is_finite()) {
                return Err(BoundsError::NonPositiveSample { index, value });
            }
        }
        Ok(Self {
            xs,
            ys,
            k,
            log_domain,
        })
    }

    /// Linear-domain samples with `k = 1`.
    pub fn linear(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, BoundsError> {
        Self::new(xs, ys, 1, false)
    }

    /// Log-domain samples with `k = 1`.
    pub fn logs(log_xs: Vec<f64>, log_ys: Vec<f64>) -> Result<Self, BoundsError> {
        Self::new(log_xs, log_ys, 1, true)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn is_log_domain(&self) -> bool {
        self.log_domain
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    #[inline]
    fn to_log(&self, v: f64) -> f64 {
        if self.log_domain {
            v
        } else {
            v.ln()
        }
    }

    /// `(log x_i, log y_i)` for every pair.
    pub fn log_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs
            .iter()
            .zip(&self.ys)
            .map(move |(&x, &y)| (self.to_log(x), self.to_log(y)))
    }

    /// Splits into the first `mid` pairs and the rest. `None` if either part would be empty.
    pub fn split_at(&self, mid: usize) -> Option<(PairedSamples, PairedSamples)> {
        if mid == 0 || mid >= self.len() {
            return None;
        }
        let head = PairedSamples {
            xs: self.xs[..mid].to_vec(),
            ys: self.ys[..mid].to_vec(),
            k: self.k,
            log_domain: self.log_domain,
        };
        let tail = PairedSamples {
            xs: self.xs[mid..].to_vec(),
            ys: self.ys[mid..].to_vec(),
            k: self.k,
            log_domain: self.log_domain,
        };
        Some((head, tail))
    }
}

/// Monte Carlo mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    /// Sample stdev over `sqrt(n)` with an `n - 1` denominator; `+inf` when `n = 1`.
    pub stderr: f64,
    pub n: usize,
    /// Pairs whose ratio term saturated.
    pub saturated: usize,
}

impl Estimate {
    fn from_acc(acc: &MeanVar, saturated: usize) -> Self {
        let mut stderr = acc.stderr();
        if saturated > 0 && !stderr.is_finite() && acc.count() > 1 {
            stderr = f64::MAX;
        }
        Estimate {
            mean: acc.mean(),
            stderr,
            n: acc.count() as usize,
            saturated,
        }
    }
}

/// `exp(e)` saturating at `f64::MAX` once `e` exceeds [`SATURATION_EXPONENT`].
#[inline]
pub fn saturating_exp(e: f64) -> (f64, bool) {
    if e > SATURATION_EXPONENT {
        (f64::MAX, true)
    } else {
        (e.exp(), false)
    }
}

/// Jensen lower bound: mean and stderr of `log x_i`.
pub fn jensen_lower(s: &PairedSamples) -> Estimate {
    let acc: MeanVar = s.log_pairs().map(|(lx, _)| lx).collect();
    Estimate::from_acc(&acc, 0)
}

/// First-order gap `E[Y/X] - 1`; `jensen_lower + gap` bounds `log E X` from above.
pub fn gap_upper_first_order(s: &PairedSamples) -> Estimate {
    let mut acc = MeanVar::new();
    let mut saturated = 0;
    for (lx, ly) in s.log_pairs() {
        let (r, sat) = saturating_exp(ly - lx);
        saturated += sat as usize;
        acc.push(r - 1.0);
    }
    Estimate::from_acc(&acc, saturated)
}

/// Averages consecutive non-overlapping blocks of `k` raw draws.
///
/// Log-domain inputs are averaged in the linear domain through a log-sum-exp,
/// so the output stays in log domain.
pub fn k_sample_pairs(
    raw_x: &[f64],
    raw_y: &[f64],
    k: usize,
    log_domain: bool,
) -> Result<PairedSamples, BoundsError> {
    if k == 0 {
        return Err(BoundsError::InvalidK);
    }
    for raw in [raw_x, raw_y] {
        if raw.len() % k != 0 {
            return Err(BoundsError::LengthNotDivisible { len: raw.len(), k });
        }
    }
    let average = |raw: &[f64]| -> Vec<f64> {
        raw.chunks_exact(k)
            .map(|block| {
                if log_domain {
                    block.iter().copied().collect::<LogSumExp>().log_mean()
                } else {
                    block.iter().sum::<f64>() / k as f64
                }
            })
            .collect()
    };
    PairedSamples::new(average(raw_x), average(raw_y), k, log_domain)
}

/// The C-parameterised upper bound `E log X - 1 + C + e^{-C} E[Y/X]`.
pub fn improved_upper(s: &PairedSamples, c: f64) -> Result<Estimate, BoundsError> {
    if !c.is_finite() {
        return Err(BoundsError::NonFiniteC(c));
    }
    let mut acc = MeanVar::new();
    let mut saturated = 0;
    for (lx, ly) in s.log_pairs() {
        let (scaled_ratio, sat) = saturating_exp(ly - lx - c);
        saturated += sat as usize;
        acc.push(lx - 1.0 + c + scaled_ratio);
    }
    Ok(Estimate::from_acc(&acc, saturated))
}

fn log_ratio_acc(s: &PairedSamples) -> LogSumExp {
    s.log_pairs().map(|(lx, ly)| ly - lx).collect()
}

/// `C* = log E[Y/X]`, the minimiser of `C + e^{-C} E[Y/X]`.
pub fn optimal_c(s: &PairedSamples) -> f64 {
    log_ratio_acc(s).log_mean()
}

/// [`optimal_c`] with a delta-method standard error `sd(r_i / r̄) / sqrt(n)`.
pub fn optimal_c_estimate(s: &PairedSamples) -> Estimate {
    let c = optimal_c(s);
    let acc: MeanVar = s.log_pairs().map(|(lx, ly)| (ly - lx - c).exp()).collect();
    Estimate {
        mean: c,
        stderr: acc.stderr(),
        n: s.len(),
        saturated: 0,
    }
}

/// `E log X + log E[Y/X]`: the tightest member of the C family. Not additive over pairs.
pub fn optimal_upper(s: &PairedSamples) -> f64 {
    jensen_lower(s).mean + optimal_c(s)
}

/// Midpoint estimate `E log X + ½ log E[Y/X]`, exact for log-normal `X`.
pub fn midpoint_evidence(s: &PairedSamples) -> f64 {
    jensen_lower(s).mean + 0.5 * optimal_c(s)
}

/// [`midpoint_evidence`] with a delta-method standard error.
///
/// The per-pair influence term is `log x_i + ½ r_i / r̄`, which accounts for
/// the correlation between `log x_i` and `r_i`.
pub fn midpoint_estimate(s: &PairedSamples) -> Estimate {
    let c = optimal_c(s);
    let acc: MeanVar = s
        .log_pairs()
        .map(|(lx, ly)| lx + 0.5 * (ly - lx - c).exp())
        .collect();
    Estimate {
        mean: midpoint_evidence(s),
        stderr: acc.stderr(),
        n: s.len(),
        saturated: 0,
    }
}

/// Lower and upper evidence bounds from one batch of pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub lower_mean: f64,
    pub lower_stderr: f64,
    pub upper_mean: f64,
    pub upper_stderr: f64,
    /// Estimate of `E[Y/X]`.
    pub ratio_mean: f64,
    pub c_used: f64,
    pub n: usize,
    pub k: usize,
    pub midpoint: f64,
    pub saturated: usize,
}

impl BoundReport {
    pub fn width(&self) -> f64 {
        self.upper_mean - self.lower_mean
    }
}

/// Assembles lower, C-bound upper, ratio and midpoint on the same pairs.
pub fn sandwich(s: &PairedSamples, c: f64) -> Result<BoundReport, BoundsError> {
    let lower = jensen_lower(s);
    let upper = improved_upper(s, c)?;
    let log_ratio = optimal_c(s);
    Ok(BoundReport {
        lower_mean: lower.mean,
        lower_stderr: lower.stderr,
        upper_mean: upper.mean,
        upper_stderr: upper.stderr,
        ratio_mean: log_ratio.exp(),
        c_used: c,
        n: s.len(),
        k: s.k(),
        midpoint: lower.mean + 0.5 * log_ratio,
        saturated: upper.saturated,
    })
}

/// How the C of the upper bound is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CPolicy {
    Fixed(f64),
    /// `optimal_c` on a pilot prefix of the pairs, frozen for the remainder.
    PilotOptimal,
    Zero,
}

impl fmt::Display for CPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CPolicy::Fixed(c) => write!(f, "fixed:{c}"),
            CPolicy::PilotOptimal => f.write_str("pilot-optimal"),
            CPolicy::Zero => f.write_str("zero"),
        }
    }
}

impl std::str::FromStr for CPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "zero" => Ok(CPolicy::Zero),
            "pilot-optimal" | "pilot" => Ok(CPolicy::PilotOptimal),
            other => match other.strip_prefix("fixed:") {
                Some(v) => v
                    .parse::<f64>()
                    .ok()
                    .filter(|c| c.is_finite())
                    .map(CPolicy::Fixed)
                    .ok_or_else(|| format!("invalid C value `{v}`")),
                None => Err(format!(
                    "unknown C policy `{other}` (expected zero, pilot-optimal or fixed:<c>)"
                )),
            },
        }
    }
}

/// Number of leading pairs used as the pilot batch: 10% of `n`, at least 64,
/// and never more than half of the pairs.
pub fn pilot_len(n: usize) -> usize {
    let p = n.div_ceil(10).max(64);
    p.min(n / 2)
}

/// [`sandwich`] with C chosen by `policy`.
///
/// Under [`CPolicy::PilotOptimal`] the report is computed on the pairs left
/// after the pilot prefix, so C is independent of the samples it is applied to.
pub fn sandwich_with_policy(
    s: &PairedSamples,
    policy: CPolicy,
) -> Result<BoundReport, BoundsError> {
    match policy {
        CPolicy::Zero => sandwich(s, 0.0),
        CPolicy::Fixed(c) => sandwich(s, c),
        CPolicy::PilotOptimal => {
            let (pilot, rest) = s
                .split_at(pilot_len(s.len()))
                .ok_or(BoundsError::TooFewPairsForPilot(s.len()))?;
            sandwich(&rest, optimal_c(&pilot))
        }
    }
}

/// `g_C(x) = log x - 1 + C`, the family that turns the general bound into the C-bound.
pub fn g_family(c: f64, x: f64) -> f64 {
    x.ln() - 1.0 + c
}

/// The optimal slope `h(x) = exp(-g(x) - 1)` for a given `g(x)`.
pub fn optimal_h(g: f64) -> f64 {
    (-g - 1.0).exp()
}

/// Checks `log a <= g + a h` with `h = h_scale * exp(-g - 1)` on the grid, and
/// that shrinking the optimal slope by `1 - LEMMA_DELTA` breaks the inequality
/// somewhere on the grid for every `g`.
///
/// Returns `true` only when both hold: the scaled slope is valid and the
/// optimal slope is pointwise minimal as far as the grid can resolve.
pub fn lemma_check(g_values: &[f64], a_grid: &[f64], h_scale: f64) -> Result<bool, BoundsError> {
    if g_values.is_empty() || a_grid.is_empty() {
        return Err(BoundsError::EmptyGrid);
    }
    if let Some(&a) = a_grid.iter().find(|&&a| a.is_nan() || a <= 0.0) {
        return Err(BoundsError::NonPositiveGrid(a));
    }
    for &g in g_values {
        let h = optimal_h(g);
        let valid = a_grid.iter().all(|&a| {
            let lhs = a.ln();
            let rhs = g + a * h * h_scale;
            lhs <= rhs + 1e-12 * (1.0 + lhs.abs().max(rhs.abs()))
        });
        if !valid {
            return Ok(false);
        }
        let shrunk = h * (1.0 - LEMMA_DELTA);
        let minimal = a_grid.iter().any(|&a| a.ln() > g + a * shrunk);
        if !minimal {
            return Ok(false);
        }
    }
    Ok(true)
}

/// [`lemma_check`] with the unscaled optimal slope.
pub fn optimal_h_check(g_values: &[f64], a_grid: &[f64]) -> Result<bool, BoundsError> {
    lemma_check(g_values, a_grid, 1.0)
}

/// `n` log-spaced points covering `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (llo + (lhi - llo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::E;

    fn constant(c: f64, n: usize) -> PairedSamples {
        PairedSamples::linear(vec![c; n], vec![c; n]).unwrap()
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert_eq!(
            PairedSamples::linear(vec![], vec![]),
            Err(BoundsError::EmptySamples)
        );
        assert!(matches!(
            PairedSamples::linear(vec![1.0], vec![1.0, 2.0]),
            Err(BoundsError::LengthMismatch { .. })
        ));
        assert_eq!(
            PairedSamples::linear(vec![1.0, 0.0], vec![1.0, 1.0]),
            Err(BoundsError::NonPositiveSample {
                index: 1,
                value: 0.0
            })
        );
        assert_eq!(
            PairedSamples::linear(vec![1.0, 1.0], vec![1.0, -2.0]),
            Err(BoundsError::NonPositiveSample {
                index: 1,
                value: -2.0
            })
        );
        assert!(PairedSamples::linear(vec![f64::INFINITY], vec![1.0]).is_err());
        assert!(PairedSamples::logs(vec![f64::NAN], vec![1.0]).is_err());
        assert!(PairedSamples::logs(vec![-5.0], vec![3.0]).is_ok());
        assert_eq!(
            PairedSamples::new(vec![1.0], vec![1.0], 0, false),
            Err(BoundsError::InvalidK)
        );
    }

    #[test]
    fn jensen_on_constant_e() {
        let est = jensen_lower(&constant(E, 3));
        assert_relative_eq!(est.mean, 1.0, epsilon = 1e-15);
        assert_eq!(est.stderr, 0.0);
    }

    #[test]
    fn single_pair_has_infinite_stderr() {
        let s = constant(2.0, 1);
        assert_eq!(jensen_lower(&s).stderr, f64::INFINITY);
        assert_eq!(gap_upper_first_order(&s).stderr, f64::INFINITY);
    }

    #[test]
    fn constant_samples_close_the_gap() {
        let s = constant(3.0, 5);
        assert_eq!(gap_upper_first_order(&s).mean, 0.0);
        assert_eq!(optimal_c(&s), 0.0);
        assert_relative_eq!(
            improved_upper(&s, 0.0).unwrap().mean,
            3f64.ln(),
            epsilon = 1e-15
        );
        assert_relative_eq!(optimal_upper(&s), 3f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(midpoint_evidence(&s), 3f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn k_sample_pairs_examples() {
        let s = k_sample_pairs(&[1.0, 3.0, 2.0, 4.0], &[1.0, 3.0, 2.0, 4.0], 2, false).unwrap();
        assert_eq!(s.xs(), &[2.0, 3.0]);
        assert_eq!(s.k(), 2);
        let s = k_sample_pairs(&[5.0], &[5.0], 1, false).unwrap();
        assert_eq!(s.xs(), &[5.0]);
        let logs = [1f64.ln(), 3f64.ln()];
        let s = k_sample_pairs(&logs, &logs, 2, true).unwrap();
        assert_relative_eq!(s.xs()[0], 2f64.ln(), epsilon = 1e-15);
        assert!(s.is_log_domain());
        assert_eq!(
            k_sample_pairs(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 2, false),
            Err(BoundsError::LengthNotDivisible { len: 3, k: 2 })
        );
        assert_eq!(
            k_sample_pairs(&[1.0], &[1.0], 0, false),
            Err(BoundsError::InvalidK)
        );
    }

    #[test]
    fn improved_upper_rejects_non_finite_c() {
        let s = constant(1.0, 2);
        assert!(matches!(
            improved_upper(&s, f64::NAN),
            Err(BoundsError::NonFiniteC(_))
        ));
        assert!(matches!(
            improved_upper(&s, f64::INFINITY),
            Err(BoundsError::NonFiniteC(_))
        ));
    }

    #[test]
    fn c_zero_reduces_to_first_order_bound() {
        let s = PairedSamples::linear(vec![0.5, 2.0, 3.0, 0.1], vec![1.5, 0.2, 4.0, 7.0]).unwrap();
        let lhs = improved_upper(&s, 0.0).unwrap().mean;
        let rhs = jensen_lower(&s).mean + gap_upper_first_order(&s).mean;
        assert_relative_eq!(lhs, rhs, max_relative = 1e-12);
    }

    #[test]
    fn log_and_linear_domains_agree() {
        let xs = vec![0.5, 2.0, 3.0, 0.1];
        let ys = vec![1.5, 0.2, 4.0, 7.0];
        let lin = PairedSamples::linear(xs.clone(), ys.clone()).unwrap();
        let log = PairedSamples::logs(
            xs.iter().map(|v| v.ln()).collect(),
            ys.iter().map(|v| v.ln()).collect(),
        )
        .unwrap();
        let a = sandwich(&lin, 0.3).unwrap();
        let b = sandwich(&log, 0.3).unwrap();
        assert_relative_eq!(a.lower_mean, b.lower_mean, epsilon = 1e-14);
        assert_relative_eq!(a.upper_mean, b.upper_mean, epsilon = 1e-14);
        assert_relative_eq!(a.midpoint, b.midpoint, epsilon = 1e-14);
    }

    #[test]
    fn ratios_saturate_instead_of_overflowing() {
        let s = PairedSamples::logs(vec![0.0, -800.0], vec![0.0, 0.0]).unwrap();
        let gap = gap_upper_first_order(&s);
        assert_eq!(gap.saturated, 1);
        assert!(gap.mean.is_finite());
        assert!(gap.stderr.is_finite());
        let up = improved_upper(&s, 0.0).unwrap();
        assert_eq!(up.saturated, 1);
        // a large enough C brings the term back into range
        let up = improved_upper(&s, 200.0).unwrap();
        assert_eq!(up.saturated, 0);
        assert!(optimal_c(&s).is_finite());
        let report = sandwich(&s, 0.0).unwrap();
        assert_eq!(report.saturated, 1);
    }

    #[test]
    fn sandwich_on_constant_one() {
        let r = sandwich(&constant(1.0, 4), 0.0).unwrap();
        assert_eq!((r.lower_mean, r.upper_mean, r.midpoint), (0.0, 0.0, 0.0));
        assert_eq!(r.ratio_mean, 1.0);
        assert_eq!(r.n, 4);
    }

    #[test]
    fn midpoint_is_half_way_at_optimal_c() {
        let s = PairedSamples::linear(vec![0.5, 2.0, 3.0, 0.1], vec![1.5, 0.2, 4.0, 7.0]).unwrap();
        let r = sandwich(&s, optimal_c(&s)).unwrap();
        assert_relative_eq!(
            r.midpoint,
            r.lower_mean + 0.5 * (r.upper_mean - r.lower_mean),
            epsilon = 1e-12
        );
        assert_relative_eq!(r.upper_mean, optimal_upper(&s), epsilon = 1e-12);
    }

    #[test]
    fn pilot_policy_uses_disjoint_pairs() {
        assert_eq!(pilot_len(1000), 100);
        assert_eq!(pilot_len(200), 64);
        assert_eq!(pilot_len(100), 50);
        assert_eq!(pilot_len(3), 1);
        let s = constant(2.0, 1000);
        let r = sandwich_with_policy(&s, CPolicy::PilotOptimal).unwrap();
        assert_eq!(r.n, 900);
        assert_eq!(r.c_used, 0.0);
        assert_eq!(
            sandwich_with_policy(&constant(2.0, 1), CPolicy::PilotOptimal),
            Err(BoundsError::TooFewPairsForPilot(1))
        );
    }

    #[test]
    fn c_policy_parses() {
        assert_eq!("zero".parse::<CPolicy>(), Ok(CPolicy::Zero));
        assert_eq!(
            "pilot-optimal".parse::<CPolicy>(),
            Ok(CPolicy::PilotOptimal)
        );
        assert_eq!("fixed:-1.5".parse::<CPolicy>(), Ok(CPolicy::Fixed(-1.5)));
        assert!("fixed:inf".parse::<CPolicy>().is_err());
        assert!("best".parse::<CPolicy>().is_err());
        for p in [CPolicy::Zero, CPolicy::PilotOptimal, CPolicy::Fixed(0.25)] {
            assert_eq!(p.to_string().parse::<CPolicy>(), Ok(p));
        }
    }

    #[test]
    fn lemma_tangent_case() {
        assert_eq!(optimal_h_check(&[-1.0], &[0.5, 1.0, 2.0]), Ok(true));
    }

    #[test]
    fn lemma_g_family_at_one() {
        let g = g_family(0.0, 1.0);
        let grid = log_grid(1e-3, 1e3, 20_001);
        assert_eq!(optimal_h_check(&[g], &grid), Ok(true));
    }

    #[test]
    fn lemma_detects_perturbed_slope() {
        let g = 0.3;
        let grid = vec![0.1, (1.0_f64 + g).exp(), 10.0];
        assert_eq!(lemma_check(&[g], &grid, 0.999), Ok(false));
        assert_eq!(lemma_check(&[g], &grid, 1.0), Ok(true));
    }

    #[test]
    fn lemma_minimality_needs_a_fine_grid() {
        // A grid that misses a* = e^{1+g} cannot witness the minimality.
        assert_eq!(optimal_h_check(&[-1.0], &[0.5, 2.0]), Ok(false));
    }

    #[test]
    fn lemma_rejects_empty_or_bad_grid() {
        assert_eq!(optimal_h_check(&[], &[1.0]), Err(BoundsError::EmptyGrid));
        assert_eq!(optimal_h_check(&[0.0], &[]), Err(BoundsError::EmptyGrid));
        assert_eq!(
            optimal_h_check(&[0.0], &[1.0, -1.0]),
            Err(BoundsError::NonPositiveGrid(-1.0))
        );
    }
}
