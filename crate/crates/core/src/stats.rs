//! Mergeable accumulators: running mean/variance and log-sum-exp.
//!
//! Both accumulators can be filled in chunks and merged in any grouping; the
//! merged result agrees with a single sequential pass up to round-off.

/// Running mean and sum of squared deviations (Welford / Chan et al.).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MeanVar {
    count: u64,
    mean: f64,
    m2: f64,
}

impl MeanVar {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&self, other: &MeanVar) -> MeanVar {
        let count = self.count + other.count;
        if count == 0 {
            return MeanVar::default();
        }
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * nb / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * na * nb / count as f64;
        MeanVar { count, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Unbiased sample variance (`n - 1` denominator); `+inf` below two samples.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            f64::INFINITY
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn stdev(&self) -> f64 {
        self.variance().sqrt()
    }

    /// Standard error of the mean; `+inf` when fewer than two samples were seen.
    pub fn stderr(&self) -> f64 {
        if self.count < 2 {
            f64::INFINITY
        } else {
            (self.variance() / self.count as f64).sqrt()
        }
    }
}

impl FromIterator<f64> for MeanVar {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = MeanVar::new();
        for x in iter {
            acc.push(x);
        }
        acc
    }
}

impl Extend<f64> for MeanVar {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.push(x);
        }
    }
}

/// Streaming `log Σ exp(v_i)` with a running maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSumExp {
    max: f64,
    scaled_sum: f64,
    count: u64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            scaled_sum: 0.0,
            count: 0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        if v == f64::NEG_INFINITY {
            return;
        }
        if v <= self.max {
            self.scaled_sum += (v - self.max).exp();
        } else {
            self.scaled_sum = self.scaled_sum * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    pub fn merge(&self, other: &LogSumExp) -> LogSumExp {
        let count = self.count + other.count;
        if self.max == f64::NEG_INFINITY {
            return LogSumExp { count, ..*other };
        }
        if other.max == f64::NEG_INFINITY {
            return LogSumExp { count, ..*self };
        }
        let max = self.max.max(other.max);
        let scaled_sum =
            self.scaled_sum * (self.max - max).exp() + other.scaled_sum * (other.max - max).exp();
        LogSumExp {
            max,
            scaled_sum,
            count,
        }
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled_sum.ln()
        }
    }

    /// `log((1/n) Σ exp(v_i))`.
    pub fn log_mean(&self) -> f64 {
        self.value() - (self.count as f64).ln()
    }
}

impl FromIterator<f64> for LogSumExp {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = LogSumExp::new();
        for v in iter {
            acc.push(v);
        }
        acc
    }
}

/// Two-pass log-sum-exp over a slice; `-inf` for an empty slice.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// `log((1/n) Σ exp(v_i))`.
pub fn log_mean_exp(values: &[f64]) -> f64 {
    log_sum_exp(values) - (values.len() as f64).ln()
}

/// Normalised weights `exp(v_i - lse(v))`, written into `out`.
pub fn softmax_into(values: &[f64], out: &mut [f64]) {
    let lse = log_sum_exp(values);
    for (o, v) in out.iter_mut().zip(values) {
        *o = (v - lse).exp();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn meanvar_small_cases() {
        let acc: MeanVar = [1.0, 2.0, 3.0, 4.0].into_iter().collect();
        assert_eq!(acc.mean(), 2.5);
        assert_relative_eq!(acc.variance(), 5.0 / 3.0, epsilon = 1e-15);
        let one: MeanVar = [3.0].into_iter().collect();
        assert_eq!(one.stderr(), f64::INFINITY);
        assert!(MeanVar::new().mean().is_nan());
    }

    #[test]
    fn lse_handles_extremes() {
        assert_relative_eq!(log_sum_exp(&[1000.0, 1000.0]), 1000.0 + 2f64.ln());
        assert_relative_eq!(log_sum_exp(&[-1000.0, -1000.0]), -1000.0 + 2f64.ln());
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            f64::NEG_INFINITY
        );
        let acc: LogSumExp = [f64::NEG_INFINITY, 0.0].into_iter().collect();
        assert_relative_eq!(acc.value(), 0.0);
        assert_relative_eq!(acc.log_mean(), -(2f64.ln()));
    }

    proptest! {
        #[test]
        fn chunked_merge_matches_sequential(
            xs in prop::collection::vec(-50.0f64..50.0, 2..400),
            cuts in prop::collection::vec(0usize..400, 0..6),
        ) {
            let mut bounds: Vec<usize> = cuts.into_iter().map(|c| c % xs.len()).collect();
            bounds.push(0);
            bounds.push(xs.len());
            bounds.sort_unstable();
            let seq_mv: MeanVar = xs.iter().copied().collect();
            let seq_lse: LogSumExp = xs.iter().copied().collect();
            let mut mv = MeanVar::new();
            let mut lse = LogSumExp::new();
            for w in bounds.windows(2) {
                let chunk = &xs[w[0]..w[1]];
                mv = mv.merge(&chunk.iter().copied().collect());
                lse = lse.merge(&chunk.iter().copied().collect());
            }
            let tol = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300) + 1e-12;
            prop_assert!(tol(mv.mean(), seq_mv.mean()));
            prop_assert!(tol(mv.variance(), seq_mv.variance()));
            prop_assert_eq!(mv.count(), seq_mv.count());
            prop_assert!(tol(lse.value(), seq_lse.value()));
            prop_assert!(tol(lse.value(), log_sum_exp(&xs)));
        }
    }
}
