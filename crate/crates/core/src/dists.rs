//! Analytic distributions with closed-form oracle quantities.
//!
//! Each [`AnalyticDist`] can be sampled deterministically from a seed and
//! exposes the exact values the bound estimators should converge to:
//! `E X`, `log E X`, `E log X`, `log E[Y/X]` and the differential entropy.
//!
//! Descriptors parse from strings of the form `kind:key=val{,key=val}`, e.g.
//! `gamma:a=2,theta=1` or `laplace:loc=0,b=0.2`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use statrs::function::gamma::{digamma, ln_gamma};
use thiserror::Error;

use crate::rng::{stream_rng, StreamRng};
use crate::stats::MeanVar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown distribution kind `{0}`")]
    UnknownKind(String),
    #[error("unknown key `{key}` for {kind}")]
    UnknownKey { kind: String, key: String },
    #[error("missing key `{key}` for {kind}")]
    MissingKey { kind: String, key: String },
    #[error("key `{key}` has invalid value `{value}`")]
    BadValue { key: String, value: String },
    #[error("malformed distribution spec `{0}` (expected kind:key=val{{,key=val}})")]
    Malformed(String),
}

impl DistError {
    /// The key the error refers to, if any.
    pub fn offending_key(&self) -> Option<&str> {
        match self {
            DistError::UnknownKey { key, .. }
            | DistError::MissingKey { key, .. }
            | DistError::BadValue { key, .. } => Some(key),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticDist {
    Constant {
        value: f64,
    },
    /// Shape `a`, scale `theta`.
    Gamma {
        shape: f64,
        scale: f64,
    },
    /// `log X ~ N(m, sigma^2)`.
    LogNormal {
        m: f64,
        sigma: f64,
    },
    UniformPos {
        lo: f64,
        hi: f64,
    },
    /// Data law for the VAE case study; not a positive variable.
    Laplace {
        loc: f64,
        b: f64,
    },
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), DistError> {
    if cond {
        Ok(())
    } else {
        Err(DistError::InvalidParams(msg()))
    }
}

impl AnalyticDist {
    pub fn constant(value: f64) -> Result<Self, DistError> {
        Self::Constant { value }.validated()
    }

    pub fn gamma(shape: f64, scale: f64) -> Result<Self, DistError> {
        Self::Gamma { shape, scale }.validated()
    }

    pub fn lognormal(m: f64, sigma: f64) -> Result<Self, DistError> {
        Self::LogNormal { m, sigma }.validated()
    }

    pub fn uniform(lo: f64, hi: f64) -> Result<Self, DistError> {
        Self::UniformPos { lo, hi }.validated()
    }

    pub fn laplace(loc: f64, b: f64) -> Result<Self, DistError> {
        Self::Laplace { loc, b }.validated()
    }

    pub fn validated(self) -> Result<Self, DistError> {
        match self {
            Self::Constant { value } => check(value > 0.0 && value.is_finite(), || {
                format!("constant must be positive, got {value}")
            })?,
            Self::Gamma { shape, scale } => check(
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite(),
                || format!("gamma needs a > 0 and theta > 0, got a={shape}, theta={scale}"),
            )?,
            Self::LogNormal { m, sigma } => {
                check(m.is_finite() && sigma > 0.0 && sigma.is_finite(), || {
                    format!("lognormal needs finite m and sigma > 0, got m={m}, sigma={sigma}")
                })?
            }
            Self::UniformPos { lo, hi } => check(lo > 0.0 && hi > lo && hi.is_finite(), || {
                format!("uniform needs 0 < lo < hi, got lo={lo}, hi={hi}")
            })?,
            Self::Laplace { loc, b } => check(loc.is_finite() && b > 0.0 && b.is_finite(), || {
                format!("laplace needs finite loc and b > 0, got loc={loc}, b={b}")
            })?,
        }
        Ok(self)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Constant { .. } => "constant",
            Self::Gamma { .. } => "gamma",
            Self::LogNormal { .. } => "lognormal",
            Self::UniformPos { .. } => "uniform",
            Self::Laplace { .. } => "laplace",
        }
    }

    /// Whether every draw is strictly positive.
    pub fn is_positive(&self) -> bool {
        !matches!(self, Self::Laplace { .. })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Constant { value } => value,
            Self::Gamma { shape, scale } => shape * scale,
            Self::LogNormal { m, sigma } => (m + 0.5 * sigma * sigma).exp(),
            Self::UniformPos { lo, hi } => 0.5 * (lo + hi),
            Self::Laplace { loc, .. } => loc,
        }
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Self::Constant { .. } => 0.0,
            Self::Gamma { shape, scale } => shape * scale * scale,
            Self::LogNormal { m, sigma } => {
                let s2 = sigma * sigma;
                (s2.exp() - 1.0) * (2.0 * m + s2).exp()
            }
            Self::UniformPos { lo, hi } => (hi - lo).powi(2) / 12.0,
            Self::Laplace { b, .. } => 2.0 * b * b,
        }
    }

    /// `log E X`; unavailable when the mean is not positive.
    pub fn log_mean(&self) -> Option<f64> {
        match *self {
            Self::LogNormal { m, sigma } => Some(m + 0.5 * sigma * sigma),
            _ if self.mean() > 0.0 => Some(self.mean().ln()),
            _ => None,
        }
    }

    /// `E log X`.
    pub fn mean_log(&self) -> Option<f64> {
        match *self {
            Self::Constant { value } => Some(value.ln()),
            Self::Gamma { shape, scale } => Some(digamma(shape) + scale.ln()),
            Self::LogNormal { m, .. } => Some(m),
            Self::UniformPos { lo, hi } => {
                let antiderivative = |x: f64| x * x.ln() - x;
                Some((antiderivative(hi) - antiderivative(lo)) / (hi - lo))
            }
            Self::Laplace { .. } => None,
        }
    }

    /// `log E[Y/X]` for independent `X, Y` from this law; unavailable when infinite.
    pub fn log_ratio_mean(&self) -> Option<f64> {
        match *self {
            Self::Constant { .. } => Some(0.0),
            // E[1/X] = 1 / ((a - 1) theta), finite only for a > 1
            Self::Gamma { shape, .. } if shape > 1.0 => Some((shape / (shape - 1.0)).ln()),
            Self::Gamma { .. } => None,
            Self::LogNormal { sigma, .. } => Some(sigma * sigma),
            Self::UniformPos { lo, hi } => {
                let inv_mean = (hi.ln() - lo.ln()) / (hi - lo);
                Some((self.mean() * inv_mean).ln())
            }
            Self::Laplace { .. } => None,
        }
    }

    /// `E[Y/X] - 1`, the first-order gap of the Jensen bound.
    pub fn first_order_gap(&self) -> Option<f64> {
        match *self {
            Self::Gamma { shape, .. } if shape > 1.0 => Some(1.0 / (shape - 1.0)),
            _ => self.log_ratio_mean().map(|l| l.exp_m1()),
        }
    }

    pub fn differential_entropy(&self) -> Option<f64> {
        match *self {
            Self::Constant { .. } => None,
            Self::Gamma { shape, scale } => {
                Some(shape + scale.ln() + ln_gamma(shape) + (1.0 - shape) * digamma(shape))
            }
            Self::LogNormal { m, sigma } => {
                Some(m + 0.5 + (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln())
            }
            Self::UniformPos { lo, hi } => Some((hi - lo).ln()),
            Self::Laplace { b, .. } => Some(1.0 + (2.0 * b).ln()),
        }
    }

    /// Log density at `x` where it has a closed form.
    pub fn log_density(&self, x: f64) -> Option<f64> {
        match *self {
            Self::Laplace { loc, b } => Some(-(2.0 * b).ln() - (x - loc).abs() / b),
            Self::LogNormal { m, sigma } if x > 0.0 => {
                let z = (x.ln() - m) / sigma;
                Some(-0.5 * z * z - x.ln() - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln())
            }
            _ => None,
        }
    }

    /// Exact law of the mean of `k` independent copies, where one exists.
    pub fn k_averaged_law(&self, k: usize) -> Option<AnalyticDist> {
        if k == 0 {
            return None;
        }
        match *self {
            Self::Constant { .. } => Some(*self),
            Self::Gamma { shape, scale } => Some(Self::Gamma {
                shape: k as f64 * shape,
                scale: scale / k as f64,
            }),
            _ if k == 1 => Some(*self),
            _ => None,
        }
    }

    /// `n` i.i.d. draws, deterministic in `(self, n, seed)`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<f64>, DistError> {
        if n == 0 {
            return Err(DistError::InvalidParams(
                "sample count must be at least 1".into(),
            ));
        }
        self.validated()?;
        let mut rng = stream_rng(seed, 0);
        let mut out = Vec::with_capacity(n);
        self.sample_into(&mut rng, n, &mut out)?;
        Ok(out)
    }

    /// Appends `n` draws from `rng` to `out`.
    pub fn sample_into(
        &self,
        rng: &mut StreamRng,
        n: usize,
        out: &mut Vec<f64>,
    ) -> Result<(), DistError> {
        match *self {
            Self::Constant { value } => out.extend(std::iter::repeat_n(value, n)),
            Self::Gamma { shape, scale } => {
                // Marsaglia-Tsang, with the U^{1/a} boost for a < 1
                let g = Gamma::new(shape, scale)
                    .map_err(|e| DistError::InvalidParams(e.to_string()))?;
                out.extend((0..n).map(|_| g.sample(rng)));
            }
            Self::LogNormal { m, sigma } => out.extend((0..n).map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                (m + sigma * z).exp()
            })),
            Self::UniformPos { lo, hi } => out.extend((0..n).map(|_| {
                let u: f64 = rng.random();
                lo + (hi - lo) * u
            })),
            Self::Laplace { loc, b } => out.extend((0..n).map(|_| {
                let u: f64 = rng.sample::<f64, _>(Open01) - 0.5;
                loc - b * u.signum() * (-2.0 * u.abs()).ln_1p()
            })),
        }
        Ok(())
    }
}

impl fmt::Display for AnalyticDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::Constant { value } => write!(f, "constant:c={value}"),
            Self::Gamma { shape, scale } => write!(f, "gamma:a={shape},theta={scale}"),
            Self::LogNormal { m, sigma } => write!(f, "lognormal:m={m},sigma={sigma}"),
            Self::UniformPos { lo, hi } => write!(f, "uniform:lo={lo},hi={hi}"),
            Self::Laplace { loc, b } => write!(f, "laplace:loc={loc},b={b}"),
        }
    }
}

fn is_decimal(v: &str) -> bool {
    let body = v.strip_prefix(['-', '+']).unwrap_or(v);
    let mut parts = body.splitn(2, ['e', 'E']);
    let mantissa = parts.next().unwrap_or("");
    let exponent_ok = match parts.next() {
        None => true,
        Some(e) => {
            let e = e.strip_prefix(['-', '+']).unwrap_or(e);
            !e.is_empty() && e.bytes().all(|b| b.is_ascii_digit())
        }
    };
    let digits = mantissa.bytes().filter(|b| b.is_ascii_digit()).count();
    let dots = mantissa.bytes().filter(|&b| b == b'.').count();
    exponent_ok
        && digits > 0
        && dots <= 1
        && mantissa.bytes().all(|b| b.is_ascii_digit() || b == b'.')
}

impl FromStr for AnalyticDist {
    type Err = DistError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let (kind, body) = spec
            .split_once(':')
            .ok_or_else(|| DistError::Malformed(spec.to_string()))?;
        let keys: &[&str] = match kind {
            "constant" => &["c"],
            "gamma" => &["a", "theta"],
            "lognormal" => &["m", "sigma"],
            "uniform" => &["lo", "hi"],
            "laplace" => &["loc", "b"],
            other => return Err(DistError::UnknownKind(other.to_string())),
        };
        let mut values = BTreeMap::new();
        for item in body.split(',') {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| DistError::Malformed(spec.to_string()))?;
            if !keys.contains(&key) {
                return Err(DistError::UnknownKey {
                    kind: kind.to_string(),
                    key: key.to_string(),
                });
            }
            let bad = || DistError::BadValue {
                key: key.to_string(),
                value: value.to_string(),
            };
            if !is_decimal(value) {
                return Err(bad());
            }
            let parsed: f64 = value.parse().map_err(|_| bad())?;
            if values.insert(key, parsed).is_some() {
                return Err(DistError::BadValue {
                    key: key.to_string(),
                    value: "duplicate".into(),
                });
            }
        }
        let get = |key: &str| {
            values
                .get(key)
                .copied()
                .ok_or_else(|| DistError::MissingKey {
                    kind: kind.to_string(),
                    key: key.to_string(),
                })
        };
        let dist = match kind {
            "constant" => Self::Constant { value: get("c")? },
            "gamma" => Self::Gamma {
                shape: get("a")?,
                scale: get("theta")?,
            },
            "lognormal" => Self::LogNormal {
                m: get("m")?,
                sigma: get("sigma")?,
            },
            "uniform" => Self::UniformPos {
                lo: get("lo")?,
                hi: get("hi")?,
            },
            _ => Self::Laplace {
                loc: get("loc")?,
                b: get("b")?,
            },
        };
        dist.validated()
    }
}

/// Exact `∫ f log f` for Laplace(loc, b): the negative differential entropy `-(1 + ln 2b)`.
pub fn laplace_loglik(loc: f64, b: f64) -> Result<f64, DistError> {
    let d = AnalyticDist::laplace(loc, b)?;
    Ok(-d
        .differential_entropy()
        .expect("laplace entropy is closed form"))
}

/// Monte Carlo estimate (mean, stderr) of the Laplace log-likelihood of its own data.
pub fn laplace_loglik_mc(loc: f64, b: f64, n: usize, seed: u64) -> Result<(f64, f64), DistError> {
    let d = AnalyticDist::laplace(loc, b)?;
    let acc: MeanVar = d
        .sample(n, seed)?
        .into_iter()
        .map(|x| d.log_density(x).expect("laplace density is closed form"))
        .collect();
    Ok((acc.mean(), acc.stderr()))
}
