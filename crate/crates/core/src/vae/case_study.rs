//! The Laplace(0, 0.2) experiment: train a VAE on synthetic data, then bound
//! its evidence for a range of `k`.

use super::cnet::{train_cnet, CNetConfig};
use super::eval::{evaluate, CSource};
use super::model::{CNet, ToyVae, DEFAULT_DECODER_VAR};
use super::train::{train, TrainConfig};
use super::VaeError;
use crate::dists::{laplace_loglik, laplace_loglik_mc, AnalyticDist};

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudyConfig {
    pub loc: f64,
    pub scale: f64,
    pub n_data: usize,
    pub data_seed: u64,
    pub decoder_var: f64,
    pub init_seed: u64,
    pub train: TrainConfig,
    /// `None` evaluates with `C = 0`. Otherwise one C network is fitted per
    /// evaluated `k` (the config's own `k` is overridden).
    pub cnet: Option<CNetConfig>,
    pub k_values: Vec<usize>,
    pub eval_seed: u64,
    /// Draws behind the Monte Carlo log-likelihood of the data law.
    pub loglik_n: usize,
}

impl Default for CaseStudyConfig {
    fn default() -> Self {
        Self {
            loc: 0.0,
            scale: 0.2,
            n_data: 10_000,
            data_seed: 2021,
            decoder_var: DEFAULT_DECODER_VAR,
            init_seed: 7,
            train: TrainConfig::default(),
            cnet: None,
            k_values: vec![1, 4, 16, 64],
            eval_seed: 99,
            loglik_n: 10_000,
        }
    }
}

/// Dataset-level bounds at one `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KPoint {
    pub k: usize,
    pub lower: f64,
    pub lower_stderr: f64,
    pub upper: f64,
    pub upper_stderr: f64,
    pub width_stderr: f64,
    /// ELBO on the draws behind `lower`.
    pub elbo: f64,
    pub elbo_stderr: f64,
    pub saturated: usize,
}

impl KPoint {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseStudyResult {
    pub model: ToyVae,
    /// `(k, network)` pairs when C networks were fitted.
    pub cnets: Vec<(usize, CNet)>,
    pub loss_history: Vec<f64>,
    pub points: Vec<KPoint>,
    pub loglik_exact: f64,
    pub loglik_mc: f64,
    pub loglik_mc_stderr: f64,
}

impl CaseStudyResult {
    pub fn c_mode(&self) -> &'static str {
        if !self.cnets.is_empty() {
            "cnet"
        } else {
            "fixed:0"
        }
    }

    pub fn point(&self, k: usize) -> Option<&KPoint> {
        self.points.iter().find(|p| p.k == k)
    }
}

pub fn run_case_study(cfg: &CaseStudyConfig) -> Result<CaseStudyResult, VaeError> {
    let law = AnalyticDist::laplace(cfg.loc, cfg.scale)
        .map_err(|e| VaeError::InvalidArgument(e.to_string()))?;
    let data = law
        .sample(cfg.n_data, cfg.data_seed)
        .map_err(|e| VaeError::InvalidArgument(e.to_string()))?;
    let init = ToyVae::init(cfg.init_seed, cfg.decoder_var)?;
    let trained = train(&init, &data, &cfg.train)?;
    let mut cnets = Vec::new();
    let mut points = Vec::with_capacity(cfg.k_values.len());
    for &k in &cfg.k_values {
        let cnet = match &cfg.cnet {
            Some(c) => {
                let c = CNetConfig { k, ..c.clone() };
                Some(train_cnet(&CNet::constant(0.0), &trained.model, &data, &c)?.cnet)
            }
            None => None,
        };
        let c_source = cnet.as_ref().map_or(CSource::Fixed(0.0), CSource::Net);
        let s = evaluate(&trained.model, c_source, &data, k, cfg.eval_seed)?;
        points.push(KPoint {
            k,
            lower: s.lower,
            lower_stderr: s.lower_stderr,
            upper: s.upper,
            upper_stderr: s.upper_stderr,
            width_stderr: s.width_stderr,
            elbo: s.elbo,
            elbo_stderr: s.elbo_stderr,
            saturated: s.saturated,
        });
        cnets.extend(cnet.map(|c| (k, c)));
    }
    let loglik_exact =
        laplace_loglik(cfg.loc, cfg.scale).map_err(|e| VaeError::InvalidArgument(e.to_string()))?;
    let (loglik_mc, loglik_mc_stderr) =
        laplace_loglik_mc(cfg.loc, cfg.scale, cfg.loglik_n, cfg.data_seed ^ 1)
            .map_err(|e| VaeError::InvalidArgument(e.to_string()))?;
    Ok(CaseStudyResult {
        model: trained.model,
        cnets,
        loss_history: trained.loss_history,
        points,
        loglik_exact,
        loglik_mc,
        loglik_mc_stderr,
    })
}
