use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;

use super::model::{standard_normals, ToyVae, VAE_PARAMS};
use super::VaeError;
use crate::rng::stream_rng;

/// Training objective, maximised by SGD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Elbo,
    /// Importance-weighted bound with `k` samples per datapoint.
    Iwae(usize),
}

impl Objective {
    /// Latent draws per datapoint.
    pub fn samples(&self) -> usize {
        match *self {
            Objective::Elbo => 1,
            Objective::Iwae(k) => k,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Elbo => f.write_str("elbo"),
            Objective::Iwae(k) => write!(f, "iwae:{k}"),
        }
    }
}

impl FromStr for Objective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "elbo" {
            return Ok(Objective::Elbo);
        }
        match s.strip_prefix("iwae:").map(str::parse::<usize>) {
            Some(Ok(k)) if k >= 1 => Ok(Objective::Iwae(k)),
            _ => Err(format!(
                "invalid objective `{s}` (expected elbo or iwae:<k>)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub objective: Objective,
    pub epochs: usize,
    pub batch: usize,
    /// Step size applied to the batch-mean gradient.
    pub lr: f64,
    pub seed: u64,
}

impl TrainConfig {
    pub const DEFAULT_EPOCHS: usize = 2000;
    pub const DEFAULT_BATCH: usize = 1000;
    pub const DEFAULT_LR: f64 = 0.05;
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            objective: Objective::Elbo,
            epochs: Self::DEFAULT_EPOCHS,
            batch: Self::DEFAULT_BATCH,
            lr: Self::DEFAULT_LR,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trained {
    pub model: ToyVae,
    /// Mean negative objective per epoch.
    pub loss_history: Vec<f64>,
}

/// Batch-mean objective and its gradient for fixed noise.
///
/// `eps` holds `k` standard normal draws per datapoint, datapoint-major.
pub fn batch_objective_grad(model: &ToyVae, xs: &[f64], eps: &[f64], k: usize) -> (f64, Vec<f64>) {
    assert_eq!(eps.len(), xs.len() * k);
    let mut grad = vec![0.0; VAE_PARAMS];
    let scale = 1.0 / xs.len() as f64;
    let total: f64 = xs
        .iter()
        .zip(eps.chunks_exact(k))
        .map(|(&x, e)| model.objective_with_grad(x, e, scale, &mut grad))
        .sum();
    (total * scale, grad)
}

/// Plain minibatch SGD on the negative objective.
///
/// Each epoch uses its own stream for the shuffle and the latent noise, so a
/// run is reproducible from `cfg.seed`.
pub fn train(model: &ToyVae, data: &[f64], cfg: &TrainConfig) -> Result<Trained, VaeError> {
    if data.is_empty() {
        return Err(VaeError::EmptyData);
    }
    if !(cfg.lr >= 0.0 && cfg.lr.is_finite()) {
        return Err(VaeError::InvalidArgument(format!(
            "learning rate must be non-negative, got {}",
            cfg.lr
        )));
    }
    if cfg.batch == 0 {
        return Err(VaeError::InvalidArgument(
            "batch size must be at least 1".into(),
        ));
    }
    let k = cfg.objective.samples();
    if k == 0 {
        return Err(VaeError::InvalidArgument("IWAE needs k >= 1".into()));
    }
    model.check_finite()?;
    let mut model = model.clone();
    let mut params = model.params();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut loss_history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let mut rng = stream_rng(cfg.seed, epoch as u64 + 1);
        order.shuffle(&mut rng);
        let mut epoch_total = 0.0;
        for batch in order.chunks(cfg.batch) {
            let xs: Vec<f64> = batch.iter().map(|&i| data[i]).collect();
            let eps = standard_normals(&mut rng, xs.len() * k);
            let (objective, grad) = batch_objective_grad(&model, &xs, &eps, k);
            epoch_total -= objective * xs.len() as f64;
            if cfg.lr > 0.0 {
                for (p, g) in params.iter_mut().zip(&grad) {
                    *p += cfg.lr * g;
                }
                model.set_params(&params);
            }
        }
        let loss = epoch_total / data.len() as f64;
        if !loss.is_finite() || model.check_finite().is_err() {
            return Err(VaeError::DivergenceDetected { epoch, loss });
        }
        loss_history.push(loss);
    }
    Ok(Trained {
        model,
        loss_history,
    })
}
