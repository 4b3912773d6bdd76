//! Fitting the per-datapoint bound parameter `C_x`.
//!
//! For a datapoint `x` let `r(x) = E[Ȳ_k / X̄_k]`, where `X̄_k` and `Ȳ_k` are
//! independent k-sample means of `R(x, z)` with `z ~ q(·|x)`. The upper bound
//! at `x` is minimised by `C_x = log r(x)`, so the network is trained on the
//! mean of `C_x - 1 + exp(-C_x) r̂(x)` with a fresh estimate `r̂` every epoch.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::model::{CNet, ToyVae, CNET_PARAMS};
use super::VaeError;
use crate::bounds::SATURATION_EXPONENT;
use crate::rng::{derive_seed, stream_rng, StreamRng};
use crate::stats::{log_sum_exp, LogSumExp};

#[derive(Debug, Clone, PartialEq)]
pub struct CNetConfig {
    /// Inner sample count of the ratio estimate.
    pub k: usize,
    /// `(X̄_k, Ȳ_k)` pairs per datapoint and epoch.
    pub n_pairs: usize,
    pub epochs: usize,
    pub batch: usize,
    pub lr: f64,
    pub seed: u64,
}

impl Default for CNetConfig {
    fn default() -> Self {
        Self {
            k: 64,
            n_pairs: 1,
            epochs: 100,
            batch: 1000,
            lr: 0.05,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedCNet {
    pub cnet: CNet,
    /// Mean objective per epoch, before that epoch's updates.
    pub loss_history: Vec<f64>,
}

/// `log r̂(x)`: the log of the mean over `n_pairs` pairs of
/// `exp(lse(log R̃) - lse(log R))`, each side built from `k` draws.
pub fn log_ratio_estimate(
    model: &ToyVae,
    x: f64,
    k: usize,
    n_pairs: usize,
    rng: &mut StreamRng,
) -> f64 {
    let mut acc = LogSumExp::new();
    for _ in 0..n_pairs {
        let lx = log_sum_exp(&model.sample_log_r(x, k, rng));
        let ly = log_sum_exp(&model.sample_log_r(x, k, rng));
        acc.push(ly - lx);
    }
    acc.log_mean()
}

fn term_and_slope(c: f64, log_r_hat: f64) -> (f64, f64) {
    let e = (log_r_hat - c).min(SATURATION_EXPONENT).exp();
    (c - 1.0 + e, 1.0 - e)
}

/// Mean of `C_x - 1 + exp(log r̂_x - C_x)` over `xs`.
pub fn cnet_objective(cnet: &CNet, xs: &[f64], log_r_hat: &[f64]) -> f64 {
    assert_eq!(xs.len(), log_r_hat.len());
    xs.iter()
        .zip(log_r_hat)
        .map(|(&x, &l)| term_and_slope(cnet.c(x), l).0)
        .sum::<f64>()
        / xs.len() as f64
}

/// [`cnet_objective`] and its gradient in the network parameters. `r̂` is a
/// constant here, so `∂/∂C_x = 1 - exp(log r̂_x - C_x)`.
pub fn cnet_objective_grad(cnet: &CNet, xs: &[f64], log_r_hat: &[f64]) -> (f64, Vec<f64>) {
    assert_eq!(xs.len(), log_r_hat.len());
    let scale = 1.0 / xs.len() as f64;
    let mut grad = vec![0.0; CNET_PARAMS];
    let mut total = 0.0;
    for (&x, &l) in xs.iter().zip(log_r_hat) {
        let trace = cnet.net().forward(x);
        let (term, slope) = term_and_slope(trace.out[0], l);
        total += term;
        cnet.net().backward(&trace, &[scale * slope], &mut grad);
    }
    (total * scale, grad)
}

/// Ratio estimates for every datapoint, one stream per `(seed, index)`.
pub(crate) fn ratio_estimates(
    model: &ToyVae,
    data: &[f64],
    k: usize,
    n_pairs: usize,
    seed: u64,
) -> Vec<f64> {
    data.par_iter()
        .enumerate()
        .map(|(i, &x)| log_ratio_estimate(model, x, k, n_pairs, &mut stream_rng(seed, i as u64)))
        .collect()
}

/// Minibatch SGD on [`cnet_objective`]; the VAE stays frozen.
pub fn train_cnet(
    cnet: &CNet,
    model: &ToyVae,
    data: &[f64],
    cfg: &CNetConfig,
) -> Result<TrainedCNet, VaeError> {
    if data.is_empty() {
        return Err(VaeError::EmptyData);
    }
    if cfg.k == 0 || cfg.n_pairs == 0 || cfg.batch == 0 {
        return Err(VaeError::InvalidArgument(
            "k, n_pairs and batch must be at least 1".into(),
        ));
    }
    if !(cfg.lr >= 0.0 && cfg.lr.is_finite()) {
        return Err(VaeError::InvalidArgument(format!(
            "learning rate must be non-negative, got {}",
            cfg.lr
        )));
    }
    model.check_finite()?;
    let mut cnet = cnet.clone();
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut loss_history = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let epoch_seed = derive_seed(cfg.seed, epoch as u64);
        let log_r_hat = ratio_estimates(model, data, cfg.k, cfg.n_pairs, epoch_seed);
        let loss = cnet_objective(&cnet, data, &log_r_hat);
        if !loss.is_finite() {
            return Err(VaeError::DivergenceDetected { epoch, loss });
        }
        loss_history.push(loss);
        if cfg.lr == 0.0 {
            continue;
        }
        order.shuffle(&mut stream_rng(epoch_seed, u64::MAX));
        for batch in order.chunks(cfg.batch) {
            let xs: Vec<f64> = batch.iter().map(|&i| data[i]).collect();
            let ls: Vec<f64> = batch.iter().map(|&i| log_r_hat[i]).collect();
            let (_, grad) = cnet_objective_grad(&cnet, &xs, &ls);
            for (p, g) in cnet.params_mut().iter_mut().zip(&grad) {
                *p -= cfg.lr * g;
            }
        }
        if cnet.params().iter().any(|p| !p.is_finite()) {
            return Err(VaeError::DivergenceDetected {
                epoch,
                loss: f64::NAN,
            });
        }
    }
    Ok(TrainedCNet { cnet, loss_history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dists::AnalyticDist;

    #[test]
    fn constant_ratio_drives_c_to_its_log() {
        let xs: Vec<f64> = (0..200).map(|i| -1.0 + i as f64 / 100.0).collect();
        let log_r = vec![0.7; xs.len()];
        let mut cnet = CNet::init(3);
        for _ in 0..3000 {
            let (_, g) = cnet_objective_grad(&cnet, &xs, &log_r);
            for (p, gi) in cnet.params_mut().iter_mut().zip(&g) {
                *p -= 0.1 * gi;
            }
        }
        for &x in &xs {
            assert!((cnet.c(x) - 0.7).abs() < 1e-2, "C({x}) = {}", cnet.c(x));
        }
    }

    #[test]
    fn objective_minimum_at_log_ratio() {
        let xs = [0.0];
        let at = |c: f64| cnet_objective(&CNet::constant(c), &xs, &[0.4]);
        assert!(at(0.4) < at(0.3));
        assert!(at(0.4) < at(0.5));
        assert!((at(0.4) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn saturates_instead_of_overflowing() {
        let v = cnet_objective(&CNet::constant(0.0), &[0.0], &[1e4]);
        assert!(v.is_finite());
    }

    #[test]
    fn perfect_model_has_unit_ratio() {
        let model = ToyVae::perfect_constant(0.1, 0.3).unwrap();
        let mut rng = stream_rng(1, 0);
        assert!(log_ratio_estimate(&model, 0.1, 8, 4, &mut rng).abs() < 1e-12);
    }

    #[test]
    fn zero_learning_rate_is_a_no_op() {
        let model = ToyVae::init(1, 0.05).unwrap();
        let data = AnalyticDist::laplace(0.0, 0.2)
            .unwrap()
            .sample(50, 2)
            .unwrap();
        let cnet = CNet::init(5);
        let cfg = CNetConfig {
            k: 4,
            epochs: 2,
            lr: 0.0,
            ..Default::default()
        };
        let out = train_cnet(&cnet, &model, &data, &cfg).unwrap();
        assert_eq!(out.cnet, cnet);
        assert_eq!(out.loss_history.len(), 2);
    }

    #[test]
    fn training_beats_the_zero_baseline() {
        let model = ToyVae::init(1, 0.05).unwrap();
        let data = AnalyticDist::laplace(0.0, 0.2)
            .unwrap()
            .sample(400, 2)
            .unwrap();
        let cfg = CNetConfig {
            k: 4,
            n_pairs: 4,
            epochs: 30,
            batch: 50,
            lr: 0.05,
            seed: 9,
        };
        let trained = train_cnet(&CNet::init(5), &model, &data, &cfg).unwrap();
        let held_out = AnalyticDist::laplace(0.0, 0.2)
            .unwrap()
            .sample(400, 77)
            .unwrap();
        let log_r = ratio_estimates(&model, &held_out, 4, 4, 1234);
        let fitted = cnet_objective(&trained.cnet, &held_out, &log_r);
        let zero = cnet_objective(&CNet::constant(0.0), &held_out, &log_r);
        assert!(fitted <= zero, "{fitted} > {zero}");
    }
}
