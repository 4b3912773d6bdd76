use rand_distr::{Distribution, StandardNormal};

use super::mlp::{Mlp, Trace};
use super::VaeError;
use crate::rng::{stream_rng, StreamRng};
use crate::stats::{log_mean_exp, LogSumExp};

/// One-dimensional Gaussian VAE.
///
/// * encoder `x -> (mu_x, log sigma_x)`, an [`Mlp`] with two outputs
/// * decoder `z -> mean of p(x|z)`, an [`Mlp`] with one output
/// * `p(x|z) = N(dec(z), decoder_var)`, `p(z) = N(0, 1)`, `q(z|x) = N(mu_x, sigma_x^2)`
///
/// The flat parameter order is encoder then decoder.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyVae {
    encoder: Mlp,
    decoder: Mlp,
    decoder_var: f64,
}

pub const ENCODER_PARAMS: usize = Mlp::param_count_for(2);
pub const DECODER_PARAMS: usize = Mlp::param_count_for(1);
pub const VAE_PARAMS: usize = ENCODER_PARAMS + DECODER_PARAMS;
pub const CNET_PARAMS: usize = Mlp::param_count_for(1);

/// Decoder variance used for image-scale models.
pub const IMAGE_DECODER_VAR: f64 = 0.3;

/// Default decoder variance for the one-dimensional Laplace case study.
pub const DEFAULT_DECODER_VAR: f64 = 0.05;

const LN_2PI: f64 = 1.837_877_066_409_345_3;

#[inline]
pub fn log_normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    -0.5 * (LN_2PI + var.ln()) - (x - mean).powi(2) / (2.0 * var)
}

impl ToyVae {
    /// Uniform `[-0.5, 0.5]` weights; the `log sigma` head starts at zero.
    pub fn init(seed: u64, decoder_var: f64) -> Result<Self, VaeError> {
        check_var(decoder_var)?;
        let mut rng = stream_rng(seed, 0);
        let mut encoder = Mlp::init(2, &mut rng);
        encoder.zero_output(1);
        let decoder = Mlp::init(1, &mut rng);
        Ok(Self {
            encoder,
            decoder,
            decoder_var,
        })
    }

    pub fn from_parts(encoder: Mlp, decoder: Mlp, decoder_var: f64) -> Result<Self, VaeError> {
        check_var(decoder_var)?;
        if encoder.n_out() != 2 || decoder.n_out() != 1 {
            return Err(VaeError::InvalidArgument(
                "encoder needs 2 outputs, decoder 1".into(),
            ));
        }
        Ok(Self {
            encoder,
            decoder,
            decoder_var,
        })
    }

    pub fn from_params(params: &[f64], decoder_var: f64) -> Result<Self, VaeError> {
        if params.len() != VAE_PARAMS {
            return Err(VaeError::InvalidArgument(format!(
                "expected {VAE_PARAMS} parameters, got {}",
                params.len()
            )));
        }
        let encoder =
            Mlp::from_params(2, params[..ENCODER_PARAMS].to_vec()).expect("sizes checked");
        let decoder =
            Mlp::from_params(1, params[ENCODER_PARAMS..].to_vec()).expect("sizes checked");
        Self::from_parts(encoder, decoder, decoder_var)
    }

    /// A model whose importance ratio is constant in `z`: the decoder outputs
    /// `x_const` everywhere and the encoder returns the prior.
    pub fn perfect_constant(x_const: f64, decoder_var: f64) -> Result<Self, VaeError> {
        let mut encoder = Mlp::zeros(2);
        encoder.set_output_constant(0, 0.0);
        encoder.set_output_constant(1, 0.0);
        let mut decoder = Mlp::zeros(1);
        decoder.set_output_constant(0, x_const);
        Self::from_parts(encoder, decoder, decoder_var)
    }

    pub fn decoder_var(&self) -> f64 {
        self.decoder_var
    }

    pub fn encoder(&self) -> &Mlp {
        &self.encoder
    }

    pub fn decoder(&self) -> &Mlp {
        &self.decoder
    }

    pub fn encoder_mut(&mut self) -> &mut Mlp {
        &mut self.encoder
    }

    pub fn decoder_mut(&mut self) -> &mut Mlp {
        &mut self.decoder
    }

    pub fn params(&self) -> Vec<f64> {
        let mut p = self.encoder.params().to_vec();
        p.extend_from_slice(self.decoder.params());
        p
    }

    pub fn set_params(&mut self, params: &[f64]) {
        assert_eq!(params.len(), VAE_PARAMS);
        self.encoder
            .params_mut()
            .copy_from_slice(&params[..ENCODER_PARAMS]);
        self.decoder
            .params_mut()
            .copy_from_slice(&params[ENCODER_PARAMS..]);
    }

    pub fn check_finite(&self) -> Result<(), VaeError> {
        let ok = self
            .encoder
            .params()
            .iter()
            .chain(self.decoder.params())
            .all(|p| p.is_finite());
        if ok {
            Ok(())
        } else {
            Err(VaeError::NonFiniteParams)
        }
    }

    /// `(mu_x, log sigma_x)`.
    pub fn encode(&self, x: f64) -> (f64, f64) {
        let t = self.encoder.forward(x);
        (t.out[0], t.out[1])
    }

    pub fn decode(&self, z: f64) -> f64 {
        self.decoder.forward(z).out[0]
    }

    /// `log R(x, z) = log p(x|z) + log p(z) - log q(z|x)`.
    pub fn log_r(&self, x: f64, z: f64) -> Result<f64, VaeError> {
        self.check_finite()?;
        Ok(self.log_r_unchecked(x, z))
    }

    pub(crate) fn log_r_unchecked(&self, x: f64, z: f64) -> f64 {
        let (mu, log_sigma) = self.encode(x);
        let sigma = log_sigma.exp();
        let d = self.decode(z);
        let u = (z - mu) / sigma;
        // log p(z) - log q(z|x), with the 2π terms cancelled
        let prior_minus_q = (0.5 * u * u - 0.5 * z * z) + log_sigma;
        log_normal_pdf(x, d, self.decoder_var) + prior_minus_q
    }

    /// `log R(x, mu_x + sigma_x eps)`.
    pub(crate) fn log_r_reparam(&self, x: f64, eps: f64) -> f64 {
        let (mu, log_sigma) = self.encode(x);
        self.log_r_unchecked(x, mu + log_sigma.exp() * eps)
    }

    /// `log R` at `z = mu_x + sigma_x eps`, accumulating `scale · ∇ log R` into `grad`.
    ///
    /// Through the reparameterisation `log q(z|x) = -½ln2π - log sigma - eps²/2`,
    /// so `∂/∂mu = g_z` and `∂/∂log sigma = g_z sigma eps + 1`, where `g_z` is
    /// the derivative of `log p(x|z) + log p(z)` with respect to `z`.
    pub(crate) fn log_r_with_grad(&self, x: f64, eps: f64, scale: f64, grad: &mut [f64]) -> f64 {
        let te: Trace = self.encoder.forward(x);
        let (mu, log_sigma) = (te.out[0], te.out[1]);
        let sigma = log_sigma.exp();
        let z = mu + sigma * eps;
        let td = self.decoder.forward(z);
        let d = td.out[0];
        let v = self.decoder_var;
        let value = -0.5 * (LN_2PI + v.ln()) - (x - d).powi(2) / (2.0 * v) - 0.5 * z * z
            + log_sigma
            + 0.5 * eps * eps;
        let (g_enc, g_dec) = grad.split_at_mut(ENCODER_PARAMS);
        let d_dec = scale * (x - d) / v;
        let g_z = self.decoder.backward(&td, &[d_dec], g_dec) - scale * z;
        self.encoder
            .backward(&te, &[g_z, g_z * sigma * eps + scale], g_enc);
        value
    }

    /// `log (1/k) Σ_j R(x, z_j)` at `z_j = mu_x + sigma_x eps_j`, accumulating
    /// `scale ·` its gradient into `grad`.
    ///
    /// The gradient of the log-mean-exp is `Σ_j w_j ∇ log R_j` with normalised
    /// importance weights `w = softmax(log R)`.
    pub fn objective_with_grad(&self, x: f64, eps: &[f64], scale: f64, grad: &mut [f64]) -> f64 {
        if eps.len() == 1 {
            return self.log_r_with_grad(x, eps[0], scale, grad);
        }
        let logs: Vec<f64> = eps.iter().map(|&e| self.log_r_reparam(x, e)).collect();
        let lse: LogSumExp = logs.iter().copied().collect();
        let total = lse.value();
        for (&e, &l) in eps.iter().zip(&logs) {
            let w = (l - total).exp();
            if w > 0.0 {
                self.log_r_with_grad(x, e, scale * w, grad);
            }
        }
        lse.log_mean()
    }

    /// `log (1/k) Σ_j R(x, z_j)` without gradients.
    pub fn objective(&self, x: f64, eps: &[f64]) -> f64 {
        let logs: Vec<f64> = eps.iter().map(|&e| self.log_r_reparam(x, e)).collect();
        log_mean_exp(&logs)
    }

    /// Draws `n` values of `log R(x, z)` with `z ~ q(·|x)`.
    pub fn sample_log_r(&self, x: f64, n: usize, rng: &mut StreamRng) -> Vec<f64> {
        let (mu, log_sigma) = self.encode(x);
        let sigma = log_sigma.exp();
        (0..n)
            .map(|_| {
                let e: f64 = StandardNormal.sample(rng);
                self.log_r_unchecked(x, mu + sigma * e)
            })
            .collect()
    }
}

fn check_var(v: f64) -> Result<(), VaeError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(VaeError::InvalidArgument(format!(
            "decoder variance must be positive, got {v}"
        )))
    }
}

pub(crate) fn standard_normals(rng: &mut StreamRng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// Monte Carlo ELBO at `x`: the mean of `log R(x, z)` over `n_mc` draws
/// `z = mu_x + sigma_x eps`.
///
/// Draws come from stream `(seed, 0)`; [`iw_elbo`] consumes the same stream so
/// the two share randomness for equal seeds.
pub fn elbo(model: &ToyVae, x: f64, n_mc: usize, seed: u64) -> Result<f64, VaeError> {
    if n_mc == 0 {
        return Err(VaeError::InvalidArgument("n_mc must be at least 1".into()));
    }
    model.check_finite()?;
    let mut rng = stream_rng(seed, 0);
    let eps = standard_normals(&mut rng, n_mc);
    Ok(eps.iter().map(|&e| model.log_r_reparam(x, e)).sum::<f64>() / n_mc as f64)
}

/// Importance-weighted bound: mean over `n_outer` groups of the log-mean-exp of
/// `k` values of `log R(x, z)`.
pub fn iw_elbo(
    model: &ToyVae,
    x: f64,
    k: usize,
    n_outer: usize,
    seed: u64,
) -> Result<f64, VaeError> {
    if k == 0 || n_outer == 0 {
        return Err(VaeError::InvalidArgument(
            "k and n_outer must be at least 1".into(),
        ));
    }
    model.check_finite()?;
    let mut rng = stream_rng(seed, 0);
    let eps = standard_normals(&mut rng, k * n_outer);
    Ok(eps
        .chunks_exact(k)
        .map(|g| model.objective(x, g))
        .sum::<f64>()
        / n_outer as f64)
}

/// Network mapping a datapoint to its bound parameter `C_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct CNet {
    net: Mlp,
}

impl CNet {
    pub fn init(seed: u64) -> Self {
        let mut rng = stream_rng(seed, 0);
        Self {
            net: Mlp::init(1, &mut rng),
        }
    }

    /// A network returning `c` for every input.
    pub fn constant(c: f64) -> Self {
        let mut net = Mlp::zeros(1);
        net.set_output_constant(0, c);
        Self { net }
    }

    pub fn from_params(params: Vec<f64>) -> Result<Self, VaeError> {
        Mlp::from_params(1, params)
            .map(|net| Self { net })
            .ok_or_else(|| {
                VaeError::InvalidArgument(format!("CNet needs {CNET_PARAMS} parameters"))
            })
    }

    pub fn c(&self, x: f64) -> f64 {
        self.net.forward(x).out[0]
    }

    pub fn params(&self) -> &[f64] {
        self.net.params()
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        self.net.params_mut()
    }

    pub(crate) fn net(&self) -> &Mlp {
        &self.net
    }
}
