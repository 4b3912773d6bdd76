//! One-dimensional Gaussian VAE/IWAE and evidence bounds on its data.
//!
//! The pipeline is: [`train`] the model on an ELBO or IWAE objective, fit a
//! [`CNet`] that predicts the per-datapoint bound parameter `C_x`
//! ([`train_cnet`]), then [`evaluate`] the lower bound `s_i` and the upper
//! bound `S_i` for every datapoint.

mod case_study;
mod checkpoint;
mod cnet;
mod eval;
pub mod mlp;
mod model;
mod train;

use thiserror::Error;

pub use case_study::{run_case_study, CaseStudyConfig, CaseStudyResult, KPoint};
pub use checkpoint::{
    decode_cnet, decode_vae, encode_cnet, encode_vae, read_cnet, read_vae, write_cnet, write_vae,
    CheckpointError, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use cnet::{
    cnet_objective, cnet_objective_grad, log_ratio_estimate, train_cnet, CNetConfig, TrainedCNet,
};
pub use eval::{
    dataset_elbo, evaluate, write_eval_csv, CSource, EvalRecord, EvalSummary, PosteriorRatioSource,
};
pub use model::{
    elbo, iw_elbo, log_normal_pdf, CNet, ToyVae, CNET_PARAMS, DECODER_PARAMS, DEFAULT_DECODER_VAR,
    ENCODER_PARAMS, IMAGE_DECODER_VAR, VAE_PARAMS,
};
pub use train::{batch_objective_grad, train, Objective, TrainConfig, Trained};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VaeError {
    #[error("model parameters are not finite")]
    NonFiniteParams,
    #[error("training diverged at epoch {epoch} (loss {loss})")]
    DivergenceDetected { epoch: usize, loss: f64 },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("empty dataset")]
    EmptyData,
}
