//! Binary checkpoints.
//!
//! A checkpoint is a 16-byte header followed by little-endian `f64` values:
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 8    | magic `GSVAE001` (ASCII)               |
//! | 8      | 4    | format version, `u32` LE (currently 1) |
//! | 12     | 4    | value count `n`, `u32` LE              |
//! | 16     | 8·n  | values, `f64` LE                       |
//!
//! A [`ToyVae`] stores its 31 parameters (encoder then decoder) followed by the
//! decoder variance, so `n = 32`. A [`CNet`] stores its 13 parameters.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use super::model::{CNet, ToyVae, CNET_PARAMS, VAE_PARAMS};
use super::VaeError;

pub const CHECKPOINT_MAGIC: [u8; 8] = *b"GSVAE001";
pub const CHECKPOINT_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a checkpoint (bad magic)")]
    BadMagic,
    #[error("unsupported checkpoint version {0}")]
    UnsupportedVersion(u32),
    #[error("checkpoint truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("checkpoint holds {found} values, expected {expected}")]
    WrongCount { expected: usize, found: usize },
    #[error("invalid checkpoint contents: {0}")]
    Invalid(#[from] VaeError),
}

fn encode(values: &[f64]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * values.len());
    out.extend_from_slice(&CHECKPOINT_MAGIC);
    out.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
    out.extend_from_slice(&(values.len() as u32).to_le_bytes());
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn decode(bytes: &[u8], expected: usize) -> Result<Vec<f64>, CheckpointError> {
    if bytes.len() < HEADER_LEN {
        if !CHECKPOINT_MAGIC.starts_with(bytes) {
            return Err(CheckpointError::BadMagic);
        }
        return Err(CheckpointError::Truncated {
            expected: HEADER_LEN,
            found: bytes.len(),
        });
    }
    if bytes[..8] != CHECKPOINT_MAGIC {
        return Err(CheckpointError::BadMagic);
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::UnsupportedVersion(version));
    }
    let count = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
    if count != expected {
        return Err(CheckpointError::WrongCount {
            expected,
            found: count,
        });
    }
    let total = HEADER_LEN + 8 * count;
    if bytes.len() != total {
        return Err(CheckpointError::Truncated {
            expected: total,
            found: bytes.len(),
        });
    }
    Ok(bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect())
}

pub fn encode_vae(model: &ToyVae) -> Vec<u8> {
    let mut values = model.params();
    values.push(model.decoder_var());
    encode(&values)
}

pub fn decode_vae(bytes: &[u8]) -> Result<ToyVae, CheckpointError> {
    let values = decode(bytes, VAE_PARAMS + 1)?;
    let model = ToyVae::from_params(&values[..VAE_PARAMS], values[VAE_PARAMS])?;
    model.check_finite()?;
    Ok(model)
}

pub fn encode_cnet(cnet: &CNet) -> Vec<u8> {
    encode(cnet.params())
}

pub fn decode_cnet(bytes: &[u8]) -> Result<CNet, CheckpointError> {
    let values = decode(bytes, CNET_PARAMS)?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(VaeError::NonFiniteParams.into());
    }
    Ok(CNet::from_params(values)?)
}

pub fn write_vae(path: impl AsRef<Path>, model: &ToyVae) -> Result<(), CheckpointError> {
    Ok(fs::write(path, encode_vae(model))?)
}

pub fn read_vae(path: impl AsRef<Path>) -> Result<ToyVae, CheckpointError> {
    decode_vae(&fs::read(path)?)
}

pub fn write_cnet(path: impl AsRef<Path>, cnet: &CNet) -> Result<(), CheckpointError> {
    Ok(fs::write(path, encode_cnet(cnet))?)
}

pub fn read_cnet(path: impl AsRef<Path>) -> Result<CNet, CheckpointError> {
    decode_cnet(&fs::read(path)?)
}
