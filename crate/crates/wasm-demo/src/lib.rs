//! Browser bindings for the sandwich bounds demo page in `www/`.
//!
//! Every exported function returns a flat `Float64Array` of fixed-width rows;
//! the row layout is given on each function. The plain-Rust `*_rows`
//! functions behind them are what the native tests exercise.

use gapsandwich::bounds::{improved_upper, jensen_lower, k_sample_pairs, optimal_c};
use gapsandwich::harness::{cell_seed, PositiveSource, SweepConfig};
use gapsandwich::vae::{
    evaluate, train, CSource, Objective, ToyVae, TrainConfig, DEFAULT_DECODER_VAR,
};
use gapsandwich::{run_sweep, AnalyticDist, CPolicy};
use wasm_bindgen::prelude::*;

fn positive_dist(spec: &str) -> Result<AnalyticDist, String> {
    let d: AnalyticDist = spec.parse().map_err(|e| format!("{e}"))?;
    if d.is_positive() {
        Ok(d)
    } else {
        Err(format!("{spec} can take non-positive values"))
    }
}

/// Rows of `[k, lower, upper, midpoint, exact]` for each k, where `exact` is
/// the closed-form `log E X` (NaN when unknown).
pub fn bound_curve_rows(spec: &str, ks: &[u32], n: u32, seed: u64) -> Result<Vec<f64>, String> {
    let dist = positive_dist(spec)?;
    let cfg = SweepConfig {
        k_values: ks.iter().map(|&k| k as usize).collect(),
        n_pairs: n as usize,
        replications: 1,
        base_seed: seed,
        c_policy: CPolicy::PilotOptimal,
    };
    let result = run_sweep(&dist, &cfg).map_err(|e| e.to_string())?;
    let exact = dist.log_mean().unwrap_or(f64::NAN);
    Ok(result
        .rows
        .iter()
        .flat_map(|r| {
            [
                r.k as f64,
                r.report.lower_mean,
                r.report.upper_mean,
                r.report.midpoint,
                exact,
            ]
        })
        .collect())
}

/// `[lower, c_star, exact, then (c, upper) for each of `steps` C values in
/// [c_lo, c_hi]]`, all on one shared set of pairs.
pub fn upper_vs_c_rows(
    spec: &str,
    k: u32,
    n: u32,
    seed: u64,
    c_lo: f64,
    c_hi: f64,
    steps: u32,
) -> Result<Vec<f64>, String> {
    let dist = positive_dist(spec)?;
    if !(c_lo.is_finite() && c_hi.is_finite() && c_lo < c_hi) || steps < 2 {
        return Err("need finite c_lo < c_hi and at least 2 steps".into());
    }
    let half = (n as usize) * (k as usize);
    let raw = dist
        .draw(2 * half, cell_seed(seed, 0, k as usize))
        .map_err(|e| e.to_string())?;
    let (xs, ys) = raw.split_at(half);
    let pairs = k_sample_pairs(xs, ys, k as usize, false).map_err(|e| e.to_string())?;
    let mut out = vec![
        jensen_lower(&pairs).mean,
        optimal_c(&pairs),
        dist.log_mean().unwrap_or(f64::NAN),
    ];
    for i in 0..steps {
        let c = c_lo + (c_hi - c_lo) * i as f64 / (steps - 1) as f64;
        let upper = improved_upper(&pairs, c).map_err(|e| e.to_string())?.mean;
        out.extend([c, upper]);
    }
    Ok(out)
}

/// Trains the toy VAE on Laplace(0, b) data, then gives rows of
/// `[k, elbo, lower, upper]` for k in {1, 4, 16, 64} at C = 0.
pub fn vae_ksweep_rows(b: f64, n_data: u32, epochs: u32, seed: u64) -> Result<Vec<f64>, String> {
    let data = AnalyticDist::laplace(0.0, b)
        .and_then(|d| d.sample(n_data as usize, seed))
        .map_err(|e| e.to_string())?;
    let init = ToyVae::init(seed ^ 7, DEFAULT_DECODER_VAR).map_err(|e| e.to_string())?;
    let cfg = TrainConfig {
        objective: Objective::Elbo,
        epochs: epochs as usize,
        batch: (n_data as usize).min(TrainConfig::DEFAULT_BATCH),
        lr: TrainConfig::DEFAULT_LR,
        seed,
    };
    let model = train(&init, &data, &cfg).map_err(|e| e.to_string())?.model;
    let mut out = Vec::new();
    for k in [1, 4, 16, 64] {
        let s = evaluate(&model, CSource::Fixed(0.0), &data, k, seed ^ 99)
            .map_err(|e| e.to_string())?;
        out.extend([k as f64, s.elbo, s.lower, s.upper]);
    }
    Ok(out)
}

#[wasm_bindgen]
pub fn bound_curve(spec: &str, ks: &[u32], n: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    bound_curve_rows(spec, ks, n, seed as u64).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn upper_vs_c(
    spec: &str,
    k: u32,
    n: u32,
    seed: u32,
    c_lo: f64,
    c_hi: f64,
    steps: u32,
) -> Result<Vec<f64>, JsError> {
    upper_vs_c_rows(spec, k, n, seed as u64, c_lo, c_hi, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn vae_ksweep(b: f64, n_data: u32, epochs: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    vae_ksweep_rows(b, n_data, epochs, seed as u64).map_err(|e| JsError::new(&e))
}
