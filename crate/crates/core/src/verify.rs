//! The invariant suite behind `gapsandwich verify`.
//!
//! Every property reports a measured deviation and the tolerance it must stay
//! within; `slack = tolerance - measured` is non-negative exactly when the
//! property passes. Properties draw from their own seeded streams and the
//! output is independent of the thread count.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::bounds::{
    g_family, gap_upper_first_order, improved_upper, jensen_lower, k_sample_pairs, lemma_check,
    log_grid, midpoint_estimate, midpoint_evidence, optimal_c, optimal_c_estimate, optimal_h_check,
    optimal_upper, sandwich_with_policy, CPolicy, PairedSamples,
};
use crate::dists::{laplace_loglik, laplace_loglik_mc, AnalyticDist};
use crate::harness::{csv_writer, run_sweep, SweepConfig};
use crate::rng::{derive_seed, stream_rng};
use crate::stats::MeanVar;
use crate::vae::mlp::Mlp;
use crate::vae::{
    batch_objective_grad, cnet_objective, cnet_objective_grad, evaluate, log_normal_pdf, train,
    CNet, CSource, Objective, ToyVae, TrainConfig, VAE_PARAMS,
};

/// Deliberate defects for checking that the suite catches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Perturbs the C = 0 upper bound by one part in 10^9.
    CZeroIdentity,
}

impl FromStr for Fault {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "c0-identity" => Ok(Fault::CZeroIdentity),
            _ => Err(format!("unknown fault `{s}` (known: c0-identity)")),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Divides every Monte Carlo sample size by 10.
    pub quick: bool,
    pub fault: Option<Fault>,
}

impl VerifyConfig {
    fn n(&self, full: usize) -> usize {
        if self.quick {
            full / 10
        } else {
            full
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
}

impl PropertyOutcome {
    fn check(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
        }
    }

    fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::check(name, if ok { 0.0 } else { 1.0 }, 0.0)
    }

    pub fn slack(&self) -> f64 {
        self.tolerance - self.measured
    }
}

impl fmt::Display for PropertyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} measured={:.6e} tolerance={:.6e} slack={:.6e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance,
            self.slack()
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub outcomes: Vec<PropertyOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyOutcome> {
        self.outcomes.iter().filter(|o| !o.passed)
    }
}

pub const VERIFY_CSV_HEADER: [&str; 5] = ["property", "passed", "measured", "tolerance", "slack"];

pub fn write_verify_csv<W: Write>(w: W, report: &VerifyReport) -> io::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(VERIFY_CSV_HEADER)?;
    for o in &report.outcomes {
        out.write_record([
            o.name.clone(),
            o.passed.to_string(),
            o.measured.to_string(),
            o.tolerance.to_string(),
            o.slack().to_string(),
        ])?;
    }
    out.flush()
}

type Group = fn(&VerifyConfig, u64) -> Vec<PropertyOutcome>;

const GROUPS: &[Group] = &[
    gamma_gap,
    lognormal_midpoint,
    c_zero_identity,
    monotonicity,
    c_stationarity,
    scale_equivariance,
    lemma,
    sandwich_order,
    oracle_consistency,
    k_averaged_law,
    laplace_loglik_props,
    sweep_reproducible,
    vae_gradients,
    cnet_gradients,
    reparameterisation,
    vae_evaluation,
];

/// Runs every property. Groups run in parallel; the report order is fixed.
pub fn run_verify(cfg: &VerifyConfig) -> VerifyReport {
    let outcomes = GROUPS
        .par_iter()
        .enumerate()
        .map(|(i, group)| group(cfg, derive_seed(cfg.seed, i as u64)))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    VerifyReport { outcomes }
}

/// `n` pairs of k-sample means from one seeded stream, split per the pairing scheme.
pub fn draw_pairs(d: &AnalyticDist, n: usize, k: usize, seed: u64) -> PairedSamples {
    let raw = d.sample(2 * n * k, seed).expect("valid distribution");
    let (x, y) = raw.split_at(n * k);
    k_sample_pairs(x, y, k, false).expect("positive draws")
}

fn gamma_gap(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    [(2.0, 1.0, 1), (2.0, 1.0, 4), (2.0, 1.0, 8), (0.5, 1.0, 4)]
        .iter()
        .enumerate()
        .map(|(i, &(a, theta, k))| {
            let s = draw_pairs(
                &AnalyticDist::gamma(a, theta).unwrap(),
                cfg.n(100_000),
                k,
                derive_seed(seed, i as u64),
            );
            let gap = gap_upper_first_order(&s);
            let exact = 1.0 / (k as f64 * a - 1.0);
            PropertyOutcome::check(
                format!("gamma_gap[a={a},theta={theta},k={k}]"),
                (gap.mean - exact).abs(),
                3.0 * gap.stderr,
            )
        })
        .collect()
}

fn lognormal_midpoint(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let mut out = Vec::new();
    for (i, &(m, sigma)) in [(0.0, 1.0), (-1.0, 0.5), (2.0, 2.0)].iter().enumerate() {
        let s = draw_pairs(
            &AnalyticDist::lognormal(m, sigma).unwrap(),
            cfg.n(100_000),
            1,
            derive_seed(seed, i as u64),
        );
        let mid = midpoint_estimate(&s);
        let c = optimal_c_estimate(&s);
        out.push(PropertyOutcome::check(
            format!("lognormal_midpoint[m={m},sigma={sigma}]"),
            (mid.mean - (m + sigma * sigma / 2.0)).abs(),
            3.0 * mid.stderr,
        ));
        out.push(PropertyOutcome::check(
            format!("lognormal_optimal_c[m={m},sigma={sigma}]"),
            (c.mean - sigma * sigma).abs(),
            3.0 * c.stderr,
        ));
    }
    out
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn c_zero_identity(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let mut out = Vec::new();
    for (i, d) in [
        AnalyticDist::gamma(2.0, 1.0).unwrap(),
        AnalyticDist::lognormal(0.0, 1.0).unwrap(),
    ]
    .iter()
    .enumerate()
    {
        let s = draw_pairs(d, 10_000, 1, derive_seed(seed, i as u64));
        let mut upper = improved_upper(&s, 0.0).expect("finite C").mean;
        if cfg.fault == Some(Fault::CZeroIdentity) {
            upper *= 1.0 + 1e-9;
        }
        let sum = jensen_lower(&s).mean + gap_upper_first_order(&s).mean;
        out.push(PropertyOutcome::check(
            format!("c0_identity[{d}]"),
            relative(upper, sum),
            1e-12,
        ));
    }
    out
}

fn monotonicity(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let d = AnalyticDist::uniform(0.5, 1.5).unwrap();
    let ks = [1usize, 2, 4, 8, 16];
    let stats: Vec<_> = ks
        .iter()
        .map(|&k| {
            let s = draw_pairs(&d, cfg.n(100_000), k, derive_seed(seed, k as u64));
            (jensen_lower(&s), gap_upper_first_order(&s))
        })
        .collect();
    let mut out = Vec::new();
    for (w, ks) in stats.windows(2).zip(ks.windows(2)) {
        let (l0, g0) = w[0];
        let (l1, g1) = w[1];
        out.push(PropertyOutcome::check(
            format!("lower_nondecreasing[uniform,k={}->{}]", ks[0], ks[1]),
            (l0.mean - l1.mean).max(0.0),
            3.0 * l0.stderr.hypot(l1.stderr),
        ));
        out.push(PropertyOutcome::check(
            format!("width_nonincreasing[uniform,k={}->{}]", ks[0], ks[1]),
            (g1.mean - g0.mean).max(0.0),
            3.0 * g0.stderr.hypot(g1.stderr),
        ));
    }
    out
}

fn c_stationarity(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    [
        AnalyticDist::gamma(2.0, 1.0).unwrap(),
        AnalyticDist::lognormal(0.0, 1.0).unwrap(),
    ]
    .iter()
    .enumerate()
    .map(|(i, d)| {
        let s = draw_pairs(d, cfg.n(10_000), 1, derive_seed(seed, i as u64));
        let c = optimal_c(&s);
        let at = |c: f64| improved_upper(&s, c).expect("finite C").mean;
        let best = at(c);
        let excess = (best - at(c - 0.1)).max(best - at(c + 0.1)).max(0.0);
        PropertyOutcome::check(
            format!("optimal_c_stationary[{d}]"),
            excess,
            1e-12 * best.abs().max(1.0),
        )
    })
    .collect()
}

fn scale_equivariance(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let lambda: f64 = 3.7;
    let s = draw_pairs(
        &AnalyticDist::gamma(2.0, 1.0).unwrap(),
        cfg.n(10_000),
        1,
        seed,
    );
    let scaled = PairedSamples::linear(
        s.xs().iter().map(|x| x * lambda).collect(),
        s.ys().iter().map(|y| y * lambda).collect(),
    )
    .expect("positive");
    let shift = lambda.ln();
    let upper = |p: &PairedSamples| improved_upper(p, 0.5).expect("finite C").mean;
    let deviations = [
        (jensen_lower(&scaled).mean - jensen_lower(&s).mean - shift).abs(),
        (upper(&scaled) - upper(&s) - shift).abs(),
        (optimal_upper(&scaled) - optimal_upper(&s) - shift).abs(),
        (midpoint_evidence(&scaled) - midpoint_evidence(&s) - shift).abs(),
        (optimal_c(&scaled) - optimal_c(&s)).abs(),
        (gap_upper_first_order(&scaled).mean - gap_upper_first_order(&s).mean).abs(),
    ];
    vec![PropertyOutcome::check(
        "scale_equivariance[gamma,lambda=3.7]",
        deviations.iter().copied().fold(0.0, f64::max),
        1e-9,
    )]
}

fn lemma(_: &VerifyConfig, _: u64) -> Vec<PropertyOutcome> {
    let grid = log_grid(1e-3, 1e3, 20_001);
    let xs = log_grid(1e-2, 1e2, 9);
    let mut out = Vec::new();
    for c in [-1.0, 0.0, 1.0] {
        let g: Vec<f64> = xs.iter().map(|&x| g_family(c, x)).collect();
        out.push(PropertyOutcome::flag(
            format!("lemma_minimal[C={c}]"),
            optimal_h_check(&g, &grid) == Ok(true),
        ));
        out.push(PropertyOutcome::flag(
            format!("lemma_rejects_shrunk_h[C={c}]"),
            lemma_check(&g, &grid, 0.999) == Ok(false),
        ));
    }
    out
}

fn sandwich_order(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let dists = [
        AnalyticDist::constant(2.0).unwrap(),
        AnalyticDist::gamma(2.0, 1.0).unwrap(),
        AnalyticDist::gamma(0.5, 1.0).unwrap(),
        AnalyticDist::lognormal(0.0, 1.0).unwrap(),
        AnalyticDist::uniform(0.5, 1.5).unwrap(),
    ];
    let mut out = Vec::new();
    for (i, d) in dists.iter().enumerate() {
        let mut worst = f64::NEG_INFINITY;
        for (j, k) in [1usize, 4].into_iter().enumerate() {
            let s = draw_pairs(d, cfg.n(20_000), k, derive_seed(seed, (2 * i + j) as u64));
            for policy in [CPolicy::Zero, CPolicy::Fixed(1.0), CPolicy::PilotOptimal] {
                let r = sandwich_with_policy(&s, policy).expect("valid samples");
                let slack = 3.0 * (r.lower_stderr + r.upper_stderr);
                worst = worst.max(r.lower_mean - r.upper_mean - slack);
            }
        }
        out.push(PropertyOutcome::check(
            format!("sandwich_order[{d}]"),
            worst.max(0.0),
            0.0,
        ));
    }
    out
}

fn z_score(acc: &MeanVar, exact: f64) -> f64 {
    if acc.stderr() == 0.0 {
        if acc.mean() == exact {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (acc.mean() - exact).abs() / acc.stderr()
    }
}

fn oracle_consistency(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    // The ratio check needs a finite variance of Y/X, i.e. shape > 2 for Gamma.
    let dists = [
        (AnalyticDist::constant(3.0).unwrap(), true),
        (AnalyticDist::gamma(2.0, 1.0).unwrap(), false),
        (AnalyticDist::gamma(3.0, 0.5).unwrap(), true),
        (AnalyticDist::gamma(0.5, 2.0).unwrap(), false),
        (AnalyticDist::lognormal(0.0, 1.0).unwrap(), true),
        (AnalyticDist::lognormal(-1.0, 0.5).unwrap(), true),
        (AnalyticDist::uniform(0.5, 1.5).unwrap(), true),
    ];
    let n = cfg.n(1_000_000);
    dists
        .par_iter()
        .enumerate()
        .map(|(i, (d, with_ratio))| {
            let raw = d.sample(2 * n, derive_seed(seed, i as u64)).expect("valid");
            let (x, y) = raw.split_at(n);
            let mean: MeanVar = x.iter().copied().collect();
            let mean_log: MeanVar = x.iter().map(|v| v.ln()).collect();
            let mut worst = z_score(&mean, d.mean())
                .max(z_score(&mean_log, d.mean_log().expect("closed form")));
            if *with_ratio {
                let ratio: MeanVar = x.iter().zip(y).map(|(a, b)| b / a).collect();
                worst = worst.max(z_score(
                    &ratio,
                    d.log_ratio_mean().expect("closed form").exp(),
                ));
            }
            PropertyOutcome::check(format!("oracle_consistency[{d}]"), worst, 4.0)
        })
        .collect()
}

fn k_averaged_law(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let n = cfg.n(100_000);
    let base = AnalyticDist::gamma(2.0, 1.0).unwrap();
    let law = base.k_averaged_law(4).expect("gamma has a closed form");
    let averaged: Vec<f64> = base
        .sample(4 * n, derive_seed(seed, 0))
        .unwrap()
        .chunks_exact(4)
        .map(|c| c.iter().sum::<f64>() / 4.0)
        .collect();
    let direct = law.sample(n, derive_seed(seed, 1)).unwrap();
    let moment = |v: &[f64], p: i32| -> MeanVar { v.iter().map(|x| x.powi(p)).collect() };
    let worst = [1, 2]
        .iter()
        .map(|&p| {
            let (a, b) = (moment(&averaged, p), moment(&direct, p));
            (a.mean() - b.mean()).abs() / a.stderr().hypot(b.stderr())
        })
        .fold(0.0, f64::max);
    let same_law = law == AnalyticDist::gamma(8.0, 0.25).unwrap();
    vec![
        PropertyOutcome::flag("k_averaged_law[gamma(2,1),k=4]=gamma(8,0.25)", same_law),
        PropertyOutcome::check("k_averaged_law_moments[gamma(2,1),k=4]", worst, 4.0),
    ]
}

fn laplace_loglik_props(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let exact = laplace_loglik(0.0, 0.2).unwrap();
    let (mc, se) = laplace_loglik_mc(0.0, 0.2, cfg.n(100_000), seed).unwrap();
    vec![
        PropertyOutcome::check(
            "laplace_loglik_closed_form[b=0.5]",
            (laplace_loglik(0.0, 0.5).unwrap() + 1.0).abs(),
            1e-15,
        ),
        PropertyOutcome::check("laplace_loglik_mc[b=0.2]", (mc - exact).abs(), 4.0 * se),
    ]
}

fn sweep_reproducible(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let sweep = SweepConfig {
        k_values: vec![1, 2, 4, 8],
        n_pairs: cfg.n(20_000),
        replications: 4,
        base_seed: seed,
        c_policy: CPolicy::PilotOptimal,
    };
    let src = AnalyticDist::uniform(0.5, 1.5).unwrap();
    let a = run_sweep(&src, &sweep).expect("valid sweep");
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool");
    let b = pool.install(|| run_sweep(&src, &sweep).expect("valid sweep"));
    let shrink = a
        .aggregates
        .windows(2)
        .map(|w| (w[1].width_mean - w[0].width_mean) - 3.0 * w[0].width_sd.hypot(w[1].width_sd))
        .fold(0.0, f64::max);
    vec![
        PropertyOutcome::flag("sweep_thread_independent[uniform]", a == b),
        PropertyOutcome::check("sweep_interval_shrinks[uniform]", shrink, 0.0),
    ]
}

/// Relative error with a floor on the scale, so near-zero gradients compare absolutely.
fn grad_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Largest gradient error of the VAE objective over 10 coordinates × 5 inputs.
pub fn vae_gradient_error(objective: Objective, seed: u64) -> f64 {
    const H: f64 = 1e-5;
    let model = ToyVae::init(seed, 0.3).expect("valid variance");
    let mut rng = stream_rng(seed, 1);
    let k = objective.samples();
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let x: f64 = rng.random_range(-1.0..1.0);
        let eps: Vec<f64> = (0..k)
            .map(|_| rng.sample(rand_distr::StandardNormal))
            .collect();
        let (_, grad) = batch_objective_grad(&model, &[x], &eps, k);
        let coords = rand::seq::index::sample(&mut rng, VAE_PARAMS, 10);
        for i in coords {
            let eval = |delta: f64| {
                let mut p = model.params();
                p[i] += delta;
                let mut m = model.clone();
                m.set_params(&p);
                m.objective(x, &eps)
            };
            let numeric = (eval(H) - eval(-H)) / (2.0 * H);
            worst = worst.max(grad_error(grad[i], numeric));
        }
    }
    worst
}

/// Largest gradient error of the C-network objective over 10 coordinates × 5 inputs.
pub fn cnet_gradient_error(seed: u64) -> f64 {
    const H: f64 = 1e-5;
    let cnet = CNet::init(seed);
    let mut rng = stream_rng(seed, 1);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let x: f64 = rng.random_range(-1.0..1.0);
        let log_r: f64 = rng.random_range(-1.0..2.0);
        let (_, grad) = cnet_objective_grad(&cnet, &[x], &[log_r]);
        let coords = rand::seq::index::sample(&mut rng, cnet.params().len(), 10);
        for i in coords {
            let eval = |delta: f64| {
                let mut p = cnet.params().to_vec();
                p[i] += delta;
                cnet_objective(&CNet::from_params(p).expect("same size"), &[x], &[log_r])
            };
            let numeric = (eval(H) - eval(-H)) / (2.0 * H);
            worst = worst.max(grad_error(grad[i], numeric));
        }
    }
    worst
}

fn vae_gradients(_: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    vec![
        PropertyOutcome::check(
            "gradient_check[vae,elbo]",
            vae_gradient_error(Objective::Elbo, seed),
            1e-4,
        ),
        PropertyOutcome::check(
            "gradient_check[vae,iwae:5]",
            vae_gradient_error(Objective::Iwae(5), seed ^ 1),
            1e-4,
        ),
    ]
}

fn cnet_gradients(_: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    vec![PropertyOutcome::check(
        "gradient_check[cnet]",
        cnet_gradient_error(seed),
        1e-4,
    )]
}

fn reparameterisation(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let model = ToyVae::init(seed, 0.3).expect("valid variance");
    let n = cfg.n(100_000);
    let mut worst: f64 = 0.0;
    for (i, x) in [-0.5, 0.0, 0.7].into_iter().enumerate() {
        let (mu, log_sigma) = model.encode(x);
        let sigma = log_sigma.exp();
        let mut rng = stream_rng(seed, 2 + i as u64);
        let z: MeanVar = (0..n)
            .map(|_| mu + sigma * rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect();
        let var_se = sigma * sigma * (2.0 / n as f64).sqrt();
        worst = worst
            .max(z_score(&z, mu))
            .max((z.variance() - sigma * sigma).abs() / var_se);
    }
    vec![PropertyOutcome::check(
        "reparameterisation_moments",
        worst,
        4.0,
    )]
}

fn vae_evaluation(cfg: &VerifyConfig, seed: u64) -> Vec<PropertyOutcome> {
    let laplace = AnalyticDist::laplace(0.0, 0.2).unwrap();
    let data = laplace.sample(cfg.n(5_000), derive_seed(seed, 0)).unwrap();
    let mut out = Vec::new();

    let perfect = ToyVae::perfect_constant(0.0, 0.3).expect("valid variance");
    let e = evaluate(
        &perfect,
        CSource::Fixed(0.0),
        &data,
        1,
        derive_seed(seed, 1),
    )
    .expect("valid model");
    let dev = e
        .records
        .iter()
        .map(|r| (r.upper - r.lower).abs() + (r.lower - log_normal_pdf(r.x, 0.0, 0.3)).abs())
        .fold(0.0, f64::max);
    out.push(PropertyOutcome::check("perfect_constant_tight", dev, 1e-12));

    let model = ToyVae::init(seed, 0.05).expect("valid variance");
    let e = evaluate(&model, CSource::Fixed(0.0), &data, 16, derive_seed(seed, 2))
        .expect("valid model");
    let chain = e
        .records
        .iter()
        .map(|r| r.elbo - r.lower)
        .fold(0.0, f64::max);
    out.push(PropertyOutcome::check(
        "elbo_le_lower_shared_draws[k=16]",
        chain,
        1e-12,
    ));
    let order = e.lower - e.upper - 3.0 * (e.lower_stderr + e.upper_stderr);
    out.push(PropertyOutcome::check(
        "model_sandwich[k=16]",
        order.max(0.0),
        0.0,
    ));

    let frozen = train(
        &model,
        &data,
        &TrainConfig {
            lr: 0.0,
            epochs: 2,
            batch: 256,
            seed,
            ..Default::default()
        },
    )
    .expect("finite model");
    out.push(PropertyOutcome::flag(
        "train_zero_lr_identity",
        frozen.model == model,
    ));
    let mlp_ok = Mlp::param_count_for(2) + Mlp::param_count_for(1) == VAE_PARAMS;
    out.push(PropertyOutcome::flag(
        "parameter_count[31]",
        mlp_ok && VAE_PARAMS == 31,
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fault_names() {
        assert_eq!("c0-identity".parse::<Fault>(), Ok(Fault::CZeroIdentity));
        assert!("nope".parse::<Fault>().is_err());
    }

    #[test]
    fn fault_injection_breaks_only_the_identity() {
        let cfg = VerifyConfig {
            seed: 3,
            quick: true,
            fault: Some(Fault::CZeroIdentity),
        };
        let failed: Vec<String> = c_zero_identity(&cfg, 1)
            .into_iter()
            .filter(|o| !o.passed)
            .map(|o| o.name)
            .collect();
        assert_eq!(failed.len(), 2);
        assert!(failed.iter().all(|n| n.starts_with("c0_identity")));
        let clean = VerifyConfig { fault: None, ..cfg };
        assert!(c_zero_identity(&clean, 1).iter().all(|o| o.passed));
    }

    #[test]
    fn lemma_group_passes() {
        assert!(lemma(&VerifyConfig::default(), 0).iter().all(|o| o.passed));
    }

    #[test]
    fn outcome_formatting() {
        let o = PropertyOutcome::check("p", 0.5, 1.0);
        assert!(o.passed);
        assert_eq!(o.slack(), 0.5);
        assert!(o.to_string().starts_with("PASS p "));
        let mut buf = Vec::new();
        write_verify_csv(&mut buf, &VerifyReport { outcomes: vec![o] }).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "property,passed,measured,tolerance,slack\np,true,0.5,1,0.5\n"
        );
    }
}
