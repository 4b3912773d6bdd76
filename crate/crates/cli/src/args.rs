use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

/// Sandwich bounds on log-evidence from paired Monte Carlo samples.
///
/// Every setting can also be given in a `--config` file as `key=value`
/// (flags win over the file, the file over built-in defaults).
/// Exit codes: 0 ok, 1 verify failure, 2 usage/parse error, 3 numeric or
/// I/O failure, 4 checkpoint error, 5 training divergence.
#[derive(Debug, Parser)]
#[command(name = "gapsandwich", version)]
pub struct Cli {
    /// Config file with `key=value` lines and `#` comments.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Also write a gnuplot script next to each CSV.
    #[arg(long, global = true)]
    pub emit_gnuplot: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// k-sweep of the bounds on an analytic distribution.
    Analytic(AnalyticArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
    /// Toy VAE pipeline.
    #[command(subcommand)]
    Vae(VaeCommand),
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    /// Distribution, e.g. `gamma:a=2,theta=1`.
    #[arg(long)]
    pub dist: Option<String>,
    /// Comma-separated increasing k values [default: 1].
    #[arg(long)]
    pub k: Option<String>,
    /// Pairs per estimate [default: 100000].
    #[arg(long)]
    pub n: Option<String>,
    /// [default: 1]
    #[arg(long)]
    pub replications: Option<String>,
    /// zero, pilot-optimal or fixed:<c> [default: pilot-optimal].
    #[arg(long)]
    pub c_policy: Option<String>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<String>,
    /// [default: analytic.csv]
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<String>,
    /// Use 10x fewer Monte Carlo samples.
    #[arg(long)]
    pub quick: bool,
    /// [default: verify.csv]
    #[arg(long)]
    pub out: Option<String>,
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum VaeCommand {
    /// Train the VAE and write a checkpoint plus the loss curve.
    Train(TrainArgs),
    /// Fit the C_x network for a trained VAE.
    TrainCnet(TrainCnetArgs),
    /// Per-datapoint lower/upper evidence bounds.
    Eval(EvalArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Data law [default: laplace:loc=0,b=0.2].
    #[arg(long)]
    pub data: Option<String>,
    /// [default: 10000]
    #[arg(long)]
    pub n_data: Option<String>,
    /// [default: 2021]
    #[arg(long)]
    pub data_seed: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// elbo or iwae:<k> [default: elbo].
    #[arg(long)]
    pub objective: Option<String>,
    /// [default: 2000]
    #[arg(long)]
    pub epochs: Option<String>,
    /// [default: 1000]
    #[arg(long)]
    pub batch: Option<String>,
    /// [default: 0.05]
    #[arg(long)]
    pub lr: Option<String>,
    /// Seed of the shuffles and latent noise [default: 0].
    #[arg(long)]
    pub seed: Option<String>,
    /// Seed of the weight initialisation [default: 7].
    #[arg(long)]
    pub init_seed: Option<String>,
    /// [default: 0.05]
    #[arg(long)]
    pub decoder_var: Option<String>,
    /// Checkpoint to write [default: vae.ckpt].
    #[arg(long)]
    pub checkpoint: Option<String>,
    /// Loss CSV [default: train_loss.csv].
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainCnetArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Trained VAE checkpoint [default: vae.ckpt].
    #[arg(long)]
    pub checkpoint: Option<String>,
    /// C network checkpoint to write [default: cnet.ckpt].
    #[arg(long)]
    pub cnet: Option<String>,
    /// [default: 64]
    #[arg(long)]
    pub k: Option<String>,
    /// [default: 1]
    #[arg(long)]
    pub n_pairs: Option<String>,
    /// [default: 100]
    #[arg(long)]
    pub epochs: Option<String>,
    /// [default: 1000]
    #[arg(long)]
    pub batch: Option<String>,
    /// [default: 0.05]
    #[arg(long)]
    pub lr: Option<String>,
    /// [default: 0]
    #[arg(long)]
    pub seed: Option<String>,
    /// Loss CSV [default: cnet_loss.csv].
    #[arg(long)]
    pub out: Option<String>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Trained VAE checkpoint [default: vae.ckpt].
    #[arg(long)]
    pub checkpoint: Option<String>,
    /// C network checkpoint, used by `--c cnet`.
    #[arg(long)]
    pub cnet: Option<String>,
    /// `cnet` or `fixed:<c>` [default: cnet when --cnet is given, else fixed:0].
    #[arg(long)]
    pub c: Option<String>,
    /// [default: 64]
    #[arg(long)]
    pub k: Option<String>,
    /// Also write bounds for each of these k to `<out>_ksweep.csv`.
    #[arg(long)]
    pub k_sweep: Option<String>,
    /// [default: 99]
    #[arg(long)]
    pub seed: Option<String>,
    /// [default: eval.csv]
    #[arg(long)]
    pub out: Option<String>,
}
