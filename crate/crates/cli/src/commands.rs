use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use gapsandwich::harness::{write_sweep_csv, SweepConfig};
use gapsandwich::vae::{
    evaluate, read_cnet, read_vae, train, train_cnet, write_cnet, write_eval_csv, write_vae, CNet,
    CNetConfig, CSource, EvalSummary, Objective, ToyVae, TrainConfig, DEFAULT_DECODER_VAR,
};
use gapsandwich::verify::{run_verify, write_verify_csv, Fault, VerifyConfig};
use gapsandwich::{run_sweep, AnalyticDist, CPolicy};

use crate::args::{AnalyticArgs, DataArgs, EvalArgs, TrainArgs, TrainCnetArgs, VerifyArgs};
use crate::config::{ConfigFile, IntList, Resolver};
use crate::error::CliError;
use crate::gnuplot::{self, Plot};
use crate::manifest::{digest, manifest_path, RunManifest};

/// Shared state of one invocation.
pub struct Context {
    pub config: ConfigFile,
    pub emit_gnuplot: bool,
    pub command_line: Vec<String>,
    started: Instant,
    started_unix: u64,
}

impl Context {
    pub fn new(config: ConfigFile, emit_gnuplot: bool, command_line: Vec<String>) -> Self {
        let started_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        Self {
            config,
            emit_gnuplot,
            command_line,
            started: Instant::now(),
            started_unix,
        }
    }

    fn resolver(&self) -> Resolver<'_> {
        Resolver::new(&self.config)
    }
}

fn warn_unused(r: &Resolver<'_>) {
    for key in r.unused() {
        eprintln!("warning: config key `{key}` is not used by this command");
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(path, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

/// What a command produced, for the manifests.
struct Run<'a> {
    command: &'a str,
    config: BTreeMap<String, String>,
    base_seed: u64,
    tables: Vec<(PathBuf, Plot)>,
    artifacts: Vec<PathBuf>,
}

fn finish(ctx: &Context, run: Run<'_>) -> Result<(), CliError> {
    let mut outputs = Vec::new();
    for (csv, plot) in &run.tables {
        outputs.push(digest(csv)?);
        if ctx.emit_gnuplot {
            let gp = gnuplot::write_script(*plot, csv)?;
            eprintln!("wrote {}", gp.display());
            outputs.push(digest(&gp)?);
        }
    }
    for a in &run.artifacts {
        outputs.push(digest(a)?);
    }
    let wall = ctx.started.elapsed().as_secs_f64();
    for (csv, _) in &run.tables {
        let manifest = RunManifest {
            command_line: ctx.command_line.clone(),
            command: run.command.to_string(),
            config: run.config.clone(),
            base_seed: run.base_seed,
            library_version: gapsandwich::VERSION.to_string(),
            threads: rayon::current_num_threads(),
            started_unix_seconds: ctx.started_unix,
            wall_time_seconds: wall,
            outputs: outputs.clone(),
        };
        let path = manifest_path(csv);
        manifest.write(&path)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn parse_dist(spec: &str) -> Result<AnalyticDist, CliError> {
    Ok(spec.parse::<AnalyticDist>()?)
}

pub fn analytic(ctx: &Context, a: AnalyticArgs) -> Result<String, CliError> {
    let mut r = ctx.resolver();
    let spec: String = r.required("dist", a.dist)?;
    let k_values: IntList = r.get("k", a.k, IntList(vec![1]))?;
    let n_pairs: usize = r.get("n", a.n, 100_000)?;
    let replications: usize = r.get("replications", a.replications, 1)?;
    let c_policy: CPolicy = r.get("c-policy", a.c_policy, CPolicy::PilotOptimal)?;
    let seed: u64 = r.get("seed", a.seed, 0)?;
    let out: PathBuf = r.get("out", a.out, "analytic.csv".to_string())?.into();
    warn_unused(&r);

    let dist = parse_dist(&spec)?;
    if !dist.is_positive() {
        return Err(CliError::Usage(format!(
            "--dist {spec}: bounds need a positive distribution"
        )));
    }
    let cfg = SweepConfig {
        k_values: k_values.0,
        n_pairs,
        replications,
        base_seed: seed,
        c_policy,
    };
    eprintln!(
        "sweeping {spec} over k = {:?} with {n_pairs} pairs x {replications} replications",
        cfg.k_values
    );
    let result = run_sweep(&dist, &cfg)?;
    write_file(
        &out,
        &csv_bytes(|w| write_sweep_csv(w, &spec, "analytic", n_pairs, &result.rows)),
    )?;
    eprintln!("wrote {}", out.display());

    let last = result.aggregates.last().expect("at least one k");
    finish(
        ctx,
        Run {
            command: "analytic",
            config: r.into_snapshot(),
            base_seed: seed,
            tables: vec![(out.clone(), Plot::Sweep)],
            artifacts: vec![],
        },
    )?;
    Ok(format!(
        "analytic {spec}: k={} lower={:.6} upper={:.6} width={:.6} -> {}",
        last.k,
        last.lower_mean,
        last.upper_mean,
        last.width_mean,
        out.display()
    ))
}

pub fn verify(ctx: &Context, a: VerifyArgs) -> Result<String, CliError> {
    let mut r = ctx.resolver();
    let seed: u64 = r.get("seed", a.seed, 0)?;
    let quick = r.switch("quick", a.quick)?;
    let fault: Option<String> = r.opt("inject-fault", a.inject_fault)?;
    let out: PathBuf = r.get("out", a.out, "verify.csv".to_string())?.into();
    warn_unused(&r);
    let fault = fault
        .map(|f| {
            f.parse::<Fault>().map_err(|e| {
                CliError::Usage(format!("invalid value `{f}` for --inject-fault: {e}"))
            })
        })
        .transpose()?;

    let report = run_verify(&VerifyConfig { seed, quick, fault });
    for outcome in &report.outcomes {
        eprintln!("{outcome}");
    }
    write_file(&out, &csv_bytes(|w| write_verify_csv(w, &report)))?;
    eprintln!("wrote {}", out.display());
    finish(
        ctx,
        Run {
            command: "verify",
            config: r.into_snapshot(),
            base_seed: seed,
            tables: vec![(out, Plot::Verify)],
            artifacts: vec![],
        },
    )?;

    let total = report.outcomes.len();
    let failed: Vec<&str> = report.failures().map(|o| o.name.as_str()).collect();
    if failed.is_empty() {
        Ok(format!("verify: {total}/{total} properties passed"))
    } else {
        Err(CliError::VerifyFailed(format!(
            "verify: {} of {total} properties failed: {}",
            failed.len(),
            failed.join(", ")
        )))
    }
}

fn load_data(r: &mut Resolver<'_>, d: DataArgs) -> Result<Vec<f64>, CliError> {
    let spec: String = r.get("data", d.data, "laplace:loc=0,b=0.2".to_string())?;
    let n: usize = r.get("n-data", d.n_data, 10_000)?;
    let seed: u64 = r.get("data-seed", d.data_seed, 2021)?;
    if n == 0 {
        return Err(CliError::Usage("--n-data must be at least 1".into()));
    }
    Ok(parse_dist(&spec)?.sample(n, seed)?)
}

fn loss_csv(history: &[f64]) -> Vec<u8> {
    csv_bytes(|w| {
        let mut out = gapsandwich::harness::csv_writer(w);
        out.write_record(["epoch", "loss"])?;
        for (i, l) in history.iter().enumerate() {
            out.write_record([(i + 1).to_string(), l.to_string()])?;
        }
        out.flush()
    })
}

pub fn vae_train(ctx: &Context, a: TrainArgs) -> Result<String, CliError> {
    let mut r = ctx.resolver();
    let data = load_data(&mut r, a.data)?;
    let cfg = TrainConfig {
        objective: r.get("objective", a.objective, Objective::Elbo)?,
        epochs: r.get("epochs", a.epochs, TrainConfig::DEFAULT_EPOCHS)?,
        batch: r.get("batch", a.batch, TrainConfig::DEFAULT_BATCH)?,
        lr: r.get("lr", a.lr, TrainConfig::DEFAULT_LR)?,
        seed: r.get("seed", a.seed, 0)?,
    };
    let init_seed: u64 = r.get("init-seed", a.init_seed, 7)?;
    let decoder_var: f64 = r.get("decoder-var", a.decoder_var, DEFAULT_DECODER_VAR)?;
    let checkpoint: PathBuf = r
        .get("checkpoint", a.checkpoint, "vae.ckpt".to_string())?
        .into();
    let out: PathBuf = r.get("out", a.out, "train_loss.csv".to_string())?.into();
    warn_unused(&r);

    let init = ToyVae::init(init_seed, decoder_var)?;
    eprintln!(
        "training on {} points: {} for {} epochs",
        data.len(),
        cfg.objective,
        cfg.epochs
    );
    let trained = train(&init, &data, &cfg)?;
    write_vae(&checkpoint, &trained.model)?;
    eprintln!("wrote {}", checkpoint.display());
    write_file(&out, &loss_csv(&trained.loss_history))?;
    eprintln!("wrote {}", out.display());
    finish(
        ctx,
        Run {
            command: "vae train",
            config: r.into_snapshot(),
            base_seed: cfg.seed,
            tables: vec![(out, Plot::Loss)],
            artifacts: vec![checkpoint.clone()],
        },
    )?;
    let last = trained.loss_history.last().copied().unwrap_or(f64::NAN);
    Ok(format!(
        "vae train: final loss {last:.6} (negative {}) -> {}",
        cfg.objective,
        checkpoint.display()
    ))
}

pub fn vae_train_cnet(ctx: &Context, a: TrainCnetArgs) -> Result<String, CliError> {
    let mut r = ctx.resolver();
    let data = load_data(&mut r, a.data)?;
    let checkpoint: PathBuf = r
        .get("checkpoint", a.checkpoint, "vae.ckpt".to_string())?
        .into();
    let cnet_path: PathBuf = r.get("cnet", a.cnet, "cnet.ckpt".to_string())?.into();
    let d = CNetConfig::default();
    let cfg = CNetConfig {
        k: r.get("k", a.k, d.k)?,
        n_pairs: r.get("n-pairs", a.n_pairs, d.n_pairs)?,
        epochs: r.get("epochs", a.epochs, d.epochs)?,
        batch: r.get("batch", a.batch, d.batch)?,
        lr: r.get("lr", a.lr, d.lr)?,
        seed: r.get("seed", a.seed, d.seed)?,
    };
    let out: PathBuf = r.get("out", a.out, "cnet_loss.csv".to_string())?.into();
    warn_unused(&r);

    let model = read_vae(&checkpoint)?;
    eprintln!(
        "fitting C network at k = {} on {} points for {} epochs",
        cfg.k,
        data.len(),
        cfg.epochs
    );
    let trained = train_cnet(&CNet::constant(0.0), &model, &data, &cfg)?;
    write_cnet(&cnet_path, &trained.cnet)?;
    eprintln!("wrote {}", cnet_path.display());
    write_file(&out, &loss_csv(&trained.loss_history))?;
    eprintln!("wrote {}", out.display());
    finish(
        ctx,
        Run {
            command: "vae train-cnet",
            config: r.into_snapshot(),
            base_seed: cfg.seed,
            tables: vec![(out, Plot::Loss)],
            artifacts: vec![cnet_path.clone()],
        },
    )?;
    let last = trained.loss_history.last().copied().unwrap_or(f64::NAN);
    Ok(format!(
        "vae train-cnet: final objective {last:.6} -> {}",
        cnet_path.display()
    ))
}

/// `--c` setting of `vae eval`.
#[derive(Debug, Clone, Copy, PartialEq)]
enum CMode {
    Net,
    Fixed(f64),
}

impl std::str::FromStr for CMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "cnet" {
            return Ok(CMode::Net);
        }
        let c = s
            .strip_prefix("fixed:")
            .ok_or_else(|| format!("expected `cnet` or `fixed:<c>`, got `{s}`"))?
            .parse::<f64>()
            .map_err(|e| format!("bad constant in `{s}`: {e}"))?;
        if c.is_finite() {
            Ok(CMode::Fixed(c))
        } else {
            Err(format!("constant in `{s}` is not finite"))
        }
    }
}

impl std::fmt::Display for CMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CMode::Net => f.write_str("cnet"),
            CMode::Fixed(c) => write!(f, "fixed:{c}"),
        }
    }
}

/// `runs/eval.csv` -> `runs/eval_ksweep.csv`.
pub fn ksweep_path(out: &Path) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "eval".into());
    out.with_file_name(format!("{stem}_ksweep.csv"))
}

fn ksweep_csv(rows: &[EvalSummary], c_mode: &str) -> Vec<u8> {
    csv_bytes(|w| {
        let mut out = gapsandwich::harness::csv_writer(w);
        out.write_record([
            "k",
            "elbo",
            "elbo_stderr",
            "lower",
            "lower_stderr",
            "upper",
            "upper_stderr",
            "width",
            "width_stderr",
            "saturated",
            "c_mode",
        ])?;
        for s in rows {
            out.write_record([
                s.k.to_string(),
                s.elbo.to_string(),
                s.elbo_stderr.to_string(),
                s.lower.to_string(),
                s.lower_stderr.to_string(),
                s.upper.to_string(),
                s.upper_stderr.to_string(),
                s.width().to_string(),
                s.width_stderr.to_string(),
                s.saturated.to_string(),
                c_mode.to_string(),
            ])?;
        }
        out.flush()
    })
}

pub fn vae_eval(ctx: &Context, a: EvalArgs) -> Result<String, CliError> {
    let mut r = ctx.resolver();
    let data = load_data(&mut r, a.data)?;
    let checkpoint: PathBuf = r
        .get("checkpoint", a.checkpoint, "vae.ckpt".to_string())?
        .into();
    let cnet_path: Option<String> = r.opt("cnet", a.cnet)?;
    let default_mode = if cnet_path.is_some() {
        CMode::Net
    } else {
        CMode::Fixed(0.0)
    };
    let mode: CMode = r.get("c", a.c, default_mode)?;
    let k: usize = r.get("k", a.k, 64)?;
    let sweep: Option<IntList> = r.opt("k-sweep", a.k_sweep)?;
    let seed: u64 = r.get("seed", a.seed, 99)?;
    let out: PathBuf = r.get("out", a.out, "eval.csv".to_string())?.into();
    warn_unused(&r);

    let model = read_vae(&checkpoint)?;
    let cnet = match (mode, &cnet_path) {
        (CMode::Net, Some(p)) => Some(read_cnet(p)?),
        (CMode::Net, None) => {
            return Err(CliError::Usage("--c cnet needs --cnet <checkpoint>".into()))
        }
        (CMode::Fixed(_), _) => None,
    };
    let source = match (mode, &cnet) {
        (CMode::Fixed(c), _) => CSource::Fixed(c),
        (CMode::Net, Some(net)) => CSource::Net(net),
        (CMode::Net, None) => unreachable!("checked above"),
    };

    eprintln!(
        "evaluating {} points at k = {k} with C = {mode}",
        data.len()
    );
    let summary = evaluate(&model, source, &data, k, seed)?;
    write_file(&out, &csv_bytes(|w| write_eval_csv(w, &summary)))?;
    eprintln!("wrote {}", out.display());
    let mut tables = vec![(out.clone(), Plot::Eval)];

    if let Some(IntList(ks)) = sweep {
        let rows = ks
            .iter()
            .map(|&k| {
                eprintln!("k-sweep: k = {k}");
                evaluate(&model, source, &data, k, seed)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let path = ksweep_path(&out);
        write_file(&path, &ksweep_csv(&rows, &mode.to_string()))?;
        eprintln!("wrote {}", path.display());
        tables.push((path, Plot::KSweep));
    }
    finish(
        ctx,
        Run {
            command: "vae eval",
            config: r.into_snapshot(),
            base_seed: seed,
            tables,
            artifacts: vec![],
        },
    )?;
    Ok(format!(
        "vae eval: k={k} C={mode} evidence in [{:.6}, {:.6}] (stderr {:.1e}/{:.1e}) -> {}",
        summary.lower,
        summary.upper,
        summary.lower_stderr,
        summary.upper_stderr,
        out.display()
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_mode_round_trips() {
        for s in ["cnet", "fixed:0", "fixed:-1.5"] {
            assert_eq!(s.parse::<CMode>().unwrap().to_string(), s);
        }
        assert!("fixed:inf".parse::<CMode>().is_err());
        assert!("zero".parse::<CMode>().is_err());
    }

    #[test]
    fn ksweep_sits_next_to_the_eval_table() {
        assert_eq!(
            ksweep_path(Path::new("runs/eval.csv")),
            PathBuf::from("runs/eval_ksweep.csv")
        );
        assert_eq!(
            ksweep_path(Path::new("out")),
            PathBuf::from("out_ksweep.csv")
        );
    }
}
