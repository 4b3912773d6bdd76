//! Companion gnuplot scripts for `--emit-gnuplot`. Nothing is rendered here.

use std::path::{Path, PathBuf};

use crate::error::CliError;

#[derive(Debug, Clone, Copy)]
pub enum Plot {
    /// analytic sweep: lower/upper against k.
    Sweep,
    Verify,
    Loss,
    /// per-datapoint s and S against x.
    Eval,
    KSweep,
}

pub fn script_path(csv: &Path) -> PathBuf {
    csv.with_extension("gp")
}

fn body(plot: Plot, csv: &str, png: &str) -> String {
    let head = format!(
        "set datafile separator ','\nset terminal pngcairo size 900,600\nset output '{png}'\n"
    );
    let tail = match plot {
        Plot::Sweep => format!(
            "set logscale x 2\nset xlabel 'k'\nset ylabel 'log-evidence bound'\n\
             plot '{csv}' using 'k':'lower_mean' with points title 'lower', '' using 'k':'upper_mean' with points title 'upper'\n"
        ),
        Plot::Verify => format!(
            "set style data histograms\nset style fill solid\nset xtics rotate by -60\nset ylabel 'slack'\n\
             plot '{csv}' using 'slack':xtic(1) title 'slack'\n"
        ),
        Plot::Loss => format!("set xlabel 'epoch'\nset ylabel 'objective'\nplot '{csv}' using 'epoch':'loss' with lines title 'loss'\n"),
        Plot::Eval => format!(
            "set xlabel 'x'\nset ylabel 'bound'\n\
             plot '{csv}' using 'x':'s' with dots title 's', '' using 'x':'S' with dots title 'S'\n"
        ),
        Plot::KSweep => format!(
            "set logscale x 2\nset xlabel 'k'\nset ylabel 'dataset evidence bound'\n\
             plot '{csv}' using 'k':'lower':'lower_stderr' with yerrorlines title 'lower', \
             '' using 'k':'upper':'upper_stderr' with yerrorlines title 'upper', '' using 'k':'elbo' with linespoints title 'elbo'\n"
        ),
    };
    head + &tail
}

pub fn write_script(plot: Plot, csv: &Path) -> Result<PathBuf, CliError> {
    let path = script_path(csv);
    let name = |p: &Path| {
        p.file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    };
    let png = name(&csv.with_extension("png"));
    std::fs::write(&path, body(plot, &name(csv), &png)).map_err(|e| CliError::io(&path, e))?;
    Ok(path)
}
