//! Subcommand bodies. Each writes its data files under the output directory
//! and returns the lines it wants printed.

use std::fs;
use std::path::{Path, PathBuf};

use eit2des_core::greens::sample_propagator;
use eit2des_core::lindblad::oracle_green_population_with_dt;
use eit2des_core::{
    compute_spectrum, grid_trough_positions, trough_positions, Error, Level, PopKernel, Propagator,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::format::{fmt_sig, Table};
use crate::validate::{run_suite, SuiteSettings};

pub const SUMMARY_FILE: &str = "run_summary.txt";

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(format!("creating {}", dir.display()), e))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
}

fn control_tag(on: bool) -> &'static str {
    if on {
        "on"
    } else {
        "off"
    }
}

/// Writes the resolved configuration and the list of produced files next to
/// the data.
pub fn write_summary(
    cfg: &RunConfig,
    command: &str,
    files: &[PathBuf],
    extra: &[String],
) -> Result<PathBuf, CliError> {
    let mut text = format!("command = {command}\n");
    for line in cfg.summary_lines() {
        text.push_str(&line);
        text.push('\n');
    }
    for line in extra {
        text.push_str(line);
        text.push('\n');
    }
    for f in files {
        let name = f
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        text.push_str(&format!("file = {name}\n"));
    }
    let path = cfg.output_path.join(SUMMARY_FILE);
    write_file(&path, &text)?;
    Ok(path)
}

pub fn spectrum_file_name(cfg: &RunConfig, t2: f64) -> String {
    format!(
        "spectrum_{}_control-{}_t2-{}.csv",
        cfg.signal_kind.tag(),
        control_tag(cfg.control_on),
        fmt_sig(t2)
    )
}

/// One CSV per waiting time, rows ordered by ω3 then ω1.
pub fn spectrum(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(&cfg.output_path)?;
    let mut files = Vec::new();
    for &t2 in &cfg.t2_list {
        let grid = cfg.grid.with_t2(t2);
        let s = compute_spectrum(&grid, cfg.signal_kind, &cfg.params, cfg.control_on)?;
        let mut table = Table::new(&["omega1", "omega3", "value"]);
        let (w1, w3) = (grid.omega1.values(), grid.omega3.values());
        for (i3, &omega3) in w3.iter().enumerate() {
            for (i1, &omega1) in w1.iter().enumerate() {
                table.push(vec![omega1, omega3, s.at(i3, i1)]);
            }
        }
        let path = cfg.output_path.join(spectrum_file_name(cfg, t2));
        write_file(&path, &table.to_csv())?;
        files.push(path);
    }
    write_summary(cfg, "spectrum", &files, &[])?;
    Ok(files)
}

/// Closed-form population kernels next to the propagation oracle.
pub fn population(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    ensure_dir(&cfg.output_path)?;
    let params = cfg.effective_params();
    let n = (cfg.population_t_max / cfg.population_step).round() as usize;
    let times: Vec<f64> = (0..=n).map(|k| k as f64 * cfg.population_step).collect();
    let oracle_aa = oracle_green_population_with_dt(Level::A, Level::A, &params, &times, cfg.dt)?;
    let oracle_bb = oracle_green_population_with_dt(Level::B, Level::B, &params, &times, cfg.dt)?;

    let mut table = Table::new(&[
        "t2",
        "g_aa_aa",
        "g_bb_aa",
        "g_aa_bb",
        "g_bb_bb",
        "oracle_aa",
        "oracle_bb",
    ]);
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        for kernel in PopKernel::ALL {
            row.push(kernel.eval(t, &params)?);
        }
        row.push(oracle_aa[k]);
        row.push(oracle_bb[k]);
        table.push(row);
    }
    let path = cfg.output_path.join(format!(
        "population_control-{}.csv",
        control_tag(cfg.control_on)
    ));
    write_file(&path, &table.to_csv())?;
    write_summary(cfg, "population", std::slice::from_ref(&path), &[])?;
    Ok(path)
}

/// Both coherence propagators, with and without the control field. 𝒢_ba,ba is
/// sampled on the ω1 axis and 𝒢_ab,ab on the ω3 axis.
pub fn greens(cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    ensure_dir(&cfg.output_path)?;
    let mut files = Vec::new();
    for control in [true, false] {
        let params = if control {
            cfg.params
        } else {
            cfg.params.without_control()
        };
        for propagator in Propagator::ALL {
            let axis = match propagator {
                Propagator::BaBa => cfg.grid.omega1,
                Propagator::AbAb => cfg.grid.omega3,
            };
            let mut table = Table::new(&["omega", "re", "im"]);
            for g in sample_propagator(propagator, &axis.values(), &params) {
                table.push(vec![g.omega, g.value.re, g.value.im]);
            }
            let name = format!(
                "greens_{}_control-{}.csv",
                propagator.label().replace(',', "_"),
                control_tag(control)
            );
            let path = cfg.output_path.join(name);
            write_file(&path, &table.to_csv())?;
            files.push(path);
        }
    }
    write_summary(cfg, "greens", &files, &[])?;
    Ok(files)
}

/// Analytic and grid-located trough positions of Im 𝒢_ab,ab.
pub fn troughs(cfg: &RunConfig) -> Result<Vec<String>, CliError> {
    let params = cfg.effective_params();
    let (lo, hi) = match trough_positions(&params) {
        Ok(v) => v,
        Err(Error::NoSplitting { radicand }) => {
            return Ok(vec![format!(
                "no splitting (radicand {}): single absorption line at {}",
                fmt_sig(radicand),
                fmt_sig(params.omega_ab())
            )]);
        }
        Err(e) => return Err(e.into()),
    };
    let (glo, ghi) = grid_trough_positions(&params, 0.01, 3.0 * params.rabi())?;
    Ok(vec![
        format!(
            "{:<8} {:>14} {:>14} {:>12}",
            "trough", "analytic", "grid", "difference"
        ),
        format!(
            "{:<8} {:>14} {:>14} {:>12}",
            "lower",
            fmt_sig(lo),
            fmt_sig(glo),
            fmt_sig(glo - lo)
        ),
        format!(
            "{:<8} {:>14} {:>14} {:>12}",
            "upper",
            fmt_sig(hi),
            fmt_sig(ghi),
            fmt_sig(ghi - hi)
        ),
        format!("splitting {}", fmt_sig(hi - lo)),
    ])
}

/// Runs the oracle suite. Returns the report and an error when any check
/// fails.
pub fn validate(cfg: &RunConfig) -> Result<(Vec<String>, Option<CliError>), CliError> {
    let settings = SuiteSettings {
        dt: cfg.dt,
        population_t_max: cfg.population_t_max,
        population_step: cfg.population_step,
        ..SuiteSettings::default()
    };
    let checks = run_suite(&cfg.effective_params(), &settings)?;
    let failed = checks.iter().filter(|c| !c.passed()).count();
    let mut lines: Vec<String> = checks.iter().map(|c| c.line()).collect();
    lines.push(format!("{} checks, {} failed", checks.len(), failed));
    let failure = (failed > 0).then_some(CliError::ChecksFailed {
        failed,
        total: checks.len(),
    });
    Ok((lines, failure))
}
