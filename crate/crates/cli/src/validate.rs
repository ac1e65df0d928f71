//! Closed forms checked against direct integration of the equations of motion.

use eit2des_core::lindblad::{oracle_green_population_with_dt, CoherenceTrace};
use eit2des_core::{
    g_ab_ab, g_ba_ba, g_pop, grid_trough_positions, oracle_green_coherence, propagate,
    steady_state_populations, to_angular_rate, trough_positions, CoherencePair, DensityMatrix,
    Error, Level, PopKernel, PropagationSettings, SystemParams,
};

use crate::error::CliError;
use crate::format::fmt_sig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Measured {
        value: f64,
        bound: Bound,
        limit: f64,
    },
    Skipped(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub outcome: Outcome,
}

impl Check {
    fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            outcome: Outcome::Measured {
                value,
                bound: Bound::AtMost,
                limit,
            },
        }
    }

    fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check {
            name: name.into(),
            outcome: Outcome::Measured {
                value,
                bound: Bound::AtLeast,
                limit,
            },
        }
    }

    fn skipped(name: impl Into<String>, why: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            outcome: Outcome::Skipped(why.into()),
        }
    }

    /// Skipped checks count as passed. NaN never passes.
    pub fn passed(&self) -> bool {
        match self.outcome {
            Outcome::Measured {
                value,
                bound: Bound::AtMost,
                limit,
            } => value <= limit,
            Outcome::Measured {
                value,
                bound: Bound::AtLeast,
                limit,
            } => value >= limit,
            Outcome::Skipped(_) => true,
        }
    }

    pub fn line(&self) -> String {
        match &self.outcome {
            Outcome::Measured {
                value,
                bound,
                limit,
            } => {
                let op = match bound {
                    Bound::AtMost => "<=",
                    Bound::AtLeast => ">=",
                };
                let status = if self.passed() { "ok  " } else { "FAIL" };
                format!(
                    "{status} {:<40} {} {op} {}",
                    self.name,
                    fmt_sig(*value),
                    fmt_sig(*limit)
                )
            }
            Outcome::Skipped(why) => format!("skip {:<40} {why}", self.name),
        }
    }
}

/// Options for [`run_suite`].
#[derive(Debug, Clone, Copy)]
pub struct SuiteSettings {
    pub dt: f64,
    pub population_t_max: f64,
    pub population_step: f64,
    /// Length of the conservation and steady-state runs, ps.
    pub long_run: f64,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        SuiteSettings {
            dt: eit2des_core::lindblad::DEFAULT_DT_PS,
            population_t_max: 10.0,
            population_step: 0.01,
            long_run: 300.0,
        }
    }
}

/// Every interior local extremum of Re 𝒢_ab,ab and Im 𝒢_ab,ab on a 0.01 cm⁻¹
/// grid over `ω_ab ± half_width`: the absorption troughs, the transparency
/// maximum between them and the dispersive lobes.
pub fn spectral_landmarks(params: &SystemParams, half_width: f64) -> Vec<f64> {
    let step = 0.01;
    let n = (2.0 * half_width / step).round() as usize + 1;
    let lo = params.omega_ab() - half_width;
    let omega = |k: usize| lo + k as f64 * step;
    let g: Vec<_> = (0..n).map(|k| g_ab_ab(omega(k), params)).collect();
    let mut out = Vec::new();
    for k in 1..n - 1 {
        let (l, m, r) = (g[k - 1], g[k], g[k + 1]);
        let im_extremum = (m.im < l.im && m.im <= r.im) || (m.im > l.im && m.im >= r.im);
        let re_extremum = (m.re < l.re && m.re <= r.re) || (m.re > l.re && m.re >= r.re);
        if im_extremum || re_extremum {
            out.push(omega(k));
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// Time after which the slower eigenmode of the coherence pair has decayed
/// by `1e-9`, ps.
pub fn coherence_decay_time(params: &SystemParams) -> f64 {
    let d = params.derive_rates();
    let mean = 0.5 * (d.gamma1 + d.gamma2);
    let half_diff = 0.5 * (d.gamma1 - d.gamma2);
    let disc = half_diff * half_diff - 0.25 * params.rabi() * params.rabi();
    let slow = if disc > 0.0 { mean - disc.sqrt() } else { mean };
    (1e9f64).ln() / to_angular_rate(slow.max(1e-6))
}

/// Largest relative error of the FFT of the coherence oracle against the
/// closed form, over the FFT bins nearest to each landmark.
pub fn coherence_spectrum_error(
    trace: &CoherenceTrace,
    params: &SystemParams,
    landmarks: &[f64],
) -> f64 {
    let spectrum = trace.spectrum(params.omega_ab(), 8);
    let closed = |w: f64| match trace.pair {
        CoherencePair::Ab => g_ab_ab(w, params),
        CoherencePair::Ba => g_ba_ba(w, params),
    };
    landmarks
        .iter()
        .map(|&target| {
            let k = spectrum.partition_point(|(w, _)| *w < target);
            let candidates = [k.saturating_sub(1), k.min(spectrum.len() - 1)];
            let &(w, numeric) = candidates
                .iter()
                .map(|&i| &spectrum[i])
                .min_by(|a, b| (a.0 - target).abs().total_cmp(&(b.0 - target).abs()))
                .expect("non-empty spectrum");
            let exact = closed(w);
            (numeric - exact).norm() / exact.norm()
        })
        .fold(0.0, f64::max)
}

/// Largest deviation between a closed-form population kernel and the oracle
/// over `0..=t_max` in steps of `step`.
pub fn population_deviation(
    kernel: PopKernel,
    params: &SystemParams,
    settings: &SuiteSettings,
) -> Result<f64, Error> {
    let n = (settings.population_t_max / settings.population_step).round() as usize;
    let times: Vec<f64> = (0..=n)
        .map(|k| k as f64 * settings.population_step)
        .collect();
    let oracle =
        oracle_green_population_with_dt(kernel.start(), kernel.end(), params, &times, settings.dt)?;
    let mut worst = 0.0f64;
    for (&t, &numeric) in times.iter().zip(&oracle) {
        worst = worst.max((kernel.eval(t, params)? - numeric).abs());
    }
    Ok(worst)
}

/// Runs every check. Numerical failures abort; failed checks do not.
pub fn run_suite(params: &SystemParams, settings: &SuiteSettings) -> Result<Vec<Check>, CliError> {
    let mut checks = Vec::new();
    let d = params.derive_rates();
    let center = params.omega_ab();

    let on_center = g_ab_ab(center, params).im;
    let expected = -4.0 * d.gamma2 / (4.0 * d.gamma1 * d.gamma2 + params.rabi().powi(2));
    checks.push(Check::at_most(
        "line-centre Im G_ab,ab relative error",
        ((on_center - expected) / expected).abs(),
        1e-6,
    ));
    let bare = params.without_control();
    let off_center = g_ab_ab(center, &bare).im;
    checks.push(Check::at_most(
        "uncoupled line-centre relative error",
        ((off_center + 1.0 / d.gamma1) / (1.0 / d.gamma1)).abs(),
        1e-6,
    ));

    match trough_positions(params) {
        Ok((lo, hi)) => {
            let (glo, ghi) = grid_trough_positions(params, 0.01, 3.0 * params.rabi())?;
            checks.push(Check::at_most(
                "trough position analytic vs grid",
                (lo - glo).abs().max((hi - ghi).abs()),
                0.02,
            ));
        }
        Err(Error::NoSplitting { .. }) => {
            checks.push(Check::skipped(
                "trough position analytic vs grid",
                "no splitting",
            ));
        }
        Err(e) => return Err(e.into()),
    }

    let window = 150.0f64.max(3.0 * params.rabi());
    let landmarks = spectral_landmarks(params, window);
    let coherence = PropagationSettings::new(settings.dt, coherence_decay_time(params).max(20.0))?;
    for pair in [CoherencePair::Ab, CoherencePair::Ba] {
        let trace = oracle_green_coherence(pair, params, &coherence)?;
        let name = match pair {
            CoherencePair::Ab => "G_ab,ab oracle spectrum relative error",
            CoherencePair::Ba => "G_ba,ba oracle spectrum relative error",
        };
        checks.push(Check::at_most(
            name,
            coherence_spectrum_error(&trace, params, &landmarks),
            0.02,
        ));
    }

    for kernel in PopKernel::ALL {
        checks.push(Check::at_most(
            format!("G_{} oracle max deviation", kernel.label()),
            population_deviation(kernel, params, settings)?,
            0.02,
        ));
    }

    let long = PropagationSettings::new(settings.dt, settings.long_run)?;
    let (aa, ba, ab, bb) = steady_state_populations(params)?;
    for (start, limits) in [(Level::A, (aa, ba)), (Level::B, (ab, bb))] {
        let traj = propagate(&DensityMatrix::pure(start), params, &long)?;
        let label = start.label();
        checks.push(Check::at_most(
            format!("trace error from {label}"),
            traj.max_trace_error(),
            1e-9,
        ));
        checks.push(Check::at_most(
            format!("hermiticity defect from {label}"),
            traj.max_hermiticity_defect(),
            1e-9,
        ));
        let min_eig = traj
            .states
            .iter()
            .step_by(100)
            .map(|s| s.min_eigenvalue())
            .fold(f64::INFINITY, f64::min);
        checks.push(Check::at_least(
            format!("min eigenvalue from {label}"),
            min_eig,
            -1e-8,
        ));
        let last = traj.last();
        checks.push(Check::at_most(
            format!("steady state a from {label}"),
            (last.population(Level::A) - limits.0).abs(),
            1e-4,
        ));
        checks.push(Check::at_most(
            format!("steady state b from {label}"),
            (last.population(Level::B) - limits.1).abs(),
            1e-4,
        ));
    }

    let mut worst_sum = 0.0f64;
    for k in 0..=1000 {
        let t = k as f64 * 0.01;
        let from_a = g_pop(Level::A, Level::A, t, &bare)? + g_pop(Level::A, Level::B, t, &bare)?;
        let from_b = g_pop(Level::B, Level::A, t, &bare)? + g_pop(Level::B, Level::B, t, &bare)?;
        worst_sum = worst_sum
            .max((from_a - 1.0).abs())
            .max((from_b - 1.0).abs());
    }
    checks.push(Check::at_most(
        "uncoupled population sum rule",
        worst_sum,
        1e-12,
    ));

    Ok(checks)
}
