//! Closed-form Green's functions.
//!
//! Two frequency-domain coherence propagators (the ω1 and ω3 windows), four
//! time-domain population propagators (the t2 window) and the position of the
//! control-induced trough doublet.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::model::{self, Level, Regime, SystemParams};

/// Frequency-domain coherence propagator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Propagator {
    /// 𝒢_ba,ba: the ω1 slot of the rephasing signal.
    BaBa,
    /// 𝒢_ab,ab: the ω3 slot of both signals and the ω1 slot of the non-rephasing one.
    AbAb,
}

impl Propagator {
    pub const ALL: [Propagator; 2] = [Propagator::BaBa, Propagator::AbAb];

    pub fn eval(self, omega: f64, params: &SystemParams) -> C64 {
        match self {
            Propagator::BaBa => g_ba_ba(omega, params),
            Propagator::AbAb => g_ab_ab(omega, params),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Propagator::BaBa => "ba,ba",
            Propagator::AbAb => "ab,ab",
        }
    }
}

/// A propagator value together with the frequency it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqGreen {
    pub omega: f64,
    pub value: C64,
}

/// Evaluates `propagator` at every frequency in `omegas`.
pub fn sample_propagator(
    propagator: Propagator,
    omegas: &[f64],
    params: &SystemParams,
) -> Vec<FreqGreen> {
    omegas
        .iter()
        .map(|&omega| FreqGreen {
            omega,
            value: propagator.eval(omega, params),
        })
        .collect()
}

/// Rational propagator `4(Δ + iσγ2) / (4(Δ + iσγ1)(Δ + iσγ2) − Ω²)`.
#[inline]
fn coherence_propagator(detuning: f64, sign: f64, params: &SystemParams) -> C64 {
    let d = params.derive_rates();
    let slow = C64::new(detuning, sign * d.gamma2);
    let fast = C64::new(detuning, sign * d.gamma1);
    let rabi_sq = params.rabi() * params.rabi();
    4.0 * slow / (4.0 * fast * slow - rabi_sq)
}

/// 𝒢_ba,ba(ω1), in cm.
pub fn g_ba_ba(omega1: f64, params: &SystemParams) -> C64 {
    coherence_propagator(omega1 - params.omega_ab(), -1.0, params)
}

/// 𝒢_ab,ab(ω3), in cm. Its imaginary part is the probe absorption profile.
pub fn g_ab_ab(omega3: f64, params: &SystemParams) -> C64 {
    coherence_propagator(omega3 - params.omega_ab(), 1.0, params)
}

/// Population propagator 𝒢_{end end, start start}(t2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PopKernel {
    /// 𝒢_aa,aa: start in a, end in a.
    AaAa,
    /// 𝒢_bb,aa: start in a, end in b.
    BbAa,
    /// 𝒢_aa,bb: start in b, end in a.
    AaBb,
    /// 𝒢_bb,bb: start in b, end in b.
    BbBb,
}

impl PopKernel {
    pub const ALL: [PopKernel; 4] = [
        PopKernel::AaAa,
        PopKernel::BbAa,
        PopKernel::AaBb,
        PopKernel::BbBb,
    ];

    pub fn new(start: Level, end: Level) -> Result<Self> {
        match (start, end) {
            (Level::A, Level::A) => Ok(PopKernel::AaAa),
            (Level::A, Level::B) => Ok(PopKernel::BbAa),
            (Level::B, Level::A) => Ok(PopKernel::AaBb),
            (Level::B, Level::B) => Ok(PopKernel::BbBb),
            _ => Err(Error::Configuration(
                "population propagators connect levels a and b only".into(),
            )),
        }
    }

    pub fn start(self) -> Level {
        match self {
            PopKernel::AaAa | PopKernel::BbAa => Level::A,
            PopKernel::AaBb | PopKernel::BbBb => Level::B,
        }
    }

    pub fn end(self) -> Level {
        match self {
            PopKernel::AaAa | PopKernel::AaBb => Level::A,
            PopKernel::BbAa | PopKernel::BbBb => Level::B,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            PopKernel::AaAa => "aa,aa",
            PopKernel::BbAa => "bb,aa",
            PopKernel::AaBb => "aa,bb",
            PopKernel::BbBb => "bb,bb",
        }
    }

    pub fn eval(self, t2: f64, params: &SystemParams) -> Result<f64> {
        g_pop(self.start(), self.end(), t2, params)
    }
}

/// A population propagator value at a given waiting time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PopGreen {
    pub t2: f64,
    pub value: f64,
}

/// Damped a↔c Rabi cycling: `(cos Ω̃τ, sin Ω̃τ / Ω̃)` with the hyperbolic
/// continuation below critical damping and the linear limit at it.
fn rabi_cycle(tau: f64, rates: &model::DerivedRates) -> (f64, f64) {
    let w = rates.omega_tilde;
    if w == 0.0 {
        return (1.0, tau);
    }
    match rates.regime {
        Regime::Oscillatory => ((w * tau).cos(), (w * tau).sin() / w),
        Regime::Overdamped => ((w * tau).cosh(), (w * tau).sinh() / w),
    }
}

/// Closed-form probability of finding the atom in `end` a time `t2` (ps)
/// after it was left in `start`.
///
/// With the control field on, the start-in-a expressions carry a damped
/// Rabi cycle at Ω̃ with envelope γ3/2 on top of the slower a↔b relaxation.
/// The sine term uses a real coefficient `sin(Ω̃t)/Ω̃`. Start-in-b expressions
/// do not depend on the control field.
pub fn g_pop(start: Level, end: Level, t2: f64, params: &SystemParams) -> Result<f64> {
    let kernel = PopKernel::new(start, end)?;
    if !(t2.is_finite() && t2 >= 0.0) {
        return Err(Error::Configuration(format!(
            "t2 must be finite and non-negative, got {t2}"
        )));
    }
    let (g1, g2) = (params.relax_down(), params.relax_up());
    let total = g1 + g2;
    if total <= 0.0 {
        return Err(Error::UndefinedSteadyState);
    }
    let tau = model::phase(1.0, t2);
    let relax = (-total * tau).exp();

    if kernel.start() == Level::B {
        return Ok(match kernel {
            PopKernel::AaBb => (g2 - relax * g2) / total,
            _ => (g1 + relax * g2) / total,
        });
    }

    let rabi = params.rabi();
    if rabi == 0.0 {
        return Ok(match kernel {
            PopKernel::AaAa => g2 / total + g1 / total * relax,
            _ => g1 / total * (1.0 - relax),
        });
    }

    let rates = params.derive_rates();
    let gamma3 = rates.gamma3;
    let rabi_sq = rabi * rabi;
    let a2 = total - gamma3;
    let a1 = total * a2 + rabi_sq;
    if a1 == 0.0 {
        return Err(Error::Singular("A1 = (Γ1+Γ2)(Γ1+Γ2−γ3) + Ω² vanishes"));
    }
    let (cos_term, sin_term) = rabi_cycle(tau, &rates);
    let envelope = (-0.5 * gamma3 * tau).exp();

    let value = match kernel {
        PopKernel::AaAa => {
            envelope
                * (0.5 * cos_term * (a2 * g2 + rabi_sq) / a1
                    + 0.25 * sin_term * (a2 * g2 * gamma3 + (gamma3 - 2.0 * g1) * rabi_sq) / a1)
                + g2 / (2.0 * total)
                + g1 * (2.0 * a1 - rabi_sq) * relax / (2.0 * total * a1)
        }
        _ => {
            envelope
                * (0.5 * cos_term * a2 * g1 / a1
                    + 0.25 * sin_term * (a2 * g1 * gamma3 + 2.0 * rabi_sq) / a1)
                + g1 / (2.0 * total)
                + g1 * (rabi_sq - 2.0 * a1) * relax / (2.0 * total * a1)
        }
    };
    Ok(value)
}

/// Samples `kernel` at each waiting time.
pub fn sample_population(
    kernel: PopKernel,
    t2_list: &[f64],
    params: &SystemParams,
) -> Result<Vec<PopGreen>> {
    t2_list
        .iter()
        .map(|&t2| {
            Ok(PopGreen {
                t2,
                value: kernel.eval(t2, params)?,
            })
        })
        .collect()
}

/// Long-time limit of each closed-form population propagator, in
/// [`PopKernel::ALL`] order.
pub fn pop_limits(params: &SystemParams) -> Result<[f64; 4]> {
    let (g1, g2) = (params.relax_down(), params.relax_up());
    let total = g1 + g2;
    if total <= 0.0 {
        return Err(Error::UndefinedSteadyState);
    }
    let share = if params.control_on() { 0.5 } else { 1.0 };
    Ok([
        share * g2 / total,
        share * g1 / total,
        g2 / total,
        g1 / total,
    ])
}

/// Analytic positions `(ω−, ω+)` of the two absorption troughs of Im 𝒢_ab,ab.
pub fn trough_positions(params: &SystemParams) -> Result<(f64, f64)> {
    let d = params.derive_rates();
    let rabi = params.rabi();
    if d.gamma1 == 0.0 {
        return Err(Error::Singular("γ1 = 0 in the trough-splitting formula"));
    }
    let x = 4.0 * d.gamma1 * d.gamma2 + rabi * rabi;
    let radicand = (rabi * (d.gamma1 + d.gamma2) * x.sqrt() - d.gamma2 * x) / d.gamma1;
    if radicand.is_nan() || radicand <= 0.0 || rabi == 0.0 {
        return Err(Error::NoSplitting { radicand });
    }
    let half = 0.5 * radicand.sqrt();
    Ok((params.omega_ab() - half, params.omega_ab() + half))
}

/// Vertex offset of the parabola through three equally spaced samples, in steps.
pub(crate) fn parabolic_offset(left: f64, mid: f64, right: f64) -> f64 {
    let curvature = left - 2.0 * mid + right;
    if curvature == 0.0 {
        0.0
    } else {
        (0.5 * (left - right) / curvature).clamp(-0.5, 0.5)
    }
}

/// Trough positions found by scanning Im 𝒢_ab,ab on a uniform grid over
/// `ω_ab ± half_width` and refining the two deepest interior minima with a
/// parabola. Independent of [`trough_positions`].
pub fn grid_trough_positions(
    params: &SystemParams,
    step: f64,
    half_width: f64,
) -> Result<(f64, f64)> {
    if !(step > 0.0 && half_width > step) {
        return Err(Error::Configuration(format!(
            "invalid trough grid: step {step}, half width {half_width}"
        )));
    }
    let n = (2.0 * half_width / step).round() as usize + 1;
    let lo = params.omega_ab() - half_width;
    let omega = |k: usize| lo + k as f64 * step;
    let im: Vec<f64> = (0..n).map(|k| g_ab_ab(omega(k), params).im).collect();

    let mut minima: Vec<(f64, f64)> = (1..n - 1)
        .filter(|&k| im[k] < im[k - 1] && im[k] <= im[k + 1])
        .map(|k| {
            let off = parabolic_offset(im[k - 1], im[k], im[k + 1]);
            (omega(k) + off * step, im[k])
        })
        .collect();
    minima.sort_by(|a, b| a.1.total_cmp(&b.1));
    match minima.as_slice() {
        [first, second, ..] => {
            let (a, b) = (first.0, second.0);
            Ok((a.min(b), a.max(b)))
        }
        _ => Err(Error::NoSplitting { radicand: f64::NAN }),
    }
}

/// [`grid_trough_positions`] with the default 0.01 cm⁻¹ grid over `ω_ab ± 3Ω`.
pub fn grid_trough_positions_default(params: &SystemParams) -> Result<(f64, f64)> {
    grid_trough_positions(params, 0.01, 3.0 * params.rabi())
}
