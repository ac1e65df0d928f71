//! Direct propagation of the interaction-picture density-matrix equations.
//!
//! This is the numerical reference for every closed form in [`crate::greens`].
//! Equations are integrated with a fixed-step classical Runge–Kutta scheme;
//! rates are converted from cm⁻¹ to rad/ps once, inside the stepper.

use nalgebra::Matrix3;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::model::{self, Level, SystemParams};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Default step for reference-scale rates (γ1 ≈ 41 cm⁻¹ gives dt·rate ≈ 0.008).
pub const DEFAULT_DT_PS: f64 = 0.001;

/// Upper bound on `dt × (largest rate in rad/ps)`.
pub const MAX_STEP_RATE_PRODUCT: f64 = 0.1;

const HERMITIAN_INPUT_TOL: f64 = 1e-12;
const TRACE_INPUT_TOL: f64 = 1e-9;

type Elements = [[C64; 3]; 3];

/// 3×3 density matrix indexed by [`Level`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    rho: Elements,
}

impl DensityMatrix {
    /// Pure state |level⟩⟨level|.
    pub fn pure(level: Level) -> Self {
        let mut rho = [[ZERO; 3]; 3];
        rho[level.index()][level.index()] = C64::new(1.0, 0.0);
        DensityMatrix { rho }
    }

    /// Validates Hermiticity and unit trace.
    pub fn from_elements(rho: [[C64; 3]; 3]) -> Result<Self> {
        let m = DensityMatrix { rho };
        if m.hermiticity_defect() > HERMITIAN_INPUT_TOL {
            return Err(Error::Configuration(format!(
                "density matrix is not Hermitian (defect {:.3e})",
                m.hermiticity_defect()
            )));
        }
        if (m.trace() - 1.0).abs() > TRACE_INPUT_TOL {
            return Err(Error::Configuration(format!(
                "density matrix trace is {} rather than 1",
                m.trace()
            )));
        }
        Ok(m)
    }

    #[inline]
    pub fn get(&self, row: Level, col: Level) -> C64 {
        self.rho[row.index()][col.index()]
    }

    pub fn population(&self, level: Level) -> f64 {
        self.get(level, level).re
    }

    pub fn elements(&self) -> &[[C64; 3]; 3] {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        (0..3).map(|k| self.rho[k][k].re).sum()
    }

    /// max |ρ_jk − conj(ρ_kj)|, diagonal imaginary parts included.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for j in 0..3 {
            for k in j..3 {
                worst = worst.max((self.rho[j][k] - self.rho[k][j].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let m = Matrix3::from_fn(|j, k| 0.5 * (self.rho[j][k] + self.rho[k][j].conj()));
        m.symmetric_eigenvalues().min()
    }

    fn is_finite(&self) -> bool {
        self.rho
            .iter()
            .flatten()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Time derivative dρ/dt in cm⁻¹ units (multiply by 2πc for rad/ps).
///
/// Each line is one equation of motion in the rotating frame of the control
/// field, with the control at exact resonance.
pub fn rhs(rho: &DensityMatrix, params: &SystemParams) -> [[C64; 3]; 3] {
    rhs_elements(&rho.rho, params, &params.derive_rates())
}

fn rhs_elements(r: &Elements, params: &SystemParams, d: &model::DerivedRates) -> Elements {
    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;
    let half_rabi = 0.5 * params.rabi() * I;
    let (relax_down, relax_up) = (params.relax_down(), params.relax_up());
    let mut out = [[ZERO; 3]; 3];

    out[B][B] = relax_down * r[A][A] - relax_up * r[B][B];
    out[B][A] = -half_rabi * r[B][C] - d.gamma1 * r[B][A];
    out[B][C] = -half_rabi * r[B][A] - d.gamma2 * r[B][C];
    out[A][B] = half_rabi * r[C][B] - d.gamma1 * r[A][B];
    out[A][A] = half_rabi * (r[C][A] - r[A][C]) - relax_down * r[A][A] + relax_up * r[B][B];
    out[A][C] = half_rabi * (r[C][C] - r[A][A]) - d.gamma3 * r[A][C];
    out[C][B] = half_rabi * r[A][B] - d.gamma2 * r[C][B];
    out[C][A] = half_rabi * (r[A][A] - r[C][C]) - d.gamma3 * r[C][A];
    out[C][C] = half_rabi * (r[A][C] - r[C][A]);
    out
}

/// Fixed-step fourth-order Runge–Kutta settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationSettings {
    dt: f64,
    t_max: f64,
}

impl PropagationSettings {
    pub fn new(dt: f64, t_max: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::Configuration(format!(
                "dt must be positive, got {dt}"
            )));
        }
        if !(t_max.is_finite() && t_max >= 0.0) {
            return Err(Error::Configuration(format!(
                "t_max must be non-negative, got {t_max}"
            )));
        }
        Ok(PropagationSettings { dt, t_max })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Number of full steps needed to reach `t_max`.
    pub fn steps(&self) -> usize {
        (self.t_max / self.dt - 1e-9).ceil().max(0.0) as usize
    }

    /// Rejects a step too coarse for the fastest rate in `params`.
    pub fn check_stability(&self, params: &SystemParams) -> Result<()> {
        let product = self.dt * model::to_angular_rate(params.max_rate());
        if product >= MAX_STEP_RATE_PRODUCT {
            return Err(Error::Configuration(format!(
                "dt = {} ps is too coarse: dt x max rate = {product:.4} (limit {MAX_STEP_RATE_PRODUCT})",
                self.dt
            )));
        }
        Ok(())
    }
}

/// States at `t = k·dt` for `k = 0..=steps`; the last step is shortened to land on `t_max`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        self.states
            .last()
            .expect("trajectory holds at least the initial state")
    }

    pub fn max_trace_error(&self) -> f64 {
        self.states
            .iter()
            .map(|s| (s.trace() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        self.states
            .iter()
            .map(DensityMatrix::hermiticity_defect)
            .fold(0.0, f64::max)
    }
}

struct Stepper<'a> {
    params: &'a SystemParams,
    rates: model::DerivedRates,
    scale: f64,
}

impl<'a> Stepper<'a> {
    fn new(params: &'a SystemParams) -> Self {
        Stepper {
            params,
            rates: params.derive_rates(),
            scale: model::to_angular_rate(1.0),
        }
    }

    fn deriv(&self, r: &Elements) -> Elements {
        let mut d = rhs_elements(r, self.params, &self.rates);
        for z in d.iter_mut().flatten() {
            *z *= self.scale;
        }
        d
    }

    fn step(&self, r: &Elements, h: f64) -> Elements {
        let axpy = |x: &Elements, k: &Elements, a: f64| -> Elements {
            let mut out = *x;
            for j in 0..3 {
                for l in 0..3 {
                    out[j][l] += a * k[j][l];
                }
            }
            out
        };
        let k1 = self.deriv(r);
        let k2 = self.deriv(&axpy(r, &k1, 0.5 * h));
        let k3 = self.deriv(&axpy(r, &k2, 0.5 * h));
        let k4 = self.deriv(&axpy(r, &k3, h));
        let mut out = *r;
        for j in 0..3 {
            for l in 0..3 {
                out[j][l] += h / 6.0 * (k1[j][l] + 2.0 * k2[j][l] + 2.0 * k3[j][l] + k4[j][l]);
            }
        }
        out
    }
}

fn check_finite(state: &DensityMatrix, t: f64) -> Result<()> {
    if state.is_finite() {
        Ok(())
    } else {
        Err(Error::NumericalFailure {
            time_ps: t,
            reason: "non-finite density-matrix element".into(),
        })
    }
}

/// Integrates from `rho0` to `settings.t_max`, recording every step.
pub fn propagate(
    rho0: &DensityMatrix,
    params: &SystemParams,
    settings: &PropagationSettings,
) -> Result<Trajectory> {
    settings.check_stability(params)?;
    let stepper = Stepper::new(params);
    let n = settings.steps();
    let mut times = Vec::with_capacity(n + 1);
    let mut states = Vec::with_capacity(n + 1);
    let mut current = *rho0;
    let mut t = 0.0;
    times.push(t);
    states.push(current);
    for k in 1..=n {
        let t_next = (k as f64 * settings.dt).min(settings.t_max);
        current.rho = stepper.step(&current.rho, t_next - t);
        t = t_next;
        check_finite(&current, t)?;
        times.push(t);
        states.push(current);
    }
    Ok(Trajectory { times, states })
}

/// Evolves `rho0` and returns the state at each requested time (ps, any order).
///
/// Steps of `dt` are taken between samples; the final sub-step to each sample
/// is shortened so samples land exactly on the requested times.
pub fn evolve_sampled(
    rho0: &DensityMatrix,
    params: &SystemParams,
    dt: f64,
    times: &[f64],
) -> Result<Vec<DensityMatrix>> {
    let t_end = times.iter().copied().fold(0.0, f64::max);
    let settings = PropagationSettings::new(dt, t_end)?;
    settings.check_stability(params)?;
    if let Some(bad) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        return Err(Error::Configuration(format!(
            "sample times must be finite and non-negative, got {bad}"
        )));
    }

    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&i, &j| times[i].total_cmp(&times[j]));

    let stepper = Stepper::new(params);
    let mut out = vec![*rho0; times.len()];
    let mut current = *rho0;
    let mut t = 0.0;
    for idx in order {
        let target = times[idx];
        while target - t > dt * (1.0 + 1e-9) {
            current.rho = stepper.step(&current.rho, dt);
            t += dt;
            check_finite(&current, t)?;
        }
        let mut sample = current;
        let rest = target - t;
        if rest > 0.0 {
            sample.rho = stepper.step(&current.rho, rest);
            check_finite(&sample, target)?;
            // Continue from the sample so the grid stays anchored to it.
            current = sample;
            t = target;
        }
        out[idx] = sample;
    }
    Ok(out)
}

/// Population of `end` at each `t2` after starting in |start⟩⟨start|.
///
/// This is the numerical counterpart of the closed-form population Green's
/// function `𝒢_{end end, start start}(t2)`.
pub fn oracle_green_population(
    start: Level,
    end: Level,
    params: &SystemParams,
    t2_list: &[f64],
) -> Result<Vec<f64>> {
    oracle_green_population_with_dt(start, end, params, t2_list, DEFAULT_DT_PS)
}

pub fn oracle_green_population_with_dt(
    start: Level,
    end: Level,
    params: &SystemParams,
    t2_list: &[f64],
    dt: f64,
) -> Result<Vec<f64>> {
    for level in [start, end] {
        if level == Level::C {
            return Err(Error::Configuration(
                "population Green's functions are defined for levels a and b only".into(),
            ));
        }
    }
    let states = evolve_sampled(&DensityMatrix::pure(start), params, dt, t2_list)?;
    Ok(states.iter().map(|s| s.population(end)).collect())
}

/// Optical coherence whose conditional propagator is sampled by the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoherencePair {
    /// ρ_ab, coupled to ρ_cb; the detection-window (ω3) propagator.
    Ab,
    /// ρ_ba, coupled to ρ_bc; the rephasing ω1 propagator.
    Ba,
}

/// Sampled coherence ρ_jk(t) at `t = k·dt` after a unit initial value.
#[derive(Debug, Clone)]
pub struct CoherenceTrace {
    pub pair: CoherencePair,
    pub dt: f64,
    pub values: Vec<C64>,
}

/// Integrates the closed two-coherence subsystem from ρ_jk(0) = 1.
///
/// For `Ab` this is {ρ_ab, ρ_cb}; for `Ba` it is {ρ_ba, ρ_bc}. No other
/// element feeds into either pair, so the subsystem is exact.
pub fn oracle_green_coherence(
    pair: CoherencePair,
    params: &SystemParams,
    settings: &PropagationSettings,
) -> Result<CoherenceTrace> {
    settings.check_stability(params)?;
    let d = params.derive_rates();
    let scale = model::to_angular_rate(1.0);
    let coupling = match pair {
        CoherencePair::Ab => 0.5 * params.rabi() * I,
        CoherencePair::Ba => -0.5 * params.rabi() * I,
    } * scale;
    let (g1, g2) = (d.gamma1 * scale, d.gamma2 * scale);
    let f = |x: C64, y: C64| (coupling * y - g1 * x, coupling * x - g2 * y);

    let h = settings.dt;
    let n = settings.steps();
    let mut values = Vec::with_capacity(n + 1);
    let (mut x, mut y) = (C64::new(1.0, 0.0), ZERO);
    values.push(x);
    for k in 1..=n {
        let (k1x, k1y) = f(x, y);
        let (k2x, k2y) = f(x + 0.5 * h * k1x, y + 0.5 * h * k1y);
        let (k3x, k3y) = f(x + 0.5 * h * k2x, y + 0.5 * h * k2y);
        let (k4x, k4y) = f(x + h * k3x, y + h * k3y);
        x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        if !(x.re.is_finite() && x.im.is_finite()) {
            return Err(Error::NumericalFailure {
                time_ps: k as f64 * h,
                reason: "non-finite coherence".into(),
            });
        }
        values.push(x);
    }
    Ok(CoherenceTrace {
        pair,
        dt: h,
        values,
    })
}

impl CoherenceTrace {
    /// Frequency-domain propagator from a zero-padded FFT of the trace.
    ///
    /// Returns `(ω, 𝒢(ω))` pairs sorted by ω (cm⁻¹, carrier `omega_ab`
    /// restored), using `𝒢_ab,ab(ω) = −i∫ρ_ab e^{+iΔτ}dτ` and
    /// `𝒢_ba,ba(ω) = +i∫ρ_ba e^{−iΔτ}dτ` with `τ = 2πc·t` and `Δ = ω − ω_ab`.
    /// Trapezoidal end weights, rectangular window.
    pub fn spectrum(&self, omega_ab: f64, zero_pad: usize) -> Vec<(f64, C64)> {
        let n = self.values.len();
        let total = n * zero_pad.max(1);
        let mut buf: Vec<C64> = self.values.clone();
        if n > 1 {
            buf[0] *= 0.5;
            buf[n - 1] *= 0.5;
        }
        buf.resize(total, ZERO);

        let mut planner = FftPlanner::new();
        let fft = match self.pair {
            CoherencePair::Ab => planner.plan_fft_inverse(total),
            CoherencePair::Ba => planner.plan_fft_forward(total),
        };
        fft.process(&mut buf);

        let dtau = model::to_angular_rate(self.dt);
        let prefactor = match self.pair {
            CoherencePair::Ab => -I * dtau,
            CoherencePair::Ba => I * dtau,
        };
        let bin = 2.0 * std::f64::consts::PI / (total as f64 * dtau);
        let mut out: Vec<(f64, C64)> = buf
            .into_iter()
            .enumerate()
            .map(|(k, z)| {
                let signed = if k < total.div_ceil(2) {
                    k as f64
                } else {
                    k as f64 - total as f64
                };
                (omega_ab + signed * bin, prefactor * z)
            })
            .collect();
        out.sort_by(|a, b| a.0.total_cmp(&b.0));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn elements_zero_except(d: &Elements, skip: &[(usize, usize)]) -> bool {
        (0..3).all(|j| (0..3).all(|k| skip.contains(&(j, k)) || d[j][k].norm() == 0.0))
    }

    #[test]
    fn rhs_ground_state() {
        let p = SystemParams::reference();
        let d = rhs(&DensityMatrix::pure(Level::B), &p);
        assert_eq!(d[1][1], C64::new(-p.relax_up(), 0.0));
        assert_eq!(d[0][0], C64::new(p.relax_up(), 0.0));
        assert!(elements_zero_except(&d, &[(0, 0), (1, 1)]));
    }

    #[test]
    fn rhs_excited_state_without_control() {
        let p = SystemParams::reference().without_control();
        let d = rhs(&DensityMatrix::pure(Level::A), &p);
        assert_eq!(d[0][0], C64::new(-1.0, 0.0));
        assert_eq!(d[1][1], C64::new(1.0, 0.0));
        assert_eq!(d[2][2], ZERO);
    }

    #[test]
    fn rhs_excited_state_with_control() {
        let p = SystemParams::reference();
        let d = rhs(&DensityMatrix::pure(Level::A), &p);
        assert_relative_eq!(d[0][2].im, -25.0);
        assert_relative_eq!(d[2][0].im, 25.0);
        assert_eq!(d[0][2].re, 0.0);
    }

    #[test]
    fn rhs_is_traceless() {
        let p = SystemParams::reference();
        let h = 0.3;
        let rho = DensityMatrix::from_elements([
            [
                C64::new(0.5, 0.0),
                C64::new(0.1, 0.2),
                C64::new(0.05, -h * 0.1),
            ],
            [C64::new(0.1, -0.2), C64::new(0.3, 0.0), C64::new(0.0, 0.04)],
            [
                C64::new(0.05, h * 0.1),
                C64::new(0.0, -0.04),
                C64::new(0.2, 0.0),
            ],
        ])
        .unwrap();
        let d = rhs(&rho, &p);
        let tr: C64 = (0..3).map(|k| d[k][k]).sum();
        assert!(tr.norm() < 1e-14);
    }

    #[test]
    fn ground_state_is_stationary_without_uphill_rate() {
        let p = SystemParams::builder()
            .relax_up(0.0)
            .rabi(0.0)
            .build()
            .unwrap();
        let s = PropagationSettings::new(0.01, 5.0).unwrap();
        let traj = propagate(&DensityMatrix::pure(Level::B), &p, &s).unwrap();
        assert!(traj.states.iter().all(|r| r.population(Level::B) == 1.0));
    }

    #[test]
    fn rejects_coarse_step() {
        let p = SystemParams::reference();
        let s = PropagationSettings::new(0.1, 1.0).unwrap();
        assert!(matches!(
            propagate(&DensityMatrix::pure(Level::A), &p, &s),
            Err(Error::Configuration(_))
        ));
        assert!(PropagationSettings::new(0.0, 1.0).is_err());
        assert!(PropagationSettings::new(0.001, -1.0).is_err());
    }

    #[test]
    fn nan_input_is_a_numerical_failure() {
        let mut bad = DensityMatrix::pure(Level::A);
        bad.rho[0][1] = C64::new(f64::NAN, 0.0);
        let s = PropagationSettings::new(0.001, 0.01).unwrap();
        assert!(matches!(
            propagate(&bad, &SystemParams::reference(), &s),
            Err(Error::NumericalFailure { .. })
        ));
    }

    #[test]
    fn rejects_non_hermitian_input() {
        let mut rho = *DensityMatrix::pure(Level::A).elements();
        rho[0][1] = C64::new(0.1, 0.0);
        assert!(DensityMatrix::from_elements(rho).is_err());
    }

    #[test]
    fn sampled_initial_conditions() {
        let p = SystemParams::reference();
        assert_eq!(
            oracle_green_population(Level::A, Level::A, &p, &[0.0]).unwrap(),
            vec![1.0]
        );
        assert_eq!(
            oracle_green_population(Level::B, Level::A, &p, &[0.0]).unwrap(),
            vec![0.0]
        );
        assert!(oracle_green_population(Level::C, Level::A, &p, &[0.0]).is_err());
    }

    #[test]
    fn sampling_matches_full_trajectory() {
        let p = SystemParams::reference();
        let s = PropagationSettings::new(0.001, 1.0).unwrap();
        let traj = propagate(&DensityMatrix::pure(Level::A), &p, &s).unwrap();
        let sampled =
            evolve_sampled(&DensityMatrix::pure(Level::A), &p, 0.001, &[1.0, 0.5]).unwrap();
        assert_relative_eq!(
            sampled[0].population(Level::A),
            traj.last().population(Level::A),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            sampled[1].population(Level::A),
            traj.states[500].population(Level::A),
            epsilon = 1e-12
        );
    }

    #[test]
    fn uncoupled_coherence_is_a_pure_exponential() {
        let p = SystemParams::reference().without_control();
        let s = PropagationSettings::new(0.001, 2.0).unwrap();
        let tr = oracle_green_coherence(CoherencePair::Ab, &p, &s).unwrap();
        let g1 = model::to_angular_rate(p.derive_rates().gamma1);
        for (k, v) in tr.values.iter().enumerate().step_by(97) {
            let t = k as f64 * s.dt();
            assert_relative_eq!(v.re, (-g1 * t).exp(), max_relative = 1e-9);
            assert!(v.im.abs() < 1e-15);
        }
    }

    #[test]
    fn equal_damping_coherence_is_a_damped_cosine() {
        // γ1 = γ2 = γ: Γ1 + γa⁰ = γc⁰ = 2 gives γ = (2 + Γ2 + γb⁰) / 2 for both.
        let p = SystemParams::builder()
            .relax_down(1.0)
            .relax_up(0.5)
            .dephasing(Level::A, 1.0)
            .dephasing(Level::B, 1.5)
            .dephasing(Level::C, 2.0)
            .rabi(50.0)
            .build()
            .unwrap();
        let d = p.derive_rates();
        assert_eq!(d.gamma1, d.gamma2);
        let s = PropagationSettings::new(0.001, 3.0).unwrap();
        let tr = oracle_green_coherence(CoherencePair::Ba, &p, &s).unwrap();
        let (g, w) = (
            model::to_angular_rate(d.gamma1),
            model::to_angular_rate(50.0),
        );
        for (k, v) in tr.values.iter().enumerate() {
            let t = k as f64 * s.dt();
            let expected = (-g * t).exp() * (0.5 * w * t).cos().abs();
            assert!((v.norm() - expected).abs() < 1e-9, "t = {t}");
        }
    }

    #[test]
    fn control_on_coherence_decays() {
        let p = SystemParams::reference();
        let s = PropagationSettings::new(0.001, 20.0).unwrap();
        let tr = oracle_green_coherence(CoherencePair::Ab, &p, &s).unwrap();
        // Both subsystem eigenvalues have real part −(γ1 + γ2)/2 = −21.000 cm⁻¹
        // (underdamped: (γ1 − γ2)² < Ω²), so |ρ_ab| ≤ C·e^{−21·2πc·t}.
        let rate =
            model::to_angular_rate(0.5 * (p.derive_rates().gamma1 + p.derive_rates().gamma2));
        for (k, v) in tr.values.iter().enumerate().step_by(250) {
            let t = k as f64 * s.dt();
            assert!(v.norm() <= 2.0 * (-rate * t).exp() + 1e-15, "t = {t}");
        }
        assert!(tr.values.last().unwrap().norm() < 1e-9);
    }
}
