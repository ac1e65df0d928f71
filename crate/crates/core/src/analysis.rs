//! Feature extraction from computed spectra and traces.

use nalgebra::{Matrix3, Matrix5, Vector3, Vector5};

use crate::error::{Error, Result};
use crate::greens;
use crate::model::{self, SystemParams};
use crate::response::Spectrum2D;

/// Default prominence threshold, as a fraction of the spectrum's value range.
pub const DEFAULT_PROMINENCE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremumReport {
    pub omega1: f64,
    pub omega3: f64,
    pub value: f64,
    pub kind: ExtremumKind,
    /// Height above (or depth below) the saddle linking it to a larger extremum.
    pub prominence: f64,
    /// Whether sub-grid refinement moved the position off the grid node.
    pub refined: bool,
}

/// Minimal union–find over grid nodes.
struct Forest {
    parent: Vec<usize>,
}

impl Forest {
    fn new(n: usize) -> Self {
        Forest {
            parent: (0..n).collect(),
        }
    }

    fn root(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Topographic prominence of every local maximum of `values` (row-major,
/// `rows × cols`, 8-connected). Returns `(peak node, prominence)` pairs.
///
/// Nodes are flooded from the top down; when two basins meet at a saddle the
/// one with the lower summit is closed with prominence `summit − saddle`.
/// Equal-valued neighbours join the same basin, so a tied pair of nodes is a
/// single peak.
fn peak_prominences(values: &[f64], rows: usize, cols: usize) -> Vec<(usize, f64)> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));

    let mut forest = Forest::new(n);
    let mut summit = vec![usize::MAX; n];
    let mut flooded = vec![false; n];
    let mut out = Vec::new();
    let floor = values.iter().copied().fold(f64::INFINITY, f64::min);

    for &node in &order {
        flooded[node] = true;
        let (r, c) = (node / cols, node % cols);
        let mut roots: Vec<usize> = Vec::with_capacity(8);
        for dr in -1i64..=1 {
            for dc in -1i64..=1 {
                if dr == 0 && dc == 0 {
                    continue;
                }
                let (rr, cc) = (r as i64 + dr, c as i64 + dc);
                if rr < 0 || cc < 0 || rr >= rows as i64 || cc >= cols as i64 {
                    continue;
                }
                let nb = rr as usize * cols + cc as usize;
                if flooded[nb] {
                    let root = forest.root(nb);
                    if !roots.contains(&root) {
                        roots.push(root);
                    }
                }
            }
        }
        if roots.is_empty() {
            summit[node] = node;
            continue;
        }
        // The basin with the highest summit absorbs the others.
        roots.sort_by(|&a, &b| {
            values[summit[b]]
                .total_cmp(&values[summit[a]])
                .then(summit[a].cmp(&summit[b]))
        });
        let keep = roots[0];
        for &other in &roots[1..] {
            out.push((summit[other], values[summit[other]] - values[node]));
            forest.parent[other] = keep;
        }
        forest.parent[node] = keep;
    }
    let mut seen = vec![false; n];
    for node in 0..n {
        let root = forest.root(node);
        if !seen[root] {
            seen[root] = true;
            out.push((summit[root], values[summit[root]] - floor));
        }
    }
    out
}

/// Offset of the stationary point of a quadratic fitted to the 3×3
/// neighbourhood of `(r, c)`, in grid steps `(d_col, d_row)`.
fn quadratic_offset(values: &[f64], cols: usize, r: usize, c: usize, sign: f64) -> (f64, f64) {
    let f = |dr: i64, dc: i64| {
        sign * values[(r as i64 + dr) as usize * cols + (c as i64 + dc) as usize]
    };
    let mut gx = 0.0;
    let mut gy = 0.0;
    let mut hxx = 0.0;
    let mut hyy = 0.0;
    for k in -1..=1 {
        gx += f(k, 1) - f(k, -1);
        gy += f(1, k) - f(-1, k);
        hxx += f(k, 1) - 2.0 * f(k, 0) + f(k, -1);
        hyy += f(1, k) - 2.0 * f(0, k) + f(-1, k);
    }
    let (gx, gy, hxx, hyy) = (gx / 6.0, gy / 6.0, hxx / 3.0, hyy / 3.0);
    let hxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / 4.0;

    let det = hxx * hyy - hxy * hxy;
    if hxx < 0.0 && det > 0.0 {
        let dx = -(hyy * gx - hxy * gy) / det;
        let dy = -(hxx * gy - hxy * gx) / det;
        if dx.abs() <= 1.0 && dy.abs() <= 1.0 {
            return (dx, dy);
        }
    }
    // Fall back to independent parabolas along the row and column.
    (
        greens::parabolic_offset(f(0, -1), f(0, 0), f(0, 1)),
        greens::parabolic_offset(f(-1, 0), f(0, 0), f(1, 0)),
    )
}

fn extrema_of(spectrum: &Spectrum2D, kind: ExtremumKind, threshold: f64) -> Vec<ExtremumReport> {
    let (rows, cols) = spectrum.values.dim();
    let sign = match kind {
        ExtremumKind::Maximum => 1.0,
        ExtremumKind::Minimum => -1.0,
    };
    let signed: Vec<f64> = spectrum.values.iter().map(|v| sign * v).collect();
    let (w1, w3) = (&spectrum.grid.omega1, &spectrum.grid.omega3);
    let mut found: Vec<ExtremumReport> = peak_prominences(&signed, rows, cols)
        .into_iter()
        .filter(|&(_, prom)| prom > threshold)
        .filter_map(|(node, prominence)| {
            let (r, c) = (node / cols, node % cols);
            if r == 0 || c == 0 || r + 1 == rows || c + 1 == cols {
                return None;
            }
            let (dx, dy) = quadratic_offset(&signed, cols, r, c, 1.0);
            Some(ExtremumReport {
                omega1: w1.value(c) + dx * w1.step,
                omega3: w3.value(r) + dy * w3.step,
                value: spectrum.values[[r, c]],
                kind,
                prominence,
                refined: dx != 0.0 || dy != 0.0,
            })
        })
        .collect();
    found.sort_by(|a, b| {
        (a.omega3, a.omega1)
            .partial_cmp(&(b.omega3, b.omega1))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    found
}

/// All interior maxima and minima whose prominence exceeds
/// `min_prominence × (max − min)` of the spectrum, refined to sub-grid
/// positions. Maxima come first, each group sorted by (ω3, ω1).
pub fn find_extrema(spectrum: &Spectrum2D, min_prominence: f64) -> Result<Vec<ExtremumReport>> {
    if !(min_prominence > 0.0 && min_prominence < 1.0) {
        return Err(Error::Configuration(format!(
            "prominence fraction must lie in (0, 1), got {min_prominence}"
        )));
    }
    let (rows, cols) = spectrum.values.dim();
    if rows < 3 || cols < 3 {
        return Ok(Vec::new());
    }
    let hi = spectrum
        .values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let lo = spectrum
        .values
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let range = hi - lo;
    if range.is_nan() || range <= 0.0 {
        return Ok(Vec::new());
    }
    let threshold = min_prominence * range;
    let mut out = extrema_of(spectrum, ExtremumKind::Maximum, threshold);
    out.extend(extrema_of(spectrum, ExtremumKind::Minimum, threshold));
    Ok(out)
}

/// Result of fitting `offset + A·e^{−κt}·cos(ωt + φ)` to a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct OscillationFit {
    /// ω, cm⁻¹.
    pub frequency: f64,
    /// κ, cm⁻¹.
    pub decay_rate: f64,
    pub offset: f64,
    pub amplitude: f64,
    /// φ, rad.
    pub phase: f64,
    /// RMS of the fit residuals.
    pub residual: f64,
}

impl OscillationFit {
    /// Model value at `t` ps.
    pub fn eval(&self, t: f64) -> f64 {
        let w = model::to_angular_rate(self.frequency);
        let k = model::to_angular_rate(self.decay_rate);
        self.offset + self.amplitude * (-k * t).exp() * (w * t + self.phase).cos()
    }
}

// Model in linear form: y = p0 + e^{−κt}(p1 cos ωt + p2 sin ωt), κ = p3, ω = p4.
fn model_and_jacobian(t: f64, p: &Vector5<f64>) -> (f64, Vector5<f64>) {
    let env = (-p[3] * t).exp();
    let (s, c) = (p[4] * t).sin_cos();
    let osc = p[1] * c + p[2] * s;
    let y = p[0] + env * osc;
    let jac = Vector5::new(
        1.0,
        env * c,
        env * s,
        -t * env * osc,
        env * t * (-p[1] * s + p[2] * c),
    );
    (y, jac)
}

fn sum_sq(ts: &[f64], ys: &[f64], p: &Vector5<f64>) -> f64 {
    ts.iter()
        .zip(ys)
        .map(|(&t, &y)| (model_and_jacobian(t, p).0 - y).powi(2))
        .sum()
}

/// Linear least squares for (offset, c, s) at fixed (κ, ω).
fn linear_part(ts: &[f64], ys: &[f64], kappa: f64, omega: f64) -> Option<(Vector3<f64>, f64)> {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for (&t, &y) in ts.iter().zip(ys) {
        let env = (-kappa * t).exp();
        let row = Vector3::new(1.0, env * (omega * t).cos(), env * (omega * t).sin());
        ata += row * row.transpose();
        aty += row * y;
    }
    let coef = ata.lu().solve(&aty)?;
    let p = Vector5::new(coef[0], coef[1], coef[2], kappa, omega);
    Some((coef, sum_sq(ts, ys, &p)))
}

/// Least-squares fit of a damped cosine with offset to `(t2 ps, value)` samples.
///
/// The frequency is seeded from the periodogram peak of the mean-removed
/// trace, the decay rate from a coarse scan around it, and the five
/// parameters are then polished with Levenberg–Marquardt.
pub fn fit_damped_oscillation(trace: &[(f64, f64)]) -> Result<OscillationFit> {
    if trace.len() < 20 {
        return Err(Error::InsufficientData(format!(
            "need at least 20 samples, got {}",
            trace.len()
        )));
    }
    if trace.iter().any(|(t, v)| !(t.is_finite() && v.is_finite())) {
        return Err(Error::InsufficientData(
            "trace contains non-finite samples".into(),
        ));
    }
    if trace.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InsufficientData(
            "sample times must increase strictly".into(),
        ));
    }
    let t0 = trace[0].0;
    let ts: Vec<f64> = trace.iter().map(|(t, _)| t - t0).collect();
    let ys: Vec<f64> = trace.iter().map(|(_, v)| *v).collect();
    let n = ys.len() as f64;
    let span = *ts.last().unwrap();

    let mean = ys.iter().sum::<f64>() / n;
    let spread = (ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n).sqrt();
    let relative_variation = spread / (mean.abs() + spread).max(f64::MIN_POSITIVE);
    if spread == 0.0 || relative_variation < 1e-10 {
        return Err(Error::NonOscillatory { relative_variation });
    }

    // Periodogram up to the Nyquist rate of the mean spacing.
    let nyquist = std::f64::consts::PI * (ts.len() - 1) as f64 / span;
    let bins = 8 * ts.len();
    let power = |w: f64| {
        let (mut re, mut im) = (0.0, 0.0);
        for (&t, &y) in ts.iter().zip(&ys) {
            let (s, c) = (w * t).sin_cos();
            re += (y - mean) * c;
            im += (y - mean) * s;
        }
        re * re + im * im
    };
    let lowest = 2.0 * std::f64::consts::PI / span;
    let omega_seed = (1..=bins)
        .map(|k| lowest + (nyquist - lowest) * k as f64 / bins as f64)
        .map(|w| (w, power(w)))
        .fold((lowest, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        })
        .0;
    if span * omega_seed < 2.0 * 2.0 * std::f64::consts::PI {
        return Err(Error::InsufficientData(format!(
            "trace spans {:.3} oscillation periods, need at least 2",
            span * omega_seed / (2.0 * std::f64::consts::PI)
        )));
    }

    // Coarse (κ, ω) scan with the linear parameters solved exactly.
    let mut best: Option<(Vector5<f64>, f64)> = None;
    for i in 0..=20 {
        let omega = omega_seed * (0.9 + 0.01 * i as f64);
        for j in 0..=60 {
            let kappa = omega_seed * 2.0 * j as f64 / 60.0;
            if let Some((coef, cost)) = linear_part(&ts, &ys, kappa, omega) {
                if best.as_ref().is_none_or(|b| cost < b.1) {
                    best = Some((Vector5::new(coef[0], coef[1], coef[2], kappa, omega), cost));
                }
            }
        }
    }
    let (mut p, mut cost) = best.ok_or(Error::FitFailure {
        residual_history: Vec::new(),
    })?;

    let mut history = vec![(cost / n).sqrt()];
    let mut lambda = 1e-3;
    let mut converged = false;
    for _ in 0..500 {
        let mut jtj = Matrix5::zeros();
        let mut jtr = Vector5::zeros();
        for (&t, &y) in ts.iter().zip(&ys) {
            let (m, jac) = model_and_jacobian(t, &p);
            jtj += jac * jac.transpose();
            jtr += jac * (y - m);
        }
        let mut damped = jtj;
        for k in 0..5 {
            damped[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
        }
        let Some(step) = damped.lu().solve(&jtr) else {
            lambda *= 10.0;
            continue;
        };
        let trial = p + step;
        let trial_cost = sum_sq(&ts, &ys, &trial);
        if trial_cost <= cost {
            let gain = cost - trial_cost;
            p = trial;
            cost = trial_cost;
            lambda = (lambda * 0.3).max(1e-12);
            history.push((cost / n).sqrt());
            let small_step = step
                .iter()
                .zip(p.iter())
                .all(|(s, v)| s.abs() <= 1e-12 * v.abs().max(1e-12));
            if gain <= 1e-15 * cost.max(f64::MIN_POSITIVE) || small_step || cost == 0.0 {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                // No descent direction left: the current point is a minimum.
                converged = true;
                break;
            }
        }
    }
    if !converged || p[3] < 0.0 || p.iter().any(|v| !v.is_finite()) {
        return Err(Error::FitFailure {
            residual_history: history,
        });
    }

    let amplitude = p[1].hypot(p[2]);
    let (omega, phase) = if p[4] >= 0.0 {
        (p[4], (-p[2]).atan2(p[1]))
    } else {
        (-p[4], p[2].atan2(p[1]))
    };
    // Shift the phase reference back to the first sample time.
    let phase = phase - omega * t0;
    let phase = (phase + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
        - std::f64::consts::PI;
    let amplitude = amplitude * (p[3] * t0).exp();
    Ok(OscillationFit {
        frequency: model::from_angular_rate(omega),
        decay_rate: model::from_angular_rate(p[3]),
        offset: p[0],
        amplitude,
        phase,
        residual: (cost / n).sqrt(),
    })
}

/// Long-time populations `(a from a, b from a, a from b, b from b)`.
///
/// With the control field on, the start-in-a limits are half the
/// detailed-balance values; the start-in-b limits do not depend on the
/// control field.
pub fn steady_state_populations(params: &SystemParams) -> Result<(f64, f64, f64, f64)> {
    let [aa, ba, ab, bb] = greens::pop_limits(params)?;
    Ok((aa, ba, ab, bb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::response::{compute_spectrum, SignalKind, SpectralGrid};
    use approx::assert_relative_eq;
    use ndarray::Array2;
    use proptest::prelude::*;

    fn grid(n: usize) -> SpectralGrid {
        SpectralGrid::square(0.0, (n - 1) as f64 / 2.0, 1.0, 0.0).unwrap()
    }

    fn spectrum_from(values: Array2<f64>) -> Spectrum2D {
        let n = values.dim().0;
        Spectrum2D::from_values(grid(n), values, SignalKind::Rephasing, false).unwrap()
    }

    fn gaussian_bumps(n: usize, bumps: &[(f64, f64, f64)]) -> Array2<f64> {
        let half = (n - 1) as f64 / 2.0;
        Array2::from_shape_fn((n, n), |(r, c)| {
            let (x, y) = (c as f64 - half, r as f64 - half);
            bumps
                .iter()
                .map(|&(cx, cy, h)| h * (-((x - cx).powi(2) + (y - cy).powi(2)) / 8.0).exp())
                .sum()
        })
    }

    #[test]
    fn constant_spectrum_has_no_extrema() {
        let s = spectrum_from(Array2::from_elem((9, 9), 3.0));
        assert!(find_extrema(&s, 0.1).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_prominence() {
        let s = spectrum_from(Array2::from_elem((9, 9), 3.0));
        assert!(find_extrema(&s, 0.0).is_err());
        assert!(find_extrema(&s, 1.0).is_err());
    }

    #[test]
    fn separates_bumps_and_refines() {
        let s = spectrum_from(gaussian_bumps(
            41,
            &[(-8.3, 5.2, 1.0), (7.6, -6.4, 0.7), (0.0, 15.0, -0.5)],
        ));
        let ex = find_extrema(&s, 0.05).unwrap();
        let maxima: Vec<_> = ex
            .iter()
            .filter(|e| e.kind == ExtremumKind::Maximum)
            .collect();
        let minima: Vec<_> = ex
            .iter()
            .filter(|e| e.kind == ExtremumKind::Minimum)
            .collect();
        assert_eq!(maxima.len(), 2);
        assert_eq!(minima.len(), 1);
        let top = maxima.iter().find(|e| e.value > 0.9).unwrap();
        assert!((top.omega1 + 8.3).abs() < 0.05 && (top.omega3 - 5.2).abs() < 0.05);
        assert!(top.refined);
        assert!((minima[0].omega1).abs() < 0.05 && (minima[0].omega3 - 15.0).abs() < 0.05);
    }

    #[test]
    fn tied_neighbours_form_one_peak() {
        let mut v = Array2::zeros((7, 7));
        v[[3, 3]] = 1.0;
        v[[3, 4]] = 1.0;
        let ex = find_extrema(&spectrum_from(v), 0.1).unwrap();
        assert_eq!(
            ex.iter()
                .filter(|e| e.kind == ExtremumKind::Maximum)
                .count(),
            1
        );
    }

    #[test]
    fn border_extrema_are_excluded() {
        let s = spectrum_from(gaussian_bumps(21, &[(10.0, 0.0, 1.0)]));
        assert!(find_extrema(&s, 0.05)
            .unwrap()
            .iter()
            .all(|e| e.kind != ExtremumKind::Maximum));
    }

    #[test]
    fn uncoupled_rephasing_has_one_peak() {
        let p = SystemParams::reference();
        let g = SpectralGrid::square(p.omega_ab(), 150.0, 2.5, 0.0).unwrap();
        let s = compute_spectrum(&g, SignalKind::Rephasing, &p, false).unwrap();
        let maxima: Vec<_> = find_extrema(&s, 0.1)
            .unwrap()
            .into_iter()
            .filter(|e| e.kind == ExtremumKind::Maximum)
            .collect();
        assert_eq!(maxima.len(), 1);
        assert!((maxima[0].omega1 - p.omega_ab()).abs() <= 1.25);
        assert!((maxima[0].omega3 - p.omega_ab()).abs() <= 1.25);
    }

    #[test]
    fn steady_states() {
        let (aa, ba, ab, bb) = steady_state_populations(&SystemParams::reference()).unwrap();
        assert!((aa - 5.0e-5).abs() < 1e-8);
        assert!((ba - 0.49995).abs() < 1e-8);
        assert!((ab - 1.0e-4).abs() < 1e-8);
        assert!((bb - 0.99990).abs() < 1e-8);

        let sym = SystemParams::builder()
            .relax_down(3.0)
            .relax_up(3.0)
            .build()
            .unwrap();
        assert_eq!(
            steady_state_populations(&sym).unwrap(),
            (0.25, 0.25, 0.5, 0.5)
        );

        let one_way = SystemParams::builder().relax_up(0.0).build().unwrap();
        assert_eq!(
            steady_state_populations(&one_way).unwrap(),
            (0.0, 0.5, 0.0, 1.0)
        );
    }

    fn synthetic(
        freq: f64,
        decay: f64,
        offset: f64,
        amp: f64,
        phase: f64,
        t_end: f64,
        dt: f64,
    ) -> Vec<(f64, f64)> {
        let fit = OscillationFit {
            frequency: freq,
            decay_rate: decay,
            offset,
            amplitude: amp,
            phase,
            residual: 0.0,
        };
        let n = (t_end / dt).round() as usize;
        (0..=n)
            .map(|k| (k as f64 * dt, fit.eval(k as f64 * dt)))
            .collect()
    }

    #[test]
    fn recovers_reference_oscillation() {
        let trace = synthetic(45.604, 20.5, 1.5, 0.5, 0.3, 3.0, 0.01);
        let fit = fit_damped_oscillation(&trace).unwrap();
        assert_relative_eq!(fit.frequency, 45.604, max_relative = 1e-3);
        assert_relative_eq!(fit.decay_rate, 20.5, max_relative = 1e-3);
        assert_relative_eq!(fit.offset, 1.5, max_relative = 1e-3);
        assert_relative_eq!(fit.amplitude, 0.5, max_relative = 1e-3);
        assert!(fit.residual < 1e-9);
    }

    #[test]
    fn constant_trace_is_non_oscillatory() {
        let trace: Vec<_> = (0..300).map(|k| (0.01 * k as f64, 2.0)).collect();
        assert!(matches!(
            fit_damped_oscillation(&trace),
            Err(Error::NonOscillatory { .. })
        ));
    }

    #[test]
    fn short_traces_are_rejected() {
        let trace: Vec<_> = (0..10).map(|k| (k as f64, k as f64)).collect();
        assert!(matches!(
            fit_damped_oscillation(&trace),
            Err(Error::InsufficientData(_))
        ));
        // One period only.
        let trace = synthetic(45.604, 1.0, 0.0, 1.0, 0.0, 0.7, 0.01);
        assert!(fit_damped_oscillation(&trace).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn extrema_positions_are_scale_invariant(scale in 1e-6f64..1e6, cx in -6.0f64..6.0, cy in -6.0f64..6.0) {
            let base = gaussian_bumps(31, &[(cx, cy, 1.0), (-cx, 9.0, 0.6)]);
            let a = find_extrema(&spectrum_from(base.clone()), 0.05).unwrap();
            let b = find_extrema(&spectrum_from(base * scale), 0.05).unwrap();
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x.omega1 - y.omega1).abs() < 1e-9 && (x.omega3 - y.omega3).abs() < 1e-9);
            }
        }

        #[test]
        fn fit_roundtrips_synthetic_traces(
            freq in 20.0f64..80.0, decay in 0.5f64..15.0,
            offset in -2.0f64..2.0, amp in 0.1f64..3.0, phase in -3.0f64..3.0,
        ) {
            // At least three periods of the slowest frequency.
            let period = 2.0 * std::f64::consts::PI / model::to_angular_rate(freq);
            let trace = synthetic(freq, decay, offset, amp, phase, 4.0 * period, period / 40.0);
            let fit = fit_damped_oscillation(&trace).unwrap();
            prop_assert!((fit.frequency / freq - 1.0).abs() < 1e-3);
            prop_assert!((fit.decay_rate / decay - 1.0).abs() < 1e-3);
            prop_assert!((fit.offset - offset).abs() < 1e-3 * offset.abs().max(amp));
            prop_assert!((fit.amplitude / amp - 1.0).abs() < 1e-3);
        }
    }
}
