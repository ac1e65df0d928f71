//! Third-order signals assembled from the Green's functions.
//!
//! Every signal factorizes as
//! `Re{ 𝒢_ab,ab(ω3) · K(t2) · 𝒢_x(ω1) }` where `K` is the sum of the four
//! population propagators and `𝒢_x` is 𝒢_ba,ba for rephasing and 𝒢_ab,ab for
//! non-rephasing. The absorptive signal is their sum.
//!
//! Liouville-path bookkeeping (the population kernel each diagram visits
//! during t2):
//!
//! | path | signal        | diagrams | t2 kernels     |
//! |------|---------------|----------|----------------|
//! | R1   | non-rephasing | (a), (b) | aa,aa  bb,aa   |
//! | R2   | rephasing     | (c), (d) | aa,aa  bb,aa   |
//! | R3   | rephasing     | (e), (f) | aa,bb  bb,bb   |
//! | R4   | non-rephasing | (g), (h) | aa,bb  bb,bb   |

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::greens::{self, PopKernel, Propagator};
use crate::model::{Level, SystemParams};

/// Largest grid [`compute_spectrum`] will evaluate.
pub const MAX_GRID_NODES: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalKind {
    Rephasing,
    NonRephasing,
    Absorptive,
}

impl SignalKind {
    pub const ALL: [SignalKind; 3] = [
        SignalKind::Rephasing,
        SignalKind::NonRephasing,
        SignalKind::Absorptive,
    ];

    /// Short tag used on the command line and in file names.
    pub fn tag(self) -> &'static str {
        match self {
            SignalKind::Rephasing => "rp",
            SignalKind::NonRephasing => "nr",
            SignalKind::Absorptive => "abs",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        SignalKind::ALL.into_iter().find(|k| k.tag() == tag)
    }
}

/// A uniformly sampled frequency axis, in cm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub step: f64,
}

impl Axis {
    pub fn new(min: f64, max: f64, step: f64) -> Result<Self> {
        let axis = Axis { min, max, step };
        axis.validate("axis")?;
        Ok(axis)
    }

    /// `center ± half_width`.
    pub fn centered(center: f64, half_width: f64, step: f64) -> Result<Self> {
        Self::new(center - half_width, center + half_width, step)
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |why: String| Err(Error::Configuration(format!("{name}: {why}")));
        if !(self.min.is_finite() && self.max.is_finite() && self.step.is_finite()) {
            return bad("bounds and step must be finite".into());
        }
        if self.min >= self.max {
            return bad(format!("min {} must be below max {}", self.min, self.max));
        }
        if self.step <= 0.0 {
            return bad(format!("step must be positive, got {}", self.step));
        }
        let intervals = (self.max - self.min) / self.step;
        if (intervals - intervals.round()).abs() > 1e-6 * intervals.max(1.0) {
            return bad(format!(
                "step {} does not divide the range {}..{}",
                self.step, self.min, self.max
            ));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.max - self.min) / self.step).round() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn value(&self, k: usize) -> f64 {
        self.min + k as f64 * self.step
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.value(k)).collect()
    }
}

/// The (ω1, ω3) sampling grid at one waiting time t2 (ps).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralGrid {
    pub omega1: Axis,
    pub omega3: Axis,
    pub t2: f64,
}

impl SpectralGrid {
    pub fn new(omega1: Axis, omega3: Axis, t2: f64) -> Result<Self> {
        let grid = SpectralGrid { omega1, omega3, t2 };
        grid.validate()?;
        Ok(grid)
    }

    /// Square grid `ω_ab ± half_width` on both axes.
    pub fn square(center: f64, half_width: f64, step: f64, t2: f64) -> Result<Self> {
        let axis = Axis::centered(center, half_width, step)?;
        Self::new(axis, axis, t2)
    }

    pub fn validate(&self) -> Result<()> {
        self.omega1.validate("omega1")?;
        self.omega3.validate("omega3")?;
        if !(self.t2.is_finite() && self.t2 >= 0.0) {
            return Err(Error::Configuration(format!(
                "t2 must be non-negative, got {}",
                self.t2
            )));
        }
        Ok(())
    }

    pub fn with_t2(&self, t2: f64) -> Self {
        SpectralGrid { t2, ..*self }
    }

    pub fn nodes(&self) -> u64 {
        self.omega1.len() as u64 * self.omega3.len() as u64
    }
}

/// A real signal on a [`SpectralGrid`]; rows are ω3 samples, columns ω1.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum2D {
    pub grid: SpectralGrid,
    pub values: Array2<f64>,
    pub kind: SignalKind,
    pub control_on: bool,
}

impl Spectrum2D {
    /// Wraps externally produced values, checking shape and finiteness.
    pub fn from_values(
        grid: SpectralGrid,
        values: Array2<f64>,
        kind: SignalKind,
        control_on: bool,
    ) -> Result<Self> {
        grid.validate()?;
        if values.dim() != (grid.omega3.len(), grid.omega1.len()) {
            return Err(Error::Configuration(format!(
                "values have shape {:?}, grid needs ({}, {})",
                values.dim(),
                grid.omega3.len(),
                grid.omega1.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NumericalFailure {
                time_ps: grid.t2,
                reason: format!("non-finite spectrum value {v}"),
            });
        }
        Ok(Spectrum2D {
            grid,
            values,
            kind,
            control_on,
        })
    }

    /// Value at grid node (ω3 index, ω1 index).
    pub fn at(&self, i3: usize, i1: usize) -> f64 {
        self.values[[i3, i1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Grid node holding the largest value, as `(ω1, ω3, value)`.
    pub fn argmax(&self) -> (f64, f64, f64) {
        let mut best = (0, 0, f64::NEG_INFINITY);
        for ((i3, i1), &v) in self.values.indexed_iter() {
            if v > best.2 {
                best = (i3, i1, v);
            }
        }
        (
            self.grid.omega1.value(best.1),
            self.grid.omega3.value(best.0),
            best.2,
        )
    }
}

/// One Liouville path of the third-order response.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LiouvillePath {
    R1,
    R2,
    R3,
    R4,
}

impl LiouvillePath {
    /// The two double-sided diagrams grouped under this path.
    pub fn diagrams(self) -> [char; 2] {
        match self {
            LiouvillePath::R1 => ['a', 'b'],
            LiouvillePath::R2 => ['c', 'd'],
            LiouvillePath::R3 => ['e', 'f'],
            LiouvillePath::R4 => ['g', 'h'],
        }
    }

    fn for_term(kind: SignalKind, kernel: PopKernel) -> Self {
        let excited_start = kernel.start() == Level::A;
        match (kind, excited_start) {
            (SignalKind::NonRephasing, true) => LiouvillePath::R1,
            (SignalKind::NonRephasing, false) => LiouvillePath::R4,
            (_, true) => LiouvillePath::R2,
            (_, false) => LiouvillePath::R3,
        }
    }
}

/// A single kernel × propagator product before the real part is taken.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathwayTerm {
    pub path: LiouvillePath,
    pub t2_kernel: PopKernel,
    pub omega1_propagator: Propagator,
    pub value: C64,
}

fn omega1_propagator(kind: SignalKind) -> Result<Propagator> {
    match kind {
        SignalKind::Rephasing => Ok(Propagator::BaBa),
        SignalKind::NonRephasing => Ok(Propagator::AbAb),
        SignalKind::Absorptive => Err(Error::Configuration(
            "the absorptive signal has no single omega1 propagator".into(),
        )),
    }
}

/// The four products making up a rephasing or non-rephasing signal.
pub fn pathway_terms(
    kind: SignalKind,
    omega3: f64,
    t2: f64,
    omega1: f64,
    params: &SystemParams,
) -> Result<[PathwayTerm; 4]> {
    let slot1 = omega1_propagator(kind)?;
    let outer = greens::g_ab_ab(omega3, params) * slot1.eval(omega1, params);
    let mut terms = [PathwayTerm {
        path: LiouvillePath::R1,
        t2_kernel: PopKernel::AaAa,
        omega1_propagator: slot1,
        value: C64::new(0.0, 0.0),
    }; 4];
    for (term, kernel) in terms.iter_mut().zip(PopKernel::ALL) {
        *term = PathwayTerm {
            path: LiouvillePath::for_term(kind, kernel),
            t2_kernel: kernel,
            omega1_propagator: slot1,
            value: outer * kernel.eval(t2, params)?,
        };
    }
    Ok(terms)
}

/// Sum of the four population propagators at `t2`.
pub fn kernel_sum(t2: f64, params: &SystemParams) -> Result<f64> {
    PopKernel::ALL
        .iter()
        .map(|k| k.eval(t2, params))
        .sum::<Result<f64>>()
}

#[inline]
fn assemble(kind: SignalKind, g3: C64, g1_ba: C64, g1_ab: C64, kernel: f64) -> f64 {
    let rp = || (g3 * g1_ba).re * kernel;
    let nr = || (g3 * g1_ab).re * kernel;
    match kind {
        SignalKind::Rephasing => rp(),
        SignalKind::NonRephasing => nr(),
        SignalKind::Absorptive => rp() + nr(),
    }
}

pub fn signal_point(
    kind: SignalKind,
    omega3: f64,
    t2: f64,
    omega1: f64,
    params: &SystemParams,
) -> Result<f64> {
    let kernel = kernel_sum(t2, params)?;
    Ok(assemble(
        kind,
        greens::g_ab_ab(omega3, params),
        greens::g_ba_ba(omega1, params),
        greens::g_ab_ab(omega1, params),
        kernel,
    ))
}

pub fn rephasing_point(omega3: f64, t2: f64, omega1: f64, params: &SystemParams) -> Result<f64> {
    signal_point(SignalKind::Rephasing, omega3, t2, omega1, params)
}

pub fn nonrephasing_point(omega3: f64, t2: f64, omega1: f64, params: &SystemParams) -> Result<f64> {
    signal_point(SignalKind::NonRephasing, omega3, t2, omega1, params)
}

pub fn absorptive_point(omega3: f64, t2: f64, omega1: f64, params: &SystemParams) -> Result<f64> {
    Ok(rephasing_point(omega3, t2, omega1, params)?
        + nonrephasing_point(omega3, t2, omega1, params)?)
}

/// Evaluates `kind` on every grid node; `control_on = false` forces Ω = 0.
pub fn compute_spectrum(
    grid: &SpectralGrid,
    kind: SignalKind,
    params: &SystemParams,
    control_on: bool,
) -> Result<Spectrum2D> {
    grid.validate()?;
    if grid.nodes() > MAX_GRID_NODES {
        return Err(Error::Resource {
            nodes: grid.nodes(),
            limit: MAX_GRID_NODES,
        });
    }
    let params = if control_on {
        *params
    } else {
        params.without_control()
    };
    let kernel = kernel_sum(grid.t2, &params)?;

    let w1 = grid.omega1.values();
    let w3 = grid.omega3.values();
    let col_ba: Vec<C64> = w1.iter().map(|&w| greens::g_ba_ba(w, &params)).collect();
    let col_ab: Vec<C64> = w1.iter().map(|&w| greens::g_ab_ab(w, &params)).collect();

    let (rows, cols) = (w3.len(), w1.len());
    let mut data = vec![0.0; rows * cols];
    data.par_chunks_mut(cols)
        .zip(w3.par_iter())
        .for_each(|(row, &omega3)| {
            let g3 = greens::g_ab_ab(omega3, &params);
            for (j, out) in row.iter_mut().enumerate() {
                *out = assemble(kind, g3, col_ba[j], col_ab[j], kernel);
            }
        });
    let values =
        Array2::from_shape_vec((rows, cols), data).expect("buffer length matches grid shape");
    Spectrum2D::from_values(*grid, values, kind, control_on)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn reference() -> SystemParams {
        SystemParams::reference()
    }

    #[test]
    fn uncoupled_line_center_values() {
        let p = reference().without_control();
        let w = p.omega_ab();
        let g1 = p.derive_rates().gamma1;
        for t2 in [0.0, 1.0, 10.0, 300.0] {
            let rp = rephasing_point(w, t2, w, &p).unwrap();
            let nr = nonrephasing_point(w, t2, w, &p).unwrap();
            assert_relative_eq!(rp, 2.0 / (g1 * g1), max_relative = 1e-12);
            assert_relative_eq!(nr, -2.0 / (g1 * g1), max_relative = 1e-12);
            assert!(absorptive_point(w, t2, w, &p).unwrap().abs() < 1e-18);
        }
        assert!((2.0 / (g1 * g1) - 1.1897e-3).abs() < 1e-7);
    }

    #[test]
    fn uncoupled_lorentzian_tail() {
        let p = reference().without_control();
        let w = p.omega_ab();
        let g1 = p.derive_rates().gamma1;
        let center = rephasing_point(w, 0.0, w, &p).unwrap();
        for sign in [-1.0, 1.0] {
            let tail = rephasing_point(w + sign * 10.0 * g1, 0.0, w, &p).unwrap();
            // |1/(10γ1 + iγ1)| relative to 1/γ1 is 1/√101; the real part of the
            // product with the line-center ω1 propagator falls by 101.
            assert_relative_eq!(center / tail, 101.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn control_suppresses_line_center() {
        let p = reference();
        let w = p.omega_ab();
        let v = rephasing_point(w, 0.0, w, &p).unwrap();
        assert!(v.abs() <= 9.1e-6);
        let off = rephasing_point(w, 0.0, w, &p.without_control()).unwrap();
        assert!(v.abs() * 100.0 < off);
    }

    #[test]
    fn late_kernel_sum_is_three_halves() {
        let p = reference();
        assert_relative_eq!(kernel_sum(1e4, &p).unwrap(), 1.5, epsilon = 1e-12);
        assert_relative_eq!(kernel_sum(0.0, &p).unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(
            kernel_sum(7.3, &p.without_control()).unwrap(),
            2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn pathway_terms_sum_to_signal() {
        let p = reference();
        let (w3, w1, t2) = (p.omega_ab() + 12.0, p.omega_ab() - 30.0, 1.7);
        for kind in [SignalKind::Rephasing, SignalKind::NonRephasing] {
            let terms = pathway_terms(kind, w3, t2, w1, &p).unwrap();
            let total: C64 = terms.iter().map(|t| t.value).sum();
            let direct = signal_point(kind, w3, t2, w1, &p).unwrap();
            assert_relative_eq!(total.re, direct, max_relative = 1e-12);
        }
        let rp = pathway_terms(SignalKind::Rephasing, w3, t2, w1, &p).unwrap();
        let paths: Vec<_> = rp.iter().map(|t| t.path).collect();
        assert_eq!(
            paths,
            [
                LiouvillePath::R2,
                LiouvillePath::R2,
                LiouvillePath::R3,
                LiouvillePath::R3
            ]
        );
        let nr = pathway_terms(SignalKind::NonRephasing, w3, t2, w1, &p).unwrap();
        let paths: Vec<_> = nr.iter().map(|t| t.path).collect();
        assert_eq!(
            paths,
            [
                LiouvillePath::R1,
                LiouvillePath::R1,
                LiouvillePath::R4,
                LiouvillePath::R4
            ]
        );
        assert!(pathway_terms(SignalKind::Absorptive, w3, t2, w1, &p).is_err());
    }

    #[test]
    fn small_uncoupled_grid_peaks_at_center() {
        let p = reference();
        let grid = SpectralGrid::square(p.omega_ab(), 1.0, 1.0, 0.0).unwrap();
        let s = compute_spectrum(&grid, SignalKind::Rephasing, &p, false).unwrap();
        assert_eq!(s.values.dim(), (3, 3));
        let (w1, w3, _) = s.argmax();
        assert_eq!((w1, w3), (p.omega_ab(), p.omega_ab()));
    }

    #[test]
    fn grid_matches_point_functions() {
        let p = reference();
        let grid = SpectralGrid::new(
            Axis::new(12500.0, 12650.0, 7.5).unwrap(),
            Axis::new(12540.0, 12620.0, 4.0).unwrap(),
            2.0,
        )
        .unwrap();
        for kind in SignalKind::ALL {
            let s = compute_spectrum(&grid, kind, &p, true).unwrap();
            for (i3, w3) in grid.omega3.values().into_iter().enumerate().step_by(3) {
                for (i1, w1) in grid.omega1.values().into_iter().enumerate().step_by(4) {
                    let direct = signal_point(kind, w3, 2.0, w1, &p).unwrap();
                    assert_relative_eq!(
                        s.at(i3, i1),
                        direct,
                        max_relative = 1e-12,
                        epsilon = 1e-20
                    );
                }
            }
        }
    }

    #[test]
    fn grid_validation() {
        assert!(Axis::new(1.0, 0.0, 0.1).is_err());
        assert!(Axis::new(0.0, 1.0, 0.0).is_err());
        assert!(Axis::new(0.0, 1.0, 0.3).is_err());
        assert_eq!(Axis::new(0.0, 1.0, 0.25).unwrap().len(), 5);
        assert!(SpectralGrid::square(0.0, 1.0, 0.5, -1.0).is_err());
        let huge = SpectralGrid::square(0.0, 10_000.0, 0.5, 0.0).unwrap();
        assert!(matches!(
            compute_spectrum(&huge, SignalKind::Rephasing, &reference(), true),
            Err(Error::Resource { .. })
        ));
    }
}
