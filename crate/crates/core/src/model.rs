//! Physical parameters of the Λ-type atom and the composite rates derived from them.
//!
//! Every rate and frequency is carried in wavenumbers (cm⁻¹). Time enters only
//! through products `rate × t`, which [`to_angular_rate`] converts once into
//! radians for `t` in picoseconds.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in cm/ps.
pub const SPEED_OF_LIGHT_CM_PER_PS: f64 = 0.029_979_245_8;

/// Converts a wavenumber in cm⁻¹ to an angular rate in rad/ps (`2πc·x`).
#[inline]
pub fn to_angular_rate(wavenumber: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT_CM_PER_PS * wavenumber
}

/// Inverse of [`to_angular_rate`].
#[inline]
pub fn from_angular_rate(rate: f64) -> f64 {
    rate / (2.0 * PI * SPEED_OF_LIGHT_CM_PER_PS)
}

/// Dimensionless phase `2πc·x·t` accumulated by a rate `x` (cm⁻¹) over `t` ps.
#[inline]
pub fn phase(wavenumber: f64, t_ps: f64) -> f64 {
    to_angular_rate(wavenumber) * t_ps
}

/// The three levels of the Λ system: excited `a`, ground `b`, metastable `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Level {
    A,
    B,
    C,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::A, Level::B, Level::C];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Level::A => 0,
            Level::B => 1,
            Level::C => 2,
        }
    }

    pub fn label(self) -> char {
        match self {
            Level::A => 'a',
            Level::B => 'b',
            Level::C => 'c',
        }
    }
}

/// Physical parameters of a run, all in cm⁻¹.
///
/// The control field is fixed at exact resonance with the a↔c transition and
/// all transition dipoles are taken as 1, so neither appears here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    omega_ab: f64,
    relax_down: f64,
    relax_up: f64,
    dephasing: [f64; 3],
    rabi: f64,
}

impl SystemParams {
    /// Parameters used throughout the reference figures (⁸⁵Rb D1 line).
    pub fn reference() -> Self {
        SystemParams {
            omega_ab: 12579.0,
            relax_down: 1.0,
            relax_up: 0.0001,
            dephasing: [80.0, 1.0, 1.0],
            rabi: 50.0,
        }
    }

    pub fn builder() -> SystemParamsBuilder {
        SystemParamsBuilder {
            inner: Self::reference(),
        }
    }

    /// Transition frequency ω_ab.
    pub fn omega_ab(&self) -> f64 {
        self.omega_ab
    }

    /// Downhill relaxation rate Γ1 (a → b).
    pub fn relax_down(&self) -> f64 {
        self.relax_down
    }

    /// Uphill relaxation rate Γ2 (b → a).
    pub fn relax_up(&self) -> f64 {
        self.relax_up
    }

    /// Pure-dephasing rate γ⁽⁰⁾ of `level`.
    pub fn dephasing(&self, level: Level) -> f64 {
        self.dephasing[level.index()]
    }

    /// Control-field Rabi frequency Ω.
    pub fn rabi(&self) -> f64 {
        self.rabi
    }

    pub fn control_on(&self) -> bool {
        self.rabi > 0.0
    }

    /// Γ1 + Γ2.
    pub fn total_relaxation(&self) -> f64 {
        self.relax_down + self.relax_up
    }

    /// Copy of `self` with the control field switched off.
    pub fn without_control(&self) -> Self {
        SystemParams { rabi: 0.0, ..*self }
    }

    pub fn with_rabi(&self, rabi: f64) -> Result<Self> {
        SystemParams { rabi, ..*self }.validated()
    }

    /// Largest rate appearing in the equations of motion, in cm⁻¹.
    pub fn max_rate(&self) -> f64 {
        let d = self.derive_rates();
        [
            self.relax_down,
            self.relax_up,
            self.rabi,
            d.gamma1,
            d.gamma2,
            d.gamma3,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn derive_rates(&self) -> DerivedRates {
        derive_rates(self)
    }

    fn validated(self) -> Result<Self> {
        let finite_nonneg = |name: &'static str, v: f64| -> Result<()> {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite, got {v}"),
                });
            }
            if v < 0.0 {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be non-negative, got {v}"),
                });
            }
            Ok(())
        };
        if !(self.omega_ab.is_finite() && self.omega_ab > 0.0) {
            return Err(Error::InvalidParameter {
                name: "omega_ab",
                reason: format!("must be positive, got {}", self.omega_ab),
            });
        }
        finite_nonneg("Gamma1", self.relax_down)?;
        finite_nonneg("Gamma2", self.relax_up)?;
        finite_nonneg("gamma0_a", self.dephasing[0])?;
        finite_nonneg("gamma0_b", self.dephasing[1])?;
        finite_nonneg("gamma0_c", self.dephasing[2])?;
        finite_nonneg("Omega", self.rabi)?;
        if self.total_relaxation() <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "Gamma1",
                reason: "Gamma1 + Gamma2 must be positive".into(),
            });
        }
        Ok(self)
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::reference()
    }
}

/// Builder starting from [`SystemParams::reference`].
#[derive(Debug, Clone)]
pub struct SystemParamsBuilder {
    inner: SystemParams,
}

impl SystemParamsBuilder {
    pub fn omega_ab(mut self, v: f64) -> Self {
        self.inner.omega_ab = v;
        self
    }

    pub fn relax_down(mut self, v: f64) -> Self {
        self.inner.relax_down = v;
        self
    }

    pub fn relax_up(mut self, v: f64) -> Self {
        self.inner.relax_up = v;
        self
    }

    pub fn dephasing(mut self, level: Level, v: f64) -> Self {
        self.inner.dephasing[level.index()] = v;
        self
    }

    pub fn rabi(mut self, v: f64) -> Self {
        self.inner.rabi = v;
        self
    }

    pub fn build(self) -> Result<SystemParams> {
        self.inner.validated()
    }
}

/// Whether the a↔c Rabi cycling is underdamped (4Ω² > γ3²).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Oscillatory,
    Overdamped,
}

/// Composite decoherence rates and the generalized Rabi frequency, in cm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    /// Decay of the a–b coherence.
    pub gamma1: f64,
    /// Decay of the c–b coherence.
    pub gamma2: f64,
    /// Decay of the a–c coherence.
    pub gamma3: f64,
    /// ½√|4Ω² − γ3²|; a frequency when oscillatory, a rate when overdamped.
    pub omega_tilde: f64,
    pub regime: Regime,
}

impl DerivedRates {
    pub fn is_oscillatory(&self) -> bool {
        self.regime == Regime::Oscillatory
    }
}

pub fn derive_rates(params: &SystemParams) -> DerivedRates {
    let [ga, gb, gc] = params.dephasing;
    let (g1, g2) = (params.relax_down, params.relax_up);
    let gamma1 = 0.5 * (g1 + ga + g2 + gb);
    let gamma2 = 0.5 * (g2 + gb + gc);
    let gamma3 = 0.5 * (g1 + ga + gc);
    let disc = 4.0 * params.rabi * params.rabi - gamma3 * gamma3;
    DerivedRates {
        gamma1,
        gamma2,
        gamma3,
        omega_tilde: 0.5 * disc.abs().sqrt(),
        regime: if disc > 0.0 {
            Regime::Oscillatory
        } else {
            Regime::Overdamped
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn reference_rates() {
        let d = SystemParams::reference().derive_rates();
        assert_relative_eq!(d.gamma1, 41.00005, max_relative = 1e-14);
        assert_relative_eq!(d.gamma2, 1.00005, max_relative = 1e-14);
        assert_relative_eq!(d.gamma3, 41.0, max_relative = 1e-14);
        // ½√(10000 − 1681)
        assert_relative_eq!(d.omega_tilde, 0.5 * 8319f64.sqrt(), max_relative = 1e-14);
        assert!((d.omega_tilde - 45.604).abs() < 1e-3);
        assert!(d.is_oscillatory());
    }

    #[test]
    fn zero_rates() {
        // Γ1 + Γ2 > 0 is a construction invariant, so build the struct directly.
        let p = SystemParams {
            omega_ab: 1.0,
            relax_down: 0.0,
            relax_up: 0.0,
            dephasing: [0.0; 3],
            rabi: 0.0,
        };
        let d = derive_rates(&p);
        assert_eq!(
            (d.gamma1, d.gamma2, d.gamma3, d.omega_tilde),
            (0.0, 0.0, 0.0, 0.0)
        );
    }

    #[test]
    fn overdamped_case() {
        let p = SystemParams::builder()
            .relax_down(2.0)
            .relax_up(2.0)
            .dephasing(Level::A, 2.0)
            .dephasing(Level::B, 2.0)
            .dephasing(Level::C, 2.0)
            .rabi(1.0)
            .build()
            .unwrap();
        let d = p.derive_rates();
        assert_eq!((d.gamma1, d.gamma2, d.gamma3), (4.0, 3.0, 3.0));
        assert_eq!(d.regime, Regime::Overdamped);
        assert_relative_eq!(d.omega_tilde, 0.5 * 5f64.sqrt());
    }

    #[test]
    fn unit_conversion() {
        assert_relative_eq!(to_angular_rate(1.0), 0.188_365_2, epsilon = 1e-7);
        assert_eq!(to_angular_rate(0.0), 0.0);
        assert_relative_eq!(to_angular_rate(41.0), 7.7230, epsilon = 1e-4);
    }

    #[test]
    fn rejects_bad_params() {
        let err = SystemParams::builder().rabi(-5.0).build().unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "Omega", .. }));
        assert!(SystemParams::builder().omega_ab(0.0).build().is_err());
        assert!(SystemParams::builder()
            .relax_down(0.0)
            .relax_up(0.0)
            .build()
            .is_err());
        assert!(SystemParams::builder()
            .dephasing(Level::C, f64::NAN)
            .build()
            .is_err());
    }

    proptest! {
        #[test]
        fn angular_rate_roundtrip(x in -1e6f64..1e6) {
            let back = from_angular_rate(to_angular_rate(x));
            prop_assert!((back - x).abs() <= 1e-12 * x.abs().max(1e-300));
        }

        #[test]
        fn rates_scale_covariantly(
            g1 in 0.01f64..100.0, g2 in 0.0f64..10.0,
            ga in 0.0f64..100.0, gb in 0.0f64..10.0, gc in 0.0f64..10.0,
            rabi in 0.0f64..200.0, s in 0.1f64..10.0,
        ) {
            let build = |k: f64| SystemParams::builder()
                .relax_down(k * g1).relax_up(k * g2)
                .dephasing(Level::A, k * ga).dephasing(Level::B, k * gb)
                .dephasing(Level::C, k * gc).rabi(k * rabi)
                .build().unwrap();
            let (d, ds) = (build(1.0).derive_rates(), build(s).derive_rates());
            prop_assert_eq!(d.regime, ds.regime);
            for (x, y) in [(d.gamma1, ds.gamma1), (d.gamma2, ds.gamma2),
                           (d.gamma3, ds.gamma3), (d.omega_tilde, ds.omega_tilde)] {
                prop_assert!((s * x - y).abs() <= 1e-9 * y.abs().max(1e-12));
            }
        }
    }
}
