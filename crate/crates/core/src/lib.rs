//! Two-dimensional electronic spectra of a Λ-type three-level atom whose
//! excited state is dressed by a resonant control field.
//!
//! The crate evaluates closed-form coherence and population Green's functions,
//! assembles rephasing, non-rephasing and absorptive signals from them, and
//! checks every closed form against direct integration of the density-matrix
//! equations of motion.

pub mod analysis;
pub mod error;
pub mod greens;
pub mod lindblad;
pub mod model;
pub mod response;

pub use analysis::{
    find_extrema, fit_damped_oscillation, steady_state_populations, ExtremumKind, ExtremumReport,
    OscillationFit,
};
pub use error::{Error, Result};
pub use greens::{
    g_ab_ab, g_ba_ba, g_pop, grid_trough_positions, trough_positions, FreqGreen, PopGreen,
    PopKernel, Propagator,
};
pub use lindblad::{
    oracle_green_coherence, oracle_green_population, propagate, CoherencePair, DensityMatrix,
    PropagationSettings, Trajectory,
};
pub use model::{
    derive_rates, from_angular_rate, to_angular_rate, DerivedRates, Level, Regime, SystemParams,
};
pub use response::{
    absorptive_point, compute_spectrum, nonrephasing_point, rephasing_point, Axis, LiouvillePath,
    PathwayTerm, SignalKind, SpectralGrid, Spectrum2D,
};
