use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical parameter violates its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Propagation or grid settings that cannot be honored.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// Γ1 + Γ2 = 0 leaves the population steady state undefined.
    #[error("steady state undefined: Gamma1 + Gamma2 = 0")]
    UndefinedSteadyState,

    /// A closed-form expression hit a vanishing denominator.
    #[error("singular closed form: {0}")]
    Singular(&'static str),

    /// The trough-splitting radicand is negative, so the two troughs merge.
    #[error("no resolved splitting (radicand {radicand:.6e} < 0)")]
    NoSplitting { radicand: f64 },

    #[error("numerical failure at t = {time_ps} ps: {reason}")]
    NumericalFailure { time_ps: f64, reason: String },

    #[error("grid of {nodes} nodes exceeds the limit of {limit}")]
    Resource { nodes: u64, limit: u64 },

    #[error("damped-oscillation fit did not converge (final residual {:.3e})", residual_history.last().copied().unwrap_or(f64::NAN))]
    FitFailure { residual_history: Vec<f64> },

    /// The trace carries no resolvable oscillation.
    #[error("trace is non-oscillatory (relative variation {relative_variation:.3e})")]
    NonOscillatory { relative_variation: f64 },

    #[error("insufficient data for fit: {0}")]
    InsufficientData(String),
}
