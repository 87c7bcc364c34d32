use alloc::string::String;

/// Errors produced by the simulation core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("overlap coefficient {name} = {value} lies outside [0, 1]")]
    CouplingOutOfRange { name: &'static str, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("atomic ground level is degenerate (gap {gap:e})")]
    DegenerateGroundState { gap: f64 },

    /// The Liouvillian has more than one stationary state at this parameter point.
    #[error("steady state is not unique (null-space dimension {nullity:?}, condition estimate {condition:e})")]
    DegenerateSteadyState { nullity: Option<usize>, condition: f64 },

    #[error("population {population:e} in Fock level {cutoff} exceeds tail tolerance {tolerance:e}; increase the Fock cutoff")]
    TruncationBreach {
        population: f64,
        tolerance: f64,
        cutoff: usize,
    },

    #[error("integrator step size underflow at time {time} (step {step:e})")]
    StepSizeUnderflow { time: f64, step: f64 },

    #[error("eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("superoperator side {side} exceeds the dense limit {limit}; reduce the Fock cutoff")]
    ProblemTooLarge { side: usize, limit: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("coherence time is infinite (no decoherence channel: eta = 0 or U0 = 0)")]
    InfiniteCoherenceTime,

    #[error("weights must be non-negative and sum to 1 (sum = {sum})")]
    UnnormalizedWeights { sum: f64 },

    #[error("invalid sample times: {0}")]
    InvalidTimes(String),

    #[error("linear solve failed: {0}")]
    SingularSystem(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
