use thiserror::Error;

/// Errors produced by the simulator, the Fock-space oracle and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schedule: {0}")]
    Schedule(String),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("unknown strategy `{0}` (expected qswitch, coupling_gate or detuning_gate)")]
    UnknownStrategy(String),

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("no closed form for n_max = {0}; use the Monte Carlo estimator")]
    NoClosedForm(usize),

    /// A numerical resolution or consistency guard tripped.
    #[error("numerical guard: {0}")]
    Numerical(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Parameter {
        name,
        reason: reason.into(),
    }
}
