use thiserror::Error;

/// Errors produced by the solvers and diagnostics in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("Newton inversion did not converge for u = {u} after {iterations} iterations")]
    IterationLimit { u: f64, iterations: usize },

    #[error("grid function has {nodes} nodes, at least {required} are required")]
    GridTooSmall { nodes: usize, required: usize },

    #[error("argument {x} outside the domain of {what}")]
    DomainError { what: &'static str, x: f64 },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("adaptive step fell below {min_step:e} at x = {x}")]
    StepUnderflow { x: f64, min_step: f64 },

    #[error("initial zeros cannot produce an alternating profile on this grid: {0}")]
    BadZeros(String),

    #[error("time step produced non-finite values at t = {t}")]
    StepRejected { t: f64 },

    #[error("at least two stored times at or after t0 = {t0} are required")]
    NeedsTwoTimes { t0: f64 },

    #[error("test function does not vanish: {0}")]
    BadTestFunction(String),

    #[error("profile at t = {t} is not strictly increasing near x = {x}")]
    NotMonotone { t: f64, x: f64 },

    #[error("profile at t = {t} does not change sign")]
    NoSignChange { t: f64 },

    #[error("level u = {u} lies outside the profile range [{min}, {max}]")]
    OutOfRange { u: f64, min: f64, max: f64 },

    #[error("time t = {t} has no stored neighbours for centred differencing")]
    TimeBoundary { t: f64 },

    #[error("time t = {t} is not a stored output time")]
    NoSuchTime { t: f64 },

    #[error("fewer than 3 interior nodes on the {side} side of x = {x1}")]
    TooCoarse { side: &'static str, x1: f64 },

    #[error("one-sided slopes agree to within {jump:e}; the jump condition is degenerate")]
    DegenerateJump { jump: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error: {0}")]
    Io(String),

    #[error("{context}: {source}")]
    Scenario {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Attach scenario context to a propagated error.
    pub fn in_scenario(self, context: impl Into<String>) -> Self {
        Error::Scenario {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
