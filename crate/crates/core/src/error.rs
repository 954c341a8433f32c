use thiserror::Error;

/// Every failure the library reports. Numerical failures carry enough
/// context to tell a bad input apart from an algorithmic limit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("convergence failure: {what} (estimated error {est_error:e})")]
    Convergence { what: String, est_error: f64 },

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("quadrature did not converge on [{lo}, {hi}]: estimate {value:e} +/- {est_error:e} after {intervals} subintervals")]
    Quadrature {
        lo: f64,
        hi: f64,
        value: f64,
        est_error: f64,
        intervals: usize,
    },

    #[error("degenerate coefficient: min(1+2k*phi) = {margin} at t = {t}")]
    Degeneracy { margin: f64, t: f64 },

    #[error("ill-conditioned step matrix at t = {t} (condition estimate {cond:e})")]
    SingularSolve { t: f64, cond: f64 },

    #[error("ball condition violated at iterate {iterate}: 4|k|*sup|phi| = {value} (margin {margin})")]
    BallViolation {
        iterate: usize,
        value: f64,
        margin: f64,
    },

    #[error("fixed-point iteration did not converge in {iterations} iterations; residuals {residuals:?}")]
    NonConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },

    #[error("degenerate signal: {0}")]
    DegenerateSignal(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("sweep aborted: {0}")]
    Sweep(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
