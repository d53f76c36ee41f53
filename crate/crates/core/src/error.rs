use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no sign change over bracket [{lo}, {hi}]: f(lo)={f_lo:e}, f(hi)={f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root finder did not converge after {iterations} iterations")]
    Convergence { iterations: usize },

    #[error("date {end} precedes {start}")]
    DateOrder { start: String, end: String },

    #[error("degenerate interval [{0}, {1}]")]
    DegenerateInterval(f64, f64),

    #[error("invalid strike: {0}")]
    Strike(String),

    #[error("epsilon calibration failed: residual {lo_residual:e} at eps={lo}, {hi_residual:e} at eps={hi}")]
    Calibration {
        lo: f64,
        hi: f64,
        lo_residual: f64,
        hi_residual: f64,
    },

    #[error("premium {premium:e} violates the {bound} bound {value:e}")]
    Bounds {
        bound: &'static str,
        premium: f64,
        value: f64,
    },

    #[error("index PV construction failed: {0}")]
    Construction(String),

    #[error("non-finite integrand value {value} at z={at}")]
    Evaluation { at: f64, value: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
