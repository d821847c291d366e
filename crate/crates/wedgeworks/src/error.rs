use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func} has a pole at {at}")]
    Pole { func: &'static str, at: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument {0} lies on the branch cut; specify a side")]
    BranchCut(String),

    #[error("{what} did not converge (error estimate {estimate:.3e}, tolerance {tol:.3e})")]
    NoConvergence {
        what: String,
        estimate: f64,
        tol: f64,
    },

    #[error("frequencies coincide (omega = {omega}); the overlap is distributional, use the smeared oracle")]
    Degenerate { omega: f64 },

    #[error("packet width {width} must be < center/5 = {limit}")]
    PacketWidth { width: f64, limit: f64 },

    #[error("dimension {dim} exceeds the limit {limit}")]
    Dimension { dim: usize, limit: usize },

    #[error("fit failed: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn no_convergence(what: impl Into<String>, estimate: f64, tol: f64) -> Self {
        Error::NoConvergence {
            what: what.into(),
            estimate,
            tol,
        }
    }

    /// True for failures caused by a quadrature or series that did not settle.
    pub fn is_convergence(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
