use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{op}: order {order} exceeds the supported maximum {max}")]
    OrderTooLarge {
        op: &'static str,
        order: u32,
        max: u32,
    },

    #[error("{op}: argument {re}{im:+}i lies on the branch cut (-inf, 0]")]
    BranchCut { op: &'static str, re: f64, im: f64 },

    #[error("{op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("{op}: matrix size {size} exceeds the limit {max}")]
    Size {
        op: &'static str,
        size: usize,
        max: usize,
    },

    #[error(
        "quadrature budget of {panels} panels exhausted (best estimate {best}, error estimate {error})"
    )]
    BudgetExceeded { panels: usize, best: f64, error: f64 },

    #[error("{op}: imaginary residue {imag} exceeds {limit}")]
    NonReal {
        op: &'static str,
        imag: f64,
        limit: f64,
    },

    #[error("symm_eigen: input is not symmetric (deviation {deviation})")]
    NotSymmetric { deviation: f64 },

    #[error("symm_eigen: no convergence after {sweeps} sweeps (off-diagonal norm {off})")]
    NoConvergence { sweeps: usize, off: f64 },
}

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// `true` for failures of a numerical method on valid input, `false` for
    /// rejected input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BudgetExceeded { .. } | Error::NonReal { .. } | Error::NoConvergence { .. }
        )
    }
}
