use thiserror::Error;

use crate::norms::MembershipReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The expression tree or sequence record violates a structural invariant.
    #[error("malformed input: {0}")]
    Structural(String),

    /// A lattice sum, integral or tail could not be certified.
    #[error("cannot certify: {0}")]
    NotCertifiable(String),

    /// An operation precondition failed. Carries the membership evidence when one exists.
    #[error("precondition violated: {reason}")]
    Precondition {
        reason: String,
        report: Option<Box<MembershipReport>>,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        message: String,
        line: usize,
        column: usize,
    },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
}

impl Error {
    pub(crate) fn precondition(reason: impl Into<String>) -> Self {
        Error::Precondition {
            reason: reason.into(),
            report: None,
        }
    }

    pub(crate) fn with_report(reason: impl Into<String>, report: MembershipReport) -> Self {
        Error::Precondition {
            reason: reason.into(),
            report: Some(Box::new(report)),
        }
    }

    /// True for errors that reject an input on mathematical grounds rather than a bad file.
    pub fn is_rejection(&self) -> bool {
        matches!(
            self,
            Error::Precondition { .. } | Error::NotCertifiable(_) | Error::Domain(_)
        )
    }
}
