use std::path::PathBuf;

use crate::scalar::MpComplex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid precision: {bits} bits (minimum is {min})")]
    InvalidPrecision { bits: u32, min: u32 },

    #[error("leading coefficient is zero")]
    DegenerateLeadingCoefficient,

    #[error("insufficient precision: {what}")]
    InsufficientPrecision { what: String },

    #[error("z = {point} is a branch point of the limit curve")]
    BranchPoint { point: i32 },

    /// The QR iteration ran out of sweeps. `partial` holds the eigenvalues
    /// deflated before the budget ran out.
    #[error("eigenvalue iteration did not converge after {sweeps} sweeps ({found} of {n} eigenvalues found)", found = partial.len())]
    NonConvergence {
        sweeps: usize,
        n: usize,
        partial: Vec<MpComplex>,
    },

    #[error("derivative vanished at root {index} after perturbation")]
    SingularDerivative { index: usize },

    #[error("iterate for root {index} became non-finite at sweep {sweep}")]
    Divergence { index: usize, sweep: usize },

    #[error("{}:{line}: {msg}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        msg: String,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            msg: msg.into(),
        }
    }

    /// Attaches a file name to a parse error.
    pub fn with_path(self, path: &std::path::Path) -> Self {
        match self {
            Error::Parse { line, msg, .. } => Error::Parse {
                path: Some(path.to_path_buf()),
                line,
                msg,
            },
            other => other,
        }
    }
}
