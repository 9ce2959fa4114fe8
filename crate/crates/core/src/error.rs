use thiserror::Error;

/// Failure modes shared by every operation in the crate.
///
/// Support violations in relative entropy are not errors: they are reported
/// as `f64::INFINITY`.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed input: wrong shapes, mismatched algebras, non-Hermitian data,
    /// out-of-range parameters.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// An eigenvalue fell outside the domain of a spectral function, or a
    /// functional that must be faithful is not.
    #[error("{context}: eigenvalue {eigenvalue:e} outside the admissible domain")]
    Domain { context: String, eigenvalue: f64 },

    /// An iterative solver hit its iteration cap.
    #[error(
        "solver did not converge after {iterations} iterations \
         (best value {best_value}, gradient norm {gradient_norm:e})"
    )]
    Convergence {
        iterations: usize,
        best_value: f64,
        gradient_norm: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(context: impl Into<String>, eigenvalue: f64) -> Self {
        Error::Domain {
            context: context.into(),
            eigenvalue,
        }
    }

    /// Prefixes the field path of a validation error, e.g. `blocks[1]` becomes
    /// `omega.blocks[1]`. Other variants are returned unchanged.
    pub fn in_field(self, prefix: &str) -> Self {
        match self {
            Error::Validation { field, reason } => Error::Validation {
                field: if field.is_empty() {
                    prefix.to_string()
                } else {
                    format!("{prefix}.{field}")
                },
                reason,
            },
            other => other,
        }
    }
}
