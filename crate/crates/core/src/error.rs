//! Error type shared by all solver modules.

use thiserror::Error;

/// Errors reported by construction, validation and solver routines.
#[derive(Debug, Error)]
pub enum SolverError {
    /// Structural dimension mismatch in game or system data.
    #[error("dimension mismatch in {context}: expected {expected}, got {found}")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },

    /// A data invariant failed at construction or validation time.
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A solver precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Iterative method exhausted its iteration budget.
    #[error("{op} hit the iteration limit ({max_iter}) with residual {residual:.3e}")]
    IterationLimit {
        op: &'static str,
        max_iter: usize,
        residual: f64,
    },

    /// Dykstra stalled above tolerance; the intersection may be empty.
    #[error(
        "projection onto intersection stalled at residual {residual:.3e} after {iters} sweeps; \
         the intersection may be empty"
    )]
    EmptyIntersection { residual: f64, iters: usize },

    /// Multiplier recovery could not certify a nonnegative solution.
    #[error("degenerate multipliers: nonnegative least-squares residual {residual:.3e} > {tol:.3e}")]
    DegenerateMultipliers { residual: f64, tol: f64 },

    /// An operation that requires the quadratic cost family was called on a
    /// custom cost.
    #[error("unsupported cost form: {0}")]
    UnsupportedForm(String),

    /// A solution failed its a-posteriori certificate.
    #[error("certification failed for {op}: {detail}")]
    CertificationFailure { op: &'static str, detail: String },

    /// Inner solver failure surfaced by the outer loop.
    #[error("inner solver failed at outer iteration {outer_iter}: {source}")]
    InnerSolve {
        outer_iter: usize,
        #[source]
        source: Box<SolverError>,
    },
}

impl SolverError {
    pub(crate) fn dim(context: impl Into<String>, expected: usize, found: usize) -> Self {
        SolverError::DimensionMismatch {
            context: context.into(),
            expected,
            found,
        }
    }
}
