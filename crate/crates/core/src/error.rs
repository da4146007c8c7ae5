use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
///
/// Every variant knows which subsystem produced it ([`Error::module`]) and
/// whether it stems from bad input or from a numerical failure
/// ([`Error::is_input`]); the CLI maps these to exit codes.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid matrix structure: {0}")]
    InvalidStructure(String),

    #[error("matrix is not symmetric: entry ({row}, {col}) has no matching transpose")]
    NotSymmetric { row: usize, col: usize },

    #[error("nonpositive diagonal entry {value} of B at index {index}")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("B does not appear to be positive definite (smallest Ritz value {lowest})")]
    NotPositiveDefinite { lowest: f64 },

    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("function is not finite at {at}")]
    NonFinite { at: f64 },

    #[error("degree limit {k_max} reached; best relative error {best_error:e} at degree {best_degree}")]
    DegreeNotReached { k_max: usize, best_degree: usize, best_error: f64 },

    #[error("rho = {rho} violates 1 < rho < {upper}")]
    RhoOutOfRange { rho: f64, upper: f64 },

    #[error("Chebyshev recurrence diverged at degree {degree}; widen the spectrum bounds")]
    Divergence { degree: usize },

    #[error("B-approximation too coarse; decrease tau ((w, z) = {value:e} at Lanczos step {step})")]
    IndefiniteBInner { step: usize, value: f64 },

    #[error("starting vector is zero")]
    ZeroVector,

    #[error("tridiagonal eigensolver did not converge (size {size})")]
    TridiagNoConvergence { size: usize },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps")]
    JacobiNoConvergence { sweeps: usize },

    #[error("matrix is not positive definite (pivot {pivot} at index {index})")]
    NotSpd { index: usize, pivot: f64 },

    #[error("dense oracle limited to n <= {limit}, got {n}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("perturbation bound vacuous at this tau: {0}")]
    VacuousBound(String),

    #[error("grid point {t} maps outside the open interval (-1, 1)")]
    GridOutsideBounds { t: f64 },

    #[error("interval [{a}, {b}] lies outside the curve grid [{lo}, {hi}]")]
    OutsideGrid { a: f64, b: f64, lo: f64, hi: f64 },

    #[error("curves are on different grids")]
    GridMismatch,

    #[error("density has no positive mass on [{a}, {b}]")]
    NoMass { a: f64, b: f64 },
}

impl Error {
    /// Name of the subsystem the error is attributed to.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            DimensionMismatch { .. } | InvalidStructure(_) | NotSymmetric { .. } | NonPositiveDiagonal { .. } => "sparsemat",
            InvalidInterval { .. } | NonFinite { .. } | DegreeNotReached { .. } | RhoOutOfRange { .. } => "chebfit",
            NotPositiveDefinite { .. } => "specbounds",
            Divergence { .. } | GridOutsideBounds { .. } => "kpm",
            IndefiniteBInner { .. } | ZeroVector | TridiagNoConvergence { .. } => "lanczos",
            JacobiNoConvergence { .. } | NotSpd { .. } | OracleTooLarge { .. } | VacuousBound(_) => "oracle",
            OutsideGrid { .. } | GridMismatch | NoMass { .. } => "dos",
            InvalidArgument(_) => "config",
        }
    }

    /// True for errors caused by the caller's input rather than by a
    /// numerical failure inside an algorithm.
    pub fn is_input(&self) -> bool {
        use Error::*;
        matches!(
            self,
            DimensionMismatch { .. }
                | InvalidStructure(_)
                | NotSymmetric { .. }
                | NonPositiveDiagonal { .. }
                | NotPositiveDefinite { .. }
                | InvalidInterval { .. }
                | InvalidArgument(_)
                | RhoOutOfRange { .. }
                | ZeroVector
                | NotSpd { .. }
                | OracleTooLarge { .. }
                | OutsideGrid { .. }
                | GridMismatch
        )
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
