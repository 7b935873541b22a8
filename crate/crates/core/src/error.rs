use thiserror::Error;

/// Errors raised by the computation engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("metric is not symmetric positive-definite")]
    NotPositiveDefinite,

    #[error("complex structure is not integrable (Nijenhuis residual {residual:.3e})")]
    NonIntegrable { residual: f64 },

    #[error("almost complex structure does not square to -Id (residual {residual:.3e})")]
    NotComplexStructure { residual: f64 },

    #[error("metric is not compatible with the complex structure (residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("A does not commute with J1 (residual {residual:.3e})")]
    NotJCommuting { residual: f64 },

    #[error("structure constants violate the Jacobi identity (residual {residual:.3e})")]
    JacobiViolation { residual: f64 },

    #[error("Lie algebra is not almost abelian: no codimension-one abelian ideal")]
    NotAlmostAbelian,

    #[error("unsupported complex dimension n = {n}: {reason}")]
    UnsupportedDimension { n: usize, reason: &'static str },

    #[error("input is not balanced (Lee form norm {lee_norm:.3e})")]
    NotBalanced { lee_norm: f64 },

    #[error("no closed (n,0)-form: obstruction {re:.3e} + {im:.3e} i")]
    NoClosedVolumeForm { re: f64, im: f64 },

    #[error("A violates the traceless J1-commuting pattern (residual {residual:.3e})")]
    PatternViolation { residual: f64 },

    #[error("equation has no solution (residual {residual:.3e})")]
    Unsolvable { residual: f64 },

    #[error("anomaly flow right-hand side is not of type (2,2): off-type norm {off_type_norm:.3e}")]
    NotTypeTwoTwo { off_type_norm: f64 },

    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepSizeUnderflow { t: f64, h: f64, last_state: Vec<f64> },

    #[error("maximum number of steps ({max_steps}) exceeded at t = {t}")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("metric lost positive-definiteness at t = {t}")]
    LostPositivity { t: f64 },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("parameter constraint violated for {entry}: {constraint}")]
    ConstraintViolation { entry: String, constraint: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Whether the failure is a numerical abort rather than a validation failure.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepSizeUnderflow { .. }
                | Error::TooManySteps { .. }
                | Error::LostPositivity { .. }
                | Error::Unsolvable { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
