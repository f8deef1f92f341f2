use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate monomial {0:?}")]
    DuplicateTerm([u32; 6]),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("evaluation failed: {0}")]
    Evaluation(String),
    #[error("Newton iteration did not converge (residual {residual:e})")]
    NewtonFailed { residual: f64 },
    #[error("not a saddle-center at these parameters: {0}")]
    NotSaddleCenter(String),
    #[error("singularity proximity near t = {re} + {im}i")]
    Singularity { re: f64, im: f64 },
    #[error("escape/blow-up: state norm {norm:e} near t = {re} + {im}i")]
    BlowUp { norm: f64, re: f64, im: f64 },
    #[error("no section crossing found: {0}")]
    NoCrossing(String),
    #[error("ill-conditioned normalization (condition number {0:e})")]
    IllConditioned(f64),
    #[error("unsatisfiable precision request: {0}")]
    Precision(String),
    #[error("offset too large: seed cross-check disagreement {0:e}")]
    OffsetTooLarge(f64),
    #[error("unreliable fit: {0}")]
    Unreliable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable short name of the variant, for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::DuplicateTerm(_) => "duplicate_term",
            Error::Precondition(_) => "precondition",
            Error::Evaluation(_) => "evaluation",
            Error::NewtonFailed { .. } => "newton_failed",
            Error::NotSaddleCenter(_) => "not_saddle_center",
            Error::Singularity { .. } => "singularity",
            Error::BlowUp { .. } => "blow_up",
            Error::NoCrossing(_) => "no_crossing",
            Error::IllConditioned(_) => "ill_conditioned",
            Error::Precision(_) => "precision",
            Error::OffsetTooLarge(_) => "offset_too_large",
            Error::Unreliable(_) => "unreliable",
        }
    }
}
