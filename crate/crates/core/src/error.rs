use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mismatched field contexts: sqrt({left}) vs sqrt({right})")]
    FieldMismatch { left: u64, right: u64 },
    #[error("field discriminant {0} must be square-free and at least 2")]
    InvalidField(u64),
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: &'static str },
    #[error("exact arithmetic is required for {0}")]
    ExactnessRequired(&'static str),
    #[error("Gram matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("one-parameter subgroup is not dense: {0}")]
    NotDense(&'static str),
    #[error("one-parameter subgroup must have direction (1, alpha)")]
    NonCanonicalSubgroup,
    #[error("invalid gluing parameters: {0}")]
    InvalidParams(&'static str),
    #[error("point does not lie on the subtorus")]
    NotOnSubtorus,
    #[error("expected a point of the cylinder component")]
    NotACylinderPoint,
    #[error("input is rational; an irrational number is required")]
    RationalInput,
    #[error("|t - s| exceeds the validity radius {radius}")]
    OutsideValidityRadius { radius: f64 },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("target lies on the orbit (parameter {t})")]
    TargetOnOrbit { t: String },
    #[error("certificate does not replay: {0}")]
    CertificateInvalid(&'static str),
    #[error("isometry decomposition failed: {0}")]
    Decompose(#[from] DecomposeError),
}

/// Reasons a black-box map of `Z` fails to split as a product isometry.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecomposeError {
    #[error("map exchanges the compact and non-compact components (sample {sample})")]
    ComponentSwap { sample: u64 },
    #[error("map restricted to Y is not a translation or inversion of the torus (sample {sample})")]
    UnrecognizedTorusIsometry { sample: u64 },
    #[error("map restricted to a line has slope {slope}, not +1 or -1")]
    LineMapNotIsometric { slope: String },
    #[error("line maps h_y differ between lines (sample {sample})")]
    NotProductForm { sample: u64 },
}

impl Error {
    pub(crate) fn parse(input: &str, reason: &'static str) -> Self {
        Error::Parse { input: input.into(), reason }
    }

    pub(crate) fn on_orbit(t: &impl core::fmt::Display) -> Self {
        Error::TargetOnOrbit { t: alloc::format!("{t}") }
    }
}
