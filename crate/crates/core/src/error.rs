use core::fmt;

/// Errors reported by the numerical layer.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the requested quantity.
    Domain(&'static str),
    /// A model parameter is out of its admissible range.
    InvalidParameter(&'static str),
    /// The model violates the standing regularity assumption
    /// (`sigma > 0` or infinite-variation jumps).
    InvalidModel(&'static str),
    /// The requested quantity has no known tractable expression.
    Unsupported(&'static str),
    /// A series or inversion failed its internal accuracy target; the
    /// a-posteriori error estimate is attached.
    Accuracy {
        message: &'static str,
        estimate: f64,
    },
    /// A quantity that is provably positive came out nonpositive; this
    /// signals a numerical fault, not a modelling condition.
    NumericalFault(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::InvalidParameter(m) => write!(f, "invalid parameter: {m}"),
            Error::InvalidModel(m) => write!(f, "invalid model: {m}"),
            Error::Unsupported(m) => write!(f, "unsupported case: {m}"),
            Error::Accuracy { message, estimate } => {
                write!(f, "accuracy target missed ({message}); error estimate {estimate:e}")
            }
            Error::NumericalFault(m) => write!(f, "numerical fault: {m}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
