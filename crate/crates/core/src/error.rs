use thiserror::Error;

pub type Result<T> = std::result::Result<T, HhError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HhError {
    /// Arguments outside the domain, wrong ordering, bad parameter values.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("value {value} is outside the range [{lo}, {hi}]")]
    Range { value: f64, lo: f64, hi: f64 },

    /// The pair (omega0, omega1) misbehaves, e.g. the ratio is not monotone.
    #[error("Chebyshev system violation: {0}")]
    System(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("non-finite value {value} from `{name}` at {at}")]
    Evaluation { name: String, at: f64, value: f64 },

    /// A hypothesis of one of the inequalities is not met by the inputs.
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("generator failure: {0}")]
    Generator(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl HhError {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        HhError::Input(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        HhError::Contract(msg.into())
    }

    pub(crate) fn parse(message: impl Into<String>) -> Self {
        HhError::Parse {
            line: 1,
            column: 1,
            message: message.into(),
        }
    }

    /// Re-anchor a parse error at a position in a larger document.
    pub(crate) fn at(self, line: usize, column: usize) -> Self {
        match self {
            HhError::Parse {
                line: l, column: c, message,
            } => HhError::Parse {
                line: line + l - 1,
                column: if l == 1 { column + c - 1 } else { c },
                message,
            },
            other => HhError::Parse {
                line,
                column,
                message: other.to_string(),
            },
        }
    }
}

impl From<std::io::Error> for HhError {
    fn from(e: std::io::Error) -> Self {
        HhError::Io(e.to_string())
    }
}
