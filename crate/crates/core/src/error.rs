use thiserror::Error;

/// Errors produced by the numerical routines and experiment drivers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WvError {
    /// Terms were still growing when the scan reached `n_cap`.
    #[error("series is not analytic at this radius: terms still increasing at n_cap = {n_cap}")]
    NonAnalytic { n_cap: u64 },

    #[error("bad parameter: {0}")]
    BadParam(String),

    #[error("phase sequence too short: need {required} terms, have {available}")]
    PhasesTooShort { required: usize, available: usize },

    /// An asymptotic statistic was requested outside the range where it is defined.
    #[error("outside statistic domain: {0}")]
    Domain(String),

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("no admissible radius: {0}")]
    Exhausted(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    /// A module error annotated with the radius at which it happened.
    #[error("at r = 1 - {s:e}: {source}")]
    AtRadius {
        s: f64,
        #[source]
        source: Box<WvError>,
    },
}

impl WvError {
    pub fn at_radius(self, s: f64) -> Self {
        WvError::AtRadius {
            s,
            source: Box::new(self),
        }
    }

    /// Strips any radius annotations.
    pub fn root(&self) -> &WvError {
        match self {
            WvError::AtRadius { source, .. } => source.root(),
            other => other,
        }
    }
}

impl From<std::io::Error> for WvError {
    fn from(e: std::io::Error) -> Self {
        WvError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, WvError>;
