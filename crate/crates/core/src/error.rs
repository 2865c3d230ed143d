use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument out of domain: {what} = {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("unscaled value overflows f64: {0}")]
    Overflow(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quadrature did not converge in {stage}: coarse {coarse:.3e}, refined {refined:.3e}, nodes {nodes}")]
    Quadrature {
        stage: &'static str,
        coarse: f64,
        refined: f64,
        nodes: usize,
    },

    #[error("partition failed: {0}")]
    Partition(String),

    #[error("no sign change in [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at(stage: &'static str) -> impl FnOnce(Error) -> Error {
        move |e| Error::Stage {
            stage,
            source: Box::new(e),
        }
    }
}

pub(crate) fn domain(what: &'static str, value: f64) -> Error {
    Error::Domain { what, value }
}
