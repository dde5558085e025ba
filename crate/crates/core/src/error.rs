use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {z} outside the supported range: {reason}")]
    Range { z: Complex64, reason: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("order {order} exceeds the supported ceiling {ceiling}")]
    OrderTooLarge { order: usize, ceiling: usize },

    #[error("partial-wave evaluation failed at m = {m}, ka = {ka}, nka = {nka}: {source}")]
    PartialWave {
        m: i64,
        ka: f64,
        nka: Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error(
        "partial-wave sum did not converge by m = {m_max} (last term magnitude {last_term:e})"
    )]
    NotConverged { m_max: usize, last_term: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("quadrature missed its error target ({estimate:e} > {target:e}) with {nodes} nodes")]
    Quadrature {
        nodes: usize,
        estimate: f64,
        target: f64,
    },

    #[error("temperature {0} K outside the supported range")]
    TemperatureOutOfRange(f64),

    #[error("material '{0}' not found in database")]
    UnknownMaterial(String),

    #[error("invalid material data: {0}")]
    MaterialData(String),

    #[error("scan is not identifiable: {0}")]
    Identifiability(String),

    #[error("invalid scan: {0}")]
    InvalidScan(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
