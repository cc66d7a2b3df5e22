use thiserror::Error;

use crate::geometry::Statement;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime in [2, 2^31)")]
    InvalidModulus(u64),

    #[error("no inverse: {0} is zero modulo {1}")]
    NoInverse(u32, u32),

    #[error("oracle size limit: {rows}x{cols} exceeds {limit} entries")]
    OracleSizeLimit { rows: usize, cols: usize, limit: usize },

    #[error("matrix size limit: {rows}x{cols} exceeds {limit} entries")]
    MatrixSizeLimit { rows: usize, cols: usize, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid monomial {indices:?} for n = {n}")]
    InvalidMonomial { indices: Vec<usize>, n: usize },

    #[error("monomial index {z} out of range for N({n}, {d}) = {count}")]
    IndexOutOfRange { z: usize, n: usize, d: usize, count: usize },

    #[error("invalid block: {0}")]
    InvalidBlock(String),

    #[error("invalid statement: {0}")]
    InvalidStatement(String),

    #[error("n = {n} is outside the domain of {what} (requires n >= {min})")]
    FormulaDomain { what: &'static str, n: usize, min: usize },

    #[error("degenerate point: l and m are proportional")]
    DegeneratePoint,

    #[error("could not sample a non-degenerate point after {0} attempts")]
    SamplingFailed(usize),

    #[error("inconsistent points: {0}")]
    InconsistentPoints(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),

    #[error("rank mismatch on replay: certificate says {stored}, recomputed {recomputed}")]
    RankMismatch { stored: usize, recomputed: usize },

    #[error("fact rejected for {statement}: {reason}")]
    FactRejected { statement: Statement, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
