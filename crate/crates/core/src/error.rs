use std::fmt;

use thiserror::Error;

/// Which derived weight vector a positivity failure refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightKind {
    /// Row sums of `B`, the weights of the hypersurface.
    Q,
    /// Column sums of `B`, the exponents of the deformation monomial.
    QPrime,
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightKind::Q => f.write_str("q"),
            WeightKind::QPrime => f.write_str("q'"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("NonSquare: expected a square matrix, got {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },
    #[error("Singular: matrix has determinant 0")]
    Singular,
    #[error("EmptyMatrix: matrices need at least one row and one column")]
    EmptyMatrix,
    #[error("RaggedMatrix: row {row} has {len} entries, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("NegativeEntry: exponent matrix entry ({row},{col}) is negative")]
    NegativeEntry { row: usize, col: usize },
    #[error("NonPositiveWeight: {kind}_{index} = {value} is not positive")]
    NonPositiveWeight {
        kind: WeightKind,
        /// 1-based coordinate index.
        index: usize,
        value: String,
    },
    #[error("NotCalabiYau: sum of weights {sum} differs from degree d = {d}")]
    NotCalabiYau { sum: String, d: String },
    #[error("WrongCount: expected {expected} exponent vectors of length {expected}, got {got}")]
    WrongCount { expected: usize, got: usize },
    #[error("ModulusMismatch: vector modulus {got} differs from d = {expected}")]
    ModulusMismatch { expected: String, got: String },
    #[error("LengthMismatch: expected length {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),
    #[error("NegativeExponent: invariant form exponent b_{index} = {value} is negative")]
    NegativeExponent { index: usize, value: String },
    #[error("InvalidWeights: {0}")]
    InvalidWeights(String),
    #[error("Parse: {0}")]
    Parse(String),
    #[error("Internal invariant violated: {0}")]
    Internal(String),
    #[error("{name}: {source}")]
    InInput { name: String, source: Box<Error> },
}

impl Error {
    /// Process exit code: 2 for internal invariant violations, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Internal(_) => 2,
            Error::InInput { source, .. } => source.exit_code(),
            _ => 1,
        }
    }
}

impl Error {
    /// Attaches the name of the offending input.
    pub fn named(self, name: &str) -> Self {
        Error::InInput { name: name.to_string(), source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
