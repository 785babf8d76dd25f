use thiserror::Error;

/// Errors raised by the toric period library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("charge matrix must have 1 <= n <= N, got {rows}x{cols}")]
    BadShape { rows: usize, cols: usize },

    #[error("charge matrix row {row} has {found} entries, expected {expected}")]
    RaggedMatrix {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("charge matrix entry ({row}, {col}) = {value} is negative; only nonnegative charges are supported")]
    NegativeEntry { row: usize, col: usize, value: i64 },

    #[error("charge matrix rows are linearly dependent (rank {rank} < {rows})")]
    RankDeficient { rank: usize, rows: usize },

    #[error("kernel dimension {dim} exceeds the supported bound {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("Gram matrix m m^T is singular")]
    SingularGram,

    #[error("period integral does not converge: the kernel of m contains a nonzero nonnegative vector")]
    NotIntegrable,

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds target {target:e}")]
    NotConverged { estimate: f64, target: f64 },

    #[error("step factor P_{alpha}({multi_index:?}) vanishes (|P| = {modulus:e})")]
    ResonantParameters {
        alpha: usize,
        multi_index: Vec<usize>,
        modulus: f64,
    },

    #[error("finite-difference stencil at {index:?} leaves the sampled grid")]
    StencilOutOfRange { index: Vec<usize> },

    #[error("{what}: expected length {expected}, found {found}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            what,
            expected,
            found,
        })
    }
}
