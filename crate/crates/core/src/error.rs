//! Structural errors shared across the crate.
//!
//! Errors cover malformed inputs and broken preconditions only. A design
//! that is well formed but fails a defining property is not an error;
//! verifiers report that through [`crate::report::Verdict::Fail`].

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group structure must list at least one cyclic factor")]
    EmptyGroupStructure,

    #[error("group factor {index} has order 0")]
    ZeroGroupFactor { index: usize },

    #[error("group order {order} exceeds the supported cap of {cap}")]
    GroupTooLarge { order: u128, cap: u64 },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("field order {q} exceeds the supported cap of {cap}")]
    FieldTooLarge { q: u128, cap: u64 },

    #[error("element has {got} coordinates, group has rank {expected}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("coordinate {index} is {value}, outside the cyclic factor of order {order}")]
    CoordinateRange {
        index: usize,
        value: u32,
        order: u32,
    },

    #[error("index {index} out of range for order {order}")]
    IndexRange { index: usize, order: usize },

    #[error("matrix entry at row {row}, column {col} is {value}; expected 0 or 1")]
    NotBinary { row: usize, col: usize, value: i64 },

    #[error("matrix must be non-empty")]
    EmptyMatrix,

    #[error("design needs at least {min} points, got {got}")]
    TooFewPoints { min: usize, got: usize },

    #[error("incidence matrix has {rows} rows x {cols} columns, exceeding the cap of {cap}")]
    MatrixTooLarge { rows: usize, cols: usize, cap: usize },

    #[error("invalid group partition: {0}")]
    InvalidPartition(String),

    #[error("grouped design needs at least two groups")]
    DegenerateGroups,

    #[error("difference matrix needs at least 2 columns, got {got}")]
    TooFewColumns { got: usize },

    #[error("difference matrix row {row} has {got} entries, expected {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("difference matrix has {rows} rows, not a multiple of the group order {order}")]
    RowCountNotMultiple { rows: usize, order: usize },

    #[error("block sizes are not constant ({first} vs {second}); check requires a uniform block size")]
    NonConstantBlockSize { first: usize, second: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is {rows} x {cols}; eigenvalue analysis needs a square matrix")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix of side {side} does not factor as v1 x v2 = {v1} x {v2}")]
    BlockShapeMismatch { side: usize, v1: usize, v2: usize },

    #[error("design matrix has {cols} columns, not divisible into v1 = {v1} slabs")]
    SlabMismatch { cols: usize, v1: usize },

    #[error("{what} has {got} rows, but the group has order {expected}")]
    RowCountMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("row map must be a permutation of 0..{order} fixing 0, got {detail}")]
    BadRowMap { order: usize, detail: String },

    #[error("{what} failed to verify: {detail}")]
    NotVerified { what: &'static str, detail: String },

    #[error("difference matrices disagree on {what}: {first} vs {second}")]
    MixedCells {
        what: &'static str,
        first: usize,
        second: usize,
    },

    #[error("partition spec sizes sum to {got}, design has {expected} blocks")]
    PartitionSizeSum { expected: usize, got: usize },

    #[error("search budget of {budget} nodes exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("no equitable block partition found: {detail}")]
    NoPartition { detail: String },

    #[error("tile group has order {tiles}, difference matrix group has order {dm}")]
    GroupOrderMismatch { tiles: usize, dm: usize },

    #[error("all eigenvalues are at or below the zero tolerance; spectrum is degenerate")]
    DegenerateSpectrum,

    #[error("bipartite shape must have v1 >= 2 and v2 >= 2, got {v1} x {v2}")]
    DegenerateShape { v1: usize, v2: usize },

    #[error("cannot parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
