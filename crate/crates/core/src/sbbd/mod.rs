//! Spanning bipartite block designs: design matrices over K_{v1,v2},
//! their information matrices, the three construction routes, and the
//! spanning-condition checks and repairs.
//!
//! An SB-block is one row of the design matrix: the 0/1 indicator of an
//! edge subset of K_{v1,v2}, columns in lexicographic edge order
//! e_11, ..., e_1v2; e_21, ... The matrix splits into v1 slabs X_i of
//! width v2, one per left vertex.

mod classify;
mod construct;
mod repair;
mod tiles;

pub use classify::{
    check_spanning, classify_information_matrix, gdd_to_sbbd, information_matrix, verify_sbbd,
};
pub use construct::{
    construct_decomposed, construct_single, partition_blocks, partition_blocks_with_budget,
    BlockPartition, DecomposedConstruction, PartitionSpec, SingleConstruction,
};
pub use repair::{
    repair_spanning_dm, repair_spanning_dm_with_budget, repair_spanning_gdd,
    repair_spanning_gdd_with_budget, RepairFailure, DEFAULT_BUDGET,
};
pub use tiles::{paste, paste_rows, tiles_from_incidence, TileSet};

use std::fmt;

use ndarray::{s, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::report::Verdict;

/// Hard cap on design matrix rows and columns.
pub const MAX_DESIGN_SIDE: usize = 1 << 16;

/// N x (v1 v2) design matrix of N spanning subgraphs of K_{v1,v2}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DesignMatrix {
    entries: Array2<i64>,
    v1: usize,
    v2: usize,
}

impl DesignMatrix {
    pub fn new(entries: Array2<i64>, v1: usize, v2: usize) -> Result<Self> {
        if entries.nrows() == 0 || v1 == 0 || v2 == 0 {
            return Err(Error::EmptyMatrix);
        }
        if entries.nrows() > MAX_DESIGN_SIDE || entries.ncols() > MAX_DESIGN_SIDE {
            return Err(Error::MatrixTooLarge {
                rows: entries.nrows(),
                cols: entries.ncols(),
                cap: MAX_DESIGN_SIDE,
            });
        }
        if entries.ncols() != v1 * v2 {
            return Err(Error::BlockShapeMismatch {
                side: entries.ncols(),
                v1,
                v2,
            });
        }
        for ((row, col), &value) in entries.indexed_iter() {
            if value != 0 && value != 1 {
                return Err(Error::NotBinary { row, col, value });
            }
        }
        Ok(DesignMatrix { entries, v1, v2 })
    }

    /// Number of SB-blocks N.
    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn v1(&self) -> usize {
        self.v1
    }

    pub fn v2(&self) -> usize {
        self.v2
    }

    pub fn entries(&self) -> &Array2<i64> {
        &self.entries
    }

    /// Slab X_i: the v2 columns of left vertex i.
    pub fn slab(&self, i: usize) -> ArrayView2<'_, i64> {
        self.entries.slice(s![.., i * self.v2..(i + 1) * self.v2])
    }
}

/// Λ = (μ, λ12, λ21, λ22) of a doubly completely symmetric information
/// matrix: diagonal blocks μI + λ12(J-I), off-diagonal λ21I + λ22(J-I).
/// Entries of an actual information matrix are non-negative with μ ≥ λ12.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SbbdParams {
    pub mu: i64,
    pub lambda12: i64,
    pub lambda21: i64,
    pub lambda22: i64,
}

impl SbbdParams {
    /// GDD-type information matrices have λ21 = λ22.
    pub fn is_gdd_type(&self) -> bool {
        self.lambda21 == self.lambda22
    }

    pub fn as_array(&self) -> [i64; 4] {
        [self.mu, self.lambda12, self.lambda21, self.lambda22]
    }
}

impl fmt::Display for SbbdParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}, {}, {}, {})",
            self.mu, self.lambda12, self.lambda21, self.lambda22
        )
    }
}

/// First entry of an information matrix breaking the doubly completely
/// symmetric pattern, in row-major scan order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifyViolation {
    pub row: usize,
    pub col: usize,
    pub value: i64,
    pub expected: i64,
}

impl fmt::Display for ClassifyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "entry ({}, {}) is {}, the symmetric pattern requires {}",
            self.row, self.col, self.value, self.expected
        )
    }
}

/// Outcome of the two spanning conditions: rows of slabs that are all
/// zero, and zero entries of the slab sum X_1 + ... + X_{v1}.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SpanningReport {
    /// (SB-block row, slab index) pairs with an all-zero slab row.
    pub zero_rows: Vec<(usize, usize)>,
    /// (SB-block row, right vertex) cells where the slab sum is zero.
    pub uncovered: Vec<(usize, usize)>,
}

impl SpanningReport {
    pub fn passes(&self) -> bool {
        self.zero_rows.is_empty() && self.uncovered.is_empty()
    }
}

impl fmt::Display for SpanningReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passes() {
            return write!(f, "spanning conditions hold");
        }
        write!(
            f,
            "spanning fails: {} zero slab rows, {} uncovered cells",
            self.zero_rows.len(),
            self.uncovered.len()
        )?;
        if let Some((row, slab)) = self.zero_rows.first() {
            write!(f, "; first zero row: SB-block {row}, slab {slab}")?;
        }
        if let Some((row, point)) = self.uncovered.first() {
            write!(
                f,
                "; first uncovered cell: SB-block {row}, right vertex {point}"
            )?;
        }
        Ok(())
    }
}

/// Verdict classes of [`verify_sbbd`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SbbdClass {
    /// Information matrix classified and spanning holds.
    Sbbd,
    /// Information matrix classified, spanning fails.
    SbbdStar,
    /// Information matrix is not doubly completely symmetric.
    NotSbbd,
}

impl fmt::Display for SbbdClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SbbdClass::Sbbd => write!(f, "SBBD"),
            SbbdClass::SbbdStar => write!(f, "SBBD*"),
            SbbdClass::NotSbbd => write!(f, "not an SBBD"),
        }
    }
}

/// Full verification output: the design, its exact information matrix,
/// the classification verdict, and the spanning report.
#[derive(Debug, Clone)]
pub struct SbbdResult {
    pub design: DesignMatrix,
    pub info: Array2<i64>,
    pub classification: Verdict<SbbdParams, ClassifyViolation>,
    pub spanning: SpanningReport,
}

impl SbbdResult {
    pub fn class(&self) -> SbbdClass {
        match (&self.classification, self.spanning.passes()) {
            (Verdict::Pass(_), true) => SbbdClass::Sbbd,
            (Verdict::Pass(_), false) => SbbdClass::SbbdStar,
            (Verdict::Fail(_), _) => SbbdClass::NotSbbd,
        }
    }

    pub fn params(&self) -> Option<&SbbdParams> {
        self.classification.pass()
    }
}
