//! Incidence matrices of block designs and their verifiers.
//!
//! Rows are blocks, columns are points, entries are 0/1 in exact integer
//! arithmetic. Verification of the (r,λ) and group divisible properties,
//! difference matrices over finite abelian groups, and the classical
//! ingredient constructions all live here.

mod dm;
mod generators;
mod verify;

pub use dm::{verify_difference_matrix, DifferenceMatrix, DmViolation};
pub use generators::{
    ag_hyperplane_gdd, complement, complement_gdd_params, complement_r_lambda_params,
    develop_difference_set, field_of_order, mult_table_dm, paley_difference_set,
    transversal_design,
};
pub use verify::{
    bose_connor_check, verify_gdd, verify_r_lambda, BoseConnorViolation, GddParams, GddViolation,
    GroupedDesign, RLambdaParams, RLambdaViolation,
};

use ndarray::Array2;

use crate::error::{Error, Result};

/// Hard cap on incidence matrix rows and columns.
pub const MAX_SIDE: usize = 4096;

/// Dense 0/1 block-point incidence matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    data: Array2<i64>,
    labels: Option<Vec<String>>,
}

impl IncidenceMatrix {
    /// Wraps a dense matrix, validating every entry is 0 or 1.
    pub fn new(data: Array2<i64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.nrows() > MAX_SIDE || data.ncols() > MAX_SIDE {
            return Err(Error::MatrixTooLarge {
                rows: data.nrows(),
                cols: data.ncols(),
                cap: MAX_SIDE,
            });
        }
        for ((row, col), &value) in data.indexed_iter() {
            if value != 0 && value != 1 {
                return Err(Error::NotBinary { row, col, value });
            }
        }
        Ok(IncidenceMatrix { data, labels: None })
    }

    /// Builds the matrix whose rows are the given blocks over `points` columns.
    pub fn from_blocks(points: usize, blocks: &[Vec<usize>]) -> Result<Self> {
        if points == 0 || blocks.is_empty() {
            return Err(Error::EmptyMatrix);
        }
        let mut data = Array2::zeros((blocks.len(), points));
        for (row, block) in blocks.iter().enumerate() {
            for &point in block {
                if point >= points {
                    return Err(Error::IndexRange {
                        index: point,
                        order: points,
                    });
                }
                if data[(row, point)] == 1 {
                    return Err(Error::Parse {
                        what: "block",
                        detail: format!("block {row} lists point {point} twice"),
                    });
                }
                data[(row, point)] = 1;
            }
        }
        IncidenceMatrix::new(data)
    }

    /// Attaches one display label per block row.
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.rows() {
            return Err(Error::RowCountMismatch {
                what: "label list",
                expected: self.rows(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    /// Number of points (columns).
    pub fn points(&self) -> usize {
        self.data.ncols()
    }

    pub fn data(&self) -> &Array2<i64> {
        &self.data
    }

    pub fn label(&self, row: usize) -> String {
        match &self.labels {
            Some(labels) => labels[row].clone(),
            None => format!("block {row}"),
        }
    }

    /// Points of the block in row `row`, ascending.
    pub fn block(&self, row: usize) -> Vec<usize> {
        self.data
            .row(row)
            .iter()
            .enumerate()
            .filter(|(_, &e)| e == 1)
            .map(|(col, _)| col)
            .collect()
    }

    /// All blocks as point sets, in row order.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        (0..self.rows()).map(|r| self.block(r)).collect()
    }

    /// Replication count of one point.
    pub fn column_sum(&self, col: usize) -> i64 {
        self.data.column(col).sum()
    }

    /// Number of blocks containing both points.
    pub fn pair_count(&self, a: usize, b: usize) -> i64 {
        self.data
            .column(a)
            .iter()
            .zip(self.data.column(b))
            .map(|(&x, &y)| x * y)
            .sum()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        (0..self.rows())
            .map(|r| self.data.row(r).sum() as usize)
            .collect()
    }

    /// Rows of all-zero (empty) and all-one (full) blocks, for degeneracy notes.
    pub fn degenerate_blocks(&self) -> (Vec<usize>, Vec<usize>) {
        let v = self.points() as i64;
        let mut empty = Vec::new();
        let mut full = Vec::new();
        for r in 0..self.rows() {
            let size = self.data.row(r).sum();
            if size == 0 {
                empty.push(r);
            } else if size == v {
                full.push(r);
            }
        }
        (empty, full)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn from_blocks_round_trips() {
        let h = IncidenceMatrix::from_blocks(4, &[vec![0, 2], vec![1, 3], vec![0, 1, 2, 3]])
            .unwrap();
        assert_eq!(h.blocks(), vec![vec![0, 2], vec![1, 3], vec![0, 1, 2, 3]]);
        assert_eq!(h.block_sizes(), vec![2, 2, 4]);
        assert_eq!(h.column_sum(0), 2);
        assert_eq!(h.pair_count(0, 2), 2);
        let (empty, full) = h.degenerate_blocks();
        assert!(empty.is_empty());
        assert_eq!(full, vec![2]);
    }

    #[test]
    fn rejects_non_binary_entries() {
        let bad = array![[0, 2], [1, 0]];
        assert!(matches!(
            IncidenceMatrix::new(bad),
            Err(Error::NotBinary { row: 0, col: 1, value: 2 })
        ));
    }

    #[test]
    fn rejects_out_of_range_point() {
        assert!(matches!(
            IncidenceMatrix::from_blocks(3, &[vec![0, 3]]),
            Err(Error::IndexRange { index: 3, order: 3 })
        ));
    }
}
