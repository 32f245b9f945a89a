//! Difference matrices over finite abelian groups.
//!
//! A (b, s; η)-difference matrix over a group E of order b has ηb rows and
//! s columns of group elements such that for every ordered pair of distinct
//! columns, the row-wise differences cover every element of E exactly η
//! times. Negation maps the differences of (i, j) onto those of (j, i), so
//! scanning unordered pairs suffices.

use std::fmt;

use crate::algebra::{FiniteGroup, GroupElement};
use crate::error::{Error, Result};
use crate::report::Verdict;

/// A verified (b, s; η)-difference matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceMatrix {
    group: FiniteGroup,
    entries: Vec<Vec<GroupElement>>,
    eta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DmViolation {
    /// First column pair (lexicographic, i < j) whose differences are not
    /// η-uniform.
    pub col_pair: (usize, usize),
    /// First element in canonical order with a wrong count.
    pub element: GroupElement,
    pub count: usize,
    pub expected: usize,
}

impl fmt::Display for DmViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "columns ({}, {}): difference {} occurs {} times, expected η = {}",
            self.col_pair.0, self.col_pair.1, self.element, self.count, self.expected
        )
    }
}

/// Checks the difference property and wraps the entries on success.
pub fn verify_difference_matrix(
    group: &FiniteGroup,
    entries: &[Vec<GroupElement>],
) -> Result<Verdict<DifferenceMatrix, DmViolation>> {
    let b = group.order();
    let rows = entries.len();
    if rows == 0 || !rows.is_multiple_of(b) {
        return Err(Error::RowCountNotMultiple { rows, order: b });
    }
    let eta = rows / b;
    let s = entries[0].len();
    if s < 2 {
        return Err(Error::TooFewColumns { got: s });
    }
    for (row, entry_row) in entries.iter().enumerate() {
        if entry_row.len() != s {
            return Err(Error::RaggedRow {
                row,
                expected: s,
                got: entry_row.len(),
            });
        }
        for e in entry_row {
            if !group.contains(e) {
                return Err(Error::ArityMismatch {
                    expected: group.rank(),
                    got: e.coords().len(),
                });
            }
        }
    }

    for i in 0..s {
        for j in (i + 1)..s {
            let mut counts = vec![0usize; b];
            for entry_row in entries {
                let diff = group.sub(&entry_row[i], &entry_row[j])?;
                counts[group.index_of(&diff)?] += 1;
            }
            for (index, &count) in counts.iter().enumerate() {
                if count != eta {
                    return Ok(Verdict::Fail(DmViolation {
                        col_pair: (i, j),
                        element: group.element(index)?,
                        count,
                        expected: eta,
                    }));
                }
            }
        }
    }

    Ok(Verdict::Pass(DifferenceMatrix {
        group: group.clone(),
        entries: entries.to_vec(),
        eta,
    }))
}

impl DifferenceMatrix {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn entries(&self) -> &[Vec<GroupElement>] {
        &self.entries
    }

    /// Group order b.
    pub fn b(&self) -> usize {
        self.group.order()
    }

    /// Number of columns s.
    pub fn s(&self) -> usize {
        self.entries[0].len()
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    /// Adds `c` to every entry of column `col`. Differences not involving
    /// `col` are untouched and those involving it are translated by a
    /// constant, so the difference property survives.
    pub fn shift_column(&self, col: usize, c: &GroupElement) -> Result<DifferenceMatrix> {
        if col >= self.s() {
            return Err(Error::IndexRange {
                index: col,
                order: self.s(),
            });
        }
        let mut entries = self.entries.clone();
        for row in entries.iter_mut() {
            row[col] = self.group.add(&row[col], c)?;
        }
        match verify_difference_matrix(&self.group, &entries)? {
            Verdict::Pass(dm) => Ok(dm),
            Verdict::Fail(v) => unreachable!("column shift broke the difference property: {v}"),
        }
    }

    /// Applies one shift per column.
    pub fn shift_columns(&self, shifts: &[GroupElement]) -> Result<DifferenceMatrix> {
        if shifts.len() != self.s() {
            return Err(Error::RowCountMismatch {
                what: "shift vector",
                expected: self.s(),
                got: shifts.len(),
            });
        }
        let mut dm = self.clone();
        for (col, c) in shifts.iter().enumerate() {
            dm = dm.shift_column(col, c)?;
        }
        Ok(dm)
    }

    /// Keeps the first `s` columns. Any column subset of a difference
    /// matrix is again one.
    pub fn take_columns(&self, s: usize) -> Result<DifferenceMatrix> {
        if s < 2 {
            return Err(Error::TooFewColumns { got: s });
        }
        if s > self.s() {
            return Err(Error::IndexRange {
                index: s,
                order: self.s() + 1,
            });
        }
        let entries: Vec<Vec<GroupElement>> = self
            .entries
            .iter()
            .map(|row| row[..s].to_vec())
            .collect();
        match verify_difference_matrix(&self.group, &entries)? {
            Verdict::Pass(dm) => Ok(dm),
            Verdict::Fail(v) => unreachable!("column restriction broke the difference property: {v}"),
        }
    }
}
