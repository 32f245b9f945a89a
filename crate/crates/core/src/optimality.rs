//! Eigenvalue analysis of classified information matrices.
//!
//! The E-criterion ranks designs by the smallest positive eigenvalue of
//! XᵗX, so everything here revolves around spectra: an exact closed form
//! for matrices in the four-parameter block pattern, a floating-point
//! eigensolver as an independent oracle, and the concurrence certificate
//! λ₂ = λ₁ + 1 for group divisible designs.

use std::fmt;

use nalgebra::DMatrix;
use ndarray::Array2;

use crate::error::{Error, Result};
use crate::incidence::GddParams;
use crate::sbbd::SbbdParams;

/// Exact eigenvalues with multiplicities, ascending, values distinct.
///
/// Matrices in the four-parameter pattern have integer spectra, so no
/// precision is lost. Multiplicities sum to the matrix side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenSpectrum {
    values: Vec<(i64, usize)>,
}

impl EigenSpectrum {
    fn from_pairs(pairs: &[(i64, usize)]) -> Self {
        let mut merged: std::collections::BTreeMap<i64, usize> = std::collections::BTreeMap::new();
        for &(value, mult) in pairs {
            if mult > 0 {
                *merged.entry(value).or_insert(0) += mult;
            }
        }
        EigenSpectrum {
            values: merged.into_iter().collect(),
        }
    }

    /// (eigenvalue, multiplicity) pairs in ascending eigenvalue order.
    pub fn values(&self) -> &[(i64, usize)] {
        &self.values
    }

    /// Side of the matrix the spectrum belongs to.
    pub fn side(&self) -> usize {
        self.values.iter().map(|&(_, m)| m).sum()
    }

    /// Sum of eigenvalue times multiplicity.
    pub fn trace(&self) -> i64 {
        self.values
            .iter()
            .map(|&(v, m)| v * m as i64)
            .sum()
    }

    /// Smallest eigenvalue strictly above zero, if any.
    pub fn min_positive(&self) -> Option<i64> {
        self.values.iter().map(|&(v, _)| v).find(|&v| v > 0)
    }

    /// Eigenvalues repeated by multiplicity, ascending. Mirrors the
    /// output shape of [`numeric_eigenvalues`] for comparisons.
    pub fn expand(&self) -> Vec<i64> {
        let mut out = Vec::with_capacity(self.side());
        for &(value, mult) in &self.values {
            out.extend(std::iter::repeat_n(value, mult));
        }
        out
    }
}

impl fmt::Display for EigenSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (value, mult)) in self.values.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{value} ×{mult}")?;
        }
        write!(f, "}}")
    }
}

/// Exact spectrum of the block pattern I ⊗ A + (J - I) ⊗ B with
/// A = μI + λ₁₂(J - I) and B = λ₂₁I + λ₂₂(J - I).
///
/// The matrix acts independently on the four Kronecker eigenspaces of
/// (J_{v1}, J_{v2}), giving four closed-form eigenvalues:
///
/// - both factors orthogonal to 1: (μ-λ₂₁) - (λ₁₂-λ₂₂), multiplicity (v₁-1)(v₂-1)
/// - right factor the all-ones vector: (μ-λ₂₁) + (v₂-1)(λ₁₂-λ₂₂), multiplicity v₁-1
/// - left factor the all-ones vector: (μ-λ₂₁) - (λ₁₂-λ₂₂) + v₁(λ₂₁-λ₂₂), multiplicity v₂-1
/// - the all-ones vector itself: the constant row sum, multiplicity 1
pub fn cs2_eigenvalues(p: &SbbdParams, v1: usize, v2: usize) -> Result<EigenSpectrum> {
    if v1 < 2 || v2 < 2 {
        return Err(Error::DegenerateShape { v1, v2 });
    }
    let (n1, n2) = (v1 as i64, v2 as i64);
    let within = p.mu - p.lambda21;
    let spread = p.lambda12 - p.lambda22;
    let theta_both = within - spread;
    let theta_right = within + (n2 - 1) * spread;
    let theta_left = theta_both + n1 * (p.lambda21 - p.lambda22);
    let theta_ones = theta_right + n1 * (p.lambda21 + (n2 - 1) * p.lambda22);
    Ok(EigenSpectrum::from_pairs(&[
        (theta_both, (v1 - 1) * (v2 - 1)),
        (theta_right, v1 - 1),
        (theta_left, v2 - 1),
        (theta_ones, 1),
    ]))
}

/// Floating-point eigenvalues of a symmetric integer matrix, ascending.
///
/// This is the oracle side: it sees only matrix entries, never the four
/// parameters, so agreement with [`cs2_eigenvalues`] is evidence and not
/// circularity.
pub fn numeric_eigenvalues(m: &Array2<i64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let n = m.nrows();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    for r in 0..n {
        for c in (r + 1)..n {
            if m[(r, c)] != m[(c, r)] {
                return Err(Error::NotSymmetric { row: r, col: c });
            }
        }
    }
    let dense = DMatrix::from_fn(n, n, |r, c| m[(r, c)] as f64);
    let mut values: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Smallest eigenvalue strictly above the zero tolerance, which is set
/// to 1e-9 times the spectral radius. Rounding noise on true zeros sits
/// far below that for integer matrices of supported size.
pub fn min_positive_eigenvalue(m: &Array2<i64>) -> Result<f64> {
    let values = numeric_eigenvalues(m)?;
    let radius = values.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    let tol = 1e-9 * radius;
    values
        .into_iter()
        .find(|&v| v > tol)
        .ok_or(Error::DegenerateSpectrum)
}

/// Concurrence certificate: a group divisible design whose second
/// concurrence exceeds the first by exactly one maximizes the minimum
/// information-matrix eigenvalue over equally sized competitors. The
/// flag transfers to the design matrix built from the GDD, because that
/// construction reuses the same information matrix.
pub fn e_optimal_gdd(params: &GddParams) -> bool {
    params.lambda2 == params.lambda1 + 1
}
