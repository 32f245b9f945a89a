//! Constructions of the classical ingredients: developed difference sets,
//! complements, multiplication-table difference matrices, and the two
//! geometric GDD families (affine hyperplanes and transversal designs).

use super::dm::{verify_difference_matrix, DifferenceMatrix};
use super::verify::{GddParams, GroupedDesign, RLambdaParams};
use super::IncidenceMatrix;
use crate::algebra::{FiniteField, GroupElement};
use crate::error::{Error, Result};
use crate::report::Verdict;

/// Develops a difference set modulo n: block t is {x + t : x in base}.
pub fn develop_difference_set(base: &[u64], n: u64) -> Result<IncidenceMatrix> {
    if n < 2 {
        return Err(Error::TooFewPoints {
            min: 2,
            got: n as usize,
        });
    }
    let mut blocks = Vec::with_capacity(n as usize);
    for t in 0..n {
        let block: Vec<usize> = base
            .iter()
            .map(|&x| {
                if x >= n {
                    Err(Error::IndexRange {
                        index: x as usize,
                        order: n as usize,
                    })
                } else {
                    Ok(((x + t) % n) as usize)
                }
            })
            .collect::<Result<_>>()?;
        blocks.push(block);
    }
    IncidenceMatrix::from_blocks(n as usize, &blocks)
}

/// Quadratic residues modulo a prime q ≡ 3 (mod 4), the Paley difference
/// set giving a ((q-1)/2, (q-3)/4) symmetric design when developed.
pub fn paley_difference_set(q: u64) -> Result<Vec<u64>> {
    if q % 4 != 3 {
        return Err(Error::Parse {
            what: "Paley parameter",
            detail: format!("{q} is not congruent to 3 mod 4"),
        });
    }
    // Primality via the same trial division the field code uses.
    if FiniteField::new(u32::try_from(q).map_err(|_| Error::FieldTooLarge {
        q: u128::from(q),
        cap: crate::algebra::MAX_ORDER,
    })?, 1)
    .is_err()
    {
        return Err(Error::NotPrime(q));
    }
    let mut residues: Vec<u64> = (1..q).map(|i| i * i % q).collect();
    residues.sort_unstable();
    residues.dedup();
    Ok(residues)
}

/// Entrywise complement: block B becomes V \ B.
pub fn complement(h: &IncidenceMatrix) -> Result<IncidenceMatrix> {
    IncidenceMatrix::new(h.data().mapv(|e| 1 - e))
}

/// Parameters of the complement of an (r,λ)-design on `points` points
/// with `blocks` blocks: r' = N - r and λ' = N - 2r + λ.
pub fn complement_r_lambda_params(
    params: &RLambdaParams,
    blocks: usize,
    points: usize,
) -> Result<RLambdaParams> {
    let n = blocks as u64;
    let r = n.checked_sub(params.r).ok_or(Error::Parse {
        what: "complement parameters",
        detail: format!("r = {} exceeds block count {n}", params.r),
    })?;
    let lambda = (n + params.lambda).checked_sub(2 * params.r).ok_or(Error::Parse {
        what: "complement parameters",
        detail: format!("N - 2r + λ is negative for N = {n}, r = {}, λ = {}", params.r, params.lambda),
    })?;
    Ok(RLambdaParams {
        r,
        lambda,
        k_set: params.k_set.iter().map(|&k| points - k).collect(),
    })
}

/// Parameters of the complement of a GDD: both concurrences shift by
/// N - 2r, groups are unchanged.
pub fn complement_gdd_params(params: &GddParams, blocks: usize) -> Result<GddParams> {
    let n = blocks as u64;
    let r = n.checked_sub(params.r).ok_or(Error::Parse {
        what: "complement parameters",
        detail: format!("r = {} exceeds block count {n}", params.r),
    })?;
    let shift = |lambda: u64| -> Result<u64> {
        (n + lambda).checked_sub(2 * params.r).ok_or(Error::Parse {
            what: "complement parameters",
            detail: format!("N - 2r + λ is negative for N = {n}, r = {}, λ = {lambda}", params.r),
        })
    };
    Ok(GddParams {
        lambda1: shift(params.lambda1)?,
        lambda2: shift(params.lambda2)?,
        r,
        k_set: params.k_set.iter().map(|&k| (params.m * params.g) - k).collect(),
        m: params.m,
        g: params.g,
    })
}

/// The (q, q; 1)-difference matrix over the additive group of GF(q):
/// entry (i, j) is the field product of the i-th and j-th field elements.
///
/// Column differences for columns j, j' are x_i (x_j - x_j'), a bijection
/// of the field as x_i varies, so every pair covers each element once.
pub fn mult_table_dm(field: &FiniteField) -> Result<DifferenceMatrix> {
    let els = field.elements();
    let mut entries = Vec::with_capacity(els.len());
    for a in &els {
        let mut row = Vec::with_capacity(els.len());
        for b in &els {
            row.push(field.mul(a, b)?);
        }
        entries.push(row);
    }
    match verify_difference_matrix(field.additive_group(), &entries)? {
        Verdict::Pass(dm) => Ok(dm),
        Verdict::Fail(v) => unreachable!("multiplication table is always a DM: {v}"),
    }
}

fn prime_power_split(q: u32) -> Result<(u32, u32)> {
    if q < 2 {
        return Err(Error::NotPrime(u64::from(q)));
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut k = 0;
            let mut rest = q;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            if rest != 1 {
                return Err(Error::NotPrime(u64::from(q)));
            }
            return Ok((p, k));
        }
        p += 1;
    }
    Ok((q, 1)) // q itself is prime
}

/// Finite field of prime power order q with the canonical modulus.
pub fn field_of_order(q: u32) -> Result<FiniteField> {
    let (p, k) = prime_power_split(q)?;
    FiniteField::new(p, k)
}

fn dot(field: &FiniteField, a: &[GroupElement], x: &[GroupElement]) -> Result<GroupElement> {
    let mut acc = field.zero();
    for (ai, xi) in a.iter().zip(x) {
        acc = field.add(&acc, &field.mul(ai, xi)?)?;
    }
    Ok(acc)
}

/// GDD from the affine geometry AG(n, q): points are vectors of GF(q)^n,
/// groups are the parallel class of hyperplanes x_1 = c, and blocks are
/// all hyperplanes outside that class. The result has m = q groups of
/// size q^{n-1}, λ1 = (q^{n-1} - q)/(q - 1) and λ2 = (q^{n-1} - 1)/(q - 1).
pub fn ag_hyperplane_gdd(n: u32, q: u32) -> Result<GroupedDesign> {
    if n < 2 {
        return Err(Error::TooFewPoints {
            min: 2,
            got: n as usize,
        });
    }
    let field = field_of_order(q)?;
    let v = (q as u128).pow(n);
    if v > super::MAX_SIDE as u128 {
        return Err(Error::MatrixTooLarge {
            rows: v as usize,
            cols: v as usize,
            cap: super::MAX_SIDE,
        });
    }
    let v = v as usize;
    let n = n as usize;
    let els = field.elements();
    let q_us = q as usize;

    // Point index: base-q digits of the coordinate values, first
    // coordinate most significant.
    let point_coords = |index: usize| -> Vec<GroupElement> {
        let mut digits = vec![0usize; n];
        let mut rest = index;
        for d in digits.iter_mut().rev() {
            *d = rest % q_us;
            rest /= q_us;
        }
        digits.into_iter().map(|d| els[d].clone()).collect()
    };
    let points: Vec<Vec<GroupElement>> = (0..v).map(point_coords).collect();

    // Normals with first nonzero coordinate 1, in lexicographic order of
    // value tuples; (1, 0, ..., 0) is the group class.
    let mut normals = Vec::new();
    for index in 1..v {
        let coords = point_coords(index);
        let first = coords
            .iter()
            .find(|c| **c != field.zero())
            .expect("nonzero vector");
        if *first == field.one() {
            normals.push(coords);
        }
    }
    let group_normal: Vec<GroupElement> = {
        let mut g = vec![field.zero(); n];
        g[0] = field.one();
        g
    };

    let mut blocks = Vec::new();
    for normal in &normals {
        if *normal == group_normal {
            continue;
        }
        for c in &els {
            let block: Vec<usize> = (0..v)
                .filter(|&i| dot(&field, normal, &points[i]).map(|d| d == *c).unwrap_or(false))
                .collect();
            blocks.push(block);
        }
    }
    let incidence = IncidenceMatrix::from_blocks(v, &blocks)?;

    let groups: Vec<Vec<usize>> = els
        .iter()
        .map(|c| {
            (0..v)
                .filter(|&i| points[i][0] == *c)
                .collect()
        })
        .collect();
    GroupedDesign::new(incidence, groups)
}

/// Transversal design TD(q+1, q) as a GDD: q+1 groups of size q, q²
/// blocks meeting every group exactly once, λ1 = 0, λ2 = 1.
///
/// Block (a, b) holds level a·γ + b in the group of slope γ plus level a
/// in the last group.
pub fn transversal_design(q: u32) -> Result<GroupedDesign> {
    let field = field_of_order(q)?;
    let els = field.elements();
    let q_us = q as usize;
    let v = q_us * (q_us + 1);
    if v > super::MAX_SIDE {
        return Err(Error::MatrixTooLarge {
            rows: q_us * q_us,
            cols: v,
            cap: super::MAX_SIDE,
        });
    }

    let mut blocks = Vec::with_capacity(q_us * q_us);
    for a in &els {
        for b in &els {
            let mut block = Vec::with_capacity(q_us + 1);
            for (c, gamma) in els.iter().enumerate() {
                let level = field.add(&field.mul(a, gamma)?, b)?;
                block.push(c * q_us + field.value_of(&level)?);
            }
            block.push(q_us * q_us + field.value_of(a)?);
            blocks.push(block);
        }
    }
    let incidence = IncidenceMatrix::from_blocks(v, &blocks)?;
    let groups: Vec<Vec<usize>> = (0..=q_us)
        .map(|i| (i * q_us..(i + 1) * q_us).collect())
        .collect();
    GroupedDesign::new(incidence, groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::incidence::verify::{bose_connor_check, verify_gdd, verify_r_lambda};

    #[test]
    fn develop_fano() {
        let h = develop_difference_set(&[1, 2, 4], 7).unwrap();
        assert_eq!(h.rows(), 7);
        assert_eq!(h.block(0), vec![1, 2, 4]);
        assert_eq!(h.block(3), vec![0, 4, 5]);
        let params = verify_r_lambda(&h).unwrap().expect_pass("fano");
        assert_eq!((params.r, params.lambda), (3, 1));
    }

    #[test]
    fn develop_rejects_out_of_range_base() {
        assert!(develop_difference_set(&[0, 7], 7).is_err());
    }

    #[test]
    fn paley_sets_develop_to_designs() {
        for (q, lambda) in [(7u64, 1u64), (11, 2), (19, 4), (23, 5)] {
            let base = paley_difference_set(q).unwrap();
            assert_eq!(base.len() as u64, (q - 1) / 2);
            let h = develop_difference_set(&base, q).unwrap();
            let params = verify_r_lambda(&h).unwrap().expect_pass("paley");
            assert_eq!(params.r, (q - 1) / 2);
            assert_eq!(params.lambda, lambda);
        }
        assert!(paley_difference_set(13).is_err()); // 13 ≡ 1 mod 4
        assert!(paley_difference_set(15).is_err()); // not prime
    }

    #[test]
    fn complement_of_fano_is_7_4_2() {
        let h = develop_difference_set(&[1, 2, 4], 7).unwrap();
        let params = verify_r_lambda(&h).unwrap().expect_pass("fano");
        let hc = complement(&h).unwrap();
        let got = verify_r_lambda(&hc).unwrap().expect_pass("complement");
        let predicted = complement_r_lambda_params(&params, h.rows(), h.points()).unwrap();
        assert_eq!(got, predicted);
        assert_eq!((got.r, got.lambda), (4, 2));
        // Complementing twice returns the original matrix.
        assert_eq!(complement(&hc).unwrap(), h);
    }

    #[test]
    fn gf8_mult_table_shape() {
        let field = FiniteField::new(2, 3).unwrap();
        let dm = mult_table_dm(&field).unwrap();
        assert_eq!((dm.b(), dm.s(), dm.eta()), (8, 8, 1));
        // Row 0 and column 0 are identities.
        assert!(dm.entries()[0].iter().all(|e| *e == field.zero()));
        assert!(dm.entries().iter().all(|row| row[0] == field.zero()));
    }

    #[test]
    fn ag_2_3_is_gd_0_1() {
        let d = ag_hyperplane_gdd(2, 3).unwrap();
        assert_eq!((d.m(), d.g()), (3, 3));
        assert_eq!(d.incidence().rows(), 9); // 12 lines minus the group class
        let params = verify_gdd(&d).unwrap().expect_pass("AG(2,3)");
        assert_eq!((params.lambda1, params.lambda2, params.r), (0, 1, 3));
        assert!(bose_connor_check(&params, 9).unwrap().is_pass());
    }

    #[test]
    fn ag_2_2_exhaustive_line_count() {
        let d = ag_hyperplane_gdd(2, 2).unwrap();
        // 6 lines of AG(2,2) total, 2 in the group class.
        assert_eq!(d.incidence().rows(), 4);
        let params = verify_gdd(&d).unwrap().expect_pass("AG(2,2)");
        assert_eq!((params.lambda1, params.lambda2, params.r), (0, 1, 2));
    }

    #[test]
    fn ag_hyperplane_lambda_formulas() {
        for (n, q) in [(2u32, 2u32), (2, 3), (3, 2), (3, 3), (2, 4)] {
            let d = ag_hyperplane_gdd(n, q).unwrap();
            let params = verify_gdd(&d).unwrap().expect_pass("AG(n,q)");
            let qp = u64::from(q).pow(n - 1);
            let qe = u64::from(q);
            assert_eq!(params.lambda1, (qp - qe) / (qe - 1), "λ1 for AG({n},{q})");
            assert_eq!(params.lambda2, (qp - 1) / (qe - 1), "λ2 for AG({n},{q})");
            assert_eq!(params.m, q as usize);
            assert_eq!(params.g, qp as usize);
            assert!(bose_connor_check(&params, d.incidence().rows())
                .unwrap()
                .is_pass());
        }
    }

    #[test]
    fn transversal_design_parameters() {
        for q in [2u32, 3, 4, 5] {
            let d = transversal_design(q).unwrap();
            assert_eq!((d.m(), d.g()), (q as usize + 1, q as usize));
            assert_eq!(d.incidence().rows(), (q * q) as usize);
            let params = verify_gdd(&d).unwrap().expect_pass("TD(q+1, q)");
            assert_eq!((params.lambda1, params.lambda2), (0, 1));
            assert_eq!(params.r, u64::from(q));
            assert!(bose_connor_check(&params, d.incidence().rows())
                .unwrap()
                .is_pass());
        }
    }
}
