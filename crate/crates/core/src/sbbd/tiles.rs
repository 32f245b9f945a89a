//! Tiles of an incidence matrix under a group action, and the paste
//! operation that assembles a design matrix from tiles and a difference
//! matrix.

use ndarray::{Array2, ArrayView1};

use crate::algebra::{FiniteGroup, GroupElement};
use crate::error::{Error, Result};
use crate::incidence::IncidenceMatrix;

use super::{DesignMatrix, MAX_DESIGN_SIDE};

/// Rows of an incidence matrix H indexed by a group of the same order.
///
/// Tile T_y is the b x v matrix whose i-th row is the H row assigned to
/// x_i + y, where x_i is the i-th group element. Tiles satisfy
/// T_x^t T_y = T_{x+d}^t T_{y+d} for every shift d, and for fixed x the
/// sum of T_x^t T_y over all y is r^2 J.
#[derive(Debug, Clone)]
pub struct TileSet {
    group: FiniteGroup,
    incidence: IncidenceMatrix,
    /// row_map[e] is the H row assigned to group element index e.
    row_map: Vec<usize>,
}

impl TileSet {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn incidence(&self) -> &IncidenceMatrix {
        &self.incidence
    }

    pub fn row_map(&self) -> &[usize] {
        &self.row_map
    }

    /// Tile count, block count of H, and group order, all equal.
    pub fn b(&self) -> usize {
        self.row_map.len()
    }

    pub fn points(&self) -> usize {
        self.incidence.points()
    }

    /// H row index placed at position `i` of tile `y` (both element indices).
    pub fn entry_row(&self, i: usize, y: usize) -> usize {
        let shifted = self
            .group
            .add(
                &self.group.element(i).expect("index in range"),
                &self.group.element(y).expect("index in range"),
            )
            .expect("elements of own group");
        let idx = self.group.index_of(&shifted).expect("sum stays in group");
        self.row_map[idx]
    }

    /// Row i of tile y as a view into H.
    pub fn row(&self, i: usize, y: usize) -> ArrayView1<'_, i64> {
        self.incidence.data().row(self.entry_row(i, y))
    }

    /// Materialize tile T_y by element index.
    pub fn tile_by_index(&self, y: usize) -> Result<Array2<i64>> {
        let b = self.b();
        if y >= b {
            return Err(Error::IndexRange { index: y, order: b });
        }
        let v = self.points();
        let mut t = Array2::zeros((b, v));
        for i in 0..b {
            t.row_mut(i).assign(&self.row(i, y));
        }
        Ok(t)
    }

    /// Materialize tile T_y.
    pub fn tile(&self, y: &GroupElement) -> Result<Array2<i64>> {
        self.tile_by_index(self.group.index_of(y)?)
    }

    /// All b tiles in element order. Intended for small b.
    pub fn tiles(&self) -> Result<Vec<Array2<i64>>> {
        (0..self.b()).map(|y| self.tile_by_index(y)).collect()
    }
}

/// Build the tile set of H under `group`.
///
/// `row_map` assigns an H row to each group element index; it must be a
/// bijection sending the identity (index 0) to row 0. `None` means the
/// natural order: element index i gets row i.
pub fn tiles_from_incidence(
    h: &IncidenceMatrix,
    group: &FiniteGroup,
    row_map: Option<&[usize]>,
) -> Result<TileSet> {
    let b = h.rows();
    if group.order() != b {
        return Err(Error::RowCountMismatch {
            what: "tile source incidence matrix",
            expected: group.order(),
            got: b,
        });
    }
    let map: Vec<usize> = match row_map {
        None => (0..b).collect(),
        Some(m) => {
            if m.len() != b {
                return Err(Error::BadRowMap {
                    order: b,
                    detail: format!("map has {} entries", m.len()),
                });
            }
            let mut seen = vec![false; b];
            for &row in m {
                if row >= b {
                    return Err(Error::BadRowMap {
                        order: b,
                        detail: format!("row {row} out of range"),
                    });
                }
                if seen[row] {
                    return Err(Error::BadRowMap {
                        order: b,
                        detail: format!("row {row} assigned twice"),
                    });
                }
                seen[row] = true;
            }
            if m[0] != 0 {
                return Err(Error::BadRowMap {
                    order: b,
                    detail: format!("identity must map to row 0, got {}", m[0]),
                });
            }
            m.to_vec()
        }
    };
    Ok(TileSet {
        group: group.clone(),
        incidence: h.clone(),
        row_map: map,
    })
}

/// Paste tiles along a rectangular pattern of group elements.
///
/// `rows` is an n x s array over the tile group; block (p, q) of the
/// output is tile T_{rows[p][q]}. The result is the (n b) x (s v) design
/// matrix with v1 = s left vertices and v2 = v right vertices.
pub fn paste_rows(tiles: &TileSet, rows: &[Vec<GroupElement>]) -> Result<DesignMatrix> {
    if rows.is_empty() || rows[0].is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let s = rows[0].len();
    for (p, row) in rows.iter().enumerate() {
        if row.len() != s {
            return Err(Error::RaggedRow {
                row: p,
                expected: s,
                got: row.len(),
            });
        }
    }
    let b = tiles.b();
    let v = tiles.points();
    let (n, cols) = (rows.len() * b, s * v);
    if n > MAX_DESIGN_SIDE || cols > MAX_DESIGN_SIDE {
        return Err(Error::MatrixTooLarge {
            rows: n,
            cols,
            cap: MAX_DESIGN_SIDE,
        });
    }
    let mut x = Array2::zeros((n, cols));
    for (p, pattern_row) in rows.iter().enumerate() {
        for (q, y) in pattern_row.iter().enumerate() {
            let iy = tiles.group().index_of(y)?;
            for i in 0..b {
                let src = tiles.row(i, iy);
                let mut dst = x.row_mut(p * b + i);
                for j in 0..v {
                    dst[q * v + j] = src[j];
                }
            }
        }
    }
    DesignMatrix::new(x, s, v)
}

/// Paste tiles along a difference matrix: block (p, q) is T_{D[p][q]}.
///
/// Output shape is (eta b^2) x (s v) with v1 = s, v2 = v.
pub fn paste(tiles: &TileSet, dm: &crate::incidence::DifferenceMatrix) -> Result<DesignMatrix> {
    if dm.group() != tiles.group() {
        return Err(Error::GroupOrderMismatch {
            tiles: tiles.b(),
            dm: dm.group().order(),
        });
    }
    paste_rows(tiles, dm.entries())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// (4,2)-design on 7 points whose 8 blocks are indexed by Z2^3.
    fn seed_design() -> IncidenceMatrix {
        IncidenceMatrix::from_blocks(
            7,
            &[
                vec![1, 3, 5],
                vec![0, 3, 4],
                vec![2, 3, 6],
                vec![0, 1, 2],
                vec![1, 4, 6],
                vec![0, 5, 6],
                vec![2, 4, 5],
                vec![0, 1, 2, 3, 4, 5, 6],
            ],
        )
        .unwrap()
    }

    fn z2_cubed() -> FiniteGroup {
        FiniteGroup::product(vec![2, 2, 2]).unwrap()
    }

    #[test]
    fn tile_rows_follow_group_translation() {
        let h = seed_design();
        let group = z2_cubed();
        let tiles = tiles_from_incidence(&h, &group, None).unwrap();
        // identity tile is H itself
        assert_eq!(tiles.tile_by_index(0).unwrap(), *h.data());
        // translating by (0,1,0) = index 2 sends row i to row of x_i + (0,1,0)
        let t = tiles.tile(&GroupElement::new(vec![0, 1, 0])).unwrap();
        let expected_rows = [2usize, 3, 0, 1, 6, 7, 4, 5];
        for (i, &src) in expected_rows.iter().enumerate() {
            assert_eq!(t.row(i), h.data().row(src), "tile row {i}");
        }
        // translating by (1,0,0): row 0 becomes the block {1,4,6}
        let t = tiles.tile(&GroupElement::new(vec![1, 0, 0])).unwrap();
        assert_eq!(t.row(0).to_vec(), vec![0, 1, 0, 0, 1, 0, 1]);
    }

    #[test]
    fn row_map_must_be_bijection_fixing_zero() {
        let h = seed_design();
        let group = z2_cubed();
        let bad_len = vec![0usize; 7];
        assert!(matches!(
            tiles_from_incidence(&h, &group, Some(&bad_len)),
            Err(Error::BadRowMap { .. })
        ));
        let repeated = [0usize, 1, 1, 3, 4, 5, 6, 7];
        assert!(matches!(
            tiles_from_incidence(&h, &group, Some(&repeated)),
            Err(Error::BadRowMap { .. })
        ));
        let moves_identity = [1usize, 0, 2, 3, 4, 5, 6, 7];
        assert!(matches!(
            tiles_from_incidence(&h, &group, Some(&moves_identity)),
            Err(Error::BadRowMap { .. })
        ));
        let shuffled = [0usize, 2, 1, 3, 5, 4, 7, 6];
        let tiles = tiles_from_incidence(&h, &group, Some(&shuffled)).unwrap();
        assert_eq!(tiles.entry_row(0, 1), 2);
    }

    #[test]
    fn tile_products_depend_only_on_the_difference() {
        let h = seed_design();
        let group = z2_cubed();
        let tiles = tiles_from_incidence(&h, &group, None).unwrap();
        let all = tiles.tiles().unwrap();
        for x in 0..8 {
            for y in 0..8 {
                let base = all[x].t().dot(&all[y]);
                for d in 0..8 {
                    let xd = tiles
                        .group()
                        .add(&group.element(x).unwrap(), &group.element(d).unwrap())
                        .unwrap();
                    let yd = tiles
                        .group()
                        .add(&group.element(y).unwrap(), &group.element(d).unwrap())
                        .unwrap();
                    let shifted = all[group.index_of(&xd).unwrap()]
                        .t()
                        .dot(&all[group.index_of(&yd).unwrap()]);
                    assert_eq!(base, shifted, "x={x} y={y} d={d}");
                }
            }
        }
    }

    #[test]
    fn tile_sum_identity_gives_replication_squared() {
        let h = seed_design();
        let group = z2_cubed();
        let tiles = tiles_from_incidence(&h, &group, None).unwrap();
        let all = tiles.tiles().unwrap();
        let expected = Array2::from_elem((7, 7), 16i64);
        for x in 0..8 {
            let mut sum: Array2<i64> = Array2::zeros((7, 7));
            for t_y in &all {
                sum = sum + all[x].t().dot(t_y);
            }
            assert_eq!(sum, expected, "x={x}");
        }
    }

    #[test]
    fn single_column_paste_stacks_tiles_vertically() {
        let h = seed_design();
        let group = z2_cubed();
        let tiles = tiles_from_incidence(&h, &group, None).unwrap();
        let rows: Vec<Vec<GroupElement>> =
            (0..8).map(|i| vec![group.element(i).unwrap()]).collect();
        let x = paste_rows(&tiles, &rows).unwrap();
        assert_eq!((x.n(), x.v1(), x.v2()), (64, 1, 7));
        for p in 0..8 {
            let tile = tiles.tile_by_index(p).unwrap();
            for i in 0..8 {
                assert_eq!(x.entries().row(p * 8 + i), tile.row(i));
            }
        }
    }

    #[test]
    fn paste_row_sums_match_the_block_profile() {
        let h = seed_design();
        let group = z2_cubed();
        let tiles = tiles_from_incidence(&h, &group, None).unwrap();
        let dm = crate::incidence::mult_table_dm(
            &crate::incidence::field_of_order(8).unwrap(),
        )
        .unwrap();
        let x = paste(&tiles, &dm).unwrap();
        assert_eq!((x.n(), x.v1(), x.v2()), (64, 8, 7));
        let sizes = h.block_sizes();
        for (p, pattern) in dm.entries().iter().enumerate() {
            for i in 0..8 {
                let expected: usize = pattern
                    .iter()
                    .map(|d| sizes[tiles.entry_row(i, group.index_of(d).unwrap())])
                    .sum();
                let got: i64 = x.entries().row(p * 8 + i).sum();
                assert_eq!(got as usize, expected, "pattern row {p}, tile row {i}");
            }
        }
    }

    #[test]
    fn paste_rejects_foreign_elements_and_ragged_patterns() {
        let h = seed_design();
        let tiles = tiles_from_incidence(&h, &z2_cubed(), None).unwrap();
        let foreign = GroupElement::new(vec![0]);
        assert!(matches!(
            paste_rows(&tiles, &[vec![foreign]]),
            Err(Error::ArityMismatch { .. })
        ));
        let id = tiles.group().identity();
        assert!(matches!(
            paste_rows(&tiles, &[vec![id.clone(), id.clone()], vec![id]]),
            Err(Error::RaggedRow { .. })
        ));
    }
}
