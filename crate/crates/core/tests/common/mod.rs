//! Shared fixtures: the worked designs and difference matrices the
//! integration suites keep coming back to.

use ndarray::Array2;

use sbbd_core::incidence::{
    develop_difference_set, field_of_order, mult_table_dm, DifferenceMatrix, GroupedDesign,
    IncidenceMatrix,
};
use sbbd_core::sbbd::{DesignMatrix, SbbdParams};

/// Nine SB-blocks on K_{3,3}, the hand-checkable small design with
/// Λ = (6, 3, 4, 4).
pub fn nine_by_nine() -> DesignMatrix {
    let rows = [
        "011110110",
        "101011011",
        "110101101",
        "011011101",
        "101101110",
        "110110011",
        "011101011",
        "101110101",
        "110011110",
    ];
    let entries = Array2::from_shape_fn((9, 9), |(r, c)| {
        i64::from(rows[r].as_bytes()[c] == b'1')
    });
    DesignMatrix::new(entries, 3, 3).expect("9 x 9 fixture is well formed")
}

/// GD_{3,4}(6, 3; 9): nine blocks of six points over three groups of
/// three; reading it bipartite fails spanning until one group is
/// relabelled.
pub fn gdd_nine_blocks() -> GroupedDesign {
    let blocks: Vec<Vec<usize>> = vec![
        vec![1, 2, 4, 5, 7, 8],
        vec![0, 2, 3, 5, 6, 8],
        vec![0, 1, 3, 4, 6, 7],
        vec![0, 2, 3, 4, 7, 8],
        vec![1, 2, 3, 5, 6, 7],
        vec![0, 1, 4, 5, 6, 8],
        vec![0, 1, 3, 5, 7, 8],
        vec![1, 2, 3, 4, 6, 8],
        vec![0, 2, 4, 5, 6, 7],
    ];
    let incidence = IncidenceMatrix::from_blocks(9, &blocks).expect("blocks are in range");
    let groups = vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]];
    GroupedDesign::new(incidence, groups).expect("groups partition the points")
}

/// (4,2)-design on 7 points with 8 blocks, the seed pasted with the
/// GF(8) difference matrix.
pub fn eight_block_design() -> IncidenceMatrix {
    let blocks: Vec<Vec<usize>> = vec![
        vec![1, 3, 5],
        vec![0, 3, 4],
        vec![2, 3, 6],
        vec![0, 1, 2],
        vec![1, 4, 6],
        vec![0, 5, 6],
        vec![2, 4, 5],
        vec![0, 1, 2, 3, 4, 5, 6],
    ];
    IncidenceMatrix::from_blocks(7, &blocks).expect("blocks are in range")
}

/// GF(8) multiplication table with the three tail columns shifted by
/// the field values 1, 3, 5; the shifts make the paste spanning.
pub fn gf8_shifted_dm() -> DifferenceMatrix {
    let field = field_of_order(8).expect("8 = 2^3");
    let dm = mult_table_dm(&field).expect("multiplication table is a DM");
    dm.shift_column(5, &field.element(1).expect("value in range"))
        .and_then(|d| d.shift_column(6, &field.element(3).expect("value in range")))
        .and_then(|d| d.shift_column(7, &field.element(5).expect("value in range")))
        .expect("shifts preserve the difference property")
}

/// (5, 3, 3)-BIBD: ten triples on five points, replication 6.
pub fn ten_triples() -> IncidenceMatrix {
    let blocks: Vec<Vec<usize>> = vec![
        vec![2, 3, 4],
        vec![0, 3, 4],
        vec![1, 2, 3],
        vec![0, 1, 4],
        vec![0, 1, 2],
        vec![0, 1, 3],
        vec![0, 2, 3],
        vec![1, 2, 4],
        vec![0, 2, 4],
        vec![1, 3, 4],
    ];
    IncidenceMatrix::from_blocks(5, &blocks).expect("blocks are in range")
}

/// GF(5) multiplication table with columns shifted by 0, 0, 1, 4, 3;
/// used once per cell of the ten-triple split.
pub fn z5_shifted_dm() -> DifferenceMatrix {
    let field = field_of_order(5).expect("5 is prime");
    let dm = mult_table_dm(&field).expect("multiplication table is a DM");
    let shifts: Vec<_> = [0usize, 0, 1, 4, 3]
        .iter()
        .map(|&v| field.element(v).expect("value in range"))
        .collect();
    dm.shift_columns(&shifts)
        .expect("shifts preserve the difference property")
}

/// The Fano plane, developed from the difference set {1, 2, 4} mod 7.
pub fn fano() -> IncidenceMatrix {
    develop_difference_set(&[1, 2, 4], 7).expect("difference set develops")
}

/// The doubly completely symmetric reference matrix
/// I ⊗ (μI + λ12(J−I)) + (J−I) ⊗ (λ21 I + λ22 (J−I)).
pub fn pattern(p: &SbbdParams, v1: usize, v2: usize) -> Array2<i64> {
    let side = v1 * v2;
    Array2::from_shape_fn((side, side), |(r, c)| {
        match (r == c, r / v2 == c / v2, r % v2 == c % v2) {
            (true, _, _) => p.mu,
            (false, true, _) => p.lambda12,
            (false, false, true) => p.lambda21,
            (false, false, false) => p.lambda22,
        }
    })
}
