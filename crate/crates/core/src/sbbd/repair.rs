//! Deterministic repairs of a failed spanning condition: within-group
//! relabelling for the GDD route, column shifts for the pasted route.
//! Both transformations preserve the defining parameters of their
//! inputs, so only spanning is at stake.

use std::fmt;

use crate::algebra::GroupElement;
use crate::error::{Error, Result};
use crate::incidence::{verify_gdd, DifferenceMatrix, GroupedDesign};
use crate::report::Verdict;

use super::tiles::TileSet;

/// Default node budget for the repair and partition searches.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Unsuccessful search outcome. `best_covered` out of `required` is the
/// largest number of covered cells seen over any complete candidate,
/// the untouched input included; it certifies how close the search got.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairFailure {
    pub explored: u64,
    pub budget_exhausted: bool,
    pub best_covered: usize,
    pub required: usize,
}

impl fmt::Display for RepairFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "no repair after {} candidates ({}), best coverage {}/{}",
            self.explored,
            if self.budget_exhausted {
                "budget exhausted"
            } else {
                "space exhausted"
            },
            self.best_covered,
            self.required
        )
    }
}

enum Dfs<T> {
    Found(T),
    NotFound,
    Exhausted,
}

pub fn repair_spanning_gdd(d: &GroupedDesign) -> Result<Verdict<Vec<Vec<usize>>, RepairFailure>> {
    repair_spanning_gdd_with_budget(d, DEFAULT_BUDGET)
}

/// Search for one permutation per group making every block cover all
/// subscripts. Groups are processed in order and permutations tried in
/// lexicographic order, so the first success is canonical and an
/// already-covering design yields all-identity permutations. Applying
/// the output leaves the GDD parameters untouched.
///
/// Blocks must already meet every group; a block disjoint from some
/// group cannot be fixed by relabelling and is reported as an error.
pub fn repair_spanning_gdd_with_budget(
    d: &GroupedDesign,
    budget: u64,
) -> Result<Verdict<Vec<Vec<usize>>, RepairFailure>> {
    if let Verdict::Fail(violation) = verify_gdd(d)? {
        return Err(Error::NotVerified {
            what: "group divisible design",
            detail: violation.to_string(),
        });
    }
    let (m, g) = (d.m(), d.g());
    let h = d.incidence();
    let n = h.rows();
    // hits[block][group] = old subscripts of the block's points there
    let mut hits = vec![vec![Vec::new(); m]; n];
    for (block, row) in hits.iter_mut().enumerate() {
        for (i, group) in d.groups().iter().enumerate() {
            for (l, &point) in group.iter().enumerate() {
                if h.data()[(block, point)] == 1 {
                    row[i].push(l);
                }
            }
        }
    }
    for (block, per_group) in hits.iter().enumerate() {
        if let Some(i) = per_group.iter().position(|s| s.is_empty()) {
            return Err(Error::NotVerified {
                what: "spanning repair precondition",
                detail: format!(
                    "block {block} misses group {i} entirely; relabelling cannot fix that"
                ),
            });
        }
    }
    // suffix[i] bounds how many subscripts groups i.. can still add
    let mut suffix = vec![vec![0usize; m + 1]; n];
    for block in 0..n {
        for i in (0..m).rev() {
            suffix[block][i] = suffix[block][i + 1] + hits[block][i].len();
        }
    }

    let required = n * g;
    let mut search = GddSearch {
        hits: &hits,
        suffix: &suffix,
        g,
        counts: vec![vec![0u32; g]; n],
        covered: vec![0usize; n],
        perms: Vec::with_capacity(m),
        explored: 0,
        budget,
        best: 0,
    };
    // identity baseline doubles as the initial best certificate
    let identity: Vec<usize> = (0..g).collect();
    for _ in 0..m {
        for block in 0..n {
            search.apply(block, search.perms.len(), &identity, 1);
        }
        search.perms.push(identity.clone());
    }
    search.best = search.covered.iter().sum();
    if search.covered.iter().all(|&c| c == g) {
        return Ok(Verdict::Pass(search.perms));
    }
    while let Some(perm) = search.perms.pop() {
        for block in 0..n {
            search.apply(block, search.perms.len(), &perm, -1);
        }
    }

    match search.dfs(m) {
        Dfs::Found(perms) => Ok(Verdict::Pass(perms)),
        Dfs::NotFound => Ok(Verdict::Fail(RepairFailure {
            explored: search.explored,
            budget_exhausted: false,
            best_covered: search.best,
            required,
        })),
        Dfs::Exhausted => Ok(Verdict::Fail(RepairFailure {
            explored: search.explored,
            budget_exhausted: true,
            best_covered: search.best,
            required,
        })),
    }
}

struct GddSearch<'a> {
    hits: &'a [Vec<Vec<usize>>],
    suffix: &'a [Vec<usize>],
    g: usize,
    /// counts[block][subscript] = groups assigned so far contributing it
    counts: Vec<Vec<u32>>,
    covered: Vec<usize>,
    perms: Vec<Vec<usize>>,
    explored: u64,
    budget: u64,
    best: usize,
}

impl GddSearch<'_> {
    fn apply(&mut self, block: usize, group: usize, perm: &[usize], sign: i32) {
        for &old in &self.hits[block][group] {
            let new = perm[old];
            if sign > 0 {
                self.counts[block][new] += 1;
                if self.counts[block][new] == 1 {
                    self.covered[block] += 1;
                }
            } else {
                self.counts[block][new] -= 1;
                if self.counts[block][new] == 0 {
                    self.covered[block] -= 1;
                }
            }
        }
    }

    fn dfs(&mut self, m: usize) -> Dfs<Vec<Vec<usize>>> {
        let i = self.perms.len();
        if i == m {
            let total: usize = self.covered.iter().sum();
            self.best = self.best.max(total);
            if self.covered.iter().all(|&c| c == self.g) {
                return Dfs::Found(self.perms.clone());
            }
            return Dfs::NotFound;
        }
        let mut perm: Vec<usize> = (0..self.g).collect();
        loop {
            if self.budget == 0 {
                return Dfs::Exhausted;
            }
            self.budget -= 1;
            self.explored += 1;
            for block in 0..self.hits.len() {
                self.apply(block, i, &perm, 1);
            }
            // prune: later groups cannot cover more than their hit counts
            let viable = self
                .covered
                .iter()
                .enumerate()
                .all(|(block, &c)| c + self.suffix[block][i + 1] >= self.g);
            if viable {
                self.perms.push(perm.clone());
                match self.dfs(m) {
                    Dfs::Found(p) => return Dfs::Found(p),
                    Dfs::Exhausted => return Dfs::Exhausted,
                    Dfs::NotFound => {}
                }
                self.perms.pop();
            }
            for block in 0..self.hits.len() {
                self.apply(block, i, &perm, -1);
            }
            if !next_permutation(&mut perm) {
                return Dfs::NotFound;
            }
        }
    }
}

/// Advance to the lexicographically next permutation; false after the
/// last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

pub fn repair_spanning_dm(
    tiles: &TileSet,
    dm: &DifferenceMatrix,
) -> Result<Verdict<Vec<GroupElement>, RepairFailure>> {
    repair_spanning_dm_with_budget(tiles, dm, DEFAULT_BUDGET)
}

/// Search for per-column shifts making the pasted design spanning.
///
/// Shifting column q by c replaces slab q's tile labels y with y + c,
/// which permutes tile rows but never changes the multiset of H rows in
/// a slab; the difference matrix property is preserved by construction.
/// Columns are fixed left to right, candidates ordered by newly covered
/// (row, point) cells (ties to canonical element order) with full
/// backtracking, so an already-spanning paste returns all-identity
/// shifts. A design whose H has an empty block fails immediately: every
/// slab row is an H row, so no shift can clear a zero row.
pub fn repair_spanning_dm_with_budget(
    tiles: &TileSet,
    dm: &DifferenceMatrix,
    budget: u64,
) -> Result<Verdict<Vec<GroupElement>, RepairFailure>> {
    if dm.group() != tiles.group() {
        return Err(Error::GroupOrderMismatch {
            tiles: tiles.b(),
            dm: dm.group().order(),
        });
    }
    let b = tiles.b();
    let v = tiles.points();
    let s = dm.s();
    let pattern_rows = dm.entries().len();
    let n = pattern_rows * b;
    let required = n * v;
    let group = tiles.group();
    let identity_shifts = vec![group.identity(); s];

    // entry indices of the difference matrix, in group index form
    let mut d_idx = vec![vec![0usize; s]; pattern_rows];
    for (p, row) in dm.entries().iter().enumerate() {
        for (q, e) in row.iter().enumerate() {
            d_idx[p][q] = group.index_of(e)?;
        }
    }
    // sums[i][y] = group index of x_i + y, the tile row lookup
    let mut sums = vec![vec![0usize; b]; b];
    for (i, row) in sums.iter_mut().enumerate() {
        let xi = group.element(i)?;
        for (y, slot) in row.iter_mut().enumerate() {
            let sum = group.add(&xi, &group.element(y)?)?;
            *slot = group.index_of(&sum)?;
        }
    }

    let baseline = coverage_count(tiles, &d_idx, &sums, &vec![0usize; s]);
    if baseline == required && !tiles.incidence().block_sizes().contains(&0) {
        return Ok(Verdict::Pass(identity_shifts));
    }
    if tiles.incidence().block_sizes().contains(&0) {
        return Ok(Verdict::Fail(RepairFailure {
            explored: 0,
            budget_exhausted: false,
            best_covered: baseline,
            required,
        }));
    }

    let mut search = DmSearch {
        tiles,
        d_idx: &d_idx,
        sums: &sums,
        covered: vec![0u32; required],
        covered_total: 0,
        shifts: Vec::with_capacity(s),
        explored: 0,
        budget,
        best: baseline,
        v,
    };
    match search.dfs(s) {
        Dfs::Found(shift_idx) => {
            let shifts = shift_idx
                .into_iter()
                .map(|c| group.element(c).expect("index in range"))
                .collect();
            Ok(Verdict::Pass(shifts))
        }
        Dfs::NotFound => Ok(Verdict::Fail(RepairFailure {
            explored: search.explored,
            budget_exhausted: false,
            best_covered: search.best,
            required,
        })),
        Dfs::Exhausted => Ok(Verdict::Fail(RepairFailure {
            explored: search.explored,
            budget_exhausted: true,
            best_covered: search.best,
            required,
        })),
    }
}

/// Covered (row, point) cells of the paste with the given column shifts.
fn coverage_count(
    tiles: &TileSet,
    d_idx: &[Vec<usize>],
    sums: &[Vec<usize>],
    shifts: &[usize],
) -> usize {
    let b = sums.len();
    let v = tiles.points();
    let h = tiles.incidence().data();
    let mut covered = 0;
    for row in d_idx {
        for i in 0..b {
            let mut cell = vec![false; v];
            for (q, &c) in shifts.iter().enumerate() {
                let y = sums[row[q]][c];
                let h_row = tiles.row_map()[sums[i][y]];
                for j in 0..v {
                    if h[(h_row, j)] == 1 {
                        cell[j] = true;
                    }
                }
            }
            covered += cell.iter().filter(|&&x| x).count();
        }
    }
    covered
}

struct DmSearch<'a> {
    tiles: &'a TileSet,
    d_idx: &'a [Vec<usize>],
    sums: &'a [Vec<usize>],
    /// covered[(p·b + i)·v + j] = chosen columns hitting that cell
    covered: Vec<u32>,
    covered_total: usize,
    shifts: Vec<usize>,
    explored: u64,
    budget: u64,
    best: usize,
    v: usize,
}

impl DmSearch<'_> {
    /// Walk the cells column q covers under shift c; returns how many
    /// were previously uncovered when adding, and updates the sets.
    fn apply(&mut self, q: usize, c: usize, sign: i32) -> usize {
        let b = self.sums.len();
        let h = self.tiles.incidence().data();
        let mut delta = 0;
        for (p, row) in self.d_idx.iter().enumerate() {
            let y = self.sums[row[q]][c];
            for i in 0..b {
                let h_row = self.tiles.row_map()[self.sums[i][y]];
                let base = (p * b + i) * self.v;
                for j in 0..self.v {
                    if h[(h_row, j)] == 1 {
                        if sign > 0 {
                            self.covered[base + j] += 1;
                            if self.covered[base + j] == 1 {
                                delta += 1;
                            }
                        } else {
                            self.covered[base + j] -= 1;
                            if self.covered[base + j] == 0 {
                                delta += 1;
                            }
                        }
                    }
                }
            }
        }
        if sign > 0 {
            self.covered_total += delta;
        } else {
            self.covered_total -= delta;
        }
        delta
    }

    fn dfs(&mut self, s: usize) -> Dfs<Vec<usize>> {
        let q = self.shifts.len();
        if q == s {
            self.best = self.best.max(self.covered_total);
            if self.covered_total == self.covered.len() {
                return Dfs::Found(self.shifts.clone());
            }
            return Dfs::NotFound;
        }
        let b = self.sums.len();
        // order candidates by gain, canonical order breaking ties
        let mut ranked: Vec<(usize, usize)> = Vec::with_capacity(b);
        for c in 0..b {
            let gain = self.apply(q, c, 1);
            self.apply(q, c, -1);
            ranked.push((c, gain));
        }
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        for (c, _) in ranked {
            if self.budget == 0 {
                return Dfs::Exhausted;
            }
            self.budget -= 1;
            self.explored += 1;
            self.apply(q, c, 1);
            self.shifts.push(c);
            match self.dfs(s) {
                Dfs::Found(shifts) => return Dfs::Found(shifts),
                Dfs::Exhausted => return Dfs::Exhausted,
                Dfs::NotFound => {}
            }
            self.shifts.pop();
            self.apply(q, c, -1);
        }
        Dfs::NotFound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteGroup;
    use crate::incidence::{
        develop_difference_set, field_of_order, mult_table_dm, verify_difference_matrix,
        IncidenceMatrix,
    };
    use crate::sbbd::{construct_single, gdd_to_sbbd, tiles_from_incidence, SbbdClass};

    /// GD_{3,4}(6,3;9) whose first three blocks each miss one subscript.
    fn nine_block_gdd() -> GroupedDesign {
        let h = IncidenceMatrix::from_blocks(
            9,
            &[
                vec![1, 2, 4, 5, 7, 8],
                vec![0, 2, 3, 5, 6, 8],
                vec![0, 1, 3, 4, 6, 7],
                vec![0, 2, 3, 4, 7, 8],
                vec![1, 2, 3, 5, 6, 7],
                vec![0, 1, 4, 5, 6, 8],
                vec![0, 1, 3, 5, 7, 8],
                vec![1, 2, 3, 4, 6, 8],
                vec![0, 2, 4, 5, 6, 7],
            ],
        )
        .unwrap();
        GroupedDesign::new(h, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]).unwrap()
    }

    /// GD_{0,1}(2,2;4) where no relabelling can cover every subscript.
    fn stuck_gdd() -> GroupedDesign {
        let h = IncidenceMatrix::from_blocks(
            4,
            &[vec![0, 2], vec![1, 3], vec![0, 3], vec![1, 2]],
        )
        .unwrap();
        GroupedDesign::new(h, vec![vec![0, 1], vec![2, 3]]).unwrap()
    }

    #[test]
    fn relabelling_search_finds_the_canonical_fix() {
        let d = nine_block_gdd();
        let before = gdd_to_sbbd(&d).unwrap();
        assert_eq!(before.class(), SbbdClass::SbbdStar);
        let perms = match repair_spanning_gdd(&d).unwrap() {
            Verdict::Pass(perms) => perms,
            Verdict::Fail(f) => panic!("repair should succeed, got {f}"),
        };
        // earlier groups stay put; the last group takes the first
        // covering permutation in lexicographic order
        assert_eq!(perms, vec![vec![0, 1, 2], vec![0, 1, 2], vec![1, 2, 0]]);
        let fixed = d.apply_group_permutations(&perms).unwrap();
        let after = gdd_to_sbbd(&fixed).unwrap();
        assert_eq!(after.class(), SbbdClass::Sbbd);
        assert_eq!(after.info, before.info);
    }

    #[test]
    fn relabelling_is_identity_when_nothing_is_broken() {
        let d = nine_block_gdd();
        let perms = match repair_spanning_gdd(&d).unwrap() {
            Verdict::Pass(perms) => perms,
            Verdict::Fail(f) => panic!("repair should succeed, got {f}"),
        };
        let fixed = d.apply_group_permutations(&perms).unwrap();
        let identity: Vec<Vec<usize>> = vec![vec![0, 1, 2]; 3];
        assert_eq!(repair_spanning_gdd(&fixed).unwrap().pass(), Some(&identity));
    }

    #[test]
    fn relabelling_reports_honest_failure() {
        let d = stuck_gdd();
        let f = repair_spanning_gdd(&d).unwrap().fail().cloned().unwrap();
        assert_eq!(
            f,
            RepairFailure {
                explored: 6,
                budget_exhausted: false,
                best_covered: 6,
                required: 8,
            }
        );
        assert_eq!(
            f.to_string(),
            "no repair after 6 candidates (space exhausted), best coverage 6/8"
        );
        let cut = repair_spanning_gdd_with_budget(&d, 2)
            .unwrap()
            .fail()
            .cloned()
            .unwrap();
        assert_eq!(
            cut,
            RepairFailure {
                explored: 2,
                budget_exhausted: true,
                best_covered: 6,
                required: 8,
            }
        );
    }

    #[test]
    fn relabelling_requires_every_block_to_meet_every_group() {
        // the complete pair design is group divisible, but the block
        // {0,1} never touches the second group
        let h = IncidenceMatrix::from_blocks(
            4,
            &[
                vec![0, 1],
                vec![2, 3],
                vec![0, 2],
                vec![1, 3],
                vec![0, 3],
                vec![1, 2],
            ],
        )
        .unwrap();
        let d = GroupedDesign::new(h, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(
            repair_spanning_gdd(&d),
            Err(Error::NotVerified {
                what: "spanning repair precondition",
                ..
            })
        ));
        // unverifiable designs are rejected before any search
        let bad = IncidenceMatrix::from_blocks(4, &[vec![0, 2], vec![1, 3], vec![0, 3]]).unwrap();
        let bad = GroupedDesign::new(bad, vec![vec![0, 1], vec![2, 3]]).unwrap();
        assert!(matches!(
            repair_spanning_gdd(&bad),
            Err(Error::NotVerified {
                what: "group divisible design",
                ..
            })
        ));
    }

    #[test]
    fn column_shifts_repair_the_zero_row_table() {
        let h = develop_difference_set(&[1, 2, 4], 7).unwrap();
        let field = field_of_order(7).unwrap();
        let dm = mult_table_dm(&field).unwrap();
        let raw = construct_single(&h, &dm, None).unwrap();
        assert_eq!(raw.result.class(), SbbdClass::SbbdStar);

        let tiles = tiles_from_incidence(&h, dm.group(), None).unwrap();
        let shifts = match repair_spanning_dm(&tiles, &dm).unwrap() {
            Verdict::Pass(shifts) => shifts,
            Verdict::Fail(f) => panic!("repair should succeed, got {f}"),
        };
        assert_eq!(shifts.len(), 7);
        // the first column's gain is the same for every candidate, so
        // the canonical tie-break keeps it unshifted
        assert_eq!(shifts[0], dm.group().identity());
        let repaired = construct_single(&h, &dm.shift_columns(&shifts).unwrap(), None).unwrap();
        assert_eq!(repaired.result.class(), SbbdClass::Sbbd);
        // shifting columns permutes rows within slabs and nothing else
        assert_eq!(repaired.result.info, raw.result.info);
    }

    #[test]
    fn already_spanning_paste_keeps_identity_shifts() {
        let h = IncidenceMatrix::from_blocks(2, &[vec![0, 1], vec![0, 1]]).unwrap();
        let g = FiniteGroup::cyclic(2).unwrap();
        let rows: Vec<Vec<crate::algebra::GroupElement>> = [[0, 0], [0, 1], [1, 1], [1, 0]]
            .iter()
            .map(|r| r.iter().map(|&i| g.element(i).unwrap()).collect())
            .collect();
        let dm = verify_difference_matrix(&g, &rows)
            .unwrap()
            .expect_pass("doubled table");
        let tiles = tiles_from_incidence(&h, &g, None).unwrap();
        assert_eq!(
            repair_spanning_dm(&tiles, &dm).unwrap().pass(),
            Some(&vec![g.identity(), g.identity()])
        );
    }

    #[test]
    fn shift_search_certifies_unrepairable_coverage() {
        // one-point blocks: every slab row covers a single point, and no
        // shift assignment makes all three pattern rows rainbow
        let h = IncidenceMatrix::from_blocks(3, &[vec![0], vec![1], vec![2]]).unwrap();
        let field = field_of_order(3).unwrap();
        let dm = mult_table_dm(&field).unwrap();
        let tiles = tiles_from_incidence(&h, dm.group(), None).unwrap();
        let f = repair_spanning_dm(&tiles, &dm).unwrap().fail().cloned().unwrap();
        assert_eq!(
            f,
            RepairFailure {
                explored: 39,
                budget_exhausted: false,
                best_covered: 21,
                required: 27,
            }
        );
        let cut = repair_spanning_dm_with_budget(&tiles, &dm, 1)
            .unwrap()
            .fail()
            .cloned()
            .unwrap();
        assert_eq!(
            cut,
            RepairFailure {
                explored: 1,
                budget_exhausted: true,
                best_covered: 21,
                required: 27,
            }
        );
    }

    #[test]
    fn zero_blocks_cannot_be_shifted_away() {
        let h = IncidenceMatrix::from_blocks(2, &[vec![0, 1], vec![]]).unwrap();
        let g = FiniteGroup::cyclic(2).unwrap();
        let rows: Vec<Vec<crate::algebra::GroupElement>> = [[0, 0], [0, 1]]
            .iter()
            .map(|r| r.iter().map(|&i| g.element(i).unwrap()).collect())
            .collect();
        let dm = verify_difference_matrix(&g, &rows)
            .unwrap()
            .expect_pass("table");
        let tiles = tiles_from_incidence(&h, &g, None).unwrap();
        let f = repair_spanning_dm(&tiles, &dm).unwrap().fail().cloned().unwrap();
        assert_eq!(
            f,
            RepairFailure {
                explored: 0,
                budget_exhausted: false,
                best_covered: 6,
                required: 8,
            }
        );
    }

    #[test]
    fn shift_search_rejects_foreign_groups() {
        let h = IncidenceMatrix::from_blocks(2, &[vec![0, 1], vec![0, 1]]).unwrap();
        let g2 = FiniteGroup::cyclic(2).unwrap();
        let tiles = tiles_from_incidence(&h, &g2, None).unwrap();
        let field = field_of_order(3).unwrap();
        let dm = mult_table_dm(&field).unwrap();
        assert!(matches!(
            repair_spanning_dm(&tiles, &dm),
            Err(Error::GroupOrderMismatch { tiles: 2, dm: 3 })
        ));
    }
}
