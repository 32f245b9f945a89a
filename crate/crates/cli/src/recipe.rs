//! Construction recipes: a seed design, difference-matrix sources, an
//! optional block partition, executed into a design matrix with an
//! optional spanning repair.
//!
//! Route selection: `dm` pastes the seed with one difference matrix,
//! `dms` stacks per-cell pastes over a partition, and neither means the
//! seed's group partition is read directly as a bipartite design.

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use sbbd_core::incidence::{
    ag_hyperplane_gdd, develop_difference_set, field_of_order, mult_table_dm,
    paley_difference_set, transversal_design, verify_difference_matrix, verify_gdd,
    DifferenceMatrix, GddParams, GroupedDesign, IncidenceMatrix,
};
use sbbd_core::sbbd::{
    construct_decomposed, construct_single, gdd_to_sbbd, partition_blocks_with_budget,
    repair_spanning_dm_with_budget, repair_spanning_gdd_with_budget, tiles_from_incidence,
    BlockPartition, PartitionSpec, SbbdParams, SbbdResult,
};
use sbbd_core::{Error, Verdict};

use crate::io::{element_to_json, parse_group, GroupContext};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Recipe {
    pub design: DesignSource,
    #[serde(default)]
    pub dm: Option<DmSource>,
    #[serde(default)]
    pub dms: Option<Vec<DmSource>>,
    #[serde(default)]
    pub partition: Option<PartitionSource>,
    /// Optional block relabelling x -> row_map[x] applied when tiling.
    #[serde(default)]
    pub row_map: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DesignSource {
    /// Blocks given outright; groups make it a group divisible design.
    Inline {
        points: usize,
        blocks: Vec<Vec<usize>>,
        #[serde(default)]
        groups: Option<Vec<Vec<usize>>>,
    },
    /// Develop a difference set through the residues mod `modulus`.
    DifferenceSet { base: Vec<u64>, modulus: u64 },
    /// Quadratic residues mod q, q ≡ 3 (mod 4), developed mod q.
    Paley { q: u64 },
    /// Hyperplane slices of the affine geometry AG(n, q) minus one
    /// parallel class, grouped by the removed class.
    AgHyperplanes { n: u32, q: u32 },
    /// Transversal design TD(q+1, q) from the lines of AG(2, q).
    Transversal { q: u32 },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DmSource {
    /// Multiplication table of GF(order), optionally with per-column
    /// shifts (entries follow the group descriptor conventions).
    MultTable {
        order: u32,
        #[serde(default)]
        shifts: Option<Vec<serde_json::Value>>,
    },
    /// Rows given outright over a named group; verified before use.
    Inline {
        group: String,
        rows: Vec<Vec<serde_json::Value>>,
        #[serde(default)]
        shifts: Option<Vec<serde_json::Value>>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartitionSource {
    /// Search cell sizes near the point count.
    Auto,
    /// Cell sizes in order.
    Sizes(Vec<usize>),
    /// Explicit cells of block indices.
    Cells(Vec<Vec<usize>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Gdd,
    Single,
    Decomposed,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Gdd => "gdd",
            Route::Single => "single",
            Route::Decomposed => "decomposed",
        }
    }
}

/// Outcome of the optional spanning repair, ready for the run report.
pub struct RepairReport {
    pub requested: bool,
    pub needed: bool,
    pub outcome: &'static str,
    pub kind: Option<&'static str>,
    pub witness: Option<serde_json::Value>,
    pub detail: Option<String>,
}

impl RepairReport {
    fn not_requested(needed: bool) -> Self {
        RepairReport {
            requested: false,
            needed,
            outcome: "not_requested",
            kind: None,
            witness: None,
            detail: None,
        }
    }

    fn not_needed() -> Self {
        RepairReport {
            requested: true,
            needed: false,
            outcome: "not_needed",
            kind: None,
            witness: None,
            detail: None,
        }
    }

    fn applied(kind: &'static str, witness: serde_json::Value) -> Self {
        RepairReport {
            requested: true,
            needed: true,
            outcome: "applied",
            kind: Some(kind),
            witness: Some(witness),
            detail: None,
        }
    }

    fn failed(kind: &'static str, detail: String) -> Self {
        RepairReport {
            requested: true,
            needed: true,
            outcome: "failed",
            kind: Some(kind),
            witness: None,
            detail: Some(detail),
        }
    }
}

pub struct Sufficiency {
    pub b: usize,
    pub r: u64,
    pub s: usize,
    pub s_sufficient: bool,
    pub min_distinct_labels: usize,
    pub labels_sufficient: bool,
}

/// Everything a recipe run produces, before formatting.
pub struct Execution {
    pub route: Route,
    pub result: SbbdResult,
    /// Closed-form Λ prediction; for stacked cells its diagonal half can
    /// overstate the computed matrix, see `agrees_with_formula`.
    pub formula: Option<SbbdParams>,
    pub agrees_with_formula: Option<bool>,
    pub replications: Option<Vec<u64>>,
    pub sufficiency: Option<Sufficiency>,
    pub gdd_params: Option<GddParams>,
    pub repair: RepairReport,
}

pub fn execute(recipe: &Recipe, repair: bool, budget: u64) -> Result<Execution> {
    let (h, groups) = resolve_seed(&recipe.design)?;
    match (&recipe.dm, &recipe.dms) {
        (Some(_), Some(_)) => bail!("recipe gives both \"dm\" and \"dms\"; pick one route"),
        (Some(dm), None) => {
            if groups.is_some() {
                bail!("the seed design carries groups; drop \"dm\" to read it as a group divisible design, or use an ungrouped seed");
            }
            if recipe.partition.is_some() {
                bail!("\"partition\" only applies with \"dms\"");
            }
            run_single(&h, dm, recipe.row_map.as_deref(), repair, budget)
        }
        (None, Some(dms)) => {
            if groups.is_some() {
                bail!("the seed design carries groups; drop \"dms\" to read it as a group divisible design, or use an ungrouped seed");
            }
            if recipe.row_map.is_some() {
                bail!("\"row_map\" only applies with a single \"dm\"");
            }
            run_decomposed(&h, dms, recipe.partition.as_ref(), repair, budget)
        }
        (None, None) => {
            let Some(groups) = groups else {
                bail!("recipe needs a \"dm\", \"dms\", or a seed design with groups");
            };
            if recipe.partition.is_some() || recipe.row_map.is_some() {
                bail!("\"partition\" and \"row_map\" only apply with difference matrices");
            }
            run_gdd(h, groups, repair, budget)
        }
    }
}

fn resolve_seed(source: &DesignSource) -> Result<(IncidenceMatrix, Option<Vec<Vec<usize>>>)> {
    match source {
        DesignSource::Inline {
            points,
            blocks,
            groups,
        } => Ok((
            IncidenceMatrix::from_blocks(*points, blocks)?,
            groups.clone(),
        )),
        DesignSource::DifferenceSet { base, modulus } => {
            Ok((develop_difference_set(base, *modulus)?, None))
        }
        DesignSource::Paley { q } => {
            let base = paley_difference_set(*q)?;
            Ok((develop_difference_set(&base, *q)?, None))
        }
        DesignSource::AgHyperplanes { n, q } => {
            let d = ag_hyperplane_gdd(*n, *q)?;
            Ok((d.incidence().clone(), Some(d.groups().to_vec())))
        }
        DesignSource::Transversal { q } => {
            let d = transversal_design(*q)?;
            Ok((d.incidence().clone(), Some(d.groups().to_vec())))
        }
    }
}

fn resolve_dm(source: &DmSource) -> Result<(GroupContext, DifferenceMatrix)> {
    let (ctx, dm, shifts) = match source {
        DmSource::MultTable { order, shifts } => {
            let field = field_of_order(*order)?;
            let dm = mult_table_dm(&field)?;
            let ctx = GroupContext {
                group: field.additive_group().clone(),
                field: Some(field),
                name: format!("GF({order})"),
            };
            (ctx, dm, shifts)
        }
        DmSource::Inline {
            group,
            rows,
            shifts,
        } => {
            let ctx = parse_group(group)?;
            let decoded = rows
                .iter()
                .map(|row| ctx.row_from_json(row))
                .collect::<Result<Vec<_>>>()?;
            let dm = match verify_difference_matrix(&ctx.group, &decoded)? {
                Verdict::Pass(dm) => dm,
                Verdict::Fail(violation) => {
                    bail!("inline difference matrix over {} fails: {violation}", ctx.name)
                }
            };
            (ctx, dm, shifts)
        }
    };
    let dm = match shifts {
        Some(values) => {
            let elements = ctx
                .row_from_json(values)
                .context("bad column shift list")?;
            dm.shift_columns(&elements)?
        }
        None => dm,
    };
    Ok((ctx, dm))
}

fn shifts_to_json(shifts: &[sbbd_core::algebra::GroupElement]) -> serde_json::Value {
    serde_json::Value::Array(shifts.iter().map(element_to_json).collect())
}

fn run_single(
    h: &IncidenceMatrix,
    source: &DmSource,
    row_map: Option<&[usize]>,
    repair: bool,
    budget: u64,
) -> Result<Execution> {
    let (_ctx, dm) = resolve_dm(source)?;
    let mut single = construct_single(h, &dm, row_map)?;
    let needed = !single.result.spanning.passes();
    let report = if !repair {
        RepairReport::not_requested(needed)
    } else if !needed {
        RepairReport::not_needed()
    } else {
        let tiles = tiles_from_incidence(h, dm.group(), row_map)?;
        match repair_spanning_dm_with_budget(&tiles, &dm, budget)? {
            Verdict::Pass(shifts) => {
                let shifted = dm.shift_columns(&shifts)?;
                single = construct_single(h, &shifted, row_map)?;
                RepairReport::applied("column_shifts", shifts_to_json(&shifts))
            }
            Verdict::Fail(failure) => {
                RepairReport::failed("column_shifts", failure.to_string())
            }
        }
    };
    Ok(Execution {
        route: Route::Single,
        formula: Some(single.params),
        agrees_with_formula: Some(true),
        replications: None,
        sufficiency: Some(Sufficiency {
            b: h.rows(),
            r: single.rlambda.r,
            s: dm.s(),
            s_sufficient: single.s_sufficient,
            min_distinct_labels: single.min_distinct_labels,
            labels_sufficient: single.labels_sufficient,
        }),
        gdd_params: None,
        repair: report,
        result: single.result,
    })
}

fn resolve_partition(
    h: &IncidenceMatrix,
    source: Option<&PartitionSource>,
    budget: u64,
) -> Result<BlockPartition> {
    match source {
        None => Ok(partition_blocks_with_budget(h, PartitionSpec::Auto, budget)?),
        Some(PartitionSource::Auto) => {
            Ok(partition_blocks_with_budget(h, PartitionSpec::Auto, budget)?)
        }
        Some(PartitionSource::Sizes(sizes)) => Ok(partition_blocks_with_budget(
            h,
            PartitionSpec::Sizes(sizes.clone()),
            budget,
        )?),
        Some(PartitionSource::Cells(cells)) => {
            let mut replications = Vec::with_capacity(cells.len());
            for cell in cells {
                let mut r = 0u64;
                for &block in cell {
                    if block >= h.rows() {
                        bail!("partition cell names block {block}, design has {}", h.rows());
                    }
                    r += h.data()[[block, 0]] as u64;
                }
                replications.push(r);
            }
            Ok(BlockPartition {
                cells: cells.clone(),
                replications,
            })
        }
    }
}

fn run_decomposed(
    h: &IncidenceMatrix,
    sources: &[DmSource],
    partition: Option<&PartitionSource>,
    repair: bool,
    budget: u64,
) -> Result<Execution> {
    let mut dms = Vec::with_capacity(sources.len());
    for source in sources {
        dms.push(resolve_dm(source)?.1);
    }
    let partition = resolve_partition(h, partition, budget)?;
    let mut dec = construct_decomposed(h, &partition, &dms)?;
    let needed = !dec.result.spanning.passes();
    let report = if !repair {
        RepairReport::not_requested(needed)
    } else if !needed {
        RepairReport::not_needed()
    } else {
        match repair_cells(h, &partition, &mut dms, budget)? {
            Verdict::Pass(witness) => {
                dec = construct_decomposed(h, &partition, &dms)?;
                RepairReport::applied("column_shifts_per_cell", witness)
            }
            Verdict::Fail(detail) => RepairReport::failed("column_shifts_per_cell", detail),
        }
    };
    Ok(Execution {
        route: Route::Decomposed,
        formula: Some(dec.formula),
        agrees_with_formula: Some(dec.agrees_with_formula),
        replications: Some(dec.replications),
        sufficiency: None,
        gdd_params: None,
        repair: report,
        result: dec.result,
    })
}

/// Shift each cell's columns until its own paste spans; the stacked
/// design spans exactly when every cell's slice does, because rows keep
/// their cell of origin through the vertical stack.
fn repair_cells(
    h: &IncidenceMatrix,
    partition: &BlockPartition,
    dms: &mut [DifferenceMatrix],
    budget: u64,
) -> Result<Verdict<serde_json::Value, String>> {
    let mut witness = Vec::with_capacity(dms.len());
    for (i, cell) in partition.cells.iter().enumerate() {
        let blocks: Vec<Vec<usize>> = cell.iter().map(|&b| h.block(b)).collect();
        let cell_h = IncidenceMatrix::from_blocks(h.points(), &blocks)?;
        let tiles = tiles_from_incidence(&cell_h, dms[i].group(), None)?;
        match repair_spanning_dm_with_budget(&tiles, &dms[i], budget)? {
            Verdict::Pass(shifts) => {
                dms[i] = dms[i].shift_columns(&shifts)?;
                witness.push(shifts_to_json(&shifts));
            }
            Verdict::Fail(failure) => {
                return Ok(Verdict::Fail(format!("cell {i}: {failure}")));
            }
        }
    }
    Ok(Verdict::Pass(serde_json::Value::Array(witness)))
}

fn run_gdd(
    h: IncidenceMatrix,
    groups: Vec<Vec<usize>>,
    repair: bool,
    budget: u64,
) -> Result<Execution> {
    let design = GroupedDesign::new(h, groups)?;
    let params = match verify_gdd(&design)? {
        Verdict::Pass(p) => p,
        Verdict::Fail(violation) => {
            bail!("seed is not a group divisible design: {violation}")
        }
    };
    let mut result = gdd_to_sbbd(&design)?;
    let needed = !result.spanning.passes();
    let report = if !repair {
        RepairReport::not_requested(needed)
    } else if !needed {
        RepairReport::not_needed()
    } else {
        match repair_spanning_gdd_with_budget(&design, budget) {
            Ok(Verdict::Pass(perms)) => {
                let relabelled = design.apply_group_permutations(&perms)?;
                result = gdd_to_sbbd(&relabelled)?;
                let witness = serde_json::to_value(&perms).expect("permutations serialize");
                RepairReport::applied("group_permutations", witness)
            }
            Ok(Verdict::Fail(failure)) => {
                RepairReport::failed("group_permutations", failure.to_string())
            }
            // A block missing some group entirely is reported as a
            // precondition error; for a run it is still just a failed
            // repair, so fold it into the report.
            Err(e @ Error::NotVerified { .. }) => {
                RepairReport::failed("group_permutations", e.to_string())
            }
            Err(e) => return Err(e.into()),
        }
    };
    Ok(Execution {
        route: Route::Gdd,
        formula: None,
        agrees_with_formula: None,
        replications: None,
        sufficiency: None,
        gdd_params: Some(params),
        repair: report,
        result,
    })
}
