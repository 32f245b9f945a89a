//! File formats: group descriptors, design and difference-matrix JSON,
//! and 0/1 matrices as plain text, row-hex, or JSON.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use sbbd_core::algebra::{FiniteField, FiniteGroup, GroupElement};
use sbbd_core::incidence::{field_of_order, IncidenceMatrix};

/// A group named by a short descriptor, with the field kept alongside
/// when the descriptor names one so integer entries can be read as
/// field values.
pub struct GroupContext {
    pub group: FiniteGroup,
    pub field: Option<FiniteField>,
    pub name: String,
}

/// Parses "Z12", "Z2xZ3x...", or "GF(q)".
///
/// Integer entries mean the residue for a cyclic group, the
/// lexicographic index for a product, and the field value for "GF(q)".
/// Tuple entries are raw coordinates in every case.
pub fn parse_group(name: &str) -> Result<GroupContext> {
    let trimmed = name.trim();
    if let Some(inner) = trimmed
        .strip_prefix("GF(")
        .and_then(|rest| rest.strip_suffix(')'))
    {
        let q: u32 = inner
            .trim()
            .parse()
            .with_context(|| format!("field order {inner:?} is not an integer"))?;
        let field = field_of_order(q)?;
        let group = field.additive_group().clone();
        return Ok(GroupContext {
            group,
            field: Some(field),
            name: trimmed.to_string(),
        });
    }
    let mut orders = Vec::new();
    for factor in trimmed.split(['x', 'X']) {
        let Some(digits) = factor.trim().strip_prefix('Z') else {
            bail!("unrecognized group descriptor {trimmed:?}: use \"Z12\", \"Z2xZ2xZ3\", or \"GF(8)\"");
        };
        let n: u32 = digits
            .parse()
            .with_context(|| format!("cyclic order {digits:?} is not an integer"))?;
        orders.push(n);
    }
    let group = if orders.len() == 1 {
        FiniteGroup::cyclic(orders[0])?
    } else {
        FiniteGroup::product(orders)?
    };
    Ok(GroupContext {
        group,
        field: None,
        name: trimmed.to_string(),
    })
}

impl GroupContext {
    /// Reads a JSON entry as a group element: an integer (residue, index,
    /// or field value per the descriptor) or a coordinate tuple.
    pub fn element_from_json(&self, value: &serde_json::Value) -> Result<GroupElement> {
        match value {
            serde_json::Value::Number(n) => {
                let i = n
                    .as_u64()
                    .with_context(|| format!("entry {n} is not a non-negative integer"))?
                    as usize;
                let e = match &self.field {
                    Some(field) => field.element(i)?,
                    None => self.group.element(i)?,
                };
                Ok(e)
            }
            serde_json::Value::Array(items) => {
                let mut coords = Vec::with_capacity(items.len());
                for item in items {
                    let c = item
                        .as_u64()
                        .with_context(|| format!("coordinate {item} is not a non-negative integer"))?;
                    coords.push(c as u32);
                }
                let e = GroupElement::new(coords);
                if !self.group.contains(&e) {
                    bail!("tuple {value} is not an element of {}", self.name);
                }
                Ok(e)
            }
            other => bail!("entry {other} must be an integer or a coordinate tuple"),
        }
    }

    /// Reads a full row of entries.
    pub fn row_from_json(&self, row: &[serde_json::Value]) -> Result<Vec<GroupElement>> {
        row.iter().map(|v| self.element_from_json(v)).collect()
    }
}

/// Coordinates of an element as a JSON array, the unambiguous form.
pub fn element_to_json(e: &GroupElement) -> serde_json::Value {
    serde_json::Value::Array(
        e.coords()
            .iter()
            .map(|&c| serde_json::Value::from(c))
            .collect(),
    )
}

/// Block design file: point count, blocks as point lists, optional
/// group partition for group divisible designs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignFile {
    pub points: usize,
    pub blocks: Vec<Vec<usize>>,
    #[serde(default)]
    pub groups: Option<Vec<Vec<usize>>>,
}

impl DesignFile {
    pub fn incidence(&self) -> Result<IncidenceMatrix> {
        Ok(IncidenceMatrix::from_blocks(self.points, &self.blocks)?)
    }
}

/// Difference matrix file: group descriptor plus rows of entries.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DmFile {
    pub group: String,
    pub rows: Vec<Vec<serde_json::Value>>,
}

impl DmFile {
    pub fn decode(&self) -> Result<(GroupContext, Vec<Vec<GroupElement>>)> {
        let ctx = parse_group(&self.group)?;
        let rows = self
            .rows
            .iter()
            .map(|row| ctx.row_from_json(row))
            .collect::<Result<Vec<_>>>()?;
        Ok((ctx, rows))
    }
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_design(path: &Path) -> Result<DesignFile> {
    let text = read_file(path)?;
    serde_json::from_str(&text).with_context(|| format!("{} is not a design file", path.display()))
}

pub fn load_dm(path: &Path) -> Result<DmFile> {
    let text = read_file(path)?;
    serde_json::from_str(&text)
        .with_context(|| format!("{} is not a difference matrix file", path.display()))
}

/// On-disk encodings for 0/1 matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum MatrixFormat {
    /// One row per line of '0'/'1' characters.
    Text,
    /// "rows cols" header, then one hex line per row, four columns per
    /// digit, leftmost column in the most significant bit.
    Hex,
    /// {"rows": R, "cols": C, "data": [[...], ...]}.
    Json,
}

/// Picks a format from the file extension: .json, .hex, else text.
pub fn infer_format(path: &Path) -> MatrixFormat {
    match path.extension().and_then(|e| e.to_str()) {
        Some("json") => MatrixFormat::Json,
        Some("hex") => MatrixFormat::Hex,
        _ => MatrixFormat::Text,
    }
}

#[derive(Serialize, Deserialize)]
struct MatrixFile {
    rows: usize,
    cols: usize,
    data: Vec<Vec<i64>>,
}

pub fn read_matrix(path: &Path, format: MatrixFormat) -> Result<Array2<i64>> {
    let text = read_file(path)?;
    match format {
        MatrixFormat::Text => parse_text_matrix(&text),
        MatrixFormat::Hex => parse_hex_matrix(&text),
        MatrixFormat::Json => parse_json_matrix(&text),
    }
}

pub fn write_matrix(m: &Array2<i64>, format: MatrixFormat) -> Result<String> {
    for &e in m {
        if e != 0 && e != 1 {
            bail!("matrix entry {e} is not 0/1; only design matrices have file encodings");
        }
    }
    Ok(match format {
        MatrixFormat::Text => format_text_matrix(m),
        MatrixFormat::Hex => format_hex_matrix(m),
        MatrixFormat::Json => format_json_matrix(m),
    })
}

pub fn parse_text_matrix(text: &str) -> Result<Array2<i64>> {
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let mut row = Vec::new();
        for ch in line.chars() {
            match ch {
                '0' => row.push(0),
                '1' => row.push(1),
                c if c.is_ascii_whitespace() => {}
                c => bail!("line {}: unexpected character {c:?}", lineno + 1),
            }
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    rows_to_array(rows)
}

pub fn format_text_matrix(m: &Array2<i64>) -> String {
    let mut out = String::with_capacity(m.nrows() * (m.ncols() + 1));
    for row in m.rows() {
        for &e in row {
            out.push(if e == 0 { '0' } else { '1' });
        }
        out.push('\n');
    }
    out
}

/// Integer grid with single-space separators, for information matrices.
pub fn format_int_matrix(m: &Array2<i64>) -> String {
    let mut out = String::new();
    for row in m.rows() {
        let line: Vec<String> = row.iter().map(|e| e.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn parse_hex_matrix(text: &str) -> Result<Array2<i64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().context("hex matrix is empty")?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(|w| w.parse().with_context(|| format!("bad dimension {w:?}")))
        .collect::<Result<_>>()?;
    let [nrows, ncols] = dims[..] else {
        bail!("hex header must be \"rows cols\", got {header:?}");
    };
    let digits_per_row = ncols.div_ceil(4);
    let mut rows = Vec::with_capacity(nrows);
    for (i, line) in lines.enumerate() {
        let line = line.trim();
        if line.len() != digits_per_row {
            bail!(
                "hex row {}: expected {digits_per_row} digits for {ncols} columns, got {}",
                i + 1,
                line.len()
            );
        }
        let mut row = Vec::with_capacity(ncols);
        for ch in line.chars() {
            let nibble = ch
                .to_digit(16)
                .with_context(|| format!("hex row {}: bad digit {ch:?}", i + 1))?;
            for bit in (0..4).rev() {
                row.push(((nibble >> bit) & 1) as i64);
            }
        }
        if row[ncols..].iter().any(|&b| b != 0) {
            bail!("hex row {}: nonzero padding bits past column {ncols}", i + 1);
        }
        row.truncate(ncols);
        rows.push(row);
    }
    if rows.len() != nrows {
        bail!("hex matrix declares {nrows} rows but has {}", rows.len());
    }
    rows_to_array(rows)
}

fn format_hex_matrix(m: &Array2<i64>) -> String {
    let (nrows, ncols) = (m.nrows(), m.ncols());
    let mut out = format!("{nrows} {ncols}\n");
    for row in m.rows() {
        for chunk_start in (0..ncols).step_by(4) {
            let mut nibble = 0u32;
            for offset in 0..4 {
                nibble <<= 1;
                if chunk_start + offset < ncols && row[chunk_start + offset] == 1 {
                    nibble |= 1;
                }
            }
            out.push(char::from_digit(nibble, 16).expect("nibble < 16"));
        }
        out.push('\n');
    }
    out
}

fn parse_json_matrix(text: &str) -> Result<Array2<i64>> {
    let file: MatrixFile = serde_json::from_str(text).context("not a JSON matrix file")?;
    if file.data.len() != file.rows {
        bail!("JSON matrix declares {} rows but has {}", file.rows, file.data.len());
    }
    for (i, row) in file.data.iter().enumerate() {
        if row.len() != file.cols {
            bail!("JSON matrix row {i} has {} entries, expected {}", row.len(), file.cols);
        }
    }
    rows_to_array(file.data)
}

fn format_json_matrix(m: &Array2<i64>) -> String {
    let file = MatrixFile {
        rows: m.nrows(),
        cols: m.ncols(),
        data: m.rows().into_iter().map(|r| r.to_vec()).collect(),
    };
    let mut text = serde_json::to_string(&file).expect("matrix serializes");
    text.push('\n');
    text
}

fn rows_to_array(rows: Vec<Vec<i64>>) -> Result<Array2<i64>> {
    let nrows = rows.len();
    if nrows == 0 {
        bail!("matrix has no rows");
    }
    let ncols = rows[0].len();
    for (i, row) in rows.iter().enumerate() {
        if row.len() != ncols {
            bail!("row {i} has {} entries, row 0 has {ncols}", row.len());
        }
    }
    let flat: Vec<i64> = rows.into_iter().flatten().collect();
    Ok(Array2::from_shape_vec((nrows, ncols), flat).expect("shape checked"))
}
