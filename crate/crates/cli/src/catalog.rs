//! Bundled catalog of BIBD parameter sets whose block count is a prime
//! power, each the seed half of a single-route construction.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

const CATALOG_JSON: &str = include_str!("../data/catalog.json");

#[derive(Debug, Deserialize)]
pub struct Catalog {
    pub version: u32,
    pub description: String,
    pub entries: Vec<CatalogEntry>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
pub struct CatalogEntry {
    pub v: u64,
    pub b: u64,
    pub r: u64,
    pub k: u64,
    pub lambda: u64,
    #[serde(default)]
    pub remark: String,
}

impl CatalogEntry {
    /// bk = vr: both sides count incidences.
    pub fn count_identity(&self) -> (u64, u64) {
        (self.b * self.k, self.v * self.r)
    }

    /// λ(v−1) = r(k−1): both sides count pairs through a point.
    pub fn pair_identity(&self) -> (u64, u64) {
        (self.lambda * (self.v - 1), self.r * (self.k - 1))
    }

    pub fn is_consistent(&self) -> bool {
        let (cl, cr) = self.count_identity();
        let (pl, pr) = self.pair_identity();
        cl == cr && pl == pr
    }

    /// Λ the single-route paste with a (b, b, 1) difference matrix
    /// yields: (br, bλ, r², r²).
    pub fn predicted_lambda(&self) -> [u64; 4] {
        [
            self.b * self.r,
            self.b * self.lambda,
            self.r * self.r,
            self.r * self.r,
        ]
    }
}

pub fn load() -> Result<Catalog> {
    let catalog: Catalog =
        serde_json::from_str(CATALOG_JSON).context("bundled catalog does not parse")?;
    if catalog.entries.is_empty() {
        bail!("bundled catalog has no entries");
    }
    Ok(catalog)
}
