//! Serialization helpers for the staged work files under target/datagen.

use anyhow::{Context, Result};
use chamber_forge_core::{Int, IntMatrix};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::str::FromStr;

pub fn mat_to_strings(m: &IntMatrix) -> Vec<Vec<String>> {
    (0..m.rows)
        .map(|i| m.row(i).iter().map(|x| x.to_string()).collect())
        .collect()
}

pub fn strings_to_mat(rows: &[Vec<String>]) -> Result<IntMatrix> {
    let rows: Vec<Vec<Int>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|s| Int::from_str(s).context("bad integer in cache"))
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(IntMatrix::from_big_rows(&rows))
}

pub fn vec_to_strings(v: &[Int]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}


#[derive(Serialize, Deserialize)]
pub struct GenusCache {
    /// negative-definite Gram matrices, one per class
    pub grams: Vec<Vec<Vec<String>>>,
    /// (N2, N4, N6, N8) per class
    pub theta_heads: Vec<Vec<usize>>,
}

/// One glued embedding with its walked chamber data.
#[derive(Serialize, Deserialize)]
pub struct ClassCache {
    pub index: usize,
    pub gram_l26: Vec<Vec<String>>,
    pub s_basis: Vec<Vec<String>>,
    pub k_basis: Vec<Vec<String>>,
    pub k_gram: Vec<Vec<String>>,
    pub weyl: Vec<String>,
    /// None when the induced chamber has infinitely many walls
    pub walls: Option<Vec<Vec<String>>>,
    pub pairs: Option<usize>,
    pub n4k: usize,
    pub stabilizer_order: Option<u64>,
}

pub fn work_dir() -> PathBuf {
    PathBuf::from(
        std::env::var("CHAMBER_FORGE_WORK")
            .unwrap_or_else(|_| "target/datagen".into()),
    )
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let s = serde_json::to_string(value)?;
    std::fs::write(path, s).with_context(|| format!("writing {path:?}"))?;
    Ok(())
}

pub fn load_json<T: for<'a> Deserialize<'a>>(path: &Path) -> Result<T> {
    let s = std::fs::read_to_string(path)
        .with_context(|| format!("reading {path:?}"))?;
    Ok(serde_json::from_str(&s)?)
}
