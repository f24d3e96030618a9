//! Dataset ingestion and table export.
//!
//! Two kinds of external records are consumed:
//! * embedding records — a primitive embedding L10(2) ↪ L26 together with
//!   the wall list of a distinguished induced chamber D0, its volume and
//!   the order of its automorphism group;
//! * pair records — rows of the 184-row table of ADE-sublattice pairs
//!   (τ, τ̄) with the derived invariants used by the pipeline.
//!
//! Loading validates every structural invariant the rest of the pipeline
//! relies on and rejects files with a field-level diagnostic.  Results of
//! orbit computations are exported as TSV or JSON via [`export_table`].

use crate::ade::ADEType;
use crate::chambers::{e10_gram, reflection_in_root, vinberg_chamber};
use crate::exact_linalg::smith_normal_form;
use crate::lattices::{l10, short_vectors, signature_of};
use crate::{Int, IntMatrix};
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::Path;

/// The 17 type names of primitive embeddings L10(2) ↪ L26, as used in the
/// `irec` column and as embedding-record file stems.
pub const EMBEDDING_TYPE_NAMES: [&str; 17] = [
    "12A", "12B", "20A", "20B", "20C", "20D", "20E", "20F", "40A", "40B",
    "40C", "40D", "40E", "96A", "96B", "96C", "infty",
];

/// A primitive embedding L10(2) ↪ L26 with its induced chamber data.
///
/// `basis_matrix` rows are the images of the ten Vinberg-basis vectors of
/// L10, in the coordinates belonging to `gram_l26`.  `walls_d0` are roots
/// of L10 (standard U ⊕ E8 coordinates) defining the walls of the induced
/// chamber D0 that contains the Vinberg chamber; each wall pairs
/// positively with the Vinberg interior point.  `vol_d0` is the number of
/// Vinberg chambers inside D0 and `stabilizer_order` the order of
/// O(L10, D0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub type_name: String,
    pub basis_matrix: Vec<Vec<i64>>,
    pub gram_l26: Vec<Vec<i64>>,
    pub walls_d0: Vec<Vec<i64>>,
    pub vol_d0: u64,
    pub stabilizer_order: u64,
}

/// One row of the 184-row (τ, τ̄) table.
///
/// `rat` is `None` where the table leaves the orbit count unknown (the
/// rows marked ×).  `irec` names the embedding record used to build the
/// model for this row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub row_number: u32,
    pub tau: String,
    pub tau_bar: String,
    pub tau_tilde: String,
    pub exists: bool,
    pub c: u8,
    pub rat: Option<u64>,
    pub irec: String,
}

#[derive(Debug, thiserror::Error)]
pub enum DataError {
    #[error("{file}: {source}")]
    Io {
        file: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: schema violation in `{field}`: {detail}")]
    Schema {
        file: String,
        field: String,
        detail: String,
    },
    #[error("{file}: invariant violation in `{field}`: {detail}")]
    Invariant {
        file: String,
        field: String,
        detail: String,
    },
}

fn schema(file: &str, field: &str, detail: impl Into<String>) -> DataError {
    DataError::Schema { file: file.into(), field: field.into(), detail: detail.into() }
}

fn invariant(file: &str, field: &str, detail: impl Into<String>) -> DataError {
    DataError::Invariant { file: file.into(), field: field.into(), detail: detail.into() }
}

/// Number of walls each embedding type's chambers have (the numeral part
/// of the type name).
pub fn expected_wall_count(type_name: &str) -> Option<usize> {
    if type_name == "infty" {
        return None;
    }
    type_name
        .strip_suffix(|c: char| c.is_ascii_alphabetic())
        .and_then(|digits| digits.parse().ok())
}

impl EmbeddingRecord {
    /// Full structural validation; `file` is used in diagnostics only.
    pub fn validate(&self, file: &str) -> Result<(), DataError> {
        if !EMBEDDING_TYPE_NAMES.contains(&self.type_name.as_str()) {
            return Err(schema(file, "type_name", format!("unknown type `{}`", self.type_name)));
        }
        if self.basis_matrix.len() != 10 || self.basis_matrix.iter().any(|r| r.len() != 26) {
            return Err(schema(file, "basis_matrix", "expected a 10×26 matrix"));
        }
        if self.gram_l26.len() != 26 || self.gram_l26.iter().any(|r| r.len() != 26) {
            return Err(schema(file, "gram_l26", "expected a 26×26 matrix"));
        }
        let b = IntMatrix::from_rows(&self.basis_matrix);
        let g26 = IntMatrix::from_rows(&self.gram_l26);
        if !g26.is_symmetric() {
            return Err(invariant(file, "gram_l26", "matrix is not symmetric"));
        }
        for i in 0..26 {
            if (g26[(i, i)].clone() % Int::from(2)) != Int::from(0) {
                return Err(invariant(file, "gram_l26", "diagonal is not even"));
            }
        }
        if g26.det().abs() != Int::one() {
            return Err(invariant(file, "gram_l26", "determinant is not ±1"));
        }
        if signature_of(&g26) != Some((1, 25)) {
            return Err(invariant(file, "gram_l26", "signature is not (1,25)"));
        }
        // basis·G26·basisᵀ = 2·(E10 Gram)
        let e10 = e10_gram();
        let induced = b.mul(&g26).mul(&b.transpose());
        for i in 0..10 {
            for j in 0..10 {
                if induced[(i, j)] != e10[(i, j)].clone() * 2 {
                    return Err(invariant(
                        file,
                        "basis_matrix",
                        "induced form is not 2·(E10 Gram)",
                    ));
                }
            }
        }
        // primitivity: Smith invariant factors of the basis are all 1
        let snf = smith_normal_form(&b);
        for i in 0..10 {
            if snf.d[(i, i)].abs() != Int::one() {
                return Err(invariant(file, "basis_matrix", "embedding is not primitive"));
            }
        }
        if let Some(n) = expected_wall_count(&self.type_name) {
            if self.walls_d0.len() != n {
                return Err(invariant(
                    file,
                    "walls_d0",
                    format!("expected {} walls, found {}", n, self.walls_d0.len()),
                ));
            }
        }
        let ambient = l10();
        let chamber = vinberg_chamber();
        let a0 = &chamber.interior;
        let mut seen = BTreeSet::new();
        for (k, w) in self.walls_d0.iter().enumerate() {
            if w.len() != 10 {
                return Err(schema(file, "walls_d0", format!("wall {k} is not a 10-vector")));
            }
            let wv: Vec<Int> = w.iter().map(|&x| Int::from(x)).collect();
            if ambient.norm(&wv) != Int::from(-2) {
                return Err(invariant(
                    file,
                    "walls_d0",
                    format!("wall {k} is not a root (norm ≠ -2)"),
                ));
            }
            if ambient.inner(&wv, a0) <= Int::from(0) {
                return Err(invariant(
                    file,
                    "walls_d0",
                    format!("wall {k} does not pair positively with the Vinberg interior"),
                ));
            }
            if !seen.insert(w.clone()) {
                return Err(invariant(file, "walls_d0", format!("wall {k} is a duplicate")));
            }
        }
        self.reflexive_simplicity_spot_check(file)?;
        Ok(())
    }

    /// For five pseudo-randomly chosen walls r, check that the reflection
    /// s_r carries the wall system of D0 to a root system sharing the
    /// facet r: s_r fixes r up to sign, maps every wall to a root, and
    /// flips the side of the interior point relative to r only.
    fn reflexive_simplicity_spot_check(&self, file: &str) -> Result<(), DataError> {
        if self.walls_d0.is_empty() {
            return Ok(());
        }
        let ambient = l10();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_da7a);
        for _ in 0..5 {
            let k = rng.gen_range(0..self.walls_d0.len());
            let r: Vec<Int> = self.walls_d0[k].iter().map(|&x| Int::from(x)).collect();
            let s = reflection_in_root(&ambient, &r);
            let st = s.transpose();
            for (j, w) in self.walls_d0.iter().enumerate() {
                let wv: Vec<Int> = w.iter().map(|&x| Int::from(x)).collect();
                let img = st.mul_vec(&wv);
                if ambient.norm(&img) != Int::from(-2) {
                    return Err(invariant(
                        file,
                        "walls_d0",
                        format!("reflection in wall {k} maps wall {j} off the root system"),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The L26 lattice of this record.
    pub fn l26(&self) -> crate::lattices::Lattice {
        crate::lattices::Lattice::new(IntMatrix::from_rows(&self.gram_l26))
            .expect("validated gram matrix")
    }

    /// The embedding L10(2) ↪ L26 (basis rows in L26 coordinates).
    pub fn embedding(&self) -> crate::lattices::Embedding {
        crate::lattices::Embedding::new(self.l26(), IntMatrix::from_rows(&self.basis_matrix))
    }

    /// The induced chamber D0 in L10, seeded on the Vinberg interior.
    pub fn chamber_d0(&self) -> crate::chambers::Chamber {
        let walls: Vec<Vec<Int>> = self
            .walls_d0
            .iter()
            .map(|w| w.iter().map(|&x| Int::from(x)).collect())
            .collect();
        let interior = vinberg_chamber().interior;
        crate::chambers::Chamber::from_inequalities(l10(), walls, interior)
    }
}

/// Parse an ADE type string, allowing `0` for the empty type.
pub fn parse_ade(s: &str) -> Result<ADEType, String> {
    if s == "0" {
        return Ok(ADEType::empty());
    }
    s.parse::<ADEType>().map_err(|e| format!("{e:?}"))
}

/// Does the root lattice of type `sub` embed into the root lattice of
/// type `sup` as a sub-root-system?  Decided by backtracking: the simple
/// roots of `sub` are mapped to roots of `sup` with matching pairings.
pub fn is_sub_root_system(sub: &ADEType, sup: &ADEType) -> bool {
    if sub.rank() == 0 {
        return true;
    }
    if sub.rank() > sup.rank() || sub.num_roots() > sup.num_roots() {
        return false;
    }
    let gs = sub.standard_gram();
    let lat = crate::lattices::Lattice::new(sup.standard_gram()).unwrap();
    let roots = short_vectors(&lat, -2).unwrap();
    let n = sub.rank();
    let mut images: Vec<usize> = Vec::with_capacity(n);
    fn rec(
        gs: &IntMatrix,
        lat: &crate::lattices::Lattice,
        roots: &[Vec<Int>],
        images: &mut Vec<usize>,
        n: usize,
    ) -> bool {
        let i = images.len();
        if i == n {
            return true;
        }
        'cand: for (ci, cand) in roots.iter().enumerate() {
            for (j, &pj) in images.iter().enumerate() {
                if lat.inner(cand, &roots[pj]) != gs[(i, j)] {
                    continue 'cand;
                }
            }
            images.push(ci);
            if rec(gs, lat, roots, images, n) {
                return true;
            }
            images.pop();
        }
        false
    }
    rec(&gs, &lat, &roots, &mut images, n)
}

impl PairRecord {
    pub fn validate(&self, file: &str) -> Result<(), DataError> {
        let field = format!("row {}", self.row_number);
        if !(1..=184).contains(&self.row_number) {
            return Err(schema(file, &field, "row_number out of range 1–184"));
        }
        if !(self.c == 1 || self.c == 2) {
            return Err(schema(file, &field, "c must be 1 or 2"));
        }
        if !EMBEDDING_TYPE_NAMES.contains(&self.irec.as_str()) {
            return Err(schema(file, &field, format!("unknown irec `{}`", self.irec)));
        }
        let tau = parse_ade(&self.tau)
            .map_err(|e| schema(file, &field, format!("tau: {e}")))?;
        let tau_bar = parse_ade(&self.tau_bar)
            .map_err(|e| schema(file, &field, format!("tau_bar: {e}")))?;
        parse_ade(&self.tau_tilde)
            .map_err(|e| schema(file, &field, format!("tau_tilde: {e}")))?;
        if tau.rank() != tau_bar.rank() {
            return Err(invariant(file, &field, "tau and tau_bar have different ranks"));
        }
        if !is_sub_root_system(&tau, &tau_bar) {
            return Err(invariant(
                file,
                &field,
                "tau is not a sub-root-system of tau_bar",
            ));
        }
        Ok(())
    }
}

/// Load and validate the dataset from a directory with layout
/// `embeddings/<type>.json` and `pairs/table184.json`.
pub fn load_dataset(dir: &Path) -> Result<(Vec<EmbeddingRecord>, Vec<PairRecord>), DataError> {
    let emb_dir = dir.join("embeddings");
    let read = |p: &Path| -> Result<String, DataError> {
        std::fs::read_to_string(p).map_err(|e| DataError::Io {
            file: p.display().to_string(),
            source: e,
        })
    };
    let mut names: Vec<_> = std::fs::read_dir(&emb_dir)
        .map_err(|e| DataError::Io { file: emb_dir.display().to_string(), source: e })?
        .filter_map(|entry| entry.ok().map(|d| d.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    names.sort();
    let mut embeddings = Vec::new();
    for path in names {
        let file = path.display().to_string();
        let text = read(&path)?;
        let rec: EmbeddingRecord = serde_json::from_str(&text)
            .map_err(|e| schema(&file, "<json>", e.to_string()))?;
        rec.validate(&file)?;
        embeddings.push(rec);
    }
    let pairs_path = dir.join("pairs").join("table184.json");
    let file = pairs_path.display().to_string();
    let text = read(&pairs_path)?;
    let pairs: Vec<PairRecord> = serde_json::from_str(&text)
        .map_err(|e| schema(&file, "<json>", e.to_string()))?;
    let mut seen = BTreeSet::new();
    for rec in &pairs {
        rec.validate(&file)?;
        if !seen.insert(rec.row_number) {
            return Err(schema(&file, "row_number", format!("duplicate row {}", rec.row_number)));
        }
    }
    Ok((embeddings, pairs))
}

/// Write one embedding record to `dir/embeddings/<type>.json`.
pub fn save_embedding(dir: &Path, rec: &EmbeddingRecord) -> Result<(), DataError> {
    let emb_dir = dir.join("embeddings");
    std::fs::create_dir_all(&emb_dir)
        .map_err(|e| DataError::Io { file: emb_dir.display().to_string(), source: e })?;
    let path = emb_dir.join(format!("{}.json", rec.type_name));
    let text = serde_json::to_string_pretty(rec).expect("serializable record");
    std::fs::write(&path, text)
        .map_err(|e| DataError::Io { file: path.display().to_string(), source: e })
}

/// Write the pair table to `dir/pairs/table184.json`.
pub fn save_pairs(dir: &Path, pairs: &[PairRecord]) -> Result<(), DataError> {
    let pairs_dir = dir.join("pairs");
    std::fs::create_dir_all(&pairs_dir)
        .map_err(|e| DataError::Io { file: pairs_dir.display().to_string(), source: e })?;
    let path = pairs_dir.join("table184.json");
    let text = serde_json::to_string_pretty(pairs).expect("serializable records");
    std::fs::write(&path, text)
        .map_err(|e| DataError::Io { file: path.display().to_string(), source: e })
}

/// A generic result table (fibration, curve or RDP summaries).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Tsv,
    Json,
}

/// Serialize a result table; rows are emitted in lexicographic order for
/// stability regardless of computation order.
pub fn export_table(table: &ResultTable, format: ExportFormat) -> Vec<u8> {
    let mut rows = table.rows.clone();
    rows.sort();
    match format {
        ExportFormat::Tsv => {
            let mut out = String::new();
            out.push_str(&table.header.join("\t"));
            out.push('\n');
            for r in &rows {
                out.push_str(&r.join("\t"));
                out.push('\n');
            }
            out.into_bytes()
        }
        ExportFormat::Json => {
            let sorted = ResultTable { header: table.header.clone(), rows };
            let mut out = serde_json::to_vec_pretty(&sorted).expect("serializable table");
            out.push(b'\n');
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn export_empty_table_is_header_only() {
        let t = ResultTable {
            header: vec!["non-multiple".into(), "multiple".into(), "orbits".into()],
            rows: vec![],
        };
        let tsv = export_table(&t, ExportFormat::Tsv);
        assert_eq!(String::from_utf8(tsv).unwrap(), "non-multiple\tmultiple\torbits\n");
    }

    #[test]
    fn export_formats_carry_identical_data() {
        let t = ResultTable {
            header: vec!["type".into(), "n".into()],
            rows: vec![
                vec!["E8".into(), "1".into()],
                vec!["A1".into(), "4".into()],
            ],
        };
        let tsv = String::from_utf8(export_table(&t, ExportFormat::Tsv)).unwrap();
        let json: ResultTable =
            serde_json::from_slice(&export_table(&t, ExportFormat::Json)).unwrap();
        // same sorted rows in both formats
        let tsv_rows: Vec<Vec<String>> = tsv
            .lines()
            .skip(1)
            .map(|l| l.split('\t').map(str::to_owned).collect())
            .collect();
        assert_eq!(tsv_rows, json.rows);
        assert!(json.rows[0][0] == "A1"); // lexicographic order
    }

    #[test]
    fn sub_root_system_checks() {
        let t = |s: &str| parse_ade(s).unwrap();
        assert!(is_sub_root_system(&t("4A1"), &t("D4")));
        assert!(is_sub_root_system(&t("A2"), &t("E6")));
        assert!(is_sub_root_system(&t("2D4"), &t("E8")));
        assert!(is_sub_root_system(&t("D5"), &t("D5")));
        assert!(!is_sub_root_system(&t("A2"), &t("2A1")));
        assert!(!is_sub_root_system(&t("D4"), &t("A4")));
        assert!(is_sub_root_system(&t("0"), &t("A1")));
    }

    #[test]
    fn wall_count_from_type_name() {
        assert_eq!(expected_wall_count("96C"), Some(96));
        assert_eq!(expected_wall_count("12A"), Some(12));
        assert_eq!(expected_wall_count("40E"), Some(40));
        assert_eq!(expected_wall_count("infty"), None);
    }
}
