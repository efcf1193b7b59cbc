//! Disk cache for Gram matrices, keyed by dataset and spec hashes.
//!
//! Format (`qmkl-gram v1`, plain text):
//!
//! ```text
//! qmkl-gram v1
//! spec <hex sha256 of the kernel spec>
//! rows <hex sha256 of the row dataset> <row count>
//! cols <hex sha256 of the column dataset> <column count>
//! symmetric <0|1>
//! row_ids <JSON array>
//! col_ids <JSON array>
//! <one line per row: entries separated by single spaces>
//! ```
//!
//! Entries are written with Rust's shortest round-trip float formatting, so
//! a reloaded matrix is bit-identical to the one written.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ndarray::{Array2, ArrayView2};
use sha2::{Digest, Sha256};

use super::{gram_matrix, KernelError, KernelMatrix, KernelSpec};

const MAGIC: &str = "qmkl-gram v1";

/// SHA-256 over the shape and little-endian bytes of a feature matrix.
pub fn dataset_hash(x: ArrayView2<f64>) -> String {
    let mut hasher = Sha256::new();
    hasher.update((x.nrows() as u64).to_le_bytes());
    hasher.update((x.ncols() as u64).to_le_bytes());
    for v in x.iter() {
        hasher.update(v.to_le_bytes());
    }
    hex(&hasher.finalize())
}

/// SHA-256 over the canonical JSON encoding of a kernel spec.
pub fn spec_hash(spec: &KernelSpec) -> String {
    let encoded = serde_json::to_string(spec).expect("kernel specs serialize");
    let mut hasher = Sha256::new();
    hasher.update(encoded.as_bytes());
    hex(&hasher.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn cache_file(dir: &Path, spec: &KernelSpec, row_hash: &str, col_hash: &str) -> PathBuf {
    let spec_h = spec_hash(spec);
    dir.join(format!(
        "{}-{}-{}x{}.gram",
        spec.name,
        &spec_h[..12],
        &row_hash[..12],
        &col_hash[..12]
    ))
}

/// Writes a Gram matrix with its provenance header.
pub fn save_gram(
    path: &Path,
    matrix: &KernelMatrix,
    spec_hash_hex: &str,
    row_hash: &str,
    col_hash: &str,
) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let (rows, cols) = matrix.shape();
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!("spec {spec_hash_hex}\n"));
    out.push_str(&format!("rows {row_hash} {rows}\n"));
    out.push_str(&format!("cols {col_hash} {cols}\n"));
    out.push_str(&format!("symmetric {}\n", u8::from(matrix.symmetric)));
    out.push_str(&format!(
        "row_ids {}\n",
        serde_json::to_string(&matrix.row_ids).expect("ids serialize")
    ));
    out.push_str(&format!(
        "col_ids {}\n",
        serde_json::to_string(&matrix.col_ids).expect("ids serialize")
    ));
    for i in 0..rows {
        let line: Vec<String> = matrix.values.row(i).iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    let mut file = fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

/// Reads a cached Gram matrix; `None` when the file is absent, malformed or
/// keyed differently than expected.
pub fn load_gram(
    path: &Path,
    expected_spec_hash: &str,
    expected_row_hash: &str,
    expected_col_hash: &str,
) -> Option<KernelMatrix> {
    let text = fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    if lines.next()? != MAGIC {
        return None;
    }
    let field = |line: &str, tag: &str| -> Option<String> {
        line.strip_prefix(tag)
            .and_then(|r| r.strip_prefix(' '))
            .map(str::to_string)
    };
    let spec = field(lines.next()?, "spec")?;
    let rows_line = field(lines.next()?, "rows")?;
    let cols_line = field(lines.next()?, "cols")?;
    let symmetric = field(lines.next()?, "symmetric")? == "1";
    let row_ids: Vec<String> = serde_json::from_str(&field(lines.next()?, "row_ids")?).ok()?;
    let col_ids: Vec<String> = serde_json::from_str(&field(lines.next()?, "col_ids")?).ok()?;

    let mut rows_parts = rows_line.split_whitespace();
    let row_hash = rows_parts.next()?;
    let rows: usize = rows_parts.next()?.parse().ok()?;
    let mut cols_parts = cols_line.split_whitespace();
    let col_hash = cols_parts.next()?;
    let cols: usize = cols_parts.next()?.parse().ok()?;

    if spec != expected_spec_hash
        || row_hash != expected_row_hash
        || col_hash != expected_col_hash
        || row_ids.len() != rows
        || col_ids.len() != cols
    {
        return None;
    }

    let mut flat = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let line = lines.next()?;
        for token in line.split(' ') {
            flat.push(token.parse::<f64>().ok()?);
        }
    }
    if flat.len() != rows * cols {
        return None;
    }
    Some(KernelMatrix {
        values: Array2::from_shape_vec((rows, cols), flat).ok()?,
        row_ids,
        col_ids,
        symmetric,
    })
}

/// Computes a Gram matrix, going through the on-disk cache in `dir`.
///
/// On a hit the stored values are returned bit-identically, rekeyed to the
/// requested ids; on a miss the matrix is computed, stored and returned.
pub fn gram_matrix_cached(
    dir: &Path,
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    spec: &KernelSpec,
    row_ids: &[String],
    col_ids: &[String],
) -> Result<KernelMatrix, KernelError> {
    let row_hash = dataset_hash(a);
    let col_hash = dataset_hash(b);
    let spec_h = spec_hash(spec);
    let path = cache_file(dir, spec, &row_hash, &col_hash);
    if let Some(hit) = load_gram(&path, &spec_h, &row_hash, &col_hash) {
        return Ok(hit.with_ids(row_ids.to_vec(), col_ids.to_vec()));
    }
    let computed =
        gram_matrix(a, b, spec)?.with_ids(row_ids.to_vec(), col_ids.to_vec());
    save_gram(&path, &computed, &spec_h, &row_hash, &col_hash)
        .map_err(|e| KernelError::InvalidSpec(format!("cache write failed: {e}")))?;
    Ok(computed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::gram_matrix_symmetric;
    use ndarray::array;

    #[test]
    fn round_trip_is_bit_exact() {
        let x = array![[0.1, 0.2], [1.0 / 3.0, -0.4], [1.2e-7, 0.3]];
        let spec = KernelSpec::rbf("rbf", 0.37).unwrap();
        let k = gram_matrix_symmetric(x.view(), &spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.gram");
        let sh = spec_hash(&spec);
        let dh = dataset_hash(x.view());
        save_gram(&path, &k, &sh, &dh, &dh).unwrap();
        let loaded = load_gram(&path, &sh, &dh, &dh).unwrap();
        assert_eq!(loaded.values, k.values);
        assert_eq!(loaded.symmetric, k.symmetric);
        assert_eq!(loaded.row_ids, k.row_ids);
    }

    #[test]
    fn mismatched_keys_miss() {
        let x = array![[0.5], [1.5]];
        let spec = KernelSpec::rbf("rbf", 1.0).unwrap();
        let k = gram_matrix_symmetric(x.view(), &spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.gram");
        let dh = dataset_hash(x.view());
        save_gram(&path, &k, &spec_hash(&spec), &dh, &dh).unwrap();
        assert!(load_gram(&path, "deadbeef", &dh, &dh).is_none());
        assert!(load_gram(&path, &spec_hash(&spec), "deadbeef", &dh).is_none());
    }

    #[test]
    fn cached_gram_matches_direct_computation() {
        let x = array![[0.1, 0.9], [0.4, -0.2], [1.3, 0.5]];
        let spec = KernelSpec::rbf("rbf", 0.25).unwrap();
        let ids: Vec<String> = vec!["a".into(), "b".into(), "c".into()];
        let dir = tempfile::tempdir().unwrap();
        let first =
            gram_matrix_cached(dir.path(), x.view(), x.view(), &spec, &ids, &ids).unwrap();
        let second =
            gram_matrix_cached(dir.path(), x.view(), x.view(), &spec, &ids, &ids).unwrap();
        let direct = gram_matrix_symmetric(x.view(), &spec).unwrap();
        assert_eq!(first.values, direct.values);
        assert_eq!(first.values, second.values);
        assert_eq!(second.row_ids, ids);
        // One cache file exists after both calls.
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn dataset_hash_is_sensitive_to_values_and_shape() {
        let a = array![[1.0, 2.0]];
        let b = array![[1.0], [2.0]];
        let c = array![[1.0, 2.000001]];
        assert_ne!(dataset_hash(a.view()), dataset_hash(b.view()));
        assert_ne!(dataset_hash(a.view()), dataset_hash(c.view()));
        assert_eq!(dataset_hash(a.view()), dataset_hash(a.view()));
    }
}
