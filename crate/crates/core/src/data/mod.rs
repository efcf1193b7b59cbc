//! Dataset ingestion, activity labeling, standardization and PCA.

mod jacobi;
mod pca;
mod standardize;
mod synthetic;
mod table;

pub use jacobi::jacobi_eigh;
pub use pca::{fit_pca, project_pca, PcaModel};
pub use standardize::{fit_standardizer, transform_standardize, StandardizerModel};
pub use synthetic::{gaussian_classes, stratified_split};
pub use table::{load_table, load_table_activity, LoadReport};

use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DataError {
    #[error("column `{0}` not found in CSV header")]
    MissingColumn(String),
    #[error("no usable rows after ingestion")]
    EmptyDataset,
    #[error("label `{value}` in row {row} is not binary (expected 0 or 1)")]
    NonBinaryLabel { row: usize, value: String },
    #[error("activity value {0} is not positive")]
    NonPositiveActivity(f64),
    #[error("need at least {needed} rows, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("dimension mismatch: expected {expected} columns, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("requested {k} components but data has only {d} features")]
    KTooLarge { k: usize, d: usize },
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("csv error: {0}")]
    Csv(String),
}

/// A feature matrix with binary labels, the unit flowing through the
/// preprocessing and kernel stages.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: Array2<f64>,
    pub y: Vec<u8>,
    pub feature_names: Vec<String>,
    pub ids: Vec<String>,
}

impl Dataset {
    pub fn new(
        x: Array2<f64>,
        y: Vec<u8>,
        feature_names: Vec<String>,
        ids: Vec<String>,
    ) -> Result<Self, DataError> {
        if x.nrows() != y.len() {
            return Err(DataError::DimensionMismatch {
                expected: x.nrows(),
                got: y.len(),
            });
        }
        if x.ncols() != feature_names.len() {
            return Err(DataError::DimensionMismatch {
                expected: x.ncols(),
                got: feature_names.len(),
            });
        }
        if x.nrows() != ids.len() {
            return Err(DataError::DimensionMismatch {
                expected: x.nrows(),
                got: ids.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(DataError::DegenerateData(
                "non-finite feature value".to_string(),
            ));
        }
        if y.iter().any(|&v| v > 1) {
            return Err(DataError::NonBinaryLabel {
                row: 0,
                value: "internal".to_string(),
            });
        }
        Ok(Dataset {
            x,
            y,
            feature_names,
            ids,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn n_features(&self) -> usize {
        self.x.ncols()
    }

    /// Row subset in the given index order.
    pub fn select_rows(&self, indices: &[usize]) -> Dataset {
        let mut x = Array2::zeros((indices.len(), self.n_features()));
        let mut y = Vec::with_capacity(indices.len());
        let mut ids = Vec::with_capacity(indices.len());
        for (out, &i) in indices.iter().enumerate() {
            x.row_mut(out).assign(&self.x.row(i));
            y.push(self.y[i]);
            ids.push(self.ids[i].clone());
        }
        Dataset {
            x,
            y,
            feature_names: self.feature_names.clone(),
            ids,
        }
    }
}

/// An identified activity measurement in nanomolar units.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityRecord {
    pub id: String,
    pub ic50_nm: f64,
}

/// pIC50 from an IC50 in nanomolar: `9 - log10(ic50_nM)`.
pub fn pic50(ic50_nm: f64) -> f64 {
    9.0 - ic50_nm.log10()
}

/// Binary activity label: 1 iff pIC50 >= 6.0 (IC50 at or below one
/// micromolar).
pub fn label_from_activity(record: &ActivityRecord) -> Result<u8, DataError> {
    if !(record.ic50_nm > 0.0) || !record.ic50_nm.is_finite() {
        return Err(DataError::NonPositiveActivity(record.ic50_nm));
    }
    Ok(u8::from(pic50(record.ic50_nm) >= 6.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(ic50_nm: f64) -> ActivityRecord {
        ActivityRecord {
            id: "x".to_string(),
            ic50_nm,
        }
    }

    #[test]
    fn micromolar_boundary_is_active() {
        // 1000 nM -> pIC50 exactly 6.0.
        assert_eq!(label_from_activity(&rec(1000.0)).unwrap(), 1);
    }

    #[test]
    fn hundred_micromolar_is_inactive() {
        // 100 uM = 100000 nM -> pIC50 = 4.0.
        assert_eq!(label_from_activity(&rec(100_000.0)).unwrap(), 0);
    }

    #[test]
    fn sub_nanomolar_is_active() {
        // 0.5 nM -> pIC50 ~ 9.30.
        assert_eq!(label_from_activity(&rec(0.5)).unwrap(), 1);
        assert!((pic50(0.5) - 9.301029995663981).abs() < 1e-12);
    }

    #[test]
    fn non_positive_activity_is_rejected() {
        assert!(matches!(
            label_from_activity(&rec(0.0)),
            Err(DataError::NonPositiveActivity(_))
        ));
        assert!(matches!(
            label_from_activity(&rec(-1.0)),
            Err(DataError::NonPositiveActivity(_))
        ));
    }
}
