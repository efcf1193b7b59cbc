//! The benchmark run report and its serialization helpers.
//!
//! Every number in the report is recomputable from the persisted artifacts:
//! AUCs from the score CSVs, weights from the kernel dumps, eigenvalues from
//! the serialized PCA model. Timing fields are the only non-deterministic
//! content; [`canonical_without_timings`] strips them for comparisons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use qmkl_core::eval::ConfusionReport;

use crate::config::PipelineConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    /// Effective top-level seed (after any command-line override).
    pub seed: u64,
    pub dataset: DatasetSummary,
    pub preprocessing: PreprocessingSummary,
    pub kernels: Vec<KernelSummary>,
    pub models: Vec<ModelSummary>,
    /// Echo of the configuration, with the output directory normalized out.
    pub config: PipelineConfig,
    /// Wall-clock stage timings in seconds; excluded from determinism
    /// comparisons.
    pub timings_s: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub train_rows: usize,
    pub test_rows: usize,
    pub feature_count: usize,
    pub train_dropped_rows: usize,
    pub test_dropped_rows: usize,
    /// SHA-256 of the ingested train/test feature matrices.
    pub train_features_hash: String,
    pub test_features_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreprocessingSummary {
    pub zero_variance_features: Vec<String>,
    pub pca_components: usize,
    pub pca_eigenvalues: Vec<f64>,
    /// Eigenvalue share of the total variance captured by the retained
    /// components.
    pub pca_explained_fraction: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSummary {
    pub name: String,
    pub alignment: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub name: String,
    pub auc: f64,
    pub confusion: ConfusionReport,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn model(&self, name: &str) -> Option<&ModelSummary> {
        self.models.iter().find(|m| m.name == name)
    }
}

/// Re-serializes a report JSON with the timing fields removed, for
/// byte-level determinism comparisons.
pub fn canonical_without_timings(report_json: &str) -> Result<String, serde_json::Error> {
    let mut value: serde_json::Value = serde_json::from_str(report_json)?;
    if let Some(map) = value.as_object_mut() {
        map.remove("timings_s");
    }
    serde_json::to_string_pretty(&value)
}
