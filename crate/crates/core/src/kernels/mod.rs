//! Gram-matrix construction for quantum and classical kernels,
//! kernel-target alignment and convex kernel combination.

mod cache;

pub use cache::{dataset_hash, gram_matrix_cached, load_gram, save_gram, spec_hash};

use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qsim::{fidelity, prepare_state, FeatureMapSpec, QsimError, StateVector};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("kernel matrix has zero Frobenius norm")]
    ZeroMatrix,
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("kernel ensemble is empty")]
    EmptyEnsemble,
    #[error("invalid kernel spec: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Qsim(#[from] QsimError),
}

/// One basis kernel: a quantum fidelity kernel or a classical RBF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    Quantum(FeatureMapSpec),
    Rbf { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub name: String,
    pub kind: KernelKind,
}

impl KernelSpec {
    pub fn quantum(name: impl Into<String>, map: FeatureMapSpec) -> KernelSpec {
        KernelSpec {
            name: name.into(),
            kind: KernelKind::Quantum(map),
        }
    }

    pub fn rbf(name: impl Into<String>, gamma: f64) -> Result<KernelSpec, KernelError> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(KernelError::InvalidSpec(format!(
                "rbf gamma must be positive and finite, got {gamma}"
            )));
        }
        Ok(KernelSpec {
            name: name.into(),
            kind: KernelKind::Rbf { gamma },
        })
    }
}

/// A Gram matrix with row/column identity and a symmetry tag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    pub values: Array2<f64>,
    pub row_ids: Vec<String>,
    pub col_ids: Vec<String>,
    pub symmetric: bool,
}

impl KernelMatrix {
    pub fn shape(&self) -> (usize, usize) {
        self.values.dim()
    }

    /// Replaces the default index ids.
    pub fn with_ids(mut self, row_ids: Vec<String>, col_ids: Vec<String>) -> KernelMatrix {
        assert_eq!(row_ids.len(), self.values.nrows());
        assert_eq!(col_ids.len(), self.values.ncols());
        self.row_ids = row_ids;
        self.col_ids = col_ids;
        self
    }

    /// Largest absolute asymmetry `max |K - K^T|`; zero for exactly
    /// symmetric matrices.
    pub fn max_asymmetry(&self) -> f64 {
        let (r, c) = self.shape();
        if r != c {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..r {
            for j in (i + 1)..c {
                worst = worst.max((self.values[(i, j)] - self.values[(j, i)]).abs());
            }
        }
        worst
    }
}

fn index_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn rbf_entry(a: ArrayView1<f64>, b: ArrayView1<f64>, gamma: f64) -> f64 {
    let mut dist_sq = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let diff = x - y;
        dist_sq += diff * diff;
    }
    (-gamma * dist_sq).exp()
}

fn prepare_rows(x: ArrayView2<f64>, map: &FeatureMapSpec) -> Result<Vec<StateVector>, KernelError> {
    let rows: Vec<Vec<f64>> = x.rows().into_iter().map(|r| r.to_vec()).collect();
    rows.par_iter()
        .map(|row| prepare_state(row, map).map_err(KernelError::from))
        .collect()
}

/// Computes the Gram matrix between the rows of `a` and the rows of `b`.
///
/// Entries are independent and computed by a worker pool; every entry lands
/// in its fixed (row, col) slot, so the output is identical for any thread
/// count. When `a` and `b` are the same array the symmetric flag is set.
pub fn gram_matrix(
    a: ArrayView2<f64>,
    b: ArrayView2<f64>,
    spec: &KernelSpec,
) -> Result<KernelMatrix, KernelError> {
    if a.ncols() != b.ncols() {
        return Err(KernelError::DimensionMismatch(format!(
            "feature counts differ: {} vs {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let symmetric = a.as_ptr() == b.as_ptr() && a.dim() == b.dim();
    let (rows, cols) = (a.nrows(), b.nrows());

    let flat: Vec<f64> = match &spec.kind {
        KernelKind::Quantum(map) => {
            if a.ncols() != map.num_qubits {
                return Err(KernelError::DimensionMismatch(format!(
                    "quantum kernel expects {} features, got {}",
                    map.num_qubits,
                    a.ncols()
                )));
            }
            let states_a = prepare_rows(a, map)?;
            let states_b = if symmetric {
                Vec::new()
            } else {
                prepare_rows(b, map)?
            };
            let states_b_ref: &[StateVector] = if symmetric { &states_a } else { &states_b };
            (0..rows * cols)
                .into_par_iter()
                .map(|idx| {
                    let (i, j) = (idx / cols, idx % cols);
                    fidelity(&states_a[i], &states_b_ref[j]).expect("equal qubit counts")
                })
                .collect()
        }
        KernelKind::Rbf { gamma } => {
            let gamma = *gamma;
            (0..rows * cols)
                .into_par_iter()
                .map(|idx| {
                    let (i, j) = (idx / cols, idx % cols);
                    rbf_entry(a.row(i), b.row(j), gamma)
                })
                .collect()
        }
    };

    Ok(KernelMatrix {
        values: Array2::from_shape_vec((rows, cols), flat).expect("row-major shape"),
        row_ids: index_ids(rows),
        col_ids: index_ids(cols),
        symmetric,
    })
}

/// Symmetric Gram matrix over one dataset.
pub fn gram_matrix_symmetric(
    a: ArrayView2<f64>,
    spec: &KernelSpec,
) -> Result<KernelMatrix, KernelError> {
    gram_matrix(a, a, spec)
}

/// The ideal target kernel from binary labels: with `s = 2y - 1`, entries
/// are `s_i * s_j`.
pub fn target_kernel(y: &[u8]) -> KernelMatrix {
    let n = y.len();
    let signs: Vec<f64> = y.iter().map(|&v| 2.0 * f64::from(v) - 1.0).collect();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            values[(i, j)] = signs[i] * signs[j];
        }
    }
    KernelMatrix {
        values,
        row_ids: index_ids(n),
        col_ids: index_ids(n),
        symmetric: true,
    }
}

/// Frobenius kernel alignment `<K1,K2>_F / (||K1||_F ||K2||_F)`.
pub fn alignment(k1: &KernelMatrix, k2: &KernelMatrix) -> Result<f64, KernelError> {
    if k1.shape() != k2.shape() {
        return Err(KernelError::DimensionMismatch(format!(
            "alignment shapes differ: {:?} vs {:?}",
            k1.shape(),
            k2.shape()
        )));
    }
    let mut dot = 0.0;
    let mut norm1 = 0.0;
    let mut norm2 = 0.0;
    for (a, b) in k1.values.iter().zip(k2.values.iter()) {
        dot += a * b;
        norm1 += a * a;
        norm2 += b * b;
    }
    if norm1 == 0.0 || norm2 == 0.0 {
        return Err(KernelError::ZeroMatrix);
    }
    Ok(dot / (norm1.sqrt() * norm2.sqrt()))
}

/// Double-centers a symmetric kernel: `HKH` with `H = I - ones/n`, computed
/// entrywise as `K_ij - rowmean_i - colmean_j + totalmean`.
pub fn center_kernel(k: &KernelMatrix) -> KernelMatrix {
    let (n, m) = k.shape();
    let total = k.values.sum() / (n as f64 * m as f64);
    let row_means: Vec<f64> = (0..n).map(|i| k.values.row(i).sum() / m as f64).collect();
    let col_means: Vec<f64> = (0..m).map(|j| k.values.column(j).sum() / n as f64).collect();
    let mut values = k.values.clone();
    for i in 0..n {
        for j in 0..m {
            values[(i, j)] = k.values[(i, j)] - row_means[i] - col_means[j] + total;
        }
    }
    KernelMatrix {
        values,
        row_ids: k.row_ids.clone(),
        col_ids: k.col_ids.clone(),
        symmetric: k.symmetric,
    }
}

/// Alignment-derived combination weights plus the raw alignments behind
/// them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentWeights {
    /// Alignment of each (optionally centered) basis kernel with the
    /// (optionally centered) target kernel; 0 for degenerate members.
    pub alignments: Vec<f64>,
    /// Non-negative, sums to 1: clamped alignments normalized, or uniform
    /// when every alignment is non-positive.
    pub weights: Vec<f64>,
}

/// Computes combination weights proportional to the clamped kernel-target
/// alignments: `w_i = max(a_i, 0) / sum_j max(a_j, 0)`, falling back to
/// uniform weights when no alignment is positive. With `center_alignment`
/// both sides are double-centered before the alignment.
pub fn average_alignment_weights(
    kernels: &[&KernelMatrix],
    y: &[u8],
    center_alignment: bool,
) -> Result<AlignmentWeights, KernelError> {
    if kernels.is_empty() {
        return Err(KernelError::EmptyEnsemble);
    }
    let target = target_kernel(y);
    let target = if center_alignment {
        center_kernel(&target)
    } else {
        target
    };
    let mut alignments = Vec::with_capacity(kernels.len());
    for k in kernels {
        if k.shape() != (y.len(), y.len()) {
            return Err(KernelError::DimensionMismatch(format!(
                "kernel shape {:?} does not match {} labels",
                k.shape(),
                y.len()
            )));
        }
        let k = if center_alignment {
            center_kernel(k)
        } else {
            (*k).clone()
        };
        // A degenerate member (zero norm after centering, or a single-class
        // target) contributes alignment 0 and gets clamped out.
        let a = match alignment(&k, &target) {
            Ok(a) => a,
            Err(KernelError::ZeroMatrix) => 0.0,
            Err(e) => return Err(e),
        };
        alignments.push(a);
    }

    let clamped: Vec<f64> = alignments.iter().map(|&a| a.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    let weights = if total > 0.0 {
        clamped.iter().map(|&a| a / total).collect()
    } else {
        vec![1.0 / kernels.len() as f64; kernels.len()]
    };
    Ok(AlignmentWeights {
        alignments,
        weights,
    })
}

fn validate_weights(weights: &[f64]) -> Result<(), KernelError> {
    if weights.iter().any(|&w| w < 0.0 || !w.is_finite()) {
        return Err(KernelError::InvalidWeights(
            "weights must be non-negative and finite".to_string(),
        ));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(KernelError::InvalidWeights(format!(
            "weights sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Convex combination `K = sum_i w_i K_i`.
pub fn combine_kernels(
    kernels: &[&KernelMatrix],
    weights: &[f64],
) -> Result<KernelMatrix, KernelError> {
    if kernels.is_empty() {
        return Err(KernelError::EmptyEnsemble);
    }
    if kernels.len() != weights.len() {
        return Err(KernelError::DimensionMismatch(format!(
            "{} kernels but {} weights",
            kernels.len(),
            weights.len()
        )));
    }
    validate_weights(weights)?;
    let shape = kernels[0].shape();
    for k in kernels {
        if k.shape() != shape {
            return Err(KernelError::DimensionMismatch(format!(
                "kernel shapes differ: {:?} vs {shape:?}",
                k.shape()
            )));
        }
    }
    let mut values = Array2::zeros(shape);
    for (k, &w) in kernels.iter().zip(weights) {
        values.scaled_add(w, &k.values);
    }
    Ok(KernelMatrix {
        values,
        row_ids: kernels[0].row_ids.clone(),
        col_ids: kernels[0].col_ids.clone(),
        symmetric: kernels.iter().all(|k| k.symmetric),
    })
}

/// A basis kernel set with combination weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelEnsemble {
    pub specs: Vec<KernelSpec>,
    pub weights: Vec<f64>,
}

impl KernelEnsemble {
    pub fn new(specs: Vec<KernelSpec>, weights: Vec<f64>) -> Result<Self, KernelError> {
        if specs.is_empty() {
            return Err(KernelError::EmptyEnsemble);
        }
        if specs.len() != weights.len() {
            return Err(KernelError::DimensionMismatch(format!(
                "{} specs but {} weights",
                specs.len(),
                weights.len()
            )));
        }
        validate_weights(&weights)?;
        Ok(KernelEnsemble { specs, weights })
    }
}

/// The default five-member basis: four angle-embedding variants plus an RBF
/// with `gamma = 1/d`.
pub fn default_basis(d: usize) -> Result<Vec<KernelSpec>, KernelError> {
    use crate::qsim::{Entangler, RotationAxis};
    let map = |reps, axis, scale| FeatureMapSpec::new(d, reps, axis, scale, Entangler::Ring);
    Ok(vec![
        KernelSpec::quantum("qy_r1_s1", map(1, RotationAxis::Y, 1.0)?),
        KernelSpec::quantum("qy_r2_s1", map(2, RotationAxis::Y, 1.0)?),
        KernelSpec::quantum("qzh_r1_s1", map(1, RotationAxis::ZAfterH, 1.0)?),
        KernelSpec::quantum("qy_r1_s2", map(1, RotationAxis::Y, 2.0)?),
        KernelSpec::rbf("rbf", 1.0 / d as f64)?,
    ])
}
