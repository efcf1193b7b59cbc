//! Principal component analysis via symmetric Jacobi eigendecomposition.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::jacobi::jacobi_eigh;
use super::DataError;

const JACOBI_TOL: f64 = 1e-12;

/// Fitted PCA: centering mean, orthonormal components (columns, d x k) and
/// the matching sample-covariance eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    pub components: Array2<f64>,
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    pub fn n_components(&self) -> usize {
        self.components.ncols()
    }
}

/// Fits the top-`k` principal components of the sample covariance
/// (1/(n-1) normalization) of `x`.
///
/// Sign convention: the largest-magnitude entry of each component is
/// positive, which makes the decomposition reproducible across runs.
pub fn fit_pca(x: ArrayView2<f64>, k: usize) -> Result<PcaModel, DataError> {
    let n = x.nrows();
    let d = x.ncols();
    if n < 2 {
        return Err(DataError::DegenerateData(format!(
            "PCA needs at least 2 rows, got {n}"
        )));
    }
    if k == 0 || k > d {
        return Err(DataError::KTooLarge { k, d });
    }

    let mean: Array1<f64> = x.mean_axis(Axis(0)).expect("n >= 2");
    let centered = &x - &mean.view().insert_axis(Axis(0));
    let covariance = centered.t().dot(&centered) / (n as f64 - 1.0);

    let (values, vectors) =
        jacobi_eigh(covariance.view(), JACOBI_TOL).map_err(DataError::DegenerateData)?;

    // Sort eigenpairs by descending eigenvalue; ties keep original order.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));

    let mut components = Array2::zeros((d, k));
    let mut eigenvalues = Vec::with_capacity(k);
    for (col, &src) in order.iter().take(k).enumerate() {
        let mut component: Vec<f64> = vectors.column(src).to_vec();
        let dominant = component
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| {
                a.abs()
                    .total_cmp(&b.abs())
                    .then(ib.cmp(ia)) // first occurrence wins ties
            })
            .map(|(i, _)| i)
            .expect("d >= 1");
        if component[dominant] < 0.0 {
            for v in &mut component {
                *v = -*v;
            }
        }
        for (row, &v) in component.iter().enumerate() {
            components[(row, col)] = v;
        }
        eigenvalues.push(values[src]);
    }

    Ok(PcaModel {
        mean: mean.to_vec(),
        components,
        eigenvalues,
    })
}

/// Projects rows onto the fitted components: `(x - mean) . components`.
pub fn project_pca(model: &PcaModel, x: ArrayView2<f64>) -> Result<Array2<f64>, DataError> {
    if x.ncols() != model.mean.len() {
        return Err(DataError::DimensionMismatch {
            expected: model.mean.len(),
            got: x.ncols(),
        });
    }
    let mean = Array1::from(model.mean.clone());
    let centered = &x - &mean.view().insert_axis(Axis(0));
    Ok(centered.dot(&model.components))
}
