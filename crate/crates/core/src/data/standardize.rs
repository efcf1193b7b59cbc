//! Per-feature standardization to mean 0, standard deviation 1.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};

use super::DataError;

/// Means and population standard deviations fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizerModel {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Features whose training variance is exactly zero; they transform to 0.
    pub zero_variance: Vec<bool>,
}

/// Fits per-feature mean and population (1/n) standard deviation.
pub fn fit_standardizer(x: ArrayView2<f64>) -> Result<StandardizerModel, DataError> {
    let n = x.nrows();
    if n < 2 {
        return Err(DataError::TooFewRows { needed: 2, got: n });
    }
    let d = x.ncols();
    let mut means = Vec::with_capacity(d);
    let mut stds = Vec::with_capacity(d);
    let mut zero_variance = Vec::with_capacity(d);
    for j in 0..d {
        let col = x.column(j);
        let mean = col.sum() / n as f64;
        let var = col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let std = var.sqrt();
        means.push(mean);
        stds.push(std);
        zero_variance.push(std == 0.0);
    }
    Ok(StandardizerModel {
        means,
        stds,
        zero_variance,
    })
}

/// Applies `(x - mean) / std` per feature; zero-variance features map to 0.
pub fn transform_standardize(
    model: &StandardizerModel,
    x: ArrayView2<f64>,
) -> Result<Array2<f64>, DataError> {
    if x.ncols() != model.means.len() {
        return Err(DataError::DimensionMismatch {
            expected: model.means.len(),
            got: x.ncols(),
        });
    }
    let mut out = x.to_owned();
    for j in 0..model.means.len() {
        let mean = model.means[j];
        let std = model.stds[j];
        let zero = model.zero_variance[j];
        for v in out.column_mut(j).iter_mut() {
            *v = if zero { 0.0 } else { (*v - mean) / std };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn two_point_column() {
        let x = array![[1.0], [3.0]];
        let m = fit_standardizer(x.view()).unwrap();
        assert_eq!(m.means, vec![2.0]);
        assert_eq!(m.stds, vec![1.0]);
    }

    #[test]
    fn constant_column_is_flagged_and_maps_to_zero() {
        let x = array![[5.0, 1.0], [5.0, 2.0], [5.0, 3.0]];
        let m = fit_standardizer(x.view()).unwrap();
        assert!(m.zero_variance[0]);
        assert!(!m.zero_variance[1]);
        let t = transform_standardize(&m, x.view()).unwrap();
        assert!(t.column(0).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn population_std_convention() {
        let x = array![[0.0], [0.0], [3.0], [3.0]];
        let m = fit_standardizer(x.view()).unwrap();
        assert_eq!(m.means, vec![1.5]);
        assert_eq!(m.stds, vec![1.5]);
    }

    #[test]
    fn transformed_training_data_has_zero_mean_unit_std() {
        let x = array![[1.0, -2.0], [4.0, 0.5], [2.5, 9.0], [0.0, 1.0]];
        let m = fit_standardizer(x.view()).unwrap();
        let t = transform_standardize(&m, x.view()).unwrap();
        let tm = fit_standardizer(t.view()).unwrap();
        for j in 0..2 {
            assert!(tm.means[j].abs() < 1e-12);
            assert!((tm.stds[j] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn too_few_rows_errors() {
        let x = array![[1.0, 2.0]];
        assert!(matches!(
            fit_standardizer(x.view()),
            Err(DataError::TooFewRows { .. })
        ));
    }

    #[test]
    fn dimension_mismatch_errors() {
        let x = array![[1.0], [2.0]];
        let m = fit_standardizer(x.view()).unwrap();
        let wrong = array![[1.0, 2.0]];
        assert!(matches!(
            transform_standardize(&m, wrong.view()),
            Err(DataError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn mean_input_maps_to_zero_vector() {
        let x = array![[1.0, 10.0], [3.0, 20.0]];
        let m = fit_standardizer(x.view()).unwrap();
        let probe = array![[2.0, 15.0]];
        let t = transform_standardize(&m, probe.view()).unwrap();
        assert!(t.iter().all(|&v| v == 0.0));
    }
}
