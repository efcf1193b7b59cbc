//! Kernel SVM on precomputed Gram matrices, trained by simplified
//! sequential minimal optimization.
//!
//! The optimizer sweeps candidates in index order and picks the second index
//! of each working pair uniformly at random from a seeded generator, so a
//! fitted model is a pure function of `(K, y, params)`. Precomputed n x n
//! kernels at the few-hundred-row scale need no working-set heuristics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kernels::KernelMatrix;

/// Hard stop on total optimization sweeps, bounding runtime when `tol` is
/// set tighter than the problem supports.
const MAX_TOTAL_SWEEPS: usize = 10_000;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SvmError {
    #[error("training labels contain a single class")]
    SingleClassTraining,
    #[error("kernel matrix is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("kernel column ids do not match model training ids")]
    IdMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Box constraint on the dual variables.
    pub c: f64,
    /// KKT violation tolerance.
    pub tol: f64,
    /// Consecutive sweeps without an update before stopping.
    pub max_passes: usize,
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tol: 1e-3,
            max_passes: 50,
            seed: 0,
        }
    }
}

impl SvmParams {
    fn validate(&self) -> Result<(), SvmError> {
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(SvmError::InvalidParams(format!("C must be positive, got {}", self.c)));
        }
        if !(self.tol > 0.0) || !self.tol.is_finite() {
            return Err(SvmError::InvalidParams(format!(
                "tol must be positive, got {}",
                self.tol
            )));
        }
        if self.max_passes == 0 {
            return Err(SvmError::InvalidParams("max_passes must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// A fitted model: `alpha_y[i] = alpha_i * s_i` with `s = 2y - 1`, plus the
/// bias and the ids of the training rows the dual variables refer to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub alpha_y: Vec<f64>,
    pub bias: f64,
    pub support_indices: Vec<usize>,
    pub train_ids: Vec<String>,
    /// Dual objective recorded after each optimization sweep.
    pub objective_curve: Vec<f64>,
}

fn dual_objective(alpha: &[f64], signs: &[f64], k: &KernelMatrix) -> f64 {
    let n = alpha.len();
    let mut quad = 0.0;
    for i in 0..n {
        if alpha[i] == 0.0 {
            continue;
        }
        for j in 0..n {
            quad += alpha[i] * alpha[j] * signs[i] * signs[j] * k.values[(i, j)];
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Trains the dual on a precomputed symmetric train Gram matrix.
pub fn train_svm(
    k_train: &KernelMatrix,
    y: &[u8],
    params: &SvmParams,
) -> Result<SvmModel, SvmError> {
    params.validate()?;
    let (rows, cols) = k_train.shape();
    if rows != cols {
        return Err(SvmError::NotSymmetric(format!("matrix is {rows}x{cols}")));
    }
    if rows != y.len() {
        return Err(SvmError::DimensionMismatch(format!(
            "{rows} kernel rows but {} labels",
            y.len()
        )));
    }
    let asym = k_train.max_asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(SvmError::NotSymmetric(format!("max |K - K^T| = {asym:.3e}")));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    if n_pos == 0 || n_pos == y.len() {
        return Err(SvmError::SingleClassTraining);
    }

    let n = rows;
    let signs: Vec<f64> = y.iter().map(|&v| 2.0 * f64::from(v) - 1.0).collect();
    let k = |i: usize, j: usize| k_train.values[(i, j)];
    let mut alpha = vec![0.0f64; n];
    let mut bias = 0.0f64;
    let mut rng = ChaCha20Rng::seed_from_u64(params.seed);
    let mut objective_curve = vec![dual_objective(&alpha, &signs, k_train)];

    let decision = |alpha: &[f64], bias: f64, i: usize| -> f64 {
        let mut f = bias;
        for j in 0..n {
            if alpha[j] != 0.0 {
                f += alpha[j] * signs[j] * k(j, i);
            }
        }
        f
    };

    let mut quiet_passes = 0;
    let mut total_sweeps = 0;
    while quiet_passes < params.max_passes && total_sweeps < MAX_TOTAL_SWEEPS {
        total_sweeps += 1;
        let mut changed = 0;
        for i in 0..n {
            let err_i = decision(&alpha, bias, i) - signs[i];
            let violates = (signs[i] * err_i < -params.tol && alpha[i] < params.c)
                || (signs[i] * err_i > params.tol && alpha[i] > 0.0);
            if !violates {
                continue;
            }
            let j = {
                let mut j = rng.gen_range(0..n - 1);
                if j >= i {
                    j += 1;
                }
                j
            };
            let err_j = decision(&alpha, bias, j) - signs[j];
            let (alpha_i_old, alpha_j_old) = (alpha[i], alpha[j]);
            let (lo, hi) = if signs[i] != signs[j] {
                let diff = alpha_j_old - alpha_i_old;
                (diff.max(0.0), (params.c + diff).min(params.c))
            } else {
                let sum = alpha_i_old + alpha_j_old;
                ((sum - params.c).max(0.0), sum.min(params.c))
            };
            if lo >= hi {
                continue;
            }
            let eta = 2.0 * k(i, j) - k(i, i) - k(j, j);
            if eta >= 0.0 {
                continue;
            }
            let mut alpha_j_new = alpha_j_old - signs[j] * (err_i - err_j) / eta;
            alpha_j_new = alpha_j_new.clamp(lo, hi);
            if (alpha_j_new - alpha_j_old).abs() < 1e-12 {
                continue;
            }
            let alpha_i_new = alpha_i_old + signs[i] * signs[j] * (alpha_j_old - alpha_j_new);
            alpha[i] = alpha_i_new;
            alpha[j] = alpha_j_new;

            let b1 = bias
                - err_i
                - signs[i] * (alpha_i_new - alpha_i_old) * k(i, i)
                - signs[j] * (alpha_j_new - alpha_j_old) * k(i, j);
            let b2 = bias
                - err_j
                - signs[i] * (alpha_i_new - alpha_i_old) * k(i, j)
                - signs[j] * (alpha_j_new - alpha_j_old) * k(j, j);
            bias = if alpha_i_new > 0.0 && alpha_i_new < params.c {
                b1
            } else if alpha_j_new > 0.0 && alpha_j_new < params.c {
                b2
            } else {
                (b1 + b2) / 2.0
            };
            changed += 1;
        }
        objective_curve.push(dual_objective(&alpha, &signs, k_train));
        if changed == 0 {
            quiet_passes += 1;
        } else {
            quiet_passes = 0;
        }
    }

    let alpha_y: Vec<f64> = alpha.iter().zip(&signs).map(|(a, s)| a * s).collect();
    let support_indices: Vec<usize> = (0..n).filter(|&i| alpha[i] > 0.0).collect();
    Ok(SvmModel {
        alpha_y,
        bias,
        support_indices,
        train_ids: k_train.row_ids.clone(),
        objective_curve,
    })
}

/// Decision values for a test-by-train kernel block:
/// `f(t) = sum_i alpha_y[i] * K(t, x_i) + bias`.
pub fn decision_scores(model: &SvmModel, k_cross: &KernelMatrix) -> Result<Vec<f64>, SvmError> {
    if k_cross.col_ids != model.train_ids {
        return Err(SvmError::IdMismatch);
    }
    if k_cross.shape().1 != model.alpha_y.len() {
        return Err(SvmError::DimensionMismatch(format!(
            "{} kernel columns but {} dual variables",
            k_cross.shape().1,
            model.alpha_y.len()
        )));
    }
    let mut scores = Vec::with_capacity(k_cross.shape().0);
    for row in k_cross.values.rows() {
        let mut f = model.bias;
        for (k_ti, a) in row.iter().zip(&model.alpha_y) {
            f += a * k_ti;
        }
        scores.push(f);
    }
    Ok(scores)
}

/// Hard labels from decision scores: 1 iff the score is non-negative.
pub fn predict(model: &SvmModel, k_cross: &KernelMatrix) -> Result<Vec<u8>, SvmError> {
    Ok(decision_scores(model, k_cross)?
        .into_iter()
        .map(|f| u8::from(f >= 0.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{gram_matrix, gram_matrix_symmetric, KernelSpec};
    use ndarray::array;

    fn rbf() -> KernelSpec {
        KernelSpec::rbf("rbf", 1.0).unwrap()
    }

    #[test]
    fn two_point_problem_matches_the_analytic_dual() {
        // Points -1 and +1 with RBF gamma 1: K12 = e^-4. By symmetry the
        // optimum has alpha_1 = alpha_2 = 1/(1 - K12) and bias 0.
        let x = array![[-1.0], [1.0]];
        let k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        let params = SvmParams {
            c: 10.0,
            tol: 1e-6,
            max_passes: 50,
            seed: 1,
        };
        let model = train_svm(&k, &[0, 1], &params).unwrap();
        let alpha_star = 1.0 / (1.0 - (-4.0f64).exp());
        assert!((model.alpha_y[0] + alpha_star).abs() < 1e-6);
        assert!((model.alpha_y[1] - alpha_star).abs() < 1e-6);
        assert!(model.bias.abs() < 1e-6);
        let preds = predict(&model, &k).unwrap();
        assert_eq!(preds, vec![0, 1]);
    }

    #[test]
    fn xor_with_rbf_is_learned_exactly() {
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]];
        let y = [0u8, 1, 1, 0];
        let k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        let params = SvmParams {
            c: 10.0,
            ..SvmParams::default()
        };
        let model = train_svm(&k, &y, &params).unwrap();
        assert_eq!(predict(&model, &k).unwrap(), y.to_vec());
    }

    #[test]
    fn kkt_constraints_hold() {
        let x = array![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0], [0.5, 0.9]];
        let y = [0u8, 1, 1, 0, 1];
        let k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        let params = SvmParams {
            c: 5.0,
            ..SvmParams::default()
        };
        let model = train_svm(&k, &y, &params).unwrap();
        let mut alpha_sum = 0.0;
        for (i, &ay) in model.alpha_y.iter().enumerate() {
            let s = 2.0 * f64::from(y[i]) - 1.0;
            let alpha = ay * s;
            assert!(alpha >= -1e-12 && alpha <= params.c + 1e-12);
            alpha_sum += ay;
        }
        assert!(alpha_sum.abs() < 1e-6);
    }

    #[test]
    fn objective_is_non_decreasing() {
        let x = array![
            [0.0, 0.0],
            [0.2, 0.1],
            [1.0, 1.1],
            [0.9, 1.0],
            [0.1, 1.0],
            [1.0, 0.1]
        ];
        let y = [0u8, 0, 1, 1, 1, 0];
        let k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        let model = train_svm(&k, &y, &SvmParams::default()).unwrap();
        for w in model.objective_curve.windows(2) {
            assert!(w[1] >= w[0] - 1e-9, "objective decreased: {w:?}");
        }
    }

    #[test]
    fn training_is_deterministic_per_seed() {
        let x = array![[0.0], [0.3], [1.0], [1.3], [0.1], [1.1]];
        let y = [0u8, 0, 1, 1, 0, 1];
        let k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        let params = SvmParams {
            seed: 42,
            ..SvmParams::default()
        };
        let a = train_svm(&k, &y, &params).unwrap();
        let b = train_svm(&k, &y, &params).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_class_is_rejected() {
        let x = array![[0.0], [1.0]];
        let k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        assert_eq!(
            train_svm(&k, &[1, 1], &SvmParams::default()).unwrap_err(),
            SvmError::SingleClassTraining
        );
    }

    #[test]
    fn asymmetric_kernel_is_rejected() {
        let x = array![[0.0], [1.0]];
        let mut k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        k.values[(0, 1)] += 1e-6;
        assert!(matches!(
            train_svm(&k, &[0, 1], &SvmParams::default()),
            Err(SvmError::NotSymmetric(_))
        ));
    }

    #[test]
    fn free_support_vectors_sit_on_the_margin() {
        let x = array![[-1.2], [-1.0], [1.0], [1.2]];
        let y = [0u8, 0, 1, 1];
        let k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        let params = SvmParams {
            c: 100.0,
            tol: 1e-8,
            max_passes: 100,
            seed: 3,
        };
        let model = train_svm(&k, &y, &params).unwrap();
        let scores = decision_scores(&model, &k).unwrap();
        for &i in &model.support_indices {
            let s = 2.0 * f64::from(y[i]) - 1.0;
            let alpha = model.alpha_y[i] * s;
            if alpha > 1e-9 && alpha < params.c - 1e-9 {
                assert!((scores[i] - s).abs() <= 10.0 * params.tol, "margin violation");
            }
        }
    }

    #[test]
    fn degenerate_model_scores_equal_bias() {
        let model = SvmModel {
            alpha_y: vec![0.0, 0.0],
            bias: 0.25,
            support_indices: vec![],
            train_ids: vec!["0".into(), "1".into()],
            objective_curve: vec![],
        };
        let x_test = array![[0.4], [0.9], [1.4]];
        let x_train = array![[0.0], [1.0]];
        let k = gram_matrix(x_test.view(), x_train.view(), &rbf()).unwrap();
        let scores = decision_scores(&model, &k).unwrap();
        assert!(scores.iter().all(|&s| s == 0.25));
    }

    #[test]
    fn id_mismatch_is_detected() {
        let x = array![[0.0], [1.0]];
        let k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        let model = train_svm(&k, &[0, 1], &SvmParams::default()).unwrap();
        let renamed = k.clone().with_ids(
            vec!["0".into(), "1".into()],
            vec!["a".into(), "b".into()],
        );
        assert_eq!(
            decision_scores(&model, &renamed).unwrap_err(),
            SvmError::IdMismatch
        );
    }

    #[test]
    fn invalid_params_are_rejected() {
        let x = array![[0.0], [1.0]];
        let k = gram_matrix_symmetric(x.view(), &rbf()).unwrap();
        for params in [
            SvmParams { c: 0.0, ..SvmParams::default() },
            SvmParams { tol: 0.0, ..SvmParams::default() },
            SvmParams { max_passes: 0, ..SvmParams::default() },
        ] {
            assert!(matches!(
                train_svm(&k, &[0, 1], &params),
                Err(SvmError::InvalidParams(_))
            ));
        }
    }
}
