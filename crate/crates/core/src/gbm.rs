//! Gradient-boosted regression trees with logistic loss, the classical
//! benchmark model.
//!
//! Each round fits a tree to the residual `y - p` by exhaustive split
//! search over sorted unique feature values; leaf values take one Newton
//! step and are scaled by the learning rate at evaluation time. There is no
//! row or feature subsampling, so training is fully deterministic.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GbmError {
    #[error("training labels contain a single class")]
    SingleClassTraining,
    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmParams {
    pub n_trees: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    pub min_leaf: usize,
}

impl Default for GbmParams {
    fn default() -> Self {
        GbmParams {
            n_trees: 100,
            max_depth: 3,
            learning_rate: 0.1,
            min_leaf: 2,
        }
    }
}

impl GbmParams {
    fn validate(&self) -> Result<(), GbmError> {
        if self.n_trees == 0 {
            return Err(GbmError::InvalidParams("n_trees must be >= 1".to_string()));
        }
        if self.max_depth == 0 {
            return Err(GbmError::InvalidParams("max_depth must be >= 1".to_string()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 1.0) {
            return Err(GbmError::InvalidParams(format!(
                "learning_rate must be in (0, 1], got {}",
                self.learning_rate
            )));
        }
        if self.min_leaf == 0 {
            return Err(GbmError::InvalidParams("min_leaf must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// Tree node in a flat arena; the root is node 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

/// An axis-aligned regression tree. Rows with `x[feature] < threshold` go
/// left, the rest go right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
}

impl Tree {
    pub fn evaluate(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { value } => return *value,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    at = if row[*feature] < *threshold { *left } else { *right };
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbmModel {
    /// Log-odds of class 1 on the training labels.
    pub init_score: f64,
    pub trees: Vec<Tree>,
    pub learning_rate: f64,
    /// Training logistic deviance recorded after 0, 1, .., n_trees rounds.
    pub train_deviance: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn deviance(scores: &[f64], y: &[u8]) -> f64 {
    scores
        .iter()
        .zip(y)
        .map(|(&z, &label)| {
            let p = sigmoid(z).clamp(1e-15, 1.0 - 1e-15);
            if label == 1 {
                -p.ln()
            } else {
                -(1.0 - p).ln()
            }
        })
        .sum()
}

struct SplitCandidate {
    feature: usize,
    threshold: f64,
    gain: f64,
}

/// Best squared-error split over the given rows, or `None` when no split
/// leaves both children with at least `min_leaf` rows and a strict gain.
/// Features are scanned in index order and thresholds in ascending order,
/// and only strictly better gains are accepted, so ties resolve to the
/// lowest feature index and threshold.
fn best_split(
    x: ArrayView2<f64>,
    rows: &[usize],
    residual: &[f64],
    min_leaf: usize,
) -> Option<SplitCandidate> {
    let n = rows.len();
    if n < 2 * min_leaf {
        return None;
    }
    let total_sum: f64 = rows.iter().map(|&r| residual[r]).sum();
    let base_gain = total_sum * total_sum / n as f64;
    let mut best: Option<SplitCandidate> = None;

    for feature in 0..x.ncols() {
        let mut ordered: Vec<usize> = rows.to_vec();
        ordered.sort_by(|&a, &b| x[(a, feature)].total_cmp(&x[(b, feature)]));

        let mut left_sum = 0.0;
        for (position, &row) in ordered.iter().enumerate().take(n - 1) {
            left_sum += residual[row];
            let here = x[(row, feature)];
            let next = x[(ordered[position + 1], feature)];
            if here == next {
                continue; // split only between distinct values
            }
            let n_left = position + 1;
            let n_right = n - n_left;
            if n_left < min_leaf || n_right < min_leaf {
                continue;
            }
            let right_sum = total_sum - left_sum;
            let gain =
                left_sum * left_sum / n_left as f64 + right_sum * right_sum / n_right as f64;
            if gain > best.as_ref().map_or(base_gain, |b| b.gain) {
                best = Some(SplitCandidate {
                    feature,
                    threshold: (here + next) / 2.0,
                    gain,
                });
            }
        }
    }
    best
}

/// Newton-step leaf value: `sum(residual) / sum(p * (1 - p))`.
fn leaf_value(rows: &[usize], residual: &[f64], hessian: &[f64]) -> f64 {
    let num: f64 = rows.iter().map(|&r| residual[r]).sum();
    let den: f64 = rows.iter().map(|&r| hessian[r]).sum();
    num / den.max(1e-12)
}

#[allow(clippy::too_many_arguments)]
fn build_node(
    x: ArrayView2<f64>,
    rows: Vec<usize>,
    residual: &[f64],
    hessian: &[f64],
    depth: usize,
    params: &GbmParams,
    nodes: &mut Vec<Node>,
) -> usize {
    let index = nodes.len();
    if depth < params.max_depth {
        if let Some(split) = best_split(x, &rows, residual, params.min_leaf) {
            nodes.push(Node::Leaf { value: 0.0 }); // placeholder
            let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
                .iter()
                .partition(|&&r| x[(r, split.feature)] < split.threshold);
            let left = build_node(x, left_rows, residual, hessian, depth + 1, params, nodes);
            let right = build_node(x, right_rows, residual, hessian, depth + 1, params, nodes);
            nodes[index] = Node::Split {
                feature: split.feature,
                threshold: split.threshold,
                left,
                right,
            };
            return index;
        }
    }
    nodes.push(Node::Leaf {
        value: leaf_value(&rows, residual, hessian),
    });
    index
}

/// Trains the boosted ensemble on raw features and binary labels.
pub fn train_gbm(x: ArrayView2<f64>, y: &[u8], params: &GbmParams) -> Result<GbmModel, GbmError> {
    params.validate()?;
    let n = x.nrows();
    if n != y.len() {
        return Err(GbmError::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if n < 2 * params.min_leaf {
        return Err(GbmError::InvalidParams(format!(
            "need at least {} rows for min_leaf {}, got {n}",
            2 * params.min_leaf,
            params.min_leaf
        )));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    if n_pos == 0 || n_pos == n {
        return Err(GbmError::SingleClassTraining);
    }

    let prior = n_pos as f64 / n as f64;
    let init_score = (prior / (1.0 - prior)).ln();
    let mut scores = vec![init_score; n];
    let mut trees = Vec::with_capacity(params.n_trees);
    let mut train_deviance = vec![deviance(&scores, y)];

    let all_rows: Vec<usize> = (0..n).collect();
    for _ in 0..params.n_trees {
        let mut residual = vec![0.0; n];
        let mut hessian = vec![0.0; n];
        for i in 0..n {
            let p = sigmoid(scores[i]);
            residual[i] = f64::from(y[i]) - p;
            hessian[i] = p * (1.0 - p);
        }
        let mut nodes = Vec::new();
        build_node(x, all_rows.clone(), &residual, &hessian, 0, params, &mut nodes);
        let tree = Tree { nodes };
        for i in 0..n {
            scores[i] += params.learning_rate * tree.evaluate(&x.row(i).to_vec());
        }
        train_deviance.push(deviance(&scores, y));
        trees.push(tree);
    }

    Ok(GbmModel {
        init_score,
        trees,
        learning_rate: params.learning_rate,
        train_deviance,
    })
}

/// Raw additive scores `init + sum lr * tree(x)`; the hard label is 1 iff
/// the score is non-negative.
pub fn gbm_scores(model: &GbmModel, x: ArrayView2<f64>) -> Result<Vec<f64>, GbmError> {
    let expected = model
        .trees
        .iter()
        .flat_map(|t| t.nodes.iter())
        .filter_map(|n| match n {
            Node::Split { feature, .. } => Some(*feature + 1),
            Node::Leaf { .. } => None,
        })
        .max()
        .unwrap_or(0);
    if x.ncols() < expected {
        return Err(GbmError::DimensionMismatch {
            expected,
            got: x.ncols(),
        });
    }
    let mut scores = Vec::with_capacity(x.nrows());
    for row in x.rows() {
        let row = row.to_vec();
        let mut score = model.init_score;
        for tree in &model.trees {
            score += model.learning_rate * tree.evaluate(&row);
        }
        scores.push(score);
    }
    Ok(scores)
}

/// Hard labels from raw scores.
pub fn gbm_predict(model: &GbmModel, x: ArrayView2<f64>) -> Result<Vec<u8>, GbmError> {
    Ok(gbm_scores(model, x)?
        .into_iter()
        .map(|s| u8::from(s >= 0.0))
        .collect())
}
