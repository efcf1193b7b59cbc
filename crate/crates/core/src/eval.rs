//! Classification metrics: rank-based ROC-AUC, ROC curves and confusion
//! reports.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("both classes must be present for ROC analysis")]
    SingleClassEval,
    #[error("scores and labels have different lengths: {scores} vs {labels}")]
    LengthMismatch { scores: usize, labels: usize },
}

fn class_counts(labels: &[u8]) -> (usize, usize) {
    let n_pos = labels.iter().filter(|&&v| v == 1).count();
    (n_pos, labels.len() - n_pos)
}

fn check_inputs(scores: &[f64], labels: &[u8]) -> Result<(usize, usize), EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    let (n_pos, n_neg) = class_counts(labels);
    if n_pos == 0 || n_neg == 0 {
        return Err(EvalError::SingleClassEval);
    }
    Ok((n_pos, n_neg))
}

/// ROC-AUC as the Mann-Whitney rank statistic: the fraction of
/// positive/negative pairs ranked concordantly, ties counting one half.
///
/// Computed in O(n log n) via average ranks over tie groups, which equals
/// explicit pair counting exactly.
pub fn roc_auc(scores: &[f64], labels: &[u8]) -> Result<f64, EvalError> {
    let (n_pos, n_neg) = check_inputs(scores, labels)?;
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    let mut rank_sum_pos = 0.0f64;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        // Average 1-based rank across the tie group [start, end).
        let avg_rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            if labels[idx] == 1 {
                rank_sum_pos += avg_rank;
            }
        }
        start = end;
    }
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// ROC analysis: the AUC plus the stepwise curve over descending score
/// thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocReport {
    pub auc: f64,
    /// (false positive rate, true positive rate) points from (0,0) to (1,1).
    pub curve: Vec<(f64, f64)>,
    pub n_pos: usize,
    pub n_neg: usize,
}

/// Builds the ROC curve over sorted distinct thresholds (descending). The
/// trapezoidal area under the returned curve equals [`roc_auc`] within
/// floating-point rounding; the `auc` field carries the pair-counting value.
pub fn roc_curve(scores: &[f64], labels: &[u8]) -> Result<RocReport, EvalError> {
    let (n_pos, n_neg) = check_inputs(scores, labels)?;
    let n = scores.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut curve = vec![(0.0, 0.0)];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        for &idx in &order[start..end] {
            if labels[idx] == 1 {
                tp += 1;
            } else {
                fp += 1;
            }
        }
        curve.push((fp as f64 / n_neg as f64, tp as f64 / n_pos as f64));
        start = end;
    }
    Ok(RocReport {
        auc: roc_auc(scores, labels)?,
        curve,
        n_pos,
        n_neg,
    })
}

/// Trapezoidal area under a (fpr, tpr) curve.
pub fn trapezoid_area(curve: &[(f64, f64)]) -> f64 {
    curve
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum()
}

/// Confusion counts and derived rates at a fixed threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfusionReport {
    pub true_pos: usize,
    pub true_neg: usize,
    pub false_pos: usize,
    pub false_neg: usize,
    pub acc: f64,
    pub ppv: f64,
    pub tpr: f64,
    pub tnr: f64,
    pub f1: f64,
    pub mcc: f64,
    /// Set when any rate hit a zero denominator and was reported as 0.
    pub degenerate: bool,
}

/// Standard confusion metrics with prediction `score >= threshold`.
/// Division-by-zero cases return 0 and set the degeneracy flag.
pub fn confusion_metrics(scores: &[f64], labels: &[u8], threshold: f64) -> ConfusionReport {
    let mut tp = 0usize;
    let mut tn = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&score, &label) in scores.iter().zip(labels) {
        let predicted = score >= threshold;
        match (predicted, label == 1) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    let mut degenerate = false;
    let mut ratio = |num: f64, den: f64| {
        if den == 0.0 {
            degenerate = true;
            0.0
        } else {
            num / den
        }
    };
    let n = (tp + tn + fp + fn_) as f64;
    let acc = ratio((tp + tn) as f64, n);
    let ppv = ratio(tp as f64, (tp + fp) as f64);
    let tpr = ratio(tp as f64, (tp + fn_) as f64);
    let tnr = ratio(tn as f64, (tn + fp) as f64);
    let f1 = ratio(2.0 * ppv * tpr, ppv + tpr);
    let mcc_den =
        ((tp + fp) as f64 * (tp + fn_) as f64 * (tn + fp) as f64 * (tn + fn_) as f64).sqrt();
    let mcc = ratio(tp as f64 * tn as f64 - fp as f64 * fn_ as f64, mcc_den);
    ConfusionReport {
        true_pos: tp,
        true_neg: tn,
        false_pos: fp,
        false_neg: fn_,
        acc,
        ppv,
        tpr,
        tnr,
        f1,
        mcc,
        degenerate,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force pair counting, the independent oracle for the rank-based
    /// implementation.
    fn auc_by_pairs(scores: &[f64], labels: &[u8]) -> f64 {
        let mut concordant = 0.0;
        let mut total = 0.0;
        for (i, &si) in scores.iter().enumerate() {
            if labels[i] != 1 {
                continue;
            }
            for (j, &sj) in scores.iter().enumerate() {
                if labels[j] != 0 {
                    continue;
                }
                total += 1.0;
                if si > sj {
                    concordant += 1.0;
                } else if si == sj {
                    concordant += 0.5;
                }
            }
        }
        concordant / total
    }

    #[test]
    fn perfect_and_inverted_rankings() {
        let labels = [0u8, 0, 1, 1];
        assert_eq!(roc_auc(&[0.1, 0.2, 0.8, 0.9], &labels).unwrap(), 1.0);
        assert_eq!(roc_auc(&[0.9, 0.8, 0.2, 0.1], &labels).unwrap(), 0.0);
    }

    #[test]
    fn worked_example_is_three_quarters() {
        let scores = [0.1, 0.4, 0.35, 0.8];
        let labels = [0u8, 0, 1, 1];
        assert_eq!(roc_auc(&scores, &labels).unwrap(), 0.75);
        assert_eq!(auc_by_pairs(&scores, &labels), 0.75);
    }

    #[test]
    fn all_tied_scores_give_half() {
        let scores = [0.5, 0.5, 0.5, 0.5];
        let labels = [0u8, 1, 0, 1];
        assert_eq!(roc_auc(&scores, &labels).unwrap(), 0.5);
        let report = roc_curve(&scores, &labels).unwrap();
        assert_eq!(report.curve, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert!((trapezoid_area(&report.curve) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rank_based_auc_matches_pair_counting_with_ties() {
        let mut state = 12345u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 33) as f64 / (1u64 << 31) as f64
        };
        for _ in 0..50 {
            let n = 60;
            let scores: Vec<f64> = (0..n).map(|_| (next() * 10.0).round() / 10.0).collect();
            let labels: Vec<u8> = (0..n).map(|_| u8::from(next() > 0.5)).collect();
            if labels.iter().all(|&v| v == 1) || labels.iter().all(|&v| v == 0) {
                continue;
            }
            let fast = roc_auc(&scores, &labels).unwrap();
            let slow = auc_by_pairs(&scores, &labels);
            assert!((fast - slow).abs() < 1e-12, "{fast} vs {slow}");
            let report = roc_curve(&scores, &labels).unwrap();
            assert!((trapezoid_area(&report.curve) - fast).abs() < 1e-12);
        }
    }

    #[test]
    fn curve_endpoints_and_monotonicity() {
        let scores = [0.9, 0.3, 0.6, 0.2, 0.8];
        let labels = [1u8, 0, 1, 0, 0];
        let report = roc_curve(&scores, &labels).unwrap();
        assert_eq!(*report.curve.first().unwrap(), (0.0, 0.0));
        assert_eq!(*report.curve.last().unwrap(), (1.0, 1.0));
        for w in report.curve.windows(2) {
            assert!(w[1].0 >= w[0].0);
            assert!(w[1].1 >= w[0].1);
        }
        // One positive above all negatives passes through (0, tpr > 0).
        let single = roc_curve(&[0.9, 0.1, 0.2], &[1, 0, 0]).unwrap();
        assert!(single.curve.contains(&(0.0, 1.0)));
    }

    #[test]
    fn single_class_is_rejected() {
        assert_eq!(
            roc_auc(&[0.1, 0.2], &[1, 1]).unwrap_err(),
            EvalError::SingleClassEval
        );
        assert_eq!(
            roc_curve(&[0.1, 0.2], &[0, 0]).unwrap_err(),
            EvalError::SingleClassEval
        );
    }

    #[test]
    fn auc_is_invariant_under_monotone_transforms() {
        let scores = [0.2, -1.0, 0.7, 3.0, 0.0, -0.4];
        let labels = [0u8, 0, 1, 1, 1, 0];
        let base = roc_auc(&scores, &labels).unwrap();
        let exp: Vec<f64> = scores.iter().map(|s| s.exp()).collect();
        let affine: Vec<f64> = scores.iter().map(|s| 3.0 * s + 11.0).collect();
        assert_eq!(roc_auc(&exp, &labels).unwrap(), base);
        assert_eq!(roc_auc(&affine, &labels).unwrap(), base);
    }

    #[test]
    fn label_swap_symmetry_without_ties() {
        let scores = [0.11, 0.42, 0.77, 0.23, 0.95, 0.61];
        let labels = [0u8, 1, 0, 0, 1, 1];
        let flipped: Vec<u8> = labels.iter().map(|&v| 1 - v).collect();
        let a = roc_auc(&scores, &labels).unwrap();
        let b = roc_auc(&scores, &flipped).unwrap();
        assert!((a + b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn confusion_all_correct() {
        let report = confusion_metrics(&[1.0, -1.0, 2.0], &[1, 0, 1], 0.0);
        assert_eq!(report.acc, 1.0);
        assert_eq!(report.mcc, 1.0);
        assert!(!report.degenerate);
    }

    #[test]
    fn confusion_balanced_mistakes_zero_mcc() {
        // One of each cell: tp = tn = fp = fn = 1.
        let scores = [1.0, -1.0, 1.0, -1.0];
        let labels = [1u8, 1, 0, 0];
        let report = confusion_metrics(&scores, &labels, 0.0);
        assert_eq!(
            (report.true_pos, report.true_neg, report.false_pos, report.false_neg),
            (1, 1, 1, 1)
        );
        assert_eq!(report.acc, 0.5);
        assert_eq!(report.mcc, 0.0);
    }

    #[test]
    fn no_predicted_positives_flags_degeneracy() {
        let report = confusion_metrics(&[-1.0, -2.0], &[1, 0], 0.0);
        assert_eq!(report.ppv, 0.0);
        assert!(report.degenerate);
    }
}
