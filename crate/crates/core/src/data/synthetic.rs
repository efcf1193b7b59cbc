//! Synthetic benchmark data: two Gaussian classes and stratified splitting.

use ndarray::Array2;
use rand::Rng;

use super::{DataError, Dataset};

/// Standard normal draws via Box-Muller, filled pairwise so the stream of
/// uniforms consumed is a fixed function of the generator state.
fn fill_standard_normal(rng: &mut impl Rng, out: &mut [f64]) {
    let mut i = 0;
    while i < out.len() {
        let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
        let u2: f64 = rng.gen::<f64>();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = 2.0 * std::f64::consts::PI * u2;
        out[i] = radius * angle.cos();
        if i + 1 < out.len() {
            out[i + 1] = radius * angle.sin();
        }
        i += 2;
    }
}

/// Two identity-covariance Gaussian classes in `dims` dimensions with means
/// at `-shift` (class 0) and `+shift` (class 1) on every coordinate. The
/// first `n_rows / 2` rows are class 0, the rest class 1; ids are
/// `{id_prefix}{row}`.
pub fn gaussian_classes(
    n_rows: usize,
    dims: usize,
    shift: f64,
    id_prefix: &str,
    rng: &mut impl Rng,
) -> Dataset {
    let n0 = n_rows / 2;
    let mut flat = vec![0.0; n_rows * dims];
    fill_standard_normal(rng, &mut flat);
    let mut x = Array2::from_shape_vec((n_rows, dims), flat).expect("shape");
    let mut y = Vec::with_capacity(n_rows);
    for row in 0..n_rows {
        let (label, mean) = if row < n0 { (0u8, -shift) } else { (1u8, shift) };
        for v in x.row_mut(row).iter_mut() {
            *v += mean;
        }
        y.push(label);
    }
    let feature_names = (0..dims).map(|j| format!("f{j}")).collect();
    let ids = (0..n_rows).map(|i| format!("{id_prefix}{i}")).collect();
    Dataset {
        x,
        y,
        feature_names,
        ids,
    }
}

/// Splits into (train, test) keeping class proportions: per class, a seeded
/// shuffle marks `round(fraction * n_class)` rows as test. Row order within
/// each output follows the input dataset.
pub fn stratified_split(
    dataset: &Dataset,
    test_fraction: f64,
    rng: &mut impl Rng,
) -> Result<(Dataset, Dataset), DataError> {
    if !(0.0..1.0).contains(&test_fraction) {
        return Err(DataError::DegenerateData(format!(
            "test fraction {test_fraction} outside [0, 1)"
        )));
    }
    let mut test_marks = vec![false; dataset.n_rows()];
    for class in [0u8, 1u8] {
        let mut members: Vec<usize> = (0..dataset.n_rows())
            .filter(|&i| dataset.y[i] == class)
            .collect();
        let n_test = (test_fraction * members.len() as f64).round() as usize;
        // Fisher-Yates on the class members.
        for i in (1..members.len()).rev() {
            let j = rng.gen_range(0..=i);
            members.swap(i, j);
        }
        for &row in members.iter().take(n_test) {
            test_marks[row] = true;
        }
    }
    let train_idx: Vec<usize> = (0..dataset.n_rows()).filter(|&i| !test_marks[i]).collect();
    let test_idx: Vec<usize> = (0..dataset.n_rows()).filter(|&i| test_marks[i]).collect();
    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(DataError::DegenerateData(
            "split produced an empty train or test set".to_string(),
        ));
    }
    Ok((dataset.select_rows(&train_idx), dataset.select_rows(&test_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derive_rng;

    #[test]
    fn generator_is_deterministic_and_balanced() {
        let mut rng_a = derive_rng(7, "synthetic-train");
        let mut rng_b = derive_rng(7, "synthetic-train");
        let a = gaussian_classes(200, 4, 0.7, "s", &mut rng_a);
        let b = gaussian_classes(200, 4, 0.7, "s", &mut rng_b);
        assert_eq!(a, b);
        assert_eq!(a.y.iter().filter(|&&v| v == 0).count(), 100);
        assert_eq!(a.n_features(), 4);
    }

    #[test]
    fn class_means_are_shifted() {
        let mut rng = derive_rng(3, "synthetic-train");
        let ds = gaussian_classes(2000, 4, 0.7, "s", &mut rng);
        let mut sums = [0.0f64; 2];
        let mut counts = [0usize; 2];
        for (row, &label) in ds.y.iter().enumerate() {
            sums[label as usize] += ds.x.row(row).sum();
            counts[label as usize] += 1;
        }
        let mean0 = sums[0] / (counts[0] * 4) as f64;
        let mean1 = sums[1] / (counts[1] * 4) as f64;
        assert!((mean0 + 0.7).abs() < 0.1, "class 0 mean {mean0}");
        assert!((mean1 - 0.7).abs() < 0.1, "class 1 mean {mean1}");
    }

    #[test]
    fn stratified_split_preserves_class_counts() {
        let mut rng = derive_rng(1, "synthetic-train");
        let ds = gaussian_classes(100, 2, 0.5, "s", &mut rng);
        let mut split_rng = derive_rng(1, "split");
        let (train, test) = stratified_split(&ds, 0.3, &mut split_rng).unwrap();
        assert_eq!(train.n_rows(), 70);
        assert_eq!(test.n_rows(), 30);
        assert_eq!(test.y.iter().filter(|&&v| v == 1).count(), 15);
        assert_eq!(train.y.iter().filter(|&&v| v == 1).count(), 35);
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let mut rng = derive_rng(9, "synthetic-train");
        let ds = gaussian_classes(50, 2, 0.5, "s", &mut rng);
        let (a_train, a_test) = stratified_split(&ds, 0.2, &mut derive_rng(9, "split")).unwrap();
        let (b_train, b_test) = stratified_split(&ds, 0.2, &mut derive_rng(9, "split")).unwrap();
        assert_eq!(a_train.ids, b_train.ids);
        assert_eq!(a_test.ids, b_test.ids);
    }
}
