//! Cyclic Jacobi eigendecomposition for real symmetric matrices.

use ndarray::{Array1, Array2, ArrayView2};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps over all upper-triangle pairs, annihilating each off-diagonal
/// element in turn, until the off-diagonal Frobenius norm drops below
/// `tol * max(1, ||A||_F)`. Returns unsorted eigenvalues and the matrix
/// whose columns are the matching eigenvectors.
pub fn jacobi_eigh(a: ArrayView2<f64>, tol: f64) -> Result<(Array1<f64>, Array2<f64>), String> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(format!("matrix is {}x{}, not square", n, a.ncols()));
    }
    let mut a = a.to_owned();
    let mut v = Array2::eye(n);
    if n <= 1 {
        return Ok((a.diag().to_owned(), v));
    }

    let frobenius = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let threshold = tol * frobenius.max(1.0);

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= threshold {
            return Ok((a.diag().to_owned(), v));
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    1.0 / (tau - (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // A <- J^T A J with J the plane rotation in (p, q).
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    if off_diagonal_norm(&a) <= threshold {
        Ok((a.diag().to_owned(), v))
    } else {
        Err(format!(
            "Jacobi did not converge in {MAX_SWEEPS} sweeps (off-diagonal {:.3e})",
            off_diagonal_norm(&a)
        ))
    }
}

fn off_diagonal_norm(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in 0..n {
            if p != q {
                sum += a[(p, q)] * a[(p, q)];
            }
        }
    }
    sum.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn reconstruct(values: &Array1<f64>, vectors: &Array2<f64>) -> Array2<f64> {
        let lambda = Array2::from_diag(values);
        vectors.dot(&lambda).dot(&vectors.t())
    }

    #[test]
    fn diagonal_matrix_is_fixed_point() {
        let a = array![[2.0, 0.0], [0.0, 5.0]];
        let (l, v) = jacobi_eigh(a.view(), 1e-12).unwrap();
        let mut sorted = l.to_vec();
        sorted.sort_by(f64::total_cmp);
        assert_eq!(sorted, vec![2.0, 5.0]);
        assert_eq!(v, Array2::<f64>::eye(2));
    }

    #[test]
    fn known_two_by_two() {
        let a = array![[2.0, 1.0], [1.0, 2.0]];
        let (l, _) = jacobi_eigh(a.view(), 1e-12).unwrap();
        let mut sorted = l.to_vec();
        sorted.sort_by(f64::total_cmp);
        assert!((sorted[0] - 1.0).abs() < 1e-12);
        assert!((sorted[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let a = array![
            [4.0, 1.0, -2.0, 0.5],
            [1.0, 3.0, 0.0, 1.5],
            [-2.0, 0.0, 5.0, -1.0],
            [0.5, 1.5, -1.0, 2.0]
        ];
        let (l, v) = jacobi_eigh(a.view(), 1e-12).unwrap();
        let rebuilt = reconstruct(&l, &v);
        for (x, y) in rebuilt.iter().zip(a.iter()) {
            assert!((x - y).abs() < 1e-10);
        }
        let gram = v.t().dot(&v);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((gram[(i, j)] - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_by_one_matrix() {
        let a = array![[7.0]];
        let (l, v) = jacobi_eigh(a.view(), 1e-12).unwrap();
        assert_eq!(l.to_vec(), vec![7.0]);
        assert_eq!(v[(0, 0)], 1.0);
    }

    #[test]
    fn non_square_is_rejected() {
        let a = Array2::<f64>::zeros((2, 3));
        assert!(jacobi_eigh(a.view(), 1e-12).is_err());
    }
}
