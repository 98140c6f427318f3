//! Cyclic Jacobi eigensolver for small dense symmetric matrices.

use super::{DenseMatrix, NumError};

pub const DEFAULT_EIGEN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues sorted in descending order with matching unit eigenvectors
/// stored as the columns of `vectors`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.vectors.rows()).map(|r| self.vectors.get(r, k)).collect()
    }
}

pub fn symmetric_eigenvalues(m: &DenseMatrix, tol: f64) -> Result<Vec<f64>, NumError> {
    symmetric_eigen(m, tol).map(|e| e.values)
}

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// `tol` is used twice: as the admissible asymmetry (relative to the
/// largest entry) and as the stopping threshold on the off-diagonal
/// Frobenius norm relative to `‖M‖_F`.
pub fn symmetric_eigen(m: &DenseMatrix, tol: f64) -> Result<SymmetricEigen, NumError> {
    if !m.is_square() {
        return Err(NumError::Shape(format!("eigensolve needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    if !(tol > 0.0) {
        return Err(NumError::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    if !m.is_finite() {
        return Err(NumError::NonFinite("eigensolve input".into()));
    }
    let n = m.rows();
    let scale = m.max_abs().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let residual = (m.get(i, j) - m.get(j, i)).abs();
            if residual > tol * scale {
                return Err(NumError::Asymmetric { row: i, col: j, residual, tol: tol * scale });
            }
        }
    }

    // work on the symmetrized copy
    let mut a = m.clone();
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, avg);
            a.set(j, i, avg);
        }
    }
    let mut v = DenseMatrix::identity(n);
    let norm = a.frobenius_norm();
    let threshold = tol * norm;

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                let tau = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = if tau.abs() > 1e150 {
                    0.5 / tau
                } else {
                    let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                    sign / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        if off > threshold {
            return Err(NumError::NoConvergence { sweeps: MAX_SWEEPS, off });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).total_cmp(&a.get(i, i)));
    let values = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (k, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors.set(r, k, v.get(r, src));
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

fn off_diagonal_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a.get(i, j) * a.get(i, j);
            }
        }
    }
    acc.sqrt()
}

// A <- Jᵀ A J, V <- V J for the plane rotation in (p, q)
fn rotate(a: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, c * akp - s * akq);
        a.set(k, q, s * akp + c * akq);
    }
    for k in 0..n {
        let apk = a.get(p, k);
        let aqk = a.get(q, k);
        a.set(p, k, c * apk - s * aqk);
        a.set(q, k, s * apk + c * aqk);
    }
    for k in 0..n {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, c * vkp - s * vkq);
        v.set(k, q, s * vkp + c * vkq);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::RandomStream;

    fn residual_ok(m: &DenseMatrix, eig: &SymmetricEigen, tol: f64) {
        let norm = m.frobenius_norm();
        for (k, &lambda) in eig.values.iter().enumerate() {
            let vk = eig.vector(k);
            let mv: Vec<f64> = (0..m.rows()).map(|r| m.row(r).iter().zip(&vk).map(|(a, b)| a * b).sum()).collect();
            let res: f64 = mv.iter().zip(&vk).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            assert!(res <= 10.0 * tol * norm.max(1.0), "residual {res} for λ={lambda}");
        }
    }

    #[test]
    fn identity_eigenvalues() {
        let vals = symmetric_eigenvalues(&DenseMatrix::identity(3), DEFAULT_EIGEN_TOL).unwrap();
        assert_eq!(vals, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn averaging_matrix_eigenvalues() {
        let m = DenseMatrix::from_rows(&[vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap();
        let vals = symmetric_eigenvalues(&m, DEFAULT_EIGEN_TOL).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-15 && vals[1].abs() < 1e-15, "{vals:?}");
    }

    #[test]
    fn path_laplacian_three_nodes() {
        // characteristic polynomial of [[1,-1,0],[-1,2,-1],[0,-1,1]] is -λ(λ-1)(λ-3)
        let m = DenseMatrix::from_rows(&[vec![1.0, -1.0, 0.0], vec![-1.0, 2.0, -1.0], vec![0.0, -1.0, 1.0]]).unwrap();
        let eig = symmetric_eigen(&m, DEFAULT_EIGEN_TOL).unwrap();
        let expected = [3.0, 1.0, 0.0];
        for (v, e) in eig.values.iter().zip(expected) {
            assert!((v - e).abs() < 1e-12, "{:?}", eig.values);
        }
        residual_ok(&m, &eig, DEFAULT_EIGEN_TOL);
    }

    #[test]
    fn rejects_non_square_and_asymmetric() {
        assert!(matches!(symmetric_eigenvalues(&DenseMatrix::zeros(2, 3), 1e-12), Err(NumError::Shape(_))));
        let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(symmetric_eigenvalues(&m, 1e-12), Err(NumError::Asymmetric { .. })));
    }

    #[test]
    fn random_symmetric_residuals_and_trace() {
        let mut rs = RandomStream::new(11);
        for n in [1, 2, 5, 17, 40] {
            let mut m = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v = 2.0 * rs.uniform() - 1.0;
                    m.set(i, j, v);
                    m.set(j, i, v);
                }
            }
            let eig = symmetric_eigen(&m, DEFAULT_EIGEN_TOL).unwrap();
            residual_ok(&m, &eig, DEFAULT_EIGEN_TOL);
            let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
            let sum: f64 = eig.values.iter().sum();
            assert!((trace - sum).abs() < 1e-10);
            assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }
}
