//! Dense square matrices and a cyclic Jacobi eigensolver for real symmetric
//! input. Deliberately dependency-free: the matrices here are small and the
//! rotation sweep is deterministic, which keeps every downstream invariant
//! reproducible bit for bit.

use crate::error::{Error, Result};

/// Dense square matrix, row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        let mut m = Self::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.n + j] = x;
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in i + 1..self.n {
                if (self.get(i, j) - self.get(j, i)).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Frobenius norm of the off-diagonal part.
    pub fn off_diagonal_norm(&self) -> f64 {
        let mut sum = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    let x = self.get(i, j);
                    sum += x * x;
                }
            }
        }
        sum.sqrt()
    }
}

/// Eigenvalues in ascending order with matching orthonormal eigenvector
/// columns.
#[derive(Clone, Debug)]
pub struct Eigendecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector for `eigenvalues[i]`.
    pub eigenvectors: Matrix,
}

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-12;

/// Cyclic Jacobi rotations on a symmetric matrix. Sweeps rotate every
/// off-diagonal pair `(p, q)` in a fixed order until the off-diagonal
/// Frobenius norm drops below `1e-12` (scaled by the input norm), with a
/// budget of 100 sweeps.
pub fn jacobi_eigendecomposition(input: &Matrix) -> Result<Eigendecomposition> {
    let n = input.dim();
    if !input.is_symmetric(1e-12) {
        return Err(Error::Numerical("matrix is not symmetric".into()));
    }
    let mut a = input.clone();
    let mut v = Matrix::identity(n);
    let threshold = JACOBI_OFF_DIAGONAL_TOL * input.frobenius_norm().max(1.0);

    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        if a.off_diagonal_norm() <= threshold {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a.get(p, q);
                if apq == 0.0 {
                    continue;
                }
                // rotation angle that annihilates a[p][q]
                let theta = (a.get(q, q) - a.get(p, p)) / (2.0 * apq);
                let t = if theta.abs() > 1e150 {
                    1.0 / (2.0 * theta)
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

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
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }
    if !converged && a.off_diagonal_norm() > threshold {
        return Err(Error::Numerical(format!(
            "Jacobi sweep budget of {JACOBI_MAX_SWEEPS} exhausted at off-diagonal norm {:.3e}",
            a.off_diagonal_norm()
        )));
    }

    // sort eigenpairs ascending; stable order keeps the output deterministic
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(i, i).total_cmp(&a.get(j, j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut eigenvectors = Matrix::zeros(n);
    for (new_col, &old_col) in order.iter().enumerate() {
        for k in 0..n {
            eigenvectors.set(k, new_col, v.get(k, old_col));
        }
    }
    Ok(Eigendecomposition { eigenvalues, eigenvectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn diagonal_matrix_is_its_own_decomposition() {
        let m = Matrix::from_rows(&[
            vec![3.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 2.0],
        ]);
        let eig = jacobi_eigendecomposition(&m).unwrap();
        assert_eq!(eig.eigenvalues, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_known_eigenvalues() {
        // eigenvalues of [[1,-1],[-1,1]] are 0 and 2
        let m = Matrix::from_rows(&[vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let eig = jacobi_eigendecomposition(&m).unwrap();
        assert_close(eig.eigenvalues[0], 0.0, 1e-12);
        assert_close(eig.eigenvalues[1], 2.0, 1e-12);
    }

    #[test]
    fn three_by_three_frozen_values() {
        // eigenvalues of [[2,0,0],[0,3,4],[0,4,9]] are 1, 2, 11
        let m = Matrix::from_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 3.0, 4.0],
            vec![0.0, 4.0, 9.0],
        ]);
        let eig = jacobi_eigendecomposition(&m).unwrap();
        assert_close(eig.eigenvalues[0], 1.0, 1e-10);
        assert_close(eig.eigenvalues[1], 2.0, 1e-10);
        assert_close(eig.eigenvalues[2], 11.0, 1e-10);
    }

    #[test]
    fn reconstruction_and_orthonormality() {
        let m = Matrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![2.0, 3.0, 2.0],
            vec![3.0, 2.0, 2.0],
        ]);
        let eig = jacobi_eigendecomposition(&m).unwrap();
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                // V^T V = I
                let mut dot = 0.0;
                for k in 0..n {
                    dot += eig.eigenvectors.get(k, i) * eig.eigenvectors.get(k, j);
                }
                assert_close(dot, if i == j { 1.0 } else { 0.0 }, 1e-10);
                // A = V diag(w) V^T
                let mut rebuilt = 0.0;
                for k in 0..n {
                    rebuilt += eig.eigenvalues[k]
                        * eig.eigenvectors.get(i, k)
                        * eig.eigenvectors.get(j, k);
                }
                assert_close(rebuilt, m.get(i, j), 1e-9);
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let mut m = Matrix::zeros(2);
        m.set(0, 1, 1.0);
        assert!(jacobi_eigendecomposition(&m).is_err());
    }

    #[test]
    fn identical_input_gives_identical_output() {
        let m = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, 1.5],
            vec![0.5, 1.5, 2.0],
        ]);
        let a = jacobi_eigendecomposition(&m).unwrap();
        let b = jacobi_eigendecomposition(&m).unwrap();
        assert_eq!(a.eigenvalues, b.eigenvalues);
        assert_eq!(a.eigenvectors, b.eigenvectors);
    }
}
