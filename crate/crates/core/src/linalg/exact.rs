//! Elimination-based routines. Exact over rationals; over floats they use
//! partial pivoting with the scalar's relative tolerance.
//!
//! The pseudoinverse here goes through a rank factorization `A = C F`
//! (`C` the pivot columns of `A`, `F` the nonzero rows of its reduced row
//! echelon form), giving `A+ = F^T (F F^T)^-1 (C^T C)^-1 C^T`. It shares no
//! code with the SVD path.

use crate::error::{domain, Result};
use crate::linalg::matrix::Matrix;
use crate::scalar::Scalar;

/// Reduced row echelon form and its pivot columns.
#[derive(Debug, Clone)]
pub struct Rref<S> {
    pub reduced: Matrix<S>,
    pub pivots: Vec<usize>,
}

pub fn rref<S: Scalar>(a: &Matrix<S>) -> Rref<S> {
    let (m, n) = a.shape();
    let mut r = a.clone();
    let scale = a.max_abs();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == m {
            break;
        }
        // Largest magnitude pivot (first nonzero for exact scalars).
        let mut best = row;
        for i in row..m {
            if S::EXACT {
                if !r[(i, col)].is_zero() {
                    best = i;
                    break;
                }
            } else if r[(i, col)].abs_val() > r[(best, col)].abs_val() {
                best = i;
            }
        }
        if S::negligible(&r[(best, col)], &scale) {
            for i in row..m {
                r[(i, col)] = S::zero();
            }
            continue;
        }
        swap_rows(&mut r, row, best);
        let p = r[(row, col)].clone();
        for j in col..n {
            r[(row, j)] = r[(row, j)].clone() / p.clone();
        }
        for i in 0..m {
            if i == row || r[(i, col)].is_zero() {
                continue;
            }
            let f = r[(i, col)].clone();
            for j in col..n {
                let delta = f.clone() * r[(row, j)].clone();
                r[(i, j)] = r[(i, j)].clone() - delta;
            }
        }
        pivots.push(col);
        row += 1;
    }
    Rref { reduced: r, pivots }
}

fn swap_rows<S: Scalar>(m: &mut Matrix<S>, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let t = m[(a, j)].clone();
        m[(a, j)] = m[(b, j)].clone();
        m[(b, j)] = t;
    }
}

pub fn rank_by_elimination<S: Scalar>(a: &Matrix<S>) -> usize {
    rref(a).pivots.len()
}

/// Gauss-Jordan inverse of a square matrix.
pub fn inverse<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    let n = a.rows();
    if n != a.cols() {
        return domain("inverse of a non-square matrix");
    }
    let aug = Matrix::from_fn(n, 2 * n, |i, j| {
        if j < n {
            a[(i, j)].clone()
        } else if j - n == i {
            S::one()
        } else {
            S::zero()
        }
    });
    let r = rref(&aug);
    if r.pivots.len() < n || r.pivots[n - 1] != n - 1 {
        return domain("matrix is singular");
    }
    Ok(Matrix::from_fn(n, n, |i, j| r.reduced[(i, j + n)].clone()))
}

/// Moore-Penrose pseudoinverse via rank factorization.
pub fn pseudoinverse_by_factorization<S: Scalar>(a: &Matrix<S>) -> Result<Matrix<S>> {
    let (m, n) = a.shape();
    let r = rref(a);
    let k = r.pivots.len();
    if k == 0 {
        return Ok(Matrix::zeros(n, m));
    }
    let c = Matrix::from_fn(m, k, |i, j| a[(i, r.pivots[j])].clone());
    let f = Matrix::from_fn(k, n, |i, j| r.reduced[(i, j)].clone());
    let ft = f.transpose();
    let ct = c.transpose();
    let fft_inv = inverse(&f.matmul(&ft)?)?;
    let ctc_inv = inverse(&ct.matmul(&c)?)?;
    ft.matmul(&fft_inv)?.matmul(&ctc_inv)?.matmul(&ct)
}

/// Whether `b` lies in the column space of `a`.
pub fn in_column_space<S: Scalar>(a: &Matrix<S>, b: &[S]) -> Result<bool> {
    if b.len() != a.rows() {
        return domain("right-hand side length does not match row count");
    }
    let aug = Matrix::from_fn(a.rows(), a.cols() + 1, |i, j| {
        if j < a.cols() {
            a[(i, j)].clone()
        } else {
            b[i].clone()
        }
    });
    Ok(rank_by_elimination(&aug) == rank_by_elimination(a))
}
