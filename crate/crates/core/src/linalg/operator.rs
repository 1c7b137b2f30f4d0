use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::exact;
use crate::linalg::matrix::{norm2, Matrix};
use crate::linalg::svd::Svd;
use crate::scalar::{Real, Scalar};

/// Relative spectral cutoff used for rank decisions.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Absolute tolerance on `||A x - A y||` for two inputs to count as aliased.
pub const ALIAS_TOL: f64 = 1e-9;

/// A dense matrix with the tolerance used for its rank decisions.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator<S> {
    matrix: Matrix<S>,
    rank_tol: f64,
}

/// Orthonormal basis of a kernel, ordered like the trailing right singular
/// vectors (ascending singular value reversed, ties by column index).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSpaceBasis<S> {
    pub basis: Vec<Vec<S>>,
    pub dim: usize,
}

impl<S: Scalar> LinearOperator<S> {
    pub fn new(matrix: Matrix<S>) -> Result<Self> {
        Self::with_rank_tol(matrix, DEFAULT_RANK_TOL)
    }

    pub fn with_rank_tol(matrix: Matrix<S>, rank_tol: f64) -> Result<Self> {
        if !matrix.is_finite() {
            return domain("operator has non-finite entries");
        }
        if !(rank_tol >= 0.0 && rank_tol.is_finite()) {
            return domain(format!(
                "rank tolerance {rank_tol} must be finite and non-negative"
            ));
        }
        Ok(Self { matrix, rank_tol })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: Matrix::identity(n),
            rank_tol: DEFAULT_RANK_TOL,
        }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.matrix
    }

    pub fn rows(&self) -> usize {
        self.matrix.rows()
    }

    pub fn cols(&self) -> usize {
        self.matrix.cols()
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn apply(&self, v: &[S]) -> Result<Vec<S>> {
        self.matrix.mul_vec(v)
    }

    /// Rank by elimination; exact for rational scalars.
    pub fn rank_exact(&self) -> usize {
        exact::rank_by_elimination(&self.matrix)
    }

    /// Pseudoinverse by rank factorization; exact for rational scalars.
    pub fn pseudoinverse_exact(&self) -> Result<Self> {
        if self.matrix.is_empty() {
            return domain("pseudoinverse of an empty operator");
        }
        let p = exact::pseudoinverse_by_factorization(&self.matrix)?;
        Self::with_rank_tol(p, self.rank_tol)
    }

    /// First pair `(i, j)`, `i < j`, of distinct domain vectors whose images
    /// differ by at most [`ALIAS_TOL`] in Euclidean norm. Scans `i` then `j`
    /// in ascending order.
    pub fn find_alias_pair(&self, domain_vectors: &[Vec<S>]) -> Result<Option<(usize, usize)>> {
        let images = domain_vectors
            .iter()
            .map(|x| {
                if x.len() != self.cols() {
                    return domain(format!(
                        "domain vector of length {} does not match {} columns",
                        x.len(),
                        self.cols()
                    ));
                }
                self.apply(x)
            })
            .collect::<Result<Vec<_>>>()?;
        for i in 0..images.len() {
            for j in (i + 1)..images.len() {
                if domain_vectors[i] == domain_vectors[j] {
                    continue;
                }
                let diff: Vec<S> = images[i]
                    .iter()
                    .zip(&images[j])
                    .map(|(a, b)| a.clone() - b.clone())
                    .collect();
                if norm2(&diff) <= ALIAS_TOL {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }
}

impl<S: Real> LinearOperator<S> {
    fn tol(&self) -> S {
        S::from_f64(self.rank_tol).unwrap_or_else(S::epsilon)
    }

    pub fn svd(&self) -> Svd<S> {
        Svd::new(&self.matrix)
    }

    /// Number of singular values above `rank_tol` times the largest one.
    pub fn rank(&self) -> usize {
        self.svd().rank(self.tol())
    }

    /// Moore-Penrose pseudoinverse from the SVD, discarding singular values
    /// at or below the rank cutoff.
    pub fn pseudoinverse(&self) -> Result<Self> {
        if self.matrix.is_empty() {
            return domain("pseudoinverse of an empty operator");
        }
        let (m, n) = self.matrix.shape();
        let svd = self.svd();
        let r = svd.rank(self.tol());
        let mut p = Matrix::zeros(n, m);
        for k in 0..r {
            let inv = S::one() / svd.singular[k];
            for i in 0..n {
                let vik = svd.v[(i, k)] * inv;
                if vik == S::zero() {
                    continue;
                }
                for j in 0..m {
                    p[(i, j)] = p[(i, j)] + vik * svd.u[(j, k)];
                }
            }
        }
        Self::with_rank_tol(p, self.rank_tol)
    }

    /// Orthonormal kernel basis; `dim = cols - rank`.
    pub fn null_space_basis(&self) -> NullSpaceBasis<S> {
        let svd = self.svd();
        let r = svd.rank(self.tol());
        let n = self.cols();
        let basis: Vec<Vec<S>> = (r..n)
            .map(|k| {
                let mut v = svd.v.column(k);
                // Sign convention: first non-negligible component positive.
                let cut = S::from_f64(1e-8).unwrap_or_else(S::epsilon);
                if let Some(first) = v.iter().find(|x| x.abs() > cut) {
                    if *first < S::zero() {
                        v.iter_mut().for_each(|x| *x = -*x);
                    }
                }
                v
            })
            .collect();
        NullSpaceBasis {
            dim: basis.len(),
            basis,
        }
    }
}
