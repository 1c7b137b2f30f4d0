//! One-sided (Hestenes) Jacobi singular value decomposition.
//!
//! Columns of `A` are rotated pairwise until mutually orthogonal, so that
//! `A V = W` with orthogonal `V` (n x n) and orthogonal columns in `W`. The
//! column norms of `W` are the singular values. Because `V` is square even
//! for wide matrices, the trailing columns of `V` span the null space
//! directly.

use crate::linalg::matrix::Matrix;
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

#[derive(Debug, Clone)]
pub struct Svd<S> {
    /// m x n; column `j` is the left singular vector for `singular[j]`, or
    /// zero when that singular value vanishes.
    pub u: Matrix<S>,
    /// n values, sorted descending (ties keep original column order).
    pub singular: Vec<S>,
    /// n x n orthogonal, columns ordered like `singular`.
    pub v: Matrix<S>,
}

impl<S: Real> Svd<S> {
    pub fn new(a: &Matrix<S>) -> Self {
        let (m, n) = a.shape();
        // Column-major working copies: cols[j] is column j.
        let mut w: Vec<Vec<S>> = (0..n).map(|j| a.column(j)).collect();
        let mut v: Vec<Vec<S>> = (0..n)
            .map(|j| {
                (0..n)
                    .map(|i| if i == j { S::one() } else { S::zero() })
                    .collect()
            })
            .collect();
        let eps = S::epsilon();

        for _ in 0..MAX_SWEEPS {
            let mut rotated = false;
            for p in 0..n {
                for q in (p + 1)..n {
                    let (alpha, beta, gamma) = col_products(&w[p], &w[q]);
                    if gamma == S::zero() || gamma.abs() <= eps * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let two = S::one() + S::one();
                    let zeta = (beta - alpha) / (two * gamma);
                    let t = zeta.signum() / (zeta.abs() + (S::one() + zeta * zeta).sqrt());
                    let c = S::one() / (S::one() + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut w, p, q, c, s);
                    rotate(&mut v, p, q, c, s);
                }
            }
            if !rotated {
                break;
            }
        }

        let norms: Vec<S> = w
            .iter()
            .map(|c| c.iter().fold(S::zero(), |acc, x| acc + *x * *x).sqrt())
            .collect();
        let mut order: Vec<usize> = (0..n).collect();
        // Stable: equal singular values keep index order.
        order.sort_by(|&i, &j| {
            norms[j]
                .partial_cmp(&norms[i])
                .unwrap_or(std::cmp::Ordering::Equal)
        });

        let singular: Vec<S> = order.iter().map(|&j| norms[j]).collect();
        let u = Matrix::from_fn(m, n, |i, k| {
            let j = order[k];
            if norms[j] > S::zero() {
                w[j][i] / norms[j]
            } else {
                S::zero()
            }
        });
        let v = Matrix::from_fn(n, n, |i, k| v[order[k]][i]);
        Svd { u, singular, v }
    }

    /// Count of singular values above `rel_tol * max(singular)`.
    pub fn rank(&self, rel_tol: S) -> usize {
        let cutoff = match self.singular.first() {
            Some(&top) if top > S::zero() => rel_tol * top,
            _ => return 0,
        };
        self.singular.iter().take_while(|&&s| s > cutoff).count()
    }
}

fn col_products<S: Real>(a: &[S], b: &[S]) -> (S, S, S) {
    a.iter().zip(b).fold(
        (S::zero(), S::zero(), S::zero()),
        |(aa, bb, ab), (&x, &y)| (aa + x * x, bb + y * y, ab + x * y),
    )
}

fn rotate<S: Real>(cols: &mut [Vec<S>], p: usize, q: usize, c: S, s: S) {
    let (lo, hi) = cols.split_at_mut(q);
    let (cp, cq) = (&mut lo[p], &mut hi[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, yq) = (*x, *y);
        *x = c * xp - s * yq;
        *y = s * xp + c * yq;
    }
}
