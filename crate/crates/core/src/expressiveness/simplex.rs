//! Dense two-phase simplex with Bland's rule, generic over the scalar.
//!
//! With exact rationals every decision is exact and Bland's rule guarantees
//! termination. With floats, pivots use the scalar's tolerance and an
//! iteration cap guards against cycling.

use crate::error::{domain, Error, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;

const FLOAT_ITERATION_CAP: usize = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<S> {
    Optimal { x: Vec<S>, objective: S },
    Infeasible,
    Unbounded,
}

struct Tableau<S> {
    t: Matrix<S>,
    basis: Vec<usize>,
    m: usize,
    rhs: usize,
}

impl<S: Scalar> Tableau<S> {
    fn is_neg(x: &S) -> bool {
        *x < S::zero() && !S::negligible(x, &S::one())
    }

    fn is_pos(x: &S) -> bool {
        *x > S::zero() && !S::negligible(x, &S::one())
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.t[(r, col)].clone();
        for j in 0..=self.rhs {
            self.t[(r, j)] = self.t[(r, j)].clone() / p.clone();
        }
        for i in 0..=self.m {
            if i == r || self.t[(i, col)].is_zero() {
                continue;
            }
            let f = self.t[(i, col)].clone();
            for j in 0..=self.rhs {
                if self.t[(r, j)].is_zero() {
                    continue;
                }
                let delta = f.clone() * self.t[(r, j)].clone();
                self.t[(i, j)] = self.t[(i, j)].clone() - delta;
            }
        }
        self.basis[r] = col;
    }

    /// Runs pivots until optimal; `false` means unbounded.
    fn optimize(&mut self, allowed: impl Fn(usize) -> bool) -> Result<bool> {
        let mut iterations = 0usize;
        loop {
            let obj = self.m;
            let Some(col) = (0..self.rhs).find(|&j| allowed(j) && Self::is_neg(&self.t[(obj, j)]))
            else {
                return Ok(true);
            };
            let mut leave: Option<(usize, S)> = None;
            for i in 0..self.m {
                let a = &self.t[(i, col)];
                if !Self::is_pos(a) {
                    continue;
                }
                let ratio = self.t[(i, self.rhs)].clone() / a.clone();
                let better = match &leave {
                    None => true,
                    Some((li, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*li])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            self.pivot(row, col);
            iterations += 1;
            if !S::EXACT && iterations > FLOAT_ITERATION_CAP {
                return Err(Error::Numerical("simplex iteration cap reached".into()));
            }
        }
    }
}

/// Minimize `c . x` subject to `a x = b`, `x >= 0`.
pub fn minimize<S: Scalar>(a: &Matrix<S>, b: &[S], c: &[S]) -> Result<LpOutcome<S>> {
    let (m, n) = a.shape();
    if b.len() != m || c.len() != n {
        return domain(format!(
            "LP shape mismatch: A is {m}x{n}, b has {}, c has {}",
            b.len(),
            c.len()
        ));
    }
    let width = n + m;
    let mut t = Matrix::zeros(m + 1, width + 1);
    for i in 0..m {
        let flip = b[i] < S::zero();
        for j in 0..n {
            t[(i, j)] = if flip {
                -a[(i, j)].clone()
            } else {
                a[(i, j)].clone()
            };
        }
        t[(i, n + i)] = S::one();
        t[(i, width)] = if flip { -b[i].clone() } else { b[i].clone() };
    }
    // Phase one: minimize the sum of artificials.
    for j in (0..n).chain(std::iter::once(width)) {
        let mut s = S::zero();
        for i in 0..m {
            s = s - t[(i, j)].clone();
        }
        t[(m, j)] = s;
    }
    let mut tab = Tableau {
        t,
        basis: (n..n + m).collect(),
        m,
        rhs: width,
    };
    tab.optimize(|_| true)?;
    let infeasibility = -tab.t[(m, width)].clone();
    if Tableau::is_pos(&infeasibility) {
        return Ok(LpOutcome::Infeasible);
    }
    for i in 0..m {
        if tab.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !S::negligible(&tab.t[(i, j)], &S::one())) {
                tab.pivot(i, j);
            }
        }
    }

    // Phase two objective row.
    let cost = |j: usize| if j < n { c[j].clone() } else { S::zero() };
    for j in 0..=width {
        let mut d = if j < width { cost(j) } else { S::zero() };
        for i in 0..m {
            let cb = cost(tab.basis[i]);
            if !cb.is_zero() {
                d = d - cb * tab.t[(i, j)].clone();
            }
        }
        tab.t[(m, j)] = d;
    }
    if !tab.optimize(|j| j < n)? {
        return Ok(LpOutcome::Unbounded);
    }
    let mut x = vec![S::zero(); n];
    for i in 0..m {
        if tab.basis[i] < n {
            x[tab.basis[i]] = tab.t[(i, width)].clone();
        }
    }
    let objective = -tab.t[(m, width)].clone();
    Ok(LpOutcome::Optimal { x, objective })
}
