//! Least-squares approximation of a predicate by a weighted combination of
//! basis predicates, evaluated over the whole input space.
//!
//! Truth values embed as reals ({0, 1} by default, {-1, +1} optionally);
//! the basis columns (plus an all-ones column when `affine`) form the
//! design matrix and the coefficients are its pseudoinverse applied to the
//! target, i.e. the minimum-norm least-squares solution. Membership of the
//! target in the column span is decided exactly in rational arithmetic, so
//! `residual_sse` is exactly zero precisely when `in_span` holds.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::{exact, LinearOperator, Matrix};
use crate::logic::{Predicate, PredicateFamily};
use crate::scalar::{Real, Scalar};
use crate::Rational;

/// Two projections closer than this (max-abs) share an alias class.
pub const PROJECTION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Embedding {
    /// false -> 0, true -> 1
    #[default]
    ZeroOne,
    /// false -> -1, true -> +1
    PlusMinusOne,
}

impl Embedding {
    fn value<S: Scalar>(self, b: bool) -> S {
        match (self, b) {
            (_, true) => S::one(),
            (Embedding::ZeroOne, false) => S::zero(),
            (Embedding::PlusMinusOne, false) => -S::one(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ApproxOptions {
    pub affine: bool,
    pub embedding: Embedding,
}

impl ApproxOptions {
    pub fn affine() -> Self {
        Self {
            affine: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxReport {
    pub target_id: String,
    pub basis_ids: Vec<String>,
    /// One coefficient per basis member.
    pub alpha: Vec<f64>,
    /// Coefficient of the all-ones column, present when the fit is affine.
    pub intercept: Option<f64>,
    pub residual_sse: f64,
    pub rms_score: f64,
    pub in_span: bool,
    pub depth_target: u32,
    pub depth_basis_max: u32,
    pub affine: bool,
    pub embedding: Embedding,
}

/// Minimum-norm least-squares solution of `design * coef ~ target`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit<S> {
    pub coef: Vec<S>,
    pub fitted: Vec<S>,
    pub residual: Vec<S>,
    pub sse: S,
}

/// Least squares through the SVD pseudoinverse.
pub fn fit<S: Real>(design: &Matrix<S>, target: &[S]) -> Result<Fit<S>> {
    let pinv = LinearOperator::new(design.clone())?.pseudoinverse()?;
    finish_fit(design, pinv.matrix(), target)
}

/// Least squares through the rank-factorization pseudoinverse.
pub fn fit_exact<S: Scalar>(design: &Matrix<S>, target: &[S]) -> Result<Fit<S>> {
    let pinv = exact::pseudoinverse_by_factorization(design)?;
    finish_fit(design, &pinv, target)
}

fn finish_fit<S: Scalar>(design: &Matrix<S>, pinv: &Matrix<S>, target: &[S]) -> Result<Fit<S>> {
    if target.len() != design.rows() {
        return domain("target length does not match design rows");
    }
    let coef = pinv.mul_vec(target)?;
    let fitted = design.mul_vec(&coef)?;
    let residual: Vec<S> = target
        .iter()
        .zip(&fitted)
        .map(|(t, f)| t.clone() - f.clone())
        .collect();
    let sse = residual
        .iter()
        .fold(S::zero(), |acc, r| acc + r.clone() * r.clone());
    Ok(Fit {
        coef,
        fitted,
        residual,
        sse,
    })
}

fn check_universe(p: &Predicate, basis: &PredicateFamily) -> Result<()> {
    if p.universe() != basis.universe() {
        return domain(format!(
            "target {:?} has {} atoms, basis {:?} has {}",
            p.label(),
            p.universe().n_atoms(),
            basis.label(),
            basis.universe().n_atoms()
        ));
    }
    Ok(())
}

/// Design matrix (inputs x basis [+ ones]) in scalar `S`.
pub fn design_matrix<S: Scalar>(basis: &PredicateFamily, opts: ApproxOptions) -> Matrix<S> {
    let k = basis.len();
    let cols = k + usize::from(opts.affine);
    Matrix::from_fn(basis.universe().size(), cols, |x, j| {
        if j < k {
            opts.embedding.value(basis.members()[j].eval(x))
        } else {
            S::one()
        }
    })
}

pub fn embed<S: Scalar>(p: &Predicate, embedding: Embedding) -> Vec<S> {
    p.universe()
        .inputs()
        .map(|x| embedding.value(p.eval(x)))
        .collect()
}

/// Exact span test; duplicate rows are dropped first since they cannot
/// change either rank.
pub fn target_in_span(p: &Predicate, basis: &PredicateFamily, opts: ApproxOptions) -> Result<bool> {
    check_universe(p, basis)?;
    let rows: BTreeSet<(Vec<bool>, bool)> = p
        .universe()
        .inputs()
        .map(|x| {
            (
                basis.members().iter().map(|m| m.eval(x)).collect(),
                p.eval(x),
            )
        })
        .collect();
    let k = basis.len();
    let cols = k + usize::from(opts.affine);
    let rows: Vec<_> = rows.into_iter().collect();
    let design = Matrix::<Rational>::from_fn(rows.len(), cols, |i, j| {
        if j < k {
            opts.embedding.value(rows[i].0[j])
        } else {
            Rational::from_i64_exact(1)
        }
    });
    let rhs: Vec<Rational> = rows.iter().map(|(_, t)| opts.embedding.value(*t)).collect();
    exact::in_column_space(&design, &rhs)
}

fn report<S: Scalar>(
    p: &Predicate,
    basis: &PredicateFamily,
    opts: ApproxOptions,
    fit: Fit<S>,
) -> Result<ApproxReport> {
    let in_span = target_in_span(p, basis, opts)?;
    let k = basis.len();
    let sse = if in_span { 0.0 } else { fit.sse.to_f64_lossy() };
    Ok(ApproxReport {
        target_id: p.label().to_string(),
        basis_ids: basis.ids(),
        alpha: fit.coef[..k].iter().map(Scalar::to_f64_lossy).collect(),
        intercept: opts.affine.then(|| fit.coef[k].to_f64_lossy()),
        residual_sse: sse,
        rms_score: (sse / p.universe().size() as f64).sqrt(),
        in_span,
        depth_target: p.depth(),
        depth_basis_max: basis.max_depth(),
        affine: opts.affine,
        embedding: opts.embedding,
    })
}

/// Floating-point fit in scalar `S`.
pub fn approximate_with<S: Real>(
    p: &Predicate,
    basis: &PredicateFamily,
    opts: ApproxOptions,
) -> Result<ApproxReport> {
    check_universe(p, basis)?;
    let f = fit(
        &design_matrix::<S>(basis, opts),
        &embed::<S>(p, opts.embedding),
    )?;
    report(p, basis, opts, f)
}

/// Fit carried out entirely in exact rationals.
pub fn approximate_exact(
    p: &Predicate,
    basis: &PredicateFamily,
    opts: ApproxOptions,
) -> Result<ApproxReport> {
    check_universe(p, basis)?;
    let f = fit_exact(
        &design_matrix::<Rational>(basis, opts),
        &embed::<Rational>(p, opts.embedding),
    )?;
    report(p, basis, opts, f)
}

/// `f64` fit with the {0, 1} embedding.
pub fn approximate(p: &Predicate, basis: &PredicateFamily, affine: bool) -> Result<ApproxReport> {
    approximate_with::<f64>(
        p,
        basis,
        ApproxOptions {
            affine,
            ..Default::default()
        },
    )
}

/// Root-mean-square residual over the input space.
pub fn hallucination_score(
    p: &Predicate,
    basis: &PredicateFamily,
    opts: ApproxOptions,
) -> Result<f64> {
    Ok(approximate_with::<f64>(p, basis, opts)?.rms_score)
}

/// Groups candidates by their projection onto the basis span, in order of
/// first appearance. Returns candidate identifiers per class.
pub fn alias_classes(
    basis: &PredicateFamily,
    candidates: &PredicateFamily,
    opts: ApproxOptions,
) -> Result<Vec<Vec<String>>> {
    if basis.universe() != candidates.universe() {
        return domain("basis and candidates live on different universes");
    }
    let design = design_matrix::<f64>(basis, opts);
    let pinv = LinearOperator::new(design.clone())?.pseudoinverse()?;
    let mut classes: Vec<(Vec<f64>, Vec<String>)> = Vec::new();
    for c in candidates.members() {
        let proj = finish_fit(&design, pinv.matrix(), &embed::<f64>(c, opts.embedding))?.fitted;
        let home = classes.iter_mut().find(|(rep, _)| {
            rep.iter()
                .zip(&proj)
                .all(|(a, b)| (a - b).abs() <= PROJECTION_TOL)
        });
        match home {
            Some((_, ids)) => ids.push(c.label().to_string()),
            None => classes.push((proj, vec![c.label().to_string()])),
        }
    }
    Ok(classes.into_iter().map(|(_, ids)| ids).collect())
}

pub const APPROX_CSV_HEADER: [&str; 7] = [
    "target",
    "basis_size",
    "residual_sse",
    "rms_score",
    "in_span",
    "depth_target",
    "depth_basis_max",
];

pub fn write_approx_csv<W: std::io::Write>(reports: &[ApproxReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(APPROX_CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.target_id.clone(),
            r.basis_ids.len().to_string(),
            r.residual_sse.to_string(),
            r.rms_score.to_string(),
            r.in_span.to_string(),
            r.depth_target.to_string(),
            r.depth_basis_max.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
