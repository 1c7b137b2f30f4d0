//! Exact linear-threshold representability of a predicate over a set of
//! feature predicates.
//!
//! Inputs are grouped by their feature pattern; a pattern carrying both
//! truth values makes the target unseparable outright. Otherwise the
//! distinct patterns feed the LP
//!
//! ```text
//! minimize  sum |w_j|
//! s.t.      y_x (w . f(x) + b) >= 1      for every distinct pattern f(x)
//! ```
//!
//! with `y_x = +1` where the target holds and `-1` elsewhere. Strict
//! separability is equivalent to feasibility of this LP after rescaling.
//! The minimum-L1 solution is then rescaled to `max |w_j| = 1`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::expressiveness::simplex::{minimize, LpOutcome};
use crate::linalg::Matrix;
use crate::logic::{Predicate, PredicateFamily};
use crate::scalar::Scalar;
use crate::Rational;

/// Minimum signed margin a witness must clear on every input.
pub const DEFAULT_MARGIN: f64 = 1e-6;

/// Weights and bias of a single threshold unit over named features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparabilityWitness {
    pub feature_ids: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
}

impl SeparabilityWitness {
    pub fn activation(&self, features: &[&Predicate], x: usize) -> f64 {
        self.weights
            .iter()
            .zip(features)
            .map(|(w, f)| if f.eval(x) { *w } else { 0.0 })
            .sum::<f64>()
            + self.bias
    }

    /// Smallest value of `y_x (w . f(x) + b)` over the universe.
    pub fn margin(&self, target: &Predicate, features: &[&Predicate]) -> f64 {
        target
            .universe()
            .inputs()
            .map(|x| {
                let a = self.activation(features, x);
                if target.eval(x) {
                    a
                } else {
                    -a
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Re-checks sign agreement with margin at least `epsilon` on every input.
    pub fn verify(&self, target: &Predicate, features: &[&Predicate], epsilon: f64) -> bool {
        features.len() == self.weights.len() && self.margin(target, features) >= epsilon
    }
}

/// Decides separability exactly (rational arithmetic).
pub fn is_linearly_separable(
    p: &Predicate,
    features: &PredicateFamily,
) -> Result<Option<SeparabilityWitness>> {
    let refs: Vec<&Predicate> = features.members().iter().collect();
    separate::<Rational>(p, &refs, DEFAULT_MARGIN)
}

/// Separability over an explicit feature list, solving the LP in scalar `S`.
pub fn separate<S: Scalar>(
    p: &Predicate,
    features: &[&Predicate],
    epsilon: f64,
) -> Result<Option<SeparabilityWitness>> {
    if features.is_empty() {
        return domain("separability needs at least one feature");
    }
    if let Some(f) = features.iter().find(|f| f.universe() != p.universe()) {
        return domain(format!(
            "feature {:?} has {} atoms, target {:?} has {}",
            f.label(),
            f.universe().n_atoms(),
            p.label(),
            p.universe().n_atoms()
        ));
    }

    let mut points: BTreeMap<Vec<bool>, bool> = BTreeMap::new();
    for x in p.universe().inputs() {
        let pattern: Vec<bool> = features.iter().map(|f| f.eval(x)).collect();
        let label = p.eval(x);
        if let Some(prev) = points.insert(pattern, label) {
            if prev != label {
                return Ok(None);
            }
        }
    }

    // Variables: w+ (k), w- (k), b+, b-, slack (one per point).
    let k = features.len();
    let rows = points.len();
    let nvars = 2 * k + 2 + rows;
    let mut a = Matrix::<S>::zeros(rows, nvars);
    for (i, (pattern, &label)) in points.iter().enumerate() {
        let y = if label { S::one() } else { -S::one() };
        for (j, &on) in pattern.iter().enumerate() {
            if on {
                a[(i, j)] = y.clone();
                a[(i, k + j)] = -y.clone();
            }
        }
        a[(i, 2 * k)] = y.clone();
        a[(i, 2 * k + 1)] = -y;
        a[(i, 2 * k + 2 + i)] = -S::one();
    }
    let b = vec![S::one(); rows];
    let c: Vec<S> = (0..nvars)
        .map(|j| if j < 2 * k { S::one() } else { S::zero() })
        .collect();

    let x = match minimize(&a, &b, &c)? {
        LpOutcome::Optimal { x, .. } => x,
        LpOutcome::Infeasible => return Ok(None),
        LpOutcome::Unbounded => {
            return Err(Error::Numerical(
                "separability LP reported unbounded".into(),
            ))
        }
    };
    let mut weights: Vec<S> = (0..k).map(|j| x[j].clone() - x[k + j].clone()).collect();
    let mut bias = x[2 * k].clone() - x[2 * k + 1].clone();
    let scale = weights
        .iter()
        .map(Scalar::abs_val)
        .fold(S::zero(), |m, w| if w > m { w } else { m });
    if scale > S::zero() {
        weights
            .iter_mut()
            .for_each(|w| *w = w.clone() / scale.clone());
        bias = bias / scale;
    }

    let witness = SeparabilityWitness {
        feature_ids: features.iter().map(|f| f.label().to_string()).collect(),
        weights: weights.iter().map(Scalar::to_f64_lossy).collect(),
        bias: bias.to_f64_lossy(),
    };
    if !witness.verify(p, features, epsilon) {
        return Err(Error::Numerical(format!(
            "witness for {:?} failed re-verification (margin {})",
            p.label(),
            witness.margin(p, features)
        )));
    }
    Ok(Some(witness))
}
