//! Width-bounded single-layer representability and the counting-predicate
//! capacity experiment.

use std::time::Instant;

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::expressiveness::separability::{separate, SeparabilityWitness, DEFAULT_MARGIN};
use crate::logic::{at_least_k_true, Predicate, PredicateFamily, Universe, MAX_ATOMS};
use crate::Rational;

pub const DEFAULT_SUBSET_BUDGET: u64 = 1_000_000;

/// Outcome of one representability search.
#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub w: usize,
    pub n: usize,
    pub subsets_tested: u64,
    pub representable: bool,
    pub witness: Option<SeparabilityWitness>,
    pub elapsed_s: f64,
}

/// Search settings: subset budget and witness margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacitySearch {
    pub budget: u64,
    pub margin: f64,
}

impl Default for CapacitySearch {
    fn default() -> Self {
        Self {
            budget: DEFAULT_SUBSET_BUDGET,
            margin: DEFAULT_MARGIN,
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

impl CapacitySearch {
    /// Tries feature subsets of `basis` of size `min(w, |basis|)` in
    /// lexicographic order of member position, stopping at the first
    /// separable one. Smaller subsets are not tried: any threshold unit over
    /// a subset is also one over each superset (with zero weights).
    pub fn representable(
        &self,
        p: &Predicate,
        w: usize,
        basis: &PredicateFamily,
    ) -> Result<CapacityReport> {
        if w == 0 {
            return domain("width must be at least 1");
        }
        if basis.universe() != p.universe() {
            return domain(format!(
                "basis {:?} is over {} atoms, target {:?} over {}",
                basis.label(),
                basis.universe().n_atoms(),
                p.label(),
                p.universe().n_atoms()
            ));
        }
        let start = Instant::now();
        let size = w.min(basis.len());
        let total = binomial(basis.len(), size);
        let mut tested = 0u64;
        let mut witness = None;
        for subset in basis.members().iter().combinations(size) {
            if tested == self.budget {
                let remaining = u64::try_from(total - tested as u128).unwrap_or(u64::MAX);
                return Err(Error::Budget {
                    cap: self.budget,
                    remaining,
                });
            }
            tested += 1;
            if let Some(found) = separate::<Rational>(p, &subset, self.margin)? {
                witness = Some(found);
                break;
            }
        }
        Ok(CapacityReport {
            w,
            n: p.universe().n_atoms(),
            subsets_tested: tested,
            representable: witness.is_some(),
            witness,
            elapsed_s: start.elapsed().as_secs_f64(),
        })
    }
}

/// Default search over `basis`.
pub fn representable_by_single_layer(
    p: &Predicate,
    w: usize,
    basis: &PredicateFamily,
) -> Result<CapacityReport> {
    CapacitySearch::default().representable(p, w, basis)
}

/// Asks whether "at least `w + 1` atoms are true" fits a width-`w` unit over
/// the atoms of an `n`-atom universe.
pub fn exhaust_capacity(w: usize, n: usize) -> Result<CapacityReport> {
    exhaust_capacity_with(&CapacitySearch::default(), w, n)
}

pub fn exhaust_capacity_with(
    search: &CapacitySearch,
    w: usize,
    n: usize,
) -> Result<CapacityReport> {
    if w == 0 {
        return domain("width must be at least 1");
    }
    if n < w + 1 {
        return domain(format!("need n >= w + 1, got w = {w}, n = {n}"));
    }
    if n > MAX_ATOMS {
        return domain(format!("n = {n} exceeds the cap of {MAX_ATOMS}"));
    }
    let u = Universe::new(n)?;
    let target = at_least_k_true(w + 1, u);
    search.representable(&target, w, &PredicateFamily::atoms(u)?)
}

/// Flat record of a [`CapacityReport`]; also the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRecord {
    pub w: usize,
    pub n: usize,
    pub subsets_tested: u64,
    pub representable: bool,
    pub witness_weights: Option<Vec<f64>>,
    pub witness_bias: Option<f64>,
    pub elapsed_s: Option<f64>,
}

impl CapacityReport {
    /// `elapsed_s` is left empty unless `timing` is set, so that reruns can
    /// be byte-identical.
    pub fn record(&self, timing: bool) -> CapacityRecord {
        CapacityRecord {
            w: self.w,
            n: self.n,
            subsets_tested: self.subsets_tested,
            representable: self.representable,
            witness_weights: self.witness.as_ref().map(|w| w.weights.clone()),
            witness_bias: self.witness.as_ref().map(|w| w.bias),
            elapsed_s: timing.then_some(self.elapsed_s),
        }
    }
}

pub const CAPACITY_CSV_HEADER: [&str; 7] = [
    "w",
    "n",
    "subsets_tested",
    "representable",
    "witness_weights",
    "witness_bias",
    "elapsed_s",
];

/// CSV fields in header order; weights are `;`-separated.
pub fn capacity_csv_fields(r: &CapacityRecord) -> [String; 7] {
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    [
        r.w.to_string(),
        r.n.to_string(),
        r.subsets_tested.to_string(),
        r.representable.to_string(),
        r.witness_weights
            .as_ref()
            .map(|ws| ws.iter().map(f64::to_string).collect::<Vec<_>>().join(";"))
            .unwrap_or_default(),
        opt(r.witness_bias),
        opt(r.elapsed_s),
    ]
}

pub fn write_capacity_csv<W: std::io::Write>(records: &[CapacityRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CAPACITY_CSV_HEADER)?;
    for r in records {
        w.write_record(capacity_csv_fields(r))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{atom, relevant_variables};
    use proptest::prelude::*;

    fn atoms(n: usize) -> PredicateFamily {
        PredicateFamily::atoms(Universe::new(n).unwrap()).unwrap()
    }

    #[test]
    fn majority_of_three_is_representable() {
        let u = Universe::new(3).unwrap();
        let r = representable_by_single_layer(&at_least_k_true(2, u), 3, &atoms(3)).unwrap();
        assert!(r.representable);
        let w = r.witness.unwrap();
        assert_eq!(w.weights, vec![1.0, 1.0, 1.0]);
        assert_eq!(w.bias, -1.5);
    }

    #[test]
    fn all_three_not_visible_to_width_two() {
        let u = Universe::new(3).unwrap();
        let r = representable_by_single_layer(&at_least_k_true(3, u), 2, &atoms(3)).unwrap();
        assert!(!r.representable);
        assert_eq!(r.subsets_tested, 3);
        assert!(r.witness.is_none());
    }

    #[test]
    fn constant_true_with_width_one() {
        let u = Universe::new(2).unwrap();
        let r = representable_by_single_layer(&Predicate::constant(u, true), 1, &atoms(2)).unwrap();
        assert!(r.representable);
        assert_eq!(r.subsets_tested, 1);
        let w = r.witness.unwrap();
        assert_eq!((w.weights.as_slice(), w.bias), (&[0.0][..], 1.0));
    }

    #[test]
    fn exhaust_examples() {
        let r = exhaust_capacity(1, 2).unwrap();
        assert!(!r.representable);
        assert_eq!(r.subsets_tested, 2);
        let r = exhaust_capacity(3, 4).unwrap();
        assert!(!r.representable);
        assert_eq!(r.subsets_tested, 4);
        assert!(matches!(exhaust_capacity(2, 2), Err(Error::Domain(_))));
        assert!(exhaust_capacity(0, 2).is_err());
        assert!(exhaust_capacity(1, 21).is_err());
    }

    #[test]
    fn budget_error_reports_remaining() {
        let u = Universe::new(6).unwrap();
        let search = CapacitySearch {
            budget: 5,
            ..Default::default()
        };
        match search.representable(&at_least_k_true(4, u), 3, &atoms(6)) {
            Err(Error::Budget { cap, remaining }) => {
                assert_eq!(cap, 5);
                assert_eq!(remaining, 20 - 5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn csv_row_shape() {
        let r = exhaust_capacity(1, 2).unwrap().record(false);
        let mut buf = Vec::new();
        write_capacity_csv(&[r], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "w,n,subsets_tested,representable,witness_weights,witness_bias,elapsed_s\n1,2,2,false,,,\n"
        );
        let json = serde_json::to_string(&exhaust_capacity(1, 2).unwrap().record(false)).unwrap();
        assert_eq!(
            json,
            r#"{"w":1,"n":2,"subsets_tested":2,"representable":false,"witness_weights":null,"witness_bias":null,"elapsed_s":null}"#
        );
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(4, 3), 4);
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(3, 5), 0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn width_monotone_and_dependence_bound(n in 1usize..5, code in any::<u32>(), w in 1usize..4) {
            let u = Universe::new(n).unwrap();
            let p = Predicate::from_fn(u, 0, "p", |x| code >> (x % 32) & 1 == 1);
            let basis = atoms(n);
            let narrow = representable_by_single_layer(&p, w, &basis).unwrap();
            let wide = representable_by_single_layer(&p, w + 1, &basis).unwrap();
            if narrow.representable {
                prop_assert!(wide.representable);
            }
            if relevant_variables(&p).len() > w {
                prop_assert!(!narrow.representable);
            }
            if let Some(wit) = &narrow.witness {
                let feats: Vec<&Predicate> = wit
                    .feature_ids
                    .iter()
                    .map(|id| basis.members().iter().find(|m| m.label() == id).unwrap())
                    .collect();
                prop_assert!(wit.verify(&p, &feats, DEFAULT_MARGIN));
            }
        }
    }

    #[test]
    fn atom_is_width_one() {
        let u = Universe::new(3).unwrap();
        let r = representable_by_single_layer(&atom(2, u).unwrap(), 1, &atoms(3)).unwrap();
        assert!(r.representable);
        assert_eq!(r.subsets_tested, 2);
        assert_eq!(r.witness.unwrap().feature_ids, vec!["x2"]);
    }
}
