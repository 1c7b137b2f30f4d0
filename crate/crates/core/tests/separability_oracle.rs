use std::collections::HashSet;

use netlogic::expressiveness::{
    is_linearly_separable, representable_by_single_layer, separate, DEFAULT_MARGIN,
};
use netlogic::logic::{at_least_k_true, Predicate, PredicateFamily, Universe};
use netlogic::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Every threshold function on `k` boolean inputs, as a truth-table bitmask,
/// found by brute force over small integer weights and half-integer biases.
fn threshold_functions(k: usize) -> HashSet<u32> {
    let span = 3i32;
    let mut out = HashSet::new();
    let combos = (2 * span + 1).pow(k as u32);
    for code in 0..combos {
        let mut c = code;
        let w: Vec<i32> = (0..k)
            .map(|_| {
                let d = c % (2 * span + 1);
                c /= 2 * span + 1;
                d - span
            })
            .collect();
        // bias + 0.5 with bias ranging far enough to reach both constants
        for twice_bias in (-(2 * span * k as i32) - 1..=2 * span * k as i32 + 1).step_by(2) {
            let mut mask = 0u32;
            for x in 0..1u32 << k {
                let s: i32 = (0..k).map(|i| if x >> i & 1 == 1 { w[i] } else { 0 }).sum();
                if 2 * s + twice_bias > 0 {
                    mask |= 1 << x;
                }
            }
            out.insert(mask);
        }
    }
    out
}

fn from_mask(u: Universe, mask: u32) -> Predicate {
    Predicate::from_fn(u, 0, format!("f{mask}"), |x| mask >> x & 1 == 1)
}

#[test]
fn oracle_counts_match_known_values() {
    assert_eq!(threshold_functions(1).len(), 4);
    assert_eq!(threshold_functions(2).len(), 14);
    assert_eq!(threshold_functions(3).len(), 104);
}

#[test]
fn exact_lp_agrees_with_enumeration_on_three_atoms() {
    let u = Universe::new(3).unwrap();
    let atoms = PredicateFamily::atoms(u).unwrap();
    let oracle = threshold_functions(3);
    let mut separable = 0;
    for mask in 0u32..256 {
        let p = from_mask(u, mask);
        let w = is_linearly_separable(&p, &atoms).unwrap();
        assert_eq!(w.is_some(), oracle.contains(&mask), "mask {mask:08b}");
        if let Some(w) = w {
            let feats: Vec<&Predicate> = atoms.members().iter().collect();
            assert!(w.verify(&p, &feats, DEFAULT_MARGIN));
            separable += 1;
        }
    }
    assert_eq!(separable, 104);
}

#[test]
fn float_route_agrees_with_exact_route() {
    let u = Universe::new(3).unwrap();
    let atoms = PredicateFamily::atoms(u).unwrap();
    let feats: Vec<&Predicate> = atoms.members().iter().collect();
    for mask in 0u32..256 {
        let p = from_mask(u, mask);
        let a = separate::<f64>(&p, &feats, DEFAULT_MARGIN)
            .unwrap()
            .is_some();
        let b = separate::<Rational>(&p, &feats, DEFAULT_MARGIN)
            .unwrap()
            .is_some();
        assert_eq!(a, b, "mask {mask:08b}");
    }
}

/// Features that are arbitrary predicates: the oracle evaluates the
/// threshold table on each input's feature pattern.
#[test]
fn arbitrary_features_agree_with_enumeration() {
    let u = Universe::new(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let t2 = threshold_functions(2);
    let t3 = threshold_functions(3);
    for case in 0..150 {
        let k = if case % 2 == 0 { 2 } else { 3 };
        let feats: Vec<Predicate> = (0..k)
            .map(|i| from_mask(u, rng.gen_range(0..1 << 16)).with_label(format!("g{i}")))
            .collect();
        let target = from_mask(u, rng.gen_range(0..1 << 16));
        let pattern = |x: usize| (0..k).fold(0u32, |acc, i| acc | (feats[i].eval(x) as u32) << i);
        let table = if k == 2 { &t2 } else { &t3 };
        let expected = table
            .iter()
            .any(|&mask| (0..16).all(|x| (mask >> pattern(x) & 1 == 1) == target.eval(x)));
        let fam = PredicateFamily::new("g", feats.clone()).unwrap();
        let got = is_linearly_separable(&target, &fam).unwrap();
        assert_eq!(got.is_some(), expected, "case {case}");
        if let Some(w) = got {
            let refs: Vec<&Predicate> = feats.iter().collect();
            assert!(w.verify(&target, &refs, DEFAULT_MARGIN));
        }
    }
}

#[test]
fn parity_needs_more_than_atoms() {
    for n in 2..=5 {
        let u = Universe::new(n).unwrap();
        let parity = Predicate::from_fn(u, 0, "parity", |x| x.count_ones() % 2 == 1);
        let atoms = PredicateFamily::atoms(u).unwrap();
        assert!(
            is_linearly_separable(&parity, &atoms).unwrap().is_none(),
            "n={n}"
        );
    }
}

#[test]
fn counting_thresholds_use_all_atoms() {
    for n in 2..=5 {
        let u = Universe::new(n).unwrap();
        let atoms = PredicateFamily::atoms(u).unwrap();
        for k in 1..=n {
            let p = at_least_k_true(k, u);
            let r = representable_by_single_layer(&p, n, &atoms).unwrap();
            assert!(r.representable, "k={k} n={n}");
            let fewer = representable_by_single_layer(&p, n - 1, &atoms).unwrap();
            assert!(!fewer.representable, "k={k} n={n} with n-1 features");
        }
    }
}
