use std::collections::BTreeSet;

use crate::error::{domain, Result};
use crate::logic::predicate::{Predicate, PredicateFamily, Table, Universe};

/// Depth added by a counting construction: one level for the existential
/// block over indices, one for the conjunction of member predicates.
pub const THRESHOLD_DEPTH_STEP: u32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Not,
    Xor,
}

impl Connective {
    fn name(self) -> &'static str {
        match self {
            Connective::And => "and",
            Connective::Or => "or",
            Connective::Not => "not",
            Connective::Xor => "xor",
        }
    }
}

/// Atom `i` (1-based): true exactly where bit `i - 1` of the input is set.
pub fn atom(i: usize, u: Universe) -> Result<Predicate> {
    if i == 0 || i > u.n_atoms() {
        return domain(format!("atom index {i} outside 1..={}", u.n_atoms()));
    }
    Ok(Predicate::from_fn(u, 0, format!("x{i}"), |x| {
        Universe::bit(x, i)
    }))
}

/// Pointwise boolean combination; depth is the maximum operand depth.
pub fn combine(kind: Connective, operands: &[&Predicate]) -> Result<Predicate> {
    let Some(first) = operands.first() else {
        return domain(format!("{} needs operands", kind.name()));
    };
    match kind {
        Connective::Not if operands.len() != 1 => {
            return domain(format!(
                "not takes exactly one operand, got {}",
                operands.len()
            ))
        }
        Connective::And | Connective::Or | Connective::Xor if operands.len() < 2 => {
            return domain(format!(
                "{} takes at least two operands, got {}",
                kind.name(),
                operands.len()
            ))
        }
        _ => {}
    }
    let u = first.universe();
    if let Some(bad) = operands.iter().find(|p| p.universe() != u) {
        return domain(format!(
            "operand {:?} has {} atoms, expected {}",
            bad.label(),
            bad.universe().n_atoms(),
            u.n_atoms()
        ));
    }
    let mut table: Table = first.table().clone();
    for p in &operands[1..] {
        match kind {
            Connective::And => table &= p.table(),
            Connective::Or => table |= p.table(),
            Connective::Xor => table ^= p.table(),
            Connective::Not => unreachable!(),
        }
    }
    if kind == Connective::Not {
        table = !table;
    }
    let depth = operands.iter().map(|p| p.depth()).max().unwrap_or(0);
    let label = format!(
        "{}({})",
        kind.name(),
        operands
            .iter()
            .map(|p| p.label())
            .collect::<Vec<_>>()
            .join(",")
    );
    Predicate::from_table(u, table, depth, label)
}

pub fn and(p: &Predicate, q: &Predicate) -> Result<Predicate> {
    combine(Connective::And, &[p, q])
}

pub fn or(p: &Predicate, q: &Predicate) -> Result<Predicate> {
    combine(Connective::Or, &[p, q])
}

pub fn xor(p: &Predicate, q: &Predicate) -> Result<Predicate> {
    combine(Connective::Xor, &[p, q])
}

pub fn not(p: &Predicate) -> Result<Predicate> {
    combine(Connective::Not, &[p])
}

/// "At least `k` atoms are true."
pub fn at_least_k_true(k: usize, u: Universe) -> Predicate {
    Predicate::from_fn(
        u,
        THRESHOLD_DEPTH_STEP,
        format!("atleast{k}of{}", u.n_atoms()),
        |x| x.count_ones() as usize >= k,
    )
}

/// "At least `k` distinct members of `fam` hold." Distinctness is by member
/// identity, so two members with equal tables both count.
pub fn at_least_k_of_family(k: usize, fam: &PredicateFamily) -> Result<Predicate> {
    if fam.is_empty() {
        return domain("counting over an empty family");
    }
    let u = fam.universe();
    let mut counts = vec![0usize; u.size()];
    for m in fam.members() {
        for x in m.table().iter_ones() {
            counts[x] += 1;
        }
    }
    Ok(Predicate::from_fn(
        u,
        fam.max_depth() + THRESHOLD_DEPTH_STEP,
        format!("atleast{k}of[{}]", fam.label()),
        |x| counts[x] >= k,
    ))
}

/// Atoms whose flip changes `p` on at least one input.
pub fn relevant_variables(p: &Predicate) -> BTreeSet<usize> {
    let u = p.universe();
    (1..=u.n_atoms())
        .filter(|&i| {
            let mask = 1usize << (i - 1);
            u.inputs()
                .any(|x| x & mask == 0 && p.eval(x) != p.eval(x | mask))
        })
        .collect()
}
