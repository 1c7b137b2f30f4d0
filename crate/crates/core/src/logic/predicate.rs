use std::fmt;

use bitvec::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Largest supported number of atomic propositions.
pub const MAX_ATOMS: usize = 20;

pub type Table = BitVec<u64, Lsb0>;

/// The set of all assignments to `n_atoms` propositions. Assignment index
/// `x` gives atom `i` (1-based) the value of bit `i - 1` of `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Universe {
    n_atoms: usize,
}

impl Universe {
    pub fn new(n_atoms: usize) -> Result<Self> {
        if n_atoms > MAX_ATOMS {
            return domain(format!(
                "universe of {n_atoms} atoms exceeds the cap of {MAX_ATOMS}"
            ));
        }
        Ok(Self { n_atoms })
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn size(&self) -> usize {
        1usize << self.n_atoms
    }

    pub fn inputs(&self) -> std::ops::Range<usize> {
        0..self.size()
    }

    /// Value of atom `i` (1-based) in assignment `x`.
    pub fn bit(x: usize, i: usize) -> bool {
        (x >> (i - 1)) & 1 == 1
    }
}

/// Exact truth table over a universe, with its logic-depth class and an
/// identifying label.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Predicate {
    universe: Universe,
    table: Table,
    depth: u32,
    label: String,
}

impl Predicate {
    pub fn from_table(
        universe: Universe,
        table: Table,
        depth: u32,
        label: impl Into<String>,
    ) -> Result<Self> {
        if table.len() != universe.size() {
            return domain(format!(
                "table of length {} does not cover a universe of size {}",
                table.len(),
                universe.size()
            ));
        }
        Ok(Self {
            universe,
            table,
            depth,
            label: label.into(),
        })
    }

    pub fn from_fn(
        universe: Universe,
        depth: u32,
        label: impl Into<String>,
        f: impl Fn(usize) -> bool,
    ) -> Self {
        let table: Table = universe.inputs().map(f).collect();
        Self {
            universe,
            table,
            depth,
            label: label.into(),
        }
    }

    pub fn constant(universe: Universe, value: bool) -> Self {
        let label = if value { "true" } else { "false" };
        Self::from_fn(universe, 0, label, |_| value)
    }

    /// Parse a `0`/`1` string written in input-index order.
    pub fn from_bit_string(
        universe: Universe,
        depth: u32,
        label: impl Into<String>,
        bits: &str,
    ) -> Result<Self> {
        let table = bits
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parse(format!(
                    "unexpected character {other:?} in bit string"
                ))),
            })
            .collect::<Result<Table>>()?;
        Self::from_table(universe, table, depth, label)
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn table(&self) -> &Table {
        &self.table
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: usize) -> bool {
        self.table[x]
    }

    pub fn count_true(&self) -> usize {
        self.table.count_ones()
    }

    pub fn is_constant(&self) -> bool {
        self.table.all() || self.table.not_any()
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.depth = depth;
        self
    }

    /// Table as `0`/`1` characters in input-index order.
    pub fn bit_string(&self) -> String {
        self.table
            .iter()
            .map(|b| if *b { '1' } else { '0' })
            .collect()
    }

    /// Same universe and truth table, ignoring depth and label.
    pub fn same_truth(&self, other: &Predicate) -> bool {
        self.universe == other.universe && self.table == other.table
    }

    pub fn to_record(&self) -> PredicateRecord {
        let nbytes = self.universe.size().div_ceil(8);
        let bytes: Vec<u8> = self
            .table
            .as_raw_slice()
            .iter()
            .flat_map(|w| w.to_le_bytes())
            .take(nbytes)
            .collect();
        PredicateRecord {
            n_atoms: self.universe.n_atoms,
            depth: self.depth,
            table: hex::encode(bytes),
            label: self.label.clone(),
        }
    }

    pub fn from_record(rec: &PredicateRecord) -> Result<Self> {
        let universe = Universe::new(rec.n_atoms)?;
        let bytes = hex::decode(&rec.table)
            .map_err(|e| Error::Parse(format!("table hex for {:?}: {e}", rec.label)))?;
        let size = universe.size();
        if bytes.len() != size.div_ceil(8) {
            return Err(Error::Parse(format!(
                "table for {:?} has {} bytes, expected {}",
                rec.label,
                bytes.len(),
                size.div_ceil(8)
            )));
        }
        let mut table: Table = BitVec::from_iter(
            bytes
                .iter()
                .flat_map(|b| (0..8).map(move |j| (b >> j) & 1 == 1)),
        );
        if table[size..].any() {
            return Err(Error::Parse(format!(
                "table for {:?} has nonzero padding bits",
                rec.label
            )));
        }
        table.truncate(size);
        Self::from_table(universe, table, rec.depth, rec.label.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_record()).expect("predicate record serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let rec: PredicateRecord = serde_json::from_str(s)?;
        Self::from_record(&rec)
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[L{}] {}", self.label, self.depth, self.bit_string())
    }
}

/// Text form of a predicate. `table` is hex over bytes in input-index order,
/// bit `j` of byte `k` holding input `8k + j`; unused high bits are zero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PredicateRecord {
    pub n_atoms: usize,
    pub depth: u32,
    pub table: String,
    pub label: String,
}

/// Ordered predicates over one universe with unique labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateFamily {
    label: String,
    universe: Universe,
    members: Vec<Predicate>,
}

impl PredicateFamily {
    pub fn new(label: impl Into<String>, members: Vec<Predicate>) -> Result<Self> {
        let Some(first) = members.first() else {
            return domain("a predicate family needs at least one member");
        };
        let universe = first.universe();
        let mut seen = std::collections::HashSet::new();
        for m in &members {
            if m.universe() != universe {
                return domain(format!(
                    "member {:?} has {} atoms, family has {}",
                    m.label(),
                    m.universe().n_atoms(),
                    universe.n_atoms()
                ));
            }
            if !seen.insert(m.label()) {
                return domain(format!("duplicate member identifier {:?}", m.label()));
            }
        }
        Ok(Self {
            label: label.into(),
            universe,
            members,
        })
    }

    /// Atoms `x1..xn` in index order.
    pub fn atoms(universe: Universe) -> Result<Self> {
        let members = (1..=universe.n_atoms())
            .map(|i| super::ops::atom(i, universe))
            .collect::<Result<Vec<_>>>()?;
        Self::new("atoms", members)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn universe(&self) -> Universe {
        self.universe
    }

    pub fn members(&self) -> &[Predicate] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn max_depth(&self) -> u32 {
        self.members.iter().map(Predicate::depth).max().unwrap_or(0)
    }

    pub fn ids(&self) -> Vec<String> {
        self.members.iter().map(|m| m.label.clone()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn universe_cap() {
        assert!(Universe::new(20).is_ok());
        assert!(Universe::new(21).is_err());
    }

    #[test]
    fn table_length_enforced() {
        let u = Universe::new(2).unwrap();
        assert!(Predicate::from_bit_string(u, 0, "p", "010").is_err());
        assert!(Predicate::from_bit_string(u, 0, "p", "0101").is_ok());
    }

    #[test]
    fn record_layout() {
        let u = Universe::new(2).unwrap();
        let p = Predicate::from_bit_string(u, 0, "and", "0001").unwrap();
        let rec = p.to_record();
        assert_eq!(rec.table, "08");
        assert_eq!(
            p.to_json(),
            r#"{"n_atoms":2,"depth":0,"table":"08","label":"and"}"#
        );
    }

    #[test]
    fn record_rejects_padding_and_length() {
        let bad = PredicateRecord {
            n_atoms: 2,
            depth: 0,
            table: "f8".into(),
            label: "p".into(),
        };
        assert!(Predicate::from_record(&bad).is_err());
        let short = PredicateRecord {
            n_atoms: 4,
            depth: 0,
            table: "ff".into(),
            label: "p".into(),
        };
        assert!(Predicate::from_record(&short).is_err());
        assert!(
            Predicate::from_json(r#"{"n_atoms":1,"depth":0,"table":"01","label":"p","x":1}"#)
                .is_err()
        );
    }

    #[test]
    fn family_rules() {
        let u2 = Universe::new(2).unwrap();
        let u3 = Universe::new(3).unwrap();
        assert!(PredicateFamily::new("e", vec![]).is_err());
        let a = Predicate::constant(u2, true);
        let b = Predicate::constant(u3, true).with_label("other");
        assert!(PredicateFamily::new("mixed", vec![a.clone(), b]).is_err());
        assert!(PredicateFamily::new("dup", vec![a.clone(), a]).is_err());
    }

    proptest! {
        #[test]
        fn record_round_trip(n in 0usize..9, seed in any::<u64>(), depth in 0u32..10) {
            let u = Universe::new(n).unwrap();
            let p = Predicate::from_fn(u, depth, format!("p{seed}"), |x| {
                (seed.rotate_left(x as u32 % 64) ^ (x as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)) & 1 == 1
            });
            let back = Predicate::from_json(&p.to_json()).unwrap();
            prop_assert_eq!(back, p);
        }
    }
}
