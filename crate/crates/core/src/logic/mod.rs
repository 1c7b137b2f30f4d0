//! Truth-table predicates over finite universes and the constructors for
//! atoms, connectives and counting predicates.

mod ops;
mod predicate;

pub use ops::{
    and, at_least_k_of_family, at_least_k_true, atom, combine, not, or, relevant_variables, xor,
    Connective, THRESHOLD_DEPTH_STEP,
};
pub use predicate::{Predicate, PredicateFamily, PredicateRecord, Table, Universe, MAX_ATOMS};
