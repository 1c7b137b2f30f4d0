use std::collections::HashMap;

use crate::net_compiler::PredicateCircuit;

/// Two distinct inputs with identical full activation traces, scanning
/// inputs in ascending order and returning `(first, later)` for the first
/// repeated trace. Always `Some` when the input space outnumbers the
/// trace space.
pub fn find_indistinguishable_pair(circuit: &PredicateCircuit) -> Option<(usize, usize)> {
    let mut seen = HashMap::new();
    for x in circuit.universe().inputs() {
        if let Some(first) = seen.insert(circuit.trace(x), x) {
            return Some((first, x));
        }
    }
    None
}
