//! Representability of predicates by width-bounded threshold units, and
//! collision search over compiled network traces.

mod capacity;
mod pigeonhole;
mod separability;
pub mod simplex;

pub use capacity::{
    capacity_csv_fields, exhaust_capacity, exhaust_capacity_with, representable_by_single_layer,
    write_capacity_csv, CapacityRecord, CapacityReport, CapacitySearch, CAPACITY_CSV_HEADER,
    DEFAULT_SUBSET_BUDGET,
};
pub use pigeonhole::find_indistinguishable_pair;
pub use separability::{is_linearly_separable, separate, SeparabilityWitness, DEFAULT_MARGIN};
