//! Quantized feed-forward networks and their compilation into exact
//! per-bit predicates.

mod compile;
mod net;
pub mod sample;

pub use compile::{
    bit_predicate, compile_net, layer_depth, net_predicate, verify_compilation, BitTables,
    Mismatch, OutputTables, PredicateCircuit, Verification, MAX_COMPILE_INPUT_BITS,
};
pub use net::{
    range, value_bit, Activation, Layer, QuantizedNet, WeightsFile, MAX_BIT_WIDTH,
    WEIGHTS_FORMAT_VERSION,
};
pub use sample::NetSampler;
