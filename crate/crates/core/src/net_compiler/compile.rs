//! Compilation of a quantized network into per-bit truth tables over its
//! input space, plus one table per achievable output vector.

use std::collections::BTreeMap;

use bitvec::prelude::*;

use crate::error::{domain, Result};
use crate::logic::{Predicate, Table, Universe, THRESHOLD_DEPTH_STEP};
use crate::net_compiler::net::{value_bit, QuantizedNet};

/// Largest input width accepted by [`compile_net`].
pub const MAX_COMPILE_INPUT_BITS: usize = 16;

/// Depth class assigned to predicates read at layer `layer` (0-based).
pub fn layer_depth(layer: usize) -> u32 {
    THRESHOLD_DEPTH_STEP * (layer as u32 + 1)
}

/// Per-bit predicates indexed `[layer][node][bit]`.
pub type BitTables = Vec<Vec<Vec<Predicate>>>;

/// One predicate per reachable output vector.
pub type OutputTables = Vec<(Vec<i64>, Predicate)>;

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateCircuit {
    net: QuantizedNet,
    bit_tables: BitTables,
    /// Sorted by output vector.
    outputs: OutputTables,
}

impl PredicateCircuit {
    /// Assembles a circuit without checking it against the network.
    pub fn from_parts(net: QuantizedNet, bit_tables: BitTables, outputs: OutputTables) -> Self {
        Self {
            net,
            bit_tables,
            outputs,
        }
    }

    pub fn into_parts(self) -> (QuantizedNet, BitTables, OutputTables) {
        (self.net, self.bit_tables, self.outputs)
    }

    pub fn net(&self) -> &QuantizedNet {
        &self.net
    }

    pub fn universe(&self) -> Universe {
        Universe::new(self.net.input_bits())
            .expect("compiled input width is within the universe cap")
    }

    pub fn bit_tables(&self) -> &[Vec<Vec<Predicate>>] {
        &self.bit_tables
    }

    pub fn outputs(&self) -> &[(Vec<i64>, Predicate)] {
        &self.outputs
    }

    /// Every stored predicate: bit tables in (layer, node, bit) order, then
    /// output tables.
    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.bit_tables
            .iter()
            .flatten()
            .flatten()
            .chain(self.outputs.iter().map(|(_, p)| p))
    }

    /// Concatenated node-value bits for input `x`, read from the tables.
    pub fn trace(&self, x: usize) -> BitVec<u64, Lsb0> {
        self.bit_tables
            .iter()
            .flatten()
            .flatten()
            .map(|p| p.eval(x))
            .collect()
    }

    /// Predicate records, one JSON object per line.
    pub fn export_jsonl(&self) -> String {
        self.predicates().map(|p| p.to_json() + "\n").collect()
    }
}

fn bit_label(layer: usize, node: usize, bit: usize) -> String {
    format!("L{layer}N{node}b{bit}")
}

fn output_label(y: &[i64]) -> String {
    format!("net={y:?}")
}

/// Evaluates the network on every input and records each node-value bit.
pub fn compile_net(net: &QuantizedNet) -> Result<PredicateCircuit> {
    if net.input_bits() > MAX_COMPILE_INPUT_BITS {
        return domain(format!(
            "{} input bits exceeds the compile limit of {MAX_COMPILE_INPUT_BITS}",
            net.input_bits()
        ));
    }
    let u = Universe::new(net.input_bits())?;
    let b = net.bit_width() as usize;
    let mut tables: Vec<Vec<Vec<Table>>> = net
        .layers()
        .iter()
        .map(|layer| vec![vec![bitvec![u64, Lsb0; 0; u.size()]; b]; layer.nodes()])
        .collect();
    let mut outputs: BTreeMap<Vec<i64>, Table> = BTreeMap::new();
    for x in u.inputs() {
        let values = net.forward(x)?;
        for (l, layer_vals) in values.iter().enumerate() {
            for (node, &v) in layer_vals.iter().enumerate() {
                for (bit, table) in tables[l][node].iter_mut().enumerate() {
                    if value_bit(v, bit as u32) {
                        table.set(x, true);
                    }
                }
            }
        }
        let y = values.last().cloned().unwrap_or_default();
        outputs
            .entry(y)
            .or_insert_with(|| bitvec![u64, Lsb0; 0; u.size()])
            .set(x, true);
    }
    let bit_tables = tables
        .into_iter()
        .enumerate()
        .map(|(l, nodes)| {
            nodes
                .into_iter()
                .enumerate()
                .map(|(node, bits)| {
                    bits.into_iter()
                        .enumerate()
                        .map(|(bit, t)| {
                            Predicate::from_table(u, t, layer_depth(l), bit_label(l, node, bit))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let out_depth = layer_depth(net.depth() - 1);
    let outputs = outputs
        .into_iter()
        .map(|(y, t)| {
            let label = output_label(&y);
            Predicate::from_table(u, t, out_depth, label).map(|p| (y, p))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PredicateCircuit {
        net: net.clone(),
        bit_tables,
        outputs,
    })
}

/// "Bit `bit` of node `node` in layer `layer` is 1."
pub fn bit_predicate(
    circuit: &PredicateCircuit,
    layer: usize,
    node: usize,
    bit: usize,
) -> Result<&Predicate> {
    circuit
        .bit_tables
        .get(layer)
        .and_then(|l| l.get(node))
        .and_then(|n| n.get(bit))
        .ok_or_else(|| {
            crate::Error::Domain(format!(
                "no bit {bit} of node {node} in layer {layer} (net is {} layers, {} bits per node)",
                circuit.net.depth(),
                circuit.net.bit_width()
            ))
        })
}

/// "The network outputs `y` on this input." Unreachable outputs give the
/// constant-false predicate.
pub fn net_predicate(circuit: &PredicateCircuit, y: &[i64]) -> Result<Predicate> {
    if y.len() != circuit.net.output_width() {
        return domain(format!(
            "output vector has {} entries, network has {} outputs",
            y.len(),
            circuit.net.output_width()
        ));
    }
    if let Some((_, p)) = circuit.outputs.iter().find(|(v, _)| v == y) {
        return Ok(p.clone());
    }
    let u = circuit.universe();
    Ok(Predicate::from_fn(
        u,
        layer_depth(circuit.net.depth() - 1),
        output_label(y),
        |_| false,
    ))
}

/// Where a stored table first disagrees with direct evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub input: usize,
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verification {
    pub verified: bool,
    pub first_mismatch: Option<Mismatch>,
}

/// Re-runs the network on every input and compares against every stored
/// bit table and the output partition.
pub fn verify_compilation(circuit: &PredicateCircuit) -> Verification {
    let net = &circuit.net;
    let fail = |input: usize, location: String| Verification {
        verified: false,
        first_mismatch: Some(Mismatch { input, location }),
    };
    let shape_ok = circuit.bit_tables.len() == net.depth()
        && circuit
            .bit_tables
            .iter()
            .zip(net.layers())
            .all(|(t, layer)| {
                t.len() == layer.nodes()
                    && t.iter().all(|bits| bits.len() == net.bit_width() as usize)
            });
    if !shape_ok {
        return fail(0, "table shape".into());
    }
    let size = 1usize << net.input_bits();
    if circuit.predicates().any(|p| p.table().len() != size) {
        return fail(0, "table length".into());
    }
    for x in 0..size {
        let values = match net.forward(x) {
            Ok(v) => v,
            Err(e) => return fail(x, e.to_string()),
        };
        for (l, layer_vals) in values.iter().enumerate() {
            for (node, &v) in layer_vals.iter().enumerate() {
                for (bit, p) in circuit.bit_tables[l][node].iter().enumerate() {
                    if p.eval(x) != value_bit(v, bit as u32) {
                        return fail(x, bit_label(l, node, bit));
                    }
                }
            }
        }
        let y = values.last().expect("at least one layer");
        let mut hits = 0;
        for (out, p) in &circuit.outputs {
            if p.eval(x) {
                hits += 1;
                if out != y {
                    return fail(x, output_label(out));
                }
            }
        }
        if hits != 1 {
            return fail(x, format!("{hits} output tables hold"));
        }
    }
    Verification {
        verified: true,
        first_mismatch: None,
    }
}
