use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

pub const WEIGHTS_FORMAT_VERSION: u32 = 1;
pub const MAX_BIT_WIDTH: u32 = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Activation {
    /// Heaviside step: 1 when the accumulator is non-negative, else 0.
    Sign,
    /// `max(0, min(v, 2^(b-1) - 1))`.
    ClippedRelu,
}

/// One dense layer: `weights[node][input]` and `bias[node]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Layer {
    pub weights: Vec<Vec<i64>>,
    pub bias: Vec<i64>,
}

impl Layer {
    pub fn nodes(&self) -> usize {
        self.bias.len()
    }
}

/// Feed-forward network with integer weights and `bit_width`-bit
/// two's-complement node values. Inputs are single bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantizedNet {
    input_bits: usize,
    bit_width: u32,
    activation: Activation,
    layers: Vec<Layer>,
}

impl QuantizedNet {
    pub fn new(
        input_bits: usize,
        bit_width: u32,
        activation: Activation,
        layers: Vec<Layer>,
    ) -> Result<Self> {
        if !(2..=MAX_BIT_WIDTH).contains(&bit_width) {
            return domain(format!("bit width {bit_width} outside 2..={MAX_BIT_WIDTH}"));
        }
        if layers.is_empty() {
            return domain("a network needs at least one layer");
        }
        let (lo, hi) = range(bit_width);
        let mut fan_in = input_bits;
        for (l, layer) in layers.iter().enumerate() {
            if layer.nodes() == 0 {
                return domain(format!("layer {l} has no nodes"));
            }
            if layer.weights.len() != layer.nodes() {
                return domain(format!(
                    "layer {l}: {} weight rows for {} biases",
                    layer.weights.len(),
                    layer.nodes()
                ));
            }
            for (node, row) in layer.weights.iter().enumerate() {
                if row.len() != fan_in {
                    return domain(format!(
                        "layer {l}, node {node}: {} weights, expected {fan_in}",
                        row.len()
                    ));
                }
                if let Some(w) = row.iter().find(|w| !(lo..=hi).contains(*w)) {
                    return domain(format!(
                        "layer {l}, node {node}: weight {w} not representable in {bit_width} bits"
                    ));
                }
                let b = layer.bias[node];
                if !(lo..=hi).contains(&b) {
                    return domain(format!(
                        "layer {l}, node {node}: bias {b} not representable in {bit_width} bits"
                    ));
                }
            }
            fan_in = layer.nodes();
        }
        Ok(Self {
            input_bits,
            bit_width,
            activation,
            layers,
        })
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn bit_width(&self) -> u32 {
        self.bit_width
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn width(&self) -> usize {
        self.layers.iter().map(Layer::nodes).max().unwrap_or(0)
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().map_or(0, Layer::nodes)
    }

    /// Bits in the full activation trace: every node of every layer.
    pub fn trace_bits(&self) -> usize {
        self.layers.iter().map(Layer::nodes).sum::<usize>() * self.bit_width as usize
    }

    pub fn value_range(&self) -> (i64, i64) {
        range(self.bit_width)
    }

    pub fn activate(&self, v: i64) -> i64 {
        match self.activation {
            Activation::Sign => i64::from(v >= 0),
            Activation::ClippedRelu => v.clamp(0, self.value_range().1),
        }
    }

    /// Exact forward pass on input assignment `x` (bit `i` is input `i`).
    /// Returns post-activation node values per layer. Fails if any
    /// accumulator leaves the declared two's-complement range.
    pub fn forward(&self, x: usize) -> Result<Vec<Vec<i64>>> {
        let (lo, hi) = self.value_range();
        let mut input: Vec<i64> = (0..self.input_bits)
            .map(|i| ((x >> i) & 1) as i64)
            .collect();
        let mut trace = Vec::with_capacity(self.layers.len());
        for (l, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::with_capacity(layer.nodes());
            for (node, row) in layer.weights.iter().enumerate() {
                let acc: i128 = row
                    .iter()
                    .zip(&input)
                    .map(|(&w, &a)| w as i128 * a as i128)
                    .sum::<i128>()
                    + layer.bias[node] as i128;
                if acc < lo as i128 || acc > hi as i128 {
                    return Err(Error::Overflow {
                        layer: l,
                        node,
                        input: x,
                        value: acc.clamp(i64::MIN as i128, i64::MAX as i128) as i64,
                        bit_width: self.bit_width,
                    });
                }
                out.push(self.activate(acc as i64));
            }
            trace.push(out.clone());
            input = out;
        }
        Ok(trace)
    }

    pub fn to_weights_file(&self) -> WeightsFile {
        WeightsFile {
            version: WEIGHTS_FORMAT_VERSION,
            input_bits: self.input_bits,
            bit_width: self.bit_width,
            activation: self.activation,
            layers: self.layers.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_weights_file()).expect("weights serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let file: WeightsFile =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("weights file: {e}")))?;
        file.into_net()
    }
}

/// Two's-complement range of a `b`-bit value.
pub fn range(bit_width: u32) -> (i64, i64) {
    let half = 1i64 << (bit_width - 1);
    (-half, half - 1)
}

/// `b`-bit two's-complement bit `i` of `v`.
pub fn value_bit(v: i64, i: u32) -> bool {
    (v as u64 >> i) & 1 == 1
}

/// On-disk weights format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsFile {
    pub version: u32,
    pub input_bits: usize,
    pub bit_width: u32,
    pub activation: Activation,
    pub layers: Vec<Layer>,
}

impl WeightsFile {
    pub fn into_net(self) -> Result<QuantizedNet> {
        if self.version != WEIGHTS_FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported weights file version {} (expected {WEIGHTS_FORMAT_VERSION})",
                self.version
            )));
        }
        QuantizedNet::new(
            self.input_bits,
            self.bit_width,
            self.activation,
            self.layers,
        )
    }
}
