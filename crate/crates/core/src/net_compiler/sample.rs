//! Seeded random networks that are guaranteed not to overflow.
//!
//! Each node's accumulator range is bounded by interval arithmetic over
//! the possible values of its inputs; weights are redrawn until the bound
//! fits the declared bit width, falling back to an all-zero node.

use rand::Rng;

use crate::net_compiler::net::{range, Activation, Layer, QuantizedNet};

const NODE_ATTEMPTS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct NetSampler {
    pub input_bits: usize,
    pub max_depth: usize,
    pub max_width: usize,
    /// Bit widths to choose from, uniformly.
    pub bit_widths: Vec<u32>,
    /// Fixed activation, or a coin flip per network when `None`.
    pub activation: Option<Activation>,
    /// Largest magnitude of a drawn weight or bias before range clamping.
    pub weight_span: i64,
    /// Upper bound on `trace_bits()`; architectures are redrawn until it holds.
    pub max_trace_bits: Option<usize>,
}

impl NetSampler {
    pub fn new(input_bits: usize, max_depth: usize, max_width: usize, bit_width: u32) -> Self {
        Self {
            input_bits,
            max_depth,
            max_width,
            bit_widths: vec![bit_width],
            activation: None,
            weight_span: 2,
            max_trace_bits: None,
        }
    }

    fn architecture<R: Rng>(&self, rng: &mut R) -> (u32, Vec<usize>) {
        loop {
            let b = self.bit_widths[rng.gen_range(0..self.bit_widths.len())];
            let depth = rng.gen_range(1..=self.max_depth);
            let widths: Vec<usize> = (0..depth)
                .map(|_| rng.gen_range(1..=self.max_width))
                .collect();
            let bits = widths.iter().sum::<usize>() * b as usize;
            if self.max_trace_bits.is_none_or(|cap| bits <= cap) {
                return (b, widths);
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> QuantizedNet {
        assert!(self.max_depth >= 1 && self.max_width >= 1 && !self.bit_widths.is_empty());
        let (b, widths) = self.architecture(rng);
        let activation = self.activation.unwrap_or_else(|| {
            if rng.gen_bool(0.5) {
                Activation::Sign
            } else {
                Activation::ClippedRelu
            }
        });
        let (lo, hi) = range(b);
        let post = |v: i64| match activation {
            Activation::Sign => i64::from(v >= 0),
            Activation::ClippedRelu => v.clamp(0, hi),
        };
        // Per-input (min, max) of the values feeding the current layer.
        let mut bounds: Vec<(i64, i64)> = vec![(0, 1); self.input_bits];
        let mut layers = Vec::with_capacity(widths.len());
        for &width in &widths {
            let mut weights = Vec::with_capacity(width);
            let mut bias = Vec::with_capacity(width);
            let mut next = Vec::with_capacity(width);
            for _ in 0..width {
                let (row, b0, acc) = (0..NODE_ATTEMPTS)
                    .find_map(|_| {
                        let row: Vec<i64> = bounds
                            .iter()
                            .map(|_| {
                                if rng.gen_bool(0.5) {
                                    0
                                } else {
                                    rng.gen_range(-self.weight_span..=self.weight_span)
                                        .clamp(lo, hi)
                                }
                            })
                            .collect();
                        let b0 = rng
                            .gen_range(-self.weight_span..=self.weight_span)
                            .clamp(lo, hi);
                        let acc = accumulator_bounds(&row, b0, &bounds);
                        (acc.0 >= lo && acc.1 <= hi).then_some((row, b0, acc))
                    })
                    .unwrap_or_else(|| (vec![0; bounds.len()], 0, (0, 0)));
                next.push((post(acc.0), post(acc.1)));
                weights.push(row);
                bias.push(b0);
            }
            layers.push(Layer { weights, bias });
            bounds = next;
        }
        QuantizedNet::new(self.input_bits, b, activation, layers)
            .expect("sampled network is well formed")
    }
}

fn accumulator_bounds(row: &[i64], bias: i64, inputs: &[(i64, i64)]) -> (i64, i64) {
    row.iter()
        .zip(inputs)
        .fold((bias, bias), |(lo, hi), (&w, &(a, b))| {
            let (x, y) = (w * a, w * b);
            (lo + x.min(y), hi + x.max(y))
        })
}
