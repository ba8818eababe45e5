use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypothesis::HypothesisSpace;

/// Granularity at which learnable weights attach to the hypothesis space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightMode {
    /// One distribution over literal candidates per literal slot (4 per template).
    PerLiteral,
    /// One distribution over clause candidates per clause slot (2 per template).
    PerClause,
    /// One distribution over clause pairs per template.
    PerTemplate,
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::PerLiteral => "per_literal",
            WeightMode::PerClause => "per_clause",
            WeightMode::PerTemplate => "per_template",
        })
    }
}

impl FromStr for WeightMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "per_literal" => Ok(WeightMode::PerLiteral),
            "per_clause" => Ok(WeightMode::PerClause),
            "per_template" => Ok(WeightMode::PerTemplate),
            other => Err(format!("unknown weight mode `{other}`")),
        }
    }
}

/// Parameter layout of one template: `slots` softmax groups of `width` logits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockShape {
    pub arity: usize,
    pub slots: usize,
    pub width: usize,
}

impl BlockShape {
    pub fn len(&self) -> u128 {
        self.slots as u128 * self.width as u128
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Shape of a [`WeightStore`], computable without allocating it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightShape {
    pub mode: WeightMode,
    pub blocks: Vec<BlockShape>,
}

impl WeightShape {
    pub fn for_space(space: &HypothesisSpace, mode: WeightMode) -> Self {
        let c = space.literals().len();
        let blocks = space
            .templates()
            .iter()
            .map(|t| match mode {
                WeightMode::PerLiteral => BlockShape { arity: t.arity, slots: 4, width: c },
                WeightMode::PerClause => BlockShape { arity: t.arity, slots: 2, width: space.clauses(t.arity).len() },
                WeightMode::PerTemplate => {
                    let k = space.clauses(t.arity).len();
                    BlockShape { arity: t.arity, slots: 1, width: k * k }
                }
            })
            .collect();
        WeightShape { mode, blocks }
    }

    /// Total number of learnable parameters.
    pub fn param_count(&self) -> u128 {
        self.blocks.iter().map(BlockShape::len).sum()
    }
}

/// Learnable logits laid out template by template, slot by slot. For
/// per-literal weights slot `2 * clause + literal` holds one literal slot.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightStore {
    shape: WeightShape,
    offsets: Vec<usize>,
    params: Vec<f64>,
}

/// Parameter stores above this many entries are refused (1 GiB of `f64`).
pub const MAX_STORE_PARAMS: u128 = 1 << 27;

impl WeightStore {
    pub fn zeros(shape: WeightShape) -> Result<Self> {
        let count = shape.param_count();
        if count > MAX_STORE_PARAMS {
            return Err(Error::MemoryBudget { needed: (count * 8) as u64, cap: (MAX_STORE_PARAMS * 8) as u64 });
        }
        Self::from_params(shape, vec![0.0; count as usize])
    }

    pub fn from_params(shape: WeightShape, params: Vec<f64>) -> Result<Self> {
        if shape.param_count() != params.len() as u128 {
            return Err(Error::ShapeMismatch(format!(
                "shape holds {} parameters, got {}",
                shape.param_count(),
                params.len()
            )));
        }
        let mut offsets = Vec::with_capacity(shape.blocks.len());
        let mut at = 0;
        for b in &shape.blocks {
            offsets.push(at);
            at += b.len() as usize;
        }
        Ok(WeightStore { shape, offsets, params })
    }

    pub fn shape(&self) -> &WeightShape {
        &self.shape
    }

    pub fn mode(&self) -> WeightMode {
        self.shape.mode
    }

    pub fn num_templates(&self) -> usize {
        self.shape.blocks.len()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn block_offset(&self, template: usize) -> usize {
        self.offsets[template]
    }

    /// Range of `params` holding slot `slot` of `template`.
    pub fn slot_range(&self, template: usize, slot: usize) -> std::ops::Range<usize> {
        let b = &self.shape.blocks[template];
        debug_assert!(slot < b.slots);
        let start = self.offsets[template] + slot * b.width;
        start..start + b.width
    }

    pub fn slot(&self, template: usize, slot: usize) -> &[f64] {
        &self.params[self.slot_range(template, slot)]
    }

    pub fn slot_mut(&mut self, template: usize, slot: usize) -> &mut [f64] {
        let r = self.slot_range(template, slot);
        &mut self.params[r]
    }

    /// Checks the store was built for `space`.
    pub fn check_compatible(&self, space: &HypothesisSpace) -> Result<()> {
        let expect = WeightShape::for_space(space, self.mode());
        if expect != self.shape {
            return Err(Error::ShapeMismatch(format!(
                "store has {} templates / {} parameters, space expects {} / {}",
                self.num_templates(),
                self.shape.param_count(),
                expect.blocks.len(),
                expect.param_count()
            )));
        }
        Ok(())
    }

    /// Softmax of every slot, in the same layout as the logits.
    pub fn probabilities(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.params.len()];
        for t in 0..self.num_templates() {
            for s in 0..self.shape.blocks[t].slots {
                let r = self.slot_range(t, s);
                softmax_into(&self.params[r.clone()], &mut out[r]);
            }
        }
        out
    }
}

/// Numerically stable softmax.
pub fn softmax_into(logits: &[f64], out: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &l) in out.iter_mut().zip(logits) {
        *o = (l - max).exp();
        sum += *o;
    }
    for o in out.iter_mut() {
        *o /= sum;
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; logits.len()];
    softmax_into(logits, &mut out);
    out
}

/// Chain rule through a softmax: `dlogit_i = p_i (dp_i - Σ_j p_j dp_j)`.
pub(crate) fn softmax_backward(probs: &[f64], dprobs: &[f64], dlogits: &mut [f64]) {
    let inner: f64 = probs.iter().zip(dprobs).map(|(p, d)| p * d).sum();
    for ((g, &p), &d) in dlogits.iter_mut().zip(probs).zip(dprobs) {
        *g = p * (d - inner);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softmax_is_shift_invariant_and_normalized() {
        let a = softmax(&[1.0, 2.0, 3.0]);
        let b = softmax(&[101.0, 102.0, 103.0]);
        assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-15));
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let huge = softmax(&[0.0, 1000.0]);
        assert_eq!(huge, vec![0.0, 1.0]);
    }

    #[test]
    fn mode_names_round_trip() {
        for m in [WeightMode::PerLiteral, WeightMode::PerClause, WeightMode::PerTemplate] {
            assert_eq!(m.to_string().parse::<WeightMode>().unwrap(), m);
        }
        assert_eq!("per-literal".parse::<WeightMode>().unwrap(), WeightMode::PerLiteral);
    }

    #[test]
    fn slots_are_contiguous() {
        let shape = WeightShape {
            mode: WeightMode::PerLiteral,
            blocks: vec![BlockShape { arity: 2, slots: 4, width: 3 }, BlockShape { arity: 1, slots: 4, width: 3 }],
        };
        let store = WeightStore::from_params(shape, (0..24).map(f64::from).collect()).unwrap();
        assert_eq!(store.slot(1, 2), &[18.0, 19.0, 20.0]);
        assert!(WeightStore::from_params(store.shape().clone(), vec![0.0; 3]).is_err());
    }
}
