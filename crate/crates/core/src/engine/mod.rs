//! Differentiable forward chaining.
//!
//! A [`Valuation`] assigns every ground atom a truth value in `[0, 1]`. One
//! inference step applies every template to the current valuation and merges
//! the derived head values into it; [`Engine::loss_and_gradient`] runs a fixed
//! number of steps and differentiates the balanced example loss with respect
//! to the raw weights of a [`WeightStore`].

mod checkpoint;
mod encode;
mod infer;
mod kernel;
mod loss;
mod tnorm;
mod weights;

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use encode::{encode_one_hot, null_clause, ONE_HOT_GAP};
pub use infer::{Engine, InferenceTrace, LossAndGradient, Mixer};
pub use kernel::{Factored, Gathered};
pub use loss::{balanced_loss, Examples, LOSS_EPS};
pub use tnorm::{tnorm_and, tnorm_or, TNorm, TNormConfig, RANGE_SLACK};
pub use weights::{softmax, softmax_into, BlockShape, WeightMode, WeightShape, WeightStore, MAX_STORE_PARAMS};

use crate::hypothesis::{HypothesisSpace, InferenceIndex};
use crate::logic::Valuation;

/// Mixes one literal slot: `out[h * Z + b] = Σ_c softmax(logits)_c · V[index[h, b, c]]`
/// for heads of the given arity.
pub fn mixed_literal_valuation(valuation: &Valuation, logits: &[f64], index: &InferenceIndex, arity: usize) -> Vec<f64> {
    assert_eq!(logits.len(), index.num_candidates(), "one logit per literal candidate");
    let (h, z, _) = index.shape(arity);
    let mut out = vec![0.0; h * z];
    Gathered { index }.mix(&valuation.0, &softmax(logits), &mut out);
    out
}

/// One forward-chaining step over every template of `space`.
pub fn forward_chain_step(
    valuation: &Valuation,
    weights: &WeightStore,
    space: &HypothesisSpace,
    index: &InferenceIndex,
    tnorms: TNormConfig,
) -> Valuation {
    Engine::new(space, Some(index), tnorms).step(valuation, weights)
}

/// `n_steps` forward-chaining steps from `ev0`.
pub fn infer(
    ev0: &Valuation,
    weights: &WeightStore,
    space: &HypothesisSpace,
    index: Option<&InferenceIndex>,
    tnorms: TNormConfig,
    n_steps: usize,
) -> Valuation {
    Engine::new(space, index, tnorms).infer(ev0, weights, n_steps)
}
