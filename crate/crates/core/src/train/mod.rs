//! Gradient-descent training of template weights.

mod adam;

pub use adam::Adam;

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::engine::{balanced_loss, Engine, Examples, Mixer, TNormConfig, WeightMode, WeightShape, WeightStore};
use crate::error::{Error, Result};
use crate::hypothesis::{HypothesisSpace, InferenceIndex};
use crate::logic::Valuation;

/// Optimizer hyperparameters. Only Adam is provided.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OptimizerConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig { learning_rate: 0.05, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub max_steps: usize,
    pub early_stop_loss: f64,
    pub infer_steps: usize,
    pub batch_probability: f64,
    /// Full-batch loss is evaluated (and early stopping checked) every this many steps.
    pub eval_every: usize,
    pub optimizer: OptimizerConfig,
    /// Standard deviation of the normal initialization.
    pub init_std: f64,
    pub seed: u64,
    pub weight_mode: WeightMode,
    pub tnorms: TNormConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            max_steps: 2000,
            early_stop_loss: 1e-3,
            infer_steps: 25,
            batch_probability: 0.5,
            eval_every: 10,
            optimizer: OptimizerConfig::default(),
            init_std: 1.0,
            seed: 0,
            weight_mode: WeightMode::PerLiteral,
            tnorms: TNormConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.batch_probability > 0.0 && self.batch_probability <= 1.0) {
            return bad("batch_probability must lie in (0, 1]");
        }
        if self.eval_every == 0 {
            return bad("eval_every must be positive");
        }
        if self.infer_steps == 0 {
            return bad("infer_steps must be positive");
        }
        if !(self.init_std >= 0.0 && self.init_std.is_finite()) {
            return bad("init_std must be a finite non-negative number");
        }
        if self.optimizer.learning_rate.is_nan() || self.optimizer.learning_rate <= 0.0 {
            return bad("learning rate must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    EarlyStop,
    MaxSteps,
    Diverged,
}

#[derive(Debug, Clone)]
pub struct TrainResult {
    pub weights: WeightStore,
    /// Sampled-batch loss of every applied update.
    pub losses: Vec<f64>,
    /// `(step, full-batch loss)` at every evaluation.
    pub full_losses: Vec<(usize, f64)>,
    pub steps_used: usize,
    pub stop_reason: StopReason,
    /// Full-batch loss of the returned weights (NaN after divergence).
    pub final_loss: f64,
}

/// A compiled training domain.
#[derive(Clone, Copy)]
pub struct Problem<'a> {
    pub space: &'a HypothesisSpace,
    /// Needed for clause-level weight modes.
    pub index: Option<&'a InferenceIndex>,
    pub ev0: &'a Valuation,
    pub examples: &'a Examples,
}

/// Includes each of `n` examples independently with probability `p`.
pub fn sample_batch(n: usize, p: f64, rng: &mut impl Rng) -> Vec<bool> {
    (0..n).map(|_| rng.random_bool(p)).collect()
}

/// I.i.d. normal(0, std²) logits, reproducible from `seed`.
pub fn init_weights(shape: WeightShape, std: f64, seed: u64) -> Result<WeightStore> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    init_weights_with(shape, std, &mut rng)
}

fn init_weights_with(shape: WeightShape, std: f64, rng: &mut impl Rng) -> Result<WeightStore> {
    let mut w = WeightStore::zeros(shape)?;
    let normal = Normal::new(0.0, std).map_err(|e| Error::Config(e.to_string()))?;
    for p in w.params_mut() {
        *p = normal.sample(rng);
    }
    Ok(w)
}

/// Trains from a fresh initialization. Each step samples a batch, runs
/// `infer_steps` of inference, and applies one optimizer update. Every
/// `eval_every` steps the full-batch loss of the current weights is recorded
/// and training stops once it reaches `early_stop_loss`.
pub fn train(problem: Problem<'_>, config: &TrainConfig, log: Option<&mut dyn Write>) -> Result<TrainResult> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let shape = WeightShape::for_space(problem.space, config.weight_mode);
    let weights = init_weights_with(shape, config.init_std, &mut rng)?;
    train_from(problem, config, weights, &mut rng, log)
}

/// Continues training from given weights.
pub fn train_from(
    problem: Problem<'_>,
    config: &TrainConfig,
    mut weights: WeightStore,
    rng: &mut impl Rng,
    mut log: Option<&mut dyn Write>,
) -> Result<TrainResult> {
    config.validate()?;
    weights.check_compatible(problem.space)?;
    let engine = Engine::new(problem.space, problem.index, config.tnorms).with_mixer(Mixer::Factored);
    let examples = problem.examples;
    let mut adam = Adam::new(weights.params().len(), &config.optimizer);
    let mut losses = Vec::new();
    let mut full_losses = Vec::new();
    let mut stop_reason = StopReason::MaxSteps;
    let mut step = 0;
    if weights.params().iter().any(|p| !p.is_finite()) {
        stop_reason = StopReason::Diverged;
    }
    while stop_reason != StopReason::Diverged && step < config.max_steps {
        let trace = engine.infer_trace(problem.ev0, &weights, config.infer_steps);
        let last = trace.last();
        let full = if step % config.eval_every == 0 {
            let (full, _) = balanced_loss(&last.0, examples, None);
            full_losses.push((step, full));
            if !full.is_finite() {
                stop_reason = StopReason::Diverged;
                break;
            }
            if full <= config.early_stop_loss {
                stop_reason = StopReason::EarlyStop;
                break;
            }
            Some(full)
        } else {
            None
        };
        let mask = sample_batch(examples.len(), config.batch_probability, rng);
        let (loss, dvalues) = balanced_loss(&last.0, examples, Some(&mask));
        if let Some(out) = log.as_deref_mut() {
            match full {
                Some(f) => writeln!(out, "step {step} sampled {loss:.6e} full {f:.6e}")?,
                None => writeln!(out, "step {step} sampled {loss:.6e}")?,
            }
        }
        if !loss.is_finite() {
            stop_reason = StopReason::Diverged;
            break;
        }
        let mut dv = vec![0.0; last.len()];
        for (i, (atom, _)) in examples.iter().enumerate() {
            dv[atom] += dvalues[i];
        }
        let grad = engine.backward(&trace, &weights, dv);
        adam.step(weights.params_mut(), &grad);
        losses.push(loss);
        step += 1;
        if weights.params().iter().any(|p| !p.is_finite()) {
            stop_reason = StopReason::Diverged;
            break;
        }
    }
    let final_loss = match stop_reason {
        StopReason::Diverged => f64::NAN,
        StopReason::EarlyStop => full_losses.last().map(|&(_, l)| l).unwrap_or(f64::NAN),
        StopReason::MaxSteps => {
            let v = engine.infer(problem.ev0, &weights, config.infer_steps);
            balanced_loss(&v.0, examples, None).0
        }
    };
    if let Some(out) = log {
        writeln!(out, "stop {stop_reason:?} after {step} steps, final loss {final_loss:.6e}")?;
    }
    Ok(TrainResult { weights, losses, full_losses, steps_used: step, stop_reason, final_loss })
}
