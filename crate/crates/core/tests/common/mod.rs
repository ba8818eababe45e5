#![allow(dead_code)]

use dilp::engine::{Engine, Examples, Mixer, TNorm, TNormConfig, WeightMode, WeightShape, WeightStore};
use dilp::hypothesis::{build_inference_index, HypothesisSpace, PruneConfig, DEFAULT_MAX_INDEX_BYTES};
use dilp::logic::{Language, PredicateKind, PredicateSymbol, Valuation};
use dilp::oracle::{naive_infer, NaiveInterpreter, NaiveWeights};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A language with 2..=max_consts constants, one or two extensional
/// predicates, a target and up to `max_invented` invented predicates.
pub fn random_language(rng: &mut impl Rng, max_consts: usize, max_invented: usize) -> Language {
    let n = rng.random_range(2..=max_consts);
    let mut preds = vec![PredicateSymbol::extensional("e0", rng.random_range(1..=2))];
    if rng.random_bool(0.5) {
        preds.push(PredicateSymbol::extensional("e1", 2));
    }
    preds.push(PredicateSymbol::target("t", rng.random_range(1..=2)));
    let lang = Language::new(preds, (0..n).map(|i| format!("c{i}")).collect()).unwrap();
    lang.with_invented(rng.random_range(0..=max_invented)).unwrap()
}

pub fn random_tnorms(rng: &mut impl Rng) -> TNormConfig {
    let mut pick = || [TNorm::Product, TNorm::Max, TNorm::Lukasiewicz][rng.random_range(0..3)];
    TNormConfig { and_literal: pick(), or_exists: pick(), or_clausal: pick(), or_step: pick() }
}

/// Uniform values on extensional atoms; intensional atoms start at zero
/// unless `fuzzy_heads`.
pub fn random_valuation(rng: &mut impl Rng, lang: &Language, fuzzy_heads: bool) -> Valuation {
    let mut v = Valuation::zeros(lang.atom_count());
    for p in lang.pred_ids() {
        if lang.predicate(p).kind == PredicateKind::Extensional || fuzzy_heads {
            let o = lang.offset(p);
            for i in 0..lang.pred_atom_count(p) {
                v.0[o + i] = rng.random();
            }
        }
    }
    v
}

pub fn boolean_valuation(rng: &mut impl Rng, lang: &Language) -> Valuation {
    let mut v = Valuation::zeros(lang.atom_count());
    for p in lang.pred_ids().filter(|&p| lang.predicate(p).kind == PredicateKind::Extensional) {
        let o = lang.offset(p);
        for i in 0..lang.pred_atom_count(p) {
            v.0[o + i] = if rng.random_bool(0.4) { 1.0 } else { 0.0 };
        }
    }
    v
}

pub fn random_weights(rng: &mut impl Rng, space: &HypothesisSpace, mode: WeightMode, scale: f64) -> WeightStore {
    let mut w = WeightStore::zeros(WeightShape::for_space(space, mode)).unwrap();
    for p in w.params_mut() {
        *p = scale * (rng.random::<f64>() * 2.0 - 1.0);
    }
    w
}

pub fn space(lang: Language) -> HypothesisSpace {
    HypothesisSpace::new(lang, PruneConfig::default())
}

/// The same logits in the oracle's nested layout.
pub fn to_naive(w: &WeightStore) -> NaiveWeights {
    let nested: Vec<Vec<Vec<f64>>> = (0..w.num_templates())
        .map(|t| (0..w.shape().blocks[t].slots).map(|s| w.slot(t, s).to_vec()).collect())
        .collect();
    match w.mode() {
        WeightMode::PerLiteral => NaiveWeights::PerLiteral(nested),
        WeightMode::PerClause => NaiveWeights::PerClause(nested),
        WeightMode::PerTemplate => NaiveWeights::PerTemplate(nested),
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Two random clause candidates per template, as literal-id pairs and as a program.
pub fn random_program(rng: &mut impl Rng, space: &HypothesisSpace) -> (Vec<[[usize; 2]; 2]>, dilp::eval::Program) {
    let mut bodies = Vec::new();
    let mut clauses = Vec::new();
    for (t, tpl) in space.templates().iter().enumerate() {
        let cands = space.clauses(tpl.arity);
        let mut pair = [[0; 2]; 2];
        for (slot, body) in pair.iter_mut().enumerate() {
            *body = cands[rng.random_range(0..cands.len())].body;
            clauses.push(dilp::eval::ProgramClause { template: t, slot, clause: space.clause_from_literals(tpl, body[0], body[1]) });
        }
        bodies.push(pair);
    }
    (bodies, dilp::eval::Program { clauses })
}

/// Atoms with value 1 in a boolean valuation.
pub fn true_atoms(v: &Valuation) -> std::collections::BTreeSet<usize> {
    v.0.iter().enumerate().filter(|(_, &x)| x == 1.0).map(|(i, _)| i).collect()
}

/// Largest difference between the engine kernels and the naive interpreter
/// on one random draw.
pub fn engine_vs_oracle(seed: u64, mode: WeightMode, scale: f64) -> f64 {
    let mut rng = rng(seed);
    let max_consts = if mode == WeightMode::PerTemplate { 3 } else { 4 };
    let lang = random_language(&mut rng, max_consts, if mode == WeightMode::PerTemplate { 1 } else { 2 });
    let s = space(lang);
    let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
    let tn = random_tnorms(&mut rng);
    let w = random_weights(&mut rng, &s, mode, scale);
    let ev0 = random_valuation(&mut rng, s.language(), true);
    let steps = 3;
    let interp = NaiveInterpreter::new(s.language(), tn, s.prune().clone(), u128::MAX).unwrap();
    let naive = naive_infer(&interp, &ev0.0, &to_naive(&w), steps);
    let mut worst = 0.0f64;
    let gathered = Engine::new(&s, Some(&idx), tn).with_mixer(Mixer::Gathered).infer(&ev0, &w, steps);
    worst = worst.max(max_abs_diff(&gathered.0, &naive));
    if mode == WeightMode::PerLiteral {
        let factored = Engine::new(&s, None, tn).infer(&ev0, &w, steps);
        worst = worst.max(max_abs_diff(&factored.0, &naive));
    }
    worst
}

/// Largest relative error between analytic and central-difference gradients
/// over components with `|grad| > 1e-6`.
pub fn gradient_error(seed: u64, mode: WeightMode, mixer: Mixer, tn: TNormConfig) -> f64 {
    let mut rng = rng(seed);
    let lang = Language::new(
        vec![PredicateSymbol::extensional("zero", 1), PredicateSymbol::extensional("succ", 2), PredicateSymbol::target("t", 2)],
        vec!["0".into(), "1".into(), "2".into()],
    )
    .unwrap()
    .with_invented(1)
    .unwrap();
    let s = space(lang);
    let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
    let engine = Engine::new(&s, Some(&idx), tn).with_mixer(mixer);
    let ev0 = random_valuation(&mut rng, s.language(), false);
    let target = s.language().target();
    let o = s.language().offset(target);
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    for a in o..o + 9 {
        if rng.random_bool(0.4) {
            pos.push(a);
        } else {
            neg.push(a);
        }
    }
    let examples = Examples::new(&pos, &neg);
    let mut w = random_weights(&mut rng, &s, mode, 2.0);
    let steps = 3;
    let analytic = engine.loss_and_gradient(&ev0, &w, steps, &examples, None).gradient;
    let h = 1e-4;
    let mut worst = 0.0f64;
    for (i, &g) in analytic.iter().enumerate() {
        let orig = w.params()[i];
        w.params_mut()[i] = orig + h;
        let up = engine.loss_and_gradient(&ev0, &w, steps, &examples, None).loss;
        w.params_mut()[i] = orig - h;
        let down = engine.loss_and_gradient(&ev0, &w, steps, &examples, None).loss;
        w.params_mut()[i] = orig;
        let fd = (up - down) / (2.0 * h);
        if g.abs() > 1e-6 {
            worst = worst.max((g - fd).abs() / g.abs().max(fd.abs()));
        }
    }
    worst
}
