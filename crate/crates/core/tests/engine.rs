mod common;

use common::*;
use dilp::engine::{
    encode_one_hot, forward_chain_step, mixed_literal_valuation, null_clause, Engine, Mixer, TNorm, RANGE_SLACK,
    TNormConfig, WeightMode, ONE_HOT_GAP,
};
use dilp::hypothesis::{build_inference_index, HypothesisSpace, Pattern, DEFAULT_MAX_INDEX_BYTES};
use dilp::logic::{ConstId, Language, PredicateSymbol, Valuation, Var};
use dilp::oracle::{NaiveInterpreter, DEFAULT_CAP};
use proptest::prelude::*;

fn succ_space(n: usize) -> HypothesisSpace {
    let lang = Language::new(
        vec![PredicateSymbol::extensional("succ", 2), PredicateSymbol::target("p", 2)],
        (0..n).map(|i| i.to_string()).collect(),
    )
    .unwrap();
    space(lang)
}

fn cand(space: &HypothesisSpace, pred: &str, pattern: Pattern) -> usize {
    let p = space.language().pred_id(pred).unwrap();
    space.literals().iter().find(|c| c.pred == p && c.pattern == pattern).unwrap().id
}

fn succ_chain(space: &HypothesisSpace, upto: usize) -> Valuation {
    let lang = space.language();
    let succ = lang.pred_id("succ").unwrap();
    let mut v = Valuation::zeros(lang.atom_count());
    for i in 0..upto {
        v.0[lang.atom_index(succ, &[ConstId(i), ConstId(i + 1)])] = 1.0;
    }
    v
}

fn true_heads(space: &HypothesisSpace, v: &Valuation) -> Vec<String> {
    let lang = space.language();
    let p = lang.pred_id("p").unwrap();
    let o = lang.offset(p);
    (o..o + lang.pred_atom_count(p)).filter(|&a| v.0[a] == 1.0).map(|a| lang.atom_name(a)).collect()
}

#[test]
fn one_hot_step_applies_modus_ponens() {
    let s = succ_space(3);
    let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
    let xy = cand(&s, "succ", Pattern::Dyadic(Var::X, Var::Y));
    let tpl = s.templates()[0];
    let w = encode_one_hot(&s, WeightMode::PerLiteral, &[[[xy, xy], null_clause(&s, &tpl)]], ONE_HOT_GAP).unwrap();
    let out = forward_chain_step(&succ_chain(&s, 2), &w, &s, &idx, TNormConfig::default());
    assert_eq!(true_heads(&s, &out), ["p(0,1)", "p(1,2)"]);
    let lang = s.language();
    let p = lang.pred_id("p").unwrap();
    let o = lang.offset(p);
    assert!(out.0[o..o + 9].iter().all(|&x| x == 0.0 || x == 1.0));
}

#[test]
fn one_hot_step_chains_through_existential() {
    let s = succ_space(3);
    let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
    let xz = cand(&s, "succ", Pattern::Dyadic(Var::X, Var::Z));
    let zy = cand(&s, "succ", Pattern::Dyadic(Var::Z, Var::Y));
    let tpl = s.templates()[0];
    let w = encode_one_hot(&s, WeightMode::PerLiteral, &[[[xz, zy], null_clause(&s, &tpl)]], ONE_HOT_GAP).unwrap();
    let out = forward_chain_step(&succ_chain(&s, 2), &w, &s, &idx, TNormConfig::default());
    assert_eq!(true_heads(&s, &out), ["p(0,2)"]);
}

#[test]
fn non_recursive_program_is_a_fixpoint_after_one_step() {
    let s = succ_space(5);
    let xy = cand(&s, "succ", Pattern::Dyadic(Var::Y, Var::X));
    let tpl = s.templates()[0];
    let w = encode_one_hot(&s, WeightMode::PerLiteral, &[[[xy, xy], null_clause(&s, &tpl)]], ONE_HOT_GAP).unwrap();
    let engine = Engine::new(&s, None, TNormConfig::default());
    let ev0 = succ_chain(&s, 4);
    assert_eq!(engine.infer(&ev0, &w, 1), engine.infer(&ev0, &w, 2));
}

#[test]
fn one_hot_slot_reads_the_selected_atom() {
    let s = succ_space(3);
    let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
    let xy = cand(&s, "succ", Pattern::Dyadic(Var::X, Var::Y));
    let mut logits = vec![0.0; s.literals().len()];
    logits[xy] = 40.0;
    let mut rng = rng(3);
    let v = random_valuation(&mut rng, s.language(), true);
    let out = mixed_literal_valuation(&v, &logits, &idx, 2);
    let lang = s.language();
    let succ = lang.pred_id("succ").unwrap();
    for x in 0..3 {
        for y in 0..3 {
            let want = v.0[lang.atom_index(succ, &[ConstId(x), ConstId(y)])];
            for b in 0..3 {
                assert!((out[(x * 3 + y) * 3 + b] - want).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn uniform_pair_averages_two_candidates() {
    let s = succ_space(3);
    let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
    let a = cand(&s, "succ", Pattern::Dyadic(Var::X, Var::Y));
    let b = cand(&s, "p", Pattern::Dyadic(Var::Z, Var::X));
    let mut logits = vec![-1e3; s.literals().len()];
    logits[a] = 0.0;
    logits[b] = 0.0;
    let mut rng = rng(4);
    let v = random_valuation(&mut rng, s.language(), true);
    let out = mixed_literal_valuation(&v, &logits, &idx, 2);
    for (r, &got) in out.iter().enumerate().take(27) {
        let row = idx.row(r);
        let want = 0.5 * (v.0[row[a] as usize] + v.0[row[b] as usize]);
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn five_candidate_slot_matches_naive_sum() {
    // zero/1 and succ/2 plus a unary target: 3 + 9 + 3 = 15 candidates, keep 5
    let lang = Language::new(
        vec![PredicateSymbol::extensional("zero", 1), PredicateSymbol::extensional("succ", 2), PredicateSymbol::target("t", 1)],
        vec!["0".into(), "1".into(), "2".into()],
    )
    .unwrap();
    let s = space(lang);
    let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
    let mut rng = rng(5);
    let v = random_valuation(&mut rng, s.language(), true);
    let mut logits = vec![-1e3; s.literals().len()];
    let kept = [0, 4, 7, 11, 13];
    for &k in &kept {
        logits[k] = rand::Rng::random_range(&mut rng, -2.0..2.0);
    }
    let probs = dilp::engine::softmax(&logits);
    for arity in [1, 2] {
        let out = mixed_literal_valuation(&v, &logits, &idx, arity);
        let (h, z, _) = idx.shape(arity);
        for hi in 0..h {
            for b in 0..z {
                let want: f64 = kept.iter().map(|&c| probs[c] * v.0[idx.get(arity, hi, b, c)]).sum();
                assert!((out[hi * z + b] - want).abs() < 1e-9);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn per_literal_kernels_agree_with_oracle(seed in any::<u64>(), scale in 0.1f64..6.0) {
        prop_assert!(engine_vs_oracle(seed, WeightMode::PerLiteral, scale) < 1e-9);
    }

    #[test]
    fn per_clause_agrees_with_oracle(seed in any::<u64>(), scale in 0.1f64..6.0) {
        prop_assert!(engine_vs_oracle(seed, WeightMode::PerClause, scale) < 1e-9);
    }

    #[test]
    fn range_and_step_monotonicity(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let s = space(random_language(&mut rng, 4, 2));
        let mut tn = random_tnorms(&mut rng);
        tn.or_step = TNorm::Max;
        let w = random_weights(&mut rng, &s, WeightMode::PerLiteral, 3.0);
        let ev0 = random_valuation(&mut rng, s.language(), true);
        let trace = Engine::new(&s, None, tn).infer_trace(&ev0, &w, 6);
        for pair in trace.steps.windows(2) {
            for (a, b) in pair[0].0.iter().zip(&pair[1].0) {
                prop_assert!(a <= b);
                prop_assert!((0.0..=1.0 + RANGE_SLACK).contains(b));
            }
        }
    }

    #[test]
    fn slot_shift_leaves_mixing_unchanged(seed in any::<u64>(), shift in -50.0f64..50.0) {
        let mut rng = rng(seed);
        let s = space(random_language(&mut rng, 4, 1));
        let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
        let v = random_valuation(&mut rng, s.language(), true);
        let logits: Vec<f64> = (0..s.literals().len()).map(|_| rand::Rng::random_range(&mut rng, -4.0..4.0)).collect();
        let shifted: Vec<f64> = logits.iter().map(|l| l + shift).collect();
        for arity in [1, 2] {
            let a = mixed_literal_valuation(&v, &logits, &idx, arity);
            let b = mixed_literal_valuation(&v, &shifted, &idx, arity);
            prop_assert!(max_abs_diff(&a, &b) < 1e-9);
            prop_assert!(a.iter().all(|x| (0.0..=1.0 + RANGE_SLACK).contains(x)));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn per_template_agrees_with_oracle(seed in any::<u64>(), scale in 0.1f64..6.0) {
        prop_assert!(engine_vs_oracle(seed, WeightMode::PerTemplate, scale) < 1e-9);
    }
}

#[test]
fn factored_gradient_matches_finite_differences() {
    for seed in 0..6 {
        let e = gradient_error(seed, WeightMode::PerLiteral, Mixer::Factored, TNormConfig::default());
        assert!(e < 1e-3, "seed {seed}: relative error {e}");
    }
}

#[test]
fn gathered_gradient_matches_finite_differences_for_smooth_operators() {
    let smooth = TNormConfig { and_literal: TNorm::Product, or_exists: TNorm::Product, or_clausal: TNorm::Product, or_step: TNorm::Product };
    for seed in 0..4 {
        let e = gradient_error(seed, WeightMode::PerLiteral, Mixer::Gathered, smooth);
        assert!(e < 1e-3, "seed {seed}: relative error {e}");
    }
}

#[test]
fn clause_level_gradients_match_finite_differences() {
    for mode in [WeightMode::PerClause] {
        for seed in 0..2 {
            let e = gradient_error(seed, mode, Mixer::Gathered, TNormConfig::default());
            assert!(e < 1e-3, "{mode} seed {seed}: relative error {e}");
        }
    }
}

#[test]
fn oracle_refuses_oversized_languages() {
    let s = succ_space(40);
    assert!(NaiveInterpreter::new(s.language(), TNormConfig::default(), s.prune().clone(), DEFAULT_CAP).is_err());
}
