//! Slow, index-free reference implementations used to check the engine and
//! the evaluator.
//!
//! Nothing here calls into the engine, the hypothesis space or the evaluator:
//! literal and clause candidates are re-enumerated, softmax and the fuzzy
//! operators are re-implemented, and inference walks nested loops over the
//! constants. Only the `logic` types and the plain configuration enums are
//! shared.

use std::collections::BTreeSet;

use crate::engine::{TNorm, TNormConfig};
use crate::error::{Error, Result};
use crate::hypothesis::PruneConfig;
use crate::logic::{Clause, ConstId, Language, Literal, PredId, Var};

/// Default cap on valuation size times candidate work, and on program counts.
pub const DEFAULT_CAP: u128 = 1_000_000;

/// A literal candidate as the oracle sees it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NaiveLiteral {
    pub pred: PredId,
    pub args: Vec<Var>,
}

/// Literal candidates in the documented order: predicates in declaration
/// order, variable tuples lexicographic over `(x, y, z)`.
pub fn naive_literals(language: &Language, prune: &PruneConfig) -> Vec<NaiveLiteral> {
    let vars = [Var::X, Var::Y, Var::Z];
    let mut out = Vec::new();
    for (i, p) in language.predicates().iter().enumerate() {
        if p.arity == 1 {
            for &a in &vars {
                out.push(NaiveLiteral { pred: PredId(i), args: vec![a] });
            }
        } else {
            for &a in &vars {
                for &b in &vars {
                    if a == b && !prune.allow_reflexive_literals {
                        continue;
                    }
                    out.push(NaiveLiteral { pred: PredId(i), args: vec![a, b] });
                }
            }
        }
    }
    out
}

/// Clause bodies (pairs of indices into `literals`) for a head of `arity`.
pub fn naive_clause_bodies(literals: &[NaiveLiteral], arity: usize, prune: &PruneConfig) -> Vec<(usize, usize)> {
    let head: &[Var] = if arity == 1 { &[Var::X] } else { &[Var::X, Var::Y] };
    let mut out = Vec::new();
    for a in 0..literals.len() {
        for b in 0..literals.len() {
            if prune.symmetric_bodies && b < a {
                continue;
            }
            if a == b && !prune.allow_duplicate_literals {
                continue;
            }
            let covered = head.iter().all(|v| literals[a].args.contains(v) || literals[b].args.contains(v));
            if prune.head_safety && !covered {
                continue;
            }
            out.push((a, b));
        }
    }
    out
}

/// Logits for every template, indexed `[template][slot][choice]`, in the
/// granularity of one of the three weighting schemes.
#[derive(Debug, Clone)]
pub enum NaiveWeights {
    /// Four slots per template (`2 * clause + literal`) over literal candidates.
    PerLiteral(Vec<Vec<Vec<f64>>>),
    /// Two slots per template over clause bodies.
    PerClause(Vec<Vec<Vec<f64>>>),
    /// One slot per template over ordered clause-body pairs `k1 * K + k2`.
    PerTemplate(Vec<Vec<Vec<f64>>>),
}

fn naive_softmax(logits: &[f64]) -> Vec<f64> {
    let mut m = f64::NEG_INFINITY;
    for &l in logits {
        if l > m {
            m = l;
        }
    }
    let exps: Vec<f64> = logits.iter().map(|&l| (l - m).exp()).collect();
    let mut total = 0.0;
    for &e in &exps {
        total += e;
    }
    exps.iter().map(|&e| e / total).collect()
}

fn and(kind: TNorm, a: f64, b: f64) -> f64 {
    match kind {
        TNorm::Product => a * b,
        TNorm::Max => {
            if a < b {
                a
            } else {
                b
            }
        }
        TNorm::Lukasiewicz => {
            let s = a + b - 1.0;
            if s > 0.0 {
                s
            } else {
                0.0
            }
        }
    }
}

fn or(kind: TNorm, a: f64, b: f64) -> f64 {
    match kind {
        TNorm::Product => a + b - a * b,
        TNorm::Max => {
            if a > b {
                a
            } else {
                b
            }
        }
        TNorm::Lukasiewicz => {
            let s = a + b;
            if s < 1.0 {
                s
            } else {
                1.0
            }
        }
    }
}

/// Direct interpretation of differentiable forward chaining.
pub struct NaiveInterpreter<'a> {
    language: &'a Language,
    tnorms: TNormConfig,
    prune: PruneConfig,
    literals: Vec<NaiveLiteral>,
    heads: Vec<PredId>,
}

impl<'a> NaiveInterpreter<'a> {
    /// Refuses languages where one step would exceed `cap` candidate reads.
    pub fn new(language: &'a Language, tnorms: TNormConfig, prune: PruneConfig, cap: u128) -> Result<Self> {
        let literals = naive_literals(language, &prune);
        let mut heads = vec![language.target()];
        for (i, p) in language.predicates().iter().enumerate() {
            if p.kind == crate::logic::PredicateKind::Invented {
                heads.push(PredId(i));
            }
        }
        let n = language.num_constants() as u128;
        let work = heads.len() as u128 * 4 * n * n * n * literals.len() as u128;
        if work > cap {
            return Err(Error::SearchCap { count: work, cap });
        }
        Ok(NaiveInterpreter { language, tnorms, prune, literals, heads })
    }

    pub fn literals(&self) -> &[NaiveLiteral] {
        &self.literals
    }

    /// Template head predicates: the target, then invented predicates in declaration order.
    pub fn heads(&self) -> &[PredId] {
        &self.heads
    }

    fn atom(&self, pred: PredId, args: &[usize]) -> usize {
        let ids: Vec<ConstId> = args.iter().map(|&a| ConstId(a)).collect();
        self.language.atom_index(pred, &ids)
    }

    fn literal_value(&self, v: &[f64], lit: &NaiveLiteral, theta: [usize; 3]) -> f64 {
        let args: Vec<usize> = lit.args.iter().map(|var| theta[var.position()]).collect();
        v[self.atom(lit.pred, &args)]
    }

    /// Head groundings and, for each, the list of full `(x, y, z)` substitutions.
    fn groundings(&self, arity: usize) -> Vec<(Vec<usize>, Vec<[usize; 3]>)> {
        let n = self.language.num_constants();
        let mut out = Vec::new();
        if arity == 2 {
            for x in 0..n {
                for y in 0..n {
                    out.push((vec![x, y], (0..n).map(|z| [x, y, z]).collect()));
                }
            }
        } else {
            for x in 0..n {
                let mut thetas = Vec::new();
                for y in 0..n {
                    for z in 0..n {
                        thetas.push([x, y, z]);
                    }
                }
                out.push((vec![x], thetas));
            }
        }
        out
    }

    fn exists(&self, values: &[f64]) -> f64 {
        let mut acc = 0.0;
        for &x in values {
            acc = or(self.tnorms.or_exists, acc, x);
        }
        acc
    }

    fn clause_value(&self, v: &[f64], a: usize, b: usize, thetas: &[[usize; 3]]) -> f64 {
        let conj: Vec<f64> = thetas
            .iter()
            .map(|&th| {
                and(self.tnorms.and_literal, self.literal_value(v, &self.literals[a], th), self.literal_value(v, &self.literals[b], th))
            })
            .collect();
        self.exists(&conj)
    }

    /// One step.
    pub fn step(&self, v: &[f64], weights: &NaiveWeights) -> Vec<f64> {
        let mut out = v.to_vec();
        for (t, &head) in self.heads.iter().enumerate() {
            let arity = self.language.predicate(head).arity;
            let bodies = naive_clause_bodies(&self.literals, arity, &self.prune);
            for (args, thetas) in self.groundings(arity) {
                let derived = match weights {
                    NaiveWeights::PerLiteral(w) => {
                        let probs: Vec<Vec<f64>> = w[t].iter().map(|l| naive_softmax(l)).collect();
                        let mut slots = [0.0; 2];
                        for (s, slot) in slots.iter_mut().enumerate() {
                            let mut conj = Vec::new();
                            for &th in &thetas {
                                let mut mixed = [0.0; 2];
                                for (l, m) in mixed.iter_mut().enumerate() {
                                    for (c, lit) in self.literals.iter().enumerate() {
                                        *m += probs[2 * s + l][c] * self.literal_value(v, lit, th);
                                    }
                                }
                                conj.push(and(self.tnorms.and_literal, mixed[0], mixed[1]));
                            }
                            *slot = self.exists(&conj);
                        }
                        or(self.tnorms.or_clausal, slots[0], slots[1])
                    }
                    NaiveWeights::PerClause(w) => {
                        let mut slots = [0.0; 2];
                        for (s, slot) in slots.iter_mut().enumerate() {
                            let p = naive_softmax(&w[t][s]);
                            for (k, &(a, b)) in bodies.iter().enumerate() {
                                *slot += p[k] * self.clause_value(v, a, b, &thetas);
                            }
                        }
                        or(self.tnorms.or_clausal, slots[0], slots[1])
                    }
                    NaiveWeights::PerTemplate(w) => {
                        let p = naive_softmax(&w[t][0]);
                        let values: Vec<f64> = bodies.iter().map(|&(a, b)| self.clause_value(v, a, b, &thetas)).collect();
                        let mut acc = 0.0;
                        for k1 in 0..values.len() {
                            for k2 in 0..values.len() {
                                acc += p[k1 * values.len() + k2] * or(self.tnorms.or_clausal, values[k1], values[k2]);
                            }
                        }
                        acc
                    }
                };
                let a = self.atom(head, &args);
                out[a] = or(self.tnorms.or_step, v[a], derived);
            }
        }
        out
    }
}

/// `n` naive steps from `ev0`.
pub fn naive_infer(interp: &NaiveInterpreter<'_>, ev0: &[f64], weights: &NaiveWeights, n: usize) -> Vec<f64> {
    let mut v = ev0.to_vec();
    for _ in 0..n {
        v = interp.step(&v, weights);
    }
    v
}

/// Ground atoms true in the least model of `facts ∪ program`, by repeated
/// naive rounds over every substitution of `x, y, z` until nothing changes.
pub fn naive_fixpoint(program: &[Clause], facts: &BTreeSet<usize>, language: &Language) -> BTreeSet<usize> {
    naive_forward_chain(program, facts, language, usize::MAX)
}

/// At most `steps` rounds of the immediate-consequence operator, each
/// applied to the model of the previous round.
pub fn naive_forward_chain(program: &[Clause], facts: &BTreeSet<usize>, language: &Language, steps: usize) -> BTreeSet<usize> {
    let n = language.num_constants();
    let mut model = facts.clone();
    let ground = |lit: &Literal, th: [usize; 3]| {
        let ids: Vec<ConstId> = lit.args.iter().map(|v| ConstId(th[v.position()])).collect();
        language.atom_index(lit.pred, &ids)
    };
    for _ in 0..steps {
        let mut added = Vec::new();
        for clause in program {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let th = [x, y, z];
                        if clause.body.iter().all(|l| model.contains(&ground(l, th))) {
                            let h = ground(&clause.head, th);
                            if !model.contains(&h) {
                                added.push(h);
                            }
                        }
                    }
                }
            }
        }
        if added.is_empty() {
            break;
        }
        model.extend(added);
    }
    model
}

/// A learning problem in oracle terms: the language (including invented
/// predicates), background facts and labelled target atoms.
#[derive(Debug, Clone)]
pub struct OracleTask {
    pub language: Language,
    pub facts: BTreeSet<usize>,
    pub positive: Vec<usize>,
    pub negative: Vec<usize>,
}

/// Number of programs [`exhaustive_solve`] would enumerate: per template,
/// unordered pairs (with repetition) of clause bodies.
pub fn exhaustive_count(language: &Language, prune: &PruneConfig) -> u128 {
    let literals = naive_literals(language, prune);
    let mut count: u128 = 1;
    for p in language.predicates().iter().filter(|p| p.kind.is_intensional()) {
        let k = naive_clause_bodies(&literals, p.arity, prune).len() as u128;
        count = count.saturating_mul(k * (k + 1) / 2);
    }
    count
}

/// Every program (two clauses per template) that entails all positive and no
/// negative examples. Refuses when the program count exceeds `cap`.
pub fn exhaustive_solve(task: &OracleTask, prune: &PruneConfig, cap: u128) -> Result<Vec<Vec<Clause>>> {
    let count = exhaustive_count(&task.language, prune);
    if count > cap {
        return Err(Error::SearchCap { count, cap });
    }
    let lang = &task.language;
    let literals = naive_literals(lang, prune);
    let mut heads = vec![lang.target()];
    for (i, p) in lang.predicates().iter().enumerate() {
        if p.kind == crate::logic::PredicateKind::Invented {
            heads.push(PredId(i));
        }
    }
    // choices[t] = every unordered pair of clauses for template t
    let choices: Vec<Vec<[Clause; 2]>> = heads
        .iter()
        .map(|&h| {
            let arity = lang.predicate(h).arity;
            let head = Literal { pred: h, args: if arity == 1 { vec![Var::X] } else { vec![Var::X, Var::Y] } };
            let clauses: Vec<Clause> = naive_clause_bodies(&literals, arity, prune)
                .into_iter()
                .map(|(a, b)| Clause {
                    head: head.clone(),
                    body: [
                        Literal { pred: literals[a].pred, args: literals[a].args.clone() },
                        Literal { pred: literals[b].pred, args: literals[b].args.clone() },
                    ],
                })
                .collect();
            let mut pairs = Vec::new();
            for i in 0..clauses.len() {
                for j in i..clauses.len() {
                    pairs.push([clauses[i].clone(), clauses[j].clone()]);
                }
            }
            pairs
        })
        .collect();
    let mut solutions = Vec::new();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let program: Vec<Clause> = pick.iter().enumerate().flat_map(|(t, &i)| choices[t][i].iter().cloned()).collect();
        let model = naive_fixpoint(&program, &task.facts, lang);
        if task.positive.iter().all(|a| model.contains(a)) && !task.negative.iter().any(|a| model.contains(a)) {
            solutions.push(program);
        }
        // odometer increment
        let mut t = 0;
        loop {
            if t == pick.len() {
                return Ok(solutions);
            }
            pick[t] += 1;
            if pick[t] < choices[t].len() {
                break;
            }
            pick[t] = 0;
            t += 1;
        }
    }
}
