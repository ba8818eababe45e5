//! Program extraction and evaluation under classical and fuzzy semantics.

mod classical;
mod render;

pub use classical::classical_eval;
pub use render::{program_dot, write_program};

use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::engine::{Engine, TNormConfig, WeightMode, WeightStore};
use crate::hypothesis::HypothesisSpace;
use crate::logic::{Clause, PredId};

/// A clause together with the template slot it was read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProgramClause {
    pub template: usize,
    pub slot: usize,
    pub clause: Clause,
}

/// Two clauses for every template kept.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Program {
    pub clauses: Vec<ProgramClause>,
}

impl Program {
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().map(|c| &c.clause)
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Templates whose heads are reachable from `target` through clause bodies.
    pub fn trimmed(&self, target: PredId) -> Program {
        let mut reachable = vec![target];
        let mut i = 0;
        while i < reachable.len() {
            let head = reachable[i];
            for c in self.clauses.iter().filter(|c| c.clause.head.pred == head) {
                for lit in &c.clause.body {
                    if !reachable.contains(&lit.pred) && self.clauses.iter().any(|d| d.clause.head.pred == lit.pred) {
                        reachable.push(lit.pred);
                    }
                }
            }
            i += 1;
        }
        Program { clauses: self.clauses.iter().filter(|c| reachable.contains(&c.clause.head.pred)).cloned().collect() }
    }
}

/// Index of the largest value, the lowest index among ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Reads the highest-weighted choice of every slot, without trimming.
pub fn extract_untrimmed(space: &HypothesisSpace, weights: &WeightStore) -> Program {
    let mut clauses = Vec::new();
    for (t, tpl) in space.templates().iter().enumerate() {
        let bodies: [[usize; 2]; 2] = match weights.mode() {
            WeightMode::PerLiteral => {
                let pick = |s| argmax(weights.slot(t, s));
                [[pick(0), pick(1)], [pick(2), pick(3)]]
            }
            WeightMode::PerClause => {
                let cands = space.clauses(tpl.arity);
                [cands[argmax(weights.slot(t, 0))].body, cands[argmax(weights.slot(t, 1))].body]
            }
            WeightMode::PerTemplate => {
                let cands = space.clauses(tpl.arity);
                let best = argmax(weights.slot(t, 0));
                [cands[best / cands.len()].body, cands[best % cands.len()].body]
            }
        };
        for (slot, [a, b]) in bodies.into_iter().enumerate() {
            clauses.push(ProgramClause { template: t, slot, clause: space.clause_from_literals(tpl, a, b) });
        }
    }
    Program { clauses }
}

/// The argmax program trimmed to templates reachable from the target.
pub fn extract_program(space: &HypothesisSpace, weights: &WeightStore) -> Program {
    extract_untrimmed(space, weights).trimmed(space.language().target())
}

/// Settings for fuzzy evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    /// Values at or above the threshold count as true.
    pub threshold: f64,
    pub infer_steps: usize,
    pub tnorms: TNormConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { threshold: 0.5, infer_steps: 25, tnorms: TNormConfig::default() }
    }
}

/// Thresholded predictions for every example of `domain`.
pub fn fuzzy_eval(weights: &WeightStore, domain: &Domain, config: &EvalConfig) -> Vec<bool> {
    let engine = Engine::new(&domain.space, domain.index.as_ref(), config.tnorms);
    let v = engine.infer(&domain.ev0, weights, config.infer_steps);
    domain.examples.atoms.iter().map(|&a| v.0[a] >= config.threshold).collect()
}

fn all_correct(predictions: impl Iterator<Item = bool>, domain: &Domain) -> bool {
    predictions.zip(&domain.examples.positive).all(|(p, &label)| p == label)
}

/// Whether the least model of `program` over `domain`'s facts labels every example correctly.
pub fn classically_correct(program: &Program, domain: &Domain) -> bool {
    let model = classical_eval(program, &domain.facts, domain.language());
    all_correct(domain.examples.atoms.iter().map(|a| model.contains(a)), domain)
}

pub fn fuzzily_correct(weights: &WeightStore, domain: &Domain, config: &EvalConfig) -> bool {
    all_correct(fuzzy_eval(weights, domain, config).into_iter(), domain)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    C,
    F,
    CT,
    FT,
    #[serde(rename = "FAIL")]
    Fail,
}

impl Category {
    pub const ALL: [Category; 5] = [Category::C, Category::F, Category::CT, Category::FT, Category::Fail];

    pub fn as_str(self) -> &'static str {
        match self {
            Category::C => "C",
            Category::F => "F",
            Category::CT => "CT",
            Category::FT => "FT",
            Category::Fail => "FAIL",
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Independent correctness flags: classical and fuzzy, on the test domain
/// and on the training domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Outcome {
    pub c: bool,
    pub f: bool,
    pub ct: bool,
    pub ft: bool,
}

impl Outcome {
    /// The first true flag in the order C, F, CT, FT.
    pub fn category(&self) -> Category {
        if self.c {
            Category::C
        } else if self.f {
            Category::F
        } else if self.ct {
            Category::CT
        } else if self.ft {
            Category::FT
        } else {
            Category::Fail
        }
    }
}

/// Computes all four flags. The fuzzy flags use the training number of
/// inference steps on both domains.
pub fn classify_outcome(weights: &WeightStore, program: &Program, train: &Domain, test: &Domain, config: &EvalConfig) -> Outcome {
    Outcome {
        c: classically_correct(program, test),
        f: fuzzily_correct(weights, test, config),
        ct: classically_correct(program, train),
        ft: fuzzily_correct(weights, train, config),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_go_to_the_lowest_index() {
        assert_eq!(argmax(&[2.0, 2.0, 1.0]), 0);
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
    }

    #[test]
    fn category_precedence() {
        let o = |c, f, ct, ft| Outcome { c, f, ct, ft }.category();
        assert_eq!(o(true, true, true, true), Category::C);
        assert_eq!(o(true, false, false, false), Category::C);
        assert_eq!(o(false, true, true, false), Category::F);
        assert_eq!(o(false, false, true, true), Category::CT);
        assert_eq!(o(false, false, false, true), Category::FT);
        assert_eq!(o(false, false, false, false), Category::Fail);
    }
}
