//! The hypothesis space spanned by generic `({x,y,z}, p)` templates: literal
//! candidates, clause candidates, and the compiled gather index used by
//! differentiable inference.
//!
//! Every template owns one intensional predicate (the target or an invented
//! one) and two clause slots, each with two literal slots. All literal slots
//! share one candidate list: every predicate of the language applied to every
//! tuple of variables from `{x, y, z}`.

mod candidates;
mod index;

pub use candidates::{
    enumerate_clause_candidates, enumerate_literal_candidates, ClauseCandidate, LiteralCandidate, Pattern,
    PruneConfig,
};
pub use index::{build_inference_index, estimate_index_bytes, InferenceIndex, DEFAULT_MAX_INDEX_BYTES};

use std::sync::OnceLock;

use crate::logic::{Clause, Language, Literal, PredId, head_vars};

/// A `({x,y,z}, p)` template: the head symbol it defines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Template {
    pub head: PredId,
    pub arity: usize,
}

/// Templates and candidate spaces for one language.
#[derive(Debug)]
pub struct HypothesisSpace {
    language: Language,
    templates: Vec<Template>,
    literals: Vec<LiteralCandidate>,
    prune: PruneConfig,
    clauses: [OnceLock<Vec<ClauseCandidate>>; 2],
}

impl HypothesisSpace {
    /// One template per intensional predicate of `language`, target first.
    pub fn new(language: Language, prune: PruneConfig) -> Self {
        let templates = language
            .template_heads()
            .into_iter()
            .map(|head| Template { head, arity: language.predicate(head).arity })
            .collect();
        let literals = enumerate_literal_candidates(&language, 2, &prune);
        HypothesisSpace { language, templates, literals, prune, clauses: [OnceLock::new(), OnceLock::new()] }
    }

    pub fn language(&self) -> &Language {
        &self.language
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn literals(&self) -> &[LiteralCandidate] {
        &self.literals
    }

    pub fn prune(&self) -> &PruneConfig {
        &self.prune
    }

    /// Clause candidates for heads of the given arity, enumerated on first use.
    pub fn clauses(&self, head_arity: usize) -> &[ClauseCandidate] {
        self.clauses[head_arity - 1]
            .get_or_init(|| enumerate_clause_candidates(&self.literals, head_arity, &self.prune))
    }

    /// The clause `head(template) :- lit(first), lit(second)`.
    pub fn clause_from_literals(&self, template: &Template, first: usize, second: usize) -> Clause {
        Clause {
            head: Literal::new(template.head, head_vars(template.arity)),
            body: [self.literals[first].literal(), self.literals[second].literal()],
        }
    }

    pub fn clause_from_candidate(&self, template: &Template, clause: usize) -> Clause {
        let [a, b] = self.clauses(template.arity)[clause].body;
        self.clause_from_literals(template, a, b)
    }
}
