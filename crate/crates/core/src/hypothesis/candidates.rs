use serde::{Deserialize, Serialize};

use crate::logic::{head_vars, Language, Literal, PredId, Var};

/// Reversible restrictions on the candidate spaces.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PruneConfig {
    /// Every head variable must occur in the clause body.
    pub head_safety: bool,
    /// Treat `a, b` and `b, a` bodies as one clause.
    pub symmetric_bodies: bool,
    /// Permit bodies whose two literals are identical.
    pub allow_duplicate_literals: bool,
    /// Permit literals that repeat a variable, such as `q(x,x)`.
    pub allow_reflexive_literals: bool,
}

impl Default for PruneConfig {
    fn default() -> Self {
        PruneConfig {
            head_safety: true,
            symmetric_bodies: true,
            allow_duplicate_literals: true,
            allow_reflexive_literals: true,
        }
    }
}

impl PruneConfig {
    /// No pruning at all: ordered bodies over the full candidate cross product.
    pub fn none() -> Self {
        PruneConfig {
            head_safety: false,
            symmetric_bodies: false,
            allow_duplicate_literals: true,
            allow_reflexive_literals: true,
        }
    }
}

/// Variable pattern of a literal candidate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pattern {
    Unary(Var),
    Dyadic(Var, Var),
}

impl Pattern {
    pub fn vars(self) -> Vec<Var> {
        match self {
            Pattern::Unary(a) => vec![a],
            Pattern::Dyadic(a, b) => vec![a, b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiteralCandidate {
    pub id: usize,
    pub pred: PredId,
    pub pattern: Pattern,
}

impl LiteralCandidate {
    pub fn literal(&self) -> Literal {
        Literal { pred: self.pred, args: self.pattern.vars() }
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.pattern.vars().contains(&v)
    }
}

/// A body pair of literal candidate ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseCandidate {
    pub id: usize,
    pub body: [usize; 2],
}

/// Every predicate applied to every variable tuple from `{x,y,z}`; predicates in
/// declaration order, tuples lexicographic. Without pruning the count is
/// `9 * #dyadic + 3 * #unary`.
///
/// The candidate set does not depend on `head_arity`: unary heads bind `x` and
/// leave both `y` and `z` existential, so the same tuples are meaningful.
pub fn enumerate_literal_candidates(language: &Language, head_arity: usize, prune: &PruneConfig) -> Vec<LiteralCandidate> {
    debug_assert!(head_arity == 1 || head_arity == 2);
    let mut out = Vec::new();
    for pred in language.pred_ids() {
        let patterns: Vec<Pattern> = match language.predicate(pred).arity {
            1 => Var::ALL.into_iter().map(Pattern::Unary).collect(),
            _ => Var::ALL
                .into_iter()
                .flat_map(|a| Var::ALL.into_iter().map(move |b| Pattern::Dyadic(a, b)))
                .filter(|p| prune.allow_reflexive_literals || !matches!(p, Pattern::Dyadic(a, b) if a == b))
                .collect(),
        };
        for pattern in patterns {
            out.push(LiteralCandidate { id: out.len(), pred, pattern });
        }
    }
    out
}

/// Body pairs over `literals` for heads of `head_arity`, filtered by `prune`.
/// Ordered pairs unless `symmetric_bodies`, in which case only `a <= b` is kept.
pub fn enumerate_clause_candidates(
    literals: &[LiteralCandidate],
    head_arity: usize,
    prune: &PruneConfig,
) -> Vec<ClauseCandidate> {
    let hv = head_vars(head_arity);
    let mut out = Vec::new();
    for a in literals {
        for b in literals {
            if prune.symmetric_bodies && b.id < a.id {
                continue;
            }
            if !prune.allow_duplicate_literals && a.id == b.id {
                continue;
            }
            if prune.head_safety && !hv.iter().all(|&v| a.mentions(v) || b.mentions(v)) {
                continue;
            }
            out.push(ClauseCandidate { id: out.len(), body: [a.id, b.id] });
        }
    }
    out
}
