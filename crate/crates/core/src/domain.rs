use std::collections::BTreeSet;

use crate::engine::Examples;
use crate::error::{Error, Result};
use crate::hypothesis::{build_inference_index, HypothesisSpace, InferenceIndex, PruneConfig};
use crate::logic::{initial_valuation, Language, PredicateSymbol, SymbolicAtom, Valuation};
use crate::train::Problem;

/// A learning domain compiled against a hypothesis space: background
/// valuation, labelled example atoms and, when requested, the gather index.
#[derive(Debug)]
pub struct Domain {
    pub space: HypothesisSpace,
    pub index: Option<InferenceIndex>,
    pub ev0: Valuation,
    pub examples: Examples,
    /// Atom indices of the background facts.
    pub facts: BTreeSet<usize>,
}

/// How to compile a domain.
#[derive(Debug, Clone)]
pub struct CompileOptions {
    /// Number of invented predicates (templates besides the target's own).
    pub invented: usize,
    pub prune: PruneConfig,
    pub build_index: bool,
    pub max_index_bytes: u64,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            invented: 0,
            prune: PruneConfig::default(),
            build_index: false,
            max_index_bytes: crate::hypothesis::DEFAULT_MAX_INDEX_BYTES,
        }
    }
}

impl Domain {
    pub fn compile(
        predicates: &[PredicateSymbol],
        constants: &[String],
        facts: &[SymbolicAtom],
        positive: &[SymbolicAtom],
        negative: &[SymbolicAtom],
        options: &CompileOptions,
    ) -> Result<Self> {
        if constants.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let language = Language::new(predicates.to_vec(), constants.to_vec())?.with_invented(options.invented)?;
        let ev0 = initial_valuation(facts, &language)?;
        let fact_set = facts.iter().map(|f| language.resolve(f).map(|a| a.index)).collect::<Result<_>>()?;
        let target = language.target();
        let resolve_examples = |atoms: &[SymbolicAtom]| -> Result<Vec<usize>> {
            atoms
                .iter()
                .map(|a| {
                    let g = language.resolve(a)?;
                    if g.pred != target {
                        return Err(Error::FactOutsideLanguage(format!("{a} (examples must use the target predicate)")));
                    }
                    Ok(g.index)
                })
                .collect()
        };
        let examples = Examples::new(&resolve_examples(positive)?, &resolve_examples(negative)?);
        let space = HypothesisSpace::new(language, options.prune.clone());
        let index = if options.build_index { Some(build_inference_index(&space, options.max_index_bytes)?) } else { None };
        Ok(Domain { space, index, ev0, examples, facts: fact_set })
    }

    pub fn language(&self) -> &Language {
        self.space.language()
    }

    pub fn problem(&self) -> Problem<'_> {
        Problem { space: &self.space, index: self.index.as_ref(), ev0: &self.ev0, examples: &self.examples }
    }
}
