use super::{HypothesisSpace, LiteralCandidate, Pattern};
use crate::error::{Error, Result};
use crate::logic::Var;

/// Default cap on the gather index allocation (2 GiB).
pub const DEFAULT_MAX_INDEX_BYTES: u64 = 2 << 30;

/// Precompiled gather table: for every grounding `(x, y, z)` of the template
/// variables and every literal candidate, the index of the ground atom the
/// candidate denotes under that grounding.
///
/// Rows are ordered `x * n² + y * n + z`. A dyadic head grounding `h = x*n + y`
/// with existential binding `b = z` and a unary head grounding `h = x` with
/// binding `b = y*n + z` both land on row `h * Z + b`, so one table serves
/// every template: `H × Z` is `n² × n` for dyadic heads and `n × n²` for unary
/// ones. z-free candidates repeat the same atom along the binding axis.
#[derive(Debug, Clone)]
pub struct InferenceIndex {
    n: usize,
    candidates: usize,
    entries: Vec<u32>,
}

/// Bytes the index for `space` would occupy.
pub fn estimate_index_bytes(space: &HypothesisSpace) -> u64 {
    let n = space.language().num_constants() as u64;
    n.pow(3) * space.literals().len() as u64 * std::mem::size_of::<u32>() as u64
}

/// Materializes the gather table, refusing when the estimate exceeds `max_bytes`.
pub fn build_inference_index(space: &HypothesisSpace, max_bytes: u64) -> Result<InferenceIndex> {
    let needed = estimate_index_bytes(space);
    if needed > max_bytes {
        return Err(Error::MemoryBudget { needed, cap: max_bytes });
    }
    let language = space.language();
    if language.num_constants() == 0 {
        return Err(Error::EmptyDomain);
    }
    if language.atom_count() > u32::MAX as usize {
        return Err(Error::MemoryBudget { needed: language.atom_count() as u64, cap: u32::MAX as u64 });
    }
    let n = language.num_constants();
    let cands = space.literals();
    let offsets: Vec<usize> = cands.iter().map(|c| language.offset(c.pred)).collect();
    let mut entries = Vec::with_capacity(n * n * n * cands.len());
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let theta = [x, y, z];
                for (cand, &off) in cands.iter().zip(&offsets) {
                    entries.push(ground_candidate(cand, off, n, &theta) as u32);
                }
            }
        }
    }
    Ok(InferenceIndex { n, candidates: cands.len(), entries })
}

fn ground_candidate(cand: &LiteralCandidate, offset: usize, n: usize, theta: &[usize; 3]) -> usize {
    let val = |v: Var| theta[v.position()];
    match cand.pattern {
        Pattern::Unary(a) => offset + val(a),
        Pattern::Dyadic(a, b) => offset + val(a) * n + val(b),
    }
}

impl InferenceIndex {
    pub fn num_constants(&self) -> usize {
        self.n
    }

    pub fn num_candidates(&self) -> usize {
        self.candidates
    }

    /// Number of `(x, y, z)` rows, `H × Z` for either head arity.
    pub fn rows(&self) -> usize {
        self.n * self.n * self.n
    }

    /// `(H, Z, C)` for templates whose head has `arity`.
    pub fn shape(&self, arity: usize) -> (usize, usize, usize) {
        let h = self.n.pow(arity as u32);
        (h, self.rows() / h, self.candidates)
    }

    pub fn get(&self, arity: usize, head: usize, binding: usize, candidate: usize) -> usize {
        let (_, z, _) = self.shape(arity);
        self.entries[(head * z + binding) * self.candidates + candidate] as usize
    }

    /// Atom indices for one `(x, y, z)` row, one per candidate.
    pub fn row(&self, row: usize) -> &[u32] {
        &self.entries[row * self.candidates..(row + 1) * self.candidates]
    }

    pub fn bytes(&self) -> u64 {
        (self.entries.len() * std::mem::size_of::<u32>()) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::PruneConfig;
    use crate::logic::{Language, PredicateSymbol};

    fn space(n: usize) -> HypothesisSpace {
        let lang = Language::new(
            vec![
                PredicateSymbol::extensional("succ", 2),
                PredicateSymbol::extensional("zero", 1),
                PredicateSymbol::target("p", 2),
            ],
            (0..n).map(|i| i.to_string()).collect(),
        )
        .unwrap();
        HypothesisSpace::new(lang, PruneConfig::default())
    }

    fn cand_id(space: &HypothesisSpace, name: &str, pattern: Pattern) -> usize {
        let pred = space.language().pred_id(name).unwrap();
        space.literals().iter().find(|c| c.pred == pred && c.pattern == pattern).unwrap().id
    }

    #[test]
    fn existential_candidate_walks_bindings() {
        let s = space(3);
        let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
        let lang = s.language();
        let c = cand_id(&s, "succ", Pattern::Dyadic(Var::X, Var::Z));
        // head p(0,1) is h = 0*3 + 1
        let names: Vec<String> = (0..3).map(|b| lang.atom_name(idx.get(2, 1, b, c))).collect();
        assert_eq!(names, ["succ(0,0)", "succ(0,1)", "succ(0,2)"]);
    }

    #[test]
    fn z_free_candidate_broadcasts() {
        let s = space(3);
        let idx = build_inference_index(&s, DEFAULT_MAX_INDEX_BYTES).unwrap();
        let c = cand_id(&s, "zero", Pattern::Unary(Var::Y));
        for h in 0..9 {
            let first = idx.get(2, h, 0, c);
            assert!((0..3).all(|b| idx.get(2, h, b, c) == first));
        }
        assert_eq!(idx.shape(2), (9, 3, 9 + 3 + 9));
        assert_eq!(idx.shape(1), (3, 9, 21));
    }

    #[test]
    fn budget_is_enforced_before_allocation() {
        let s = space(4);
        let needed = estimate_index_bytes(&s);
        assert_eq!(needed, 64 * 21 * 4);
        assert!(matches!(build_inference_index(&s, needed - 1), Err(Error::MemoryBudget { .. })));
        assert_eq!(build_inference_index(&s, needed).unwrap().bytes(), needed);
    }
}
