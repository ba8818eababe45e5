use super::weights::{WeightMode, WeightShape, WeightStore};
use crate::error::{Error, Result};
use crate::hypothesis::{HypothesisSpace, Pattern, Template};
use crate::logic::Var;

/// Logit gap used by [`encode_one_hot`]; large enough that the softmax is
/// exactly one-hot in `f64`.
pub const ONE_HOT_GAP: f64 = 800.0;

/// Body of `p :- p, p` for a template's own head: derives nothing from an
/// all-false start, so it disables the template.
pub fn null_clause(space: &HypothesisSpace, template: &Template) -> [usize; 2] {
    let pattern = match template.arity {
        1 => Pattern::Unary(Var::X),
        _ => Pattern::Dyadic(Var::X, Var::Y),
    };
    let id = space
        .literals()
        .iter()
        .find(|c| c.pred == template.head && c.pattern == pattern)
        .expect("every head predicate has an identity candidate")
        .id;
    [id, id]
}

/// Weights whose softmax selects the given clauses. `program[t][s]` is the pair
/// of literal candidates forming clause slot `s` of template `t`. The logit of
/// each chosen entry is `gap`, every other logit 0.
pub fn encode_one_hot(space: &HypothesisSpace, mode: WeightMode, program: &[[[usize; 2]; 2]], gap: f64) -> Result<WeightStore> {
    let templates = space.templates();
    if program.len() != templates.len() {
        return Err(Error::ShapeMismatch(format!(
            "program covers {} templates, space has {}",
            program.len(),
            templates.len()
        )));
    }
    let mut w = WeightStore::zeros(WeightShape::for_space(space, mode))?;
    for (t, (tpl, clauses)) in templates.iter().zip(program).enumerate() {
        match mode {
            WeightMode::PerLiteral => {
                for (s, body) in clauses.iter().enumerate() {
                    for (l, &c) in body.iter().enumerate() {
                        w.slot_mut(t, 2 * s + l)[c] = gap;
                    }
                }
            }
            WeightMode::PerClause => {
                for (s, body) in clauses.iter().enumerate() {
                    let k = clause_id(space, tpl, *body)?;
                    w.slot_mut(t, s)[k] = gap;
                }
            }
            WeightMode::PerTemplate => {
                let k = space.clauses(tpl.arity).len();
                let k1 = clause_id(space, tpl, clauses[0])?;
                let k2 = clause_id(space, tpl, clauses[1])?;
                w.slot_mut(t, 0)[k1 * k + k2] = gap;
            }
        }
    }
    Ok(w)
}

/// Clause candidate with the given body, in either literal order (the body
/// conjunction is commutative).
fn clause_id(space: &HypothesisSpace, tpl: &Template, [a, b]: [usize; 2]) -> Result<usize> {
    let clauses = space.clauses(tpl.arity);
    clauses
        .iter()
        .find(|c| c.body == [a, b])
        .or_else(|| clauses.iter().find(|c| c.body == [b, a]))
        .map(|c| c.id)
        .ok_or_else(|| {
            Error::MalformedClause(format!(
                "{} is not in the pruned clause space",
                space.clause_from_literals(tpl, a, b).display(space.language())
            ))
        })
}
