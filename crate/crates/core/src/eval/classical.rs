use std::collections::BTreeSet;

use super::Program;
use crate::logic::{ConstId, Language, Literal, Var};

/// Binds `lit`'s variables to `args`; `None` when a repeated variable would
/// need two different constants.
fn unify(lit: &Literal, args: &[ConstId]) -> Option<[Option<usize>; 3]> {
    let mut theta = [None; 3];
    for (v, c) in lit.args.iter().zip(args) {
        match theta[v.position()] {
            Some(b) if b != c.0 => return None,
            _ => theta[v.position()] = Some(c.0),
        }
    }
    Some(theta)
}

/// Least Herbrand model of `program` over `facts` (atom indices of
/// `language`), computed semi-naively: each round only fires clause bodies
/// in which at least one literal matches an atom derived in the last round.
pub fn classical_eval(program: &Program, facts: &BTreeSet<usize>, language: &Language) -> BTreeSet<usize> {
    let n = language.num_constants();
    let mut model = facts.clone();
    let mut delta: Vec<usize> = facts.iter().copied().collect();
    while !delta.is_empty() {
        let mut fresh = BTreeSet::new();
        for &atom in &delta {
            let g = language.decode(atom);
            for clause in program.clauses() {
                for (i, lit) in clause.body.iter().enumerate() {
                    if lit.pred != g.pred {
                        continue;
                    }
                    let Some(theta) = unify(lit, &g.args) else { continue };
                    let other = &clause.body[1 - i];
                    let free: Vec<Var> = Var::ALL
                        .into_iter()
                        .filter(|v| theta[v.position()].is_none())
                        .filter(|v| other.mentions(*v) || clause.head.mentions(*v))
                        .collect();
                    let combos = n.pow(free.len() as u32);
                    for mut k in 0..combos {
                        let mut full = [0usize; 3];
                        for v in Var::ALL {
                            full[v.position()] = theta[v.position()].unwrap_or(0);
                        }
                        for v in &free {
                            full[v.position()] = k % n;
                            k /= n;
                        }
                        let ground = |l: &Literal| {
                            let ids: Vec<ConstId> = l.args.iter().map(|v| ConstId(full[v.position()])).collect();
                            language.atom_index(l.pred, &ids)
                        };
                        if model.contains(&ground(other)) {
                            let head = ground(&clause.head);
                            if !model.contains(&head) {
                                fresh.insert(head);
                            }
                        }
                    }
                }
            }
        }
        model.extend(fresh.iter().copied());
        delta = fresh.into_iter().collect();
    }
    model
}
