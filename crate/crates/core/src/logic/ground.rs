use super::{head_vars, Clause, ConstId, GroundAtom, Language, SymbolicAtom, Valuation, Var};
use crate::error::{Error, Result};

/// One grounding of a clause head together with every body instantiation
/// obtained by binding its existential variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundClause {
    pub head: GroundAtom,
    pub bindings: Vec<(GroundAtom, GroundAtom)>,
}

/// All ground atoms of `language` in index order.
pub fn build_atom_index(language: &Language) -> Result<Vec<GroundAtom>> {
    if language.num_constants() == 0 {
        return Err(Error::EmptyDomain);
    }
    Ok((0..language.atom_count()).map(|i| language.decode(i)).collect())
}

/// Every tuple in `0..n` of length `len`, lexicographically.
pub(crate) fn tuples(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total).map(move |mut k| {
        let mut t = vec![0; len];
        for slot in (0..len).rev() {
            t[slot] = k % n;
            k /= n;
        }
        t
    })
}

/// Grounds `clause` over `language`: head groundings in atom order, and for each
/// head one body pair per assignment of the existential variables that occur
/// in the body (exactly one pair when none occur).
pub fn ground_clause(clause: &Clause, language: &Language) -> Vec<GroundClause> {
    let n = language.num_constants();
    let head_arity = clause.head.args.len();
    let hv = head_vars(head_arity);
    let existential = clause.existential_vars();
    let mut out = Vec::with_capacity(n.pow(head_arity as u32));
    for head_tuple in tuples(n, head_arity) {
        let mut theta = [ConstId(0); 3];
        for (v, c) in hv.iter().zip(&head_tuple) {
            theta[v.position()] = ConstId(*c);
        }
        let head_args: Vec<ConstId> = hv.iter().map(|v| theta[v.position()]).collect();
        let head = language.ground(clause.head.pred, &head_args);
        let mut bindings = Vec::with_capacity(n.pow(existential.len() as u32));
        for ex_tuple in tuples(n, existential.len()) {
            for (v, c) in existential.iter().zip(&ex_tuple) {
                theta[v.position()] = ConstId(*c);
            }
            let ground_lit = |lit: &super::Literal| {
                let args: Vec<ConstId> = lit.args.iter().map(|v: &Var| theta[v.position()]).collect();
                language.ground(lit.pred, &args)
            };
            bindings.push((ground_lit(&clause.body[0]), ground_lit(&clause.body[1])));
        }
        out.push(GroundClause { head, bindings });
    }
    out
}

/// Valuation with 1.0 on every background fact and 0.0 elsewhere.
pub fn initial_valuation(bk_facts: &[SymbolicAtom], language: &Language) -> Result<Valuation> {
    let mut v = Valuation::zeros(language.atom_count());
    for fact in bk_facts {
        let atom = language.resolve(fact)?;
        if language.predicate(atom.pred).kind.is_intensional() {
            return Err(Error::FactOutsideLanguage(format!("{fact} (not an extensional predicate)")));
        }
        v.0[atom.index] = 1.0;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{Literal, PredId, PredicateSymbol};

    fn numbers(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    fn succ_lang(n: usize) -> Language {
        Language::new(
            vec![PredicateSymbol::extensional("succ", 2), PredicateSymbol::target("p", 2)],
            numbers(n),
        )
        .unwrap()
    }

    #[test]
    fn counts_atoms_per_predicate() {
        let l = Language::new(
            vec![
                PredicateSymbol::extensional("succ", 2),
                PredicateSymbol::extensional("zero", 1),
                PredicateSymbol::target("even", 1),
            ],
            numbers(2),
        )
        .unwrap();
        assert_eq!(build_atom_index(&l).unwrap().len(), 8);

        let single = Language::new(vec![PredicateSymbol::target("p", 2)], vec!["a".into()]).unwrap();
        let atoms = build_atom_index(&single).unwrap();
        assert_eq!(atoms.len(), 1);
        assert_eq!(single.atom_name(atoms[0].index), "p(a,a)");

        let empty = Language::new(vec![PredicateSymbol::target("p", 2)], vec![]).unwrap();
        assert!(matches!(build_atom_index(&empty), Err(Error::EmptyDomain)));
    }

    #[test]
    fn existential_chain_has_one_binding_per_constant() {
        let l = succ_lang(3);
        let (s, p) = (PredId(0), PredId(1));
        let clause = Clause::new(
            Literal::new(p, &[Var::X, Var::Y]),
            [Literal::new(s, &[Var::X, Var::Z]), Literal::new(s, &[Var::Z, Var::Y])],
            &l,
        )
        .unwrap();
        let grounded = ground_clause(&clause, &l);
        assert_eq!(grounded.len(), 9);
        let p02 = grounded.iter().find(|g| l.atom_name(g.head.index) == "p(0,2)").unwrap();
        let names: Vec<(String, String)> = p02
            .bindings
            .iter()
            .map(|(a, b)| (l.atom_name(a.index), l.atom_name(b.index)))
            .collect();
        let expect = [("succ(0,0)", "succ(0,2)"), ("succ(0,1)", "succ(1,2)"), ("succ(0,2)", "succ(2,2)")];
        assert_eq!(names.len(), 3);
        for ((a, b), (ea, eb)) in names.iter().zip(expect) {
            assert_eq!((a.as_str(), b.as_str()), (ea, eb));
        }
    }

    #[test]
    fn z_free_clause_has_single_binding() {
        let l = succ_lang(2);
        let (s, p) = (PredId(0), PredId(1));
        let lit = Literal::new(s, &[Var::X, Var::Y]);
        let clause = Clause::new(Literal::new(p, &[Var::X, Var::Y]), [lit.clone(), lit], &l).unwrap();
        let grounded = ground_clause(&clause, &l);
        let p01 = grounded.iter().find(|g| l.atom_name(g.head.index) == "p(0,1)").unwrap();
        assert_eq!(p01.bindings.len(), 1);
        assert_eq!(l.atom_name(p01.bindings[0].0.index), "succ(0,1)");
        assert_eq!(l.atom_name(p01.bindings[0].1.index), "succ(0,1)");
    }

    #[test]
    fn initial_valuation_marks_facts() {
        let l = succ_lang(2);
        let v = initial_valuation(&[SymbolicAtom::new("succ", &["0", "1"])], &l).unwrap();
        assert_eq!(v.len(), l.atom_count());
        assert_eq!(v.values().iter().filter(|&&x| x == 1.0).count(), 1);
        assert!(initial_valuation(&[], &l).unwrap().values().iter().all(|&x| x == 0.0));
        assert!(matches!(
            initial_valuation(&[SymbolicAtom::new("succ", &["0", "7"])], &l),
            Err(Error::FactOutsideLanguage(_))
        ));
        assert!(initial_valuation(&[SymbolicAtom::new("p", &["0", "1"])], &l).is_err());
    }
}
