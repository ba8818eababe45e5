mod common;

use std::collections::BTreeSet;

use dilp::error::Error;
use dilp::eval::{classical_eval, write_program, Program, ProgramClause};
use dilp::hypothesis::PruneConfig;
use dilp::logic::{Clause, Language, Literal, Var};
use dilp::oracle::{exhaustive_count, exhaustive_solve, naive_forward_chain, OracleTask, DEFAULT_CAP};
use dilp::workbench::{generate_task, oracle_task, task_spec};

fn train_task(name: &str, invented: usize) -> OracleTask {
    let task = generate_task(&task_spec(name).unwrap()).unwrap();
    oracle_task(&task.train, invented).unwrap()
}

fn as_program(clauses: &[Clause]) -> Program {
    Program {
        clauses: clauses
            .iter()
            .enumerate()
            .map(|(i, c)| ProgramClause { template: i / 2, slot: i % 2, clause: c.clone() })
            .collect(),
    }
}

/// Checks a solution with the evaluator rather than the oracle's own fixpoint.
fn entails_examples(task: &OracleTask, clauses: &[Clause]) -> bool {
    let model = classical_eval(&as_program(clauses), &task.facts, &task.language);
    task.positive.iter().all(|a| model.contains(a)) && !task.negative.iter().any(|a| model.contains(a))
}

#[test]
fn predecessor_without_invented_predicates_has_the_known_solution() {
    let task = train_task("predecessor", 0);
    let solutions = exhaustive_solve(&task, &PruneConfig::default(), DEFAULT_CAP).unwrap();
    assert!(!solutions.is_empty());
    let lang = &task.language;
    let rendered: Vec<String> = solutions.iter().map(|s| s.iter().map(|c| c.display(lang).to_string()).collect::<Vec<_>>().join(" ")).collect();
    assert!(
        rendered.iter().any(|s| s == "predecessor(A,B):-succ(B,A),succ(B,A) predecessor(A,B):-succ(B,A),succ(B,A)"),
        "{rendered:?}"
    );
    for s in &solutions {
        assert!(entails_examples(&task, s), "{}", write_program(&as_program(s), lang));
    }
}

#[test]
fn even_needs_an_invented_predicate() {
    let task = train_task("even", 0);
    assert!(exhaustive_count(&task.language, &PruneConfig::default()) <= DEFAULT_CAP);
    assert!(exhaustive_solve(&task, &PruneConfig::default(), DEFAULT_CAP).unwrap().is_empty());
}

#[test]
fn search_refuses_above_the_cap_and_reports_the_count() {
    let task = train_task("mod6", 3);
    let count = exhaustive_count(&task.language, &PruneConfig::default());
    match exhaustive_solve(&task, &PruneConfig::default(), DEFAULT_CAP) {
        Err(Error::SearchCap { count: c, cap }) => assert_eq!((c, cap), (count, DEFAULT_CAP)),
        other => panic!("expected SearchCap, got {other:?}"),
    }
}

fn clause(lang: &Language, head: (&str, &[Var]), a: (&str, &[Var]), b: (&str, &[Var])) -> Clause {
    let l = |(p, args): (&str, &[Var])| Literal::new(lang.pred_id(p).unwrap(), args);
    Clause::new(l(head), [l(a), l(b)], lang).unwrap()
}

/// Three invented predicates suffice for multiples of six: adding two, four
/// and six along the successor chain.
#[test]
fn three_invented_predicates_express_mod6() {
    use Var::*;
    let task = train_task("mod6", 3);
    let lang = &task.language;
    let twice = |c: Clause| [c.clone(), c];
    let mut clauses = Vec::new();
    clauses.push(clause(lang, ("mod6", &[X]), ("zero", &[X]), ("zero", &[X])));
    clauses.push(clause(lang, ("mod6", &[X]), ("i3", &[Y, X]), ("mod6", &[Y])));
    clauses.extend(twice(clause(lang, ("i1", &[X, Y]), ("succ", &[X, Z]), ("succ", &[Z, Y]))));
    clauses.extend(twice(clause(lang, ("i2", &[X, Y]), ("i1", &[X, Z]), ("i1", &[Z, Y]))));
    clauses.extend(twice(clause(lang, ("i3", &[X, Y]), ("i1", &[X, Z]), ("i2", &[Z, Y]))));
    assert!(entails_examples(&task, &clauses));
    // with a budget of two, i3 has no clauses and only zero is derived
    assert!(!entails_examples(&task, &clauses[..6]));
}

#[test]
fn forward_chaining_rounds_are_synchronous() {
    use Var::*;
    let task = train_task("mod6", 0);
    let lang = &task.language;
    let rule = clause(lang, ("mod6", &[X]), ("succ", &[Y, X]), ("mod6", &[Y]));
    let base = clause(lang, ("mod6", &[X]), ("zero", &[X]), ("zero", &[X]));
    let derived = |steps| {
        let m = naive_forward_chain(&[base.clone(), rule.clone()], &task.facts, lang, steps);
        m.difference(&task.facts).count()
    };
    assert_eq!(derived(0), 0);
    assert_eq!(derived(1), 1);
    assert_eq!(derived(3), 3);
    let all: BTreeSet<usize> = naive_forward_chain(&[base, rule], &task.facts, lang, usize::MAX);
    assert_eq!(all.len() - task.facts.len(), lang.num_constants());
}
