use std::fmt::Write;

use super::Program;
use crate::logic::Language;

/// One clause per line in `h(A,B):-q(B,C),r(C,A)` syntax.
pub fn write_program(program: &Program, language: &Language) -> String {
    let mut out = String::new();
    for c in program.clauses() {
        let _ = writeln!(out, "{}", c.display(language));
    }
    out
}

/// Predicate dependency graph in Graphviz DOT: an edge `head -> body` for
/// every body literal, labelled with the clause slot. Extensional predicates
/// are drawn as boxes.
pub fn program_dot(program: &Program, language: &Language) -> String {
    let mut out = String::from("digraph program {\n    rankdir=LR;\n");
    let mut nodes: Vec<usize> = Vec::new();
    for c in program.clauses() {
        for p in std::iter::once(&c.head).chain(&c.body).map(|l| l.pred.0) {
            if !nodes.contains(&p) {
                nodes.push(p);
            }
        }
    }
    for &p in &nodes {
        let sym = &language.predicates()[p];
        let shape = if sym.kind.is_intensional() { "ellipse" } else { "box" };
        let _ = writeln!(out, "    \"{}\" [shape={shape}];", sym.name);
    }
    for pc in &program.clauses {
        let head = &language.predicate(pc.clause.head.pred).name;
        for lit in &pc.clause.body {
            let body = &language.predicate(lit.pred).name;
            let _ = writeln!(out, "    \"{head}\" -> \"{body}\" [label=\"{}\"];", pc.slot);
        }
    }
    out.push_str("}\n");
    out
}
