//! Line-based task files.
//!
//! ```text
//! % comment
//! task even
//! [train]
//! pred zero/1 extensional
//! pred even/1 target
//! const 0
//! fact zero(0).
//! pos even(0).
//! neg even(1).
//! [test]
//! ...
//! ```
//!
//! Whitespace around tokens is ignored. The optional `task` line names the
//! task; both sections are required.

use std::fmt::Write as _;

use super::tasks::{DomainSpec, TaskFile};
use crate::error::{Error, Result};
use crate::logic::{PredicateSymbol, SymbolicAtom};

/// Renders `task` in the task-file format. Output is byte-identical for equal inputs.
pub fn write_task_file(task: &TaskFile) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "task {}", task.name);
    for (header, d) in [("[train]", &task.train), ("[test]", &task.test)] {
        let _ = writeln!(out, "{header}");
        for p in &d.predicates {
            let _ = writeln!(out, "pred {}/{} {}", p.name, p.arity, p.kind.as_str());
        }
        for c in &d.constants {
            let _ = writeln!(out, "const {c}");
        }
        for (kw, atoms) in [("fact", &d.facts), ("pos", &d.positive), ("neg", &d.negative)] {
            for a in atoms {
                let _ = writeln!(out, "{kw} {a}.");
            }
        }
    }
    out
}

fn empty_domain() -> DomainSpec {
    DomainSpec { predicates: Vec::new(), constants: Vec::new(), facts: Vec::new(), positive: Vec::new(), negative: Vec::new() }
}

/// Parses a task file. `default_name` is used when there is no `task` line.
pub fn parse_task_file(text: &str, default_name: &str) -> Result<TaskFile> {
    let mut name = default_name.to_string();
    let mut train = None;
    let mut test = None;
    let mut current: Option<(&str, DomainSpec)> = None;
    let finish = |cur: Option<(&str, DomainSpec)>, train: &mut Option<DomainSpec>, test: &mut Option<DomainSpec>| {
        if let Some((which, d)) = cur {
            if which == "train" {
                *train = Some(d);
            } else {
                *test = Some(d);
            }
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "[train]" || line == "[test]" {
            finish(current.take(), &mut train, &mut test);
            let which = if line == "[train]" { "train" } else { "test" };
            if (which == "train" && train.is_some()) || (which == "test" && test.is_some()) {
                return Err(err(format!("duplicate {line} section")));
            }
            current = Some((which, empty_domain()));
            continue;
        }
        let (kw, rest) = line.split_once(char::is_whitespace).ok_or_else(|| err(format!("expected `keyword value`, got `{line}`")))?;
        let rest = rest.trim();
        if kw == "task" {
            name = rest.to_string();
            continue;
        }
        let Some((_, d)) = current.as_mut() else {
            return Err(err(format!("`{kw}` outside a [train] or [test] section")));
        };
        match kw {
            "pred" => {
                let mut parts = rest.split_whitespace();
                let sig = parts.next().unwrap_or("");
                let kind = parts.next().ok_or_else(|| err("missing predicate kind".into()))?;
                if parts.next().is_some() {
                    return Err(err("trailing tokens after predicate kind".into()));
                }
                let (pname, arity) = sig.split_once('/').ok_or_else(|| err(format!("expected name/arity, got `{sig}`")))?;
                let arity: usize = arity.trim().parse().map_err(|_| err(format!("bad arity in `{sig}`")))?;
                let kind = kind.parse().map_err(err)?;
                d.predicates.push(PredicateSymbol::new(pname.trim(), arity, kind));
            }
            "const" => d.constants.push(rest.to_string()),
            "fact" | "pos" | "neg" => {
                let atom: SymbolicAtom = rest.parse().map_err(err)?;
                match kw {
                    "fact" => d.facts.push(atom),
                    "pos" => d.positive.push(atom),
                    _ => d.negative.push(atom),
                }
            }
            other => return Err(err(format!("unknown keyword `{other}`"))),
        }
    }
    finish(current, &mut train, &mut test);
    let missing = |s: &str| Error::Parse { line: text.lines().count(), message: format!("missing [{s}] section") };
    Ok(TaskFile { name, train: train.ok_or_else(|| missing("train"))?, test: test.ok_or_else(|| missing("test"))? })
}
