//! First-order vocabulary shared by every other module: predicates, constants,
//! literals, clauses, ground atoms and the language that fixes the ground-atom
//! coordinate system.
//!
//! Every ground atom of a [`Language`] has a dense index in `0..G` where
//! `G = Σ_p |constants|^arity(p)`. Atoms are laid out predicate by predicate in
//! declaration order; within a predicate the argument tuples are enumerated
//! lexicographically by constant position, so `p(c_i, c_j)` sits at
//! `offset(p) + i * n + j`.

mod ground;
mod language;

pub use ground::{build_atom_index, ground_clause, initial_valuation, GroundClause};
pub use language::Language;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Role of a predicate symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredicateKind {
    /// Defined by background facts only; never the head of a learned clause.
    Extensional,
    /// The predicate being learned.
    Target,
    /// An auxiliary predicate owned by one template.
    Invented,
}

impl PredicateKind {
    pub fn is_intensional(self) -> bool {
        !matches!(self, PredicateKind::Extensional)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            PredicateKind::Extensional => "extensional",
            PredicateKind::Target => "target",
            PredicateKind::Invented => "invented",
        }
    }
}

impl FromStr for PredicateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "extensional" => Ok(PredicateKind::Extensional),
            "target" => Ok(PredicateKind::Target),
            "invented" => Ok(PredicateKind::Invented),
            other => Err(format!("unknown predicate kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PredicateSymbol {
    pub name: String,
    pub arity: usize,
    pub kind: PredicateKind,
}

impl PredicateSymbol {
    pub fn new(name: impl Into<String>, arity: usize, kind: PredicateKind) -> Self {
        PredicateSymbol { name: name.into(), arity, kind }
    }

    pub fn extensional(name: impl Into<String>, arity: usize) -> Self {
        Self::new(name, arity, PredicateKind::Extensional)
    }

    pub fn target(name: impl Into<String>, arity: usize) -> Self {
        Self::new(name, arity, PredicateKind::Target)
    }
}

/// Position of a predicate in its language's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PredId(pub usize);

/// Position of a constant in its language's declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConstId(pub usize);

/// Clause variables. `X` and `Y` are head variables of dyadic heads; unary
/// heads only bind `X`, leaving `Y` and `Z` existential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Z];

    pub fn position(self) -> usize {
        self as usize
    }

    /// Upper-case name used by the surface syntax (`A`, `B`, `C`).
    pub fn surface_name(self) -> char {
        match self {
            Var::X => 'A',
            Var::Y => 'B',
            Var::Z => 'C',
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
        };
        f.write_str(s)
    }
}

/// Head variables for a head of the given arity.
pub fn head_vars(arity: usize) -> &'static [Var] {
    match arity {
        1 => &[Var::X],
        _ => &[Var::X, Var::Y],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Literal {
    pub pred: PredId,
    pub args: Vec<Var>,
}

impl Literal {
    pub fn new(pred: PredId, args: &[Var]) -> Self {
        Literal { pred, args: args.to_vec() }
    }

    pub fn mentions(&self, var: Var) -> bool {
        self.args.contains(&var)
    }
}

/// A definite clause with exactly two body literals.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub head: Literal,
    pub body: [Literal; 2],
}

impl Clause {
    /// Builds a clause after checking head kind, head variables and arities
    /// against `language`.
    pub fn new(head: Literal, body: [Literal; 2], language: &Language) -> crate::Result<Self> {
        let clause = Clause { head, body };
        clause.validate(language)?;
        Ok(clause)
    }

    pub fn validate(&self, language: &Language) -> crate::Result<()> {
        let err = |msg: String| Err(Error::MalformedClause(msg));
        if self.head.pred.0 >= language.predicates().len() {
            return err(format!("unknown head predicate id {}", self.head.pred.0));
        }
        let head = language.predicate(self.head.pred);
        if !head.kind.is_intensional() {
            return err(format!("extensional predicate `{}` used as clause head", head.name));
        }
        if self.head.args != head_vars(head.arity) {
            return err(format!("head of `{}` must use variables {:?}", head.name, head_vars(head.arity)));
        }
        for lit in &self.body {
            if lit.pred.0 >= language.predicates().len() {
                return err(format!("unknown body predicate id {}", lit.pred.0));
            }
            let p = language.predicate(lit.pred);
            if lit.args.len() != p.arity {
                return err(format!("`{}` expects {} arguments, got {}", p.name, p.arity, lit.args.len()));
            }
        }
        Ok(())
    }

    /// Variables occurring in the body but not in the head, in `Var` order.
    pub fn existential_vars(&self) -> Vec<Var> {
        Var::ALL
            .into_iter()
            .filter(|v| !self.head.args.contains(v))
            .filter(|v| self.body.iter().any(|l| l.mentions(*v)))
            .collect()
    }

    /// Renders the clause in the `h(A,B):-q(B,C),r(C,A)` surface syntax.
    pub fn display<'a>(&'a self, language: &'a Language) -> impl fmt::Display + 'a {
        ClauseDisplay { clause: self, language }
    }
}

struct ClauseDisplay<'a> {
    clause: &'a Clause,
    language: &'a Language,
}

fn write_literal(f: &mut fmt::Formatter<'_>, lit: &Literal, language: &Language) -> fmt::Result {
    write!(f, "{}(", language.predicate(lit.pred).name)?;
    for (i, v) in lit.args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{}", v.surface_name())?;
    }
    f.write_str(")")
}

impl fmt::Display for ClauseDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_literal(f, &self.clause.head, self.language)?;
        f.write_str(":-")?;
        write_literal(f, &self.clause.body[0], self.language)?;
        f.write_str(",")?;
        write_literal(f, &self.clause.body[1], self.language)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundAtom {
    pub pred: PredId,
    pub args: Vec<ConstId>,
    pub index: usize,
}

/// An atom written with names, as it appears in task files: `succ(0,1)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SymbolicAtom {
    pub pred: String,
    pub args: Vec<String>,
}

impl SymbolicAtom {
    pub fn new(pred: impl Into<String>, args: &[&str]) -> Self {
        SymbolicAtom { pred: pred.into(), args: args.iter().map(|s| s.to_string()).collect() }
    }
}

impl fmt::Display for SymbolicAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.pred, self.args.join(","))
    }
}

fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '+')
}

impl FromStr for SymbolicAtom {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let s = s.strip_suffix('.').unwrap_or(&s);
        let open = s.find('(').ok_or_else(|| format!("expected `(` in atom `{s}`"))?;
        let inner = s[open + 1..]
            .strip_suffix(')')
            .ok_or_else(|| format!("expected `)` at end of atom `{s}`"))?;
        let pred = &s[..open];
        if !is_identifier(pred) {
            return Err(format!("bad predicate name `{pred}`"));
        }
        let args: Vec<String> = inner.split(',').map(str::to_string).collect();
        if let Some(bad) = args.iter().find(|a| !is_identifier(a)) {
            return Err(format!("bad constant `{bad}` in atom `{s}`"));
        }
        Ok(SymbolicAtom { pred: pred.to_string(), args })
    }
}

/// Fuzzy truth assignment over every ground atom of a language.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation(pub Vec<f64>);

impl Valuation {
    pub fn zeros(len: usize) -> Self {
        Valuation(vec![0.0; len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl std::ops::Index<usize> for Valuation {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}
