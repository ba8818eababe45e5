//! The benchmark task suite.
//!
//! Every generator produces a train domain and a test domain whose constants
//! and facts extend the train domain's, with the new facts chosen so that no
//! target atom over train constants changes its label. Examples are every
//! ground target atom of the domain, labelled by the intended concept.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{PredicateKind, PredicateSymbol, SymbolicAtom};

/// One domain of a task: language, background facts and labelled examples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub predicates: Vec<PredicateSymbol>,
    pub constants: Vec<String>,
    pub facts: Vec<SymbolicAtom>,
    pub positive: Vec<SymbolicAtom>,
    pub negative: Vec<SymbolicAtom>,
}

impl DomainSpec {
    pub fn target(&self) -> &PredicateSymbol {
        self.predicates.iter().find(|p| p.kind == PredicateKind::Target).expect("a target predicate")
    }
}

/// A generated task: train and test domains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskFile {
    pub name: String,
    pub train: DomainSpec,
    pub test: DomainSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Numeric,
    List,
    Family,
    Graph,
}

/// Parameters of one task generator. Sizes mean the largest number for
/// numeric tasks, the list length for list tasks, the tree depth for family
/// tasks and the node count for graph tasks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSpec {
    pub name: String,
    pub family: Family,
    pub variant: Option<String>,
    pub train_size: usize,
    pub test_size: usize,
}

const NUMERIC: &[&str] = &[
    "predecessor",
    "even",
    "even-dyadic",
    "lte",
    "mod3",
    "mod5-easy",
    "mod5-hard",
    "mod6",
    "plus2",
    "plus4",
];
const LISTS: &[&str] = &["member", "length"];
const FAMILY: &[&str] = &["grandparent"];
const GRAPHS: &[&str] = &["undirected-edge", "adjacent-to-red", "two-children", "graph-colouring", "connectedness", "cyclic"];

/// All registered task names.
pub fn task_names() -> Vec<&'static str> {
    NUMERIC.iter().chain(LISTS).chain(FAMILY).chain(GRAPHS).copied().collect()
}

/// The default spec of a registered task.
pub fn task_spec(name: &str) -> Result<TaskSpec> {
    let (family, train_size, test_size) = if NUMERIC.contains(&name) {
        (Family::Numeric, 10, 20)
    } else if LISTS.contains(&name) {
        (Family::List, 6, 10)
    } else if FAMILY.contains(&name) {
        (Family::Family, 3, 4)
    } else if GRAPHS.contains(&name) {
        (Family::Graph, 8, 12)
    } else {
        return Err(Error::UnknownTask(name.to_string()));
    };
    let variant = name.rsplit_once('-').map(|(_, v)| v).filter(|v| ["easy", "hard", "dyadic"].contains(v));
    Ok(TaskSpec { name: name.to_string(), family, variant: variant.map(str::to_string), train_size, test_size })
}

pub fn registry() -> Vec<TaskSpec> {
    task_names().into_iter().map(|n| task_spec(n).expect("registered")).collect()
}

/// Builds both domains of `spec`.
pub fn generate_task(spec: &TaskSpec) -> Result<TaskFile> {
    if spec.test_size < spec.train_size {
        return Err(Error::Config(format!("{}: test size must not be below train size", spec.name)));
    }
    let (train, test) = match spec.family {
        Family::Numeric => (numeric(&spec.name, spec.train_size)?, numeric(&spec.name, spec.test_size)?),
        Family::List => (list(&spec.name, spec.train_size, None)?, list(&spec.name, spec.train_size, Some(spec.test_size))?),
        Family::Family => (family(&spec.name, spec.train_size)?, family(&spec.name, spec.test_size)?),
        Family::Graph => (graph(&spec.name, spec.train_size, spec.train_size)?, graph(&spec.name, spec.train_size, spec.test_size)?),
    };
    Ok(TaskFile { name: spec.name.clone(), train, test })
}

fn atom(pred: &str, args: &[&str]) -> SymbolicAtom {
    SymbolicAtom::new(pred, args)
}

fn ext(name: &str, arity: usize) -> PredicateSymbol {
    PredicateSymbol::extensional(name, arity)
}

/// Labels every tuple over `constants` accepted by `domain` with `concept`.
fn label(
    target: &str,
    arity: usize,
    constants: &[String],
    domain: impl Fn(&[usize]) -> bool,
    concept: impl Fn(&[usize]) -> bool,
) -> (Vec<SymbolicAtom>, Vec<SymbolicAtom>) {
    let n = constants.len();
    let (mut pos, mut neg) = (Vec::new(), Vec::new());
    let tuples: Vec<Vec<usize>> = if arity == 1 {
        (0..n).map(|a| vec![a]).collect()
    } else {
        (0..n).flat_map(|a| (0..n).map(move |b| vec![a, b])).collect()
    };
    for t in tuples.into_iter().filter(|t| domain(t)) {
        let args: Vec<&str> = t.iter().map(|&i| constants[i].as_str()).collect();
        if concept(&t) {
            pos.push(atom(target, &args));
        } else {
            neg.push(atom(target, &args));
        }
    }
    (pos, neg)
}

fn numeric(name: &str, max: usize) -> Result<DomainSpec> {
    let constants: Vec<String> = (0..=max).map(|i| i.to_string()).collect();
    let s = |i: usize| constants[i].as_str();
    let dyadic_zero = name == "even-dyadic";
    let mut predicates = vec![ext("zero", if dyadic_zero { 2 } else { 1 }), ext("succ", 2)];
    let mut facts = vec![if dyadic_zero { atom("zero", &["0", "0"]) } else { atom("zero", &["0"]) }];
    facts.extend((0..max).map(|i| atom("succ", &[s(i), s(i + 1)])));
    if name == "mod5-easy" {
        predicates.push(ext("plus2", 2));
        predicates.push(ext("plus3", 2));
        facts.extend((0..=max.saturating_sub(2)).map(|i| atom("plus2", &[s(i), s(i + 2)])));
        facts.extend((0..=max.saturating_sub(3)).map(|i| atom("plus3", &[s(i), s(i + 3)])));
    }
    let any = |_: &[usize]| true;
    let (target, arity, (positive, negative)) = match name {
        "predecessor" => ("predecessor", 2, label("predecessor", 2, &constants, any, |t| t[0] == t[1] + 1)),
        "even" => ("even", 1, label("even", 1, &constants, any, |t| t[0] % 2 == 0)),
        "even-dyadic" => ("even", 2, label("even", 2, &constants, |t| t[0] == t[1], |t| t[0] % 2 == 0)),
        "lte" => ("lte", 2, label("lte", 2, &constants, any, |t| t[0] <= t[1])),
        "mod3" => ("mod3", 1, label("mod3", 1, &constants, any, |t| t[0] % 3 == 0)),
        "mod5-easy" | "mod5-hard" => ("mod5", 1, label("mod5", 1, &constants, any, |t| t[0] % 5 == 0)),
        "mod6" => ("mod6", 1, label("mod6", 1, &constants, any, |t| t[0] % 6 == 0)),
        "plus2" => ("plus2", 2, label("plus2", 2, &constants, any, |t| t[1] == t[0] + 2)),
        "plus4" => ("plus4", 2, label("plus4", 2, &constants, any, |t| t[1] == t[0] + 4)),
        other => return Err(Error::UnknownTask(other.to_string())),
    };
    predicates.push(PredicateSymbol::target(target, arity));
    Ok(DomainSpec { predicates, constants, facts, positive, negative })
}

/// Cons-cell lists: `cons(c, t)` links cell `c` to its tail cell, `value(c, e)`
/// gives its element. Lists end in the shared constant `nil`, marked by `empty/1`.
/// The test domain adds a second list of length `extra` after the train list.
fn list(name: &str, train_len: usize, extra: Option<usize>) -> Result<DomainSpec> {
    const ELEMS: [&str; 4] = ["a", "b", "c", "d"];
    let mut lists = vec![train_len];
    lists.extend(extra);
    let mut cells: Vec<Vec<String>> = Vec::new();
    for (l, &len) in lists.iter().enumerate() {
        cells.push((0..len).map(|i| format!("l{l}c{i}")).collect());
    }
    let value_of = |l: usize, i: usize| ELEMS[(i * (l + 2) + l) % ELEMS.len()];
    let mut constants: Vec<String> = Vec::new();
    let mut facts = Vec::new();
    let mut predicates = vec![ext("cons", 2)];
    match name {
        "member" => {
            predicates.push(ext("value", 2));
            constants.extend(ELEMS.iter().map(|e| e.to_string()));
            for (l, cs) in cells.iter().enumerate() {
                constants.extend(cs.iter().cloned());
                for i in 0..cs.len() {
                    if i + 1 < cs.len() {
                        facts.push(atom("cons", &[&cs[i], &cs[i + 1]]));
                    }
                    facts.push(atom("value", &[&cs[i], value_of(l, i)]));
                }
            }
            predicates.push(PredicateSymbol::target("member", 2));
            let n_elems = ELEMS.len();
            let cell_list: Vec<(usize, usize)> =
                cells.iter().enumerate().flat_map(|(l, cs)| (0..cs.len()).map(move |i| (l, i))).collect();
            let (positive, negative) = label(
                "member",
                2,
                &constants,
                |_| true,
                |t| {
                    t[0] < n_elems
                        && t[1] >= n_elems
                        && {
                            let (l, i) = cell_list[t[1] - n_elems];
                            (i..lists[l]).any(|j| value_of(l, j) == ELEMS[t[0]])
                        }
                },
            );
            Ok(DomainSpec { predicates, constants, facts, positive, negative })
        }
        "length" => {
            predicates.push(ext("empty", 1));
            predicates.push(ext("zero", 1));
            predicates.push(ext("succ", 2));
            let longest = *lists.iter().max().unwrap_or(&0);
            let numbers: Vec<String> = (0..=longest).map(|i| format!("n{i}")).collect();
            constants.push("nil".into());
            facts.push(atom("empty", &["nil"]));
            for cs in &cells {
                constants.extend(cs.iter().cloned());
                for i in 0..cs.len() {
                    let next = cs.get(i + 1).map(String::as_str).unwrap_or("nil");
                    facts.push(atom("cons", &[&cs[i], next]));
                }
            }
            let first_number = constants.len();
            constants.extend(numbers.iter().cloned());
            facts.push(atom("zero", &["n0"]));
            for i in 0..longest {
                facts.push(atom("succ", &[&numbers[i], &numbers[i + 1]]));
            }
            predicates.push(PredicateSymbol::target("length", 2));
            let cell_len: Vec<Option<usize>> = std::iter::once(Some(0))
                .chain(cells.iter().flat_map(|cs| (0..cs.len()).map(move |i| Some(cs.len() - i))))
                .chain(numbers.iter().map(|_| None))
                .collect();
            let (positive, negative) = label(
                "length",
                2,
                &constants,
                |_| true,
                |t| t[1] >= first_number && cell_len[t[0]] == Some(t[1] - first_number),
            );
            Ok(DomainSpec { predicates, constants, facts, positive, negative })
        }
        other => Err(Error::UnknownTask(other.to_string())),
    }
}

/// A complete binary descent tree of the given depth, persons numbered
/// breadth-first; a person's parent is `(i - 1) / 2`, a father when the
/// parent's number is even and a mother otherwise.
fn family(name: &str, depth: usize) -> Result<DomainSpec> {
    if name != "grandparent" {
        return Err(Error::UnknownTask(name.to_string()));
    }
    let count = (1usize << (depth + 1)) - 1;
    let constants: Vec<String> = (0..count).map(|i| format!("p{i}")).collect();
    let parent = |i: usize| if i == 0 { None } else { Some((i - 1) / 2) };
    let mut facts = Vec::new();
    for c in 1..count {
        let p = parent(c).unwrap();
        let rel = if p % 2 == 0 { "father" } else { "mother" };
        facts.push(atom(rel, &[&constants[p], &constants[c]]));
    }
    let predicates = vec![ext("father", 2), ext("mother", 2), PredicateSymbol::target("grandparent", 2)];
    let (positive, negative) =
        label("grandparent", 2, &constants, |_| true, |t| parent(t[1]).and_then(parent) == Some(t[0]));
    Ok(DomainSpec { predicates, constants, facts, positive, negative })
}

struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    red: Vec<bool>,
}

impl Graph {
    fn has(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a, b))
    }

    fn reaches(&self, a: usize, b: usize) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack: Vec<usize> = self.edges.iter().filter(|e| e.0 == a).map(|e| e.1).collect();
        while let Some(x) = stack.pop() {
            if x == b {
                return true;
            }
            if !std::mem::replace(&mut seen[x], true) {
                stack.extend(self.edges.iter().filter(|e| e.0 == x).map(|e| e.1));
            }
        }
        false
    }
}

/// Random directed graph on `train_nodes` nodes; nodes added for the test
/// domain only get edges among themselves and into train nodes, so nothing
/// reachable from a train node changes.
fn random_graph(name: &str, train_nodes: usize, nodes: usize, attempt: u64) -> Graph {
    let seed = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3)) + attempt;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for a in 0..train_nodes {
        for b in 0..train_nodes {
            if a != b && rng.random_bool(0.2) {
                edges.push((a, b));
            }
        }
    }
    let red: Vec<bool> = (0..train_nodes).map(|_| rng.random_bool(0.4)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut red = red;
    for a in train_nodes..nodes {
        for b in 0..nodes {
            if a != b && rng.random_bool(0.2) {
                edges.push((a, b));
            }
        }
        red.push(rng.random_bool(0.4));
    }
    Graph { n: nodes, edges, red }
}

/// Uses the first graph seed whose train domain has both positive and
/// negative examples.
fn graph(name: &str, train_nodes: usize, nodes: usize) -> Result<DomainSpec> {
    for attempt in 0..64 {
        let train = graph_with(name, train_nodes, train_nodes, attempt)?;
        if !train.positive.is_empty() && !train.negative.is_empty() {
            return graph_with(name, train_nodes, nodes, attempt);
        }
    }
    Err(Error::Config(format!("{name}: no graph with both positive and negative examples")))
}

fn graph_with(name: &str, train_nodes: usize, nodes: usize, attempt: u64) -> Result<DomainSpec> {
    let g = random_graph(name, train_nodes, nodes, attempt);
    let node_names: Vec<String> = (0..nodes).map(|i| format!("v{i}")).collect();
    let mut constants = node_names.clone();
    let mut predicates = vec![ext("edge", 2)];
    let mut facts: Vec<SymbolicAtom> = g.edges.iter().map(|&(a, b)| atom("edge", &[&node_names[a], &node_names[b]])).collect();
    let coloured = matches!(name, "adjacent-to-red" | "graph-colouring");
    if coloured {
        constants.extend(["red".to_string(), "green".to_string()]);
        predicates.push(ext("colour", 2));
        for (i, &r) in g.red.iter().enumerate() {
            facts.push(atom("colour", &[&node_names[i], if r { "red" } else { "green" }]));
        }
        if name == "adjacent-to-red" {
            predicates.push(ext("red", 1));
            facts.push(atom("red", &["red"]));
        }
    }
    if name == "two-children" {
        predicates.push(ext("neq", 2));
        for a in 0..nodes {
            for b in 0..nodes {
                if a != b {
                    facts.push(atom("neq", &[&node_names[a], &node_names[b]]));
                }
            }
        }
    }
    let is_node = |i: usize| i < nodes;
    let (target, arity, (positive, negative)) = match name {
        "undirected-edge" => {
            ("undirected_edge", 2, label("undirected_edge", 2, &constants, |_| true, |t| g.has(t[0], t[1]) || g.has(t[1], t[0])))
        }
        "adjacent-to-red" => (
            "adjacent_to_red",
            1,
            label("adjacent_to_red", 1, &constants, |_| true, |t| is_node(t[0]) && (0..nodes).any(|b| g.has(t[0], b) && g.red[b])),
        ),
        "two-children" => (
            "two_children",
            1,
            label("two_children", 1, &constants, |_| true, |t| (0..nodes).filter(|&b| g.has(t[0], b)).count() >= 2),
        ),
        "graph-colouring" => (
            "graph_colouring",
            1,
            label("graph_colouring", 1, &constants, |_| true, |t| {
                is_node(t[0]) && (0..nodes).any(|b| g.has(t[0], b) && g.red[b] == g.red[t[0]])
            }),
        ),
        "connectedness" => ("connectedness", 2, label("connectedness", 2, &constants, |_| true, |t| g.reaches(t[0], t[1]))),
        "cyclic" => ("cyclic", 1, label("cyclic", 1, &constants, |_| true, |t| g.reaches(t[0], t[0]))),
        other => return Err(Error::UnknownTask(other.to_string())),
    };
    predicates.push(PredicateSymbol::target(target, arity));
    Ok(DomainSpec { predicates, constants, facts, positive, negative })
}
