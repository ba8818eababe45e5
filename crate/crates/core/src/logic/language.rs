use std::collections::HashMap;

use super::{ConstId, GroundAtom, PredId, PredicateKind, PredicateSymbol, SymbolicAtom};
use crate::error::{Error, Result};

/// Predicates and constants of a learning problem, with the derived ground-atom layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Language {
    predicates: Vec<PredicateSymbol>,
    constants: Vec<String>,
    offsets: Vec<usize>,
    atom_count: usize,
    pred_by_name: HashMap<String, PredId>,
    const_by_name: HashMap<String, ConstId>,
}

impl Language {
    /// Validates names, arities and the single-target rule. An empty constant
    /// list is accepted here; [`super::build_atom_index`] rejects it.
    pub fn new(predicates: Vec<PredicateSymbol>, constants: Vec<String>) -> Result<Self> {
        let mut pred_by_name = HashMap::with_capacity(predicates.len());
        for (i, p) in predicates.iter().enumerate() {
            if !(1..=2).contains(&p.arity) {
                return Err(Error::UnsupportedArity { name: p.name.clone(), arity: p.arity });
            }
            if pred_by_name.insert(p.name.clone(), PredId(i)).is_some() {
                return Err(Error::DuplicateName { kind: "predicate", name: p.name.clone() });
            }
        }
        let targets = predicates.iter().filter(|p| p.kind == PredicateKind::Target).count();
        if targets != 1 {
            return Err(Error::TargetCount(targets));
        }
        let mut const_by_name = HashMap::with_capacity(constants.len());
        for (i, c) in constants.iter().enumerate() {
            if const_by_name.insert(c.clone(), ConstId(i)).is_some() {
                return Err(Error::DuplicateName { kind: "constant", name: c.clone() });
            }
        }
        let n = constants.len();
        let mut offsets = Vec::with_capacity(predicates.len());
        let mut atom_count = 0;
        for p in &predicates {
            offsets.push(atom_count);
            atom_count += n.pow(p.arity as u32);
        }
        Ok(Language { predicates, constants, offsets, atom_count, pred_by_name, const_by_name })
    }

    /// Same language extended with `count` invented dyadic predicates `i1..i<count>`.
    pub fn with_invented(&self, count: usize) -> Result<Self> {
        let mut preds = self.predicates.clone();
        let mut next = 1;
        for _ in 0..count {
            while self.pred_by_name.contains_key(&format!("i{next}")) {
                next += 1;
            }
            preds.push(PredicateSymbol::new(format!("i{next}"), 2, PredicateKind::Invented));
            next += 1;
        }
        Language::new(preds, self.constants.clone())
    }

    /// Same predicates over a different constant universe.
    pub fn with_constants(&self, constants: Vec<String>) -> Result<Self> {
        Language::new(self.predicates.clone(), constants)
    }

    pub fn predicates(&self) -> &[PredicateSymbol] {
        &self.predicates
    }

    pub fn predicate(&self, id: PredId) -> &PredicateSymbol {
        &self.predicates[id.0]
    }

    pub fn pred_ids(&self) -> impl Iterator<Item = PredId> + '_ {
        (0..self.predicates.len()).map(PredId)
    }

    pub fn pred_id(&self, name: &str) -> Option<PredId> {
        self.pred_by_name.get(name).copied()
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn const_id(&self, name: &str) -> Option<ConstId> {
        self.const_by_name.get(name).copied()
    }

    pub fn num_constants(&self) -> usize {
        self.constants.len()
    }

    pub fn target(&self) -> PredId {
        self.pred_ids()
            .find(|&p| self.predicate(p).kind == PredicateKind::Target)
            .expect("validated on construction")
    }

    /// Predicates that head learnable clauses: the target first, then invented ones.
    pub fn template_heads(&self) -> Vec<PredId> {
        let mut heads = vec![self.target()];
        heads.extend(self.pred_ids().filter(|&p| self.predicate(p).kind == PredicateKind::Invented));
        heads
    }

    /// Number of ground atoms, `G`.
    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    /// Index of the first ground atom of `pred`.
    pub fn offset(&self, pred: PredId) -> usize {
        self.offsets[pred.0]
    }

    /// Number of ground atoms of `pred`.
    pub fn pred_atom_count(&self, pred: PredId) -> usize {
        self.constants.len().pow(self.predicate(pred).arity as u32)
    }

    pub fn atom_index(&self, pred: PredId, args: &[ConstId]) -> usize {
        debug_assert_eq!(args.len(), self.predicate(pred).arity);
        let n = self.constants.len();
        args.iter().fold(0, |acc, c| acc * n + c.0) + self.offsets[pred.0]
    }

    pub fn ground(&self, pred: PredId, args: &[ConstId]) -> GroundAtom {
        GroundAtom { pred, args: args.to_vec(), index: self.atom_index(pred, args) }
    }

    /// Inverse of [`Language::atom_index`].
    pub fn decode(&self, index: usize) -> GroundAtom {
        assert!(index < self.atom_count, "atom index {index} out of range");
        // offsets are strictly increasing whenever the domain is non-empty
        let pred = match self.offsets.binary_search(&index) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let n = self.constants.len();
        let mut local = index - self.offsets[pred];
        let arity = self.predicates[pred].arity;
        let mut args = vec![ConstId(0); arity];
        for slot in (0..arity).rev() {
            args[slot] = ConstId(local % n);
            local /= n;
        }
        GroundAtom { pred: PredId(pred), args, index }
    }

    pub fn resolve(&self, atom: &SymbolicAtom) -> Result<GroundAtom> {
        let outside = || Error::FactOutsideLanguage(atom.to_string());
        let pred = self.pred_id(&atom.pred).ok_or_else(outside)?;
        if self.predicate(pred).arity != atom.args.len() {
            return Err(outside());
        }
        let args = atom
            .args
            .iter()
            .map(|a| self.const_id(a).ok_or_else(outside))
            .collect::<Result<Vec<_>>>()?;
        Ok(self.ground(pred, &args))
    }

    pub fn symbolic(&self, atom: &GroundAtom) -> SymbolicAtom {
        SymbolicAtom {
            pred: self.predicate(atom.pred).name.clone(),
            args: atom.args.iter().map(|c| self.constants[c.0].clone()).collect(),
        }
    }

    pub fn atom_name(&self, index: usize) -> String {
        self.symbolic(&self.decode(index)).to_string()
    }
}
