//! Ground-model enumeration for the context. The ground side of a context is
//! a finite propositional theory over the atoms `A(c)` for predicates and
//! constants that actually appear in it; its models drive the per-model
//! linear systems of the consistency check.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{
    ContextClause, EmpiricalProgram, GroundClause, Mode, UnaryRule,
};
use crate::propositional::{rules_mask, TruthTable};

/// A ground atom `predicate(constant)`, ordered by (predicate, constant).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: usize,
    pub constant: String,
}

/// A truth assignment over the ground atom base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HerbrandModel {
    /// All atoms over predicates and constants appearing in the ground side.
    pub base: BTreeSet<GroundAtom>,
    /// The subset assigned true.
    pub true_atoms: BTreeSet<GroundAtom>,
}

impl HerbrandModel {
    pub fn holds(&self, atom: &GroundAtom) -> bool {
        self.true_atoms.contains(atom)
    }

    /// Constants appearing in the base, sorted.
    pub fn constants(&self) -> BTreeSet<&str> {
        self.base.iter().map(|a| a.constant.as_str()).collect()
    }

    /// Predicates appearing in the base, sorted.
    pub fn base_predicates(&self) -> BTreeSet<usize> {
        self.base.iter().map(|a| a.predicate).collect()
    }
}

/// A constant's truth assignment over the predicates of the ground side;
/// silent on every other predicate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ConstantSignature {
    pub assignment: BTreeMap<usize, bool>,
}

impl ConstantSignature {
    /// Cells agreeing with the signature on every assigned predicate.
    pub fn compatible_cells(&self, k: usize) -> TruthTable {
        let mut acc = TruthTable::full(crate::model::num_partitions(k));
        for (&pred, &value) in &self.assignment {
            let atom = TruthTable::atom(pred, k);
            acc = acc.and(&if value { atom } else { atom.complement() });
        }
        acc
    }
}

/// Split a program's context into its rule side and its ground side,
/// preserving source order within each.
pub fn split_context(ep: &EmpiricalProgram) -> (Vec<&UnaryRule>, Vec<&GroundClause>) {
    let mut rules = Vec::new();
    let mut ground = Vec::new();
    for clause in &ep.context {
        match clause {
            ContextClause::Rule(r) => rules.push(r),
            ContextClause::Ground(g) => ground.push(g),
        }
    }
    (rules, ground)
}

/// Enumerate every model of the ground clauses over their atom base, in a
/// deterministic order (atoms sorted by (predicate, constant); false branch
/// first). In strict mode, models are dropped unless each constant's
/// signature can be extended to a full truth assignment satisfying every
/// unary rule — such models describe constants no rule-respecting
/// interpretation can accommodate.
pub fn enumerate_models(
    ground: &[&GroundClause],
    rules: &[&UnaryRule],
    mode: Mode,
    k: usize,
) -> Vec<HerbrandModel> {
    let mut base: BTreeSet<GroundAtom> = BTreeSet::new();
    let mut preds = BTreeSet::new();
    let mut constants = BTreeSet::new();
    for clause in ground {
        for lit in std::iter::once(&clause.head).chain(&clause.body) {
            preds.insert(lit.predicate);
            constants.insert(lit.constant.clone());
        }
    }
    for &p in &preds {
        for c in &constants {
            base.insert(GroundAtom {
                predicate: p,
                constant: c.clone(),
            });
        }
    }

    let atoms: Vec<GroundAtom> = base.iter().cloned().collect();
    let index_of: BTreeMap<&GroundAtom, usize> = atoms.iter().enumerate().map(|(i, a)| (a, i)).collect();

    // Each ground clause K0 <- K1, ..., Kn as a disjunction: K0 or ~Ki.
    // (literal atom index, wanted truth value)
    let mut cnf: Vec<Vec<(usize, bool)>> = Vec::new();
    for clause in ground {
        let mut lits = Vec::new();
        let head_atom = GroundAtom {
            predicate: clause.head.predicate,
            constant: clause.head.constant.clone(),
        };
        lits.push((index_of[&head_atom], !clause.head.negated));
        for lit in &clause.body {
            let atom = GroundAtom {
                predicate: lit.predicate,
                constant: lit.constant.clone(),
            };
            lits.push((index_of[&atom], lit.negated));
        }
        cnf.push(lits);
    }

    let mut models = Vec::new();
    let mut assignment: Vec<Option<bool>> = vec![None; atoms.len()];
    search(&cnf, &mut assignment, 0, &atoms, &base, &mut models);

    if mode == Mode::Strict {
        let admissible = rules_mask(rules, k);
        models.retain(|m| {
            signatures(m)
                .values()
                .all(|sig| sig.compatible_cells(k).intersects(&admissible))
        });
    }
    models
}

fn search(
    cnf: &[Vec<(usize, bool)>],
    assignment: &mut Vec<Option<bool>>,
    next: usize,
    atoms: &[GroundAtom],
    base: &BTreeSet<GroundAtom>,
    out: &mut Vec<HerbrandModel>,
) {
    // Prune as soon as some clause has every literal assigned wrong.
    for clause in cnf {
        let mut satisfied = false;
        let mut undecided = false;
        for &(atom, wanted) in clause {
            match assignment[atom] {
                Some(v) if v == wanted => {
                    satisfied = true;
                    break;
                }
                Some(_) => {}
                None => undecided = true,
            }
        }
        if !satisfied && !undecided {
            return;
        }
    }
    if next == atoms.len() {
        let true_atoms = atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| assignment[*i] == Some(true))
            .map(|(_, a)| a.clone())
            .collect();
        out.push(HerbrandModel {
            base: base.clone(),
            true_atoms,
        });
        return;
    }
    for value in [false, true] {
        assignment[next] = Some(value);
        search(cnf, assignment, next + 1, atoms, base, out);
    }
    assignment[next] = None;
}

/// Each base constant's truth assignment over the base predicates.
pub fn signatures(model: &HerbrandModel) -> BTreeMap<String, ConstantSignature> {
    let preds = model.base_predicates();
    let mut out = BTreeMap::new();
    for constant in model.constants() {
        let mut assignment = BTreeMap::new();
        for &p in &preds {
            let atom = GroundAtom {
                predicate: p,
                constant: constant.to_string(),
            };
            assignment.insert(p, model.holds(&atom));
        }
        out.insert(constant.to_string(), ConstantSignature { assignment });
    }
    out
}

/// Signatures grouped with multiplicities, in signature order.
pub fn signature_groups(model: &HerbrandModel) -> Vec<(ConstantSignature, usize)> {
    let mut counts: BTreeMap<ConstantSignature, usize> = BTreeMap::new();
    for sig in signatures(model).into_values() {
        *counts.entry(sig).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}
