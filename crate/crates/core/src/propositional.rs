//! Truth-table machinery over the partition cells. Every formula over `k`
//! predicates denotes a set of cells (a bitmask of length `2^k`); boolean
//! connectives become bitwise operations and entailment becomes subset.

use crate::model::{num_partitions, predicate_true_in_cell, ComplexPredicate, Formula, UnaryRule};

/// A set of partition cells as a packed bitmask. Bit `c` corresponds to the
/// partition with 1-based index `c + 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TruthTable {
    nbits: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn empty(nbits: usize) -> Self {
        TruthTable {
            nbits,
            words: vec![0; nbits.div_ceil(64)],
        }
    }

    pub fn full(nbits: usize) -> Self {
        let mut t = TruthTable::empty(nbits);
        for c in 0..nbits {
            t.set(c);
        }
        t
    }

    /// Cells where the predicate with declaration index `pred` holds.
    pub fn atom(pred: usize, k: usize) -> Self {
        let n = num_partitions(k);
        let mut t = TruthTable::empty(n);
        for cell in 0..n {
            if predicate_true_in_cell(pred, cell, k) {
                t.set(cell);
            }
        }
        t
    }

    pub fn len_bits(&self) -> usize {
        self.nbits
    }

    pub fn get(&self, cell: usize) -> bool {
        debug_assert!(cell < self.nbits);
        self.words[cell / 64] & (1u64 << (cell % 64)) != 0
    }

    pub fn set(&mut self, cell: usize) {
        debug_assert!(cell < self.nbits);
        self.words[cell / 64] |= 1u64 << (cell % 64);
    }

    pub fn and(&self, other: &TruthTable) -> TruthTable {
        debug_assert_eq!(self.nbits, other.nbits);
        TruthTable {
            nbits: self.nbits,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn or(&self, other: &TruthTable) -> TruthTable {
        debug_assert_eq!(self.nbits, other.nbits);
        TruthTable {
            nbits: self.nbits,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a | b)
                .collect(),
        }
    }

    pub fn complement(&self) -> TruthTable {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        // Mask tail bits beyond nbits so equality stays well-defined.
        let tail = self.nbits % 64;
        if tail != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        TruthTable {
            nbits: self.nbits,
            words,
        }
    }

    pub fn is_subset_of(&self, other: &TruthTable) -> bool {
        debug_assert_eq!(self.nbits, other.nbits);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &TruthTable) -> bool {
        debug_assert_eq!(self.nbits, other.nbits);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Set cells in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nbits).filter(move |&c| self.get(c))
    }
}

/// The cells satisfying `f`, by structural recursion over the connectives.
pub fn truth_table(f: &Formula, k: usize) -> TruthTable {
    let n = num_partitions(k);
    match f {
        Formula::Atom(p) => TruthTable::atom(*p, k),
        Formula::Not(inner) => truth_table(inner, k).complement(),
        Formula::And(a, b) => truth_table(a, k).and(&truth_table(b, k)),
        Formula::Or(a, b) => truth_table(a, k).or(&truth_table(b, k)),
        Formula::Top => TruthTable::full(n),
        Formula::Bot => TruthTable::empty(n),
    }
}

/// Cells satisfying every formula in `fs`; the full mask when `fs` is empty.
pub fn satisfying_partitions(fs: &[ComplexPredicate], k: usize) -> TruthTable {
    let mut acc = TruthTable::full(num_partitions(k));
    for f in fs {
        acc = acc.and(f.canon(k));
    }
    acc
}

/// Cells satisfying a single rule `L0 <- L1, ..., Ln`, i.e. everything except
/// "body true, head false".
pub fn rule_mask(rule: &UnaryRule, k: usize) -> TruthTable {
    let mut body = TruthTable::full(num_partitions(k));
    for lit in &rule.body {
        body = body.and(&literal_mask(lit.predicate, lit.negated, k));
    }
    let head = literal_mask(rule.head.predicate, rule.head.negated, k);
    body.and(&head.complement()).complement()
}

/// Cells satisfying every rule.
pub fn rules_mask(rules: &[&UnaryRule], k: usize) -> TruthTable {
    let mut acc = TruthTable::full(num_partitions(k));
    for rule in rules {
        acc = acc.and(&rule_mask(rule, k));
    }
    acc
}

fn literal_mask(pred: usize, negated: bool, k: usize) -> TruthTable {
    let t = TruthTable::atom(pred, k);
    if negated {
        t.complement()
    } else {
        t
    }
}

/// Whether `conclusion(X)` follows from `hypothesis(X)` under the rules:
/// every cell satisfying all rules and the hypothesis satisfies the
/// conclusion.
pub fn rules_entail(
    rules: &[&UnaryRule],
    hypothesis: &ComplexPredicate,
    conclusion: &ComplexPredicate,
    k: usize,
) -> bool {
    rules_mask(rules, k)
        .and(hypothesis.canon(k))
        .is_subset_of(conclusion.canon(k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::RuleLiteral;

    fn rule(head: RuleLiteral, body: Vec<RuleLiteral>) -> UnaryRule {
        UnaryRule { head, body }
    }

    #[test]
    fn single_atom_table_two_predicates() {
        // Declaration order (Monk_seal, Female): Monk_seal holds in
        // partitions 1 and 2 exactly.
        let t = truth_table(&Formula::Atom(0), 2);
        assert_eq!(t.ones().collect::<Vec<_>>(), vec![0, 1]);
        let f = truth_table(&Formula::Atom(1), 2);
        assert_eq!(f.ones().collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn tautology_fills_every_cell() {
        let f = Formula::or(Formula::Atom(0), Formula::not(Formula::Atom(0)));
        let t = truth_table(&f, 2);
        assert_eq!(t.count(), 4);
        assert_eq!(t, TruthTable::full(4));
    }

    #[test]
    fn conjunction_with_negation_three_predicates() {
        // Order (Grey, Royal_elephant, Elephant): Grey & ~Elephant holds in
        // the two cells with Grey = 1, Elephant = 0, any Royal_elephant.
        let f = Formula::and(Formula::Atom(0), Formula::not(Formula::Atom(2)));
        let t = truth_table(&f, 3);
        assert_eq!(t.count(), 2);
        for cell in t.ones() {
            assert!(predicate_true_in_cell(0, cell, 3));
            assert!(!predicate_true_in_cell(2, cell, 3));
        }
    }

    #[test]
    fn satisfying_partitions_is_conjunctive() {
        let fs = vec![ComplexPredicate::atom(0), ComplexPredicate::atom(1)];
        let t = satisfying_partitions(&fs, 2);
        assert_eq!(t.ones().collect::<Vec<_>>(), vec![0]);
        // Empty sequence: every cell.
        assert_eq!(satisfying_partitions(&[], 2), TruthTable::full(4));
        // Contradictory pair: no cell.
        let fs = vec![
            ComplexPredicate::atom(0),
            ComplexPredicate::new(Formula::not(Formula::Atom(0))),
        ];
        assert!(satisfying_partitions(&fs, 2).is_empty());
    }

    #[test]
    fn entailment_via_contraposition() {
        // Rules: Elephant <- Royal_elephant; Grey <- ~White.
        // Order (Grey, Royal_elephant, Elephant, White).
        let rules = vec![
            rule(RuleLiteral::pos(2), vec![RuleLiteral::pos(1)]),
            rule(RuleLiteral::pos(0), vec![RuleLiteral::neg(3)]),
        ];
        let refs: Vec<&UnaryRule> = rules.iter().collect();
        let not_grey = ComplexPredicate::new(Formula::not(Formula::Atom(0)));
        let white = ComplexPredicate::atom(3);
        assert!(rules_entail(&refs, &not_grey, &white, 4));
        // Nothing says elephants are grey at the context level.
        let elephant = ComplexPredicate::atom(2);
        let grey = ComplexPredicate::atom(0);
        assert!(!rules_entail(&refs, &elephant, &grey, 4));
    }

    #[test]
    fn entailment_without_rules_is_propositional() {
        let a_and_b = ComplexPredicate::new(Formula::and(Formula::Atom(0), Formula::Atom(1)));
        let a = ComplexPredicate::atom(0);
        assert!(rules_entail(&[], &a_and_b, &a, 2));
        assert!(!rules_entail(&[], &a, &a_and_b, 2));
    }

    #[test]
    fn entailment_is_reflexive_and_transitive_on_samples() {
        let k = 3;
        let fs = [
            ComplexPredicate::atom(0),
            ComplexPredicate::new(Formula::or(Formula::Atom(1), Formula::Atom(2))),
            ComplexPredicate::new(Formula::not(Formula::And(
                Box::new(Formula::Atom(0)),
                Box::new(Formula::Atom(2)),
            ))),
        ];
        for f in &fs {
            assert!(rules_entail(&[], f, f, k));
        }
        for a in &fs {
            for b in &fs {
                for c in &fs {
                    if rules_entail(&[], a, b, k) && rules_entail(&[], b, c, k) {
                        assert!(rules_entail(&[], a, c, k));
                    }
                }
            }
        }
    }

    /// Independent check: build each mask by directly evaluating the formula
    /// on every cell's truth assignment, bypassing the bitwise composition.
    #[test]
    fn tables_agree_with_direct_evaluation() {
        let k = 3;
        let formulas = [
            Formula::Atom(1),
            Formula::not(Formula::Atom(2)),
            Formula::and(
                Formula::or(Formula::Atom(0), Formula::Atom(1)),
                Formula::not(Formula::Atom(0)),
            ),
            Formula::or(
                Formula::not(Formula::and(Formula::Atom(0), Formula::Atom(2))),
                Formula::Atom(1),
            ),
        ];
        for f in &formulas {
            let t = truth_table(f, k);
            for cell in 0..num_partitions(k) {
                let direct = f.eval(&|p| predicate_true_in_cell(p, cell, k));
                assert_eq!(t.get(cell), direct, "formula {:?} cell {}", f, cell);
            }
        }
    }
}
