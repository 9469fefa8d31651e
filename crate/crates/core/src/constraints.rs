//! Translation of empirical clauses, unary rules, and ground models into
//! exact linear constraints over the partition-count variables `v_1..v_{2^k}`
//! (`v_i` = number of domain elements in partition `i`).
//!
//! An empirical clause `[c1, c2] F(X) :- G(X)` says the proportion of G's
//! that are F lies in `[c1, c2]`; over counts that is the pair
//! `c1 * sum(G) <= sum(F and G)` and `sum(F and G) <= c2 * sum(G)`, which is
//! already linear and vacuously true when no element satisfies G.

use std::collections::BTreeMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num::rational::BigRational;
use num::{One, Signed, Zero};

use crate::herbrand::{signature_groups, HerbrandModel};
use crate::model::{
    display_rational, num_partitions, EmpiricalClause, Mode, Predicates, UnaryRule,
};
use crate::propositional::TruthTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Le => write!(f, "<="),
            Relation::Ge => write!(f, ">="),
            Relation::Eq => write!(f, "="),
        }
    }
}

/// One linear row over the partition variables. Keys are 1-based partition
/// indexes; zero coefficients are dropped on construction. Equality and
/// hashing ignore the provenance tag, so sets of constraints compare by
/// mathematical content.
#[derive(Debug, Clone)]
pub struct LinearConstraint {
    coeffs: BTreeMap<usize, BigRational>,
    pub relation: Relation,
    pub rhs: BigRational,
    /// Human-readable provenance, e.g. the clause this row encodes.
    pub tag: String,
}

impl LinearConstraint {
    pub fn new(
        coeffs: BTreeMap<usize, BigRational>,
        relation: Relation,
        rhs: BigRational,
        tag: impl Into<String>,
    ) -> Self {
        let coeffs = coeffs.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        LinearConstraint {
            coeffs,
            relation,
            rhs,
            tag: tag.into(),
        }
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, BigRational> {
        &self.coeffs
    }

    /// Largest referenced partition index (0 when the row is empty).
    pub fn max_var(&self) -> usize {
        self.coeffs.keys().next_back().copied().unwrap_or(0)
    }

    /// Substitute an assignment (`assignment[i]` is the value of `v_{i+1}`).
    pub fn holds(&self, assignment: &[BigRational]) -> bool {
        let lhs: BigRational = self
            .coeffs
            .iter()
            .map(|(&i, q)| q * &assignment[i - 1])
            .sum();
        match self.relation {
            Relation::Le => lhs <= self.rhs,
            Relation::Ge => lhs >= self.rhs,
            Relation::Eq => lhs == self.rhs,
        }
    }

    /// `-0.6 v1 + 0.4 v2 <= 0  ; lower bound of ...`
    pub fn render(&self) -> String {
        let mut lhs = String::new();
        for (i, q) in &self.coeffs {
            if lhs.is_empty() {
                if q.is_one() {
                    lhs.push_str(&format!("v{}", i));
                } else if *q == -BigRational::one() {
                    lhs.push_str(&format!("-v{}", i));
                } else {
                    lhs.push_str(&format!("{} v{}", display_rational(q), i));
                }
            } else if q.is_negative() {
                let abs = -q.clone();
                if abs.is_one() {
                    lhs.push_str(&format!(" - v{}", i));
                } else {
                    lhs.push_str(&format!(" - {} v{}", display_rational(&abs), i));
                }
            } else if q.is_one() {
                lhs.push_str(&format!(" + v{}", i));
            } else {
                lhs.push_str(&format!(" + {} v{}", display_rational(q), i));
            }
        }
        if lhs.is_empty() {
            lhs.push('0');
        }
        let row = format!("{} {} {}", lhs, self.relation, display_rational(&self.rhs));
        if self.tag.is_empty() {
            row
        } else {
            format!("{}  ; {}", row, self.tag)
        }
    }
}

impl PartialEq for LinearConstraint {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.relation == other.relation && self.rhs == other.rhs
    }
}

impl Eq for LinearConstraint {}

impl Hash for LinearConstraint {
    fn hash<H: Hasher>(&self, state: &mut H) {
        for (i, q) in &self.coeffs {
            i.hash(state);
            q.hash(state);
        }
        self.relation.hash(state);
        self.rhs.hash(state);
    }
}

/// A bundle of rows over `v_1..v_{num_vars}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub num_vars: usize,
    pub constraints: Vec<LinearConstraint>,
}

impl ConstraintSystem {
    pub fn new(num_vars: usize) -> Self {
        ConstraintSystem {
            num_vars,
            constraints: Vec::new(),
        }
    }

    pub fn push(&mut self, c: LinearConstraint) {
        self.constraints.push(c);
    }

    pub fn satisfied_by(&self, assignment: &[BigRational]) -> bool {
        assignment.len() >= self.num_vars && self.constraints.iter().all(|c| c.holds(assignment))
    }

    pub fn satisfied_by_counts(&self, counts: &[u64]) -> bool {
        let assignment: Vec<BigRational> =
            counts.iter().map(|&n| BigRational::from_integer(n.into())).collect();
        self.satisfied_by(&assignment)
    }

    /// Full dump with a self-describing partition header.
    pub fn render(&self, preds: &Predicates) -> String {
        let k = preds.len();
        let mut out = String::new();
        out.push_str(&format!(
            "; partition variables over predicates ({})\n",
            preds.iter().collect::<Vec<_>>().join(", ")
        ));
        for part in crate::model::partitions(k) {
            let desc: Vec<String> = (0..k)
                .map(|p| {
                    format!(
                        "{}={}",
                        preds.name(p),
                        if part.members.contains(&p) { 1 } else { 0 }
                    )
                })
                .collect();
            out.push_str(&format!(";   v{}: {}\n", part.index, desc.join(" ")));
        }
        for c in &self.constraints {
            out.push_str(&c.render());
            out.push('\n');
        }
        out
    }
}

fn sum_coeffs(cells: &TruthTable, q: &BigRational) -> BTreeMap<usize, BigRational> {
    cells.ones().map(|c| (c + 1, q.clone())).collect()
}

fn add_into(acc: &mut BTreeMap<usize, BigRational>, cells: &TruthTable, q: &BigRational) {
    for c in cells.ones() {
        let entry = acc.entry(c + 1).or_insert_with(BigRational::zero);
        *entry += q;
    }
}

/// The two rows for one empirical clause: lower bound
/// `c1 * sum(body) - sum(head and body) <= 0` and upper bound
/// `sum(head and body) - c2 * sum(body) <= 0`.
pub fn clause_constraints(cl: &EmpiricalClause, preds: &Predicates) -> [LinearConstraint; 2] {
    let k = preds.len();
    let body = cl.body_canon(k);
    let head_and_body = body.and(cl.head.canon(k));
    let display = cl.display(preds);

    let mut lower = sum_coeffs(&body, cl.interval.lo());
    add_into(&mut lower, &head_and_body, &-BigRational::one());
    let lower = LinearConstraint::new(
        lower,
        Relation::Le,
        BigRational::zero(),
        format!("lower bound of {}", display),
    );

    let mut upper = sum_coeffs(&head_and_body, &BigRational::one());
    add_into(&mut upper, &body, &-cl.interval.hi().clone());
    let upper = LinearConstraint::new(
        upper,
        Relation::Le,
        BigRational::zero(),
        format!("upper bound of {}", display),
    );

    [lower, upper]
}

/// Rows for a whole empirical side: both bounds per clause plus domain
/// nonemptiness (`sum of all v_i >= 1`).
pub fn empirical_system(clauses: &[EmpiricalClause], preds: &Predicates) -> ConstraintSystem {
    let k = preds.len();
    let n = num_partitions(k);
    let mut sys = ConstraintSystem::new(n);
    for cl in clauses {
        let [lower, upper] = clause_constraints(cl, preds);
        sys.push(lower);
        sys.push(upper);
    }
    sys.push(nonemptiness(n));
    sys
}

pub fn nonemptiness(num_vars: usize) -> LinearConstraint {
    let coeffs = (1..=num_vars).map(|i| (i, BigRational::one())).collect();
    LinearConstraint::new(coeffs, Relation::Ge, BigRational::one(), "nonempty domain")
}

/// A unary rule bans partitions where its body holds but its head fails:
/// the sum of their counts must be zero.
pub fn rule_equality(rule: &UnaryRule, preds: &Predicates) -> LinearConstraint {
    let k = preds.len();
    let violating = crate::propositional::rule_mask(rule, k).complement();
    LinearConstraint::new(
        sum_coeffs(&violating, &BigRational::one()),
        Relation::Eq,
        BigRational::zero(),
        format!("rule {}", rule.display(preds)),
    )
}

/// How a ground model bounds the counts from below.
///
/// Paper mode: for each predicate `A` of the ground side, at least as many
/// elements satisfy `A` as there are constants with `A(c)` true, and dually
/// for `~A`; bounds with count zero are vacuous and omitted. Strict mode:
/// each constant's *joint* signature must be realized, so for every distinct
/// signature the cells compatible with it hold at least as many elements as
/// constants carrying it.
pub fn model_constraints(
    model: &HerbrandModel,
    mode: Mode,
    preds: &Predicates,
) -> Vec<LinearConstraint> {
    let k = preds.len();
    let mut out = Vec::new();
    match mode {
        Mode::Paper => {
            let constants = model.constants();
            for pred in model.base_predicates() {
                let positive = constants
                    .iter()
                    .filter(|c| {
                        model.holds(&crate::herbrand::GroundAtom {
                            predicate: pred,
                            constant: c.to_string(),
                        })
                    })
                    .count();
                let negative = constants.len() - positive;
                let cells = TruthTable::atom(pred, k);
                if positive > 0 {
                    out.push(LinearConstraint::new(
                        sum_coeffs(&cells, &BigRational::one()),
                        Relation::Ge,
                        BigRational::from_integer(positive.into()),
                        format!("{} constants satisfy {}", positive, preds.name(pred)),
                    ));
                }
                if negative > 0 {
                    out.push(LinearConstraint::new(
                        sum_coeffs(&cells.complement(), &BigRational::one()),
                        Relation::Ge,
                        BigRational::from_integer(negative.into()),
                        format!("{} constants satisfy ~{}", negative, preds.name(pred)),
                    ));
                }
            }
        }
        Mode::Strict => {
            for (sig, multiplicity) in signature_groups(model) {
                let cells = sig.compatible_cells(k);
                let desc: Vec<String> = sig
                    .assignment
                    .iter()
                    .map(|(&p, &v)| format!("{}={}", preds.name(p), if v { 1 } else { 0 }))
                    .collect();
                out.push(LinearConstraint::new(
                    sum_coeffs(&cells, &BigRational::one()),
                    Relation::Ge,
                    BigRational::from_integer(multiplicity.into()),
                    format!("{} constants with signature {}", multiplicity, desc.join(" ")),
                ));
            }
        }
    }
    out
}
