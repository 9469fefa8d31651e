//! Core program representation: predicate symbols, boolean property formulas,
//! probability intervals, context clauses, empirical clauses, and the partition
//! coordinate system everything else is expressed in.
//!
//! With `k` declared predicates the domain of any interpretation splits into
//! `2^k` partitions, one per truth assignment to the predicates. Partitions
//! are numbered `1..=2^k` in descending binary value of the assignment with
//! the *first-declared* predicate as the most significant bit, so partition 1
//! is "all predicates true" and partition `2^k` is "all false". Internally a
//! partition is addressed by its 0-based *cell* index `c = index - 1`;
//! [`predicate_true_in_cell`] is the single place the bit layout lives.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::OnceLock;

use num::rational::BigRational;
use num::{BigInt, One, Signed, Zero};

use crate::error::{Result, Violation, ViolationKind};
use crate::propositional::TruthTable;

/// Default cap on declared predicates; `2^16` partitions is already the
/// practical ceiling for the exponential algorithms downstream.
pub const MAX_PREDICATES: usize = 16;

/// Truth-assignment cell count for `k` predicates.
pub fn num_partitions(k: usize) -> usize {
    1usize << k
}

/// Whether the predicate with declaration index `pred` holds in 0-based cell
/// `cell`. Cell 0 is the all-true assignment; the first-declared predicate
/// occupies the most significant bit.
pub fn predicate_true_in_cell(pred: usize, cell: usize, k: usize) -> bool {
    debug_assert!(pred < k && cell < num_partitions(k));
    cell & (1 << (k - 1 - pred)) == 0
}

/// The set of predicates holding in `cell`, in declaration order.
pub fn cell_predicates(cell: usize, k: usize) -> Vec<usize> {
    (0..k).filter(|&p| predicate_true_in_cell(p, cell, k)).collect()
}

/// The cell whose assignment is exactly `true_set` (declaration indexes).
pub fn cell_of_predicates(true_set: &BTreeSet<usize>, k: usize) -> usize {
    let mut cell = 0usize;
    for p in 0..k {
        if !true_set.contains(&p) {
            cell |= 1 << (k - 1 - p);
        }
    }
    cell
}

/// One partition, exposed with its 1-based index for rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    /// 1-based index; the `v_i` subscript in constraint renderings.
    pub index: usize,
    /// Predicates true in this partition, by declaration index.
    pub members: Vec<usize>,
}

pub fn partitions(k: usize) -> Vec<Partition> {
    (0..num_partitions(k))
        .map(|cell| Partition {
            index: cell + 1,
            members: cell_predicates(cell, k),
        })
        .collect()
}

/// Declared predicate symbols. Declaration order is load-bearing: it fixes
/// the partition numbering and therefore every constraint rendering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicates {
    names: Vec<String>,
}

impl Predicates {
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        Predicates {
            names: names.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| s.as_str())
    }
}

/// A boolean combination of predicate symbols. `Top`/`Bot` never come from
/// program text; they appear when chaining normalizes empty clause bodies.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Formula {
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Top,
    Bot,
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// The complement, collapsing double negation and the two constants so
    /// chained formulas stay readable.
    pub fn negated(&self) -> Formula {
        match self {
            Formula::Not(inner) => (**inner).clone(),
            Formula::Top => Formula::Bot,
            Formula::Bot => Formula::Top,
            other => Formula::not(other.clone()),
        }
    }

    /// Evaluate against an explicit truth assignment, one bool per predicate.
    pub fn eval(&self, assignment: &dyn Fn(usize) -> bool) -> bool {
        match self {
            Formula::Atom(p) => assignment(*p),
            Formula::Not(f) => !f.eval(assignment),
            Formula::And(a, b) => a.eval(assignment) && b.eval(assignment),
            Formula::Or(a, b) => a.eval(assignment) || b.eval(assignment),
            Formula::Top => true,
            Formula::Bot => false,
        }
    }

    pub fn display<'a>(&'a self, preds: &'a Predicates) -> FormulaDisplay<'a> {
        FormulaDisplay { formula: self, preds }
    }
}

pub struct FormulaDisplay<'a> {
    formula: &'a Formula,
    preds: &'a Predicates,
}

impl fmt::Display for FormulaDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.formula {
            Formula::Atom(p) => write!(f, "{}", self.preds.name(*p)),
            Formula::Not(inner) => write!(f, "~{}", inner.display(self.preds)),
            Formula::And(a, b) => {
                write!(f, "({} & {})", a.display(self.preds), b.display(self.preds))
            }
            Formula::Or(a, b) => {
                write!(f, "({} | {})", a.display(self.preds), b.display(self.preds))
            }
            Formula::Top => write!(f, "true"),
            Formula::Bot => write!(f, "false"),
        }
    }
}

/// A formula together with its memoized truth-table bitmask. Two complex
/// predicates are *semantically equal* iff their bitmasks agree; most of the
/// engine compares them that way rather than structurally.
#[derive(Debug)]
pub struct ComplexPredicate {
    formula: Formula,
    canon: OnceLock<TruthTable>,
}

impl ComplexPredicate {
    pub fn new(formula: Formula) -> Self {
        ComplexPredicate {
            formula,
            canon: OnceLock::new(),
        }
    }

    pub fn atom(pred: usize) -> Self {
        ComplexPredicate::new(Formula::Atom(pred))
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    /// The canonical truth-table mask over the `2^k` cells, computed once.
    /// A `ComplexPredicate` belongs to a single program, so `k` must not vary
    /// between calls.
    pub fn canon(&self, k: usize) -> &TruthTable {
        let table = self
            .canon
            .get_or_init(|| crate::propositional::truth_table(&self.formula, k));
        assert_eq!(
            table.len_bits(),
            num_partitions(k),
            "complex predicate used under two different predicate counts"
        );
        table
    }

    pub fn semantically_equal(&self, other: &ComplexPredicate, k: usize) -> bool {
        self.canon(k) == other.canon(k)
    }

    pub fn display<'a>(&'a self, preds: &'a Predicates) -> FormulaDisplay<'a> {
        self.formula.display(preds)
    }
}

impl Clone for ComplexPredicate {
    fn clone(&self) -> Self {
        let copy = ComplexPredicate::new(self.formula.clone());
        if let Some(t) = self.canon.get() {
            let _ = copy.canon.set(t.clone());
        }
        copy
    }
}

/// Rational endpoints with `0 <= lo <= hi <= 1`, maintained by construction.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProbabilityInterval {
    lo: BigRational,
    hi: BigRational,
}

impl ProbabilityInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo.is_negative() || hi > BigRational::one() || lo > hi {
            return Err(crate::Error::invalid_one(
                ViolationKind::InvalidBounds,
                format!("interval [{}, {}] is not within [0, 1] with lo <= hi", lo, hi),
            ));
        }
        Ok(ProbabilityInterval { lo, hi })
    }

    /// Construct from integer numerator/denominator pairs; panics on invalid
    /// bounds, so only for literals known good (tests, builders).
    pub fn ratio(lo_num: i64, lo_den: i64, hi_num: i64, hi_den: i64) -> Self {
        let q = |n, d| BigRational::new(BigInt::from(n), BigInt::from(d));
        ProbabilityInterval::new(q(lo_num, lo_den), q(hi_num, hi_den)).unwrap()
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn contains(&self, q: &BigRational) -> bool {
        &self.lo <= q && q <= &self.hi
    }

    /// The whole unit range (`[0, 1]`), i.e. no information.
    pub fn is_vacuous(&self) -> bool {
        self.lo.is_zero() && self.hi.is_one()
    }

    /// Degenerate certainty (`[0,0]` or `[1,1]`), forbidden on empirical
    /// clauses because the context already expresses certainty.
    pub fn is_degenerate_certainty(&self) -> bool {
        (self.lo.is_zero() && self.hi.is_zero()) || (self.lo.is_one() && self.hi.is_one())
    }

    /// `None` when the intersection is empty.
    pub fn intersect(&self, other: &ProbabilityInterval) -> Option<ProbabilityInterval> {
        let lo = self.lo.clone().max(other.lo.clone());
        let hi = self.hi.clone().min(other.hi.clone());
        (lo <= hi).then(|| ProbabilityInterval { lo, hi })
    }

    /// `other` lies within `self` (so `self` carries no extra information).
    pub fn contains_interval(&self, other: &ProbabilityInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Exact human rendering of a rational: a terminating decimal when the
/// denominator divides a power of ten (`9/20` prints `0.45`), the fraction
/// itself otherwise (`1/3` prints `1/3`).
pub fn display_rational(q: &BigRational) -> String {
    let q = q.reduced();
    let denom = q.denom();
    let mut d = denom.clone();
    let mut twos = 0u32;
    let mut fives = 0u32;
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", q.numer(), denom);
    }
    let digits = twos.max(fives);
    let scaled: BigInt = q.numer() * num::pow(BigInt::from(10), digits as usize) / denom;
    let negative = scaled.is_negative();
    let abs = scaled.abs().to_string();
    let abs = format!("{:0>width$}", abs, width = digits as usize + 1);
    let split = abs.len() - digits as usize;
    let (int_part, frac_part) = abs.split_at(split);
    let frac_part = frac_part.trim_end_matches('0');
    let sign = if negative { "-" } else { "" };
    if frac_part.is_empty() {
        format!("{}{}", sign, int_part)
    } else {
        format!("{}{}.{}", sign, int_part, frac_part)
    }
}

impl fmt::Display for ProbabilityInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            display_rational(&self.lo),
            display_rational(&self.hi)
        )
    }
}

/// A signed predicate applied to a constant: `~Female(joe)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundLiteral {
    pub negated: bool,
    pub predicate: usize,
    pub constant: String,
}

/// A signed predicate applied to the clause variable: `~White(X)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RuleLiteral {
    pub negated: bool,
    pub predicate: usize,
}

impl RuleLiteral {
    pub fn pos(predicate: usize) -> Self {
        RuleLiteral { negated: false, predicate }
    }

    pub fn neg(predicate: usize) -> Self {
        RuleLiteral { negated: true, predicate }
    }

    pub fn formula(&self) -> Formula {
        let atom = Formula::Atom(self.predicate);
        if self.negated {
            Formula::not(atom)
        } else {
            atom
        }
    }
}

/// Fully ground context clause: `K0 :- K1, ..., Kn` over constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundClause {
    pub head: GroundLiteral,
    pub body: Vec<GroundLiteral>,
}

/// Single-variable context rule: `L0(X) :- L1(X), ..., Ln(X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnaryRule {
    pub head: RuleLiteral,
    pub body: Vec<RuleLiteral>,
}

/// Clauses mixing the variable with constants are not representable; the
/// parser rejects them during lowering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContextClause {
    Ground(GroundClause),
    Rule(UnaryRule),
}

/// `[lo, hi] head(X) :- body_1(X), ..., body_n(X)`. An empty body asserts an
/// unconditional proportion over the whole domain.
#[derive(Debug, Clone)]
pub struct EmpiricalClause {
    pub interval: ProbabilityInterval,
    pub head: ComplexPredicate,
    pub body: Vec<ComplexPredicate>,
}

impl EmpiricalClause {
    /// Cells satisfying every body member; the full mask for an empty body.
    pub fn body_canon(&self, k: usize) -> TruthTable {
        crate::propositional::satisfying_partitions(&self.body, k)
    }

    /// Statement form without the trailing period:
    /// `[0.4, 0.45] Female(X) :- Monk_seal(X)`.
    pub fn display(&self, preds: &Predicates) -> String {
        let mut s = format!("{} {}(X)", self.interval, self.head.display(preds));
        if !self.body.is_empty() {
            let body: Vec<String> = self
                .body
                .iter()
                .map(|f| format!("{}(X)", f.display(preds)))
                .collect();
            s.push_str(" :- ");
            s.push_str(&body.join(", "));
        }
        s
    }
}

impl GroundLiteral {
    pub fn display(&self, preds: &Predicates) -> String {
        format!(
            "{}{}({})",
            if self.negated { "~" } else { "" },
            preds.name(self.predicate),
            self.constant
        )
    }
}

impl RuleLiteral {
    pub fn display(&self, preds: &Predicates) -> String {
        format!(
            "{}{}(X)",
            if self.negated { "~" } else { "" },
            preds.name(self.predicate)
        )
    }
}

impl GroundClause {
    pub fn display(&self, preds: &Predicates) -> String {
        clause_text(
            self.head.display(preds),
            self.body.iter().map(|l| l.display(preds)).collect(),
        )
    }
}

impl UnaryRule {
    pub fn display(&self, preds: &Predicates) -> String {
        clause_text(
            self.head.display(preds),
            self.body.iter().map(|l| l.display(preds)).collect(),
        )
    }
}

impl ContextClause {
    pub fn display(&self, preds: &Predicates) -> String {
        match self {
            ContextClause::Ground(g) => g.display(preds),
            ContextClause::Rule(r) => r.display(preds),
        }
    }
}

fn clause_text(head: String, body: Vec<String>) -> String {
    if body.is_empty() {
        head
    } else {
        format!("{} :- {}", head, body.join(", "))
    }
}

/// A complete program: context plus empirical clauses over one symbol table.
#[derive(Debug, Clone)]
pub struct EmpiricalProgram {
    pub predicates: Predicates,
    /// Constants appearing in ground context clauses, sorted.
    pub constants: BTreeSet<String>,
    pub context: Vec<ContextClause>,
    pub empirical: Vec<EmpiricalClause>,
}

impl EmpiricalProgram {
    pub fn new(
        predicates: Predicates,
        context: Vec<ContextClause>,
        empirical: Vec<EmpiricalClause>,
    ) -> Self {
        let mut constants = BTreeSet::new();
        for clause in &context {
            if let ContextClause::Ground(g) = clause {
                constants.insert(g.head.constant.clone());
                for lit in &g.body {
                    constants.insert(lit.constant.clone());
                }
            }
        }
        EmpiricalProgram {
            predicates,
            constants,
            context,
            empirical,
        }
    }

    pub fn k(&self) -> usize {
        self.predicates.len()
    }
}

/// How ground models constrain the linear systems during consistency checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Ground models are taken as enumerated and each predicate contributes
    /// per-predicate lower bounds on partition counts.
    Paper,
    /// Ground models must additionally let every constant satisfy the unary
    /// rules, and each constant's full truth assignment (not just each
    /// predicate separately) bounds the counts. Catches inconsistencies the
    /// per-predicate bounds miss; the default.
    #[default]
    Strict,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Paper => write!(f, "paper"),
            Mode::Strict => write!(f, "strict"),
        }
    }
}

/// Check every structural invariant expressible on a constructed program.
/// Returns all violations rather than the first.
pub fn validate(ep: &EmpiricalProgram) -> Vec<Violation> {
    validate_with_limit(ep, MAX_PREDICATES)
}

pub fn validate_with_limit(ep: &EmpiricalProgram, max_predicates: usize) -> Vec<Violation> {
    let mut out = Vec::new();
    let k = ep.predicates.len();

    if k > max_predicates {
        out.push(Violation {
            location: None,
            kind: ViolationKind::PredicateLimit,
            message: format!(
                "{} predicates declared; the partition table is capped at 2^{} (limit {})",
                k, max_predicates, max_predicates
            ),
        });
    }

    let mut seen = BTreeSet::new();
    for name in ep.predicates.iter() {
        if !seen.insert(name.to_string()) {
            out.push(Violation {
                location: None,
                kind: ViolationKind::DuplicatePredicate,
                message: format!("predicate {} declared more than once", name),
            });
        }
    }

    let check_pred = |p: usize, out: &mut Vec<Violation>| {
        if p >= k {
            out.push(Violation {
                location: None,
                kind: ViolationKind::UndeclaredPredicate,
                message: format!("predicate index {} out of range ({} declared)", p, k),
            });
        }
    };

    for clause in &ep.context {
        match clause {
            ContextClause::Ground(g) => {
                check_pred(g.head.predicate, &mut out);
                for lit in &g.body {
                    check_pred(lit.predicate, &mut out);
                }
            }
            ContextClause::Rule(r) => {
                check_pred(r.head.predicate, &mut out);
                for lit in &r.body {
                    check_pred(lit.predicate, &mut out);
                }
            }
        }
    }

    for clause in &ep.empirical {
        let mut preds_in = Vec::new();
        collect_atoms(clause.head.formula(), &mut preds_in);
        for f in &clause.body {
            collect_atoms(f.formula(), &mut preds_in);
        }
        for p in preds_in {
            check_pred(p, &mut out);
        }
        if clause.interval.is_degenerate_certainty() {
            out.push(Violation {
                location: None,
                kind: ViolationKind::ForbiddenInterval,
                message: format!(
                    "empirical interval [{}, {}] expresses certainty; state it in the context instead",
                    clause.interval.lo(),
                    clause.interval.hi()
                ),
            });
        }
    }

    out
}

fn collect_atoms(f: &Formula, out: &mut Vec<usize>) {
    match f {
        Formula::Atom(p) => out.push(*p),
        Formula::Not(inner) => collect_atoms(inner, out),
        Formula::And(a, b) | Formula::Or(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
        Formula::Top | Formula::Bot => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_order_two_predicates() {
        // Declaration order (Monk_seal, Female): partition 1 is (1,1),
        // 2 is (1,0), 3 is (0,1), 4 is (0,0).
        let k = 2;
        let expect = [(true, true), (true, false), (false, true), (false, false)];
        for (cell, &(m, f)) in expect.iter().enumerate() {
            assert_eq!(predicate_true_in_cell(0, cell, k), m, "cell {}", cell);
            assert_eq!(predicate_true_in_cell(1, cell, k), f, "cell {}", cell);
        }
    }

    #[test]
    fn cell_roundtrip() {
        let k = 3;
        for cell in 0..num_partitions(k) {
            let members: BTreeSet<usize> = cell_predicates(cell, k).into_iter().collect();
            assert_eq!(cell_of_predicates(&members, k), cell);
        }
    }

    #[test]
    fn partitions_are_one_indexed() {
        let parts = partitions(1);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].index, 1);
        assert_eq!(parts[0].members, vec![0]);
        assert_eq!(parts[1].members, Vec::<usize>::new());
    }

    #[test]
    fn interval_construction_rejects_bad_bounds() {
        let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
        assert!(ProbabilityInterval::new(q(1, 2), q(1, 4)).is_err());
        assert!(ProbabilityInterval::new(q(-1, 2), q(1, 2)).is_err());
        assert!(ProbabilityInterval::new(q(1, 2), q(3, 2)).is_err());
        assert!(ProbabilityInterval::new(q(2, 5), q(9, 20)).is_ok());
    }

    #[test]
    fn interval_intersection() {
        let a = ProbabilityInterval::ratio(0, 1, 1, 10);
        let b = ProbabilityInterval::ratio(0, 1, 19, 20);
        let c = a.intersect(&b).unwrap();
        assert_eq!(c, ProbabilityInterval::ratio(0, 1, 1, 10));
        let d = ProbabilityInterval::ratio(1, 2, 1, 1);
        assert!(a.intersect(&d).is_none());
    }

    fn elephant_program() -> EmpiricalProgram {
        // Royal elephants are rarely grey, elephants mostly are; royal
        // elephants are elephants, and non-white things are grey.
        let preds = Predicates::new(["Grey", "Royal_elephant", "Elephant", "White"]);
        let grey = 0;
        let royal = 1;
        let elephant = 2;
        let white = 3;
        let context = vec![
            ContextClause::Rule(UnaryRule {
                head: RuleLiteral::pos(elephant),
                body: vec![RuleLiteral::pos(royal)],
            }),
            ContextClause::Rule(UnaryRule {
                head: RuleLiteral::pos(grey),
                body: vec![RuleLiteral::neg(white)],
            }),
            ContextClause::Ground(GroundClause {
                head: GroundLiteral {
                    negated: false,
                    predicate: royal,
                    constant: "clyde".into(),
                },
                body: vec![],
            }),
            ContextClause::Ground(GroundClause {
                head: GroundLiteral {
                    negated: false,
                    predicate: elephant,
                    constant: "jill".into(),
                },
                body: vec![],
            }),
        ];
        let empirical = vec![
            EmpiricalClause {
                interval: ProbabilityInterval::ratio(0, 1, 1, 10),
                head: ComplexPredicate::atom(grey),
                body: vec![ComplexPredicate::atom(royal)],
            },
            EmpiricalClause {
                interval: ProbabilityInterval::ratio(9, 10, 19, 20),
                head: ComplexPredicate::atom(grey),
                body: vec![ComplexPredicate::atom(elephant)],
            },
            EmpiricalClause {
                interval: ProbabilityInterval::ratio(1, 10, 1, 5),
                head: ComplexPredicate::atom(elephant),
                body: vec![ComplexPredicate::atom(grey)],
            },
        ];
        EmpiricalProgram::new(preds, context, empirical)
    }

    #[test]
    fn elephant_program_is_valid() {
        let ep = elephant_program();
        assert_eq!(validate(&ep), vec![]);
        assert_eq!(
            ep.constants.iter().cloned().collect::<Vec<_>>(),
            vec!["clyde".to_string(), "jill".to_string()]
        );
    }

    #[test]
    fn degenerate_certainty_interval_is_flagged() {
        let preds = Predicates::new(["A"]);
        let ep = EmpiricalProgram::new(
            preds,
            vec![],
            vec![EmpiricalClause {
                interval: ProbabilityInterval::ratio(1, 1, 1, 1),
                head: ComplexPredicate::atom(0),
                body: vec![],
            }],
        );
        let violations = validate(&ep);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].kind, ViolationKind::ForbiddenInterval);
    }

    #[test]
    fn predicate_cap_is_enforced() {
        let names: Vec<String> = (0..17).map(|i| format!("P{}", i)).collect();
        let ep = EmpiricalProgram::new(Predicates::new(names), vec![], vec![]);
        let violations = validate(&ep);
        assert!(violations.iter().any(|v| v.kind == ViolationKind::PredicateLimit));
    }

    #[test]
    fn formula_display_round_trips_shape() {
        let preds = Predicates::new(["Grey", "White"]);
        let f = Formula::and(Formula::Atom(0), Formula::not(Formula::Atom(1)));
        assert_eq!(format!("{}", f.display(&preds)), "(Grey & ~White)");
    }
}
