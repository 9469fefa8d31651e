//! Program compilation: the entailed-implication set over a formula scope,
//! and the chaining closure that saturates the empirical clauses under the
//! five derivation rules until nothing new appears.
//!
//! Chaining is literal about its derivation rules but not about hoarding
//! their output: a derived clause whose interval contains another stored
//! clause for the same (head, body) pair adds no information — every query
//! intersection it could influence is already pinned tighter by the
//! narrower clause, and every downstream derivation from it is wider than
//! the one from the narrower clause (all five rules are monotone in their
//! input intervals). Such clauses are dropped at insertion, which is what
//! keeps the closure small enough to be recomputed freely; the original
//! program clauses are always retained verbatim.

use std::collections::{BTreeMap, BTreeSet};

use num::rational::BigRational;
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::model::{
    validate, ComplexPredicate, ContextClause, EmpiricalClause, EmpiricalProgram, Formula,
    ProbabilityInterval, UnaryRule,
};
use crate::propositional::{rules_mask, TruthTable};

/// All entailed unconditional implications `F_i(X) <- F_j(X)` over a finite
/// formula scope, decided against the context's rules. Pairs are stored by
/// scope index; formulas are deduplicated by canonical truth table, keeping
/// the first representative seen.
#[derive(Debug, Clone)]
pub struct ImplicationSet {
    k: usize,
    scope: Vec<ComplexPredicate>,
    index: BTreeMap<TruthTable, usize>,
    pairs: BTreeSet<(usize, usize)>,
}

impl ImplicationSet {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scope(&self) -> &[ComplexPredicate] {
        &self.scope
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The scope's formula for a canonical class, if the class is in scope.
    pub fn representative(&self, canon: &TruthTable) -> Option<&ComplexPredicate> {
        self.index.get(canon).map(|&i| &self.scope[i])
    }

    /// Is `consequent <- antecedent` an entailed pair? False when either
    /// formula is outside the scope.
    pub fn entails_pair(&self, consequent: &ComplexPredicate, antecedent: &ComplexPredicate) -> bool {
        match (
            self.index.get(consequent.canon(self.k)),
            self.index.get(antecedent.canon(self.k)),
        ) {
            (Some(&c), Some(&a)) => self.pairs.contains(&(c, a)),
            _ => false,
        }
    }

    /// All pairs as (consequent, antecedent), in deterministic order.
    pub fn pairs(&self) -> impl Iterator<Item = (&ComplexPredicate, &ComplexPredicate)> {
        self.pairs.iter().map(|&(c, a)| (&self.scope[c], &self.scope[a]))
    }
}

/// Build the implication set for a context over the given scope: the pair
/// `(F_1, F_2)` is included exactly when the context's rules propositionally
/// force `F_2 -> F_1`. Reflexive pairs fall out for free, and an empty rule
/// set leaves pure propositional subsumption (so `top <- F` whenever `top`
/// is in scope).
pub fn compute_impl(
    context: &[ContextClause],
    scope: impl IntoIterator<Item = ComplexPredicate>,
    k: usize,
) -> ImplicationSet {
    let rules: Vec<&UnaryRule> = context
        .iter()
        .filter_map(|c| match c {
            ContextClause::Rule(r) => Some(r),
            ContextClause::Ground(_) => None,
        })
        .collect();
    let mask = rules_mask(&rules, k);

    let mut set = ImplicationSet {
        k,
        scope: Vec::new(),
        index: BTreeMap::new(),
        pairs: BTreeSet::new(),
    };
    for f in scope {
        let canon = f.canon(k).clone();
        set.index.entry(canon).or_insert_with(|| {
            set.scope.push(f);
            set.scope.len() - 1
        });
    }
    let restricted: Vec<TruthTable> = set
        .scope
        .iter()
        .map(|f| mask.and(f.canon(k)))
        .collect();
    for (a, hyp) in restricted.iter().enumerate() {
        for (c, f) in set.scope.iter().enumerate() {
            if hyp.is_subset_of(f.canon(k)) {
                set.pairs.insert((c, a));
            }
        }
    }
    set
}

fn clamp_interval(lo: BigRational, hi: BigRational) -> ProbabilityInterval {
    ProbabilityInterval::new(lo, hi)
        .expect("chained intervals stay ordered inside [0, 1] by construction")
}

fn is_excluded(lo: &BigRational, hi: &BigRational) -> bool {
    (lo.is_zero() && hi.is_zero()) || (lo.is_one() && hi.is_one())
}

/// One round of the five chaining rules over a clause set, exactly as
/// specified, with set semantics (duplicates collapsed) and the forbidden
/// point intervals dropped:
///
/// 1. an implication `F_1 <- F_2` lifts `[c_1, c_2] F_2 <- F_3` to
///    `[c_1, 1] F_1 <- F_3`;
/// 2. any clause yields its complemented head with the reflected interval
///    `[1 - c_2, 1 - c_1]`;
/// 3. two clauses with one body and semantically distinct heads yield the
///    conjunctive head with `[max(0, c_1 + d_1 - 1), min(c_2, d_2)]`;
/// 4. likewise the disjunctive head with `[max(c_1, d_1), min(1, c_2 + d_2)]`;
/// 5. two clauses yield `[0, min(1, c_2 + d_2)] (F_1 & F_3) <- (F_2 | F_4)`
///    when `F_1 != F_4`, `F_2 != F_4`, and `F_2 != F_3` (all semantic).
///
/// Bodies are expected to be normalized to a single formula (`true` for the
/// null body); heads and bodies of products are rehomed to the scope's
/// representative formula for their class when one exists.
pub fn chain_step(t: &[EmpiricalClause], impls: &ImplicationSet) -> Vec<EmpiricalClause> {
    let k = impls.k();
    let bodies: Vec<ComplexPredicate> = t
        .iter()
        .map(|cl| {
            debug_assert!(cl.body.len() <= 1, "bodies should be normalized before chaining");
            cl.body
                .first()
                .cloned()
                .unwrap_or_else(|| ComplexPredicate::new(Formula::Top))
        })
        .collect();

    let mut out: Vec<EmpiricalClause> = Vec::new();
    let mut seen: BTreeSet<(TruthTable, TruthTable, BigRational, BigRational)> = BTreeSet::new();
    let mut push = |head: ComplexPredicate, body: ComplexPredicate, lo: BigRational, hi: BigRational| {
        if is_excluded(&lo, &hi) {
            return;
        }
        let head = impls
            .representative(head.canon(k))
            .cloned()
            .unwrap_or(head);
        let body = impls
            .representative(body.canon(k))
            .cloned()
            .unwrap_or(body);
        let key = (head.canon(k).clone(), body.canon(k).clone(), lo.clone(), hi.clone());
        if seen.insert(key) {
            out.push(EmpiricalClause {
                interval: clamp_interval(lo, hi),
                head,
                body: vec![body],
            });
        }
    };

    // Rule 1: index clauses by head class, then walk the implication pairs.
    let mut by_head: BTreeMap<TruthTable, Vec<usize>> = BTreeMap::new();
    for (i, cl) in t.iter().enumerate() {
        by_head.entry(cl.head.canon(k).clone()).or_default().push(i);
    }
    for (consequent, antecedent) in impls.pairs() {
        if let Some(indexes) = by_head.get(antecedent.canon(k)) {
            for &i in indexes {
                push(
                    consequent.clone(),
                    bodies[i].clone(),
                    t[i].interval.lo().clone(),
                    BigRational::one(),
                );
            }
        }
    }

    // Rule 2: complemented heads.
    for (i, cl) in t.iter().enumerate() {
        push(
            ComplexPredicate::new(cl.head.formula().negated()),
            bodies[i].clone(),
            BigRational::one() - cl.interval.hi(),
            BigRational::one() - cl.interval.lo(),
        );
    }

    // Rules 3 and 4: unordered clause pairs sharing a body class.
    let mut by_body: BTreeMap<TruthTable, Vec<usize>> = BTreeMap::new();
    for (i, body) in bodies.iter().enumerate() {
        by_body.entry(body.canon(k).clone()).or_default().push(i);
    }
    for group in by_body.values() {
        for (pos, &i) in group.iter().enumerate() {
            for &j in &group[pos + 1..] {
                if t[i].head.semantically_equal(&t[j].head, k) {
                    continue;
                }
                let (ci, cj) = (&t[i].interval, &t[j].interval);
                push(
                    ComplexPredicate::new(Formula::and(
                        t[i].head.formula().clone(),
                        t[j].head.formula().clone(),
                    )),
                    bodies[i].clone(),
                    (ci.lo() + cj.lo() - BigRational::one()).max(BigRational::zero()),
                    ci.hi().clone().min(cj.hi().clone()),
                );
                push(
                    ComplexPredicate::new(Formula::or(
                        t[i].head.formula().clone(),
                        t[j].head.formula().clone(),
                    )),
                    bodies[i].clone(),
                    ci.lo().clone().max(cj.lo().clone()),
                    (ci.hi() + cj.hi()).min(BigRational::one()),
                );
            }
        }
    }

    // Rule 5: ordered clause pairs under the distinctness side conditions.
    for (i, a) in t.iter().enumerate() {
        for (j, b) in t.iter().enumerate() {
            if i == j {
                continue;
            }
            let head_a_vs_body_b = a.head.semantically_equal(&bodies[j], k);
            let body_a_vs_body_b = bodies[i].semantically_equal(&bodies[j], k);
            let body_a_vs_head_b = bodies[i].semantically_equal(&b.head, k);
            if head_a_vs_body_b || body_a_vs_body_b || body_a_vs_head_b {
                continue;
            }
            push(
                ComplexPredicate::new(Formula::and(
                    a.head.formula().clone(),
                    b.head.formula().clone(),
                )),
                ComplexPredicate::new(Formula::or(
                    bodies[i].formula().clone(),
                    bodies[j].formula().clone(),
                )),
                BigRational::zero(),
                (a.interval.hi() + b.interval.hi()).min(BigRational::one()),
            );
        }
    }

    out
}

#[derive(Debug, Clone, Copy)]
pub struct CompileOptions {
    /// Chaining rounds before giving up on a fixpoint.
    pub max_iterations: usize,
    /// Stored-clause ceiling; crossing it aborts with an error rather than
    /// silently truncating the closure.
    pub max_clauses: usize,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            max_iterations: 64,
            max_clauses: 50_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompiledProgram {
    pub source: EmpiricalProgram,
    /// The saturated clause set, bodies normalized to one formula each.
    pub clauses: Vec<EmpiricalClause>,
    /// Implications over the final scope; also serves query clustering.
    pub implications: ImplicationSet,
    /// Stored-clause count after seeding and after each chaining round.
    pub iteration_sizes: Vec<usize>,
}

impl CompiledProgram {
    /// Stored clauses for one head class, in deterministic order.
    pub fn clauses_with_head(&self, head: &ComplexPredicate) -> Vec<&EmpiricalClause> {
        let k = self.source.k();
        self.clauses
            .iter()
            .filter(|cl| cl.head.semantically_equal(head, k))
            .collect()
    }
}

struct Stored {
    clause: EmpiricalClause,
    source: bool,
}

struct Closure {
    k: usize,
    store: BTreeMap<(TruthTable, TruthTable), Vec<Stored>>,
    len: usize,
}

impl Closure {
    fn key_of(&self, cl: &EmpiricalClause) -> (TruthTable, TruthTable) {
        (cl.head.canon(self.k).clone(), cl.body_canon(self.k))
    }

    /// Insert keeping the narrow-interval frontier: reject a derived clause
    /// some stored interval already tightens, evict derived clauses the new
    /// one tightens. Source clauses bypass the frontier in both directions —
    /// they are stored verbatim (minus exact duplicates) and never evicted.
    /// Returns whether anything changed.
    fn insert(&mut self, cl: EmpiricalClause, source: bool) -> bool {
        let key = self.key_of(&cl);
        let entries = self.store.entry(key).or_default();
        let blocked = if source {
            entries.iter().any(|e| e.clause.interval == cl.interval)
        } else {
            entries
                .iter()
                .any(|e| cl.interval.contains_interval(&e.clause.interval))
        };
        if blocked {
            return false;
        }
        let before = entries.len();
        entries.retain(|e| e.source || !e.clause.interval.contains_interval(&cl.interval));
        self.len -= before - entries.len();
        entries.push(Stored { clause: cl, source });
        self.len += 1;
        true
    }

    fn clauses(&self) -> Vec<EmpiricalClause> {
        let mut out: Vec<EmpiricalClause> = Vec::with_capacity(self.len);
        for entries in self.store.values() {
            let mut group: Vec<&EmpiricalClause> = entries.iter().map(|e| &e.clause).collect();
            group.sort_by(|a, b| {
                (a.interval.lo(), a.interval.hi()).cmp(&(b.interval.lo(), b.interval.hi()))
            });
            out.extend(group.into_iter().cloned());
        }
        out
    }
}

fn normalize_body(cl: &EmpiricalClause) -> EmpiricalClause {
    let formula = match cl.body.len() {
        0 => Formula::Top,
        1 => cl.body[0].formula().clone(),
        _ => cl
            .body
            .iter()
            .skip(1)
            .fold(cl.body[0].formula().clone(), |acc, f| {
                Formula::and(acc, f.formula().clone())
            }),
    };
    EmpiricalClause {
        interval: cl.interval.clone(),
        head: cl.head.clone(),
        body: vec![ComplexPredicate::new(formula)],
    }
}

pub fn compile(program: &EmpiricalProgram) -> Result<CompiledProgram> {
    compile_with(program, CompileOptions::default())
}

/// The formula universe for a program: everything it mentions (rule
/// literals, clause heads, normalized bodies) closed under complement, one
/// class per canonical truth table, first spelling wins.
fn build_universe(
    program: &EmpiricalProgram,
    clauses: &[EmpiricalClause],
    k: usize,
) -> BTreeMap<TruthTable, ComplexPredicate> {
    let mut universe: BTreeMap<TruthTable, ComplexPredicate> = BTreeMap::new();
    let admit = |f: ComplexPredicate, universe: &mut BTreeMap<TruthTable, ComplexPredicate>| {
        universe.entry(f.canon(k).clone()).or_insert(f);
    };
    for clause in &program.context {
        if let ContextClause::Rule(rule) = clause {
            admit(ComplexPredicate::new(rule.head.formula()), &mut universe);
            for lit in &rule.body {
                admit(ComplexPredicate::new(lit.formula()), &mut universe);
            }
        }
    }
    for cl in clauses {
        admit(cl.head.clone(), &mut universe);
        for f in &cl.body {
            admit(f.clone(), &mut universe);
        }
    }
    let occurring: Vec<ComplexPredicate> = universe.values().cloned().collect();
    for f in occurring {
        admit(ComplexPredicate::new(f.formula().negated()), &mut universe);
    }
    universe
}

pub fn compile_with(program: &EmpiricalProgram, options: CompileOptions) -> Result<CompiledProgram> {
    let violations = validate(program);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let k = program.k();

    // Chaining may invent formulas outside the universe (conjunctions of
    // unrelated heads, disjunctive bodies); those products are recomputable
    // but carry no stored clause — queries only ever ask about universe
    // formulas, and keeping the store inside it is what makes saturation
    // tractable.
    let normalized: Vec<EmpiricalClause> = program.empirical.iter().map(normalize_body).collect();
    let universe = build_universe(program, &normalized, k);
    let implications = compute_impl(&program.context, universe.values().cloned(), k);

    let mut closure = Closure {
        k,
        store: BTreeMap::new(),
        len: 0,
    };
    for cl in &normalized {
        let head = implications
            .representative(cl.head.canon(k))
            .expect("program formulas are in the universe")
            .clone();
        let body = implications
            .representative(&cl.body_canon(k))
            .expect("program formulas are in the universe")
            .clone();
        closure.insert(
            EmpiricalClause {
                interval: cl.interval.clone(),
                head,
                body: vec![body],
            },
            true,
        );
    }

    let mut iteration_sizes = vec![closure.len];
    let mut rounds = 0;
    loop {
        rounds += 1;
        if rounds > options.max_iterations {
            return Err(Error::CapExceeded(format!(
                "no chaining fixpoint after {} iterations",
                options.max_iterations
            )));
        }
        let current = closure.clauses();
        let mut changed = false;
        for product in chain_step(&current, &implications) {
            // chain_step rehomed universe formulas already; anything still
            // outside has no representative and is not stored. A full [0, 1]
            // interval says nothing and is dropped too.
            let in_universe = implications.representative(product.head.canon(k)).is_some()
                && implications.representative(&product.body_canon(k)).is_some();
            if !in_universe || product.interval.is_vacuous() {
                continue;
            }
            changed |= closure.insert(product, false);
            if closure.len > options.max_clauses {
                return Err(Error::CapExceeded(format!(
                    "chaining closure exceeded {} clauses",
                    options.max_clauses
                )));
            }
        }
        iteration_sizes.push(closure.len);
        if !changed {
            break;
        }
    }

    Ok(CompiledProgram {
        source: program.clone(),
        clauses: closure.clauses(),
        implications,
        iteration_sizes,
    })
}

/// Rebuild a `CompiledProgram` from a program and an externally stored
/// clause set (a deserialized artifact) without re-running the chaining
/// fixpoint. The implication set is recomputed over the union of the
/// program's universe and the stored clauses' formulas, so clustering works
/// even for artifacts trimmed or extended by hand.
pub fn assemble(program: &EmpiricalProgram, clauses: &[EmpiricalClause]) -> Result<CompiledProgram> {
    let violations = validate(program);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }
    let k = program.k();
    let mut all: Vec<EmpiricalClause> = program.empirical.iter().map(normalize_body).collect();
    let stored: Vec<EmpiricalClause> = clauses.iter().map(normalize_body).collect();
    all.extend(stored.iter().cloned());
    let universe = build_universe(program, &all, k);
    let implications = compute_impl(&program.context, universe.values().cloned(), k);

    let mut closure = Closure {
        k,
        store: BTreeMap::new(),
        len: 0,
    };
    for cl in &stored {
        let head = implications
            .representative(cl.head.canon(k))
            .expect("stored formulas are admitted to the universe")
            .clone();
        let body = implications
            .representative(&cl.body_canon(k))
            .expect("stored formulas are admitted to the universe")
            .clone();
        closure.insert(
            EmpiricalClause {
                interval: cl.interval.clone(),
                head,
                body: vec![body],
            },
            true,
        );
    }
    Ok(CompiledProgram {
        source: program.clone(),
        clauses: closure.clauses(),
        implications,
        iteration_sizes: vec![closure.len],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{GroundClause, GroundLiteral, Predicates, RuleLiteral};
    use crate::oracle::Interpretation;

    fn atom(p: usize) -> ComplexPredicate {
        ComplexPredicate::atom(p)
    }

    fn neg_atom(p: usize) -> ComplexPredicate {
        ComplexPredicate::new(Formula::not(Formula::Atom(p)))
    }

    fn clause(lo: (i64, i64), hi: (i64, i64), head: ComplexPredicate, body: ComplexPredicate) -> EmpiricalClause {
        EmpiricalClause {
            interval: ProbabilityInterval::ratio(lo.0, lo.1, hi.0, hi.1),
            head,
            body: vec![body],
        }
    }

    fn rule(head: RuleLiteral, body: Vec<RuleLiteral>) -> ContextClause {
        ContextClause::Rule(UnaryRule { head, body })
    }

    fn fact(predicate: usize, constant: &str) -> ContextClause {
        ContextClause::Ground(GroundClause {
            head: GroundLiteral {
                negated: false,
                predicate,
                constant: constant.into(),
            },
            body: vec![],
        })
    }

    /// The elephant program: royal elephants are elephants, non-white
    /// things are grey, two facts, three interval clauses over
    /// (Grey, Royal_elephant, Elephant, White).
    fn elephant_program() -> EmpiricalProgram {
        EmpiricalProgram::new(
            Predicates::new(["Grey", "Royal_elephant", "Elephant", "White"]),
            vec![
                rule(RuleLiteral::pos(2), vec![RuleLiteral::pos(1)]),
                rule(RuleLiteral::pos(0), vec![RuleLiteral::neg(3)]),
                fact(1, "clyde"),
                fact(2, "jill"),
            ],
            vec![
                clause((0, 1), (1, 10), atom(0), atom(1)),
                clause((9, 10), (19, 20), atom(0), atom(2)),
                clause((1, 10), (1, 5), atom(2), atom(0)),
            ],
        )
    }

    #[test]
    fn impl_of_the_elephant_context_contains_the_contrapositive() {
        let program = elephant_program();
        let scope = vec![
            atom(0),
            atom(1),
            atom(2),
            atom(3),
            neg_atom(0),
            neg_atom(3),
        ];
        let impls = compute_impl(&program.context, scope, 4);
        assert!(impls.entails_pair(&atom(2), &atom(1))); // Elephant <- Royal_elephant
        assert!(impls.entails_pair(&atom(0), &neg_atom(3))); // Grey <- ~White
        assert!(impls.entails_pair(&atom(3), &neg_atom(0))); // White <- ~Grey
        assert!(!impls.entails_pair(&atom(1), &atom(2)));
        assert!(impls.entails_pair(&atom(0), &atom(0)));
    }

    #[test]
    fn empty_context_over_two_atoms_gives_reflexive_pairs_only() {
        let impls = compute_impl(&[], vec![atom(0), atom(1)], 2);
        let pairs: Vec<_> = impls.pairs().collect();
        assert_eq!(pairs.len(), 2);
        assert!(impls.entails_pair(&atom(0), &atom(0)));
        assert!(impls.entails_pair(&atom(1), &atom(1)));
        assert!(!impls.entails_pair(&atom(0), &atom(1)));
    }

    #[test]
    fn mutual_rules_entail_all_four_pairs() {
        let context = vec![
            rule(RuleLiteral::pos(0), vec![RuleLiteral::pos(1)]),
            rule(RuleLiteral::pos(1), vec![RuleLiteral::pos(0)]),
        ];
        let impls = compute_impl(&context, vec![atom(0), atom(1)], 2);
        assert_eq!(impls.pairs().count(), 4);
        assert!(impls.entails_pair(&atom(0), &atom(1)));
        assert!(impls.entails_pair(&atom(1), &atom(0)));
    }

    #[test]
    fn one_step_products_of_a_single_clause() {
        // Over a negation-free scope with no rules, one clause produces
        // exactly its reflexive weakening and its complemented head.
        let t = vec![clause((9, 10), (19, 20), atom(0), atom(2))];
        let impls = compute_impl(
            &[],
            vec![atom(0), atom(2), neg_atom(0), neg_atom(2)],
            4,
        );
        let products = chain_step(&t, &impls);
        assert_eq!(products.len(), 2);
        assert_eq!(products[0].interval, ProbabilityInterval::ratio(9, 10, 1, 1));
        assert!(products[0].head.semantically_equal(&atom(0), 4));
        assert_eq!(products[1].interval, ProbabilityInterval::ratio(1, 20, 1, 10));
        assert!(products[1].head.semantically_equal(&neg_atom(0), 4));
        assert!(products[1].body[0].semantically_equal(&atom(2), 4));
    }

    #[test]
    fn rule_one_lifts_along_entailed_implications() {
        // White <- ~Grey comes from the rule Grey <- ~White; chaining lifts
        // [0.9, 1] ~Grey <- Royal_elephant to [0.9, 1] White <- Royal_elephant.
        let program = elephant_program();
        let scope = vec![atom(0), atom(1), atom(3), neg_atom(0)];
        let impls = compute_impl(&program.context, scope, 4);
        let t = vec![clause((9, 10), (1, 1), neg_atom(0), atom(1))];
        let products = chain_step(&t, &impls);
        let lifted = products.iter().find(|cl| {
            cl.head.semantically_equal(&atom(3), 4) && cl.body[0].semantically_equal(&atom(1), 4)
        });
        assert_eq!(
            lifted.expect("the contrapositive lift").interval,
            ProbabilityInterval::ratio(9, 10, 1, 1)
        );
        // And its complement arrives by rule 2 in the same round.
        let complement = products.iter().find(|cl| {
            cl.head.semantically_equal(&atom(0), 4) && cl.body[0].semantically_equal(&atom(1), 4)
        });
        assert_eq!(
            complement.expect("the reflected complement").interval,
            ProbabilityInterval::ratio(0, 1, 1, 10)
        );
    }

    #[test]
    fn conjunction_and_disjunction_intervals_are_exact() {
        let t = vec![
            clause((1, 2), (3, 4), atom(0), atom(2)),
            clause((2, 3), (5, 6), atom(1), atom(2)),
        ];
        let impls = compute_impl(&[], vec![atom(0), atom(1), atom(2)], 3);
        let products = chain_step(&t, &impls);
        let conj = ComplexPredicate::new(Formula::and(Formula::Atom(0), Formula::Atom(1)));
        let disj = ComplexPredicate::new(Formula::or(Formula::Atom(0), Formula::Atom(1)));
        let find = |head: &ComplexPredicate| {
            products
                .iter()
                .find(|cl| cl.head.semantically_equal(head, 3))
                .expect("product present")
        };
        // [max(0, 1/2 + 2/3 - 1), min(3/4, 5/6)] = [1/6, 3/4]
        assert_eq!(find(&conj).interval, ProbabilityInterval::ratio(1, 6, 3, 4));
        // [max(1/2, 2/3), min(1, 3/4 + 5/6)] = [2/3, 1]
        assert_eq!(find(&disj).interval, ProbabilityInterval::ratio(2, 3, 1, 1));
    }

    #[test]
    fn cross_body_products_respect_the_side_conditions() {
        let a = clause((1, 2), (3, 5), atom(0), atom(1));
        let b = clause((1, 4), (1, 3), atom(2), atom(3));
        let impls = compute_impl(&[], vec![atom(0), atom(1), atom(2), atom(3)], 4);
        let products = chain_step(&[a.clone(), b.clone()], &impls);
        let head = ComplexPredicate::new(Formula::and(Formula::Atom(0), Formula::Atom(2)));
        let body = ComplexPredicate::new(Formula::or(Formula::Atom(1), Formula::Atom(3)));
        let found = products
            .iter()
            .find(|cl| {
                cl.head.semantically_equal(&head, 4) && cl.body[0].semantically_equal(&body, 4)
            })
            .expect("rule-5 product");
        // [0, min(1, 3/5 + 1/3)] = [0, 14/15]
        assert_eq!(found.interval, ProbabilityInterval::ratio(0, 1, 14, 15));

        // Same bodies: every rule-5 pairing trips the F_2 != F_4 condition.
        let c = clause((1, 4), (1, 3), atom(2), atom(1));
        let products = chain_step(&[a, c], &impls);
        assert!(products.iter().all(|cl| {
            !(cl.head.semantically_equal(&head, 4)
                && matches!(cl.body[0].formula(), Formula::Or(_, _)))
        }));
    }

    #[test]
    fn forbidden_point_intervals_never_leave_chaining() {
        // A hand-built [0, 0] clause reflects to [1, 1], which must be
        // swallowed rather than emitted.
        let t = vec![clause((0, 1), (0, 1), atom(0), atom(1))];
        let impls = compute_impl(&[], vec![atom(0), atom(1), neg_atom(0)], 2);
        let products = chain_step(&t, &impls);
        for cl in &products {
            assert!(!cl.interval.is_degenerate_certainty(), "{:?}", cl.interval);
        }
    }

    fn seal_program() -> EmpiricalProgram {
        EmpiricalProgram::new(
            Predicates::new(["Monk_seal", "Female"]),
            vec![fact(0, "joe")],
            vec![clause((2, 5), (9, 20), atom(1), atom(0))],
        )
    }

    #[test]
    fn seal_closure_contains_the_complement_and_keeps_the_source() {
        let comp = compile(&seal_program()).unwrap();
        let k = 2;
        let source = &seal_program().empirical[0];
        assert!(comp.clauses.iter().any(|cl| {
            cl.head.semantically_equal(&source.head, k)
                && cl.body[0].semantically_equal(&source.body[0], k)
                && cl.interval == source.interval
        }));
        let complement = comp
            .clauses
            .iter()
            .find(|cl| {
                cl.head.semantically_equal(&neg_atom(1), k)
                    && cl.body[0].semantically_equal(&atom(0), k)
            })
            .expect("complemented clause in closure");
        assert_eq!(complement.interval, ProbabilityInterval::ratio(11, 20, 3, 5));
    }

    #[test]
    fn closure_is_a_fixpoint_modulo_stored_tighter_intervals() {
        for program in [seal_program(), elephant_program()] {
            let comp = compile(&program).unwrap();
            let k = program.k();
            for product in chain_step(&comp.clauses, &comp.implications) {
                let stored_shape = comp
                    .implications
                    .representative(product.head.canon(k))
                    .is_some()
                    && comp
                        .implications
                        .representative(&product.body_canon(k))
                        .is_some();
                if !stored_shape || product.interval.is_vacuous() {
                    continue;
                }
                let subsumed = comp.clauses.iter().any(|cl| {
                    cl.head.semantically_equal(&product.head, k)
                        && cl.body[0].semantically_equal(&product.body[0], k)
                        && product.interval.contains_interval(&cl.interval)
                });
                assert!(subsumed, "unsubsumed product {:?}", product.interval);
            }
        }
    }

    #[test]
    fn empty_empirical_side_compiles_to_nothing() {
        let program = EmpiricalProgram::new(
            Predicates::new(["A", "B"]),
            vec![rule(RuleLiteral::pos(0), vec![RuleLiteral::pos(1)])],
            vec![],
        );
        let comp = compile(&program).unwrap();
        assert!(comp.clauses.is_empty());
        assert_eq!(comp.iteration_sizes, vec![0, 0]);
    }

    #[test]
    fn elephant_closure_derives_both_not_white_clauses() {
        let comp = compile(&elephant_program()).unwrap();
        let k = 4;
        let not_white: Vec<&EmpiricalClause> = comp
            .clauses
            .iter()
            .filter(|cl| cl.head.semantically_equal(&neg_atom(3), k))
            .collect();
        let over_royal = not_white
            .iter()
            .find(|cl| cl.body[0].semantically_equal(&atom(1), k))
            .expect("~White over Royal_elephant");
        assert_eq!(over_royal.interval, ProbabilityInterval::ratio(0, 1, 1, 10));
        let over_elephant = not_white
            .iter()
            .find(|cl| cl.body[0].semantically_equal(&atom(2), k))
            .expect("~White over Elephant");
        assert_eq!(
            over_elephant.interval,
            ProbabilityInterval::ratio(0, 1, 19, 20)
        );
    }

    #[test]
    fn overlapping_source_clauses_are_all_kept() {
        // A wide source must survive a narrower one regardless of clause
        // order; evidence is evidence.
        for order in [[0usize, 1], [1, 0]] {
            let clauses: Vec<EmpiricalClause> = order
                .iter()
                .map(|&i| {
                    [
                        clause((0, 1), (1, 2), atom(1), atom(0)),
                        clause((1, 5), (2, 5), atom(1), atom(0)),
                    ][i]
                        .clone()
                })
                .collect();
            let program = EmpiricalProgram::new(
                Predicates::new(["Monk_seal", "Female"]),
                vec![fact(0, "joe")],
                clauses,
            );
            let comp = compile(&program).unwrap();
            for src in &program.empirical {
                assert!(
                    comp.clauses.iter().any(|cl| {
                        cl.head.semantically_equal(&src.head, 2)
                            && cl.body[0].semantically_equal(&src.body[0], 2)
                            && cl.interval == src.interval
                    }),
                    "missing source {:?}",
                    src.interval
                );
            }
        }
    }

    #[test]
    fn assembling_stored_clauses_reproduces_the_compile() {
        let program = elephant_program();
        let comp = compile(&program).unwrap();
        let rebuilt = assemble(&program, &comp.clauses).unwrap();
        assert_eq!(rebuilt.clauses.len(), comp.clauses.len());
        let k = 4;
        for (a, b) in comp.clauses.iter().zip(rebuilt.clauses.iter()) {
            assert!(a.head.semantically_equal(&b.head, k));
            assert!(a.body[0].semantically_equal(&b.body[0], k));
            assert_eq!(a.interval, b.interval);
        }
        assert_eq!(
            comp.implications.pairs().count(),
            rebuilt.implications.pairs().count()
        );
    }

    #[test]
    fn compilation_caps_are_enforced() {
        let tight_iterations = CompileOptions {
            max_iterations: 1,
            max_clauses: 50_000,
        };
        assert!(matches!(
            compile_with(&seal_program(), tight_iterations),
            Err(Error::CapExceeded(_))
        ));
        let tight_clauses = CompileOptions {
            max_iterations: 64,
            max_clauses: 1,
        };
        assert!(matches!(
            compile_with(&seal_program(), tight_clauses),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn chaining_preserves_models() {
        // Random interpretations agree on the source and compiled programs.
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(59);
        for program in [seal_program(), elephant_program()] {
            let comp = compile(&program).unwrap();
            let compiled_view = EmpiricalProgram::new(
                program.predicates.clone(),
                program.context.clone(),
                comp.clauses.clone(),
            );
            let k = program.k();
            let cells = crate::model::num_partitions(k);
            for _ in 0..150 {
                let size = rng.random_range(1..=6);
                let layout: Vec<usize> = (0..size).map(|_| rng.random_range(0..cells)).collect();
                let mut map = std::collections::BTreeMap::new();
                for (c, name) in program.constants.iter().enumerate() {
                    if c < size {
                        map.insert(name.clone(), c);
                    }
                }
                if map.len() < program.constants.len() {
                    continue;
                }
                let interp = Interpretation::new(k, layout, map).unwrap();
                assert_eq!(
                    interp.is_model(&program).unwrap(),
                    interp.is_model(&compiled_view).unwrap(),
                );
            }
        }
    }
}
