//! Query answering in two stages: a deductive pass that decides the asked
//! property outright from the context when it can, then an inductive pass
//! that collects the applicable compiled clauses, groups their reference
//! classes into maximally preferred clusters, and intersects each cluster's
//! intervals into one range per cluster.

use std::collections::{BTreeMap, BTreeSet};

use crate::compiler::{CompiledProgram, ImplicationSet};
use crate::error::{Error, Result};
use crate::model::{
    predicate_true_in_cell, ComplexPredicate, ContextClause, EmpiricalClause, EmpiricalProgram,
    GroundLiteral, ProbabilityInterval, UnaryRule,
};
use crate::propositional::{rules_mask, TruthTable};

#[derive(Debug, Clone)]
pub struct Query {
    pub subject: String,
    pub property: ComplexPredicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entailment {
    Holds,
    Refuted,
    Unknown,
}

#[derive(Debug, Clone)]
pub struct ClusterRange {
    /// Mutually implying reference classes, sorted canonically.
    pub cluster: Vec<ComplexPredicate>,
    /// Intersection of the intervals of the cluster's applicable clauses.
    pub range: ProbabilityInterval,
}

#[derive(Debug, Clone)]
pub enum QueryAnswer {
    /// Deduced from the context alone: probability 1 (`true`) or 0 (`false`).
    Definite(bool),
    /// One range per maximally preferred cluster of reference classes.
    Inductive(Vec<ClusterRange>),
    /// No deduction and no applicable clause.
    NoEvidence,
}

/// Does some partition-cell assignment of all constants satisfy the ground
/// clauses, with every cell drawn from `mask` and the subject's cell drawn
/// from `subject_allowed`? Constants beyond the named ones never matter:
/// unnamed elements can always sit in any `mask` cell.
fn satisfiable(
    ground: &[&crate::model::GroundClause],
    names: &[&str],
    subject: &str,
    mask: &TruthTable,
    subject_allowed: &TruthTable,
    k: usize,
) -> bool {
    fn literal_true(lit: &GroundLiteral, cells: &BTreeMap<&str, usize>, k: usize) -> Option<bool> {
        let &cell = cells.get(lit.constant.as_str())?;
        Some(predicate_true_in_cell(lit.predicate, cell, k) != lit.negated)
    }
    fn violated(
        ground: &[&crate::model::GroundClause],
        cells: &BTreeMap<&str, usize>,
        k: usize,
    ) -> bool {
        ground.iter().any(|cl| {
            let body_all_true = cl
                .body
                .iter()
                .try_fold(true, |acc, lit| literal_true(lit, cells, k).map(|t| acc && t));
            match (body_all_true, literal_true(&cl.head, cells, k)) {
                (Some(true), Some(false)) => true,
                _ => false,
            }
        })
    }
    fn assign<'a>(
        ground: &[&crate::model::GroundClause],
        names: &[&'a str],
        cells: &mut BTreeMap<&'a str, usize>,
        allowed: &dyn Fn(&str) -> Vec<usize>,
        k: usize,
    ) -> bool {
        let Some((&name, rest)) = names.split_first() else {
            return true;
        };
        for cell in allowed(name) {
            cells.insert(name, cell);
            if !violated(ground, cells, k) && assign(ground, rest, cells, allowed, k) {
                return true;
            }
            cells.remove(name);
        }
        false
    }

    let allowed = |name: &str| -> Vec<usize> {
        let table = if name == subject {
            subject_allowed.clone()
        } else {
            mask.clone()
        };
        table.ones().collect()
    };
    assign(ground, names, &mut BTreeMap::new(), &allowed, k)
}

/// Decide the property at the subject purely from the context, quantifying
/// over all finite models: `Holds` when every model satisfies it, `Refuted`
/// when every model satisfies its complement, `Unknown` otherwise. An
/// unsatisfiable context makes everything hold, and `Holds` wins in that
/// case. Subjects outside the context are allowed; they are constrained by
/// the rules only.
pub fn context_entails(
    program: &EmpiricalProgram,
    property: &ComplexPredicate,
    subject: &str,
) -> Entailment {
    let k = program.k();
    let mut rules: Vec<&UnaryRule> = Vec::new();
    let mut ground: Vec<&crate::model::GroundClause> = Vec::new();
    for clause in &program.context {
        match clause {
            ContextClause::Rule(r) => rules.push(r),
            ContextClause::Ground(g) => ground.push(g),
        }
    }
    let mask = rules_mask(&rules, k);
    let mut names: Vec<&str> = program.constants.iter().map(String::as_str).collect();
    if !program.constants.contains(subject) {
        names.push(subject);
    }

    let inside = mask.and(property.canon(k));
    let outside = mask.and(&property.canon(k).complement());
    let can_fail = satisfiable(&ground, &names, subject, &mask, &outside, k);
    if !can_fail {
        return Entailment::Holds;
    }
    let can_hold = satisfiable(&ground, &names, subject, &mask, &inside, k);
    if !can_hold {
        return Entailment::Refuted;
    }
    Entailment::Unknown
}

/// The compiled clauses that bear on a query: head matches the asked
/// property, body entailed at the subject (a `true` body from a null-body
/// source clause is entailed trivially).
pub fn applicable_clauses<'a>(comp: &'a CompiledProgram, query: &Query) -> Vec<&'a EmpiricalClause> {
    let k = comp.source.k();
    let mut entailed_bodies: BTreeMap<TruthTable, bool> = BTreeMap::new();
    comp.clauses
        .iter()
        .filter(|cl| cl.head.semantically_equal(&query.property, k))
        .filter(|cl| {
            *entailed_bodies
                .entry(cl.body_canon(k))
                .or_insert_with(|| {
                    context_entails(&comp.source, &cl.body[0], &query.subject)
                        == Entailment::Holds
                })
        })
        .collect()
}

/// Group reference classes into maximally preferred clusters: classes that
/// imply each other share a cluster, and a cluster survives only when no
/// class outside it implies into it. Because the implication set is closed
/// under transitivity, mutual implication is an equivalence and the direct
/// pair check decides reachability.
pub fn preferred_clusters(
    bodies: &[ComplexPredicate],
    impls: &ImplicationSet,
) -> Vec<Vec<ComplexPredicate>> {
    let k = impls.k();
    let mut distinct: Vec<ComplexPredicate> = Vec::new();
    for b in bodies {
        if !distinct.iter().any(|d| d.semantically_equal(b, k)) {
            distinct.push(b.clone());
        }
    }
    let mut used = vec![false; distinct.len()];
    let mut clusters: Vec<Vec<ComplexPredicate>> = Vec::new();
    for i in 0..distinct.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![i];
        for j in i + 1..distinct.len() {
            if !used[j]
                && impls.entails_pair(&distinct[i], &distinct[j])
                && impls.entails_pair(&distinct[j], &distinct[i])
            {
                members.push(j);
            }
        }
        for &m in &members {
            used[m] = true;
        }
        let preferred = distinct.iter().enumerate().all(|(j, outside)| {
            members.contains(&j)
                || !members
                    .iter()
                    .any(|&m| impls.entails_pair(&distinct[m], outside))
        });
        if preferred {
            let mut cluster: Vec<ComplexPredicate> =
                members.into_iter().map(|m| distinct[m].clone()).collect();
            cluster.sort_by(|a, b| a.canon(k).cmp(b.canon(k)));
            clusters.push(cluster);
        }
    }
    clusters.sort_by(|a, b| a[0].canon(k).cmp(b[0].canon(k)));
    clusters
}

/// The full answering pipeline: deduce if possible, otherwise collect
/// applicable clauses, cluster their reference classes, and intersect each
/// cluster's intervals. A cluster whose intervals have empty intersection
/// is conflicting evidence and surfaces as an error.
pub fn answer(comp: &CompiledProgram, query: &Query) -> Result<QueryAnswer> {
    match context_entails(&comp.source, &query.property, &query.subject) {
        Entailment::Holds => return Ok(QueryAnswer::Definite(true)),
        Entailment::Refuted => return Ok(QueryAnswer::Definite(false)),
        Entailment::Unknown => {}
    }

    let applicable = applicable_clauses(comp, query);
    if applicable.is_empty() {
        return Ok(QueryAnswer::NoEvidence);
    }
    let k = comp.source.k();
    let bodies: Vec<ComplexPredicate> = applicable.iter().map(|cl| cl.body[0].clone()).collect();
    let clusters = preferred_clusters(&bodies, &comp.implications);

    let mut results = Vec::with_capacity(clusters.len());
    for cluster in clusters {
        let member_canons: BTreeSet<TruthTable> =
            cluster.iter().map(|f| f.canon(k).clone()).collect();
        let in_cluster: Vec<&&EmpiricalClause> = applicable
            .iter()
            .filter(|cl| member_canons.contains(&cl.body_canon(k)))
            .collect();
        let mut range = ProbabilityInterval::new(
            num::BigRational::from_integer(0.into()),
            num::BigRational::from_integer(1.into()),
        )
        .expect("the unit interval is valid");
        for cl in &in_cluster {
            range = range.intersect(&cl.interval).ok_or_else(|| {
                let listing: Vec<String> = in_cluster
                    .iter()
                    .map(|c| c.display(&comp.source.predicates))
                    .collect();
                Error::EmptyIntersection(listing.join("  |  "))
            })?;
        }
        results.push(ClusterRange { cluster, range });
    }
    Ok(QueryAnswer::Inductive(results))
}
