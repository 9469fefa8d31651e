//! Brute-force reference semantics over explicit finite interpretations.
//!
//! Everything here works from first principles — elements, valuations, and
//! exact cardinality ratios — without touching the constraint translation
//! or the solver. That makes this module the independent ground truth the
//! property tests compare those components against: agreement between a
//! clever path and this slow one is evidence, agreement of the clever path
//! with itself is not.

use std::collections::{BTreeMap, BTreeSet};

use num::rational::BigRational;

use crate::error::{Error, Result};
use crate::herbrand::{signatures, split_context, HerbrandModel};
use crate::model::{
    cell_predicates, num_partitions, predicate_true_in_cell, ComplexPredicate, EmpiricalClause,
    EmpiricalProgram, Formula, GroundClause, GroundLiteral, UnaryRule,
};

/// A finite non-Herbrand interpretation: a domain `0..domain_size`, one
/// partition cell per element (equivalently, the set of predicates true of
/// it), and an injective assignment of program constants to elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    k: usize,
    cells: Vec<usize>,
    constant_map: BTreeMap<String, usize>,
}

impl Interpretation {
    pub fn new(
        k: usize,
        cells: Vec<usize>,
        constant_map: BTreeMap<String, usize>,
    ) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Materialize("the domain must be nonempty".into()));
        }
        let ncells = num_partitions(k);
        if let Some(bad) = cells.iter().find(|&&c| c >= ncells) {
            return Err(Error::Materialize(format!(
                "element cell {} is out of range for {} predicates",
                bad, k
            )));
        }
        let mut seen: BTreeMap<usize, &str> = BTreeMap::new();
        for (name, &element) in &constant_map {
            if element >= cells.len() {
                return Err(Error::Materialize(format!(
                    "constant {} maps to element {} but the domain has {} elements",
                    name,
                    element,
                    cells.len()
                )));
            }
            if let Some(other) = seen.insert(element, name) {
                return Err(Error::Materialize(format!(
                    "constants {} and {} map to the same element {}",
                    other, name, element
                )));
            }
        }
        Ok(Interpretation {
            k,
            cells,
            constant_map,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn domain_size(&self) -> usize {
        self.cells.len()
    }

    pub fn cell_of_element(&self, element: usize) -> usize {
        self.cells[element]
    }

    /// The set of predicates true of one element.
    pub fn element_predicates(&self, element: usize) -> BTreeSet<usize> {
        cell_predicates(self.cells[element], self.k).into_iter().collect()
    }

    pub fn constant_map(&self) -> &BTreeMap<String, usize> {
        &self.constant_map
    }

    fn element_of(&self, constant: &str) -> Result<usize> {
        self.constant_map.get(constant).copied().ok_or_else(|| {
            Error::Materialize(format!(
                "constant {} is not mapped to any domain element",
                constant
            ))
        })
    }

    fn element_satisfies(&self, f: &Formula, element: usize) -> bool {
        let cell = self.cells[element];
        f.eval(&|p| predicate_true_in_cell(p, cell, self.k))
    }

    /// Number of domain elements having every property in `fs`.
    pub fn cardinality(&self, fs: &[ComplexPredicate]) -> u64 {
        (0..self.cells.len())
            .filter(|&e| fs.iter().all(|cp| self.element_satisfies(cp.formula(), e)))
            .count() as u64
    }

    /// Direct ratio test: the body count is zero, or the head-and-body to
    /// body ratio lies inside the clause's interval, compared exactly.
    pub fn satisfies_empirical(&self, cl: &EmpiricalClause) -> bool {
        let body = self.cardinality(&cl.body);
        if body == 0 {
            return true;
        }
        let mut with_head = cl.body.clone();
        with_head.push(cl.head.clone());
        let head_and_body = self.cardinality(&with_head);
        ratio_in_interval(head_and_body, body, cl)
    }

    fn literal_holds(&self, lit: &GroundLiteral) -> Result<bool> {
        let element = self.element_of(&lit.constant)?;
        let atom = self.element_satisfies(&Formula::Atom(lit.predicate), element);
        Ok(atom != lit.negated)
    }

    pub fn satisfies_ground(&self, clause: &GroundClause) -> Result<bool> {
        for lit in &clause.body {
            if !self.literal_holds(lit)? {
                return Ok(true);
            }
        }
        self.literal_holds(&clause.head)
    }

    /// A rule holds when every domain element satisfying the whole body
    /// also satisfies the head.
    pub fn satisfies_rule(&self, rule: &UnaryRule) -> bool {
        (0..self.cells.len()).all(|e| {
            let body = rule
                .body
                .iter()
                .all(|lit| self.element_satisfies(&lit.formula(), e));
            !body || self.element_satisfies(&rule.head.formula(), e)
        })
    }

    pub fn satisfies_context(&self, program: &EmpiricalProgram) -> Result<bool> {
        let (rules, ground) = split_context(program);
        for clause in ground {
            if !self.satisfies_ground(clause)? {
                return Ok(false);
            }
        }
        Ok(rules.iter().all(|r| self.satisfies_rule(r)))
    }

    pub fn is_model(&self, program: &EmpiricalProgram) -> Result<bool> {
        Ok(self.satisfies_context(program)?
            && program
                .empirical
                .iter()
                .all(|cl| self.satisfies_empirical(cl)))
    }

    /// How many elements sit in each partition cell (index 0 here is the
    /// all-true partition `v_1`).
    pub fn partition_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; num_partitions(self.k)];
        for &c in &self.cells {
            counts[c] += 1;
        }
        counts
    }
}

fn ratio_in_interval(numerator: u64, denominator: u64, cl: &EmpiricalClause) -> bool {
    let ratio = BigRational::new(numerator.into(), denominator.into());
    *cl.interval.lo() <= ratio && ratio <= *cl.interval.hi()
}

/// Cardinality computed from partition counts alone: elements are
/// interchangeable within a cell, so `|F|` is the total count over cells
/// where `F` holds.
fn counts_cardinality(counts: &[u64], fs: &[&ComplexPredicate], k: usize) -> Option<u64> {
    let mut total: u64 = 0;
    for (cell, &n) in counts.iter().enumerate() {
        if n > 0 && fs
            .iter()
            .all(|cp| cp.formula().eval(&|p| predicate_true_in_cell(p, cell, k)))
        {
            total = total.checked_add(n)?;
        }
    }
    Some(total)
}

/// Def-4 check lifted to counts: used by the search to discard count
/// vectors before any constants are placed.
pub fn counts_satisfy_empirical(counts: &[u64], clauses: &[EmpiricalClause], k: usize) -> bool {
    clauses.iter().all(|cl| {
        let body_refs: Vec<&ComplexPredicate> = cl.body.iter().collect();
        let body = match counts_cardinality(counts, &body_refs, k) {
            Some(n) => n,
            None => return false,
        };
        if body == 0 {
            return true;
        }
        let mut with_head = body_refs;
        with_head.push(&cl.head);
        match counts_cardinality(counts, &with_head, k) {
            Some(hb) => ratio_in_interval(hb, body, cl),
            None => false,
        }
    })
}

/// Realize a ground model as an interpretation with the given partition
/// occupancies. Elements are laid out cell-major; each constant takes a
/// fresh element in some cell compatible with everything the model says
/// about it. Distinct signatures claim disjoint cell sets, so greedy
/// placement per signature is complete — failure means the counts genuinely
/// cannot host the constants, which per-predicate (paper-mode) bounds do
/// not rule out.
pub fn materialize(
    model: &HerbrandModel,
    counts: &[u64],
    program: &EmpiricalProgram,
) -> Result<Interpretation> {
    let k = program.k();
    if counts.len() != num_partitions(k) {
        return Err(Error::Materialize(format!(
            "expected {} partition counts, got {}",
            num_partitions(k),
            counts.len()
        )));
    }
    let mut total: usize = 0;
    for &n in counts {
        let n = usize::try_from(n).map_err(|_| Error::CountsOverflow)?;
        total = total.checked_add(n).ok_or(Error::CountsOverflow)?;
    }
    if total == 0 {
        return Err(Error::Materialize(
            "all partition counts are zero, but the domain must be nonempty".into(),
        ));
    }

    let mut cells = Vec::with_capacity(total);
    let mut first_free: Vec<usize> = Vec::with_capacity(counts.len());
    for (cell, &n) in counts.iter().enumerate() {
        first_free.push(cells.len());
        cells.extend(std::iter::repeat(cell).take(n as usize));
    }
    let mut used = vec![0usize; counts.len()];

    let mut constant_map = BTreeMap::new();
    for (constant, signature) in signatures(model) {
        let compatible = signature.compatible_cells(k);
        let slot = compatible
            .ones()
            .find(|&cell| (used[cell] as u64) < counts[cell]);
        match slot {
            Some(cell) => {
                constant_map.insert(constant, first_free[cell] + used[cell]);
                used[cell] += 1;
            }
            None => {
                return Err(Error::Materialize(format!(
                    "no partition compatible with constant {} has capacity left",
                    constant
                )));
            }
        }
    }

    Interpretation::new(k, cells, constant_map)
}

/// Bounded exhaustive model search: every partition-count vector with
/// `1 <= sum <= max_domain` in lexicographic order, keeping a vector only
/// if the empirical ratios and the rules pass on counts, then trying to
/// place the constants so the ground clauses hold. Absence of a result
/// bounds only domains up to `max_domain`; it is not an inconsistency
/// proof.
pub fn search_models(
    program: &EmpiricalProgram,
    max_domain: usize,
) -> Result<Option<Interpretation>> {
    let mut found = None;
    search_inner(program, max_domain, &mut |interp| {
        found = Some(interp);
        false
    })?;
    Ok(found)
}

/// Every satisfying count vector's first interpretation, for harnesses
/// that want coverage rather than a single witness.
pub fn models_up_to(program: &EmpiricalProgram, max_domain: usize) -> Result<Vec<Interpretation>> {
    let mut found = Vec::new();
    search_inner(program, max_domain, &mut |interp| {
        found.push(interp);
        true
    })?;
    Ok(found)
}

fn search_inner(
    program: &EmpiricalProgram,
    max_domain: usize,
    visit: &mut dyn FnMut(Interpretation) -> bool,
) -> Result<()> {
    let k = program.k();
    let ncells = num_partitions(k);
    let (rules, ground) = split_context(program);
    let constants: Vec<&String> = program.constants.iter().collect();

    let mut counts = vec![0u64; ncells];
    for total in 1..=max_domain {
        if !distribute(&mut counts, 0, total as u64, program, &rules, &ground, &constants, visit)? {
            return Ok(());
        }
    }
    Ok(())
}

/// Fill `counts[cell..]` with every composition of `remaining`; returns
/// false when the visitor has asked to stop.
#[allow(clippy::too_many_arguments)]
fn distribute(
    counts: &mut Vec<u64>,
    cell: usize,
    remaining: u64,
    program: &EmpiricalProgram,
    rules: &[&UnaryRule],
    ground: &[&GroundClause],
    constants: &[&String],
    visit: &mut dyn FnMut(Interpretation) -> bool,
) -> Result<bool> {
    if cell + 1 == counts.len() {
        counts[cell] = remaining;
        let keep_going = try_counts(counts, program, rules, ground, constants, visit)?;
        counts[cell] = 0;
        return Ok(keep_going);
    }
    for here in 0..=remaining {
        counts[cell] = here;
        if !distribute(counts, cell + 1, remaining - here, program, rules, ground, constants, visit)? {
            counts[cell] = 0;
            return Ok(false);
        }
    }
    counts[cell] = 0;
    Ok(true)
}

fn try_counts(
    counts: &[u64],
    program: &EmpiricalProgram,
    rules: &[&UnaryRule],
    ground: &[&GroundClause],
    constants: &[&String],
    visit: &mut dyn FnMut(Interpretation) -> bool,
) -> Result<bool> {
    let k = program.k();
    // Rules first: every occupied cell must satisfy body -> head.
    let rules_ok = rules.iter().all(|rule| {
        counts.iter().enumerate().all(|(cell, &n)| {
            if n == 0 {
                return true;
            }
            let body = rule
                .body
                .iter()
                .all(|lit| lit.formula().eval(&|p| predicate_true_in_cell(p, cell, k)));
            !body || rule.head.formula().eval(&|p| predicate_true_in_cell(p, cell, k))
        })
    });
    if !rules_ok || !counts_satisfy_empirical(counts, &program.empirical, k) {
        return Ok(true);
    }

    let mut used = vec![0u64; counts.len()];
    let mut assignment: BTreeMap<String, usize> = BTreeMap::new();
    let placed = place_constants(0, constants, counts, &mut used, &mut assignment, ground, k);
    if !placed {
        return Ok(true);
    }

    // Turn the cell assignment into concrete elements, cell-major.
    let mut cells = Vec::new();
    let mut first_free: Vec<usize> = Vec::with_capacity(counts.len());
    for (cell, &n) in counts.iter().enumerate() {
        first_free.push(cells.len());
        cells.extend(std::iter::repeat(cell).take(n as usize));
    }
    let mut next = vec![0usize; counts.len()];
    let mut constant_map = BTreeMap::new();
    for (name, &cell) in &assignment {
        constant_map.insert(name.clone(), first_free[cell] + next[cell]);
        next[cell] += 1;
    }
    let interp = Interpretation::new(k, cells, constant_map)?;
    debug_assert!(matches!(interp.is_model(program), Ok(true)));
    Ok(visit(interp))
}

/// Backtracking placement of constants into cells with free capacity such
/// that every ground clause whose constants are all placed evaluates true.
fn place_constants(
    index: usize,
    constants: &[&String],
    counts: &[u64],
    used: &mut Vec<u64>,
    assignment: &mut BTreeMap<String, usize>,
    ground: &[&GroundClause],
    k: usize,
) -> bool {
    if index == constants.len() {
        return ground.iter().all(|gc| ground_clause_holds(gc, assignment, k));
    }
    let name = constants[index];
    for cell in 0..counts.len() {
        if used[cell] >= counts[cell] {
            continue;
        }
        assignment.insert(name.clone(), cell);
        used[cell] += 1;
        let consistent = ground
            .iter()
            .filter(|gc| clause_fully_assigned(gc, assignment))
            .all(|gc| ground_clause_holds(gc, assignment, k));
        if consistent
            && place_constants(index + 1, constants, counts, used, assignment, ground, k)
        {
            return true;
        }
        used[cell] -= 1;
        assignment.remove(name);
    }
    false
}

fn clause_fully_assigned(gc: &GroundClause, assignment: &BTreeMap<String, usize>) -> bool {
    assignment.contains_key(&gc.head.constant)
        && gc.body.iter().all(|lit| assignment.contains_key(&lit.constant))
}

fn ground_clause_holds(gc: &GroundClause, assignment: &BTreeMap<String, usize>, k: usize) -> bool {
    let lit_holds = |lit: &GroundLiteral| {
        let cell = assignment[&lit.constant];
        predicate_true_in_cell(lit.predicate, cell, k) != lit.negated
    };
    gc.body.iter().any(|lit| !lit_holds(lit)) || lit_holds(&gc.head)
}
