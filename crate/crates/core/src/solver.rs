//! Exact feasibility solving for partition-count systems.
//!
//! Consistency questions reduce to: does a [`ConstraintSystem`] admit a
//! nonnegative *integer* point? The solver runs phase-1 simplex over exact
//! rationals (Bland's rule, so it always terminates) to find a rational
//! point or prove there is none. A rational point is turned into an integer
//! one by clearing denominators; for the systems the engine emits this
//! always works, because every row is either scale-invariant (`... <= 0`,
//! `... = 0`) or a lower bound `sum >= n` that only gets slacker under
//! scaling up. Hand-written systems can defeat scaling (`2 v1 = 1` has a
//! rational point but no integer one), so a bounded branch-and-bound search
//! settles those; exhausting its node budget reports an error rather than
//! guessing.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::constraints::{ConstraintSystem, LinearConstraint, Relation};
use crate::error::{Error, Result};

/// Outcome of an integer-feasibility check. `witness` is present exactly
/// when `feasible` is true and always re-verified against the input system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeasibilityResult {
    pub feasible: bool,
    pub witness: Option<Vec<BigInt>>,
}

impl FeasibilityResult {
    fn infeasible() -> Self {
        FeasibilityResult {
            feasible: false,
            witness: None,
        }
    }

    fn feasible(witness: Vec<BigInt>) -> Self {
        FeasibilityResult {
            feasible: true,
            witness: Some(witness),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveOptions {
    /// Branch-and-bound node budget; only consumed when denominator
    /// clearing fails to produce a valid witness.
    pub node_budget: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { node_budget: 1000 }
    }
}

pub fn solve(sys: &ConstraintSystem) -> Result<FeasibilityResult> {
    solve_with(sys, SolveOptions::default())
}

pub fn solve_with(sys: &ConstraintSystem, options: SolveOptions) -> Result<FeasibilityResult> {
    let rational = match rational_solution(sys)? {
        None => return Ok(FeasibilityResult::infeasible()),
        Some(x) => x,
    };
    let scaled = clear_denominators(&rational);
    if verifies(sys, &scaled) {
        return Ok(FeasibilityResult::feasible(scaled));
    }
    let mut budget = options.node_budget;
    match branch(sys, &mut Vec::new(), &mut budget)? {
        Some(w) => Ok(FeasibilityResult::feasible(w)),
        None => Ok(FeasibilityResult::infeasible()),
    }
}

/// Phase-1 simplex: `Some` nonnegative rational point, or `None` when the
/// relaxation itself is empty.
pub fn rational_solution(sys: &ConstraintSystem) -> Result<Option<Vec<BigRational>>> {
    for c in &sys.constraints {
        if c.max_var() > sys.num_vars {
            return Err(Error::Degenerate(format!(
                "constraint references v{} but the system has {} variables",
                c.max_var(),
                sys.num_vars
            )));
        }
    }

    let n = sys.num_vars;
    // Normalize every row to a nonnegative right-hand side.
    let mut rows: Vec<(Vec<BigRational>, Relation, BigRational)> = Vec::new();
    for c in &sys.constraints {
        let mut coeffs = vec![BigRational::zero(); n];
        for (&i, q) in c.coeffs() {
            coeffs[i - 1] = q.clone();
        }
        let mut relation = c.relation;
        let mut rhs = c.rhs.clone();
        if rhs.is_negative() {
            for q in &mut coeffs {
                *q = -q.clone();
            }
            rhs = -rhs;
            relation = match relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
        rows.push((coeffs, relation, rhs));
    }

    // Column layout: structural, then one slack per <= row, then
    // surplus/artificial columns for >= and = rows in row order.
    let m = rows.len();
    let num_slack = rows.iter().filter(|r| r.1 == Relation::Le).count();
    let num_surplus = rows.iter().filter(|r| r.1 == Relation::Ge).count();
    let num_artificial = rows.iter().filter(|r| r.1 != Relation::Le).count();
    let ncols = n + num_slack + num_surplus + num_artificial;
    let artificial_start = n + num_slack + num_surplus;

    let mut tableau: Vec<Vec<BigRational>> = Vec::with_capacity(m);
    let mut basis: Vec<usize> = Vec::with_capacity(m);
    let mut next_slack = n;
    let mut next_surplus = n + num_slack;
    let mut next_artificial = artificial_start;
    for (coeffs, relation, rhs) in rows {
        let mut row = vec![BigRational::zero(); ncols + 1];
        row[..n].clone_from_slice(&coeffs);
        row[ncols] = rhs;
        match relation {
            Relation::Le => {
                row[next_slack] = BigRational::one();
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_surplus] = -BigRational::one();
                next_surplus += 1;
                row[next_artificial] = BigRational::one();
                basis.push(next_artificial);
                next_artificial += 1;
            }
            Relation::Eq => {
                row[next_artificial] = BigRational::one();
                basis.push(next_artificial);
                next_artificial += 1;
            }
        }
        tableau.push(row);
    }

    // Minimize the sum of artificials. Entering column: smallest
    // non-artificial index with negative reduced cost; artificials never
    // re-enter once driven out. Leaving row: tightest ratio, ties to the
    // smallest basic index. Both choices follow Bland's rule, which rules
    // out cycling.
    loop {
        let mut entering = None;
        for j in 0..artificial_start {
            if basis.contains(&j) {
                continue;
            }
            let mut reduced = BigRational::zero();
            for (i, row) in tableau.iter().enumerate() {
                if basis[i] >= artificial_start {
                    reduced -= &row[j];
                }
            }
            if reduced.is_negative() {
                entering = Some(j);
                break;
            }
        }
        let j = match entering {
            Some(j) => j,
            None => break,
        };
        let mut leaving: Option<usize> = None;
        for (i, row) in tableau.iter().enumerate() {
            if !row[j].is_positive() {
                continue;
            }
            let better = match leaving {
                None => true,
                Some(l) => {
                    let cur = &tableau[l][ncols] / &tableau[l][j];
                    let cand = &row[ncols] / &row[j];
                    cand < cur || (cand == cur && basis[i] < basis[l])
                }
            };
            if better {
                leaving = Some(i);
            }
        }
        let i = leaving.ok_or_else(|| {
            Error::Degenerate("phase-1 pivot found no leaving row".to_string())
        })?;
        pivot(&mut tableau, &mut basis, i, j);
    }

    let infeasibility: BigRational = tableau
        .iter()
        .enumerate()
        .filter(|(i, _)| basis[*i] >= artificial_start)
        .map(|(_, row)| row[ncols].clone())
        .sum();
    if infeasibility.is_positive() {
        return Ok(None);
    }

    let mut x = vec![BigRational::zero(); n];
    for (i, row) in tableau.iter().enumerate() {
        if basis[i] < n {
            x[basis[i]] = row[ncols].clone();
        }
    }
    Ok(Some(x))
}

fn pivot(tableau: &mut [Vec<BigRational>], basis: &mut [usize], i: usize, j: usize) {
    let divisor = tableau[i][j].clone();
    for q in tableau[i].iter_mut() {
        *q /= &divisor;
    }
    for r in 0..tableau.len() {
        if r == i || tableau[r][j].is_zero() {
            continue;
        }
        let factor = tableau[r][j].clone();
        for col in 0..tableau[r].len() {
            let delta = &factor * &tableau[i][col];
            tableau[r][col] -= delta;
        }
    }
    basis[i] = j;
}

/// Multiply a rational point by the least common multiple of its
/// denominators, producing integers.
pub fn clear_denominators(solution: &[BigRational]) -> Vec<BigInt> {
    let mut lambda = BigInt::one();
    for x in solution {
        lambda = lambda.lcm(x.denom());
    }
    let lambda = BigRational::from_integer(lambda);
    solution.iter().map(|x| (x * &lambda).to_integer()).collect()
}

fn verifies(sys: &ConstraintSystem, witness: &[BigInt]) -> bool {
    let assignment: Vec<BigRational> = witness
        .iter()
        .map(|w| BigRational::from_integer(w.clone()))
        .collect();
    sys.satisfied_by(&assignment)
}

/// Depth-first branch and bound over the integer lattice. `extra` carries
/// the branching bounds added so far; each node costs one LP solve from the
/// budget.
fn branch(
    sys: &ConstraintSystem,
    extra: &mut Vec<LinearConstraint>,
    budget: &mut usize,
) -> Result<Option<Vec<BigInt>>> {
    if *budget == 0 {
        return Err(Error::CapExceeded(
            "integer search budget exhausted; the system has rational points but an integer \
             witness was not found within the node limit"
                .to_string(),
        ));
    }
    *budget -= 1;

    let mut combined = sys.clone();
    combined.constraints.extend(extra.iter().cloned());
    let x = match rational_solution(&combined)? {
        None => return Ok(None),
        Some(x) => x,
    };

    let fractional = x.iter().position(|q| !q.is_integer());
    let j = match fractional {
        None => {
            let witness: Vec<BigInt> = x.iter().map(|q| q.to_integer()).collect();
            debug_assert!(verifies(sys, &witness));
            return Ok(Some(witness));
        }
        Some(j) => j,
    };

    let floor = x[j].floor();
    let single = |rhs: BigRational, relation: Relation| {
        LinearConstraint::new(
            [(j + 1, BigRational::one())].into_iter().collect(),
            relation,
            rhs,
            "branch bound",
        )
    };

    extra.push(single(floor.clone(), Relation::Le));
    let below = branch(sys, extra, budget)?;
    extra.pop();
    if below.is_some() {
        return Ok(below);
    }

    extra.push(single(floor + BigRational::one(), Relation::Ge));
    let above = branch(sys, extra, budget)?;
    extra.pop();
    Ok(above)
}
