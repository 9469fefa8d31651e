//! End-to-end consistency checking: split the context, enumerate the ground
//! side's Herbrand models, and for each model assemble and solve the
//! partition-count system. The program is consistent exactly when some
//! model's system has a nonnegative integer solution; the first feasible
//! model in enumeration order becomes the reported witness, so results are
//! reproducible.

use crate::constraints::{
    empirical_system, model_constraints, rule_equality, ConstraintSystem,
};
use crate::error::{Error, Result};
use crate::herbrand::{enumerate_models, split_context, HerbrandModel};
use crate::model::{validate, EmpiricalProgram, Mode};
use crate::solver::{solve, FeasibilityResult};

#[derive(Debug, Clone, Copy)]
pub struct CheckOptions {
    pub mode: Mode,
    /// Cap on how many per-model trace entries the report retains; the
    /// verdict always reflects every model regardless.
    pub trace_limit: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            mode: Mode::default(),
            trace_limit: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceEntry {
    pub model: HerbrandModel,
    pub feasible: bool,
}

#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    pub consistent: bool,
    pub mode: Mode,
    /// The first ground model whose system was feasible.
    pub witness_model: Option<HerbrandModel>,
    /// Partition counts solving that model's system.
    pub witness_counts: Option<Vec<u64>>,
    pub trace: Vec<TraceEntry>,
    pub models_examined: usize,
}

/// The complete constraint set for one ground model: both bounds per
/// empirical clause, the nonempty-domain row, one equality per unary rule,
/// and the model's count bounds for the chosen mode.
pub fn assemble_system(
    program: &EmpiricalProgram,
    model: &HerbrandModel,
    mode: Mode,
) -> ConstraintSystem {
    let (rules, _) = split_context(program);
    let mut sys = empirical_system(&program.empirical, &program.predicates);
    for rule in rules {
        sys.push(rule_equality(rule, &program.predicates));
    }
    for row in model_constraints(model, mode, &program.predicates) {
        sys.push(row);
    }
    sys
}

pub fn check_consistency(program: &EmpiricalProgram, mode: Mode) -> Result<ConsistencyReport> {
    check_consistency_with(
        program,
        CheckOptions {
            mode,
            ..CheckOptions::default()
        },
    )
}

pub fn check_consistency_with(
    program: &EmpiricalProgram,
    options: CheckOptions,
) -> Result<ConsistencyReport> {
    let violations = validate(program);
    if !violations.is_empty() {
        return Err(Error::Invalid(violations));
    }

    let (rules, ground) = split_context(program);
    let models = enumerate_models(&ground, &rules, options.mode, program.k());

    let mut report = ConsistencyReport {
        consistent: false,
        mode: options.mode,
        witness_model: None,
        witness_counts: None,
        trace: Vec::new(),
        models_examined: 0,
    };

    for model in models {
        report.models_examined += 1;
        let sys = assemble_system(program, &model, options.mode);
        let FeasibilityResult { feasible, witness } = solve(&sys)?;
        if report.trace.len() < options.trace_limit {
            report.trace.push(TraceEntry {
                model: model.clone(),
                feasible,
            });
        }
        if feasible {
            let counts = witness
                .expect("feasible results carry a witness")
                .into_iter()
                .map(|w| u64::try_from(w).map_err(|_| Error::CountsOverflow))
                .collect::<Result<Vec<u64>>>()?;
            report.consistent = true;
            report.witness_model = Some(model);
            report.witness_counts = Some(counts);
            return Ok(report);
        }
    }
    Ok(report)
}
