//! The acceptance gate: nine checks covering the published behavior of the
//! whole pipeline, from constraint translation through query answering.
//! Each prints one `criterion N: PASS` line (visible under `--nocapture`);
//! a failed assertion is the corresponding FAIL.
//!
//! Tolerances are exact rational equality throughout — no epsilons anywhere.
//! Timing bounds are asserted where a check is meant to stay interactive.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num::rational::BigRational;
use num::{BigInt, One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use empdb::compiler::compile;
use empdb::consistency::{assemble_system, check_consistency};
use empdb::constraints::{empirical_system, LinearConstraint, Relation};
use empdb::herbrand::{enumerate_models, split_context};
use empdb::model::{
    ComplexPredicate, ContextClause, EmpiricalClause, EmpiricalProgram, Formula, GroundClause,
    GroundLiteral, Predicates, ProbabilityInterval, RuleLiteral, UnaryRule,
};
use empdb::oracle::{materialize, search_models, Interpretation};
use empdb::query::{answer, Query, QueryAnswer};
use empdb::render::render_answer_human;
use empdb::solver::solve;
use empdb::syntax::{parse_program, render_program};
use empdb::Mode;

const SEALS_CLOSED: &str = "\
pred Monk_seal.
pred Female.
Monk_seal(joe).
~Female(joe).
[0.4, 0.45] Female(X) :- Monk_seal(X).
";

const ELEPHANTS: &str = "\
pred Grey.
pred Royal_elephant.
pred Elephant.
pred White.
Elephant(X) :- Royal_elephant(X).
Grey(X) :- ~White(X).
Royal_elephant(clyde).
Elephant(jill).
[0, 0.1] Grey(X) :- Royal_elephant(X).
[0.9, 0.95] Grey(X) :- Elephant(X).
[0.1, 0.2] Elephant(X) :- Grey(X).
";

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn row(coeffs: &[(usize, BigRational)], relation: Relation, rhs: BigRational) -> LinearConstraint {
    LinearConstraint::new(coeffs.iter().cloned().collect(), relation, rhs, "expected")
}

/// The three rows every system over the closed-seal clause shares: the two
/// ratio bounds of `[0.4, 0.45] Female :- Monk_seal` under the partition
/// order (Monk_seal, Female), and the nonempty-domain row.
fn seal_ratio_rows() -> Vec<LinearConstraint> {
    vec![
        row(
            &[(1, q(-3, 5)), (2, q(2, 5))],
            Relation::Le,
            BigRational::zero(),
        ),
        row(
            &[(1, q(11, 20)), (2, q(-9, 20))],
            Relation::Le,
            BigRational::zero(),
        ),
        row(
            &[
                (1, BigRational::one()),
                (2, BigRational::one()),
                (3, BigRational::one()),
                (4, BigRational::one()),
            ],
            Relation::Ge,
            BigRational::one(),
        ),
    ]
}

fn assert_rows_match(sys_rows: &[LinearConstraint], expected: &[LinearConstraint]) {
    assert_eq!(
        sys_rows.len(),
        expected.len(),
        "system has {} rows, expected {}",
        sys_rows.len(),
        expected.len()
    );
    for want in expected {
        assert!(
            sys_rows.contains(want),
            "missing row: {}",
            want.render()
        );
    }
}

#[test]
fn criterion_1_single_clause_translation_is_exact() {
    let start = Instant::now();

    let preds = Predicates::new(["Monk_seal", "Female"]);
    let clauses = vec![EmpiricalClause {
        interval: ProbabilityInterval::ratio(2, 5, 9, 20),
        head: ComplexPredicate::atom(1),
        body: vec![ComplexPredicate::atom(0)],
    }];
    let sys = empirical_system(&clauses, &preds);
    assert_rows_match(&sys.constraints, &seal_ratio_rows());

    assert!(sys.satisfied_by_counts(&[4, 6, 0, 10]));
    // The bounds bite: a census off the ratio fails the same rows.
    assert!(!sys.satisfied_by_counts(&[3, 7, 0, 10]));
    assert!(!sys.satisfied_by_counts(&[5, 5, 0, 10]));

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 1: PASS — one clause yields exactly the two ratio rows plus nonemptiness; (4,6,0,10) satisfies them"
    );
}

#[test]
fn criterion_2_closed_seal_check_emits_the_published_system() {
    let start = Instant::now();
    let program = parse_program(SEALS_CLOSED).unwrap();

    let paper = check_consistency(&program, Mode::Paper).unwrap();
    assert!(paper.consistent, "paper mode must accept the closed seals");
    let sys = assemble_system(&program, paper.witness_model.as_ref().unwrap(), Mode::Paper);
    let mut expected = seal_ratio_rows();
    // Per-predicate population floors: one Monk_seal, one non-Female.
    expected.push(row(
        &[(1, BigRational::one()), (2, BigRational::one())],
        Relation::Ge,
        BigRational::one(),
    ));
    expected.push(row(
        &[(2, BigRational::one()), (4, BigRational::one())],
        Relation::Ge,
        BigRational::one(),
    ));
    assert_rows_match(&sys.constraints, &expected);
    let counts = paper.witness_counts.unwrap();
    assert!(sys.satisfied_by_counts(&counts), "witness fails by substitution");

    let strict = check_consistency(&program, Mode::Strict).unwrap();
    assert!(strict.consistent, "strict mode must also accept the closed seals");
    let sys = assemble_system(&program, strict.witness_model.as_ref().unwrap(), Mode::Strict);
    // Per-signature floor: joe's full description (Monk_seal, not Female)
    // replaces the two per-predicate rows.
    let mut expected = seal_ratio_rows();
    expected.push(row(
        &[(2, BigRational::one())],
        Relation::Ge,
        BigRational::one(),
    ));
    assert_rows_match(&sys.constraints, &expected);
    let counts = strict.witness_counts.unwrap();
    assert!(sys.satisfied_by_counts(&counts), "witness fails by substitution");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 2: PASS — closed-seal verdict consistent in both modes with exactly the expected rows, witnesses verified"
    );
}

#[test]
fn criterion_3_elephant_queries_reproduce_the_published_answers() {
    let start = Instant::now();
    let program = parse_program(ELEPHANTS).unwrap();
    let comp = compile(&program).unwrap();
    let preds = &program.predicates;

    let membership = answer(
        &comp,
        &Query {
            subject: "clyde".into(),
            property: ComplexPredicate::atom(2),
        },
    )
    .unwrap();
    assert!(
        matches!(membership, QueryAnswer::Definite(true)),
        "Elephant(clyde) must be a definite yes"
    );
    assert_eq!(render_answer_human(&membership, preds), "1\n");

    let not_white = answer(
        &comp,
        &Query {
            subject: "clyde".into(),
            property: ComplexPredicate::new(Formula::not(Formula::Atom(3))),
        },
    )
    .unwrap();
    let QueryAnswer::Inductive(results) = &not_white else {
        panic!("~White(clyde) must be answered from evidence, got {not_white:?}");
    };
    assert_eq!(results.len(), 1, "exactly one reference class expected");
    let cluster: Vec<String> = results[0]
        .cluster
        .iter()
        .map(|f| f.display(preds).to_string())
        .collect();
    assert_eq!(cluster, vec!["Royal_elephant".to_string()]);
    assert_eq!(results[0].range, ProbabilityInterval::ratio(0, 1, 1, 10));
    // The broader elephant-population range is dominated and must not appear.
    let broad = ProbabilityInterval::ratio(0, 1, 19, 20);
    assert!(results.iter().all(|r| r.range != broad));

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    println!(
        "criterion 3: PASS — Elephant(clyde) is 1 and ~White(clyde) is [0, 0.1] via the royal elephants alone"
    );
}

const GRID: [(i64, i64); 5] = [(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)];

fn random_interval(rng: &mut StdRng) -> ProbabilityInterval {
    loop {
        let lo = rng.random_range(0..GRID.len());
        let hi = rng.random_range(lo..GRID.len());
        if (lo == 0 && hi == 0) || lo == GRID.len() - 1 {
            continue;
        }
        let (ln, ld) = GRID[lo];
        let (hn, hd) = GRID[hi];
        return ProbabilityInterval::ratio(ln, ld, hn, hd);
    }
}

fn random_formula(rng: &mut StdRng, k: usize, depth: usize) -> Formula {
    if depth == 0 || rng.random_bool(0.55) {
        let atom = Formula::Atom(rng.random_range(0..k));
        return if rng.random_bool(0.3) {
            Formula::not(atom)
        } else {
            atom
        };
    }
    let a = random_formula(rng, k, depth - 1);
    match rng.random_range(0..3) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_formula(rng, k, depth - 1)),
        _ => Formula::or(a, random_formula(rng, k, depth - 1)),
    }
}

fn random_clauses(rng: &mut StdRng, k: usize, count: usize) -> Vec<EmpiricalClause> {
    (0..count)
        .map(|_| {
            let head = ComplexPredicate::new(random_formula(rng, k, 2));
            let body_len = rng.random_range(0..=2);
            let body = (0..body_len)
                .map(|_| ComplexPredicate::new(random_formula(rng, k, 1)))
                .collect();
            EmpiricalClause {
                interval: random_interval(rng),
                head,
                body,
            }
        })
        .collect()
}

#[test]
fn criterion_4_ratio_satisfaction_equals_the_linear_rows() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(4001);
    // Count agreements on each side so the suite cannot pass vacuously.
    let mut seen = [0usize; 2];

    for round in 0..1000 {
        let k = rng.random_range(1..=3usize);
        let names: Vec<String> = (0..k).map(|i| format!("P{i}")).collect();
        let count = rng.random_range(1..=3);
        let clauses = random_clauses(&mut rng, k, count);
        let program = EmpiricalProgram::new(
            Predicates::new(names.iter().map(String::as_str)),
            vec![],
            clauses,
        );

        let domain = rng.random_range(1..=8usize);
        let ncells = 1usize << k;
        let cells: Vec<usize> = (0..domain).map(|_| rng.random_range(0..ncells)).collect();
        let interp = Interpretation::new(k, cells, BTreeMap::new()).unwrap();

        let by_ratios = interp.is_model(&program).unwrap();
        let by_rows = empirical_system(&program.empirical, &program.predicates)
            .satisfied_by_counts(&interp.partition_counts());
        assert_eq!(
            by_ratios,
            by_rows,
            "round {round}: ratio test and linear rows disagree on\n{}",
            render_program(&program)
        );
        seen[usize::from(by_ratios)] += 1;
    }
    assert!(
        seen[0] >= 50 && seen[1] >= 50,
        "suite is one-sided: {seen:?}"
    );

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!(
        "criterion 4: PASS — 1000 (interpretation, clause-set) pairs agree between direct ratios and linear rows ({} / {} split)",
        seen[1], seen[0]
    );
}

fn random_program(rng: &mut StdRng) -> EmpiricalProgram {
    let k = rng.random_range(2..=3usize);
    let names: Vec<String> = (0..k).map(|i| format!("P{i}")).collect();
    let consts = ["a", "b"];
    let mut context = Vec::new();
    for _ in 0..rng.random_range(0..=2) {
        context.push(ContextClause::Ground(GroundClause {
            head: GroundLiteral {
                negated: rng.random_bool(0.3),
                predicate: rng.random_range(0..k),
                constant: consts[rng.random_range(0..2)].into(),
            },
            body: vec![],
        }));
    }
    for _ in 0..rng.random_range(0..=2) {
        let lit = |rng: &mut StdRng| {
            let p = rng.random_range(0..k);
            if rng.random_bool(0.4) {
                RuleLiteral::neg(p)
            } else {
                RuleLiteral::pos(p)
            }
        };
        let head = lit(rng);
        let body = vec![lit(rng)];
        context.push(ContextClause::Rule(UnaryRule { head, body }));
    }
    let count = rng.random_range(1..=3);
    let clauses = random_clauses(rng, k, count);
    EmpiricalProgram::new(
        Predicates::new(names.iter().map(String::as_str)),
        context,
        clauses,
    )
}

fn random_interpretation(rng: &mut StdRng, program: &EmpiricalProgram) -> Interpretation {
    let k = program.k();
    let ncells = 1usize << k;
    let nconsts = program.constants.len();
    let domain = rng.random_range(nconsts.max(1)..=6.max(nconsts));
    let cells: Vec<usize> = (0..domain).map(|_| rng.random_range(0..ncells)).collect();
    let mut free: Vec<usize> = (0..domain).collect();
    let mut constant_map = BTreeMap::new();
    for name in &program.constants {
        let slot = rng.random_range(0..free.len());
        constant_map.insert(name.clone(), free.swap_remove(slot));
    }
    Interpretation::new(k, cells, constant_map).unwrap()
}

#[test]
fn criterion_5_chaining_preserves_models_at_scale() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(5001);
    let mut consistent = 0usize;
    let mut attempts = 0usize;

    while consistent < 500 {
        attempts += 1;
        assert!(
            attempts < 5000,
            "generator found only {consistent} consistent programs in {attempts} draws"
        );
        let program = random_program(&mut rng);
        if !check_consistency(&program, Mode::Strict).unwrap().consistent {
            continue;
        }
        consistent += 1;

        let comp = compile(&program).unwrap();
        let compiled_view = EmpiricalProgram::new(
            program.predicates.clone(),
            program.context.clone(),
            comp.clauses.clone(),
        );
        for _ in 0..100 {
            let interp = random_interpretation(&mut rng, &program);
            let before = interp.is_model(&program).unwrap();
            let after = interp.is_model(&compiled_view).unwrap();
            assert_eq!(
                before,
                after,
                "chaining changed the models of\n{}",
                render_program(&program)
            );
        }
    }

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!(
        "criterion 5: PASS — 500 consistent programs x 100 interpretations: chaining preserved every model verdict"
    );
}

#[test]
fn criterion_6_strict_witnesses_materialize_into_models() {
    let mut rng = StdRng::seed_from_u64(6001);
    let mut consistent = 0usize;

    for round in 0..500 {
        let program = random_program(&mut rng);
        let report = check_consistency(&program, Mode::Strict).unwrap();
        if !report.consistent {
            continue;
        }
        consistent += 1;
        let interp = materialize(
            report.witness_model.as_ref().unwrap(),
            report.witness_counts.as_ref().unwrap(),
            &program,
        )
        .unwrap_or_else(|err| {
            panic!(
                "round {round}: witness failed to materialize ({err}) for\n{}",
                render_program(&program)
            )
        });
        assert!(
            interp.is_model(&program).unwrap(),
            "round {round}: materialized witness is not a model of\n{}",
            render_program(&program)
        );
    }
    assert!(
        consistent >= 100,
        "only {consistent} of 500 programs were consistent; the suite is too thin"
    );
    println!(
        "criterion 6: PASS — every strict consistency witness ({consistent} of 500 programs) materialized into a checked model"
    );
}

#[test]
fn criterion_7_found_models_imply_a_consistent_verdict() {
    let mut rng = StdRng::seed_from_u64(7001);
    let mut found = 0usize;

    for round in 0..500 {
        let program = random_program(&mut rng);
        if let Some(interp) = search_models(&program, 8).unwrap() {
            found += 1;
            assert!(
                interp.is_model(&program).unwrap(),
                "round {round}: search returned a non-model"
            );
            assert!(
                check_consistency(&program, Mode::Strict).unwrap().consistent,
                "round {round}: a model exists but the check said inconsistent for\n{}",
                render_program(&program)
            );
        }
    }
    assert!(
        found >= 100,
        "search found models for only {found} of 500 programs; the suite is too thin"
    );
    println!(
        "criterion 7: PASS — bounded search found models for {found} of 500 programs and the checker agreed each time"
    );
}

#[test]
fn criterion_8_integer_witnesses_scale_freely() {
    let mut rng = StdRng::seed_from_u64(8001);
    let mut feasible = 0usize;
    let mut attempts = 0usize;

    'outer: while feasible < 200 {
        attempts += 1;
        assert!(
            attempts < 4000,
            "only {feasible} feasible systems in {attempts} draws"
        );
        let program = random_program(&mut rng);
        let (rules, ground) = split_context(&program);
        for model in enumerate_models(&ground, &rules, Mode::Strict, program.k())
            .into_iter()
            .take(3)
        {
            let sys = assemble_system(&program, &model, Mode::Strict);
            let result = solve(&sys).unwrap();
            if !result.feasible {
                continue;
            }
            let witness = result.witness.expect("feasible results carry a witness");
            for scale in [1u32, 2, 7, 100] {
                let assignment: Vec<BigRational> = witness
                    .iter()
                    .map(|w| BigRational::from_integer(w * BigInt::from(scale)))
                    .collect();
                assert!(
                    sys.satisfied_by(&assignment),
                    "witness scaled by {scale} fails a row of\n{}",
                    render_program(&program)
                );
            }
            feasible += 1;
            if feasible == 200 {
                break 'outer;
            }
        }
    }
    println!(
        "criterion 8: PASS — 200 engine-emitted feasible systems: integer witnesses verify exactly at scales 1, 2, 7, and 100"
    );
}

#[test]
fn criterion_9_per_predicate_counts_miss_what_signatures_catch() {
    let start = Instant::now();
    let program = parse_program(
        "pred A.\npred B.\nA(X) :- B(X).\nB(c).\n~A(c).\n",
    )
    .unwrap();

    assert!(
        check_consistency(&program, Mode::Paper).unwrap().consistent,
        "per-predicate counting should accept this program"
    );
    assert!(
        !check_consistency(&program, Mode::Strict).unwrap().consistent,
        "per-signature counting should reject this program"
    );
    assert!(
        search_models(&program, 8).unwrap().is_none(),
        "no model should exist on any domain up to 8"
    );

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!(
        "criterion 9: PASS — the divergence program is paper-consistent, strict-inconsistent, and model-free up to domain 8"
    );
}
