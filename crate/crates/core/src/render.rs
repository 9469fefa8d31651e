//! Result rendering: the human text and JSON forms of consistency reports
//! and query answers.
//!
//! Human output favors decimals (`[0, 0.1] via {Royal_elephant}`); JSON
//! carries probabilities as exact fraction strings so nothing is lost to
//! floating point.

use num::rational::BigRational;
use num::One;
use serde_json::{json, Value};

use crate::consistency::ConsistencyReport;
use crate::herbrand::HerbrandModel;
use crate::model::Predicates;
use crate::query::QueryAnswer;

/// Exact fraction text: `"9/20"`, or just `"4"` for integers.
pub fn fraction(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Every base atom of a ground model as a signed literal, sorted.
pub fn model_literals(model: &HerbrandModel, preds: &Predicates) -> Vec<String> {
    model
        .base
        .iter()
        .map(|atom| {
            let sign = if model.holds(atom) { "" } else { "~" };
            format!("{sign}{}({})", preds.name(atom.predicate), atom.constant)
        })
        .collect()
}

fn witness_pairs(counts: &[u64]) -> Vec<(String, u64)> {
    counts
        .iter()
        .enumerate()
        .map(|(i, &n)| (format!("v{}", i + 1), n))
        .collect()
}

pub fn render_check_human(report: &ConsistencyReport, preds: &Predicates) -> String {
    if !report.consistent {
        return "inconsistent\n".into();
    }
    let mut out = String::from("consistent\n");
    if let Some(counts) = &report.witness_counts {
        let cells: Vec<String> = witness_pairs(counts)
            .into_iter()
            .map(|(v, n)| format!("{v}={n}"))
            .collect();
        out.push_str(&format!("witness: {}\n", cells.join(" ")));
    }
    if let Some(model) = &report.witness_model {
        let literals = model_literals(model, preds);
        if !literals.is_empty() {
            out.push_str(&format!("model: {}\n", literals.join(" ")));
        }
    }
    out
}

pub fn render_check_json(report: &ConsistencyReport, preds: &Predicates) -> Value {
    let mut obj = json!({
        "kind": if report.consistent { "consistent" } else { "inconsistent" },
        "mode": report.mode.to_string(),
    });
    if let Some(counts) = &report.witness_counts {
        let witness: serde_json::Map<String, Value> = witness_pairs(counts)
            .into_iter()
            .map(|(v, n)| (v, json!(n)))
            .collect();
        obj["witness"] = Value::Object(witness);
    }
    if let Some(model) = &report.witness_model {
        obj["model"] = json!(model_literals(model, preds));
    }
    obj
}

pub fn render_answer_human(answer: &QueryAnswer, preds: &Predicates) -> String {
    match answer {
        QueryAnswer::Definite(true) => "1\n".into(),
        QueryAnswer::Definite(false) => "0\n".into(),
        QueryAnswer::NoEvidence => "no-evidence\n".into(),
        QueryAnswer::Inductive(results) => {
            let mut out = String::new();
            for r in results {
                let members: Vec<String> = r
                    .cluster
                    .iter()
                    .map(|f| f.display(preds).to_string())
                    .collect();
                out.push_str(&format!("{} via {{{}}}\n", r.range, members.join(", ")));
            }
            out
        }
    }
}

pub fn render_answer_json(answer: &QueryAnswer, preds: &Predicates) -> Value {
    match answer {
        QueryAnswer::Definite(truth) => json!({
            "kind": "definite",
            "value": if *truth { 1 } else { 0 },
        }),
        QueryAnswer::NoEvidence => json!({ "kind": "no-evidence" }),
        QueryAnswer::Inductive(results) => {
            let results: Vec<Value> = results
                .iter()
                .map(|r| {
                    let members: Vec<String> = r
                        .cluster
                        .iter()
                        .map(|f| f.display(preds).to_string())
                        .collect();
                    json!({
                        "cluster": members,
                        "lo": fraction(r.range.lo()),
                        "hi": fraction(r.range.hi()),
                    })
                })
                .collect();
            json!({ "kind": "inductive", "results": results })
        }
    }
}
