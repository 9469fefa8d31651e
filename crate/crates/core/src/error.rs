use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A single rule the program text breaks. Collected exhaustively rather than
/// failing at the first offence so the CLI can report everything at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// 1-based (line, column) of the offending statement, when known.
    pub location: Option<(usize, usize)>,
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    /// A context clause mixes the variable `X` with constants.
    MixedArguments,
    /// An empirical interval of `[0, 0]` or `[1, 1]`; certainty belongs in
    /// the context, not in an empirical clause.
    ForbiddenInterval,
    /// Interval bounds outside `[0, 1]` or with `lo > hi`.
    InvalidBounds,
    UndeclaredPredicate,
    DuplicatePredicate,
    /// More predicate symbols than the configured partition cap allows.
    PredicateLimit,
    ReservedName,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Some((line, col)) => write!(f, "{}:{}: {}", line, col, self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid program:\n{}", format_violations(.0))]
    Invalid(Vec<Violation>),

    /// The chaining closure outgrew its configured budget. Raised instead of
    /// silently truncating so callers can retry with a larger cap.
    #[error("compilation cap exceeded: {0}")]
    CapExceeded(String),

    /// A constraint references a variable outside the system; a usage error,
    /// deliberately distinct from infeasibility.
    #[error("degenerate constraint system: {0}")]
    Degenerate(String),

    #[error("feasibility witness does not fit in 64-bit counts")]
    CountsOverflow,

    #[error("cannot build an interpretation: {0}")]
    Materialize(String),

    /// Applicable clauses over one reference class have an empty interval
    /// intersection; the message names the conflicting clauses.
    #[error("conflicting evidence: {0}")]
    EmptyIntersection(String),
}

impl Error {
    pub fn invalid_one(kind: ViolationKind, message: impl Into<String>) -> Self {
        Error::Invalid(vec![Violation {
            location: None,
            kind,
            message: message.into(),
        }])
    }
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(|v| format!("  {}", v))
        .collect::<Vec<_>>()
        .join("\n")
}
