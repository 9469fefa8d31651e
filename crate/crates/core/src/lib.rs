//! A deductive database engine for monadic logic programs whose rules carry
//! statistical probability intervals ("60 to 70 percent of birds fly") rather
//! than degrees of belief about individuals.
//!
//! A program pairs a classical *context* (ground facts and single-variable
//! rules, with explicit negation) with *empirical clauses* of the form
//! `[lo, hi] F(X) :- G(X)`, read "the proportion of G's that are F lies
//! between lo and hi". The engine answers two questions about such a program:
//!
//! * **Consistency** — does any finite interpretation satisfy every clause?
//!   Decided by enumerating the ground models of the context and testing an
//!   exact rational linear system over partition cardinalities for each
//!   ([`consistency`]).
//! * **Queries** — what is known about `F(d)` for a particular constant `d`?
//!   Definite answers come from the context alone; otherwise the engine
//!   chains empirical clauses to a fixpoint ([`compiler`]) and reports a
//!   probability range per maximally specific reference class ([`query`]).
//!
//! All probability arithmetic is exact (`BigRational`); no floats appear
//! anywhere in the engine. The [`oracle`] module holds a definition-level
//! model checker and a bounded-domain model search used to cross-check the
//! main pipeline in tests and from the CLI.

pub mod compiler;
pub mod consistency;
pub mod constraints;
mod error;
pub mod herbrand;
pub mod model;
pub mod oracle;
pub mod propositional;
pub mod query;
pub mod render;
pub mod solver;
pub mod syntax;

pub use error::{Error, Result, Violation, ViolationKind};
pub use model::Mode;
