//! Normal logic programs with default negation, classical negation and
//! integrity constraints: terms, parsing, printing and unification.

mod parse;
mod program;
mod term;
mod unify;

pub use parse::{parse_literal, parse_program, parse_query};
pub use program::{render_program, BodyElement, Program, Query, Rule};
pub use term::{is_anonymous, is_plain_atom, is_variable_name, Literal, PredicateKey, Term};
pub use unify::{is_variant, unify, unify_literals, Substitution};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("unsafe variable {variable} in rule `{rule}`")]
    Unsafe { rule: String, variable: String },
}

/// Applies `s` to `t`.
pub fn apply_subst(s: &Substitution, t: &Term) -> Term {
    s.apply(t)
}
