//! Assurance cases: nodes, edges, controlled vocabulary, loading and
//! structural validation.

mod document;
mod model;
mod validate;
mod vocabulary;

pub use document::{case_to_json, load_case};
pub use model::{
    AssuranceCase, DefeaterStatus, Edge, EdgeKind, EvidenceArtifact, Node, NodeKind, OpeTriple,
    Relationship, RelationshipMode, TheoryApplication, Vocabulary,
};
pub use validate::{validate_case, Diagnostic, RuleViolated, Severity, APPLICATION_VARIABLE};
pub use vocabulary::{vocabulary_of, VocabularyView};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CaseError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("duplicate node id {0}")]
    DuplicateId(String),
    #[error("dangling reference from {from} to unknown node {to}")]
    DanglingReference { from: String, to: String },
    #[error("defeater without target: {0}")]
    DefeaterWithoutTarget(String),
}
