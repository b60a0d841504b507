//! RDF term model and an indexed in-memory triple store.

mod graph;
mod term;

pub use graph::Graph;
pub use term::{BlankNode, Iri, Literal, Term, Triple};
pub(crate) use term::{escape_string, is_absolute_iri};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RdfError {
    #[error("invalid IRI `{0}`: an absolute IRI with a scheme is required")]
    InvalidIri(String),
    #[error("invalid blank node label `{0}`")]
    InvalidBlankLabel(String),
    #[error("invalid language tag `{0}`")]
    InvalidLanguageTag(String),
    #[error("malformed triple: {0}")]
    MalformedTriple(&'static str),
}
