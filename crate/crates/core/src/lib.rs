//! Compliance checking of EU Data Act data-sharing contracts.
//!
//! Contracts are RDF graphs over the DAOnt vocabulary. Each built-in rule is
//! a query in a small SPARQL subset whose matches are violations; absence of
//! a required fact is read under the closed-world assumption.

pub mod cli;
pub mod corpus;
pub mod engine;
mod lexer;
pub mod query;
pub mod rdf;
pub mod rules;
pub mod service;
pub mod turtle;
pub mod vocab;

pub use engine::Session;
pub use rdf::{Graph, Term, Triple};
