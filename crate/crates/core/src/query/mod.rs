//! SPARQL subset: parsing, closed-world evaluation and a brute-force oracle.

mod ast;
mod eval;
mod oracle;
mod parser;

pub use ast::{
    CompareOp, Comparison, Element, InvalidQuery, PatternTerm, Query, QueryLocation, Solution, SolutionSet, TriplePattern,
    Variable,
};
pub use eval::{evaluate, EvalError};
pub use oracle::{brute_force_eval, brute_force_eval_with_limit, OracleError, BRUTE_FORCE_LIMIT};
pub use parser::parse_query;
