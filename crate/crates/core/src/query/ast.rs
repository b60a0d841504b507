use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::rdf::Term;
use crate::turtle::PrefixMap;

/// A query variable, stored without its `?` sigil.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(String);

impl Variable {
    pub fn new(name: impl Into<String>) -> Self {
        Variable(name.into())
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(Variable),
    Term(Term),
}

impl PatternTerm {
    pub fn var(name: &str) -> Self {
        PatternTerm::Var(Variable::new(name))
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }
}

impl From<Term> for PatternTerm {
    fn from(term: Term) -> Self {
        PatternTerm::Term(term)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: PatternTerm, predicate: PatternTerm, object: PatternTerm) -> Self {
        TriplePattern {
            subject,
            predicate,
            object,
        }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.positions().into_iter().filter_map(PatternTerm::as_var)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompareOp {
    Eq,
    Ne,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Comparison {
    pub variable: Variable,
    pub op: CompareOp,
    pub value: Term,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Element {
    Pattern(TriplePattern),
    NotExists(Vec<TriplePattern>),
    Exists(Vec<TriplePattern>),
    Compare(Comparison),
}

/// A parsed `SELECT` query over the accepted subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub prefixes: PrefixMap,
    pub projection: Vec<Variable>,
    pub body: Vec<Element>,
}

impl Query {
    pub fn outer_patterns(&self) -> impl Iterator<Item = &TriplePattern> {
        self.body.iter().filter_map(|e| match e {
            Element::Pattern(p) => Some(p),
            _ => None,
        })
    }

    pub fn not_exists_groups(&self) -> impl Iterator<Item = &[TriplePattern]> {
        self.body.iter().filter_map(|e| match e {
            Element::NotExists(g) => Some(g.as_slice()),
            _ => None,
        })
    }

    pub fn exists_groups(&self) -> impl Iterator<Item = &[TriplePattern]> {
        self.body.iter().filter_map(|e| match e {
            Element::Exists(g) => Some(g.as_slice()),
            _ => None,
        })
    }

    /// Variables of the outer patterns, in order of first appearance.
    pub fn outer_variables(&self) -> Vec<Variable> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for v in self.outer_patterns().flat_map(TriplePattern::variables) {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        }
        out
    }

    /// Checks the structural rules the evaluator relies on: projected
    /// variables occur in outer patterns, filter groups are non-empty, and
    /// no filter refers to an outer variable before a pattern binds it.
    pub fn validate(&self) -> Result<(), InvalidQuery> {
        let outer: BTreeSet<Variable> = self.outer_variables().into_iter().collect();
        if self.projection.is_empty() {
            return Err(InvalidQuery::new("SELECT needs at least one variable", QueryLocation::Query));
        }
        let mut projected = BTreeSet::new();
        for (i, v) in self.projection.iter().enumerate() {
            if !outer.contains(v) {
                return Err(InvalidQuery::new(
                    format!("projected variable {v} does not occur in any triple pattern"),
                    QueryLocation::Projection(i),
                ));
            }
            if !projected.insert(v) {
                return Err(InvalidQuery::new(
                    format!("variable {v} is projected twice"),
                    QueryLocation::Projection(i),
                ));
            }
        }
        let mut bound = BTreeSet::new();
        for (i, element) in self.body.iter().enumerate() {
            match element {
                Element::Pattern(p) => bound.extend(p.variables().cloned()),
                Element::NotExists(group) | Element::Exists(group) => {
                    if group.is_empty() {
                        return Err(InvalidQuery::new(
                            "FILTER EXISTS/NOT EXISTS group must contain a pattern",
                            QueryLocation::Element(i),
                        ));
                    }
                    for v in group.iter().flat_map(TriplePattern::variables) {
                        if outer.contains(v) && !bound.contains(v) {
                            return Err(InvalidQuery::new(
                                format!("FILTER refers to {v} before a pattern binds it"),
                                QueryLocation::Element(i),
                            ));
                        }
                    }
                }
                Element::Compare(c) => {
                    if !bound.contains(&c.variable) {
                        return Err(InvalidQuery::new(
                            format!("FILTER refers to {} before a pattern binds it", c.variable),
                            QueryLocation::Element(i),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryLocation {
    Query,
    Projection(usize),
    Element(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidQuery {
    pub message: String,
    pub location: QueryLocation,
}

impl InvalidQuery {
    fn new(message: impl Into<String>, location: QueryLocation) -> Self {
        InvalidQuery {
            message: message.into(),
            location,
        }
    }
}

impl fmt::Display for InvalidQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// One row of results: projected variable name to bound term.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Solution(BTreeMap<String, Term>);

impl Solution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, variable: impl Into<String>, term: Term) {
        self.0.insert(variable.into(), term);
    }

    pub fn get(&self, variable: &str) -> Option<&Term> {
        self.0.get(variable)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Term)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }
}

impl FromIterator<(String, Term)> for Solution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Solution(iter.into_iter().collect())
    }
}

/// IRIs serialize as bare text, other terms in N-Triples form.
impl Serialize for Solution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, &v.to_plain_string())?;
        }
        map.end()
    }
}

pub type SolutionSet = BTreeSet<Solution>;
