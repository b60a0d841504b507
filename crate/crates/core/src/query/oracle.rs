//! Reference evaluator used to cross-check [`evaluate`](super::evaluate).
//!
//! It assigns every variable a term drawn from the graph's term universe,
//! one variable at a time, and checks patterns and filters by definition
//! against a linear scan of the triple set. No index is consulted. A
//! pattern that is only partly assigned prunes the search when no triple
//! agrees with its assigned positions.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::rdf::{Graph, Term, Triple};

use super::ast::{CompareOp, Element, PatternTerm, Query, Solution, SolutionSet, TriplePattern, Variable};

/// Default cap on candidate assignments tried before giving up.
pub const BRUTE_FORCE_LIMIT: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("brute-force search exceeded {limit} candidate assignments")]
    GuardExceeded { limit: usize },
    #[error("variable {0} is not bound by any triple pattern")]
    UnboundVariable(Variable),
}

pub fn brute_force_eval(graph: &Graph, query: &Query) -> Result<SolutionSet, OracleError> {
    brute_force_eval_with_limit(graph, query, BRUTE_FORCE_LIMIT)
}

pub fn brute_force_eval_with_limit(graph: &Graph, query: &Query, limit: usize) -> Result<SolutionSet, OracleError> {
    let triples: Vec<&Triple> = graph.iter().collect();
    let mut universe: Vec<&Term> = Vec::new();
    for t in &triples {
        universe.extend([t.subject(), t.predicate(), t.object()]);
    }
    universe.sort();
    universe.dedup();

    let outer: Vec<&TriplePattern> = query.outer_patterns().collect();
    let mut order: Vec<&Variable> = Vec::new();
    for v in outer.iter().flat_map(|p| p.variables()) {
        if !order.contains(&v) {
            order.push(v);
        }
    }
    for element in &query.body {
        if let Element::Compare(c) = element {
            if !order.contains(&&c.variable) {
                return Err(OracleError::UnboundVariable(c.variable.clone()));
            }
        }
    }
    for v in &query.projection {
        if !order.contains(&v) {
            return Err(OracleError::UnboundVariable(v.clone()));
        }
    }

    let mut search = Search {
        triples: &triples,
        universe: &universe,
        budget: limit,
        limit,
    };
    let mut out = SolutionSet::new();
    let mut assignment = BTreeMap::new();
    search.assign(&outer, &order, &mut assignment, &mut |search, assignment| {
        if search.filters_hold(query, assignment)? {
            let solution = query
                .projection
                .iter()
                .map(|v| (v.name().to_owned(), assignment[v].clone()))
                .collect::<Solution>();
            out.insert(solution);
        }
        Ok(())
    })?;
    Ok(out)
}

type Assignment<'a> = BTreeMap<&'a Variable, &'a Term>;
type Partial<'v, 'a> = BTreeMap<&'v Variable, &'a Term>;

struct Search<'g, 'a> {
    triples: &'g [&'a Triple],
    universe: &'g [&'a Term],
    budget: usize,
    limit: usize,
}

impl<'a> Search<'_, 'a> {
    fn spend(&mut self) -> Result<(), OracleError> {
        if self.budget == 0 {
            return Err(OracleError::GuardExceeded { limit: self.limit });
        }
        self.budget -= 1;
        Ok(())
    }

    /// Whether some triple agrees with every assigned position of `pattern`.
    fn consistent(&self, pattern: &TriplePattern, assignment: &Assignment<'a>) -> bool {
        fn want<'x>(pt: &'x PatternTerm, assignment: &Assignment<'x>) -> Option<&'x Term> {
            match pt {
                PatternTerm::Term(t) => Some(t),
                PatternTerm::Var(v) => assignment.get(v).copied(),
            }
        }
        let (s, p, o) = (
            want(&pattern.subject, assignment),
            want(&pattern.predicate, assignment),
            want(&pattern.object, assignment),
        );
        self.triples.iter().any(|t| {
            s.is_none_or(|s| t.subject() == s)
                && p.is_none_or(|p| t.predicate() == p)
                && o.is_none_or(|o| t.object() == o)
        })
    }

    /// Enumerates assignments of `vars` (in order) satisfying `patterns`,
    /// calling `leaf` for each complete one.
    fn assign<'v>(
        &mut self,
        patterns: &[&TriplePattern],
        vars: &[&'v Variable],
        assignment: &mut Partial<'v, 'a>,
        leaf: &mut dyn FnMut(&mut Self, &Partial<'v, 'a>) -> Result<(), OracleError>,
    ) -> Result<(), OracleError>
    where
        'v: 'a,
    {
        if !patterns.iter().all(|p| self.consistent(p, assignment)) {
            return Ok(());
        }
        let Some((var, rest)) = vars.split_first() else {
            return leaf(self, assignment);
        };
        for &term in self.universe {
            self.spend()?;
            assignment.insert(var, term);
            self.assign(patterns, rest, assignment, leaf)?;
            assignment.remove(var);
        }
        Ok(())
    }

    /// Checks every filter of the query against a complete outer assignment.
    fn filters_hold(&mut self, query: &'a Query, assignment: &Assignment<'a>) -> Result<bool, OracleError> {
        for element in &query.body {
            let holds = match element {
                Element::Pattern(_) => true,
                Element::NotExists(group) => !self.group_satisfiable(group, assignment)?,
                Element::Exists(group) => self.group_satisfiable(group, assignment)?,
                Element::Compare(c) => {
                    let bound = assignment[&c.variable];
                    (bound == &c.value) == (c.op == CompareOp::Eq)
                }
            };
            if !holds {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn group_satisfiable(&mut self, group: &'a [TriplePattern], outer: &Assignment<'a>) -> Result<bool, OracleError> {
        let patterns: Vec<&TriplePattern> = group.iter().collect();
        let mut fresh: Vec<&Variable> = Vec::new();
        for v in group.iter().flat_map(|p| p.variables()) {
            if !outer.contains_key(v) && !fresh.contains(&v) {
                fresh.push(v);
            }
        }
        let mut assignment = outer.clone();
        let mut found = false;
        self.assign(&patterns, &fresh, &mut assignment, &mut |search, complete| {
            // A complete assignment is a match iff every pattern is a triple.
            if patterns.iter().all(|p| search.consistent(p, complete)) {
                found = true;
            }
            Ok(())
        })?;
        Ok(found)
    }
}
