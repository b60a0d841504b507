use std::collections::HashMap;

use thiserror::Error;

use crate::rdf::{Graph, Term};

use super::ast::{CompareOp, Element, PatternTerm, Query, Solution, SolutionSet, TriplePattern, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable {0} is not bound where it is used")]
    UnboundVariable(Variable),
}

/// Slot-indexed partial assignment; terms borrow from the graph or query.
type Binding<'a> = Vec<Option<&'a Term>>;

enum Slot<'a> {
    Const(&'a Term),
    Var(usize),
}

struct Compiled<'a> {
    slots: HashMap<&'a Variable, usize>,
}

impl<'a> Compiled<'a> {
    fn slot(&mut self, v: &'a Variable) -> usize {
        let next = self.slots.len();
        *self.slots.entry(v).or_insert(next)
    }

    fn pattern(&mut self, p: &'a TriplePattern) -> [Slot<'a>; 3] {
        p.positions().map(|pt| match pt {
            PatternTerm::Term(t) => Slot::Const(t),
            PatternTerm::Var(v) => Slot::Var(self.slot(v)),
        })
    }
}

/// Left-to-right nested-loop evaluation under the closed-world reading of
/// `FILTER NOT EXISTS`: a binding survives a NOT EXISTS group iff the group,
/// with the binding substituted, has no match in the graph.
///
/// Results are deduplicated and projected to the SELECT variables.
pub fn evaluate(graph: &Graph, query: &Query) -> Result<SolutionSet, EvalError> {
    let mut compiled = Compiled { slots: HashMap::new() };
    let steps: Vec<Step<'_>> = query
        .body
        .iter()
        .map(|element| match element {
            Element::Pattern(p) => Step::Pattern(compiled.pattern(p)),
            Element::NotExists(group) => Step::NotExists(group.iter().map(|p| compiled.pattern(p)).collect()),
            Element::Exists(group) => Step::Exists(group.iter().map(|p| compiled.pattern(p)).collect()),
            Element::Compare(c) => Step::Compare(&c.variable, compiled.slot(&c.variable), c.op, &c.value),
        })
        .collect();
    let projection: Vec<(&Variable, usize)> = query.projection.iter().map(|v| (v, compiled.slot(v))).collect();
    let width = compiled.slots.len();

    let mut bindings: Vec<Binding<'_>> = vec![vec![None; width]];
    for step in &steps {
        bindings = match step {
            Step::Pattern(pattern) => bindings
                .iter()
                .flat_map(|b| extend(graph, pattern, b))
                .collect(),
            Step::NotExists(group) => bindings.into_iter().filter(|b| !group_matches(graph, group, b)).collect(),
            Step::Exists(group) => bindings.into_iter().filter(|b| group_matches(graph, group, b)).collect(),
            Step::Compare(variable, slot, op, value) => {
                let mut kept = Vec::with_capacity(bindings.len());
                for b in bindings {
                    let bound = b[*slot].ok_or_else(|| EvalError::UnboundVariable((*variable).clone()))?;
                    if (bound == *value) == (*op == CompareOp::Eq) {
                        kept.push(b);
                    }
                }
                kept
            }
        };
        if bindings.is_empty() {
            break;
        }
    }

    let mut out = SolutionSet::new();
    for b in bindings {
        let mut solution = Solution::new();
        for (variable, slot) in &projection {
            let term = b[*slot].ok_or_else(|| EvalError::UnboundVariable((*variable).clone()))?;
            solution.insert(variable.name(), term.clone());
        }
        out.insert(solution);
    }
    Ok(out)
}

enum Step<'a> {
    Pattern([Slot<'a>; 3]),
    NotExists(Vec<[Slot<'a>; 3]>),
    Exists(Vec<[Slot<'a>; 3]>),
    Compare(&'a Variable, usize, CompareOp, &'a Term),
}

fn resolve<'a>(slot: &Slot<'a>, binding: &Binding<'a>) -> Option<&'a Term> {
    match slot {
        Slot::Const(t) => Some(t),
        Slot::Var(i) => binding[*i],
    }
}

/// All extensions of `binding` by one triple pattern.
fn extend<'a>(graph: &'a Graph, pattern: &[Slot<'a>; 3], binding: &Binding<'a>) -> Vec<Binding<'a>> {
    let [s, p, o] = pattern.each_ref().map(|slot| resolve(slot, binding));
    let mut out = Vec::new();
    'triples: for triple in graph.find(s, p, o) {
        let mut next = binding.clone();
        for (slot, term) in pattern.iter().zip([triple.subject(), triple.predicate(), triple.object()]) {
            if let Slot::Var(i) = slot {
                match next[*i] {
                    // Repeated variable within one pattern must agree.
                    Some(existing) if existing != term => continue 'triples,
                    _ => next[*i] = Some(term),
                }
            }
        }
        out.push(next);
    }
    out
}

/// Whether some extension of `binding` satisfies every pattern in `group`.
fn group_matches<'a>(graph: &'a Graph, group: &[[Slot<'a>; 3]], binding: &Binding<'a>) -> bool {
    match group.split_first() {
        None => true,
        Some((first, rest)) => extend(graph, first, binding)
            .iter()
            .any(|next| group_matches(graph, rest, next)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;
    use crate::turtle::parse_turtle;

    const DATA: &str = "@prefix ex: <http://example.org/> .
        ex:a ex:p ex:b . ex:b ex:p ex:c . ex:c ex:p ex:c . ex:a ex:q \"1\" .";

    fn run(query: &str) -> Vec<Vec<String>> {
        let g = parse_turtle(DATA, None).unwrap();
        let q = parse_query(&format!("PREFIX ex: <http://example.org/> {query}")).unwrap();
        evaluate(&g, &q)
            .unwrap()
            .into_iter()
            .map(|s| s.iter().map(|(k, v)| format!("{k}={}", v.to_plain_string())).collect())
            .collect()
    }

    #[test]
    fn join_and_repeated_variables() {
        assert_eq!(
            run("SELECT ?x ?z WHERE { ?x ex:p ?y . ?y ex:p ?z }"),
            vec![
                vec!["x=http://example.org/a", "z=http://example.org/c"],
                vec!["x=http://example.org/b", "z=http://example.org/c"],
                vec!["x=http://example.org/c", "z=http://example.org/c"],
            ]
        );
        assert_eq!(run("SELECT ?x WHERE { ?x ex:p ?x }"), vec![vec!["x=http://example.org/c"]]);
    }

    #[test]
    fn not_exists_and_exists() {
        assert_eq!(
            run("SELECT ?x WHERE { ?x ex:p ?y FILTER NOT EXISTS { ?x ex:q ?v } }"),
            vec![vec!["x=http://example.org/b"], vec!["x=http://example.org/c"]]
        );
        assert_eq!(
            run("SELECT ?x WHERE { ?x ex:p ?y FILTER EXISTS { ?x ex:q ?v } }"),
            vec![vec!["x=http://example.org/a"]]
        );
    }

    #[test]
    fn comparisons_are_term_equality() {
        assert_eq!(run("SELECT ?x WHERE { ?x ex:q ?v FILTER(?v = \"1\") }").len(), 1);
        assert_eq!(run("SELECT ?x WHERE { ?x ex:q ?v FILTER(?v = 1) }").len(), 0);
        assert_eq!(run("SELECT ?x WHERE { ?x ex:p ?y FILTER(?y != ex:c) }").len(), 1);
    }

    #[test]
    fn results_are_deduplicated() {
        assert_eq!(run("SELECT ?x WHERE { ?x ?p ?o }").len(), 3);
    }

    #[test]
    fn unbound_comparison_is_an_error() {
        let g = parse_turtle(DATA, None).unwrap();
        let mut q = parse_query("PREFIX ex: <http://example.org/> SELECT ?x WHERE { ?x ex:p ?y }").unwrap();
        q.body.insert(
            0,
            Element::Compare(crate::query::Comparison {
                variable: Variable::new("y"),
                op: CompareOp::Eq,
                value: Term::iri("http://example.org/b").unwrap(),
            }),
        );
        assert_eq!(evaluate(&g, &q), Err(EvalError::UnboundVariable(Variable::new("y"))));
    }
}
