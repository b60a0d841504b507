#![allow(dead_code)]

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use daont_core::query::{parse_query, Query};
use daont_core::rdf::{Iri, Literal};
use daont_core::vocab::{RDF_TYPE, XSD_DATE};
use daont_core::{Graph, Term, Triple};

pub const EX: &str = "http://example.org/rand/";

pub fn iri(s: &str) -> Term {
    Term::iri(s).unwrap()
}

pub fn ex(local: &str) -> Term {
    iri(&format!("{EX}{local}"))
}

const NODES: [&str; 5] = ["a", "b", "c", "d", "e"];
const PREDICATES: [&str; 3] = ["p", "q", "r"];

fn node(rng: &mut StdRng) -> Term {
    ex(NODES.choose(rng).unwrap())
}

fn predicate(rng: &mut StdRng) -> Term {
    if rng.gen_bool(0.2) {
        iri(RDF_TYPE)
    } else {
        ex(PREDICATES.choose(rng).unwrap())
    }
}

fn small_object(rng: &mut StdRng) -> Term {
    match rng.gen_range(0..6) {
        0 => Term::literal(Literal::typed("true", Iri::new(daont_core::vocab::XSD_BOOLEAN).unwrap())),
        1 => Term::literal(Literal::string("v")),
        _ => node(rng),
    }
}

/// A graph of up to `max` triples over a five-node, three-predicate vocabulary.
pub fn random_graph(rng: &mut StdRng, max: usize) -> Graph {
    let n = rng.gen_range(0..=max);
    (0..n)
        .map(|_| Triple::new(node(rng), predicate(rng), small_object(rng)).unwrap())
        .collect()
}

fn literal(rng: &mut StdRng) -> Literal {
    const LEXICALS: [&str; 6] = ["plain", "with \"quotes\"", "tab\tand\nnewline", "back\\slash", "ünïcödé", ""];
    let text = LEXICALS.choose(rng).unwrap().to_string();
    match rng.gen_range(0..6) {
        0 => Literal::string(text),
        1 => Literal::lang(text, ["en", "de-AT", "fr"].choose(rng).unwrap()).unwrap(),
        2 => Literal::typed(rng.gen_range(-50..50).to_string(), Iri::new(daont_core::vocab::XSD_INTEGER).unwrap()),
        3 => Literal::typed(if rng.gen() { "true" } else { "false" }, Iri::new(daont_core::vocab::XSD_BOOLEAN).unwrap()),
        4 => Literal::typed("2025-09-12", Iri::new(XSD_DATE).unwrap()),
        _ => Literal::typed(format!("{}.5", rng.gen_range(0..9)), Iri::new(daont_core::vocab::XSD_DECIMAL).unwrap()),
    }
}

/// A blank-node-free graph with mixed literal forms and IRIs in several
/// namespaces.
pub fn random_ground_graph(rng: &mut StdRng, max: usize) -> Graph {
    let n = rng.gen_range(0..=max);
    let mut g = Graph::new();
    for _ in 0..n {
        let s = match rng.gen_range(0..3) {
            0 => iri(&format!("https://w3id.org/def/daont#n{}", rng.gen_range(0..4))),
            1 => iri(&format!("urn:x:{}", rng.gen_range(0..4))),
            _ => node(rng),
        };
        let o = if rng.gen_bool(0.5) { Term::literal(literal(rng)) } else { node(rng) };
        g.insert(Triple::new(s, predicate(rng), o).unwrap());
    }
    g
}

fn pattern_term(rng: &mut StdRng, vars: &[String], constant: fn(&mut StdRng) -> Term) -> String {
    if !vars.is_empty() && rng.gen_bool(0.6) {
        format!("?{}", vars.choose(rng).unwrap())
    } else {
        render(&constant(rng))
    }
}

fn render(t: &Term) -> String {
    t.to_string()
}

fn pattern(rng: &mut StdRng, vars: &[String], graph: &Graph) -> String {
    let triples: Vec<&Triple> = graph.iter().collect();
    if let Some(t) = triples.choose(rng).filter(|_| rng.gen_bool(0.7)) {
        let mut slot = |term: &Term| {
            if rng.gen_bool(0.5) {
                format!("?{}", vars.choose(rng).unwrap())
            } else {
                render(term)
            }
        };
        return format!("{} {} {} .", slot(t.subject()), slot(t.predicate()), slot(t.object()));
    }
    format!(
        "{} {} {} .",
        pattern_term(rng, vars, node),
        pattern_term(rng, vars, predicate),
        pattern_term(rng, vars, small_object)
    )
}

/// A random query in the accepted subset with at most four distinct
/// variables, mostly built from triples of `graph` with some positions
/// replaced by variables. Filters follow every outer pattern, so they never
/// precede a binding.
pub fn random_query(rng: &mut StdRng, graph: &Graph) -> Query {
    loop {
        let outer_vars: Vec<String> = (0..rng.gen_range(1..=3)).map(|i| format!("v{i}")).collect();
        let mut body = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            body.push(pattern(rng, &outer_vars, graph));
        }
        let mut group_vars = outer_vars.clone();
        if outer_vars.len() < 4 {
            group_vars.push("f".into());
        }
        for _ in 0..rng.gen_range(0..=2) {
            let kind = if rng.gen_bool(0.7) { "NOT EXISTS" } else { "EXISTS" };
            let inner: Vec<String> = (0..rng.gen_range(1..=2)).map(|_| pattern(rng, &group_vars, graph)).collect();
            body.push(format!("FILTER {kind} {{ {} }}", inner.join(" ")));
        }
        if rng.gen_bool(0.3) {
            let op = if rng.gen() { "=" } else { "!=" };
            body.push(format!("FILTER(?{} {op} {})", outer_vars.choose(rng).unwrap(), render(&small_object(rng))));
        }
        let projection: Vec<String> = outer_vars
            .iter()
            .filter(|_| rng.gen_bool(0.7))
            .map(|v| format!("?{v}"))
            .collect();
        let text = format!("SELECT {} WHERE {{ {} }}", projection.join(" "), body.join(" "));
        if let Ok(q) = parse_query(&text) {
            return q;
        }
    }
}
