use crate::lexer::{Lexer, Tok, Token};
use crate::rdf::{Term, RdfError};
use crate::turtle::{DiagnosticKind, ParseDiagnostic, PrefixMap, TermResolver};
use crate::vocab::RDF_TYPE;

use super::ast::{CompareOp, Comparison, Element, PatternTerm, Query, QueryLocation, TriplePattern, Variable};

/// Keywords outside the subset, reported by name wherever they appear.
const REJECTED: &[(&str, &str)] = &[
    ("OPTIONAL", "OPTIONAL"),
    ("UNION", "UNION"),
    ("MINUS", "MINUS"),
    ("BIND", "BIND"),
    ("VALUES", "VALUES"),
    ("GRAPH", "GRAPH"),
    ("SERVICE", "SERVICE"),
    ("DISTINCT", "DISTINCT"),
    ("REDUCED", "REDUCED"),
    ("ORDER", "ORDER BY"),
    ("GROUP", "GROUP BY"),
    ("HAVING", "HAVING"),
    ("LIMIT", "LIMIT"),
    ("OFFSET", "OFFSET"),
    ("FROM", "FROM"),
    ("ASK", "ASK"),
    ("CONSTRUCT", "CONSTRUCT"),
    ("DESCRIBE", "DESCRIBE"),
];

/// Parses a query. `da:`, `dpv:`, `odrl:`, `rdf:`, `rdfs:`, `owl:` and `xsd:`
/// are in scope without declaration; `PREFIX` lines may rebind them.
pub fn parse_query(input: &str) -> Result<Query, ParseDiagnostic> {
    let mut parser = QueryParser {
        lexer: Lexer::new(input),
        prefixes: PrefixMap::well_known(),
    };
    parser.query()
}

struct QueryParser {
    lexer: Lexer,
    prefixes: PrefixMap,
}

fn unsupported(token: &Token, construct: &str) -> ParseDiagnostic {
    token.diagnostic(
        DiagnosticKind::Unsupported(construct.to_owned()),
        format!("unsupported construct: {construct}"),
    )
}

fn rejected_keyword(token: &Token) -> Option<&'static str> {
    match &token.tok {
        Tok::Word(w) => REJECTED
            .iter()
            .find(|(kw, _)| w.eq_ignore_ascii_case(kw))
            .map(|(_, name)| *name),
        _ => None,
    }
}

impl QueryParser {
    fn next(&mut self) -> Result<Token, ParseDiagnostic> {
        self.lexer.next_token()
    }

    fn peek(&mut self) -> Result<&Token, ParseDiagnostic> {
        self.lexer.peek()
    }

    fn unexpected(&self, token: &Token, expected: &str) -> ParseDiagnostic {
        if token.tok == Tok::Eof {
            return self.lexer.eof_diagnostic(format!("unexpected end of input, expected {expected}"));
        }
        if let Some(name) = rejected_keyword(token) {
            return unsupported(token, name);
        }
        token.diagnostic(DiagnosticKind::Syntax, format!("expected {expected}, found `{}`", token.lexeme))
    }

    fn expect_punct(&mut self, p: &str) -> Result<Token, ParseDiagnostic> {
        let t = self.next()?;
        if t.is_punct(p) {
            Ok(t)
        } else {
            Err(self.unexpected(&t, &format!("'{p}'")))
        }
    }

    fn query(&mut self) -> Result<Query, ParseDiagnostic> {
        // Prologue.
        let select = loop {
            let t = self.next()?;
            if t.is_word("PREFIX") {
                let label_token = self.next()?;
                let label = match &label_token.tok {
                    Tok::PName { prefix, local } if local.is_empty() => prefix.clone(),
                    _ => return Err(self.unexpected(&label_token, "a prefix label such as `ex:`")),
                };
                let iri_token = self.next()?;
                let ns = match &iri_token.tok {
                    Tok::IriRef(r) => self.prefixes.resolve(r),
                    _ => return Err(self.unexpected(&iri_token, "a namespace IRI")),
                };
                let ns = ns.ok_or_else(|| iri_token.diagnostic(DiagnosticKind::Syntax, "namespace must be absolute"))?;
                self.prefixes
                    .insert(label, ns)
                    .map_err(|e: RdfError| iri_token.diagnostic(DiagnosticKind::Syntax, e.to_string()))?;
            } else if t.is_word("BASE") {
                let iri_token = self.next()?;
                let base = match &iri_token.tok {
                    Tok::IriRef(r) => self.prefixes.resolve(r),
                    _ => return Err(self.unexpected(&iri_token, "a base IRI")),
                };
                let base = base.ok_or_else(|| iri_token.diagnostic(DiagnosticKind::Syntax, "base must be absolute"))?;
                self.prefixes
                    .set_base(base)
                    .map_err(|e| iri_token.diagnostic(DiagnosticKind::Syntax, e.to_string()))?;
            } else if t.is_word("SELECT") {
                break t;
            } else {
                return Err(self.unexpected(&t, "PREFIX or SELECT"));
            }
        };

        let mut projection = Vec::new();
        let mut projection_tokens = Vec::new();
        loop {
            let t = self.peek()?.clone();
            match &t.tok {
                Tok::Var(name) => {
                    self.next()?;
                    projection.push(Variable::new(name.clone()));
                    projection_tokens.push(t);
                }
                Tok::Punct("*") => return Err(unsupported(&t, "SELECT *")),
                Tok::Punct("(") => return Err(unsupported(&t, "projection expression")),
                _ => break,
            }
        }
        if projection.is_empty() {
            let t = self.next()?;
            return Err(self.unexpected(&t, "an explicit variable list after SELECT"));
        }

        if self.peek()?.is_word("WHERE") {
            self.next()?;
        }
        self.expect_punct("{")?;
        let (body, element_tokens) = self.group_body()?;
        let t = self.next()?;
        if t.tok != Tok::Eof {
            return Err(self.unexpected(&t, "end of query"));
        }

        let query = Query {
            prefixes: self.prefixes.clone(),
            projection,
            body,
        };
        if let Err(invalid) = query.validate() {
            let at = match invalid.location {
                QueryLocation::Projection(i) => &projection_tokens[i],
                QueryLocation::Element(i) => &element_tokens[i],
                QueryLocation::Query => &select,
            };
            return Err(at.diagnostic(DiagnosticKind::Syntax, invalid.message));
        }
        Ok(query)
    }

    /// Elements up to and including the closing `}` of the WHERE clause,
    /// each paired with the token it starts at.
    fn group_body(&mut self) -> Result<(Vec<Element>, Vec<Token>), ParseDiagnostic> {
        let mut body = Vec::new();
        let mut tokens = Vec::new();
        loop {
            let t = self.peek()?.clone();
            if t.is_punct("}") {
                self.next()?;
                return Ok((body, tokens));
            }
            if t.is_punct(".") {
                self.next()?;
                continue;
            }
            if t.is_word("FILTER") {
                self.next()?;
                body.push(self.filter(&t)?);
                tokens.push(t);
                continue;
            }
            if let Some(name) = rejected_keyword(&t) {
                return Err(unsupported(&t, name));
            }
            if t.is_punct("{") {
                return Err(unsupported(&t, "nested group"));
            }
            if t.tok == Tok::Eof {
                return Err(self.lexer.eof_diagnostic("unexpected end of input, expected '}'"));
            }
            for p in self.triples_block()? {
                body.push(Element::Pattern(p));
                tokens.push(t.clone());
            }
        }
    }

    fn filter(&mut self, filter_token: &Token) -> Result<Element, ParseDiagnostic> {
        let t = self.next()?;
        if t.is_word("NOT") {
            let exists = self.next()?;
            if !exists.is_word("EXISTS") {
                return Err(self.unexpected(&exists, "EXISTS after FILTER NOT"));
            }
            return Ok(Element::NotExists(self.pattern_group(filter_token)?));
        }
        if t.is_word("EXISTS") {
            return Ok(Element::Exists(self.pattern_group(filter_token)?));
        }
        if !t.is_punct("(") {
            return Err(self.unexpected(&t, "'(' or [NOT] EXISTS after FILTER"));
        }
        let var_token = self.next()?;
        let variable = match &var_token.tok {
            Tok::Var(name) => Variable::new(name.clone()),
            Tok::Word(_) => return Err(unsupported(&var_token, "FILTER function call")),
            _ => return Err(self.unexpected(&var_token, "a variable in FILTER")),
        };
        let op_token = self.next()?;
        let op = match &op_token.tok {
            Tok::Punct("=") => CompareOp::Eq,
            Tok::Punct("!=") => CompareOp::Ne,
            Tok::Punct(p @ ("<" | ">" | "<=" | ">=")) => {
                return Err(unsupported(&op_token, &format!("comparison operator {p}")))
            }
            _ => return Err(self.unexpected(&op_token, "'=' or '!='")),
        };
        let value_token = self.next()?;
        let value = match self.constant(&value_token)? {
            Some(term) => term,
            None => return Err(self.unexpected(&value_token, "an IRI or literal to compare with")),
        };
        let close = self.next()?;
        if close.is_punct("&&") || close.is_punct("||") {
            return Err(unsupported(&close, "boolean FILTER expression"));
        }
        if !close.is_punct(")") {
            return Err(self.unexpected(&close, "')'"));
        }
        Ok(Element::Compare(Comparison { variable, op, value }))
    }

    fn pattern_group(&mut self, filter_token: &Token) -> Result<Vec<TriplePattern>, ParseDiagnostic> {
        self.expect_punct("{")?;
        let mut patterns = Vec::new();
        loop {
            let t = self.peek()?.clone();
            if t.is_punct("}") {
                self.next()?;
                break;
            }
            if t.is_punct(".") {
                self.next()?;
                continue;
            }
            if t.is_word("FILTER") {
                return Err(unsupported(&t, "nested FILTER"));
            }
            if let Some(name) = rejected_keyword(&t) {
                return Err(unsupported(&t, name));
            }
            if t.tok == Tok::Eof {
                return Err(self.lexer.eof_diagnostic("unexpected end of input, expected '}'"));
            }
            patterns.extend(self.triples_block()?);
        }
        if patterns.is_empty() {
            return Err(filter_token.diagnostic(DiagnosticKind::Syntax, "empty FILTER EXISTS/NOT EXISTS group"));
        }
        Ok(patterns)
    }

    /// `subject predicate objects (; predicate objects)*`, without the final dot.
    fn triples_block(&mut self) -> Result<Vec<TriplePattern>, ParseDiagnostic> {
        let subject_token = self.next()?;
        let subject = match &subject_token.tok {
            Tok::Var(name) => PatternTerm::var(name),
            Tok::Blank(_) => return Err(unsupported(&subject_token, "blank node in query")),
            Tok::Punct("[") => return Err(unsupported(&subject_token, "blank node property list")),
            Tok::Punct("(") => return Err(unsupported(&subject_token, "collection")),
            Tok::Str(_) | Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) => {
                return Err(subject_token.diagnostic(DiagnosticKind::Syntax, "a literal cannot be a subject"))
            }
            _ => match self.resolver().iri(&subject_token)? {
                Some(term) => PatternTerm::Term(term),
                None => return Err(self.unexpected(&subject_token, "a subject")),
            },
        };
        let mut out = Vec::new();
        loop {
            let verb_token = self.next()?;
            let predicate = match &verb_token.tok {
                Tok::Word(w) if w == "a" => PatternTerm::Term(Term::iri(RDF_TYPE).expect("rdf:type")),
                Tok::Var(name) => PatternTerm::var(name),
                Tok::Punct("^") | Tok::Punct("!") | Tok::Punct("(") => {
                    return Err(unsupported(&verb_token, "property path"))
                }
                _ => match self.resolver().iri(&verb_token)? {
                    Some(term) => PatternTerm::Term(term),
                    None => return Err(self.unexpected(&verb_token, "a predicate")),
                },
            };
            let after = self.peek()?.clone();
            if ["/", "|", "*", "+", "?"].iter().any(|p| after.is_punct(p)) {
                return Err(unsupported(&after, "property path"));
            }
            loop {
                let object_token = self.next()?;
                let object = match &object_token.tok {
                    Tok::Var(name) => PatternTerm::var(name),
                    Tok::Blank(_) => return Err(unsupported(&object_token, "blank node in query")),
                    Tok::Punct("[") => return Err(unsupported(&object_token, "blank node property list")),
                    Tok::Punct("(") => return Err(unsupported(&object_token, "collection")),
                    _ => match self.constant(&object_token)? {
                        Some(term) => PatternTerm::Term(term),
                        None => return Err(self.unexpected(&object_token, "an object")),
                    },
                };
                out.push(TriplePattern::new(subject.clone(), predicate.clone(), object));
                if self.peek()?.is_punct(",") {
                    self.next()?;
                } else {
                    break;
                }
            }
            if !self.peek()?.is_punct(";") {
                return Ok(out);
            }
            while self.peek()?.is_punct(";") {
                self.next()?;
            }
            let t = self.peek()?;
            if t.is_punct(".") || t.is_punct("}") {
                return Ok(out);
            }
        }
    }

    fn resolver(&self) -> TermResolver<'_> {
        TermResolver { prefixes: &self.prefixes }
    }

    /// IRI or literal in object/comparison position.
    fn constant(&mut self, token: &Token) -> Result<Option<Term>, ParseDiagnostic> {
        if let Some(term) = self.resolver().iri(token)? {
            return Ok(Some(term));
        }
        if let Some(term) = self.resolver().shorthand_literal(token) {
            return Ok(Some(term));
        }
        if let Tok::Str(value) = &token.tok {
            let prefixes = self.prefixes.clone();
            return TermResolver { prefixes: &prefixes }
                .quoted_literal(value.clone(), &mut self.lexer)
                .map(Some);
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_query() {
        let q = parse_query("SELECT ?s WHERE { ?s ?p ?o }").unwrap();
        assert_eq!(q.projection, vec![Variable::new("s")]);
        assert_eq!(q.outer_patterns().count(), 1);
    }

    #[test]
    fn where_keyword_is_optional_and_prefixes_rebind() {
        let q = parse_query("PREFIX da: <http://other.org/> SELECT ?s { ?s a da:X . }").unwrap();
        let p = q.outer_patterns().next().unwrap();
        assert_eq!(
            p.object,
            PatternTerm::Term(Term::iri("http://other.org/X").unwrap())
        );
    }

    #[test]
    fn rejects_out_of_subset_constructs_by_name() {
        let cases = [
            ("SELECT ?x WHERE { ?x ?y ?z } ORDER BY ?x", "ORDER BY"),
            ("SELECT DISTINCT ?x WHERE { ?x ?y ?z }", "DISTINCT"),
            ("SELECT ?x WHERE { ?x ?y ?z OPTIONAL { ?x ?y ?w } }", "OPTIONAL"),
            ("SELECT ?x WHERE { { ?x ?y ?z } UNION { ?x ?y ?w } }", "nested group"),
            ("SELECT ?x WHERE { ?x ?y ?z . } UNION", "UNION"),
            ("SELECT ?x WHERE { ?x da:p/da:q ?z }", "property path"),
            ("SELECT ?x WHERE { ?x da:p* ?z }", "property path"),
            ("SELECT ?x WHERE { ?x ^da:p ?z }", "property path"),
            ("SELECT * WHERE { ?x ?y ?z }", "SELECT *"),
            ("SELECT ?x WHERE { ?x ?y ?z } LIMIT 1", "LIMIT"),
            ("SELECT ?x WHERE { ?x ?y ?z FILTER(?z < 3) }", "comparison operator <"),
            ("SELECT ?x WHERE { ?x ?y ?z FILTER(regex(?z, \"a\")) }", "FILTER function call"),
            ("SELECT ?x WHERE { ?x ?y ?z FILTER NOT EXISTS { ?x ?y ?w FILTER(?w = 1) } }", "nested FILTER"),
            ("ASK { ?x ?y ?z }", "ASK"),
        ];
        for (input, construct) in cases {
            let err = parse_query(input).unwrap_err();
            assert_eq!(err.unsupported_construct(), Some(construct), "{input}: {err}");
            assert!(err.message.contains(construct));
        }
    }

    #[test]
    fn filter_before_binding_is_rejected() {
        let err = parse_query("SELECT ?x WHERE { FILTER(?x = da:A) ?x ?y ?z }").unwrap_err();
        assert!(err.message.contains("before a pattern binds it"), "{err}");
        let err = parse_query("SELECT ?x WHERE { FILTER NOT EXISTS { ?x ?y da:A } ?x ?y ?z }").unwrap_err();
        assert!(err.message.contains("before a pattern binds it"), "{err}");
    }

    #[test]
    fn projected_variables_must_occur_in_outer_patterns() {
        let err = parse_query("SELECT ?x ?w WHERE { ?x ?y ?z FILTER NOT EXISTS { ?x ?y ?w } }").unwrap_err();
        assert!(err.message.contains("?w"), "{err}");
        assert_eq!(err.lexeme, "?w");
    }

    #[test]
    fn empty_filter_group_is_rejected() {
        assert!(parse_query("SELECT ?x WHERE { ?x ?y ?z FILTER NOT EXISTS { } }").is_err());
    }

    #[test]
    fn comparisons_accept_iris_and_literals() {
        let q = parse_query(
            "SELECT ?x WHERE { ?x ?y ?z FILTER(?z != da:A) FILTER (?z = true) FILTER(?z = \"v\"@en) }",
        )
        .unwrap();
        let ops: Vec<_> = q
            .body
            .iter()
            .filter_map(|e| match e {
                Element::Compare(c) => Some(c.op),
                _ => None,
            })
            .collect();
        assert_eq!(ops, vec![CompareOp::Ne, CompareOp::Eq, CompareOp::Eq]);
    }

    #[test]
    fn truncated_query_points_inside_input() {
        let err = parse_query("SELECT ?x WHERE { ?x ?y").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.column <= "SELECT ?x WHERE { ?x ?y".len());
    }
}
