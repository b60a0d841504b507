//! Turtle subset: parsing and deterministic serialization.
//!
//! Supported: `@prefix`/`PREFIX`, `@base`/`BASE`, prefixed names, IRIs,
//! the `a` keyword, `;` and `,` lists, plain/typed/language-tagged literals,
//! boolean and numeric shorthand, comments and `_:label` blank nodes.
//! Collections and `[ ]` property lists are rejected.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lexer::{Lexer, Tok, Token};
use crate::rdf::{is_absolute_iri, Graph, Iri, Literal, Term, Triple};
use crate::vocab::{self, RDF_TYPE, XSD_BOOLEAN, XSD_DECIMAL, XSD_DOUBLE, XSD_INTEGER, XSD_STRING};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagnosticKind {
    Syntax,
    UnknownPrefix,
    /// A construct outside the accepted subset; carries its name.
    Unsupported(String),
}

/// A located parse failure. Line and column are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub lexeme: String,
    pub kind: DiagnosticKind,
}

impl ParseDiagnostic {
    pub fn unsupported_construct(&self) -> Option<&str> {
        match &self.kind {
            DiagnosticKind::Unsupported(name) => Some(name),
            _ => None,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)?;
        if !self.lexeme.is_empty() {
            write!(f, " (near `{}`)", self.lexeme)?;
        }
        Ok(())
    }
}

/// Prefix label to namespace IRI, plus an optional base IRI.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    prefixes: BTreeMap<String, String>,
    base: Option<String>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// `da`, `dpv`, `odrl`, `owl`, `rdf`, `rdfs` and `xsd`.
    pub fn well_known() -> Self {
        let mut map = Self::new();
        for (label, ns) in vocab::well_known_prefixes() {
            map.prefixes.insert(label.to_owned(), ns.to_owned());
        }
        map
    }

    /// Binds `label`, replacing any earlier binding.
    pub fn insert(&mut self, label: impl Into<String>, namespace: impl Into<String>) -> Result<(), crate::rdf::RdfError> {
        let namespace = namespace.into();
        if !is_absolute_iri(&namespace) {
            return Err(crate::rdf::RdfError::InvalidIri(namespace));
        }
        self.prefixes.insert(label.into(), namespace);
        Ok(())
    }

    pub fn get(&self, label: &str) -> Option<&str> {
        self.prefixes.get(label).map(String::as_str)
    }

    pub fn base(&self) -> Option<&str> {
        self.base.as_deref()
    }

    pub fn set_base(&mut self, base: impl Into<String>) -> Result<(), crate::rdf::RdfError> {
        let base = base.into();
        if !is_absolute_iri(&base) {
            return Err(crate::rdf::RdfError::InvalidIri(base));
        }
        self.base = Some(base);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.prefixes.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn len(&self) -> usize {
        self.prefixes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prefixes.is_empty()
    }

    /// Later bindings in `other` win.
    pub fn extend(&mut self, other: &PrefixMap) {
        for (k, v) in other.iter() {
            self.prefixes.insert(k.to_owned(), v.to_owned());
        }
        if other.base.is_some() {
            self.base.clone_from(&other.base);
        }
    }

    /// Resolves an IRI reference against the base.
    pub(crate) fn resolve(&self, reference: &str) -> Option<String> {
        if is_absolute_iri(reference) {
            return Some(reference.to_owned());
        }
        let base = url::Url::parse(self.base.as_deref()?).ok()?;
        base.join(reference).ok().map(String::from)
    }

    /// Shortest `prefix:local` form of `iri`, if a binding yields a valid
    /// local name.
    pub fn compact(&self, iri: &str) -> Option<String> {
        self.prefixes
            .iter()
            .filter_map(|(label, ns)| {
                let local = iri.strip_prefix(ns.as_str())?;
                is_safe_local(local).then(|| format!("{label}:{local}"))
            })
            .min_by_key(|s| (s.len(), s.clone()))
    }
}

fn is_safe_local(local: &str) -> bool {
    let mut chars = local.chars();
    match chars.next() {
        None => true,
        Some(c) if c.is_alphanumeric() || c == '_' => {
            !local.ends_with('.') && chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
        }
        Some(_) => false,
    }
}

/// Turns parsed tokens into RDF terms; shared with the query parser.
pub(crate) struct TermResolver<'p> {
    pub prefixes: &'p PrefixMap,
}

impl TermResolver<'_> {
    pub fn iri(&self, token: &Token) -> Result<Option<Term>, ParseDiagnostic> {
        match &token.tok {
            Tok::IriRef(reference) => match self.prefixes.resolve(reference) {
                Some(iri) => Ok(Some(self.make_iri(token, iri)?)),
                None => Err(token.diagnostic(
                    DiagnosticKind::Syntax,
                    format!("relative IRI <{reference}> without a usable base"),
                )),
            },
            Tok::PName { prefix, local } => match self.prefixes.get(prefix) {
                Some(ns) => Ok(Some(self.make_iri(token, format!("{ns}{local}"))?)),
                None => Err(token.diagnostic(DiagnosticKind::UnknownPrefix, format!("unknown prefix `{prefix}:`"))),
            },
            _ => Ok(None),
        }
    }

    fn make_iri(&self, token: &Token, iri: String) -> Result<Term, ParseDiagnostic> {
        Term::iri(iri).map_err(|e| token.diagnostic(DiagnosticKind::Syntax, e.to_string()))
    }

    /// Numeric or boolean shorthand.
    pub fn shorthand_literal(&self, token: &Token) -> Option<Term> {
        let (lexical, datatype) = match &token.tok {
            Tok::Integer(s) => (s.as_str(), XSD_INTEGER),
            Tok::Decimal(s) => (s.as_str(), XSD_DECIMAL),
            Tok::Double(s) => (s.as_str(), XSD_DOUBLE),
            Tok::Word(w) if w == "true" || w == "false" => (w.as_str(), XSD_BOOLEAN),
            _ => return None,
        };
        Some(Literal::typed(lexical, Iri::new(datatype).expect("xsd IRI")).into())
    }

    /// Completes a quoted literal whose string token was already consumed.
    pub fn quoted_literal(&self, value: String, lexer: &mut Lexer) -> Result<Term, ParseDiagnostic> {
        let next = lexer.peek()?.clone();
        match &next.tok {
            Tok::LangTag(tag) => {
                lexer.next_token()?;
                Literal::lang(value, tag)
                    .map(Term::from)
                    .map_err(|e| next.diagnostic(DiagnosticKind::Syntax, e.to_string()))
            }
            Tok::Punct("^^") => {
                lexer.next_token()?;
                let dt_token = lexer.next_token()?;
                match self.iri(&dt_token)? {
                    Some(Term::Iri(dt)) => Ok(Literal::typed(value, dt).into()),
                    _ => Err(dt_token.diagnostic(DiagnosticKind::Syntax, "expected a datatype IRI after '^^'")),
                }
            }
            _ => Ok(Literal::string(value).into()),
        }
    }
}

pub fn parse_turtle(input: &str, base: Option<&str>) -> Result<Graph, ParseDiagnostic> {
    parse_turtle_with_prefixes(input, base, &PrefixMap::new()).map(|(g, _)| g)
}

/// Parses with `initial` prefixes already in scope; returns the graph and
/// the prefix environment in effect at the end of the document.
pub fn parse_turtle_with_prefixes(
    input: &str,
    base: Option<&str>,
    initial: &PrefixMap,
) -> Result<(Graph, PrefixMap), ParseDiagnostic> {
    let mut prefixes = initial.clone();
    if let Some(base) = base {
        prefixes.set_base(base).map_err(|e| ParseDiagnostic {
            line: 1,
            column: 1,
            message: format!("invalid base: {e}"),
            lexeme: String::new(),
            kind: DiagnosticKind::Syntax,
        })?;
    }
    let mut parser = TurtleParser {
        lexer: Lexer::new(input),
        prefixes,
        graph: Graph::new(),
    };
    parser.document()?;
    Ok((parser.graph, parser.prefixes))
}

struct TurtleParser {
    lexer: Lexer,
    prefixes: PrefixMap,
    graph: Graph,
}

impl TurtleParser {
    fn next(&mut self) -> Result<Token, ParseDiagnostic> {
        let t = self.lexer.next_token()?;
        Ok(t)
    }

    fn unexpected(&self, token: &Token, expected: &str) -> ParseDiagnostic {
        if token.tok == Tok::Eof {
            return self.lexer.eof_diagnostic(format!("unexpected end of input, expected {expected}"));
        }
        if token.is_punct("[") {
            return token.diagnostic(
                DiagnosticKind::Unsupported("blank node property list".into()),
                "unsupported construct: blank node property list `[ ]`",
            );
        }
        if token.is_punct("(") {
            return token.diagnostic(
                DiagnosticKind::Unsupported("collection".into()),
                "unsupported construct: collection `( )`",
            );
        }
        token.diagnostic(DiagnosticKind::Syntax, format!("expected {expected}, found `{}`", token.lexeme))
    }

    fn expect_dot(&mut self) -> Result<(), ParseDiagnostic> {
        let t = self.next()?;
        if t.is_punct(".") {
            Ok(())
        } else {
            Err(self.unexpected(&t, "'.'"))
        }
    }

    fn document(&mut self) -> Result<(), ParseDiagnostic> {
        loop {
            let t = self.next()?;
            match &t.tok {
                Tok::Eof => return Ok(()),
                Tok::AtKeyword(k) if k == "prefix" => {
                    self.prefix_decl()?;
                    self.expect_dot()?;
                }
                Tok::AtKeyword(k) if k == "base" => {
                    self.base_decl()?;
                    self.expect_dot()?;
                }
                Tok::AtKeyword(_) => return Err(t.diagnostic(DiagnosticKind::Syntax, "unknown directive")),
                Tok::Word(_) if t.is_word("prefix") => self.prefix_decl()?,
                Tok::Word(_) if t.is_word("base") => self.base_decl()?,
                _ => {
                    self.triples(t)?;
                    self.expect_dot()?;
                }
            }
        }
    }

    fn prefix_decl(&mut self) -> Result<(), ParseDiagnostic> {
        let label_token = self.next()?;
        let label = match &label_token.tok {
            Tok::PName { prefix, local } if local.is_empty() => prefix.clone(),
            _ => return Err(self.unexpected(&label_token, "a prefix label such as `ex:`")),
        };
        let iri_token = self.next()?;
        let Tok::IriRef(reference) = &iri_token.tok else {
            return Err(self.unexpected(&iri_token, "a namespace IRI"));
        };
        let ns = self.prefixes.resolve(reference).ok_or_else(|| {
            iri_token.diagnostic(DiagnosticKind::Syntax, "namespace must be an absolute IRI")
        })?;
        self.prefixes
            .insert(label, ns)
            .map_err(|e| iri_token.diagnostic(DiagnosticKind::Syntax, e.to_string()))
    }

    fn base_decl(&mut self) -> Result<(), ParseDiagnostic> {
        let iri_token = self.next()?;
        let Tok::IriRef(reference) = &iri_token.tok else {
            return Err(self.unexpected(&iri_token, "a base IRI"));
        };
        let base = self.prefixes.resolve(reference).ok_or_else(|| {
            iri_token.diagnostic(DiagnosticKind::Syntax, "base must be an absolute IRI")
        })?;
        self.prefixes
            .set_base(base)
            .map_err(|e| iri_token.diagnostic(DiagnosticKind::Syntax, e.to_string()))
    }

    fn triples(&mut self, subject_token: Token) -> Result<(), ParseDiagnostic> {
        let resolver = TermResolver { prefixes: &self.prefixes };
        let subject = match &subject_token.tok {
            Tok::Blank(label) => Term::blank(label.clone())
                .map_err(|e| subject_token.diagnostic(DiagnosticKind::Syntax, e.to_string()))?,
            Tok::Str(_) | Tok::Integer(_) | Tok::Decimal(_) | Tok::Double(_) => {
                return Err(subject_token.diagnostic(DiagnosticKind::Syntax, "a literal cannot be a subject"))
            }
            _ => match resolver.iri(&subject_token)? {
                Some(term) => term,
                None => return Err(self.unexpected(&subject_token, "a subject")),
            },
        };
        loop {
            let verb_token = self.next()?;
            let predicate = if verb_token.tok == Tok::Word("a".into()) {
                Term::iri(RDF_TYPE).expect("rdf:type")
            } else {
                match (TermResolver { prefixes: &self.prefixes }).iri(&verb_token)? {
                    Some(p) => p,
                    None => return Err(self.unexpected(&verb_token, "a predicate")),
                }
            };
            loop {
                let object = self.object()?;
                let triple = Triple::new(subject.clone(), predicate.clone(), object)
                    .expect("subject and predicate shapes checked above");
                self.graph.insert(triple);
                if self.lexer.peek()?.is_punct(",") {
                    self.next()?;
                } else {
                    break;
                }
            }
            if !self.lexer.peek()?.is_punct(";") {
                return Ok(());
            }
            // Repeated and trailing semicolons are allowed.
            while self.lexer.peek()?.is_punct(";") {
                self.next()?;
            }
            let peek = self.lexer.peek()?;
            if peek.is_punct(".") {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Term, ParseDiagnostic> {
        let t = self.next()?;
        let resolver = TermResolver { prefixes: &self.prefixes };
        if let Some(term) = resolver.iri(&t)? {
            return Ok(term);
        }
        if let Some(term) = resolver.shorthand_literal(&t) {
            return Ok(term);
        }
        match t.tok {
            Tok::Blank(ref label) => {
                Term::blank(label.clone()).map_err(|e| t.diagnostic(DiagnosticKind::Syntax, e.to_string()))
            }
            Tok::Str(value) => TermResolver { prefixes: &self.prefixes }.quoted_literal(value, &mut self.lexer),
            _ => Err(self.unexpected(&t, "an object")),
        }
    }
}

/// Deterministic Turtle: prefix declarations first, then one block per
/// subject in sorted order.
pub fn serialize_turtle(graph: &Graph, prefixes: &PrefixMap) -> String {
    let mut out = String::new();
    if let Some(base) = prefixes.base() {
        out.push_str(&format!("@base <{base}> .\n"));
    }
    for (label, ns) in prefixes.iter() {
        out.push_str(&format!("@prefix {label}: <{ns}> .\n"));
    }
    let triples = graph.sorted_triples();
    let mut i = 0;
    while i < triples.len() {
        let subject = triples[i].subject();
        let mut j = i;
        while j < triples.len() && triples[j].subject() == subject {
            j += 1;
        }
        out.push('\n');
        out.push_str(&write_term(subject, prefixes, false));
        // rdf:type leads each subject block.
        let mut group = triples[i..j].to_vec();
        group.sort_by_key(|t| (t.predicate().as_iri() != Some(RDF_TYPE), *t));
        let mut k = 0;
        while k < group.len() {
            let predicate = group[k].predicate();
            let mut m = k;
            while m < group.len() && group[m].predicate() == predicate {
                m += 1;
            }
            if k > 0 {
                out.push_str(" ;\n   ");
            }
            out.push(' ');
            out.push_str(&write_term(predicate, prefixes, true));
            let objects: Vec<String> = group[k..m].iter().map(|t| write_term(t.object(), prefixes, false)).collect();
            out.push(' ');
            out.push_str(&objects.join(" , "));
            k = m;
        }
        out.push_str(" .\n");
        i = j;
    }
    out
}

fn write_term(term: &Term, prefixes: &PrefixMap, predicate: bool) -> String {
    match term {
        Term::Iri(iri) if predicate && iri.as_str() == RDF_TYPE => "a".to_owned(),
        Term::Iri(iri) => prefixes.compact(iri.as_str()).unwrap_or_else(|| format!("<{}>", iri.as_str())),
        Term::Blank(_) => term.to_string(),
        Term::Literal(lit) => {
            let dt = lit.datatype().as_str();
            let lexical = lit.lexical();
            if lit.language().is_none() {
                if dt == XSD_BOOLEAN && (lexical == "true" || lexical == "false") {
                    return lexical.to_owned();
                }
                if dt == XSD_INTEGER && is_integer_shorthand(lexical) {
                    return lexical.to_owned();
                }
            }
            let quoted = format!("\"{}\"", crate::rdf::escape_string(lexical));
            match lit.language() {
                Some(tag) => format!("{quoted}@{tag}"),
                None if dt == XSD_STRING => quoted,
                None => {
                    let dt_text = prefixes.compact(dt).unwrap_or_else(|| format!("<{dt}>"));
                    format!("{quoted}^^{dt_text}")
                }
            }
        }
    }
}

fn is_integer_shorthand(lexical: &str) -> bool {
    let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
    !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit())
}
