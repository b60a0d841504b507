use std::fmt;

use super::RdfError;
use crate::vocab::{RDF_LANG_STRING, XSD_STRING};

/// An absolute IRI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(String);

impl Iri {
    pub fn new(value: impl Into<String>) -> Result<Self, RdfError> {
        let value = value.into();
        if is_absolute_iri(&value) {
            Ok(Iri(value))
        } else {
            Err(RdfError::InvalidIri(value))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// `scheme ":" rest`, where the scheme is `ALPHA *( ALPHA / DIGIT / "+" / "-" / "." )`.
pub(crate) fn is_absolute_iri(value: &str) -> bool {
    let Some((scheme, rest)) = value.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    let starts_alpha = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
    starts_alpha
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
        && !rest.is_empty()
        && !value.chars().any(|c| c.is_whitespace() || matches!(c, '<' | '>' | '"'))
}

/// A document-scoped blank node label (without the `_:` prefix).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlankNode(String);

impl BlankNode {
    pub fn new(label: impl Into<String>) -> Result<Self, RdfError> {
        let label = label.into();
        let valid = !label.is_empty()
            && !label.ends_with('.')
            && label
                .chars()
                .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if valid {
            Ok(BlankNode(label))
        } else {
            Err(RdfError::InvalidBlankLabel(label))
        }
    }

    pub fn label(&self) -> &str {
        &self.0
    }
}

/// A literal. Equality is lexical: `"1"` and `"01"` typed as integers differ.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: String,
    datatype: Iri,
    language: Option<String>,
}

impl Literal {
    /// A plain `xsd:string` literal.
    pub fn string(lexical: impl Into<String>) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype: Iri(XSD_STRING.to_owned()),
            language: None,
        }
    }

    pub fn typed(lexical: impl Into<String>, datatype: Iri) -> Self {
        Literal {
            lexical: lexical.into(),
            datatype,
            language: None,
        }
    }

    /// A language-tagged string; the datatype is always `rdf:langString`.
    /// Tags are stored lower-cased.
    pub fn lang(lexical: impl Into<String>, tag: &str) -> Result<Self, RdfError> {
        let valid = !tag.is_empty()
            && tag.split('-').enumerate().all(|(i, part)| {
                !part.is_empty()
                    && part.len() <= 8
                    && part
                        .chars()
                        .all(|c| if i == 0 { c.is_ascii_alphabetic() } else { c.is_ascii_alphanumeric() })
            });
        if !valid {
            return Err(RdfError::InvalidLanguageTag(tag.to_owned()));
        }
        Ok(Literal {
            lexical: lexical.into(),
            datatype: Iri(RDF_LANG_STRING.to_owned()),
            language: Some(tag.to_ascii_lowercase()),
        })
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> &Iri {
        &self.datatype
    }

    pub fn language(&self) -> Option<&str> {
        self.language.as_deref()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Blank(BlankNode),
    Literal(Literal),
}

impl Term {
    /// Builds an IRI term, validating that the text is absolute.
    pub fn iri(value: impl Into<String>) -> Result<Self, RdfError> {
        Iri::new(value).map(Term::Iri)
    }

    pub fn blank(label: impl Into<String>) -> Result<Self, RdfError> {
        BlankNode::new(label).map(Term::Blank)
    }

    pub fn literal(literal: Literal) -> Self {
        Term::Literal(literal)
    }

    pub fn as_iri(&self) -> Option<&str> {
        match self {
            Term::Iri(iri) => Some(iri.as_str()),
            _ => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }

    pub fn is_blank(&self) -> bool {
        matches!(self, Term::Blank(_))
    }

    pub fn is_literal(&self) -> bool {
        matches!(self, Term::Literal(_))
    }

    /// IRIs render as their bare text, everything else in N-Triples form.
    pub fn to_plain_string(&self) -> String {
        match self {
            Term::Iri(iri) => iri.as_str().to_owned(),
            other => other.to_string(),
        }
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<Literal> for Term {
    fn from(literal: Literal) -> Self {
        Term::Literal(literal)
    }
}

/// N-Triples rendering.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Iri(iri) => write!(f, "<{}>", iri.as_str()),
            Term::Blank(b) => write!(f, "_:{}", b.label()),
            Term::Literal(lit) => {
                write!(f, "\"{}\"", escape_string(lit.lexical()))?;
                match lit.language() {
                    Some(tag) => write!(f, "@{tag}"),
                    None if lit.datatype().as_str() == XSD_STRING => Ok(()),
                    None => write!(f, "^^<{}>", lit.datatype().as_str()),
                }
            }
        }
    }
}

pub(crate) fn escape_string(value: &str) -> String {
    let mut out = String::with_capacity(value.len());
    for c in value.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out
}

/// A subject-predicate-object statement. Subjects are IRIs or blank nodes,
/// predicates are IRIs.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    subject: Term,
    predicate: Term,
    object: Term,
}

impl Triple {
    pub fn new(subject: Term, predicate: Term, object: Term) -> Result<Self, RdfError> {
        if subject.is_literal() {
            return Err(RdfError::MalformedTriple("subject must not be a literal"));
        }
        if !predicate.is_iri() {
            return Err(RdfError::MalformedTriple("predicate must be an IRI"));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Term {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn into_parts(self) -> (Term, Term, Term) {
        (self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} .", self.subject, self.predicate, self.object)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn iri_requires_scheme() {
        assert!(Iri::new("http://example.org/a").is_ok());
        assert!(Iri::new("urn:x").is_ok());
        assert!(Iri::new("").is_err());
        assert!(Iri::new("example").is_err());
        assert!(Iri::new("1http://x").is_err());
        assert!(Iri::new("http:").is_err());
        assert!(Iri::new("http://a b").is_err());
    }

    #[test]
    fn lang_literal_has_lang_string_datatype() {
        let lit = Literal::lang("hola", "es-ES").unwrap();
        assert_eq!(lit.datatype().as_str(), RDF_LANG_STRING);
        assert_eq!(lit.language(), Some("es-es"));
        assert!(Literal::lang("x", "").is_err());
        assert!(Literal::lang("x", "e1").is_err());
    }

    #[test]
    fn literal_equality_is_lexical() {
        let int = Iri::new(crate::vocab::XSD_INTEGER).unwrap();
        assert_ne!(Literal::typed("1", int.clone()), Literal::typed("01", int.clone()));
        assert_ne!(
            Term::from(Literal::typed("1", int)),
            Term::from(Literal::string("1"))
        );
    }

    #[test]
    fn triple_rejects_literal_subject_and_non_iri_predicate() {
        let lit = Term::from(Literal::string("x"));
        let p = Term::iri("http://example.org/p").unwrap();
        let b = Term::iri("http://example.org/b").unwrap();
        assert!(Triple::new(lit, p.clone(), b.clone()).is_err());
        let blank = Term::blank("x").unwrap();
        assert!(Triple::new(b.clone(), blank.clone(), b.clone()).is_err());
        assert!(Triple::new(blank, p, b).is_ok());
    }

    #[test]
    fn display_is_ntriples() {
        let t = Term::from(Literal::string("a\"b\n"));
        assert_eq!(t.to_string(), r#""a\"b\n""#);
        let t = Term::from(Literal::lang("x", "en").unwrap());
        assert_eq!(t.to_string(), "\"x\"@en");
        let t = Term::iri("http://e.org/x").unwrap();
        assert_eq!(t.to_string(), "<http://e.org/x>");
        assert_eq!(t.to_plain_string(), "http://e.org/x");
    }
}
