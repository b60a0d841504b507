//! DAOnt, DPV and ODRL vocabulary, the schema graph, and RDFS
//! subclass/subproperty materialization.
//!
//! Every IRI used by the built-in rules and the scenario fixtures is listed
//! in [`ENTRIES`]. Entries marked `invented` are not named by the published
//! ontology material and exist only so that the fixtures and competency
//! questions have something to point at.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::rdf::{Graph, Term, Triple};

pub const DA: &str = "https://w3id.org/def/daont#";
pub const DPV: &str = "https://w3id.org/dpv#";
pub const ODRL: &str = "http://www.w3.org/ns/odrl/2/";
pub const RDF: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const XSD: &str = "http://www.w3.org/2001/XMLSchema#";
pub const OWL: &str = "http://www.w3.org/2002/07/owl#";

macro_rules! ns {
    ($ns:literal, $local:literal) => {
        concat!($ns, $local)
    };
}

pub const RDF_TYPE: &str = ns!("http://www.w3.org/1999/02/22-rdf-syntax-ns#", "type");
pub const RDF_LANG_STRING: &str = ns!("http://www.w3.org/1999/02/22-rdf-syntax-ns#", "langString");
pub const RDF_PROPERTY: &str = ns!("http://www.w3.org/1999/02/22-rdf-syntax-ns#", "Property");
pub const RDFS_SUBCLASS_OF: &str = ns!("http://www.w3.org/2000/01/rdf-schema#", "subClassOf");
pub const RDFS_SUBPROPERTY_OF: &str = ns!("http://www.w3.org/2000/01/rdf-schema#", "subPropertyOf");
pub const OWL_CLASS: &str = ns!("http://www.w3.org/2002/07/owl#", "Class");
pub const OWL_OBJECT_PROPERTY: &str = ns!("http://www.w3.org/2002/07/owl#", "ObjectProperty");
pub const OWL_DATATYPE_PROPERTY: &str = ns!("http://www.w3.org/2002/07/owl#", "DatatypeProperty");
pub const XSD_STRING: &str = ns!("http://www.w3.org/2001/XMLSchema#", "string");
pub const XSD_BOOLEAN: &str = ns!("http://www.w3.org/2001/XMLSchema#", "boolean");
pub const XSD_INTEGER: &str = ns!("http://www.w3.org/2001/XMLSchema#", "integer");
pub const XSD_DECIMAL: &str = ns!("http://www.w3.org/2001/XMLSchema#", "decimal");
pub const XSD_DOUBLE: &str = ns!("http://www.w3.org/2001/XMLSchema#", "double");
pub const XSD_DATE: &str = ns!("http://www.w3.org/2001/XMLSchema#", "date");

/// DAOnt terms.
pub mod da {
    macro_rules! da {
        ($local:literal) => {
            concat!("https://w3id.org/def/daont#", $local)
        };
    }

    pub const DATA_HOLDER: &str = da!("DataHolder");
    pub const CONSUMER_USER: &str = da!("ConsumerUser");
    pub const ENTERPRISE_USER: &str = da!("EnterpriseUser");
    pub const DATA_RECIPIENT: &str = da!("DataRecipient");
    pub const PUBLIC_SECTOR_BODY: &str = da!("PublicSectorBody");
    pub const MANUFACTURER: &str = da!("Manufacturer");
    pub const AFTERMARKET_SERVICE_PROVIDER: &str = da!("AftermarketServiceProvider");
    pub const B2C_DATA_SHARING: &str = da!("B2CDataSharing");
    pub const B2B_DATA_SHARING: &str = da!("B2BDataSharing");
    pub const B2G_DATA_SHARING: &str = da!("B2GDataSharing");
    pub const DATA_PROVISION: &str = da!("DataProvision");
    pub const USE_DATA_TO_DEVELOP_COMPETING_PRODUCT: &str = da!("UseDataToDevelopCompetingProduct");
    pub const EXCEPTIONAL_NEED: &str = da!("ExceptionalNeed");

    pub const DATA_SHARING: &str = da!("DataSharing");
    pub const USER: &str = da!("User");
    pub const LEGAL_ACTION: &str = da!("LegalAction");
    pub const ACTION: &str = da!("Action");
    pub const PUBLIC_INTEREST_USE: &str = da!("PublicInterestUse");

    pub const GOVERNED_BY: &str = da!("governedBy");
    pub const AUTHORIZED_BY: &str = da!("authorizedBy");
    pub const OWNS_OR_USES: &str = da!("ownsOrUses");
    pub const REQUESTS_ACCESS_TO: &str = da!("requestsAccessTo");
    pub const GENERATES_DATA: &str = da!("generatesData");
    pub const PERFORMS_LEGAL_ACTION: &str = da!("performsLegalAction");
    pub const PERFORMS_ACTION: &str = da!("performsAction");
    pub const CONTAINS_TRADE_SECRET: &str = da!("containsTradeSecret");
    pub const IS_FAIR: &str = da!("isFair");
    pub const IS_REASONABLE: &str = da!("isReasonable");
    pub const IS_NON_DISCRIMINATORY: &str = da!("isNonDiscriminatory");

    pub const HAS_FRAND_TERMS: &str = da!("hasFRANDTerms");
    pub const MANUFACTURED_BY: &str = da!("manufacturedBy");
    pub const PROVIDES_SERVICE: &str = da!("providesService");
    pub const APPLIES_DURING: &str = da!("appliesDuring");
}

/// DPV terms.
pub mod dpv {
    pub const HAS_RECIPIENT: &str = "https://w3id.org/dpv#hasRecipient";
    pub const HAS_DATA: &str = "https://w3id.org/dpv#hasData";
}

/// ODRL deontic markers.
pub mod odrl {
    pub const DUTY: &str = "http://www.w3.org/ns/odrl/2/Duty";
    pub const PERMISSION: &str = "http://www.w3.org/ns/odrl/2/Permission";
    pub const PROHIBITION: &str = "http://www.w3.org/ns/odrl/2/Prohibition";
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryKind {
    Class,
    ObjectProperty,
    DatatypeProperty,
    DeonticMarker,
    /// RDF/RDFS/OWL/XSD terms used structurally.
    Builtin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VocabEntry {
    pub iri: &'static str,
    pub kind: EntryKind,
    pub invented: bool,
}

const fn entry(iri: &'static str, kind: EntryKind) -> VocabEntry {
    VocabEntry { iri, kind, invented: false }
}

const fn invented(iri: &'static str, kind: EntryKind) -> VocabEntry {
    VocabEntry { iri, kind, invented: true }
}

use EntryKind::*;

pub static ENTRIES: &[VocabEntry] = &[
    entry(da::DATA_HOLDER, Class),
    entry(da::CONSUMER_USER, Class),
    entry(da::ENTERPRISE_USER, Class),
    entry(da::DATA_RECIPIENT, Class),
    entry(da::PUBLIC_SECTOR_BODY, Class),
    entry(da::MANUFACTURER, Class),
    entry(da::AFTERMARKET_SERVICE_PROVIDER, Class),
    entry(da::B2C_DATA_SHARING, Class),
    entry(da::B2B_DATA_SHARING, Class),
    entry(da::B2G_DATA_SHARING, Class),
    entry(da::DATA_PROVISION, Class),
    entry(da::USE_DATA_TO_DEVELOP_COMPETING_PRODUCT, Class),
    entry(da::EXCEPTIONAL_NEED, Class),
    invented(da::DATA_SHARING, Class),
    invented(da::USER, Class),
    invented(da::LEGAL_ACTION, Class),
    invented(da::ACTION, Class),
    invented(da::PUBLIC_INTEREST_USE, Class),
    entry(da::GOVERNED_BY, ObjectProperty),
    entry(da::AUTHORIZED_BY, ObjectProperty),
    entry(da::OWNS_OR_USES, ObjectProperty),
    entry(da::REQUESTS_ACCESS_TO, ObjectProperty),
    entry(da::GENERATES_DATA, ObjectProperty),
    entry(da::PERFORMS_LEGAL_ACTION, ObjectProperty),
    entry(da::PERFORMS_ACTION, ObjectProperty),
    entry(da::CONTAINS_TRADE_SECRET, ObjectProperty),
    entry(da::IS_FAIR, DatatypeProperty),
    entry(da::IS_REASONABLE, DatatypeProperty),
    entry(da::IS_NON_DISCRIMINATORY, DatatypeProperty),
    invented(da::HAS_FRAND_TERMS, ObjectProperty),
    invented(da::MANUFACTURED_BY, ObjectProperty),
    invented(da::PROVIDES_SERVICE, ObjectProperty),
    invented(da::APPLIES_DURING, DatatypeProperty),
    entry(dpv::HAS_RECIPIENT, ObjectProperty),
    entry(dpv::HAS_DATA, ObjectProperty),
    entry(odrl::DUTY, DeonticMarker),
    entry(odrl::PERMISSION, DeonticMarker),
    entry(odrl::PROHIBITION, DeonticMarker),
    entry(RDF_TYPE, Builtin),
    entry(RDF_LANG_STRING, Builtin),
    entry(RDF_PROPERTY, Builtin),
    entry(RDFS_SUBCLASS_OF, Builtin),
    entry(RDFS_SUBPROPERTY_OF, Builtin),
    entry(OWL_CLASS, Builtin),
    entry(OWL_OBJECT_PROPERTY, Builtin),
    entry(OWL_DATATYPE_PROPERTY, Builtin),
    entry(XSD_STRING, Builtin),
    entry(XSD_BOOLEAN, Builtin),
    entry(XSD_INTEGER, Builtin),
    entry(XSD_DECIMAL, Builtin),
    entry(XSD_DOUBLE, Builtin),
    entry(XSD_DATE, Builtin),
];

pub fn lookup(iri: &str) -> Option<&'static VocabEntry> {
    ENTRIES.iter().find(|e| e.iri == iri)
}

/// Prefix labels the engine knows without a declaration.
pub fn well_known_prefixes() -> [(&'static str, &'static str); 7] {
    [
        ("da", DA),
        ("dpv", DPV),
        ("odrl", ODRL),
        ("owl", OWL),
        ("rdf", RDF),
        ("rdfs", RDFS),
        ("xsd", XSD),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AxiomKind {
    SubClassOf,
    SubPropertyOf,
}

impl AxiomKind {
    pub fn predicate(self) -> &'static str {
        match self {
            AxiomKind::SubClassOf => RDFS_SUBCLASS_OF,
            AxiomKind::SubPropertyOf => RDFS_SUBPROPERTY_OF,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct SchemaAxiom {
    pub kind: AxiomKind,
    pub child: &'static str,
    pub parent: &'static str,
}

/// The class hierarchy shipped with the schema. The article rules never
/// depend on it, so checks run without inference by default.
pub fn schema_axioms() -> Vec<SchemaAxiom> {
    let sub = |child, parent| SchemaAxiom {
        kind: AxiomKind::SubClassOf,
        child,
        parent,
    };
    vec![
        sub(da::B2C_DATA_SHARING, da::DATA_SHARING),
        sub(da::B2B_DATA_SHARING, da::DATA_SHARING),
        sub(da::B2G_DATA_SHARING, da::DATA_SHARING),
        sub(da::CONSUMER_USER, da::USER),
        sub(da::ENTERPRISE_USER, da::USER),
        sub(da::DATA_PROVISION, da::LEGAL_ACTION),
        sub(da::USE_DATA_TO_DEVELOP_COMPETING_PRODUCT, da::ACTION),
    ]
}

fn iri(value: &str) -> Term {
    Term::iri(value).expect("vocabulary IRIs are absolute")
}

fn triple(s: &str, p: &str, o: &str) -> Triple {
    Triple::new(iri(s), iri(p), iri(o)).expect("vocabulary triples are well formed")
}

/// Class and property declarations plus the hierarchy axioms.
pub fn schema_graph() -> Graph {
    let mut g = Graph::with_label("daont-schema");
    for e in ENTRIES {
        if !e.iri.starts_with(DA) && !e.iri.starts_with(DPV) {
            continue;
        }
        let marker = match e.kind {
            Class => OWL_CLASS,
            ObjectProperty => OWL_OBJECT_PROPERTY,
            DatatypeProperty => OWL_DATATYPE_PROPERTY,
            DeonticMarker | Builtin => continue,
        };
        g.insert(triple(e.iri, RDF_TYPE, marker));
    }
    for axiom in schema_axioms() {
        g.insert(triple(axiom.child, axiom.kind.predicate(), axiom.parent));
    }
    g
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VocabError {
    #[error("cycle in schema hierarchy through <{0}>")]
    Cycle(String),
}

/// Adds inherited `rdf:type` triples and sub-property-lifted triples to
/// `instances` until a fixpoint is reached. Only `rdfs:subClassOf` and
/// `rdfs:subPropertyOf` triples of `schema` are consulted.
pub fn rdfs_closure(instances: &Graph, schema: &Graph) -> Result<Graph, VocabError> {
    let class_parents = edges(schema, RDFS_SUBCLASS_OF);
    let property_parents = edges(schema, RDFS_SUBPROPERTY_OF);
    let class_ancestors = ancestors(&class_parents)?;
    let property_ancestors = ancestors(&property_parents)?;

    let rdf_type = iri(RDF_TYPE);
    let mut out = instances.clone();
    let mut frontier: Vec<Triple> = out.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for t in &frontier {
            if t.predicate() == &rdf_type {
                if let Some(supers) = class_ancestors.get(t.object()) {
                    for sup in supers {
                        let derived = Triple::new(t.subject().clone(), rdf_type.clone(), sup.clone())
                            .expect("same shape as source triple");
                        if out.insert(derived.clone()) {
                            next.push(derived);
                        }
                    }
                }
            }
            if let Some(supers) = property_ancestors.get(t.predicate()) {
                for sup in supers {
                    let derived = Triple::new(t.subject().clone(), sup.clone(), t.object().clone())
                        .expect("super-properties are IRIs");
                    if out.insert(derived.clone()) {
                        next.push(derived);
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(out)
}

fn edges(schema: &Graph, predicate: &str) -> BTreeMap<Term, BTreeSet<Term>> {
    let mut out: BTreeMap<Term, BTreeSet<Term>> = BTreeMap::new();
    for t in schema.find(None, Some(&iri(predicate)), None) {
        // Literal parents cannot type anything.
        if !t.object().is_literal() {
            out.entry(t.subject().clone()).or_default().insert(t.object().clone());
        }
    }
    out
}

/// Transitive ancestors per node; fails on any cycle (including self-loops).
fn ancestors(parents: &BTreeMap<Term, BTreeSet<Term>>) -> Result<BTreeMap<Term, BTreeSet<Term>>, VocabError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Visiting,
        Done,
    }
    fn visit(
        node: &Term,
        parents: &BTreeMap<Term, BTreeSet<Term>>,
        marks: &mut BTreeMap<Term, Mark>,
        out: &mut BTreeMap<Term, BTreeSet<Term>>,
    ) -> Result<(), VocabError> {
        match marks.get(node) {
            Some(Mark::Done) => return Ok(()),
            Some(Mark::Visiting) => return Err(VocabError::Cycle(node.to_plain_string())),
            None => {}
        }
        marks.insert(node.clone(), Mark::Visiting);
        let mut acc = BTreeSet::new();
        for parent in parents.get(node).into_iter().flatten() {
            visit(parent, parents, marks, out)?;
            acc.insert(parent.clone());
            acc.extend(out.get(parent).into_iter().flatten().cloned());
        }
        marks.insert(node.clone(), Mark::Done);
        out.insert(node.clone(), acc);
        Ok(())
    }

    let mut marks = BTreeMap::new();
    let mut out = BTreeMap::new();
    for node in parents.keys() {
        visit(node, parents, &mut marks, &mut out)?;
    }
    Ok(out)
}
