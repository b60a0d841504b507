use std::collections::{BTreeSet, HashMap, HashSet};

use super::{RdfError, Term, Triple};

/// An in-memory set of triples with three lookup indexes:
/// by subject, by (predicate, object) and by object.
///
/// A `Graph` handed to readers is treated as an immutable snapshot; edits
/// happen on a clone.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    label: Option<String>,
    triples: HashSet<Triple>,
    by_subject: HashMap<Term, HashSet<Triple>>,
    by_predicate_object: HashMap<(Term, Term), HashSet<Triple>>,
    by_object: HashMap<Term, HashSet<Triple>>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_label(label: impl Into<String>) -> Self {
        Graph {
            label: Some(label.into()),
            ..Self::default()
        }
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = Some(label.into());
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    /// Returns true iff the triple was not already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        if self.triples.contains(&triple) {
            return false;
        }
        self.by_subject
            .entry(triple.subject().clone())
            .or_default()
            .insert(triple.clone());
        self.by_predicate_object
            .entry((triple.predicate().clone(), triple.object().clone()))
            .or_default()
            .insert(triple.clone());
        self.by_object
            .entry(triple.object().clone())
            .or_default()
            .insert(triple.clone());
        self.triples.insert(triple)
    }

    /// Validating insert from loose terms.
    pub fn insert_terms(&mut self, subject: Term, predicate: Term, object: Term) -> Result<bool, RdfError> {
        Ok(self.insert(Triple::new(subject, predicate, object)?))
    }

    /// Returns true iff the triple was present.
    pub fn remove(&mut self, triple: &Triple) -> bool {
        if !self.triples.remove(triple) {
            return false;
        }
        remove_from(&mut self.by_subject, triple.subject(), triple);
        remove_from(
            &mut self.by_predicate_object,
            &(triple.predicate().clone(), triple.object().clone()),
            triple,
        );
        remove_from(&mut self.by_object, triple.object(), triple);
        true
    }

    pub fn iter(&self) -> impl Iterator<Item = &Triple> + '_ {
        self.triples.iter()
    }

    /// Triples in a stable order (subject, predicate, object).
    pub fn sorted_triples(&self) -> Vec<&Triple> {
        let mut out: Vec<&Triple> = self.triples.iter().collect();
        out.sort();
        out
    }

    /// Every triple matching the bound positions; `None` is a wildcard.
    pub fn find(&self, subject: Option<&Term>, predicate: Option<&Term>, object: Option<&Term>) -> Vec<&Triple> {
        let matches = |t: &&Triple| {
            subject.is_none_or(|s| t.subject() == s)
                && predicate.is_none_or(|p| t.predicate() == p)
                && object.is_none_or(|o| t.object() == o)
        };
        let candidates: Box<dyn Iterator<Item = &Triple>> = match (subject, predicate, object) {
            (Some(s), _, _) => match self.by_subject.get(s) {
                Some(set) => Box::new(set.iter()),
                None => return Vec::new(),
            },
            (None, Some(p), Some(o)) => match self.by_predicate_object.get(&(p.clone(), o.clone())) {
                Some(set) => Box::new(set.iter()),
                None => return Vec::new(),
            },
            (None, _, Some(o)) => match self.by_object.get(o) {
                Some(set) => Box::new(set.iter()),
                None => return Vec::new(),
            },
            (None, _, None) => Box::new(self.triples.iter()),
        };
        candidates.filter(matches).collect()
    }

    /// Distinct terms occurring in any position.
    pub fn terms(&self) -> BTreeSet<&Term> {
        let mut out = BTreeSet::new();
        for t in &self.triples {
            out.insert(t.subject());
            out.insert(t.predicate());
            out.insert(t.object());
        }
        out
    }

    pub fn extend<I: IntoIterator<Item = Triple>>(&mut self, triples: I) {
        for t in triples {
            self.insert(t);
        }
    }

    /// Union of both graphs. Blank node labels of `other` that collide with
    /// labels already used in `self` are renamed apart first.
    pub fn merge(&self, other: &Graph) -> Graph {
        let mut out = self.clone();
        let ours: HashSet<&str> = self
            .terms()
            .into_iter()
            .filter_map(|t| match t {
                Term::Blank(b) => Some(b.label()),
                _ => None,
            })
            .collect();
        if ours.is_empty() {
            out.extend(other.iter().cloned());
            return out;
        }
        let theirs: HashSet<&str> = other
            .terms()
            .into_iter()
            .filter_map(|t| match t {
                Term::Blank(b) => Some(b.label()),
                _ => None,
            })
            .collect();
        let mut renames: HashMap<&str, Term> = HashMap::new();
        let mut counter = 0usize;
        for label in theirs.iter().copied().filter(|l| ours.contains(l)) {
            let fresh = loop {
                counter += 1;
                let candidate = format!("{label}_{counter}");
                if !ours.contains(candidate.as_str()) && !theirs.contains(candidate.as_str()) {
                    break candidate;
                }
            };
            renames.insert(label, Term::blank(fresh).expect("derived from a valid label"));
        }
        let rename = |term: &Term| match term {
            Term::Blank(b) => renames.get(b.label()).cloned().unwrap_or_else(|| term.clone()),
            _ => term.clone(),
        };
        for t in other.iter() {
            let renamed = Triple::new(rename(t.subject()), t.predicate().clone(), rename(t.object()))
                .expect("renaming preserves triple shape");
            out.insert(renamed);
        }
        out
    }

    #[cfg(test)]
    pub(crate) fn indexes_consistent(&self) -> bool {
        fn check<K>(index: &HashMap<K, HashSet<Triple>>, triples: &HashSet<Triple>) -> bool {
            index.values().map(HashSet::len).sum::<usize>() == triples.len()
                && index.values().all(|set| !set.is_empty() && set.iter().all(|t| triples.contains(t)))
        }
        check(&self.by_subject, &self.triples)
            && check(&self.by_predicate_object, &self.triples)
            && check(&self.by_object, &self.triples)
    }
}

fn remove_from<K: std::hash::Hash + Eq>(index: &mut HashMap<K, HashSet<Triple>>, key: &K, triple: &Triple) {
    if let Some(set) = index.get_mut(key) {
        set.remove(triple);
        if set.is_empty() {
            index.remove(key);
        }
    }
}

/// Set equality of the triples; the label is not compared.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.triples == other.triples
    }
}

impl Eq for Graph {}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        g.extend(iter);
        g
    }
}
