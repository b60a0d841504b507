//! Graph registry with versioned snapshots, checks and what-if edits.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, RwLock};

use thiserror::Error;

use crate::query::{evaluate, parse_query, EvalError, SolutionSet};
use crate::rdf::{Graph, Triple};
use crate::rules::{builtin_rules, check, CheckOptions, ComplianceReport, ComplianceRule};
use crate::turtle::{parse_turtle_with_prefixes, ParseDiagnostic, PrefixMap};
use crate::vocab;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown graph `{0}`")]
    UnknownGraph(String),
    #[error("graph `{0}` has no version {1}")]
    UnknownVersion(String, u64),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("source {source_index}: {diag}")]
    Parse { source_index: usize, diag: ParseDiagnostic },
    #[error("query: {0}")]
    Query(ParseDiagnostic),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EditMode {
    Add,
    Remove,
}

impl std::str::FromStr for EditMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "add" => Ok(EditMode::Add),
            "remove" => Ok(EditMode::Remove),
            other => Err(format!("unknown edit mode `{other}`, expected add or remove")),
        }
    }
}

/// Summary of a registered graph.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GraphInfo {
    pub graph_id: String,
    pub version: u64,
    pub triple_count: usize,
}

struct Entry {
    versions: BTreeMap<u64, Arc<Graph>>,
    prefixes: PrefixMap,
}

impl Entry {
    fn current(&self) -> (u64, &Arc<Graph>) {
        let (v, g) = self.versions.last_key_value().expect("entry has a snapshot");
        (*v, g)
    }
}

type CacheKey = (String, u64, Vec<String>, bool);

/// A registry of named graphs. Each edit creates a new immutable snapshot;
/// older snapshots stay readable by version.
pub struct Session {
    rules: Vec<ComplianceRule>,
    graphs: RwLock<BTreeMap<String, Entry>>,
    reports: Mutex<HashMap<CacheKey, ComplianceReport>>,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Self::with_rules(builtin_rules())
    }

    pub fn with_rules(rules: Vec<ComplianceRule>) -> Self {
        Session {
            rules,
            graphs: RwLock::new(BTreeMap::new()),
            reports: Mutex::new(HashMap::new()),
        }
    }

    pub fn rules(&self) -> &[ComplianceRule] {
        &self.rules
    }

    /// Parses every source and registers `schema ∪ sources` under `id`.
    /// Reloading an existing id adds a new version.
    pub fn load_contracts<S: AsRef<str>>(&self, id: &str, sources: &[S]) -> Result<u64, EngineError> {
        let mut graph = vocab::schema_graph();
        let mut prefixes = PrefixMap::well_known();
        for (source_index, src) in sources.iter().enumerate() {
            let (g, p) = parse_turtle_with_prefixes(src.as_ref(), None, &PrefixMap::new())
                .map_err(|diag| EngineError::Parse { source_index, diag })?;
            graph = graph.merge(&g);
            prefixes.extend(&p);
        }
        graph.set_label(id);

        let mut graphs = self.graphs.write().expect("registry lock");
        let entry = graphs.entry(id.to_string()).or_insert_with(|| Entry {
            versions: BTreeMap::new(),
            prefixes: PrefixMap::new(),
        });
        let version = entry.versions.last_key_value().map_or(1, |(v, _)| v + 1);
        entry.versions.insert(version, Arc::new(graph));
        entry.prefixes = prefixes;
        Ok(version)
    }

    pub fn graph_ids(&self) -> Vec<GraphInfo> {
        let graphs = self.graphs.read().expect("registry lock");
        graphs
            .iter()
            .map(|(id, e)| {
                let (version, g) = e.current();
                GraphInfo {
                    graph_id: id.clone(),
                    version,
                    triple_count: g.len(),
                }
            })
            .collect()
    }

    pub fn info(&self, id: &str) -> Result<GraphInfo, EngineError> {
        let (version, g) = self.snapshot(id)?;
        Ok(GraphInfo {
            graph_id: id.to_string(),
            version,
            triple_count: g.len(),
        })
    }

    /// The current snapshot and its version.
    pub fn snapshot(&self, id: &str) -> Result<(u64, Arc<Graph>), EngineError> {
        let graphs = self.graphs.read().expect("registry lock");
        let entry = graphs.get(id).ok_or_else(|| EngineError::UnknownGraph(id.to_string()))?;
        let (v, g) = entry.current();
        Ok((v, Arc::clone(g)))
    }

    pub fn graph(&self, id: &str) -> Result<Arc<Graph>, EngineError> {
        self.snapshot(id).map(|(_, g)| g)
    }

    pub fn graph_at(&self, id: &str, version: u64) -> Result<Arc<Graph>, EngineError> {
        let graphs = self.graphs.read().expect("registry lock");
        let entry = graphs.get(id).ok_or_else(|| EngineError::UnknownGraph(id.to_string()))?;
        entry
            .versions
            .get(&version)
            .cloned()
            .ok_or_else(|| EngineError::UnknownVersion(id.to_string(), version))
    }

    pub fn prefixes(&self, id: &str) -> Result<PrefixMap, EngineError> {
        let graphs = self.graphs.read().expect("registry lock");
        graphs
            .get(id)
            .map(|e| e.prefixes.clone())
            .ok_or_else(|| EngineError::UnknownGraph(id.to_string()))
    }

    fn select_rules(&self, rule_ids: Option<&[String]>) -> Result<Vec<ComplianceRule>, EngineError> {
        match rule_ids {
            None => Ok(self.rules.clone()),
            Some(ids) => ids
                .iter()
                .enumerate()
                .filter(|(i, id)| !ids[..*i].contains(id))
                .map(|(_, id)| {
                    self.rules
                        .iter()
                        .find(|r| &r.id == id)
                        .cloned()
                        .ok_or_else(|| EngineError::UnknownRule(id.clone()))
                })
                .collect(),
        }
    }

    /// Checks the current snapshot. Repeated checks of the same snapshot,
    /// rule set and inference flag return the same report.
    pub fn run_check(&self, id: &str, rule_ids: Option<&[String]>, infer: bool) -> Result<ComplianceReport, EngineError> {
        let rules = self.select_rules(rule_ids)?;
        let (version, graph) = self.snapshot(id)?;
        let mut names: Vec<String> = rules.iter().map(|r| r.id.clone()).collect();
        names.sort();
        names.dedup();
        let key = (id.to_string(), version, names, infer);

        if let Some(report) = self.reports.lock().expect("cache lock").get(&key) {
            return Ok(report.clone());
        }
        let mut report = check(&graph, &rules, CheckOptions { infer });
        report.graph_id = id.to_string();
        report.snapshot_version = Some(version);
        self.reports.lock().expect("cache lock").insert(key, report.clone());
        Ok(report)
    }

    /// New snapshot `(current ∖ remove) ∪ add`.
    pub fn apply_whatif(&self, id: &str, add: &[Triple], remove: &[Triple]) -> Result<u64, EngineError> {
        let mut graphs = self.graphs.write().expect("registry lock");
        let entry = graphs.get_mut(id).ok_or_else(|| EngineError::UnknownGraph(id.to_string()))?;
        let (version, current) = entry.current();
        let mut next = Graph::clone(current);
        for t in remove {
            next.remove(t);
        }
        next.extend(add.iter().cloned());
        let version = version + 1;
        entry.versions.insert(version, Arc::new(next));
        Ok(version)
    }

    /// Parses a Turtle fragment with the graph's prefixes in scope and
    /// applies it as an addition or a removal.
    pub fn apply_fragment(&self, id: &str, fragment: &str, mode: EditMode) -> Result<u64, EngineError> {
        let prefixes = self.prefixes(id)?;
        let (g, _) = parse_turtle_with_prefixes(fragment, None, &prefixes)
            .map_err(|diag| EngineError::Parse { source_index: 0, diag })?;
        let triples: Vec<Triple> = g.iter().cloned().collect();
        match mode {
            EditMode::Add => self.apply_whatif(id, &triples, &[]),
            EditMode::Remove => self.apply_whatif(id, &[], &triples),
        }
    }

    pub fn query(&self, id: &str, text: &str) -> Result<SolutionSet, EngineError> {
        let q = parse_query(text).map_err(EngineError::Query)?;
        let graph = self.graph(id)?;
        Ok(evaluate(&graph, &q)?)
    }
}
