//! Built-in rule catalogue and the check/report pipeline.

use std::cmp::Ordering;
use std::fmt;
use std::fmt::Write as _;
use std::time::Instant;

use serde::Serialize;

use crate::query::{evaluate, parse_query, Query, Solution};
use crate::rdf::Graph;
use crate::turtle::ParseDiagnostic;
use crate::vocab::{self, odrl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modality {
    Obligation,
    PermissionException,
    Prohibition,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Obligation => "obligation",
            Modality::PermissionException => "permission-exception",
            Modality::Prohibition => "prohibition",
        }
    }

    /// The deontic type as named in ODRL terms.
    pub fn deontic_type(self) -> &'static str {
        match self {
            Modality::Obligation => "Obligation",
            Modality::PermissionException => "Permission",
            Modality::Prohibition => "Prohibition",
        }
    }

    pub fn odrl_class(self) -> &'static str {
        match self {
            Modality::Obligation => odrl::DUTY,
            Modality::PermissionException => odrl::PERMISSION,
            Modality::Prohibition => odrl::PROHIBITION,
        }
    }
}

impl fmt::Display for Modality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Context {
    B2C,
    B2B,
    B2G,
    #[serde(rename = "any")]
    Any,
}

impl Context {
    pub fn as_str(self) -> &'static str {
        match self {
            Context::B2C => "B2C",
            Context::B2B => "B2B",
            Context::B2G => "B2G",
            Context::Any => "any",
        }
    }

    /// The sharing class a rule of this context anchors on.
    pub fn sharing_class(self) -> Option<&'static str> {
        match self {
            Context::B2C => Some(vocab::da::B2C_DATA_SHARING),
            Context::B2B => Some(vocab::da::B2B_DATA_SHARING),
            Context::B2G => Some(vocab::da::B2G_DATA_SHARING),
            Context::Any => None,
        }
    }
}

impl fmt::Display for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Matches of a `Violation` rule are violations; matches of an
/// `Informational` rule are answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    Violation,
    Informational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplianceRule {
    pub id: String,
    /// Article reference such as `4(1)`; empty for plain competency questions.
    pub article: String,
    pub title: String,
    pub modality: Option<Modality>,
    pub context: Context,
    pub kind: RuleKind,
    pub reading: &'static str,
    pub query: String,
    /// `{name}` placeholders are replaced by the binding of `?name`.
    pub message_template: String,
    pub invented: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alias_of: Option<String>,
}

impl ComplianceRule {
    /// A custom violation rule with no article or modality.
    pub fn custom(id: impl Into<String>, query: impl Into<String>) -> Self {
        let id = id.into();
        ComplianceRule {
            message_template: format!("{id} matched"),
            id,
            article: String::new(),
            title: String::new(),
            modality: None,
            context: Context::Any,
            kind: RuleKind::Violation,
            reading: MATCH_IS_VIOLATION,
            query: query.into(),
            invented: true,
            alias_of: None,
        }
    }

    pub fn parse(&self) -> Result<Query, ParseDiagnostic> {
        parse_query(&self.query)
    }

    pub fn is_informational(&self) -> bool {
        self.kind == RuleKind::Informational
    }

    /// Article rules are the three non-invented violation rules.
    pub fn is_article_rule(&self) -> bool {
        self.kind == RuleKind::Violation && !self.invented
    }

    pub fn render_message(&self, bindings: &Solution) -> String {
        let mut out = self.message_template.clone();
        for (var, term) in bindings.iter() {
            out = out.replace(&format!("{{{var}}}"), &term.to_plain_string());
        }
        out
    }
}

pub const MATCH_IS_VIOLATION: &str = "match-is-violation";

pub const R_4_1: &str = "R-4-1";
pub const R_8_6: &str = "R-8-6";
pub const R_19_2A: &str = "R-19-2a";
pub const R_FRAND: &str = "R-FRAND";

pub const ARTICLE_RULES: [&str; 3] = [R_4_1, R_8_6, R_19_2A];

const Q_4_1: &str = include_str!("../queries/r-4-1.rq");
const Q_8_6: &str = include_str!("../queries/r-8-6.rq");
const Q_19_2A: &str = include_str!("../queries/r-19-2a.rq");
const Q_FRAND: &str = include_str!("../queries/r-frand.rq");

const CQS: [(&str, &str, bool); 9] = [
    ("Who shares data with whom, and under what agreement?", include_str!("../queries/cq-1.rq"), false),
    ("Which parties perform which actions?", include_str!("../queries/cq-2.rq"), false),
    ("Who is obliged to make data available in a B2C sharing?", include_str!("../queries/cq-3.rq"), false),
    ("Who manufactured a product?", include_str!("../queries/cq-4.rq"), true),
    ("Which user owns or uses which product?", include_str!("../queries/cq-5.rq"), false),
    ("What service does a product provide?", include_str!("../queries/cq-6.rq"), true),
    ("When does a legal rule apply?", include_str!("../queries/cq-7.rq"), true),
    ("Which data does a product generate?", include_str!("../queries/cq-8.rq"), false),
    ("Which data holder holds which data?", include_str!("../queries/cq-9.rq"), false),
];

fn article_rule(
    id: &str,
    article: &str,
    title: &str,
    modality: Modality,
    context: Context,
    query: &str,
    template: &str,
) -> ComplianceRule {
    ComplianceRule {
        id: id.into(),
        article: article.into(),
        title: title.into(),
        modality: Some(modality),
        context,
        kind: RuleKind::Violation,
        reading: MATCH_IS_VIOLATION,
        query: query.into(),
        message_template: template.into(),
        invented: false,
        alias_of: None,
    }
}

/// The full catalogue: three article rules, R-FRAND and CQ-1 to CQ-12.
pub fn builtin_rules() -> Vec<ComplianceRule> {
    let mut rules = vec![
        article_rule(
            R_4_1,
            "4(1)",
            "B2C: Missing Obligation",
            Modality::Obligation,
            Context::B2C,
            Q_4_1,
            "Data holder {holder} has not made {data} available to the requesting user",
        ),
        article_rule(
            R_8_6,
            "8(6)",
            "B2B: Refusal Without Trade Secret Justification",
            Modality::PermissionException,
            Context::B2B,
            Q_8_6,
            "Data holder {holder} refused access by {recipient} without a trade secret justification",
        ),
        article_rule(
            R_19_2A,
            "19(2)(a)",
            "B2G: Prohibited Action",
            Modality::Prohibition,
            Context::B2G,
            Q_19_2A,
            "Public sector body {publicBody} performed prohibited action {action}",
        ),
        ComplianceRule {
            id: R_FRAND.into(),
            article: "8(1)".into(),
            title: "B2B: Sharing Without FRAND Terms".into(),
            modality: Some(Modality::Obligation),
            context: Context::B2B,
            kind: RuleKind::Violation,
            reading: MATCH_IS_VIOLATION,
            query: Q_FRAND.into(),
            message_template: "Sharing {sharing} is governed by {contract} without fair, reasonable and non-discriminatory terms"
                .into(),
            invented: true,
            alias_of: None,
        },
    ];

    for (i, (title, query, invented)) in CQS.iter().enumerate() {
        rules.push(ComplianceRule {
            id: format!("CQ-{}", i + 1),
            article: String::new(),
            title: (*title).into(),
            modality: None,
            context: Context::Any,
            kind: RuleKind::Informational,
            reading: MATCH_IS_VIOLATION,
            query: (*query).into(),
            message_template: String::new(),
            invented: *invented,
            alias_of: None,
        });
    }

    for (n, target) in (10..).zip(ARTICLE_RULES) {
        let base = rules.iter().find(|r| r.id == target).cloned().expect("article rule present");
        rules.push(ComplianceRule {
            id: format!("CQ-{n}"),
            kind: RuleKind::Informational,
            alias_of: Some(target.into()),
            ..base
        });
    }
    rules
}

pub fn builtin_rule(id: &str) -> Option<ComplianceRule> {
    builtin_rules().into_iter().find(|r| r.id == id)
}

pub fn article_rules() -> Vec<ComplianceRule> {
    builtin_rules().into_iter().filter(ComplianceRule::is_article_rule).collect()
}

/// Orders ids such as `R-4-1`, `R-19-2a`, `CQ-10` with numeric runs compared
/// as numbers.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(&cb) {
        let ord = match (x, y) {
            ((true, x), (true, y)) => {
                let (x, y) = (x.trim_start_matches('0'), y.trim_start_matches('0'));
                x.len().cmp(&y.len()).then_with(|| x.cmp(y))
            }
            ((_, x), (_, y)) => x.cmp(y),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CheckOptions {
    pub infer: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleStatus {
    Compliant,
    Violated,
    Skipped,
}

impl RuleStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RuleStatus::Compliant => "compliant",
            RuleStatus::Violated => "violated",
            RuleStatus::Skipped => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    #[serde(skip)]
    pub rule_id: String,
    pub bindings: Solution,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleResult {
    pub id: String,
    pub article: String,
    pub modality: String,
    pub context: String,
    pub status: RuleStatus,
    pub duration_us: u64,
    pub violations: Vec<Violation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Solutions of informational rules.
    #[serde(skip)]
    pub answers: Vec<Solution>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComplianceReport {
    pub graph_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub snapshot_version: Option<u64>,
    pub timestamp: String,
    pub overall_status: RuleStatus,
    pub rules: Vec<RuleResult>,
}

impl ComplianceReport {
    pub fn violation_count(&self) -> usize {
        self.rules.iter().map(|r| r.violations.len()).sum()
    }

    pub fn rule(&self, id: &str) -> Option<&RuleResult> {
        self.rules.iter().find(|r| r.id == id)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.rules.iter().flat_map(|r| &r.violations)
    }

    pub fn is_violated(&self) -> bool {
        self.overall_status == RuleStatus::Violated
    }
}

fn evaluate_rule(graph: &Graph, rule: &ComplianceRule) -> RuleResult {
    let started = Instant::now();
    let outcome = rule
        .parse()
        .map_err(|d| format!("query does not parse: {d}"))
        .and_then(|q| evaluate(graph, &q).map_err(|e| e.to_string()));
    let duration_us = started.elapsed().as_micros() as u64;

    let mut result = RuleResult {
        id: rule.id.clone(),
        article: rule.article.clone(),
        modality: rule.modality.map_or("none", Modality::as_str).into(),
        context: rule.context.as_str().into(),
        status: RuleStatus::Compliant,
        duration_us,
        violations: Vec::new(),
        error: None,
        answers: Vec::new(),
    };
    match outcome {
        Err(message) => {
            result.status = RuleStatus::Skipped;
            result.error = Some(message);
        }
        Ok(solutions) if rule.is_informational() => result.answers = solutions.into_iter().collect(),
        Ok(solutions) => {
            result.violations = solutions
                .into_iter()
                .map(|bindings| Violation {
                    rule_id: rule.id.clone(),
                    message: rule.render_message(&bindings),
                    bindings,
                })
                .collect();
            if !result.violations.is_empty() {
                result.status = RuleStatus::Violated;
            }
        }
    }
    result
}

/// Runs `rules` over `graph`. The report's graph id is the graph's label.
///
/// A rule whose query fails to parse or evaluate is marked skipped; the
/// other rules still run.
pub fn check(graph: &Graph, rules: &[ComplianceRule], options: CheckOptions) -> ComplianceReport {
    let closed;
    let mut closure_error = None;
    let target = if options.infer {
        match vocab::rdfs_closure(graph, &vocab::schema_graph()) {
            Ok(g) => {
                closed = g;
                &closed
            }
            Err(e) => {
                closure_error = Some(e.to_string());
                graph
            }
        }
    } else {
        graph
    };

    let mut entries: Vec<RuleResult> = rules
        .iter()
        .map(|rule| {
            let mut result = evaluate_rule(target, rule);
            if let Some(err) = &closure_error {
                result.status = RuleStatus::Skipped;
                result.violations.clear();
                result.answers.clear();
                result.error = Some(format!("inference failed: {err}"));
            }
            result
        })
        .collect();
    entries.sort_by(|a, b| natural_cmp(&a.id, &b.id));

    let overall_status = if entries.iter().any(|r| r.status == RuleStatus::Violated) {
        RuleStatus::Violated
    } else {
        RuleStatus::Compliant
    };
    ComplianceReport {
        graph_id: graph.label().unwrap_or("default").to_string(),
        snapshot_version: None,
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        overall_status,
        rules: entries,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ReportFormat {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "text" => Ok(ReportFormat::Text),
            other => Err(format!("unknown report format `{other}`")),
        }
    }
}

pub fn render_report(report: &ComplianceReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string(report).expect("report serializes"),
        ReportFormat::Text => render_text(report),
    }
}

fn render_text(report: &ComplianceReport) -> String {
    let mut out = String::new();
    let _ = write!(out, "graph {}", report.graph_id);
    if let Some(v) = report.snapshot_version {
        let _ = write!(out, " (version {v})");
    }
    let _ = writeln!(out, " at {}", report.timestamp);
    let _ = writeln!(
        out,
        "overall: {} ({} violations)",
        report.overall_status.as_str(),
        report.violation_count()
    );
    for rule in &report.rules {
        let article = if rule.article.is_empty() { "-" } else { &rule.article };
        let _ = write!(
            out,
            "{} [art. {article}, {}, {}]: {}",
            rule.id,
            rule.modality,
            rule.context,
            rule.status.as_str()
        );
        match (&rule.error, rule.status) {
            (Some(err), _) => {
                let _ = writeln!(out, ": {err}");
            }
            (None, RuleStatus::Violated) => {
                let _ = writeln!(out, " ({})", rule.violations.len());
            }
            _ => out.push('\n'),
        }
        for v in &rule.violations {
            let _ = writeln!(out, "  - {}", v.message);
            for (var, term) in v.bindings.iter() {
                let _ = writeln!(out, "      ?{var} = {}", term.to_plain_string());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turtle::parse_turtle;

    const B2G_VIOLATION: &str = include_str!("../fixtures/b2g-violation.ttl");

    #[test]
    fn catalogue_queries_parse() {
        for rule in builtin_rules() {
            let q = rule.parse().unwrap_or_else(|e| panic!("{}: {e}", rule.id));
            if rule.message_template.is_empty() {
                continue;
            }
            for var in &q.projection {
                let slot = format!("{{{}}}", var.name());
                assert!(rule.message_template.contains(&slot), "{} lacks {slot}", rule.id);
            }
        }
    }

    #[test]
    fn catalogue_ids() {
        let ids: Vec<String> = builtin_rules().into_iter().map(|r| r.id).collect();
        assert_eq!(&ids[..4], ["R-4-1", "R-8-6", "R-19-2a", "R-FRAND"]);
        assert_eq!(ids.len(), 16);
        assert_eq!(ids[15], "CQ-12");
    }

    #[test]
    fn modality_table() {
        let got: Vec<(String, Option<Modality>, Context)> =
            article_rules().into_iter().map(|r| (r.article, r.modality, r.context)).collect();
        assert_eq!(
            got,
            [
                ("4(1)".into(), Some(Modality::Obligation), Context::B2C),
                ("8(6)".into(), Some(Modality::PermissionException), Context::B2B),
                ("19(2)(a)".into(), Some(Modality::Prohibition), Context::B2G),
            ]
        );
        assert_eq!(builtin_rule(R_19_2A).unwrap().modality.unwrap().odrl_class(), odrl::PROHIBITION);
    }

    #[test]
    fn aliases_share_query_text() {
        for (cq, target) in [("CQ-10", R_4_1), ("CQ-11", R_8_6), ("CQ-12", R_19_2A)] {
            let a = builtin_rule(cq).unwrap();
            assert_eq!(a.query, builtin_rule(target).unwrap().query);
            assert_eq!(a.alias_of.as_deref(), Some(target));
            assert!(a.is_informational());
        }
    }

    #[test]
    fn natural_order() {
        let mut ids = vec!["R-FRAND", "CQ-10", "R-19-2a", "CQ-2", "R-8-6", "R-4-1", "CQ-1"];
        ids.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(ids, ["CQ-1", "CQ-2", "CQ-10", "R-4-1", "R-8-6", "R-19-2a", "R-FRAND"]);
    }

    #[test]
    fn empty_graph_all_compliant() {
        let report = check(&Graph::new(), &builtin_rules(), CheckOptions::default());
        assert_eq!(report.overall_status, RuleStatus::Compliant);
        assert!(report.rules.iter().all(|r| r.status == RuleStatus::Compliant));
        assert_eq!(report.violation_count(), 0);
    }

    #[test]
    fn informational_rules_never_violate() {
        let g = parse_turtle(B2G_VIOLATION, None).unwrap();
        let report = check(&g, &builtin_rules(), CheckOptions::default());
        assert_eq!(report.violation_count(), 1);
        let cq12 = report.rule("CQ-12").unwrap();
        assert_eq!(cq12.status, RuleStatus::Compliant);
        assert_eq!(cq12.answers.len(), 1);
    }

    #[test]
    fn broken_rule_is_skipped_not_fatal() {
        let g = parse_turtle(B2G_VIOLATION, None).unwrap();
        let mut rules = article_rules();
        rules.push(ComplianceRule::custom("X-1", "SELECT ?x WHERE { ?x ?p ?o } ORDER BY ?x"));
        let report = check(&g, &rules, CheckOptions::default());
        let x = report.rule("X-1").unwrap();
        assert_eq!(x.status, RuleStatus::Skipped);
        assert!(x.error.as_deref().unwrap().contains("ORDER BY"));
        assert_eq!(report.overall_status, RuleStatus::Violated);
    }

    #[test]
    fn text_names_entities() {
        let g = parse_turtle(B2G_VIOLATION, None).unwrap();
        let report = check(&g, &article_rules(), CheckOptions::default());
        let text = render_report(&report, ReportFormat::Text);
        assert!(text.contains("healthAuthority"));
        assert!(text.contains("competitiveProductDevelopment1"));
        assert!(text.contains("19(2)(a)"));
        assert_eq!(text, render_report(&report.clone(), ReportFormat::Text));
    }

    #[test]
    fn json_shape() {
        let report = check(&Graph::with_label("g"), &article_rules(), CheckOptions::default());
        let json = render_report(&report, ReportFormat::Json);
        assert!(json.contains("\"overall_status\":\"compliant\""));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["graph_id"], "g");
        assert_eq!(v["rules"][2]["modality"], "prohibition");
        assert!(v["rules"][0]["duration_us"].is_u64());
        assert!(v.get("snapshot_version").is_none());
    }

    #[test]
    fn message_substitution() {
        let g = parse_turtle(B2G_VIOLATION, None).unwrap();
        let report = check(&g, &article_rules(), CheckOptions::default());
        let v = report.violations().next().unwrap();
        assert_eq!(v.rule_id, R_19_2A);
        assert!(!v.message.contains('{'));
        assert_eq!(v.bindings.variables().collect::<Vec<_>>(), ["action", "publicBody"]);
    }
}
