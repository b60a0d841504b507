//! The `daont` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{self, SCENARIOS};
use crate::engine::{EngineError, Session};
use crate::rules::{render_report, ReportFormat, RuleKind};
use crate::service::ServeConfig;
use crate::turtle::{serialize_turtle, PrefixMap};
use crate::vocab;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const GRAPH_ID: &str = "cli";

#[derive(Debug, Parser)]
#[command(name = "daont", version, about = "Check data-sharing contracts against Data Act rules")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run compliance rules and print a report.
    Check {
        #[command(flatten)]
        inputs: Inputs,
        /// Comma-separated rule ids, or `all`.
        #[arg(long, default_value = "all")]
        rules: String,
        /// Close the graph under the schema's subclass axioms first.
        #[arg(long)]
        infer: bool,
        #[arg(long, default_value = "json")]
        format: ReportFormat,
    },
    /// Evaluate a query and print its solutions as JSON.
    Query {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, short)]
        query: PathBuf,
    },
    /// Answer the competency questions.
    Cq {
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Inspect the built-in fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
    /// Start the HTTP API.
    Serve {
        #[arg(long, env = "DAONT_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
        /// Re-check every graph at this interval, in seconds.
        #[arg(long)]
        sweep_interval: Option<u64>,
        /// Register every fixture under its own name at startup.
        #[arg(long)]
        preload: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum FixtureAction {
    List,
    Show { name: String },
    /// Write every fixture and the schema as Turtle files into DIR.
    Export { dir: PathBuf },
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Turtle files to load.
    pub files: Vec<PathBuf>,
    /// Comma-separated fixture names, or `all` for the six scenarios.
    #[arg(long)]
    pub fixtures: Option<String>,
}

#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn split_csv(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

fn load_inputs(inputs: &Inputs) -> Result<Session, Failure> {
    let mut sources: Vec<(String, String)> = Vec::new();
    if let Some(list) = &inputs.fixtures {
        let names: Vec<String> = if list == "all" {
            SCENARIOS.iter().map(|s| s.to_string()).collect()
        } else {
            split_csv(list)
        };
        for name in names {
            sources.push((format!("fixture {name}"), corpus::fixture_source(&name)?.to_string()));
        }
    }
    for path in &inputs.files {
        let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
        sources.push((path.display().to_string(), text));
    }
    let session = Session::new();
    let texts: Vec<&str> = sources.iter().map(|(_, t)| t.as_str()).collect();
    session.load_contracts(GRAPH_ID, &texts).map_err(|e| match e {
        EngineError::Parse { source_index, diag } => Failure(format!("{}:{diag}", sources[source_index].0)),
        other => other.into(),
    })?;
    Ok(session)
}

fn cmd_check(inputs: &Inputs, rules: &str, infer: bool, format: ReportFormat, out: &mut dyn Write) -> Result<i32, Failure> {
    let session = load_inputs(inputs)?;
    let ids = (rules != "all").then(|| split_csv(rules));
    let report = session.run_check(GRAPH_ID, ids.as_deref(), infer)?;
    writeln!(out, "{}", render_report(&report, format))?;
    Ok(if report.is_violated() { EXIT_VIOLATIONS } else { EXIT_OK })
}

fn cmd_query(inputs: &Inputs, query: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(query).map_err(|e| Failure(format!("{}: {e}", query.display())))?;
    let session = load_inputs(inputs)?;
    let solutions = session.query(GRAPH_ID, &text)?;
    writeln!(out, "{}", serde_json::to_string(&solutions)?)?;
    Ok(EXIT_OK)
}

fn cmd_cq(inputs: &Inputs, out: &mut dyn Write) -> Result<i32, Failure> {
    let session = load_inputs(inputs)?;
    let ids: Vec<String> = session
        .rules()
        .iter()
        .filter(|r| r.kind == RuleKind::Informational)
        .map(|r| r.id.clone())
        .collect();
    let report = session.run_check(GRAPH_ID, Some(&ids), false)?;
    let mut violated = false;
    for rule in session.rules().iter().filter(|r| ids.contains(&r.id)) {
        let result = report.rule(&rule.id).expect("requested rule in report");
        write!(out, "{} {}", rule.id, rule.title)?;
        if let Some(target) = &rule.alias_of {
            let verdict = if result.answers.is_empty() { "compliant" } else { "violated" };
            violated |= !result.answers.is_empty();
            write!(out, " [{target}, art. {}]: {verdict}", rule.article)?;
        }
        writeln!(out)?;
        if let Some(err) = &result.error {
            writeln!(out, "  error: {err}")?;
        } else if result.answers.is_empty() {
            writeln!(out, "  (no answers)")?;
        }
        for answer in &result.answers {
            let cells: Vec<String> = answer.iter().map(|(v, t)| format!("?{v}={}", t.to_plain_string())).collect();
            writeln!(out, "  {}", cells.join("  "))?;
        }
    }
    Ok(if violated { EXIT_VIOLATIONS } else { EXIT_OK })
}

fn cmd_fixtures(action: &FixtureAction, out: &mut dyn Write) -> Result<i32, Failure> {
    match action {
        FixtureAction::List => {
            for f in &corpus::FIXTURES {
                writeln!(out, "{}\t{} triples", f.name, f.load()?.len())?;
            }
        }
        FixtureAction::Show { name } => write!(out, "{}", corpus::fixture_source(name)?)?,
        FixtureAction::Export { dir } => {
            std::fs::create_dir_all(dir)?;
            for f in &corpus::FIXTURES {
                std::fs::write(dir.join(format!("{}.ttl", f.name)), f.source)?;
            }
            let schema = serialize_turtle(&vocab::schema_graph(), &PrefixMap::well_known());
            std::fs::write(dir.join("daont-schema.ttl"), schema)?;
            writeln!(out, "wrote {} files to {}", corpus::FIXTURES.len() + 1, dir.display())?;
        }
    }
    Ok(EXIT_OK)
}

fn cmd_serve(config: ServeConfig, err: &mut dyn Write) -> Result<i32, Failure> {
    let runtime = tokio::runtime::Runtime::new()?;
    writeln!(err, "listening on {}:{}", config.bind, config.port)?;
    runtime.block_on(crate::service::serve(config))?;
    Ok(EXIT_OK)
}

/// Runs the command line with `args` (including the program name) and
/// returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Check {
            inputs,
            rules,
            infer,
            format,
        } => cmd_check(inputs, rules, *infer, *format, out),
        Command::Query { inputs, query } => cmd_query(inputs, query, out),
        Command::Cq { inputs } => cmd_cq(inputs, out),
        Command::Fixtures { action } => cmd_fixtures(action, out),
        Command::Serve {
            port,
            bind,
            sweep_interval,
            preload,
        } => cmd_serve(
            ServeConfig {
                bind: bind.clone(),
                port: *port,
                sweep_interval: sweep_interval.map(std::time::Duration::from_secs),
                preload_fixtures: *preload,
            },
            err,
        ),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ERROR
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("daont").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn check_all_fixtures() {
        let (code, out, _) = run_args(&["check", "--fixtures", "all", "--rules", "all", "--format", "json"]);
        assert_eq!(code, EXIT_VIOLATIONS);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let count: usize = v["rules"].as_array().unwrap().iter().map(|r| r["violations"].as_array().unwrap().len()).sum();
        assert_eq!(count, 3);
    }

    #[test]
    fn check_compliant_fixture() {
        assert_eq!(run_args(&["check", "--fixtures", "b2c-compliant"]).0, EXIT_OK);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["check", "missing.ttl"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["check", "--fixtures", "nope"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["check", "--fixtures", "all", "--rules", "R-0"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["bogus"]).0, EXIT_ERROR);
        assert_eq!(run_args(&["check", "--format", "xml"]).0, EXIT_ERROR);
    }

    #[test]
    fn cq_empty_input() {
        let (code, out, _) = run_args(&["cq"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.matches("(no answers)").count(), 12);
    }
}
