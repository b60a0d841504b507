//! Scenario fixtures: three violating contracts, their compliant
//! counterparts and a competency-question demo graph.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::rdf::Graph;
use crate::rules::{R_19_2A, R_4_1, R_8_6, R_FRAND};
use crate::turtle::{parse_turtle, ParseDiagnostic};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
    #[error("fixture `{name}` does not parse: {diag}")]
    Parse { name: String, diag: ParseDiagnostic },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub source: &'static str,
    /// Scenario individuals that must appear in the graph.
    pub individuals: &'static [&'static str],
}

impl Fixture {
    pub fn namespace(&self) -> String {
        format!("http://example.org/{}/", self.name)
    }

    pub fn load(&self) -> Result<Graph, CorpusError> {
        let mut graph = parse_turtle(self.source, None).map_err(|diag| CorpusError::Parse {
            name: self.name.to_string(),
            diag,
        })?;
        graph.set_label(self.name);
        Ok(graph)
    }
}

const B2C: &[&str] = &["charlie", "smartWatch1", "charlieHealthData", "watchManufacturer", "contract_charlie"];
const B2B: &[&str] = &[
    "factoryOwnerAcme",
    "industrialRobot1",
    "robotData1",
    "autoRepair",
    "agreement247",
    "contract247",
    "frand247",
];
const B2G: &[&str] = &[
    "gonzalo",
    "healthMonitor1",
    "gonzaloHealthData",
    "healthAuthority",
    "healthDeviceManufacturer",
    "publicHealthEmergency2024",
    "contract191",
];
const B2G_VIOLATION: &[&str] = &[
    "gonzalo",
    "healthMonitor1",
    "gonzaloHealthData",
    "healthAuthority",
    "healthDeviceManufacturer",
    "publicHealthEmergency2024",
    "contract191",
    "competitiveProductDevelopment1",
];

pub static FIXTURES: [Fixture; 7] = [
    Fixture {
        name: "b2c-violation",
        source: include_str!("../fixtures/b2c-violation.ttl"),
        individuals: B2C,
    },
    Fixture {
        name: "b2c-compliant",
        source: include_str!("../fixtures/b2c-compliant.ttl"),
        individuals: B2C,
    },
    Fixture {
        name: "b2b-violation",
        source: include_str!("../fixtures/b2b-violation.ttl"),
        individuals: B2B,
    },
    Fixture {
        name: "b2b-compliant",
        source: include_str!("../fixtures/b2b-compliant.ttl"),
        individuals: B2B,
    },
    Fixture {
        name: "b2g-violation",
        source: include_str!("../fixtures/b2g-violation.ttl"),
        individuals: B2G_VIOLATION,
    },
    Fixture {
        name: "b2g-compliant",
        source: include_str!("../fixtures/b2g-compliant.ttl"),
        individuals: B2G,
    },
    Fixture {
        name: "cq-demo",
        source: include_str!("../fixtures/cq-demo.ttl"),
        individuals: &[],
    },
];

/// The six contract scenarios, without the CQ demo graph.
pub const SCENARIOS: [&str; 6] = [
    "b2c-violation",
    "b2c-compliant",
    "b2b-violation",
    "b2b-compliant",
    "b2g-violation",
    "b2g-compliant",
];

pub fn fixture_names() -> impl Iterator<Item = &'static str> {
    FIXTURES.iter().map(|f| f.name)
}

pub fn fixture(name: &str) -> Result<&'static Fixture, CorpusError> {
    FIXTURES
        .iter()
        .find(|f| f.name == name)
        .ok_or_else(|| CorpusError::UnknownFixture(name.to_string()))
}

pub fn fixture_source(name: &str) -> Result<&'static str, CorpusError> {
    fixture(name).map(|f| f.source)
}

pub fn load_fixture(name: &str) -> Result<Graph, CorpusError> {
    fixture(name)?.load()
}

/// Expected violation count per fixture for each article rule and R-FRAND.
pub fn expected_outcomes() -> BTreeMap<&'static str, BTreeMap<&'static str, usize>> {
    fixture_names()
        .map(|name| {
            let counts = [R_4_1, R_8_6, R_19_2A, R_FRAND]
                .into_iter()
                .map(|rule| {
                    let hit = matches!(
                        (name, rule),
                        ("b2c-violation", R_4_1) | ("b2b-violation", R_8_6) | ("b2g-violation", R_19_2A)
                    );
                    (rule, usize::from(hit))
                })
                .collect();
            (name, counts)
        })
        .collect()
}
