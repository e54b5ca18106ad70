//! Bundled per-participant tables.
//!
//! Each table is a tab-separated file of `experiment participant session
//! measure value` records. Lines starting with `#` are headers; `na` marks a
//! value that was not available.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const UTTERANCE_MEASURES: &str = "utterance_measures.tsv";
pub const NEGATIVE_MEASURES: &str = "negative_measures.tsv";
pub const TEMPORAL_RELATIONS: &str = "temporal_relations.tsv";
pub const NEGATION_TYPES: &str = "negation_types.tsv";
pub const WORD_FREQUENCIES: &str = "word_frequencies.tsv";
pub const REFERENCE: &str = "reference.tsv";

pub const TABLES: [&str; 6] = [
    UTTERANCE_MEASURES,
    NEGATIVE_MEASURES,
    TEMPORAL_RELATIONS,
    NEGATION_TYPES,
    WORD_FREQUENCIES,
    REFERENCE,
];

/// Directory of the fixtures shipped with this crate.
pub fn bundled_fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("fixtures")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SessionKey {
    Session(u8),
    All,
}

impl std::fmt::Display for SessionKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SessionKey::Session(i) => write!(f, "{i}"),
            SessionKey::All => f.write_str("all"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub experiment: String,
    pub participant: String,
    pub session: SessionKey,
    pub measure: String,
    pub value: Option<f64>,
}

/// Parses one table. Errors name the file and the 1-based line.
pub fn parse_table(name: &str, text: &str) -> Result<Vec<FixtureRecord>> {
    let bad = |line: usize, msg: String| Error::FixtureFormat {
        file: name.to_string(),
        line,
        msg,
    };
    let mut out = vec![];
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(bad(n, format!("expected 5 tab-separated fields, found {}", f.len())));
        }
        if f[..4].iter().any(|s| s.trim().is_empty()) {
            return Err(bad(n, "empty key field".into()));
        }
        let session = match f[2] {
            "all" => SessionKey::All,
            s => match s.parse::<u8>() {
                Ok(i) if (1..=5).contains(&i) => SessionKey::Session(i),
                _ => return Err(bad(n, format!("invalid session {s:?}"))),
            },
        };
        let value = match f[4].trim() {
            "na" => None,
            v => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Some(x),
                _ => return Err(bad(n, format!("invalid value {v:?}"))),
            },
        };
        out.push(FixtureRecord {
            experiment: f[0].to_string(),
            participant: f[1].to_string(),
            session,
            measure: f[3].to_string(),
            value,
        });
    }
    Ok(out)
}

/// All fixture tables, keyed by file name.
#[derive(Debug, Clone, Default)]
pub struct Fixtures {
    pub tables: BTreeMap<String, Vec<FixtureRecord>>,
}

impl Fixtures {
    /// Loads every table from `dir`; a missing table is an error listing all absent files.
    pub fn load(dir: &Path) -> Result<Fixtures> {
        let missing: Vec<&str> = TABLES.iter().copied().filter(|t| !dir.join(t).is_file()).collect();
        if !missing.is_empty() {
            return Err(Error::MissingFixture(format!("{} in {}", missing.join(", "), dir.display())));
        }
        let mut tables = BTreeMap::new();
        for t in TABLES {
            let p = dir.join(t);
            let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
            tables.insert(t.to_string(), parse_table(t, &text)?);
        }
        Ok(Fixtures { tables })
    }

    pub fn bundled() -> Result<Fixtures> {
        Fixtures::load(&bundled_fixtures_dir())
    }

    pub fn table(&self, name: &str) -> &[FixtureRecord] {
        self.tables.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Per-participant values of one measure, in file order, `na` kept as `None`.
    pub fn per_participant(&self, table: &str, experiment: &str, session: SessionKey, measure: &str) -> Vec<(String, Option<f64>)> {
        self.table(table)
            .iter()
            .filter(|r| r.experiment == experiment && r.session == session && r.measure == measure && r.participant != "ALL")
            .map(|r| (r.participant.clone(), r.value))
            .collect()
    }

    /// Available per-participant values of one measure.
    pub fn values(&self, table: &str, experiment: &str, session: SessionKey, measure: &str) -> Vec<f64> {
        self.per_participant(table, experiment, session, measure)
            .into_iter()
            .filter_map(|(_, v)| v)
            .collect()
    }

    /// A single value, typically from the reference table.
    pub fn lookup(&self, table: &str, experiment: &str, participant: &str, session: SessionKey, measure: &str) -> Option<f64> {
        self.table(table)
            .iter()
            .find(|r| r.experiment == experiment && r.participant == participant && r.session == session && r.measure == measure)
            .and_then(|r| r.value)
    }

    pub fn reference(&self, experiment: &str, session: SessionKey, measure: &str) -> Option<f64> {
        self.lookup(REFERENCE, experiment, "ALL", session, measure)
    }

    /// Sum of available values of a measure over participants and the given sessions.
    pub fn total(&self, table: &str, experiment: &str, sessions: &[SessionKey], measure: &str) -> f64 {
        sessions.iter().flat_map(|s| self.values(table, experiment, *s, measure)).sum()
    }
}
