//! Deliverable test data, persisted reports and the heuristic table.

use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::campaign::{rows_to_csv, CampaignReport, PathSet};
use crate::interp::{execute, DEFAULT_STEP_BUDGET};
use crate::oracle::{Construct, HeuristicEntry};
use crate::schema::InputVector;
use crate::trace::{render_trace, PathKey};
use crate::Subject;

#[derive(Debug, Error)]
pub enum SuiteError {
    #[error("entry {index}: input replays to `{actual}` instead of `{expected}`")]
    ReplayMismatch {
        index: usize,
        expected: PathKey,
        actual: String,
    },
    #[error("unsupported format `{0}` (expected json or csv)")]
    UnsupportedFormat(String),
    #[error("suite is for `{found}`, not `{expected}`")]
    WrongSubject { expected: String, found: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteEntry {
    pub path: PathKey,
    pub input: InputVector,
    pub length: usize,
    pub cost: u64,
    pub first_k: u64,
}

/// One representative input per unique feasible path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSuite {
    pub subject: String,
    pub schema_digest: String,
    /// Configuration that produced the paths (campaign or oracle settings).
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub entries: Vec<SuiteEntry>,
}

impl TestSuite {
    pub fn from_json(bytes: &[u8]) -> Result<TestSuite, SuiteError> {
        Ok(serde_json::from_slice(bytes)?)
    }

    /// Re-execute every entry and check it still covers its path.
    pub fn verify(&self, subject: &Subject) -> Result<(), SuiteError> {
        if self.subject != subject.name() {
            return Err(SuiteError::WrongSubject {
                expected: subject.name().to_string(),
                found: self.subject.clone(),
            });
        }
        for (index, e) in self.entries.iter().enumerate() {
            replay(subject, index, &e.path, &e.input)?;
        }
        Ok(())
    }
}

fn replay(
    subject: &Subject,
    index: usize,
    expected: &PathKey,
    input: &InputVector,
) -> Result<(), SuiteError> {
    let actual = match execute(&subject.program, &subject.table, input, DEFAULT_STEP_BUDGET) {
        Ok(run) => render_trace(&run.trace, &subject.table)
            .map(|k| k.to_string())
            .unwrap_or_else(|e| e.to_string()),
        Err(e) => format!("<{e}>"),
    };
    if actual == expected.as_str() {
        Ok(())
    } else {
        Err(SuiteError::ReplayMismatch {
            index,
            expected: expected.clone(),
            actual,
        })
    }
}

/// Build the suite for `set`, entries in first-seen order, checking replay.
pub fn extract_suite(
    set: &PathSet,
    subject: &Subject,
    config: serde_json::Value,
    seed: Option<u64>,
) -> Result<TestSuite, SuiteError> {
    let mut entries = Vec::with_capacity(set.len());
    for (index, r) in set.records().iter().enumerate() {
        replay(subject, index, &r.path, &r.input)?;
        entries.push(SuiteEntry {
            path: r.path.clone(),
            input: r.input.clone(),
            length: r.length,
            cost: r.cost,
            first_k: r.first_k,
        });
    }
    Ok(TestSuite {
        subject: subject.name().to_string(),
        schema_digest: subject.schema.digest(),
        config,
        seed,
        entries,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = SuiteError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(SuiteError::UnsupportedFormat(s.to_string())),
        }
    }
}

pub enum Exportable<'a> {
    Suite(&'a TestSuite),
    Report(&'a CampaignReport),
    Heuristics(&'a HeuristicStore),
}

/// Serialize with stable key order; identical inputs give identical bytes.
pub fn export(item: Exportable<'_>, format: Format) -> Result<Vec<u8>, SuiteError> {
    let mut bytes = match (item, format) {
        (Exportable::Suite(s), Format::Json) => serde_json::to_vec_pretty(s)?,
        (Exportable::Report(r), Format::Json) => serde_json::to_vec_pretty(r)?,
        (Exportable::Heuristics(h), Format::Json) => serde_json::to_vec_pretty(h)?,
        (Exportable::Report(r), Format::Csv) => return Ok(rows_to_csv(&r.rows)),
        (Exportable::Suite(s), Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["path", "length", "cost", "first_k", "input"])?;
            for e in &s.entries {
                w.write_record([
                    e.path.to_string(),
                    e.length.to_string(),
                    e.cost.to_string(),
                    e.first_k.to_string(),
                    e.input.to_json(),
                ])?;
            }
            return w
                .into_inner()
                .map_err(|e| SuiteError::Csv(e.into_error().into()));
        }
        (Exportable::Heuristics(h), Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["construct", "dims", "source", "k_l", "k_s", "l_max"])?;
            for r in &h.rows {
                let dims: Vec<String> = r.entry.dims.iter().map(u64::to_string).collect();
                w.write_record([
                    r.entry.construct.to_string(),
                    dims.join("x"),
                    r.source.as_str().to_string(),
                    r.entry.k_l.to_string(),
                    r.entry.k_s.map(|v| v.to_string()).unwrap_or_default(),
                    r.entry.l_max.to_string(),
                ])?;
            }
            return w
                .into_inner()
                .map_err(|e| SuiteError::Csv(e.into_error().into()));
        }
    };
    bytes.push(b'\n');
    Ok(bytes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Predicted,
    Measured,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Predicted => "predicted",
            Source::Measured => "measured",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicRow {
    #[serde(flatten)]
    pub entry: HeuristicEntry,
    pub source: Source,
}

/// Heuristic table keyed by (construct, dims, source), kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicStore {
    pub rows: Vec<HeuristicRow>,
}

/// Measured minus predicted, per column.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeuristicDelta {
    pub k_l: i64,
    pub k_s: Option<i64>,
    pub l_max: i64,
}

impl HeuristicDelta {
    pub fn is_zero(&self) -> bool {
        self.k_l == 0 && self.k_s.unwrap_or(0) == 0 && self.l_max == 0
    }
}

impl HeuristicStore {
    pub fn from_json(bytes: &[u8]) -> Result<HeuristicStore, SuiteError> {
        Ok(serde_json::from_slice(bytes)?)
    }

    pub fn get(
        &self,
        construct: Construct,
        dims: &[u64],
        source: Source,
    ) -> Option<&HeuristicEntry> {
        self.rows
            .iter()
            .find(|r| r.entry.construct == construct && r.entry.dims == dims && r.source == source)
            .map(|r| &r.entry)
    }

    pub fn diff(&self, construct: Construct, dims: &[u64]) -> Option<HeuristicDelta> {
        let p = self.get(construct, dims, Source::Predicted)?;
        let m = self.get(construct, dims, Source::Measured)?;
        let k_s = match (m.k_s, p.k_s) {
            (Some(a), Some(b)) => Some(a as i64 - b as i64),
            _ => None,
        };
        Some(HeuristicDelta {
            k_l: m.k_l as i64 - p.k_l as i64,
            k_s,
            l_max: m.l_max as i64 - p.l_max as i64,
        })
    }
}

pub fn upsert_heuristic(store: &mut HeuristicStore, entry: HeuristicEntry, source: Source) {
    let key = |r: &HeuristicRow| (r.entry.construct, r.entry.dims.clone(), r.source);
    let row = HeuristicRow { entry, source };
    let k = key(&row);
    match store.rows.binary_search_by(|r| key(r).cmp(&k)) {
        Ok(i) => store.rows[i] = row,
        Err(i) => store.rows.insert(i, row),
    }
}
