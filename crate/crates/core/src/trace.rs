//! Branch traces and their canonical path-string form.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{label_for, DecisionId, DecisionTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub decision: DecisionId,
    pub taken: bool,
}

impl Event {
    pub fn new(decision: u32, taken: bool) -> Self {
        Event {
            decision: DecisionId(decision),
            taken,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trace {
    pub events: Vec<Event>,
    pub steps_used: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("decision {0} is not in the decision table")]
    UnknownDecision(u32),
    #[error("unknown label `{0}` in path string")]
    UnknownLabel(String),
}

/// Canonical path string: `label` for taken, `-label` for not taken,
/// space separated, in event order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathKey(String);

impl PathKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Wrap an existing path string without checking it against a table.
    pub fn from_raw(s: impl Into<String>) -> Self {
        PathKey(s.into())
    }

    /// Token count, equal to the event count of the trace it came from.
    pub fn len(&self) -> usize {
        self.0.split_ascii_whitespace().count()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Recover the event sequence.
    pub fn events(&self, table: &DecisionTable) -> Result<Vec<Event>, TraceError> {
        self.0
            .split_ascii_whitespace()
            .map(|tok| {
                let (taken, label) = match tok.strip_prefix('-') {
                    Some(rest) => (false, rest),
                    None => (true, tok),
                };
                table
                    .by_label(label)
                    .map(|d| Event {
                        decision: d.id,
                        taken,
                    })
                    .ok_or_else(|| TraceError::UnknownLabel(tok.to_string()))
            })
            .collect()
    }

    /// Taken outcomes of innermost loops along the path.
    pub fn cost(&self, table: &DecisionTable) -> Result<u64, TraceError> {
        Ok(cost_of(&self.events(table)?, table))
    }
}

impl fmt::Display for PathKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub fn render_trace(trace: &Trace, table: &DecisionTable) -> Result<PathKey, TraceError> {
    render_events(&trace.events, table)
}

pub fn render_events(events: &[Event], table: &DecisionTable) -> Result<PathKey, TraceError> {
    let mut out = String::with_capacity(events.len() * 3);
    for (i, e) in events.iter().enumerate() {
        if table.get(e.decision).is_none() {
            return Err(TraceError::UnknownDecision(e.decision.0));
        }
        if i > 0 {
            out.push(' ');
        }
        if !e.taken {
            out.push('-');
        }
        // Labels are a pure function of the id.
        out.push_str(&label_for(e.decision.index()));
    }
    Ok(PathKey(out))
}

pub fn trace_length(trace: &Trace) -> usize {
    trace.events.len()
}

/// Number of innermost-loop body executions along the trace.
pub fn trace_cost(trace: &Trace, table: &DecisionTable) -> u64 {
    cost_of(&trace.events, table)
}

fn cost_of(events: &[Event], table: &DecisionTable) -> u64 {
    events
        .iter()
        .filter(|e| e.taken && table.is_innermost_loop(e.decision))
        .count() as u64
}
