//! Ground truth: exhaustive execution over a tiny domain, and closed-form
//! predictions of `k_L`, `k_S` and `l_max` per construct.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::campaign::PathSet;
use crate::dsl::{DecisionTable, Program};
use crate::interp::{Interpreter, DEFAULT_STEP_BUDGET};
use crate::schema::{
    validate_schema, Constraint, InputSchema, InputVector, ParamSpec, SchemaError, Shape, Value,
};
use crate::trace::{render_events, PathKey};

pub const DEFAULT_ORACLE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{inputs} inputs exceed the oracle cap of {cap}")]
    TooLarge { inputs: u128, cap: u64 },
    #[error("domain size must be positive")]
    EmptyDomain,
    #[error("shape {0}: {1}")]
    BadShape(Shape, String),
    #[error("no input of shape {0} completes")]
    NoFeasiblePath(Shape),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub cap: u64,
    pub step_budget: u64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: DEFAULT_ORACLE_CAP,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

/// Where each free element of an input lives.
enum Part {
    Fixed(Value),
    Key,
    Array(usize, Constraint),
    Matrix(usize, usize, Constraint),
}

struct Layout {
    names: Vec<String>,
    parts: Vec<Part>,
    elements: usize,
}

impl Layout {
    fn new(schema: &InputSchema, shape: &Shape) -> Result<Layout, OracleError> {
        let bad = |m: String| OracleError::BadShape(shape.clone(), m);
        let mut names = Vec::new();
        let mut parts = Vec::new();
        let mut elements = 0;
        for p in &schema.params {
            names.push(p.name.clone());
            parts.push(match &p.spec {
                ParamSpec::Size | ParamSpec::Coupled { .. } => Part::Fixed(Value::Int(
                    schema.resolve_dim(&p.name, shape).map_err(bad)? as i64,
                )),
                ParamSpec::Key => {
                    elements += 1;
                    Part::Key
                }
                ParamSpec::Array { len, constraint } => {
                    let n = schema.extent(len, shape).map_err(bad)?;
                    elements += n;
                    Part::Array(n, *constraint)
                }
                ParamSpec::Matrix {
                    rows,
                    cols,
                    constraint,
                } => {
                    let r = schema.extent(rows, shape).map_err(bad)?;
                    let c = schema.extent(cols, shape).map_err(bad)?;
                    elements += r * c;
                    Part::Matrix(r, c, *constraint)
                }
            });
        }
        Ok(Layout {
            names,
            parts,
            elements,
        })
    }

    /// Build the input whose elements are `digits`; `None` if a
    /// constraint rejects it.
    fn input(&self, digits: &[i64]) -> Option<InputVector> {
        let mut input = InputVector::new();
        let mut at = 0;
        for (name, part) in self.names.iter().zip(&self.parts) {
            let value = match part {
                Part::Fixed(v) => v.clone(),
                Part::Key => {
                    at += 1;
                    Value::Int(digits[at - 1])
                }
                Part::Array(n, c) => {
                    let v = &digits[at..at + n];
                    at += n;
                    if !admits(v, *c) {
                        return None;
                    }
                    Value::Array(v.to_vec())
                }
                Part::Matrix(r, cols, c) => {
                    let v = &digits[at..at + r * cols];
                    at += r * cols;
                    if !admits(v, *c) {
                        return None;
                    }
                    let rows = if *cols == 0 {
                        vec![Vec::new(); *r]
                    } else {
                        v.chunks(*cols).map(<[i64]>::to_vec).collect()
                    };
                    Value::matrix(rows)
                }
            };
            input.bindings.insert(name.clone(), value);
        }
        Some(input)
    }
}

fn admits(v: &[i64], c: Constraint) -> bool {
    match c {
        Constraint::None => true,
        Constraint::SortedAscending => v.windows(2).all(|w| w[0] <= w[1]),
        Constraint::DistinctElements => {
            let mut s = v.to_vec();
            s.sort_unstable();
            s.windows(2).all(|w| w[0] != w[1])
        }
    }
}

/// Every distinct path over all inputs of `shape` with elements in `[0, d)`.
pub fn enumerate_feasible_paths(
    program: &Program,
    table: &DecisionTable,
    schema: &InputSchema,
    shape: &Shape,
    d: u64,
) -> Result<PathSet, OracleError> {
    enumerate_with(program, table, schema, shape, d, OracleOptions::default())
}

pub fn enumerate_with(
    program: &Program,
    table: &DecisionTable,
    schema: &InputSchema,
    shape: &Shape,
    d: u64,
    options: OracleOptions,
) -> Result<PathSet, OracleError> {
    if d == 0 {
        return Err(OracleError::EmptyDomain);
    }
    validate_schema(program, schema)?;
    let layout = Layout::new(schema, shape)?;
    let total = (d as u128)
        .checked_pow(layout.elements as u32)
        .unwrap_or(u128::MAX);
    if total > options.cap as u128 {
        return Err(OracleError::TooLarge {
            inputs: total,
            cap: options.cap,
        });
    }
    let total = total as u64;
    let interp = Interpreter::new(program, table);

    const CHUNK: u64 = 4096;
    let chunks = total.div_ceil(CHUNK);
    let parts: Vec<PathSet> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut set = PathSet::new();
            let mut digits = vec![0i64; layout.elements];
            for index in c * CHUNK..((c + 1) * CHUNK).min(total) {
                // Element 0 is the most significant digit, so index order is
                // lexicographic order of the element vector.
                let mut rest = index;
                for slot in digits.iter_mut().rev() {
                    *slot = (rest % d) as i64;
                    rest /= d;
                }
                let Some(input) = layout.input(&digits) else {
                    continue;
                };
                let Ok(run) = interp.run(&input, options.step_budget) else {
                    continue;
                };
                if let Ok(key) = render_events(&run.trace.events, table) {
                    if !set.contains(&key) {
                        set.insert(key, input, 0, table);
                    }
                }
            }
            set
        })
        .collect();
    let mut out = PathSet::new();
    for p in parts {
        out.absorb(p);
    }
    Ok(out)
}

/// Union of the exhaustive path sets of every shape in `shapes`.
pub fn enumerate_shapes<'a>(
    program: &Program,
    table: &DecisionTable,
    schema: &InputSchema,
    shapes: impl IntoIterator<Item = &'a Shape>,
    d: u64,
) -> Result<PathSet, OracleError> {
    let mut out = PathSet::new();
    for shape in shapes {
        out.absorb(enumerate_feasible_paths(program, table, schema, shape, d)?);
    }
    Ok(out)
}

/// Longest enumerated path; ties go to the lexicographically smallest key.
pub fn longest_feasible_path(
    program: &Program,
    table: &DecisionTable,
    schema: &InputSchema,
    shape: &Shape,
    d: u64,
) -> Result<(PathKey, usize), OracleError> {
    let set = enumerate_feasible_paths(program, table, schema, shape, d)?;
    longest_in(&set).ok_or_else(|| OracleError::NoFeasiblePath(shape.clone()))
}

pub fn longest_in(set: &PathSet) -> Option<(PathKey, usize)> {
    set.records()
        .iter()
        .max_by(|a, b| a.length.cmp(&b.length).then_with(|| b.path.cmp(&a.path)))
        .map(|r| (r.path.clone(), r.length))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Construct {
    Linear,
    Bubble,
    Matrix,
    Merge,
}

impl Construct {
    pub const ALL: [Construct; 4] = [
        Construct::Linear,
        Construct::Bubble,
        Construct::Matrix,
        Construct::Merge,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Construct::Linear => "linear",
            Construct::Bubble => "bubble",
            Construct::Matrix => "matrix",
            Construct::Merge => "merge",
        }
    }

    /// Oracle shape for the bundled subject with these normalized dims.
    pub fn shape(self, dims: &[u64]) -> Shape {
        Shape(dims.iter().map(|&d| d as usize).collect())
    }
}

impl fmt::Display for Construct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Construct {
    type Err = PredictError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Construct::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| PredictError::UnknownConstruct(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PredictError {
    #[error("unknown construct `{0}` (expected linear, bubble, matrix or merge)")]
    UnknownConstruct(String),
    #[error("{construct}: {message}")]
    BadDims {
        construct: Construct,
        message: String,
    },
}

/// One row of the heuristic table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeuristicEntry {
    pub construct: Construct,
    pub dims: Vec<u64>,
    pub k_l: u64,
    /// `None` where saturation is stochastic and has no closed form.
    pub k_s: Option<u64>,
    pub l_max: u64,
}

impl fmt::Display for HeuristicEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k_s = self
            .k_s
            .map_or_else(|| "undefined".to_string(), |v| v.to_string());
        write!(f, "k_L={} k_S={} l_max={}", self.k_l, k_s, self.l_max)
    }
}

/// Normalize dims: matrix accepts `m,n,q` or `m,n,p,q` with `n == p`;
/// merge accepts `n` (two arrays of `n`) or `n1,n2`.
pub fn normalize_dims(construct: Construct, dims: &[u64]) -> Result<Vec<u64>, PredictError> {
    let bad = |message: &str| PredictError::BadDims {
        construct,
        message: message.to_string(),
    };
    if dims.contains(&0) {
        return Err(bad("dimensions must be positive"));
    }
    let out = match (construct, dims) {
        (Construct::Linear | Construct::Bubble, [n]) => vec![*n],
        (Construct::Matrix, [m, n, q]) => vec![*m, *n, *q],
        (Construct::Matrix, [m, n, p, q]) if n == p => vec![*m, *n, *q],
        (Construct::Matrix, [_, _, _, _]) => {
            return Err(bad(
                "columns of the first matrix must equal rows of the second",
            ))
        }
        (Construct::Merge, [n]) => vec![*n, *n],
        (Construct::Merge, [n1, n2]) => vec![*n1, *n2],
        (Construct::Linear | Construct::Bubble, _) => return Err(bad("expected one size")),
        (Construct::Matrix, _) => return Err(bad("expected m,n,q or m,n,p,q")),
        (Construct::Merge, _) => return Err(bad("expected n or n1,n2")),
    };
    Ok(out)
}

pub fn predict(construct: Construct, dims: &[u64]) -> Result<HeuristicEntry, PredictError> {
    let dims = normalize_dims(construct, dims)?;
    let (k_l, k_s, l_max) = match (construct, dims.as_slice()) {
        (Construct::Linear, &[n]) => (n, Some(n + 1), 2 * n + 1),
        (Construct::Bubble, &[n]) => {
            let k_l = n * (n - 1) / 2;
            (k_l, Some(k_l + 1), (n - 1) * (n + 2) + 1)
        }
        (Construct::Matrix, &[m, n, q]) => {
            let k_l = m * n * q;
            (k_l, Some(k_l + 1), m * (2 + q * (n + 2)) + 1)
        }
        (Construct::Merge, &[n1, n2]) => (n1 + n2, None, 2 * (n1 + n2) + 2),
        _ => unreachable!("normalized"),
    };
    Ok(HeuristicEntry {
        construct,
        dims,
        k_l,
        k_s,
        l_max,
    })
}

/// Bubble-sort `k_L` by the incremental rule `k_L(n) = k_L(n-1) + (n-1)`.
pub fn bubble_k_longest_recurrence(n: u64) -> u64 {
    (1..=n).fold(0, |acc, size| acc + size.saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn reference_rows() {
        let e = predict(Construct::Linear, &[10]).unwrap();
        assert_eq!((e.k_l, e.k_s, e.l_max), (10, Some(11), 21));
        let e = predict(Construct::Matrix, &[3, 3, 3]).unwrap();
        assert_eq!((e.k_l, e.k_s, e.l_max), (27, Some(28), 52));
        let e = predict(Construct::Matrix, &[5, 3, 3, 8]).unwrap();
        assert_eq!((e.k_l, e.k_s, e.l_max), (120, Some(121), 211));
        let e = predict(Construct::Bubble, &[4]).unwrap();
        assert_eq!((e.k_l, e.k_s, e.l_max), (6, Some(7), 19));
        let e = predict(Construct::Merge, &[2, 2]).unwrap();
        assert_eq!((e.k_l, e.k_s, e.l_max), (4, None, 10));
        assert_eq!(e.to_string(), "k_L=4 k_S=undefined l_max=10");
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(matches!(
            "heap".parse::<Construct>(),
            Err(PredictError::UnknownConstruct(_))
        ));
        assert!(predict(Construct::Matrix, &[2, 3, 4, 2]).is_err());
        assert!(predict(Construct::Linear, &[0]).is_err());
        assert!(predict(Construct::Linear, &[1, 2]).is_err());
    }

    #[test]
    fn bubble_recurrence_telescopes() {
        for n in 1..60 {
            assert_eq!(
                bubble_k_longest_recurrence(n),
                predict(Construct::Bubble, &[n]).unwrap().k_l
            );
        }
    }

    #[test]
    fn linear_single_element_binary_domain() {
        let s = corpus::linear_search();
        let set =
            enumerate_feasible_paths(&s.program, &s.table, &s.schema, &Shape(vec![1]), 2).unwrap();
        let mut keys: Vec<&str> = set.keys().map(PathKey::as_str).collect();
        keys.sort();
        assert_eq!(keys, vec!["a -b -a", "a b -a"]);
    }

    #[test]
    fn bubble_pair_binary_domain() {
        let s = corpus::bubble_sort();
        let set =
            enumerate_feasible_paths(&s.program, &s.table, &s.schema, &Shape(vec![2]), 2).unwrap();
        let mut keys: Vec<&str> = set.keys().map(PathKey::as_str).collect();
        keys.sort();
        assert_eq!(keys, vec!["a b -c -b -a", "a b c -b -a"]);
    }

    #[test]
    fn matrix_single_path_per_shape() {
        let s = corpus::matrix_mult();
        let (key, len) =
            longest_feasible_path(&s.program, &s.table, &s.schema, &Shape(vec![1, 2, 1]), 1)
                .unwrap();
        assert_eq!(key.as_str(), "a b c c -c -b -a");
        assert_eq!(len, 7);
        for d in 1..=2 {
            let set =
                enumerate_feasible_paths(&s.program, &s.table, &s.schema, &Shape(vec![1, 2, 2]), d)
                    .unwrap();
            assert_eq!(set.len(), 1);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let s = corpus::bubble_sort();
        let err = enumerate_with(
            &s.program,
            &s.table,
            &s.schema,
            &Shape(vec![8]),
            10,
            OracleOptions {
                cap: 1000,
                ..OracleOptions::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, OracleError::TooLarge { .. }));
    }
}
