//! Input shapes: which parameters are dimensions, keys, arrays and matrices,
//! and how a concrete input binds to a program's parameters.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dsl::{parse_expr, BinOp, Expr, ExprKind, ParamKind, Program, UnOp};

/// One concrete parameter value.
///
/// A matrix with zero rows is represented as the empty array; both bind to
/// `int[][]` parameters.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Int(i64),
    Array(Vec<i64>),
    Matrix(Vec<Vec<i64>>),
}

impl Value {
    pub fn matrix(rows: Vec<Vec<i64>>) -> Value {
        if rows.is_empty() {
            Value::Array(Vec::new())
        } else {
            Value::Matrix(rows)
        }
    }

    pub fn fits(&self, kind: ParamKind) -> bool {
        match (self, kind) {
            (Value::Int(_), ParamKind::Int) => true,
            (Value::Array(_), ParamKind::IntArray) => true,
            (Value::Array(v), ParamKind::IntMatrix) => v.is_empty(),
            (Value::Matrix(rows), ParamKind::IntMatrix) => {
                let cols = rows.first().map_or(0, Vec::len);
                rows.iter().all(|r| r.len() == cols)
            }
            _ => false,
        }
    }

    /// All scalar elements in row-major order.
    pub fn elements(&self) -> Vec<i64> {
        match self {
            Value::Int(v) => vec![*v],
            Value::Array(v) => v.clone(),
            Value::Matrix(rows) => rows.iter().flatten().copied().collect(),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serde_json::to_string(self).map_err(|_| fmt::Error)?)
    }
}

/// A binding of every program parameter to a value.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InputVector {
    pub bindings: BTreeMap<String, Value>,
}

impl InputVector {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, value: Value) -> Self {
        self.bindings.insert(name.to_string(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<&Value> {
        self.bindings.get(name)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("input serializes")
    }

    /// Every parameter bound exactly once with a value of its declared kind.
    pub fn check_against(&self, program: &Program) -> Result<(), SchemaError> {
        let mut problems = Vec::new();
        for p in &program.params {
            match self.bindings.get(&p.name) {
                None => problems.push(format!("{}: missing from input", p.name)),
                Some(v) if !v.fits(p.kind) => {
                    problems.push(format!("{}: value {v} does not fit {}", p.name, p.kind))
                }
                _ => {}
            }
        }
        for name in self.bindings.keys() {
            if program.param(name).is_none() {
                problems.push(format!("{name}: not a parameter of {}", program.name));
            }
        }
        SchemaError::from_list(problems)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("schema mismatch: {}", .mismatches.join("; "))]
pub struct SchemaError {
    pub mismatches: Vec<String>,
}

impl SchemaError {
    fn from_list(mismatches: Vec<String>) -> Result<(), SchemaError> {
        if mismatches.is_empty() {
            Ok(())
        } else {
            Err(SchemaError { mismatches })
        }
    }

    /// True if some mismatch concerns `name`.
    pub fn mentions(&self, name: &str) -> bool {
        self.mismatches
            .iter()
            .any(|m| m.split(':').next() == Some(name))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Extent {
    Fixed(usize),
    Param(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    #[default]
    None,
    SortedAscending,
    DistinctElements,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ParamSpec {
    /// Scalar dimension supplied by the shape.
    Size,
    /// Scalar drawn uniformly from the domain, like a search key.
    Key,
    /// Scalar dimension forced equal to another dimension.
    Coupled { equals: String },
    Array {
        len: Extent,
        #[serde(default)]
        constraint: Constraint,
    },
    Matrix {
        rows: Extent,
        cols: Extent,
        #[serde(default)]
        constraint: Constraint,
    },
}

impl ParamSpec {
    pub fn kind(&self) -> ParamKind {
        match self {
            ParamSpec::Size | ParamSpec::Key | ParamSpec::Coupled { .. } => ParamKind::Int,
            ParamSpec::Array { .. } => ParamKind::IntArray,
            ParamSpec::Matrix { .. } => ParamKind::IntMatrix,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamSchema {
    pub name: String,
    #[serde(flatten)]
    pub spec: ParamSpec,
}

/// Declarative description of how to build inputs for one subject.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputSchema {
    pub params: Vec<ParamSchema>,
    /// Innermost-loop executions of the longest path, as an expression over
    /// the dimension parameters. Defaults to the total element count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<String>,
}

/// Assignment of the free dimensions of a schema, in schema order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Shape(pub Vec<usize>);

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl InputSchema {
    pub fn from_json(text: &str) -> Result<Self, SchemaError> {
        let schema: InputSchema = serde_json::from_str(text).map_err(|e| SchemaError {
            mismatches: vec![format!("schema: {e}")],
        })?;
        schema.check()?;
        Ok(schema)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(self).expect("schema serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }

    pub fn param(&self, name: &str) -> Option<&ParamSchema> {
        self.params.iter().find(|p| p.name == name)
    }

    /// Names of the free dimensions; a [`Shape`] assigns these in order.
    pub fn dims(&self) -> Vec<&str> {
        self.params
            .iter()
            .filter(|p| matches!(p.spec, ParamSpec::Size))
            .map(|p| p.name.as_str())
            .collect()
    }

    /// Internal consistency: unique names, resolvable and acyclic sizing.
    pub fn check(&self) -> Result<(), SchemaError> {
        let mut problems = Vec::new();
        let mut seen = HashMap::new();
        for p in &self.params {
            if seen.insert(p.name.as_str(), ()).is_some() {
                problems.push(format!("{}: declared twice", p.name));
            }
        }
        for p in &self.params {
            match &p.spec {
                ParamSpec::Coupled { equals } => {
                    if let Err(e) = self.resolve_dim(equals, &Shape(vec![0; self.dims().len()])) {
                        problems.push(format!("{}: {e}", p.name));
                    }
                }
                ParamSpec::Array { len, .. } => self.check_extent(&p.name, len, &mut problems),
                ParamSpec::Matrix { rows, cols, .. } => {
                    self.check_extent(&p.name, rows, &mut problems);
                    self.check_extent(&p.name, cols, &mut problems);
                }
                ParamSpec::Size | ParamSpec::Key => {}
            }
        }
        if let Some(cost) = &self.cost {
            match parse_expr(cost) {
                Ok(expr) => {
                    for var in expr.variables() {
                        if !self.is_dimension(var) {
                            problems
                                .push(format!("cost: `{var}` is not a size or coupled parameter"));
                        }
                    }
                }
                Err(e) => problems.push(format!("cost: {e}")),
            }
        }
        SchemaError::from_list(problems)
    }

    fn is_dimension(&self, name: &str) -> bool {
        matches!(
            self.param(name).map(|p| &p.spec),
            Some(ParamSpec::Size | ParamSpec::Coupled { .. })
        )
    }

    fn check_extent(&self, owner: &str, extent: &Extent, problems: &mut Vec<String>) {
        if let Extent::Param(name) = extent {
            if !self.is_dimension(name) {
                problems.push(format!(
                    "{owner}: sized by `{name}`, which is not a size or coupled parameter"
                ));
            }
        }
    }

    /// Value of a dimension parameter under `shape`, following couplings.
    pub fn resolve_dim(&self, name: &str, shape: &Shape) -> Result<usize, String> {
        let dims = self.dims();
        let mut current = name;
        for _ in 0..=self.params.len() {
            match self.param(current).map(|p| &p.spec) {
                Some(ParamSpec::Size) => {
                    let i = dims.iter().position(|d| *d == current).expect("dimension");
                    return shape
                        .0
                        .get(i)
                        .copied()
                        .ok_or_else(|| format!("shape has no value for `{current}`"));
                }
                Some(ParamSpec::Coupled { equals }) => current = equals,
                Some(_) => return Err(format!("`{current}` is not a dimension")),
                None => return Err(format!("`{current}` is not declared")),
            }
        }
        Err(format!("coupling cycle through `{name}`"))
    }

    pub fn extent(&self, extent: &Extent, shape: &Shape) -> Result<usize, String> {
        match extent {
            Extent::Fixed(n) => Ok(*n),
            Extent::Param(name) => self.resolve_dim(name, shape),
        }
    }

    /// Predicted innermost-loop cost of the longest path for `shape`.
    pub fn shape_cost(&self, shape: &Shape) -> u64 {
        match &self.cost {
            Some(src) => {
                let expr = parse_expr(src).expect("checked cost expression");
                let value = eval_dims(&expr, &|name| {
                    self.resolve_dim(name, shape).map(|v| v as i64).ok()
                });
                value.unwrap_or(i64::MAX).max(0) as u64
            }
            None => self.element_count(shape),
        }
    }

    /// Number of array and matrix elements an input of this shape carries.
    pub fn element_count(&self, shape: &Shape) -> u64 {
        self.params
            .iter()
            .map(|p| match &p.spec {
                ParamSpec::Array { len, .. } => self.extent(len, shape).unwrap_or(0) as u64,
                ParamSpec::Matrix { rows, cols, .. } => {
                    (self.extent(rows, shape).unwrap_or(0) * self.extent(cols, shape).unwrap_or(0))
                        as u64
                }
                _ => 0,
            })
            .sum()
    }
}

/// Evaluate a dimension formula; `None` on unknown names or division by zero.
fn eval_dims(e: &Expr, lookup: &dyn Fn(&str) -> Option<i64>) -> Option<i64> {
    Some(match &e.kind {
        ExprKind::Int(v) => *v,
        ExprKind::Var(n) => lookup(n)?,
        ExprKind::Index(..) | ExprKind::Index2(..) => return None,
        ExprKind::Unary(UnOp::Neg, inner) => eval_dims(inner, lookup)?.wrapping_neg(),
        ExprKind::Unary(UnOp::Not, inner) => (eval_dims(inner, lookup)? == 0) as i64,
        ExprKind::Binary(op, a, b) => {
            let (a, b) = (eval_dims(a, lookup)?, eval_dims(b, lookup)?);
            match op {
                BinOp::Add => a.wrapping_add(b),
                BinOp::Sub => a.wrapping_sub(b),
                BinOp::Mul => a.wrapping_mul(b),
                BinOp::Div => a.checked_div(b)?,
                BinOp::Rem => a.checked_rem(b)?,
                BinOp::Eq => (a == b) as i64,
                BinOp::Ne => (a != b) as i64,
                BinOp::Lt => (a < b) as i64,
                BinOp::Le => (a <= b) as i64,
                BinOp::Gt => (a > b) as i64,
                BinOp::Ge => (a >= b) as i64,
                BinOp::And => (a != 0 && b != 0) as i64,
                BinOp::Or => (a != 0 || b != 0) as i64,
            }
        }
    })
}

/// Check that `schema` describes exactly the parameters of `program`.
pub fn validate_schema(program: &Program, schema: &InputSchema) -> Result<(), SchemaError> {
    let mut problems = match schema.check() {
        Ok(()) => Vec::new(),
        Err(e) => e.mismatches,
    };
    for p in &program.params {
        match schema.param(&p.name) {
            None => problems.push(format!("{}: parameter has no schema entry", p.name)),
            Some(s) if s.spec.kind() != p.kind => problems.push(format!(
                "{}: schema kind {} does not match parameter type {}",
                p.name,
                s.spec.kind(),
                p.kind
            )),
            _ => {}
        }
    }
    for s in &schema.params {
        if program.param(&s.name).is_none() {
            problems.push(format!("{}: schema entry is not a parameter", s.name));
        }
    }
    SchemaError::from_list(problems)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn corpus_schemas_validate() {
        for s in corpus::all() {
            validate_schema(&s.program, &s.schema).unwrap();
        }
    }

    #[test]
    fn missing_key_is_reported_by_name() {
        let s = corpus::linear_search();
        let mut schema = s.schema.clone();
        schema.params.retain(|p| p.name != "z");
        let err = validate_schema(&s.program, &schema).unwrap_err();
        assert!(err.mentions("z"), "{err}");
        assert_eq!(err.mismatches.len(), 1);
    }

    #[test]
    fn matrix_coupling_resolves() {
        let s = corpus::matrix_mult();
        assert_eq!(s.schema.dims(), vec!["m", "n", "q"]);
        let shape = Shape(vec![2, 3, 4]);
        assert_eq!(s.schema.resolve_dim("p", &shape), Ok(3));
        assert_eq!(s.schema.shape_cost(&shape), 24);
    }

    #[test]
    fn every_mismatch_is_listed() {
        let s = corpus::linear_search();
        let schema = InputSchema::from_json(
            r#"{"params":[{"name":"a","kind":"size"},{"name":"w","kind":"key"}]}"#,
        )
        .unwrap();
        let err = validate_schema(&s.program, &schema).unwrap_err();
        for name in ["a", "d", "z", "w"] {
            assert!(err.mentions(name), "{name} not in {err}");
        }
    }

    #[test]
    fn sizing_must_reference_dimensions() {
        let err = InputSchema::from_json(
            r#"{"params":[{"name":"a","kind":"array","len":{"param":"z"}},{"name":"z","kind":"key"}]}"#,
        )
        .unwrap_err();
        assert!(err.mentions("a"));

        let err = InputSchema::from_json(
            r#"{"params":[{"name":"p","kind":"coupled","equals":"q"},{"name":"q","kind":"coupled","equals":"p"}]}"#,
        )
        .unwrap_err();
        assert!(err.mismatches.iter().any(|m| m.contains("cycle")));
    }

    #[test]
    fn empty_matrix_is_the_empty_array() {
        assert_eq!(Value::matrix(vec![]), Value::Array(vec![]));
        assert!(Value::Array(vec![]).fits(ParamKind::IntMatrix));
        assert!(!Value::Matrix(vec![vec![1], vec![]]).fits(ParamKind::IntMatrix));
        let v: Value = serde_json::from_str("[[1,2],[3,4]]").unwrap();
        assert_eq!(v, Value::Matrix(vec![vec![1, 2], vec![3, 4]]));
        let v: Value = serde_json::from_str("[[],[]]").unwrap();
        assert_eq!(v, Value::Matrix(vec![vec![], vec![]]));
    }
}
