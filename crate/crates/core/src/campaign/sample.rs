use std::collections::HashSet;

use rand::Rng;
use thiserror::Error;

use crate::schema::{Constraint, InputSchema, InputVector, ParamSpec, Shape, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("{param}: {len} distinct elements cannot be drawn from a domain of {domain}")]
    InfeasibleConstraint {
        param: String,
        len: usize,
        domain: u64,
    },
    #[error("shape {shape}: {message}")]
    BadShape { shape: Shape, message: String },
}

/// Draw one input of the given shape, elements i.i.d. uniform on `[0, domain)`.
pub fn sample_input<R: Rng>(
    schema: &InputSchema,
    shape: &Shape,
    domain: u64,
    rng: &mut R,
) -> Result<InputVector, SampleError> {
    let hi = domain.min(i64::MAX as u64) as i64;
    let bad = |message: String| SampleError::BadShape {
        shape: shape.clone(),
        message,
    };
    let mut input = InputVector::new();
    for p in &schema.params {
        let value = match &p.spec {
            ParamSpec::Size | ParamSpec::Coupled { .. } => {
                Value::Int(schema.resolve_dim(&p.name, shape).map_err(bad)? as i64)
            }
            ParamSpec::Key => Value::Int(rng.gen_range(0..hi)),
            ParamSpec::Array { len, constraint } => {
                let len = schema.extent(len, shape).map_err(bad)?;
                Value::Array(elements(&p.name, len, *constraint, domain, hi, rng)?)
            }
            ParamSpec::Matrix {
                rows,
                cols,
                constraint,
            } => {
                let rows = schema.extent(rows, shape).map_err(bad)?;
                let cols = schema.extent(cols, shape).map_err(bad)?;
                let flat = elements(&p.name, rows * cols, *constraint, domain, hi, rng)?;
                let data = if cols == 0 {
                    vec![Vec::new(); rows]
                } else {
                    flat.chunks(cols).map(<[i64]>::to_vec).collect()
                };
                Value::matrix(data)
            }
        };
        input.bindings.insert(p.name.clone(), value);
    }
    Ok(input)
}

fn elements<R: Rng>(
    name: &str,
    len: usize,
    constraint: Constraint,
    domain: u64,
    hi: i64,
    rng: &mut R,
) -> Result<Vec<i64>, SampleError> {
    match constraint {
        Constraint::None => Ok((0..len).map(|_| rng.gen_range(0..hi)).collect()),
        Constraint::SortedAscending => {
            let mut v: Vec<i64> = (0..len).map(|_| rng.gen_range(0..hi)).collect();
            v.sort_unstable();
            Ok(v)
        }
        Constraint::DistinctElements => {
            if len as u64 > domain {
                return Err(SampleError::InfeasibleConstraint {
                    param: name.to_string(),
                    len,
                    domain,
                });
            }
            let mut seen = HashSet::with_capacity(len);
            let mut v = Vec::with_capacity(len);
            while v.len() < len {
                let x = rng.gen_range(0..hi);
                if seen.insert(x) {
                    v.push(x);
                }
            }
            Ok(v)
        }
    }
}
