use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::dsl::{assign_labels, parse, DecisionTable, FrontendError, Program};
use crate::schema::{validate_schema, InputSchema, SchemaError};

/// A parsed, labelled program together with its input schema.
#[derive(Debug, Clone)]
pub struct Subject {
    pub source: String,
    pub program: Program,
    pub table: DecisionTable,
    pub schema: InputSchema,
}

#[derive(Debug, Error)]
pub enum SubjectError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
}

impl Subject {
    pub fn from_sources(source: &str, schema_json: &str) -> Result<Subject, SubjectError> {
        let program = parse(source)?;
        let schema = InputSchema::from_json(schema_json)?;
        Subject::new(source, program, schema)
    }

    pub fn new(
        source: &str,
        program: Program,
        schema: InputSchema,
    ) -> Result<Subject, SubjectError> {
        validate_schema(&program, &schema)?;
        let table = assign_labels(&program);
        Ok(Subject {
            source: source.to_string(),
            program,
            table,
            schema,
        })
    }

    pub fn name(&self) -> &str {
        &self.program.name
    }

    /// Sidecar schema path: `foo.tp` → `foo.schema.json`.
    pub fn sidecar_path(program_path: &Path) -> PathBuf {
        program_path.with_extension("schema.json")
    }

    /// Load a `.tp` file and its sidecar schema (or an explicit schema path).
    pub fn load(program_path: &Path, schema_path: Option<&Path>) -> Result<Subject, SubjectError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| SubjectError::Io {
                path: p.to_path_buf(),
                source,
            })
        };
        let source = read(program_path)?;
        let program = parse(&source)?;
        let sidecar = Subject::sidecar_path(program_path);
        let schema_text = read(schema_path.unwrap_or(&sidecar))?;
        let schema = InputSchema::from_json(&schema_text)?;
        Subject::new(&source, program, schema)
    }
}

/// The bundled subject programs.
pub mod corpus {
    use super::Subject;

    pub const LINEAR_SEARCH: &str = include_str!("../../../subjects/linear_search.tp");
    pub const LINEAR_SEARCH_SCHEMA: &str =
        include_str!("../../../subjects/linear_search.schema.json");
    pub const BUBBLE_SORT: &str = include_str!("../../../subjects/bubble_sort.tp");
    pub const BUBBLE_SORT_SCHEMA: &str = include_str!("../../../subjects/bubble_sort.schema.json");
    pub const MATRIX_MULT: &str = include_str!("../../../subjects/matrix_mult.tp");
    pub const MATRIX_MULT_SCHEMA: &str = include_str!("../../../subjects/matrix_mult.schema.json");
    pub const MERGE_SORTED: &str = include_str!("../../../subjects/merge_sorted.tp");
    pub const MERGE_SORTED_SCHEMA: &str =
        include_str!("../../../subjects/merge_sorted.schema.json");

    fn load(src: &str, schema: &str) -> Subject {
        Subject::from_sources(src, schema).expect("bundled subject is valid")
    }

    pub fn linear_search() -> Subject {
        load(LINEAR_SEARCH, LINEAR_SEARCH_SCHEMA)
    }

    pub fn bubble_sort() -> Subject {
        load(BUBBLE_SORT, BUBBLE_SORT_SCHEMA)
    }

    pub fn matrix_mult() -> Subject {
        load(MATRIX_MULT, MATRIX_MULT_SCHEMA)
    }

    pub fn merge_sorted() -> Subject {
        load(MERGE_SORTED, MERGE_SORTED_SCHEMA)
    }

    pub fn all() -> Vec<Subject> {
        vec![
            linear_search(),
            bubble_sort(),
            matrix_mult(),
            merge_sorted(),
        ]
    }

    /// Bundled subject for a construct id (`linear`, `bubble`, `matrix`, `merge`).
    pub fn by_construct(construct: &str) -> Option<Subject> {
        Some(match construct {
            "linear" => linear_search(),
            "bubble" => bubble_sort(),
            "matrix" => matrix_mult(),
            "merge" => merge_sorted(),
            _ => return None,
        })
    }
}
