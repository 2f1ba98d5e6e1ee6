//! Subject-language frontend: parsing, checking, and decision labelling.

mod ast;
mod error;
mod labels;
mod lexer;
mod parser;
mod pretty;

pub use ast::*;
pub use error::{FrontendError, ParseError, SemanticError};
pub use labels::{
    assign_labels, compare_labels, index_for_label, label_for, Decision, DecisionKind,
    DecisionTable,
};
pub use parser::{parse, parse_expr};
pub use pretty::{expr as pretty_expr, pretty};
