//! Random test data generation for path coverage of loop-heavy programs.
//!
//! Subject programs are written in a small C-like language whose decisions
//! are labelled automatically. Random inputs are executed, the resulting
//! branch traces are deduplicated into unique feasible paths, and the
//! campaign detects the longest-path level `k_L` and the saturation level
//! `k_S`. An exhaustive oracle and closed-form predictions check the
//! measurements.

pub mod campaign;
pub mod dsl;
pub mod interp;
pub mod oracle;
pub mod rng;
pub mod schema;
mod subject;
pub mod suite;
pub mod trace;

pub use subject::{corpus, Subject, SubjectError};
