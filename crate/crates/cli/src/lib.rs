//! Document loading, task dispatch and report rendering for the
//! `algebroidkit` command.

pub mod report;
pub mod schema;
pub mod tasks;

pub use report::Report;
pub use schema::{load_str, to_document, to_json, Document, Loaded, SCHEMA};
pub use tasks::{digest, run_task, Options, Task};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
    #[error(transparent)]
    Domain(#[from] algebroidkit::Error),
}

/// 0 for a valid report, 1 for an invalid one (it carries a witness), 2 for
/// any error before a report exists.
pub fn exit_code(outcome: &Result<Report, CliError>) -> i32 {
    match outcome {
        Ok(r) if r.is_valid() => 0,
        Ok(_) => 1,
        Err(_) => 2,
    }
}
