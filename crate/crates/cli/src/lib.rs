//! Algebra-file parser and command-line driver for `vertex-core`.

pub mod app;
pub mod context;
pub mod dsl;
pub mod suites;
pub mod syntax;

pub use dsl::{parse_algebra, parse_document, AlgebraDocument, DslError};

/// Failures that stop a command before any check runs (exit status 2).
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// What a command produced: text, its structured form, and whether every check passed.
pub struct Outcome {
    pub text: String,
    pub json: serde_json::Value,
    pub passed: bool,
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
