//! Library side of the `batsvd2` tool: test-file generation, batch runs
//! with CSV reports, and speedup tables.

pub mod report;
pub mod testfile;

use std::io;

pub use report::{compare, run, write_compare, CompareRow, ReportRow, RunArgs};
pub use testfile::{generate, record_bytes, BatchReader, Source};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    /// 1 for usage errors, 2 for everything caused by data or the system.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}
