//! Command implementations behind the `fracid` binary.
//!
//! Every command validates its inputs, computes all artifacts in memory as
//! an [`Output`], and only then writes them. Each file goes through a
//! temporary file in the output directory followed by a rename, so a failed
//! run never leaves half-written files.

pub mod checks;
pub mod commands;
pub mod config;
pub mod svg;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Failure of a command, split by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, files or fixtures (exit code 1).
    Validation(String),
    /// A numerical procedure failed (exit code 2).
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<fracid_core::Error> for CliError {
    fn from(e: fracid_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Files produced by a command (paths relative to the output directory)
/// plus a short message for the terminal.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Output {
    pub files: Vec<(String, String)>,
    pub message: String,
}

impl Output {
    pub fn add(&mut self, name: impl Into<String>, content: impl Into<String>) {
        self.files.push((name.into(), content.into()));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
    }

    /// Writes every file atomically under `dir`, creating directories as
    /// needed, and returns the written paths.
    pub fn write_to(&self, dir: &Path) -> CliResult<Vec<PathBuf>> {
        let mut written = Vec::with_capacity(self.files.len());
        for (name, content) in &self.files {
            let path = dir.join(name);
            let parent = path.parent().unwrap_or(dir);
            std::fs::create_dir_all(parent)?;
            let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
            tmp.write_all(content.as_bytes())?;
            tmp.flush()?;
            tmp.persist(&path)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            written.push(path);
        }
        Ok(written)
    }
}
