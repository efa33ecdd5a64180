use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the simulation toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    #[error("mesh contains no valid triangles")]
    EmptyMesh,

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("degenerate hand frame: {0}")]
    DegenerateFrame(String),

    #[error("disassembly along the extraction axis is infeasible: theta = {theta} rad is at the singularity")]
    Singularity { theta: f64 },

    #[error("static balance did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("writing output failed after {} file(s): {source}", written.len())]
    PartialOutput {
        written: Vec<PathBuf>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn validation(message: impl Into<String>) -> Self {
        Error::Validation(message.into())
    }

    /// True for errors caused by the file system rather than by content.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::PartialOutput { source, .. } => source.is_io(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
