//! OpenQASM 2.0 input, combined-program output and result unbundling.

mod emit;
mod parse;
mod results;

use thiserror::Error;

use crate::model::ModelError;

pub use emit::{emit_combined, CombinedProgram, RegisterSlot};
pub use parse::{parse_circuit, parse_program, MAX_REGISTER_SIZE};
pub use results::{pst, unbundle, Counts};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QasmError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: unsupported gate `{name}`: {reason}")]
    UnsupportedGate {
        name: String,
        line: usize,
        reason: String,
    },
    #[error("line {line}: unsupported structure: {message}")]
    UnsupportedStructure { line: usize, message: String },
    #[error("malformed circuit: {0}")]
    Model(#[from] ModelError),
    #[error("inconsistent batch: {0}")]
    Consistency(String),
    #[error("malformed results: {0}")]
    MalformedResults(String),
}

impl QasmError {
    /// Source line, when the error points into a program.
    pub fn line(&self) -> Option<usize> {
        match self {
            QasmError::Syntax { line, .. }
            | QasmError::UnsupportedGate { line, .. }
            | QasmError::UnsupportedStructure { line, .. } => Some(*line),
            _ => None,
        }
    }
}
