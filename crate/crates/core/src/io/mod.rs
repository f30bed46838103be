//! File formats: scenario files, trajectory CSV and PGM snapshots.

mod pgm;
mod scenario_file;
mod shape_syntax;
mod trajectory_csv;

pub use pgm::{decode_pgm, encode_pgm, snapshot_sidecar, Pgm};
pub use scenario_file::{apply_overrides, DEFAULTS as SCENARIO_DEFAULTS, emit_scenario, parse_scenario, parse_scenario_with_overrides};
pub use shape_syntax::{format_shape, parse_shape};
pub use trajectory_csv::{emit_trajectory_csv, read_trajectory_csv, CsvRecord, CSV_HEADER};

/// Malformed input, located by line when the format has lines.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: Option<usize>,
    pub message: String,
}

impl ParseError {
    pub fn new(message: impl Into<String>) -> Self {
        ParseError {
            line: None,
            message: message.into(),
        }
    }

    pub fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ParseError {}
