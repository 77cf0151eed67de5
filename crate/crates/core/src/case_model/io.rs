//! Case-file reading and writing.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde_json::error::Category;

use super::CaseData;

/// Names of the cases bundled with the library.
pub const SHIPPED_CASES: &[&str] = &[
    "case14_ac",
    "case14_2t",
    "case14_3t",
    "case118_ac",
    "case118_2t",
    "case118_3t",
];

#[derive(Debug, thiserror::Error)]
pub enum CaseError {
    #[error("file not found: {}", path.display())]
    NotFound { path: PathBuf },
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("unknown shipped case '{0}'")]
    UnknownCase(String),
}

/// Reads and parses a case file.
pub fn load_case(path: impl AsRef<Path>) -> Result<CaseData, CaseError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| {
        if source.kind() == std::io::ErrorKind::NotFound {
            CaseError::NotFound { path: path.to_path_buf() }
        } else {
            CaseError::Io { path: path.to_path_buf(), source }
        }
    })?;
    parse_case(&text)
}

/// Parses case-file text; missing fields and dangling references are schema errors.
pub fn parse_case(text: &str) -> Result<CaseData, CaseError> {
    let case: CaseData = serde_json::from_str(text).map_err(|e| match e.classify() {
        Category::Data => CaseError::Schema(format!("{e}")),
        _ => CaseError::Parse { line: e.line(), column: e.column(), message: e.to_string() },
    })?;
    check_references(&case)?;
    Ok(case)
}

pub fn to_json(case: &CaseData) -> String {
    serde_json::to_string_pretty(case).expect("case data always serializes")
}

/// Returns one of the bundled cases by name (see [`SHIPPED_CASES`]).
pub fn shipped_case(name: &str) -> Result<CaseData, CaseError> {
    let name = name.strip_suffix(".json").unwrap_or(name);
    let text = match name {
        "case14_ac" => include_str!("../../cases/case14_ac.json"),
        "case14_2t" => include_str!("../../cases/case14_2t.json"),
        "case14_3t" => include_str!("../../cases/case14_3t.json"),
        "case118_ac" => include_str!("../../cases/case118_ac.json"),
        "case118_2t" => include_str!("../../cases/case118_2t.json"),
        "case118_3t" => include_str!("../../cases/case118_3t.json"),
        other => return Err(CaseError::UnknownCase(other.to_string())),
    };
    parse_case(text)
}

fn check_references(case: &CaseData) -> Result<(), CaseError> {
    let mut ac = HashSet::new();
    for b in &case.buses {
        if !ac.insert(b.id) {
            return Err(CaseError::Schema(format!("duplicate AC bus id {}", b.id)));
        }
    }
    let mut dc = HashSet::new();
    for b in &case.dc_buses {
        if !dc.insert(b.id) {
            return Err(CaseError::Schema(format!("duplicate DC bus id {}", b.id)));
        }
    }
    let ac_ref = |what: String, id: u32| {
        if ac.contains(&id) {
            Ok(())
        } else {
            Err(CaseError::Schema(format!("{what} references unknown AC bus {id}")))
        }
    };
    for (i, br) in case.branches.iter().enumerate() {
        ac_ref(format!("branch {}", i + 1), br.from)?;
        ac_ref(format!("branch {}", i + 1), br.to)?;
    }
    for (i, g) in case.generators.iter().enumerate() {
        ac_ref(format!("generator {}", i + 1), g.bus)?;
    }
    for (i, s) in case.shunts.iter().enumerate() {
        ac_ref(format!("shunt {}", i + 1), s.bus)?;
    }
    for (i, c) in case.converters.iter().enumerate() {
        ac_ref(format!("converter {}", i + 1), c.ac_bus)?;
    }
    let dc_ref = |what: String, id: u32| {
        if dc.contains(&id) {
            Ok(())
        } else {
            Err(CaseError::Schema(format!("{what} references unknown DC bus {id}")))
        }
    };
    for (i, br) in case.dc_branches.iter().enumerate() {
        dc_ref(format!("DC branch {}", i + 1), br.from)?;
        dc_ref(format!("DC branch {}", i + 1), br.to)?;
    }
    for (i, c) in case.converters.iter().enumerate() {
        dc_ref(format!("converter {}", i + 1), c.dc_bus)?;
    }
    Ok(())
}
