//! Named fixture diagrams.
//!
//! The built-in copies are compiled in. When `MDL_CATALOG_DIR` is set, a file
//! `<name>.dg` in that directory takes precedence.

use std::path::PathBuf;

use thiserror::Error;

use crate::diagram::{parse_diagram, Diagram, ParseError};

pub const CATALOG_DIR_VAR: &str = "MDL_CATALOG_DIR";

const BUILTIN: [(&str, &str); 6] = [
    ("D_sym", include_str!("../catalog/D_sym.dg")),
    ("D_refsucc", include_str!("../catalog/D_refsucc.dg")),
    ("D_refl_root", include_str!("../catalog/D_refl_root.dg")),
    ("D_tri", include_str!("../catalog/D_tri.dg")),
    ("D_chain", include_str!("../catalog/D_chain.dg")),
    ("D_fig3", include_str!("../catalog/D_fig3.dg")),
];

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog diagram `{0}`; known: {known}", known = names().join(", "))]
    Unknown(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("catalog entry `{name}`: {source}")]
    Parse {
        name: String,
        #[source]
        source: ParseError,
    },
}

/// Built-in names in catalog order.
pub fn names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

/// Source text for `name`, honouring the directory override.
pub fn source(name: &str) -> Result<String, CatalogError> {
    if let Some(dir) = std::env::var_os(CATALOG_DIR_VAR) {
        let path = PathBuf::from(dir).join(format!("{name}.dg"));
        if path.is_file() {
            return std::fs::read_to_string(&path).map_err(|source| CatalogError::Io { path, source });
        }
    }
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| CatalogError::Unknown(name.to_string()))
}

pub fn load(name: &str) -> Result<Diagram, CatalogError> {
    let text = source(name)?;
    parse_diagram(&text)
        .map(|p| p.value)
        .map_err(|source| CatalogError::Parse { name: name.to_string(), source })
}

/// Every built-in diagram, in catalog order.
pub fn all() -> Vec<(&'static str, Diagram)> {
    names()
        .into_iter()
        .map(|n| (n, load(n).expect("built-in fixtures parse")))
        .collect()
}
