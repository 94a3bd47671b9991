//! Threshold tables from TOML:
//!
//! ```toml
//! [[table]]
//! name = "wide_bbb"
//! upper = [-2.0, -1.5, -1.0, 0.25, 1.5, 2.0]
//! ```
//!
//! `upper` lists the inclusive upper H bounds of CCC, B, BB, BBB, A and AA.

use std::fs;
use std::path::Path;

use serde::Deserialize;
use zm_core::pearson3::ThresholdTable;

use crate::error::{CliError, Result};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    name: String,
    upper: [f64; 6],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThresholdFile {
    table: Vec<Entry>,
}

pub fn parse_tables(text: &str, path: &Path) -> Result<Vec<ThresholdTable>> {
    let config = |message: String| CliError::Config { path: path.to_path_buf(), message };
    let file: ThresholdFile = toml::from_str(text).map_err(|e| config(e.to_string()))?;
    if file.table.is_empty() {
        return Err(config("no [[table]] entries".into()));
    }
    file.table
        .into_iter()
        .map(|e| ThresholdTable::new(e.name, e.upper).map_err(|err| config(err.to_string())))
        .collect()
}

pub fn load_tables(path: &Path) -> Result<Vec<ThresholdTable>> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_tables(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_tables_in_order() {
        let text = "[[table]]\nname = \"a\"\nupper = [-2, -1.5, -1, 0, 1.5, 2]\n\n\
                    [[table]]\nname = \"b\"\nupper = [-2, -1.5, -1, 0.5, 1.5, 2]\n";
        let t = parse_tables(text, Path::new("t.toml")).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t[0].upper(), ThresholdTable::default().upper());
        assert_eq!(t[1].name(), "b");
    }

    #[test]
    fn rejects_unordered_and_empty() {
        let text = "[[table]]\nname = \"bad\"\nupper = [-2, -1.5, 1, 0, 1.5, 2]\n";
        assert!(parse_tables(text, Path::new("t")).is_err());
        assert!(parse_tables("table = []", Path::new("t")).is_err());
        assert!(parse_tables("[[table]]\nname = \"short\"\nupper = [1, 2]\n", Path::new("t")).is_err());
    }
}
