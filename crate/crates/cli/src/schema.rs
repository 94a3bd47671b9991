//! Column layout of input and output CSV files.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetSchema {
    pub ratio_columns: Vec<String>,
    pub industry_column: String,
    pub year_column: String,
    pub rating_column: String,
    pub delimiter: char,
}

impl Default for DatasetSchema {
    fn default() -> Self {
        DatasetSchema {
            ratio_columns: ["WC_TA", "RE_TA", "EBIT_TA", "MVE_BVTD", "S_TA"].map(String::from).to_vec(),
            industry_column: "industry".into(),
            year_column: "year".into(),
            rating_column: "rating".into(),
            delimiter: ',',
        }
    }
}

impl DatasetSchema {
    pub fn validate(&self) -> Result<()> {
        if self.ratio_columns.is_empty() {
            return Err(CliError::Schema("at least one ratio column is required".into()));
        }
        let labels = [&self.industry_column, &self.year_column, &self.rating_column];
        let mut seen = std::collections::BTreeSet::new();
        for name in self.ratio_columns.iter().chain(labels) {
            if !seen.insert(name.as_str()) {
                return Err(CliError::Schema(format!("column {name:?} is listed twice")));
            }
        }
        if !self.delimiter.is_ascii() {
            return Err(CliError::Schema(format!("delimiter {:?} is not a single byte", self.delimiter)));
        }
        Ok(())
    }

    pub fn delimiter_byte(&self) -> u8 {
        self.delimiter as u8
    }

    /// Load a schema from TOML; omitted keys keep their defaults.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let schema: DatasetSchema = toml::from_str(&text).map_err(|e| CliError::Config {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        schema.validate()?;
        Ok(schema)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        let s = DatasetSchema::default();
        s.validate().unwrap();
        assert_eq!(s.ratio_columns.len(), 5);
    }

    #[test]
    fn rejects_overlap_and_empty() {
        let mut s = DatasetSchema::default();
        s.rating_column = "S_TA".into();
        assert!(s.validate().is_err());
        let s = DatasetSchema { ratio_columns: vec![], ..Default::default() };
        assert!(s.validate().is_err());
    }

    #[test]
    fn partial_toml_keeps_defaults() {
        let s: DatasetSchema = toml::from_str("delimiter = \";\"\nrating_column = \"R\"").unwrap();
        assert_eq!(s.delimiter, ';');
        assert_eq!(s.rating_column, "R");
        assert_eq!(s.industry_column, "industry");
    }
}
