//! CSV ingestion and scored-output emission.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use tempfile::NamedTempFile;
use zm_core::pipeline::ScoredRecord;
use zm_core::transform::{RatingGrade, RatioRecord};

use crate::error::{CliError, Result};
use crate::schema::DatasetSchema;

/// Columns appended to the input columns in scored output.
pub const SCORE_COLUMNS: [&str; 5] = ["z_m", "v", "h", "grade", "b_predicted"];

/// Read a dataset. Row numbers in errors count data rows from 1.
pub fn ingest(path: &Path, schema: &DatasetSchema) -> Result<Vec<RatioRecord>> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    ingest_reader(file, schema).map_err(|e| match e {
        CliError::Csv { source, .. } => CliError::Csv { path: path.to_path_buf(), source },
        other => other,
    })
}

pub fn ingest_reader<R: Read>(reader: R, schema: &DatasetSchema) -> Result<Vec<RatioRecord>> {
    schema.validate()?;
    let csv_err = |source| CliError::Csv { path: "<input>".into(), source };
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter_byte())
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| CliError::Schema(format!("missing column {name:?}")))
    };
    let ratio_idx = schema.ratio_columns.iter().map(|c| find(c)).collect::<Result<Vec<_>>>()?;
    let industry_idx = find(&schema.industry_column)?;
    let year_idx = find(&schema.year_column)?;
    let rating_idx = find(&schema.rating_column)?;

    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(csv_err)?;
        let cell = |idx: usize| rec.get(idx).unwrap_or("").trim();
        let parse_err = |column: &str, value: &str| CliError::Parse {
            row,
            column: column.to_string(),
            value: value.to_string(),
        };
        let mut ratios = Vec::with_capacity(ratio_idx.len());
        for (&idx, name) in ratio_idx.iter().zip(&schema.ratio_columns) {
            let raw = cell(idx);
            match raw.parse::<f64>() {
                Ok(x) if x.is_finite() => ratios.push(x),
                _ => return Err(parse_err(name, raw)),
            }
        }
        let industry = cell(industry_idx)
            .parse::<u32>()
            .map_err(|_| parse_err(&schema.industry_column, cell(industry_idx)))?;
        let year = cell(year_idx)
            .parse::<i32>()
            .map_err(|_| parse_err(&schema.year_column, cell(year_idx)))?;
        let raw_grade = cell(rating_idx);
        let grade = if raw_grade.is_empty() {
            None
        } else {
            Some(raw_grade.parse::<RatingGrade>().map_err(|_| CliError::Grade {
                row,
                column: schema.rating_column.clone(),
                value: raw_grade.to_string(),
            })?)
        };
        out.push(RatioRecord::new(ratios, industry, year, grade));
    }
    Ok(out)
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn scored_csv(records: &[ScoredRecord], schema: &DatasetSchema) -> Result<Vec<u8>> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(schema.delimiter_byte())
        .from_writer(Vec::new());
    let csv_err = |source| CliError::Csv { path: "<output>".into(), source };
    let mut header: Vec<&str> = schema.ratio_columns.iter().map(String::as_str).collect();
    header.extend([
        schema.industry_column.as_str(),
        schema.year_column.as_str(),
        schema.rating_column.as_str(),
    ]);
    header.extend(SCORE_COLUMNS);
    wtr.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row: Vec<String> = r.input.ratios.iter().map(|x| format!("{x:.6}")).collect();
        row.push(r.input.industry.to_string());
        row.push(r.input.year.to_string());
        row.push(r.input.grade.map(|g| g.to_string()).unwrap_or_default());
        row.push(format!("{:.6}", r.z_m));
        row.push(format!("{:.6}", r.v));
        row.push(format!("{:.6}", r.h));
        row.push(r.grade.to_string());
        row.push(r.predicted_bankruptcy().to_string());
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.into_inner().map_err(|e| CliError::io("<output>", e.into_error()))
}

pub fn emit_scored(records: &[ScoredRecord], schema: &DatasetSchema, path: &Path) -> Result<()> {
    if records.is_empty() {
        return Err(zm_core::Error::Empty("scored records").into());
    }
    write_atomic(path, &scored_csv(records, schema)?)
}

/// Serialize raw records with the schema's input columns.
pub fn dataset_csv(records: &[RatioRecord], schema: &DatasetSchema) -> Result<Vec<u8>> {
    let mut wtr = csv::WriterBuilder::new()
        .delimiter(schema.delimiter_byte())
        .from_writer(Vec::new());
    let csv_err = |source| CliError::Csv { path: "<output>".into(), source };
    let mut header: Vec<&str> = schema.ratio_columns.iter().map(String::as_str).collect();
    header.extend([
        schema.industry_column.as_str(),
        schema.year_column.as_str(),
        schema.rating_column.as_str(),
    ]);
    wtr.write_record(&header).map_err(csv_err)?;
    for r in records {
        let mut row: Vec<String> = r.ratios.iter().map(|x| format!("{x:.6}")).collect();
        row.push(r.industry.to_string());
        row.push(r.year.to_string());
        row.push(r.grade.map(|g| g.to_string()).unwrap_or_default());
        wtr.write_record(&row).map_err(csv_err)?;
    }
    wtr.into_inner().map_err(|e| CliError::io("<output>", e.into_error()))
}
