//! Subcommand bodies. Human-readable summaries go to `out`; artifacts go to
//! the paths given.

use std::io::Write;
use std::path::Path;

use zm_core::evaluate::{
    compare_scores_table, confusion, holdout_evaluation, standard_sweep_variants, threshold_sweep, HoldoutConfig,
};
use zm_core::pearson3::ThresholdTable;
use zm_core::pipeline::{run_pipeline, score_new, ScoredRecord};
use zm_core::synth::{generate, SyntheticConfig};
use zm_core::toy::{self, CheckValue};

use crate::artifact::ModelArtifact;
use crate::csvio::{dataset_csv, emit_scored, ingest, write_atomic};
use crate::error::{CliError, Result};
use crate::report::{emit_report, industry_sections, NamedDescriptives, Report};
use crate::schema::DatasetSchema;
use crate::thresholds::load_tables;

pub fn load_schema(path: Option<&Path>) -> Result<DatasetSchema> {
    match path {
        Some(p) => DatasetSchema::load(p),
        None => Ok(DatasetSchema::default()),
    }
}

/// First table of the file, or the default table.
pub fn load_thresholds(path: Option<&Path>) -> Result<ThresholdTable> {
    match path {
        Some(p) => Ok(load_tables(p)?.remove(0)),
        None => Ok(ThresholdTable::default()),
    }
}

fn stdout_err(e: std::io::Error) -> CliError {
    CliError::io("<stdout>", e)
}

fn in_sample_matrix(records: &[ScoredRecord]) -> Result<Option<zm_core::evaluate::ClassificationMatrix>> {
    let actual: Option<Vec<u8>> = records.iter().map(|r| r.actual_bankruptcy()).collect();
    match actual {
        Some(a) if !a.is_empty() => {
            let predicted: Vec<u8> = records.iter().map(|r| r.predicted_bankruptcy()).collect();
            Ok(Some(confusion(&a, &predicted)?))
        }
        _ => Ok(None),
    }
}

fn descriptive_sections(records: &[ScoredRecord]) -> Result<Vec<NamedDescriptives>> {
    Ok(compare_scores_table(records)?
        .into_iter()
        .map(|(k, stats)| NamedDescriptives { score: k.label().into(), stats })
        .collect())
}

pub struct FitArgs<'a> {
    pub input: &'a Path,
    pub model: &'a Path,
    pub output: Option<&'a Path>,
    pub report: Option<&'a Path>,
    pub schema: Option<&'a Path>,
    pub thresholds: Option<&'a Path>,
}

pub fn fit(args: FitArgs<'_>, out: &mut dyn Write) -> Result<()> {
    let schema = load_schema(args.schema)?;
    let table = load_thresholds(args.thresholds)?;
    let data = ingest(args.input, &schema)?;
    let run = run_pipeline(&data, None, &table)?;
    let artifact = ModelArtifact { model: run.model.clone(), fits: run.fits.clone() };
    artifact.save(args.model)?;
    if let Some(path) = args.output {
        emit_scored(&run.records, &schema, path)?;
    }
    let matrix = in_sample_matrix(&run.records)?;
    if let Some(path) = args.report {
        let report = Report {
            mode: "fit".into(),
            records: data.len(),
            thresholds: Some((&table).into()),
            model: Some((&run.model).into()),
            industries: industry_sections(&run.fits),
            classification: matrix.as_ref().map(Into::into),
            descriptives: descriptive_sections(&run.records)?,
            ..Default::default()
        };
        emit_report(&report, path)?;
    }
    writeln!(out, "fitted {} records, {} industries", data.len(), run.fits.len()).map_err(stdout_err)?;
    writeln!(out, "weights {:?}", run.model.weights).map_err(stdout_err)?;
    if let Some(m) = matrix {
        writeln!(out, "in-sample accuracy {:.4}", m.accuracy()).map_err(stdout_err)?;
    }
    Ok(())
}

pub struct ScoreArgs<'a> {
    pub input: &'a Path,
    pub model: &'a Path,
    pub output: &'a Path,
    pub report: Option<&'a Path>,
    pub schema: Option<&'a Path>,
    pub thresholds: Option<&'a Path>,
}

pub fn score(args: ScoreArgs<'_>, out: &mut dyn Write) -> Result<()> {
    let schema = load_schema(args.schema)?;
    let table = load_thresholds(args.thresholds)?;
    let artifact = ModelArtifact::load(args.model)?;
    let data = ingest(args.input, &schema)?;
    // a weights-only artifact gets its industry fits from the input itself
    let (scored, fits) = if artifact.fits.is_empty() {
        let run = run_pipeline(&data, Some(&artifact.model), &table)?;
        (run.records, run.fits)
    } else {
        (score_new(&data, &artifact.model, &artifact.fits, &table)?, artifact.fits.clone())
    };
    emit_scored(&scored, &schema, args.output)?;
    let matrix = in_sample_matrix(&scored)?;
    if let Some(path) = args.report {
        let report = Report {
            mode: "score".into(),
            records: data.len(),
            thresholds: Some((&table).into()),
            model: Some((&artifact.model).into()),
            industries: industry_sections(&fits),
            classification: matrix.as_ref().map(Into::into),
            descriptives: descriptive_sections(&scored)?,
            ..Default::default()
        };
        emit_report(&report, path)?;
    }
    writeln!(out, "scored {} records", scored.len()).map_err(stdout_err)?;
    Ok(())
}

pub struct EvaluateArgs<'a> {
    pub input: &'a Path,
    pub seed: u64,
    pub output: Option<&'a Path>,
    pub report: Option<&'a Path>,
    pub schema: Option<&'a Path>,
    pub thresholds: Option<&'a Path>,
}

pub fn evaluate(args: EvaluateArgs<'_>, out: &mut dyn Write) -> Result<()> {
    let schema = load_schema(args.schema)?;
    let table = load_thresholds(args.thresholds)?;
    let data = ingest(args.input, &schema)?;
    let config = HoldoutConfig { seed: args.seed, thresholds: table.clone(), ..Default::default() };
    let eval = holdout_evaluation(&data, &config)?;
    if let Some(path) = args.output {
        emit_scored(&eval.test, &schema, path)?;
    }
    let report = Report::from_holdout(&eval, args.seed, &table);
    if let Some(path) = args.report {
        emit_report(&report, path)?;
    }
    let m = &eval.matrix;
    writeln!(out, "train {} / test {}", eval.train_size, eval.test.len()).map_err(stdout_err)?;
    writeln!(
        out,
        "hold-out accuracy {:.4}, type I {:.4}, type II {:.4}",
        m.accuracy(),
        m.type_i().unwrap_or(f64::NAN),
        m.type_ii().unwrap_or(f64::NAN)
    )
    .map_err(stdout_err)?;
    for l in &report.logistic {
        writeln!(out, "logistic {}: slope {:.4}, Wald {:.2}", l.score, l.fit.slope, l.fit.wald_slope).map_err(stdout_err)?;
    }
    Ok(())
}

pub struct SweepArgs<'a> {
    pub input: &'a Path,
    pub model: Option<&'a Path>,
    pub report: Option<&'a Path>,
    pub schema: Option<&'a Path>,
    pub thresholds: Option<&'a Path>,
}

/// Grade once, then re-grade under every table in the thresholds file (or
/// the standard BBB-band variants).
pub fn sweep(args: SweepArgs<'_>, out: &mut dyn Write) -> Result<()> {
    let schema = load_schema(args.schema)?;
    let variants = match args.thresholds {
        Some(p) => load_tables(p)?,
        None => standard_sweep_variants(),
    };
    let data = ingest(args.input, &schema)?;
    let (scored, model, fits) = match args.model {
        Some(p) => {
            let art = ModelArtifact::load(p)?;
            let scored = score_new(&data, &art.model, &art.fits, &variants[0])?;
            (scored, art.model, art.fits)
        }
        None => {
            let run = run_pipeline(&data, None, &variants[0])?;
            (run.records, run.model, run.fits)
        }
    };
    let result = threshold_sweep(&scored, &variants)?;
    if let Some(path) = args.report {
        let report = Report {
            mode: "sweep".into(),
            records: data.len(),
            model: Some((&model).into()),
            industries: industry_sections(&fits),
            sweep: Some((&result).into()),
            ..Default::default()
        };
        emit_report(&report, path)?;
    }
    for e in &result.entries {
        writeln!(
            out,
            "{:<12} type I {:.4}  type II {:.4}",
            e.name,
            e.matrix.type_i().unwrap_or(f64::NAN),
            e.matrix.type_ii().unwrap_or(f64::NAN)
        )
        .map_err(stdout_err)?;
    }
    writeln!(out, "best {}", result.entries[result.best].name).map_err(stdout_err)?;
    Ok(())
}

/// Worked-example regression check. Prints one line per quantity and fails
/// naming the first mismatch.
pub fn toy_mode(model: Option<&Path>, thresholds: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let weights = match model {
        Some(p) => ModelArtifact::load(p)?.model.weights,
        None => toy::PUBLISHED_WEIGHTS.to_vec(),
    };
    let table = load_thresholds(thresholds)?;
    let checks = toy::golden_checks(&weights, &table)?;
    writeln!(out, "{:<10} {:>12} {:>12} {:>8}  status", "quantity", "expected", "actual", "tol").map_err(stdout_err)?;
    for c in &checks {
        let status = if c.passed() { "PASS" } else { "FAIL" };
        let line = match &c.value {
            CheckValue::Approx { expected, actual, tolerance } => {
                format!("{:<10} {expected:>12.4} {actual:>12.6} {tolerance:>8.0e}  {status}", c.quantity)
            }
            CheckValue::Exact { expected, actual } => {
                format!("{:<10} {expected:>12} {actual:>12} {:>8}  {status}", c.quantity, "exact")
            }
        };
        writeln!(out, "{line}").map_err(stdout_err)?;
    }
    let failed = checks.iter().filter(|c| !c.passed()).count();
    writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len()).map_err(stdout_err)?;
    match checks.iter().find(|c| !c.passed()) {
        Some(c) => Err(CliError::ToyMismatch(c.quantity.clone())),
        None => Ok(()),
    }
}

pub fn synth(output: &Path, config: &SyntheticConfig, schema: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let schema = load_schema(schema)?;
    if schema.ratio_columns.len() != 5 {
        return Err(CliError::Schema("synthetic data has exactly five ratio columns".into()));
    }
    let data = generate(config);
    write_atomic(output, &dataset_csv(&data, &schema)?)?;
    writeln!(out, "wrote {} records to {}", data.len(), output.display()).map_err(stdout_err)?;
    Ok(())
}
