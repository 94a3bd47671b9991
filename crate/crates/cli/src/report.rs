//! Structured JSON run report.

use std::path::Path;

use serde::{Deserialize, Serialize};
use zm_core::discriminant::DiscriminantModel;
use zm_core::evaluate::{ClassificationMatrix, Descriptives, FTest, HoldoutEvaluation, LogisticFit, SweepResult};
use zm_core::pearson3::{Skew, ThresholdTable};
use zm_core::pipeline::IndustryFits;

use crate::csvio::write_atomic;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub weights: Vec<f64>,
    pub normalization: String,
}

impl From<&DiscriminantModel> for ModelSection {
    fn from(m: &DiscriminantModel) -> Self {
        ModelSection { weights: m.weights.clone(), normalization: m.normalization.as_str().to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndustrySection {
    pub industry: u32,
    pub n: usize,
    pub location: f64,
    pub scale: f64,
    pub shape: f64,
    pub skew: Skew,
    pub l_moments: [f64; 3],
    pub tau3: f64,
}

pub fn industry_sections(fits: &IndustryFits) -> Vec<IndustrySection> {
    fits.values()
        .map(|f| IndustrySection {
            industry: f.industry,
            n: f.l_moments.n,
            location: f.params.location,
            scale: f.params.scale,
            shape: f.params.shape,
            skew: f.params.skew,
            l_moments: f.l_moments.theta,
            tau3: f.l_moments.tau3,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSection {
    pub n1: usize,
    pub m1: usize,
    pub m2: usize,
    pub n2: usize,
    pub accuracy: f64,
    pub type_i: Option<f64>,
    pub type_ii: Option<f64>,
}

impl From<&ClassificationMatrix> for MatrixSection {
    fn from(m: &ClassificationMatrix) -> Self {
        MatrixSection {
            n1: m.n1,
            m1: m.m1,
            m2: m.m2,
            n2: m.n2,
            accuracy: m.accuracy(),
            type_i: m.type_i(),
            type_ii: m.type_ii(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedLogistic {
    pub score: String,
    #[serde(flatten)]
    pub fit: LogisticFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedDescriptives {
    pub score: String,
    #[serde(flatten)]
    pub stats: Descriptives,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedFTest {
    pub first: String,
    pub second: String,
    #[serde(flatten)]
    pub test: FTest,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepVariant {
    pub name: String,
    pub upper: [f64; 6],
    pub matrix: MatrixSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSection {
    pub variants: Vec<SweepVariant>,
    pub best: String,
}

impl From<&SweepResult> for SweepSection {
    fn from(s: &SweepResult) -> Self {
        SweepSection {
            variants: s
                .entries
                .iter()
                .map(|e| SweepVariant { name: e.name.clone(), upper: e.upper, matrix: (&e.matrix).into() })
                .collect(),
            best: s.entries[s.best].name.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSection {
    pub name: String,
    pub upper: [f64; 6],
}

impl From<&ThresholdTable> for ThresholdSection {
    fn from(t: &ThresholdTable) -> Self {
        ThresholdSection { name: t.name().to_string(), upper: t.upper() }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Report {
    pub mode: String,
    pub records: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<ThresholdSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub industries: Vec<IndustrySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<MatrixSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub logistic: Vec<NamedLogistic>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub descriptives: Vec<NamedDescriptives>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub f_tests: Vec<NamedFTest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spearman_zm_za: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

impl Report {
    pub fn from_holdout(eval: &HoldoutEvaluation, seed: u64, thresholds: &ThresholdTable) -> Self {
        Report {
            mode: "evaluate".into(),
            records: eval.train_size + eval.test.len(),
            seed: Some(seed),
            thresholds: Some(thresholds.into()),
            model: Some((&eval.model).into()),
            industries: industry_sections(&eval.fits),
            classification: Some((&eval.matrix).into()),
            logistic: eval
                .logistic
                .iter()
                .map(|(k, f)| NamedLogistic { score: k.label().into(), fit: *f })
                .collect(),
            descriptives: eval
                .descriptives
                .iter()
                .map(|(k, d)| NamedDescriptives { score: k.label().into(), stats: *d })
                .collect(),
            f_tests: eval
                .f_tests
                .iter()
                .map(|t| NamedFTest { first: t.first.label().into(), second: t.second.label().into(), test: t.f_test })
                .collect(),
            spearman_zm_za: Some(eval.spearman_zm_za),
            sweep: Some((&eval.sweep).into()),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| CliError::Schema(format!("report serialization: {e}")))
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }
}

pub fn emit_report(report: &Report, path: &Path) -> Result<()> {
    let mut text = report.to_json()?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
