//! End-to-end rating run: transform, weight, fit per industry, index, grade.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::discriminant::{fit_mda, DiscriminantModel};
use crate::error::{Error, Result};
use crate::lmom::{l_moments, LMomentSet};
use crate::pearson3::{credit_index, fit_p3, P3Params, ThresholdTable};
use crate::transform::{transform_record, RatingGrade, RatioRecord, TransformedRecord};

/// Fewest records an industry may contribute to a distribution fit.
pub const MIN_INDUSTRY_RECORDS: usize = 3;

/// Distribution fitted to one industry's scores.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndustryFit {
    pub industry: u32,
    pub params: P3Params,
    pub l_moments: LMomentSet,
}

pub type IndustryFits = BTreeMap<u32, IndustryFit>;

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredRecord {
    pub input: RatioRecord,
    pub transformed: TransformedRecord,
    pub z_m: f64,
    /// Parameters of this record's industry fit.
    pub industry_fit: P3Params,
    /// Standardized distance from the support bound.
    pub v: f64,
    pub h: f64,
    /// Model-assigned grade.
    pub grade: RatingGrade,
}

impl ScoredRecord {
    /// Bankruptcy index implied by the model grade.
    pub fn predicted_bankruptcy(&self) -> u8 {
        self.grade.bankruptcy_index()
    }

    /// Bankruptcy index implied by the agency grade, when present.
    pub fn actual_bankruptcy(&self) -> Option<u8> {
        self.input.bankruptcy()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    /// One entry per input record, in input order.
    pub records: Vec<ScoredRecord>,
    pub model: DiscriminantModel,
    pub fits: IndustryFits,
}

fn transform_all(dataset: &[RatioRecord]) -> Result<Vec<TransformedRecord>> {
    let t = dataset.first().map_or(0, |r| r.ratios.len());
    dataset
        .iter()
        .enumerate()
        .map(|(row, r)| {
            if r.ratios.len() != t {
                return Err(Error::DimensionMismatch {
                    expected: t,
                    got: r.ratios.len(),
                });
            }
            transform_record(r, row)
        })
        .collect()
}

/// Fit one distribution per industry from the scores of its records.
pub fn fit_industries(industries: &[u32], scores: &[f64]) -> Result<IndustryFits> {
    let mut groups: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for (&industry, &z) in industries.iter().zip(scores) {
        groups.entry(industry).or_default().push(z);
    }
    groups
        .into_iter()
        .map(|(industry, zs)| {
            if zs.len() < MIN_INDUSTRY_RECORDS {
                return Err(Error::TooFewRecords {
                    industry,
                    n: zs.len(),
                });
            }
            let wrap = |e: Error| Error::IndustryFit {
                industry,
                source: Box::new(e),
            };
            let l_moments = l_moments(&zs).map_err(wrap)?;
            let params = fit_p3(&l_moments).map_err(wrap)?;
            Ok((
                industry,
                IndustryFit {
                    industry,
                    params,
                    l_moments,
                },
            ))
        })
        .collect()
}

fn grade_all(
    records: &[RatioRecord],
    transformed: Vec<TransformedRecord>,
    scores: Vec<f64>,
    fits: &IndustryFits,
    thresholds: &ThresholdTable,
) -> Result<Vec<ScoredRecord>> {
    records
        .iter()
        .zip(transformed)
        .zip(scores)
        .map(|((input, transformed), z_m)| {
            let fit = fits
                .get(&input.industry)
                .ok_or(Error::UnknownIndustry(input.industry))?;
            let params = fit.params;
            let h = credit_index(&params, z_m);
            Ok(ScoredRecord {
                input: input.clone(),
                transformed,
                z_m,
                industry_fit: params,
                v: params.standardized(z_m),
                h,
                grade: thresholds.grade(h),
            })
        })
        .collect()
}

fn score_transformed(model: &DiscriminantModel, transformed: &[TransformedRecord]) -> Result<Vec<f64>> {
    transformed.iter().map(|r| model.score(&r.values)).collect()
}

/// Rate a dataset in-sample.
///
/// With `weights = None` the discriminant is fitted on the dataset itself,
/// which then must be fully graded. One distribution is fitted per industry
/// over all of that industry's years.
pub fn run_pipeline(
    dataset: &[RatioRecord],
    weights: Option<&DiscriminantModel>,
    thresholds: &ThresholdTable,
) -> Result<PipelineOutput> {
    if dataset.is_empty() {
        return Err(Error::Empty("dataset"));
    }
    let transformed = transform_all(dataset)?;
    let model = match weights {
        Some(m) => m.clone(),
        None => fit_mda(&transformed)?,
    };
    if model.dim() != transformed[0].values.len() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: transformed[0].values.len(),
        });
    }
    let scores = score_transformed(&model, &transformed)?;
    let industries: Vec<u32> = dataset.iter().map(|r| r.industry).collect();
    let fits = fit_industries(&industries, &scores)?;
    let records = grade_all(dataset, transformed, scores, &fits, thresholds)?;
    Ok(PipelineOutput {
        records,
        model,
        fits,
    })
}

/// Rate new records against previously fitted artifacts, without refitting.
pub fn score_new(
    records: &[RatioRecord],
    model: &DiscriminantModel,
    fits: &IndustryFits,
    thresholds: &ThresholdTable,
) -> Result<Vec<ScoredRecord>> {
    let transformed = transform_all(records)?;
    let scores = score_transformed(model, &transformed)?;
    grade_all(records, transformed, scores, fits, thresholds)
}
