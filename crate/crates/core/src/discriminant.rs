//! Two-group Fisher discriminant for the weight vector of the nonlinear
//! score, and the fixed-weight Altman scores.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::transform::{signed_log, TransformedRecord};

/// Altman's original weights on WC/TA, RE/TA, EBIT/TA, MVE/BVTD, S/TA.
pub const ALTMAN_WEIGHTS: [f64; 5] = [1.2, 1.4, 3.3, 0.6, 0.999];

/// Revised weights of the updated Altman score.
pub const UPDATED_WEIGHTS: [f64; 5] = [0.72, 0.85, 3.1, 0.42, 1.0];

/// Relative ridge added to a rank-deficient pooled scatter: `RIDGE * trace(S) / t`.
pub const RIDGE: f64 = 1e-8;

/// How the raw discriminant direction was scaled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `w' S w = 1` for the pooled within-class scatter `S`, signed so that
    /// the non-bankrupt class has the higher mean score.
    UnitPooledVariance,
    /// Weights supplied from outside; no scaling applied.
    Fixed,
}

impl Normalization {
    pub fn as_str(self) -> &'static str {
        match self {
            Normalization::UnitPooledVariance => "unit_pooled_variance",
            Normalization::Fixed => "fixed",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "unit_pooled_variance" => Some(Normalization::UnitPooledVariance),
            "fixed" => Some(Normalization::Fixed),
            _ => None,
        }
    }
}

/// Class statistics retained from a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub mean_bankrupt: Vec<f64>,
    pub mean_non_bankrupt: Vec<f64>,
    /// Pooled within-class covariance, row-major `t x t`, divisor `n - 2`.
    pub pooled_scatter: Vec<Vec<f64>>,
    pub n_bankrupt: usize,
    pub n_non_bankrupt: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantModel {
    pub weights: Vec<f64>,
    pub normalization: Normalization,
    pub diagnostics: Option<FitDiagnostics>,
}

impl DiscriminantModel {
    /// Wrap externally supplied weights.
    pub fn from_weights(weights: Vec<f64>) -> Self {
        DiscriminantModel {
            weights,
            normalization: Normalization::Fixed,
            diagnostics: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// Score of an already transformed ratio vector.
    pub fn score(&self, transformed: &[f64]) -> Result<f64> {
        dot(&self.weights, transformed)
    }
}

fn dot(weights: &[f64], xs: &[f64]) -> Result<f64> {
    if weights.len() != xs.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: xs.len(),
        });
    }
    Ok(weights.iter().zip(xs).map(|(w, x)| w * x).sum())
}

/// Fisher's two-group discriminant `w ∝ S⁻¹ (μ_nonbankrupt − μ_bankrupt)`.
///
/// Every record must carry a bankruptcy index, and each class needs at least
/// two rows.
pub fn fit_mda(records: &[TransformedRecord]) -> Result<DiscriminantModel> {
    let t = records.first().ok_or(Error::Empty("training set"))?.values.len();
    if t == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    let mut sums = [vec![0.0; t], vec![0.0; t]];
    let mut counts = [0usize; 2];
    for (row, r) in records.iter().enumerate() {
        if r.values.len() != t {
            return Err(Error::DimensionMismatch {
                expected: t,
                got: r.values.len(),
            });
        }
        let b = r.bankruptcy.ok_or(Error::Ungraded { row })? as usize;
        counts[b] += 1;
        for (s, x) in sums[b].iter_mut().zip(&r.values) {
            *s += x;
        }
    }
    if counts[0] < 2 || counts[1] < 2 {
        return Err(Error::Fit(format!(
            "need at least two records per class, got {} non-bankrupt and {} bankrupt",
            counts[0], counts[1]
        )));
    }
    let means: Vec<DVector<f64>> = (0..2)
        .map(|g| DVector::from_iterator(t, sums[g].iter().map(|s| s / counts[g] as f64)))
        .collect();

    let mut scatter = DMatrix::<f64>::zeros(t, t);
    for r in records {
        let b = r.bankruptcy.unwrap_or(0) as usize;
        let d = DVector::from_column_slice(&r.values) - &means[b];
        scatter.ger(1.0, &d, &d, 1.0);
    }
    scatter /= (records.len() - 2) as f64;

    let diff = &means[0] - &means[1];
    let chol = factor(&scatter)?;
    let mut w = chol.solve(&diff);
    let within_var = w.dot(&(&scatter * &w));
    if !(within_var > 0.0) {
        return Err(Error::SingularScatter {
            columns: (0..t).collect(),
        });
    }
    w /= within_var.sqrt();
    // non-bankrupt scores above bankrupt ones
    if w.dot(&diff) < 0.0 {
        w = -w;
    }

    Ok(DiscriminantModel {
        weights: w.iter().copied().collect(),
        normalization: Normalization::UnitPooledVariance,
        diagnostics: Some(FitDiagnostics {
            mean_bankrupt: means[1].iter().copied().collect(),
            mean_non_bankrupt: means[0].iter().copied().collect(),
            pooled_scatter: (0..t)
                .map(|i| (0..t).map(|j| scatter[(i, j)]).collect())
                .collect(),
            n_bankrupt: counts[1],
            n_non_bankrupt: counts[0],
        }),
    })
}

/// Cholesky factor of the pooled scatter. The ridge is only added when the
/// plain factorization fails or is numerically rank deficient.
fn factor(scatter: &DMatrix<f64>) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let t = scatter.nrows();
    let trace = scatter.trace();
    let singular = || {
        let columns: Vec<usize> = (0..t)
            .filter(|&i| !(scatter[(i, i)] > f64::EPSILON * trace.abs()))
            .collect();
        Error::SingularScatter {
            columns: if columns.is_empty() { (0..t).collect() } else { columns },
        }
    };
    if !(trace > 0.0 && trace.is_finite()) {
        return Err(singular());
    }
    if let Some(c) = scatter.clone().cholesky() {
        // fraction of each column's variance not explained by the earlier
        // columns; invariant to column scaling
        let l = c.l_dirty();
        let independent = (0..t).all(|i| l[(i, i)] * l[(i, i)] > 1e-12 * scatter[(i, i)]);
        if independent {
            return Ok(c);
        }
    }
    let mut regularized = scatter.clone();
    for i in 0..t {
        regularized[(i, i)] += RIDGE * trace / t as f64;
    }
    regularized.cholesky().ok_or_else(singular)
}

/// Which score family to evaluate.
#[derive(Debug, Clone, Copy)]
pub enum ZScoreVariant<'a> {
    /// Altman's weights on raw ratios.
    Altman,
    /// Revised weights on raw ratios.
    Updated,
    /// Fitted weights on signed-log transformed ratios.
    NonlinearM(&'a DiscriminantModel),
}

impl ZScoreVariant<'_> {
    pub fn weights(&self) -> &[f64] {
        match self {
            ZScoreVariant::Altman => &ALTMAN_WEIGHTS,
            ZScoreVariant::Updated => &UPDATED_WEIGHTS,
            ZScoreVariant::NonlinearM(m) => &m.weights,
        }
    }
}

/// Whether a ratio vector has already been through [`signed_log`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioInput {
    Raw,
    Transformed,
}

fn inverse_signed_log(y: f64) -> f64 {
    if y > 0.0 {
        y.exp_m1()
    } else {
        -(-y).exp_m1()
    }
}

/// Linear score of a ratio vector. The Altman variants always weigh raw
/// ratios (transformed input is mapped back first); the nonlinear score
/// always weighs transformed ratios.
pub fn z_score(variant: ZScoreVariant<'_>, ratios: &[f64], input: RatioInput) -> Result<f64> {
    let weights = variant.weights();
    if weights.len() != ratios.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: ratios.len(),
        });
    }
    let xs: Vec<f64> = match (variant, input) {
        (ZScoreVariant::NonlinearM(_), RatioInput::Raw) => {
            ratios.iter().map(|&x| signed_log(x)).collect()
        }
        (ZScoreVariant::NonlinearM(_), RatioInput::Transformed) => ratios.to_vec(),
        (_, RatioInput::Raw) => ratios.to_vec(),
        (_, RatioInput::Transformed) => ratios.iter().map(|&y| inverse_signed_log(y)).collect(),
    };
    dot(weights, &xs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AltmanZone {
    Safe,
    Grey,
    Distress,
}

pub fn altman_zone(z: f64) -> AltmanZone {
    if z >= 2.99 {
        AltmanZone::Safe
    } else if z >= 1.81 {
        AltmanZone::Grey
    } else {
        AltmanZone::Distress
    }
}
