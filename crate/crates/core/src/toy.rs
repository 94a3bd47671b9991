//! The ten-firm worked example: raw ratios, agency grades and the published
//! discriminant weights. Used by the `toy` CLI mode and the golden tests.

use crate::discriminant::DiscriminantModel;
use crate::error::Result;
use crate::pearson3::{shape_from_l_skewness, ShapeBranch, ThresholdTable};
use crate::pipeline::run_pipeline;
use crate::transform::{RatingGrade, RatioRecord};

/// Published weights for the worked example, in column order
/// WC_TA, RE_TA, EBIT_TA, MVE_BVTD, S_TA.
pub const PUBLISHED_WEIGHTS: [f64; 5] = [1.841, -0.856, -1.087, 3.390, -1.649];

/// Ratio columns of the worked example.
pub const RATIOS: [[f64; 5]; 10] = [
    [0.121, 0.263, 0.046, 1.219, 0.286],
    [-0.046, -0.164, 0.027, 0.218, 0.103],
    [0.481, 0.696, 0.099, 3.969, 0.532],
    [0.351, 0.238, 0.07, 1.023, 0.237],
    [0.217, 0.326, 0.045, 2.522, 0.295],
    [0.105, 0.236, 0.053, 1.566, 0.216],
    [0.078, 0.157, 0.041, 1.402, 0.335],
    [0.189, 0.437, 0.059, 5.043, 0.452],
    [0.043, -0.047, 0.041, 0.287, 0.114],
    [0.17, 0.702, 0.089, 23.002, 1.183],
];

pub const GRADES: [RatingGrade; 10] = [
    RatingGrade::Bbb,
    RatingGrade::B,
    RatingGrade::Aaa,
    RatingGrade::Bbb,
    RatingGrade::Aa,
    RatingGrade::Bbb,
    RatingGrade::Bbb,
    RatingGrade::Aaa,
    RatingGrade::B,
    RatingGrade::Aaa,
];

/// All records in industry 1, years 1 through 10.
pub fn dataset() -> Vec<RatioRecord> {
    RATIOS
        .iter()
        .zip(GRADES)
        .enumerate()
        .map(|(i, (r, g))| RatioRecord::new(r.to_vec(), 1, i as i32 + 1, Some(g)))
        .collect()
}

/// Signed-log transform of [`RATIOS`] as published, three decimals.
pub const TRANSFORMED: [[f64; 5]; 10] = [
    [0.114, 0.233, 0.045, 0.797, 0.252],
    [-0.045, -0.152, 0.027, 0.197, 0.098],
    [0.393, 0.528, 0.094, 1.603, 0.427],
    [0.301, 0.213, 0.068, 0.705, 0.213],
    [0.196, 0.282, 0.044, 1.259, 0.259],
    [0.1, 0.212, 0.052, 0.942, 0.196],
    [0.075, 0.146, 0.04, 0.876, 0.289],
    [0.173, 0.363, 0.057, 1.799, 0.373],
    [0.042, -0.046, 0.04, 0.252, 0.108],
    [0.157, 0.532, 0.085, 3.178, 0.781],
];

pub const SCORES: [f64; 10] = [2.249, 0.525, 4.900, 2.335, 3.914, 2.818, 2.464, 5.429, 0.750, 9.228];
pub const PWM: [f64; 3] = [3.461, 2.449, 1.939];
pub const L_MOMENTS: [f64; 3] = [3.461, 1.437, 0.401];
pub const L_CV: f64 = 0.415;
pub const L_SKEWNESS: f64 = 0.279;
pub const DELTA: f64 = 0.7202;
pub const SHAPE: f64 = 1.449;
pub const SCALE: f64 = 2.3042;
pub const LOCATION: f64 = 0.121;
pub const FIRST_V: f64 = 0.9232;
pub const INDEX: [f64; 10] = [-0.227, -1.549, 0.735, -0.186, 0.433, 0.028, -0.126, 0.880, -1.265, 1.711];
pub const RATINGS: [RatingGrade; 10] = [
    RatingGrade::Bbb,
    RatingGrade::B,
    RatingGrade::A,
    RatingGrade::Bbb,
    RatingGrade::A,
    RatingGrade::A,
    RatingGrade::Bbb,
    RatingGrade::A,
    RatingGrade::Bb,
    RatingGrade::Aa,
];

pub const TOL_TRANSFORMED: f64 = 5e-4;
pub const TOL_SCORE: f64 = 2e-3;
pub const TOL_MOMENTS: f64 = 2e-3;
pub const TOL_PARAMS: f64 = 3e-3;
pub const TOL_FIRST_INDEX: f64 = 3e-3;
pub const TOL_INDEX: f64 = 5e-3;

#[derive(Debug, Clone, PartialEq)]
pub enum CheckValue {
    Approx { expected: f64, actual: f64, tolerance: f64 },
    Exact { expected: String, actual: String },
}

/// One golden comparison of the worked example.
#[derive(Debug, Clone, PartialEq)]
pub struct GoldenCheck {
    pub quantity: String,
    pub value: CheckValue,
}

impl GoldenCheck {
    fn approx(quantity: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        GoldenCheck {
            quantity: quantity.into(),
            value: CheckValue::Approx { expected, actual, tolerance },
        }
    }

    pub fn passed(&self) -> bool {
        match &self.value {
            CheckValue::Approx { expected, actual, tolerance } => (actual - expected).abs() <= *tolerance,
            CheckValue::Exact { expected, actual } => expected == actual,
        }
    }
}

/// Run the worked example with `weights` injected and compare every
/// intermediate with the published figures, in pipeline order.
pub fn golden_checks(weights: &[f64], thresholds: &ThresholdTable) -> Result<Vec<GoldenCheck>> {
    let model = DiscriminantModel::from_weights(weights.to_vec());
    let out = run_pipeline(&dataset(), Some(&model), thresholds)?;
    let fit = &out.fits[&1];
    let lm = &fit.l_moments;
    let mut checks = Vec::new();

    for (i, (rec, want)) in out.records.iter().zip(&TRANSFORMED).enumerate() {
        for (j, (&got, &exp)) in rec.transformed.values.iter().zip(want).enumerate() {
            checks.push(GoldenCheck::approx(format!("D[{},{}]", i + 1, j + 1), exp, got, TOL_TRANSFORMED));
        }
    }
    for (i, (rec, &exp)) in out.records.iter().zip(&SCORES).enumerate() {
        checks.push(GoldenCheck::approx(format!("Z_M[{}]", i + 1), exp, rec.z_m, TOL_SCORE));
    }
    for r in 0..3 {
        checks.push(GoldenCheck::approx(format!("beta{r}"), PWM[r], lm.beta[r], TOL_MOMENTS));
    }
    for r in 0..3 {
        checks.push(GoldenCheck::approx(format!("theta{}", r + 1), L_MOMENTS[r], lm.theta[r], TOL_MOMENTS));
    }
    checks.push(GoldenCheck::approx("tau2", L_CV, lm.tau2.unwrap_or(f64::NAN), TOL_MOMENTS));
    checks.push(GoldenCheck::approx("tau3", L_SKEWNESS, lm.tau3, TOL_MOMENTS));
    let delta = match shape_from_l_skewness(lm.tau3)?.branch {
        ShapeBranch::Small { delta } => delta,
        ShapeBranch::Large { .. } => f64::NAN,
    };
    checks.push(GoldenCheck::approx("delta", DELTA, delta, TOL_PARAMS));
    checks.push(GoldenCheck::approx("eta", SHAPE, fit.params.shape, TOL_PARAMS));
    checks.push(GoldenCheck::approx("alpha", SCALE, fit.params.scale, TOL_PARAMS));
    checks.push(GoldenCheck::approx("c", LOCATION, fit.params.location, TOL_PARAMS));
    checks.push(GoldenCheck::approx("v[1]", FIRST_V, out.records[0].v, TOL_PARAMS));
    for (i, (rec, &exp)) in out.records.iter().zip(&INDEX).enumerate() {
        let tol = if i == 0 { TOL_FIRST_INDEX } else { TOL_INDEX };
        checks.push(GoldenCheck::approx(format!("H[{}]", i + 1), exp, rec.h, tol));
    }
    for (i, (rec, exp)) in out.records.iter().zip(&RATINGS).enumerate() {
        checks.push(GoldenCheck {
            quantity: format!("W[{}]", i + 1),
            value: CheckValue::Exact {
                expected: exp.to_string(),
                actual: rec.grade.to_string(),
            },
        });
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::signed_log;

    #[test]
    fn published_transform_matches_raw_ratios() {
        for (raw, pub_row) in RATIOS.iter().zip(&TRANSFORMED) {
            for (&x, &d) in raw.iter().zip(pub_row) {
                assert!((signed_log(x) - d).abs() <= TOL_TRANSFORMED, "{x} -> {d}");
            }
        }
    }

    #[test]
    fn golden_table_is_ordered_and_complete() {
        let checks = golden_checks(&PUBLISHED_WEIGHTS, &ThresholdTable::default()).unwrap();
        assert_eq!(checks.len(), 50 + 10 + 3 + 3 + 2 + 5 + 10 + 10);
        assert_eq!(checks[0].quantity, "D[1,1]");
        assert_eq!(checks.last().unwrap().quantity, "W[10]");
        let first_fail = |w: &[f64]| {
            golden_checks(w, &ThresholdTable::default())
                .unwrap()
                .into_iter()
                .find(|c| !c.passed())
                .map(|c| c.quantity)
        };
        let mut bumped = PUBLISHED_WEIGHTS;
        bumped[0] += 0.1;
        assert_eq!(first_fail(&bumped).as_deref(), Some("Z_M[1]"));
    }

    #[test]
    fn shifted_grade_boundaries_break_ratings() {
        let table = ThresholdTable::default().with_bbb_upper("shifted", -0.5).unwrap();
        let checks = golden_checks(&PUBLISHED_WEIGHTS, &table).unwrap();
        let w1 = checks.iter().find(|c| c.quantity == "W[1]").unwrap();
        assert!(!w1.passed());
    }
}
