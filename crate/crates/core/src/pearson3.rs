//! Pearson type 3 fitting from L-moments, the Wilson-Hilferty style credit
//! index `H`, and the seven-grade threshold table.
//!
//! The distribution is parameterised as a shifted gamma with location `c`,
//! scale `alpha` and shape `eta`: `X = c + alpha * G` with `G ~ Gamma(eta, 1)`,
//! so `E[X] = c + alpha * eta` and `Var[X] = alpha^2 * eta`. Negatively skewed
//! samples are handled by mirroring: `X = c - alpha * G`.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::lmom::LMomentSet;
use crate::transform::RatingGrade;

/// |tau_3| below this is treated as symmetric; the shape estimate diverges.
pub const MIN_L_SKEWNESS: f64 = 1e-6;

/// Direction of skew of the fitted distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Skew {
    /// Support `[c, inf)`.
    Positive,
    /// Support `(-inf, c]`; the fit of the negated sample, mirrored.
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct P3Params {
    pub location: f64,
    pub scale: f64,
    pub shape: f64,
    pub skew: Skew,
}

/// Which rational approximation produced the shape estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapeBranch {
    /// `|tau_3| < 1/3`, carries `delta = 3 pi tau_3^2`.
    Small { delta: f64 },
    /// `|tau_3| >= 1/3`, carries `zeta = 1 - |tau_3|`.
    Large { zeta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeEstimate {
    pub shape: f64,
    pub branch: ShapeBranch,
}

/// Shape parameter from the absolute L-skewness.
pub fn shape_from_l_skewness(tau3: f64) -> Result<ShapeEstimate> {
    let t3 = tau3.abs();
    if !(t3 < 1.0) {
        return Err(Error::InvalidRatio { tau3 });
    }
    if t3 < MIN_L_SKEWNESS {
        return Err(Error::SymmetricDegenerate { tau3 });
    }
    let est = if t3 < 1.0 / 3.0 {
        let delta = 3.0 * PI * t3 * t3;
        let shape = (1.0 + 0.2906 * delta)
            / (delta + 0.1882 * delta * delta + 0.0442 * delta * delta * delta);
        ShapeEstimate {
            shape,
            branch: ShapeBranch::Small { delta },
        }
    } else {
        let zeta = 1.0 - t3;
        let (z2, z3) = (zeta * zeta, zeta * zeta * zeta);
        let shape = (0.36067 * zeta - 0.5967 * z2 + 0.2536 * z3)
            / (1.0 - 2.78861 * zeta + 2.56096 * z2 - 0.77045 * z3);
        ShapeEstimate {
            shape,
            branch: ShapeBranch::Large { zeta },
        }
    };
    Ok(est)
}

/// Fit location, scale and shape from the sample L-moments.
pub fn fit_p3(lmom: &LMomentSet) -> Result<P3Params> {
    let [mean, l_scale, _] = lmom.theta;
    if !(l_scale > 0.0) {
        return Err(Error::Degenerate("L-scale must be positive".into()));
    }
    let shape = shape_from_l_skewness(lmom.tau3)?.shape;
    let scale = PI.sqrt() * l_scale * (ln_gamma(shape) - ln_gamma(shape + 0.5)).exp();
    let params = if lmom.tau3 > 0.0 {
        P3Params {
            location: mean - scale * shape,
            scale,
            shape,
            skew: Skew::Positive,
        }
    } else {
        P3Params {
            location: mean + scale * shape,
            scale,
            shape,
            skew: Skew::Negative,
        }
    };
    Ok(params)
}

impl P3Params {
    pub fn mean(&self) -> f64 {
        match self.skew {
            Skew::Positive => self.location + self.scale * self.shape,
            Skew::Negative => self.location - self.scale * self.shape,
        }
    }

    /// Distance from the support bound in units of scale; non-negative inside
    /// the support.
    pub fn standardized(&self, z: f64) -> f64 {
        match self.skew {
            Skew::Positive => (z - self.location) / self.scale,
            Skew::Negative => (self.location - z) / self.scale,
        }
    }

    pub fn pdf(&self, xi: f64) -> f64 {
        p3_pdf(self, xi)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g = Gamma::new(self.shape, 1.0)
            .expect("shape and scale are positive")
            .sample(rng);
        match self.skew {
            Skew::Positive => self.location + self.scale * g,
            Skew::Negative => self.location - self.scale * g,
        }
    }

    pub fn credit_index(&self, z: f64) -> f64 {
        credit_index(self, z)
    }
}

/// Shifted-gamma density; zero outside the support.
pub fn p3_pdf(params: &P3Params, xi: f64) -> f64 {
    let y = params.standardized(xi);
    if y < 0.0 {
        return 0.0;
    }
    let eta = params.shape;
    if y == 0.0 {
        return match eta {
            e if e < 1.0 => f64::INFINITY,
            e if e == 1.0 => 1.0 / params.scale,
            _ => 0.0,
        };
    }
    if eta < 150.0 {
        y.powf(eta - 1.0) * (-y).exp() / (params.scale * gamma(eta))
    } else {
        ((eta - 1.0) * y.ln() - y - ln_gamma(eta)).exp() / params.scale
    }
}

fn wilson_hilferty(v: f64, shape: f64) -> f64 {
    let nine_eta = 9.0 * shape;
    ((v / shape).cbrt() + 1.0 / nine_eta - 1.0) * nine_eta.sqrt()
}

/// Equi-probability index: `v = (z - c) / alpha`, then
/// `H = ((v / eta)^(1/3) + 1/(9 eta) - 1) * sqrt(9 eta)`.
///
/// The cube root is signed, so scores below the support bound still map to a
/// finite, monotone `H`. For a negatively skewed fit, `H(z) = -H'(-z)` where
/// `H'` is the index of the mirrored distribution.
pub fn credit_index(params: &P3Params, z: f64) -> f64 {
    let h = wilson_hilferty(params.standardized(z), params.shape);
    match params.skew {
        Skew::Positive => h,
        Skew::Negative => -h,
    }
}

/// Upper H cutoffs for the six bounded grades; AAA is open above.
///
/// Each interval is `(previous cutoff, cutoff]`, so boundary values fall to
/// the lower grade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTable {
    name: String,
    /// Ascending: CCC, B, BB, BBB, A, AA.
    upper: [f64; 6],
}

impl Default for ThresholdTable {
    fn default() -> Self {
        ThresholdTable {
            name: "default".into(),
            upper: [-2.0, -1.5, -1.0, 0.0, 1.5, 2.0],
        }
    }
}

impl ThresholdTable {
    /// `upper` holds the inclusive upper bounds of CCC, B, BB, BBB, A, AA.
    pub fn new(name: impl Into<String>, upper: [f64; 6]) -> Result<Self> {
        if upper.iter().any(|u| !u.is_finite()) {
            return Err(Error::InvalidThresholds("cutoffs must be finite".into()));
        }
        if let Some(w) = upper.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidThresholds(format!(
                "cutoffs must be strictly increasing ({} >= {})",
                w[0], w[1]
            )));
        }
        Ok(ThresholdTable {
            name: name.into(),
            upper,
        })
    }

    /// Build from `(upper cutoff, grade)` pairs listed from riskiest to
    /// safest; the AAA entry must have an infinite cutoff.
    pub fn from_boundaries(name: impl Into<String>, pairs: &[(f64, RatingGrade)]) -> Result<Self> {
        if pairs.len() != 7 {
            return Err(Error::InvalidThresholds(format!(
                "expected 7 grades, got {}",
                pairs.len()
            )));
        }
        for (&(_, g), expected) in pairs.iter().zip(RatingGrade::ALL) {
            if g != expected {
                return Err(Error::InvalidThresholds(format!(
                    "grade {g} out of order; expected {expected}"
                )));
            }
        }
        if pairs[6].0 != f64::INFINITY {
            return Err(Error::InvalidThresholds(
                "AAA must extend to +infinity".into(),
            ));
        }
        let mut upper = [0.0; 6];
        for (u, &(cut, _)) in upper.iter_mut().zip(pairs) {
            *u = cut;
        }
        Self::new(name, upper)
    }

    /// Same table with the BBB/A boundary moved to `cutoff`.
    pub fn with_bbb_upper(&self, name: impl Into<String>, cutoff: f64) -> Result<Self> {
        let mut upper = self.upper;
        upper[3] = cutoff;
        Self::new(name, upper)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn upper(&self) -> [f64; 6] {
        self.upper
    }

    pub fn boundaries(&self) -> Vec<(f64, RatingGrade)> {
        self.upper
            .iter()
            .copied()
            .chain(std::iter::once(f64::INFINITY))
            .zip(RatingGrade::ALL)
            .collect()
    }

    pub fn grade(&self, h: f64) -> RatingGrade {
        assign_grade(h, self)
    }
}

pub fn assign_grade(h: f64, table: &ThresholdTable) -> RatingGrade {
    table
        .upper
        .iter()
        .position(|&u| h <= u)
        .map_or(RatingGrade::Aaa, |i| RatingGrade::ALL[i])
}
