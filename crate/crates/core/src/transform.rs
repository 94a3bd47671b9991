//! Raw observation types, the signed-log ratio transform and the
//! rating-to-bankruptcy-index collapse.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seven-grade agency rating scale, ordered by increasing safety.
///
/// `CCC < B < BB < BBB < A < AA < AAA` under `Ord`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RatingGrade {
    #[serde(rename = "CCC")]
    Ccc,
    #[serde(rename = "B")]
    B,
    #[serde(rename = "BB")]
    Bb,
    #[serde(rename = "BBB")]
    Bbb,
    #[serde(rename = "A")]
    A,
    #[serde(rename = "AA")]
    Aa,
    #[serde(rename = "AAA")]
    Aaa,
}

impl RatingGrade {
    /// All grades from riskiest to safest.
    pub const ALL: [RatingGrade; 7] = [
        RatingGrade::Ccc,
        RatingGrade::B,
        RatingGrade::Bb,
        RatingGrade::Bbb,
        RatingGrade::A,
        RatingGrade::Aa,
        RatingGrade::Aaa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RatingGrade::Ccc => "CCC",
            RatingGrade::B => "B",
            RatingGrade::Bb => "BB",
            RatingGrade::Bbb => "BBB",
            RatingGrade::A => "A",
            RatingGrade::Aa => "AA",
            RatingGrade::Aaa => "AAA",
        }
    }

    /// 1 for BBB and below, 0 for A and above.
    pub fn bankruptcy_index(self) -> u8 {
        bankruptcy_index(self)
    }
}

impl fmt::Display for RatingGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownGrade(pub String);

impl fmt::Display for UnknownGrade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown rating grade {:?}", self.0)
    }
}

impl std::error::Error for UnknownGrade {}

impl FromStr for RatingGrade {
    type Err = UnknownGrade;

    /// Case-insensitive; surrounding whitespace is ignored.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let folded = s.trim().to_ascii_uppercase();
        RatingGrade::ALL
            .into_iter()
            .find(|g| g.as_str() == folded)
            .ok_or_else(|| UnknownGrade(s.to_string()))
    }
}

/// Collapse a rating onto the binary bankruptcy index.
pub fn bankruptcy_index(grade: RatingGrade) -> u8 {
    match grade {
        RatingGrade::Aaa | RatingGrade::Aa | RatingGrade::A => 0,
        RatingGrade::Bbb | RatingGrade::Bb | RatingGrade::B | RatingGrade::Ccc => 1,
    }
}

/// One firm-year observation.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioRecord {
    pub ratios: Vec<f64>,
    pub industry: u32,
    pub year: i32,
    pub grade: Option<RatingGrade>,
}

impl RatioRecord {
    pub fn new(ratios: Vec<f64>, industry: u32, year: i32, grade: Option<RatingGrade>) -> Self {
        RatioRecord {
            ratios,
            industry,
            year,
            grade,
        }
    }

    pub fn bankruptcy(&self) -> Option<u8> {
        self.grade.map(bankruptcy_index)
    }
}

/// Ratios after [`signed_log`], with the bankruptcy index when the source
/// record carried an agency grade.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedRecord {
    pub values: Vec<f64>,
    pub bankruptcy: Option<u8>,
    pub industry: u32,
    pub year: i32,
}

/// `ln(x + 1)` for positive `x`, `-ln(1 - x)` otherwise.
///
/// Odd, strictly increasing, and defined on the whole real line. Non-finite
/// input is rejected by [`transform_record`]; called directly it propagates.
pub fn signed_log(x: f64) -> f64 {
    if x > 0.0 {
        x.ln_1p()
    } else {
        -(-x).ln_1p()
    }
}

/// Apply [`signed_log`] to every ratio. `row` is only used for error reporting.
pub fn transform_ratios(ratios: &[f64], row: usize) -> Result<Vec<f64>> {
    ratios
        .iter()
        .enumerate()
        .map(|(column, &value)| {
            if value.is_finite() {
                Ok(signed_log(value))
            } else {
                Err(Error::NonFinite { row, column, value })
            }
        })
        .collect()
}

pub fn transform_record(record: &RatioRecord, row: usize) -> Result<TransformedRecord> {
    Ok(TransformedRecord {
        values: transform_ratios(&record.ratios, row)?,
        bankruptcy: record.bankruptcy(),
        industry: record.industry,
        year: record.year,
    })
}

/// Moment-ratio shape statistics of a sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentStats {
    /// `m3 / m2^1.5` with central moments normalised by `n`.
    pub skewness: f64,
    /// Raw (non-excess) kurtosis `m4 / m2^2`; a normal sample gives about 3.
    pub kurtosis: f64,
}

pub fn moment_stats(values: &[f64]) -> Result<MomentStats> {
    if values.len() < 4 {
        return Err(Error::InsufficientSample {
            needed: 4,
            got: values.len(),
        });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in values {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let scale = values.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
    if m2 <= (scale * 1e-12).powi(2) {
        return Err(Error::Degenerate("sample variance is zero".into()));
    }
    Ok(MomentStats {
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}
