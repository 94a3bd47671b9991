//! Classification matrices, logistic comparison of score families, variance
//! and rank-correlation tests, descriptive tables, threshold sweeps and the
//! seeded hold-out protocol.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use crate::discriminant::{z_score, RatioInput, ZScoreVariant};
use crate::error::{Error, Result};
use crate::pearson3::ThresholdTable;
use crate::pipeline::{run_pipeline, score_new, IndustryFits, ScoredRecord};
use crate::discriminant::DiscriminantModel;
use crate::transform::{bankruptcy_index, RatingGrade, RatioRecord};

/// 2x2 bankrupt / non-bankrupt hit-and-miss table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ClassificationMatrix {
    /// Bankrupt predicted bankrupt.
    pub n1: usize,
    /// Bankrupt predicted non-bankrupt (Type I).
    pub m1: usize,
    /// Non-bankrupt predicted bankrupt (Type II).
    pub m2: usize,
    /// Non-bankrupt predicted non-bankrupt.
    pub n2: usize,
}

impl ClassificationMatrix {
    pub fn total(&self) -> usize {
        self.n1 + self.m1 + self.m2 + self.n2
    }

    pub fn accuracy(&self) -> f64 {
        (self.n1 + self.n2) as f64 / self.total() as f64
    }

    /// Share of actual bankrupt cases rated non-bankrupt; `None` without
    /// bankrupt cases.
    pub fn type_i(&self) -> Option<f64> {
        let d = self.n1 + self.m1;
        (d > 0).then(|| self.m1 as f64 / d as f64)
    }

    /// Share of actual non-bankrupt cases rated bankrupt.
    pub fn type_ii(&self) -> Option<f64> {
        let d = self.n2 + self.m2;
        (d > 0).then(|| self.m2 as f64 / d as f64)
    }
}

/// Labels are bankruptcy indices: 1 bankrupt, 0 not.
pub fn confusion(actual: &[u8], predicted: &[u8]) -> Result<ClassificationMatrix> {
    if actual.len() != predicted.len() {
        return Err(Error::DimensionMismatch {
            expected: actual.len(),
            got: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Empty("label vectors"));
    }
    let mut m = ClassificationMatrix::default();
    for (&a, &p) in actual.iter().zip(predicted) {
        match (a != 0, p != 0) {
            (true, true) => m.n1 += 1,
            (true, false) => m.m1 += 1,
            (false, true) => m.m2 += 1,
            (false, false) => m.n2 += 1,
        }
    }
    Ok(m)
}

pub fn rating_to_binary_prediction(grades: &[RatingGrade]) -> Vec<u8> {
    grades.iter().map(|&g| bankruptcy_index(g)).collect()
}

pub const LOGISTIC_MAX_ITER: usize = 100;
/// Bound on the norm of the mean log-likelihood gradient.
pub const LOGISTIC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub intercept: f64,
    pub slope: f64,
    /// `(coef / se)^2`.
    pub wald_intercept: f64,
    pub wald_slope: f64,
    pub converged: bool,
    /// The classes do not overlap in `z`, so the likelihood has no finite
    /// maximizer and the coefficients are only where the iteration stopped.
    pub separated: bool,
    pub iterations: usize,
}

fn log1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Newton / IRLS maximum likelihood for `P(b = 1) = sigmoid(a + s z)`.
///
/// The iteration runs on the standardized predictor and is mapped back, so
/// the reported coefficients refer to `z` itself. When the classes are
/// separated the fit is reported with `separated = true` and
/// `converged = false`.
pub fn fit_logistic(z: &[f64], b: &[u8]) -> Result<LogisticFit> {
    if z.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: z.len(),
            got: b.len(),
        });
    }
    if z.len() < 3 {
        return Err(Error::InsufficientSample {
            needed: 3,
            got: z.len(),
        });
    }
    let positives = b.iter().filter(|&&y| y != 0).count();
    if positives == 0 || positives == b.len() {
        return Err(Error::Fit("logistic regression needs both classes".into()));
    }
    let n = z.len() as f64;
    let mean = z.iter().sum::<f64>() / n;
    let sd = (z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    if !(sd > 0.0) {
        return Err(Error::Fit("predictor is constant".into()));
    }
    let separated = is_separated(z, b);
    let xs: Vec<f64> = z.iter().map(|x| (x - mean) / sd).collect();
    let ys: Vec<f64> = b.iter().map(|&y| if y != 0 { 1.0 } else { 0.0 }).collect();

    let loglik = |beta: [f64; 2]| -> f64 {
        xs.iter()
            .zip(&ys)
            .map(|(x, y)| {
                let eta = beta[0] + beta[1] * x;
                y * eta - log1p_exp(eta)
            })
            .sum()
    };
    // gradient and Fisher information at beta
    let moments = |beta: [f64; 2]| {
        let (mut g, mut info) = ([0.0; 2], [0.0; 3]);
        for (x, y) in xs.iter().zip(&ys) {
            let p = sigmoid(beta[0] + beta[1] * x);
            let w = p * (1.0 - p);
            g[0] += y - p;
            g[1] += (y - p) * x;
            info[0] += w;
            info[1] += w * x;
            info[2] += w * x * x;
        }
        (g, info)
    };

    let mut beta = [0.0f64; 2];
    let mut converged = false;
    let mut iterations = 0;
    let mut ll = loglik(beta);
    loop {
        let (g, info) = moments(beta);
        if (g[0].hypot(g[1])) / n < LOGISTIC_TOL {
            converged = true;
            break;
        }
        if iterations == LOGISTIC_MAX_ITER {
            break;
        }
        iterations += 1;
        let det = info[0] * info[2] - info[1] * info[1];
        if !(det > 0.0) || !det.is_finite() {
            break;
        }
        let step = [
            (info[2] * g[0] - info[1] * g[1]) / det,
            (info[0] * g[1] - info[1] * g[0]) / det,
        ];
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let cand = [beta[0] + t * step[0], beta[1] + t * step[1]];
            let cand_ll = loglik(cand);
            if cand_ll >= ll - 1e-12 * ll.abs() {
                beta = cand;
                ll = cand_ll;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }

    let (_, info) = moments(beta);
    let det = info[0] * info[2] - info[1] * info[1];
    // covariance of the standardized-scale coefficients
    let (v00, v01, v11) = if det > 0.0 {
        (info[2] / det, -info[1] / det, info[0] / det)
    } else {
        (f64::INFINITY, 0.0, f64::INFINITY)
    };
    // z-scale: intercept = b0 - b1 m / s, slope = b1 / s
    let k = mean / sd;
    let intercept = beta[0] - beta[1] * k;
    let slope = beta[1] / sd;
    let var_intercept = v00 - 2.0 * k * v01 + k * k * v11;
    let var_slope = v11 / (sd * sd);
    let wald = |c: f64, v: f64| if v.is_finite() && v > 0.0 { c * c / v } else { 0.0 };
    Ok(LogisticFit {
        intercept,
        slope,
        wald_intercept: wald(intercept, var_intercept),
        wald_slope: wald(slope, var_slope),
        converged: converged && !separated,
        separated,
        iterations,
    })
}

fn is_separated(z: &[f64], b: &[u8]) -> bool {
    let range = |class: u8| {
        z.iter()
            .zip(b)
            .filter(|(_, &y)| (y != 0) == (class != 0))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (&x, _)| (lo.min(x), hi.max(x)))
    };
    let (lo1, hi1) = range(1);
    let (lo0, hi0) = range(0);
    hi1 <= lo0 || hi0 <= lo1
}

pub const F_TEST_LEVEL: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FTest {
    /// Larger sample variance over the smaller.
    pub f: f64,
    pub df_numerator: usize,
    pub df_denominator: usize,
    /// Upper `F_TEST_LEVEL / 2` critical value.
    pub critical: f64,
    pub reject: bool,
}

fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Two-sided variance-ratio test at the 1% level.
pub fn f_test_variance(a: &[f64], b: &[f64]) -> Result<FTest> {
    for xs in [a, b] {
        if xs.len() < 2 {
            return Err(Error::InsufficientSample {
                needed: 2,
                got: xs.len(),
            });
        }
    }
    let (va, vb) = (sample_variance(a), sample_variance(b));
    if !(va > 0.0 && vb > 0.0) {
        return Err(Error::Degenerate("zero variance in F-test sample".into()));
    }
    let ((big, n_big), (small, n_small)) = if va >= vb {
        ((va, a.len()), (vb, b.len()))
    } else {
        ((vb, b.len()), (va, a.len()))
    };
    let (df1, df2) = (n_big - 1, n_small - 1);
    let dist = FisherSnedecor::new(df1 as f64, df2 as f64)
        .map_err(|e| Error::Fit(format!("F distribution: {e}")))?;
    let critical = dist.inverse_cdf(1.0 - F_TEST_LEVEL / 2.0);
    let f = big / small;
    Ok(FTest {
        f,
        df_numerator: df1,
        df_denominator: df2,
        critical,
        reject: f > critical,
    })
}

/// Ranks starting at 1, ties share their average rank.
fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let mut ranks = vec![0.0; xs.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && xs[idx[end]] == xs[idx[start]] {
            end += 1;
        }
        let rank = (start + end + 1) as f64 / 2.0;
        for &k in &idx[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman_rho(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.len() < 3 {
        return Err(Error::InsufficientSample {
            needed: 3,
            got: a.len(),
        });
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa == 0.0 || sbb == 0.0 {
        return Err(Error::Degenerate(
            "rank correlation undefined for a constant vector".into(),
        ));
    }
    Ok((sab / (saa * sbb).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Descriptives {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation (divisor `n - 1`; zero for a single value).
    pub sd: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

/// Linear interpolation between order statistics at `(n - 1) p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn describe(values: &[f64]) -> Result<Descriptives> {
    if values.is_empty() {
        return Err(Error::Empty("score vector"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let sd = if n > 1 { sample_variance(values).sqrt() } else { 0.0 };
    Ok(Descriptives {
        n,
        mean,
        sd,
        q25: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        q75: quantile_sorted(&sorted, 0.75),
    })
}

/// Score families compared in the evaluation tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ScoreKind {
    #[serde(rename = "Z_A")]
    Altman,
    #[serde(rename = "Z_M")]
    NonlinearM,
    #[serde(rename = "Z_U")]
    Updated,
}

impl ScoreKind {
    pub const ALL: [ScoreKind; 3] = [ScoreKind::Altman, ScoreKind::NonlinearM, ScoreKind::Updated];

    pub fn label(self) -> &'static str {
        match self {
            ScoreKind::Altman => "Z_A",
            ScoreKind::NonlinearM => "Z_M",
            ScoreKind::Updated => "Z_U",
        }
    }
}

/// All three score families of each scored record.
pub fn score_families(scored: &[ScoredRecord]) -> Result<BTreeMap<ScoreKind, Vec<f64>>> {
    let mut out = BTreeMap::new();
    out.insert(ScoreKind::NonlinearM, scored.iter().map(|r| r.z_m).collect());
    for (kind, variant) in [
        (ScoreKind::Altman, ZScoreVariant::Altman),
        (ScoreKind::Updated, ZScoreVariant::Updated),
    ] {
        let zs = scored
            .iter()
            .map(|r| z_score(variant, &r.input.ratios, RatioInput::Raw))
            .collect::<Result<Vec<_>>>()?;
        out.insert(kind, zs);
    }
    Ok(out)
}

/// Descriptive statistics per score family.
pub fn compare_scores_table(scored: &[ScoredRecord]) -> Result<BTreeMap<ScoreKind, Descriptives>> {
    if scored.is_empty() {
        return Err(Error::Empty("scored records"));
    }
    score_families(scored)?
        .into_iter()
        .map(|(k, zs)| Ok((k, describe(&zs)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub name: String,
    pub upper: [f64; 6],
    pub matrix: ClassificationMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    /// One entry per variant, in input order.
    pub entries: Vec<SweepEntry>,
    /// Index of the variant with the smallest `max(Type I, Type II)`.
    pub best: usize,
}

fn actual_labels(scored: &[ScoredRecord]) -> Result<Vec<u8>> {
    scored
        .iter()
        .enumerate()
        .map(|(row, r)| r.actual_bankruptcy().ok_or(Error::Ungraded { row }))
        .collect()
}

/// Re-grade stored indices under each threshold table; no refitting.
pub fn threshold_sweep(scored: &[ScoredRecord], variants: &[ThresholdTable]) -> Result<SweepResult> {
    if scored.is_empty() {
        return Err(Error::Empty("scored records"));
    }
    if variants.is_empty() {
        return Err(Error::InvalidThresholds("no variants to sweep".into()));
    }
    let actual = actual_labels(scored)?;
    let entries = variants
        .iter()
        .map(|table| {
            let predicted: Vec<u8> = scored.iter().map(|r| table.grade(r.h).bankruptcy_index()).collect();
            Ok(SweepEntry {
                name: table.name().to_string(),
                upper: table.upper(),
                matrix: confusion(&actual, &predicted)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = |m: &ClassificationMatrix| {
        m.type_i().unwrap_or(0.0).max(m.type_ii().unwrap_or(0.0))
    };
    let best = entries
        .iter()
        .enumerate()
        .min_by(|a, b| worst(&a.1.matrix).total_cmp(&worst(&b.1.matrix)))
        .map_or(0, |(i, _)| i);
    Ok(SweepResult { entries, best })
}

/// The default table plus the two wider BBB bands (upper bound 0.25, 0.5).
pub fn standard_sweep_variants() -> Vec<ThresholdTable> {
    let base = ThresholdTable::default();
    vec![
        base.clone(),
        base.with_bbb_upper("bbb_0.25", 0.25).expect("valid table"),
        base.with_bbb_upper("bbb_0.5", 0.5).expect("valid table"),
    ]
}

/// Train/test indices, stratified by `strata` so each stratum is split in
/// the same proportion. Strata with one member go to training.
pub fn stratified_split<K: Ord + Copy>(strata: &[K], train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut groups: BTreeMap<K, Vec<usize>> = BTreeMap::new();
    for (i, &k) in strata.iter().enumerate() {
        groups.entry(k).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (_, mut idx) in groups {
        idx.shuffle(&mut rng);
        let k = ((idx.len() as f64) * train_fraction).round() as usize;
        let k = k.clamp(1, idx.len());
        train.extend_from_slice(&idx[..k]);
        test.extend_from_slice(&idx[k..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

#[derive(Debug, Clone)]
pub struct HoldoutConfig {
    pub train_fraction: f64,
    pub seed: u64,
    pub thresholds: ThresholdTable,
    pub sweep_variants: Vec<ThresholdTable>,
}

impl Default for HoldoutConfig {
    fn default() -> Self {
        HoldoutConfig {
            train_fraction: 0.7,
            seed: 42,
            thresholds: ThresholdTable::default(),
            sweep_variants: standard_sweep_variants(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreTest {
    pub first: ScoreKind,
    pub second: ScoreKind,
    pub f_test: FTest,
}

/// Everything the hold-out protocol measures on the test split.
#[derive(Debug, Clone)]
pub struct HoldoutEvaluation {
    pub model: DiscriminantModel,
    pub fits: IndustryFits,
    pub train_size: usize,
    pub test: Vec<ScoredRecord>,
    pub matrix: ClassificationMatrix,
    pub logistic: BTreeMap<ScoreKind, LogisticFit>,
    pub descriptives: BTreeMap<ScoreKind, Descriptives>,
    pub f_tests: Vec<ScoreTest>,
    /// Spearman correlation of Z_M with Z_A.
    pub spearman_zm_za: f64,
    pub sweep: SweepResult,
}

/// Fit the discriminant and industry distributions on a stratified training
/// split, rate the held-out records and evaluate them.
pub fn holdout_evaluation(dataset: &[RatioRecord], config: &HoldoutConfig) -> Result<HoldoutEvaluation> {
    let strata = dataset
        .iter()
        .enumerate()
        .map(|(row, r)| Ok((r.industry, r.bankruptcy().ok_or(Error::Ungraded { row })?)))
        .collect::<Result<Vec<_>>>()?;
    let (train_idx, test_idx) = stratified_split(&strata, config.train_fraction, config.seed);
    if test_idx.is_empty() {
        return Err(Error::Empty("hold-out split"));
    }
    let train: Vec<RatioRecord> = train_idx.iter().map(|&i| dataset[i].clone()).collect();
    let test: Vec<RatioRecord> = test_idx.iter().map(|&i| dataset[i].clone()).collect();

    let fitted = run_pipeline(&train, None, &config.thresholds)?;
    let scored = score_new(&test, &fitted.model, &fitted.fits, &config.thresholds)?;

    let actual = actual_labels(&scored)?;
    let predicted = rating_to_binary_prediction(&scored.iter().map(|r| r.grade).collect::<Vec<_>>());
    let matrix = confusion(&actual, &predicted)?;

    let families = score_families(&scored)?;
    let logistic = families
        .iter()
        .map(|(&k, zs)| Ok((k, fit_logistic(zs, &actual)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let descriptives = families
        .iter()
        .map(|(&k, zs)| Ok((k, describe(zs)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let zm = &families[&ScoreKind::NonlinearM];
    let f_tests = [ScoreKind::Altman, ScoreKind::Updated]
        .into_iter()
        .map(|other| {
            Ok(ScoreTest {
                first: ScoreKind::NonlinearM,
                second: other,
                f_test: f_test_variance(zm, &families[&other])?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let spearman_zm_za = spearman_rho(zm, &families[&ScoreKind::Altman])?;
    let sweep = threshold_sweep(&scored, &config.sweep_variants)?;

    Ok(HoldoutEvaluation {
        model: fitted.model,
        fits: fitted.fits,
        train_size: train.len(),
        test: scored,
        matrix,
        logistic,
        descriptives,
        f_tests,
        spearman_zm_za,
        sweep,
    })
}
