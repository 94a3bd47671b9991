//! Sample probability-weighted moments and the first three L-moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// PWMs, L-moments and L-moment ratios of one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LMomentSet {
    /// Sample PWMs `b_0, b_1, b_2`.
    pub beta: [f64; 3],
    /// L-mean, L-scale, third L-moment.
    pub theta: [f64; 3],
    /// L-CV `theta_2 / theta_1`; `None` when the L-mean is exactly zero.
    /// May be negative for samples with negative mean.
    pub tau2: Option<f64>,
    /// L-skewness `theta_3 / theta_2`.
    pub tau3: f64,
    pub n: usize,
}

fn sorted(values: &[f64]) -> Vec<f64> {
    let mut xs = values.to_vec();
    xs.sort_by(f64::total_cmp);
    xs
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite {
            row: i,
            column: 0,
            value: values[i],
        }),
        None => Ok(()),
    }
}

/// Unbiased PWM estimator on an ascending sample:
/// `b_r = n^-1 sum_i x_(i) prod_{j=1..r} (i - j) / (n - j)`.
fn pwm_sorted(xs: &[f64], r: usize) -> f64 {
    let n = xs.len();
    let mut acc = 0.0;
    // weights vanish for the first r order statistics
    for (idx, &x) in xs.iter().enumerate().skip(r) {
        let i = idx + 1;
        let mut w = 1.0;
        for j in 1..=r {
            w *= (i - j) as f64 / (n - j) as f64;
        }
        acc += w * x;
    }
    acc / n as f64
}

/// Sample probability-weighted moment `beta_r` of order `r`.
pub fn sample_pwm(values: &[f64], r: usize) -> Result<f64> {
    if values.len() <= r {
        return Err(Error::InsufficientSample {
            needed: r + 1,
            got: values.len(),
        });
    }
    check_finite(values)?;
    Ok(pwm_sorted(&sorted(values), r))
}

pub fn l_moments(values: &[f64]) -> Result<LMomentSet> {
    if values.len() < 3 {
        return Err(Error::InsufficientSample {
            needed: 3,
            got: values.len(),
        });
    }
    check_finite(values)?;
    let xs = sorted(values);
    let beta = [pwm_sorted(&xs, 0), pwm_sorted(&xs, 1), pwm_sorted(&xs, 2)];
    let theta = [
        beta[0],
        2.0 * beta[1] - beta[0],
        6.0 * beta[2] - 6.0 * beta[1] + beta[0],
    ];
    // theta_2 > 0 whenever two values differ, up to rounding
    let range = xs[xs.len() - 1] - xs[0];
    if range == 0.0 || theta[1] <= 0.0 {
        return Err(Error::Degenerate(
            "all values are equal; L-scale is zero".into(),
        ));
    }
    Ok(LMomentSet {
        beta,
        theta,
        tau2: (theta[0] != 0.0).then(|| theta[1] / theta[0]),
        tau3: theta[2] / theta[1],
        n: xs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const TOY_ZM: [f64; 10] = [
        2.249, 0.525, 4.900, 2.335, 3.914, 2.818, 2.464, 5.429, 0.750, 9.228,
    ];

    #[test]
    fn toy_pwms() {
        let b: Vec<f64> = (0..3).map(|r| sample_pwm(&TOY_ZM, r).unwrap()).collect();
        for (got, want) in b.iter().zip([3.461, 2.449, 1.939]) {
            assert!((got - want).abs() < 2e-3, "{got} vs {want}");
        }
    }

    #[test]
    fn toy_l_moments() {
        let l = l_moments(&TOY_ZM).unwrap();
        assert!((l.theta[0] - 3.461).abs() < 2e-3);
        assert!((l.theta[1] - 1.437).abs() < 2e-3);
        assert!((l.tau2.unwrap() - 0.415).abs() < 2e-3);
        // the printed 0.401 / 0.279 come from rounded PWMs; the exact values are:
        assert!((l.theta[2] - 0.397533).abs() < 1e-6);
        assert!((l.tau3 - 0.276436).abs() < 1e-6);
    }

    #[test]
    fn constant_vector_pwms() {
        let c = 2.5;
        let xs = [c; 7];
        assert!((sample_pwm(&xs, 0).unwrap() - c).abs() < 1e-15);
        assert!((sample_pwm(&xs, 1).unwrap() - c / 2.0).abs() < 1e-15);
        assert!((sample_pwm(&xs, 2).unwrap() - c / 3.0).abs() < 1e-15);
        assert!(matches!(l_moments(&xs), Err(Error::Degenerate(_))));
    }

    #[test]
    fn two_point_sample() {
        let (a, b) = (-1.25, 4.0);
        assert_eq!(sample_pwm(&[b, a], 0).unwrap(), (a + b) / 2.0);
        assert_eq!(sample_pwm(&[b, a], 1).unwrap(), b / 2.0);
        assert!(matches!(
            sample_pwm(&[a, b], 2),
            Err(Error::InsufficientSample { needed: 3, got: 2 })
        ));
    }

    #[test]
    fn symmetric_sample_has_zero_l_skewness() {
        let l = l_moments(&[-3.0, 0.0, 3.0]).unwrap();
        assert_eq!(l.theta[2], 0.0);
        assert_eq!(l.tau3, 0.0);
    }

    #[test]
    fn zero_mean_leaves_tau2_undefined() {
        let l = l_moments(&[-1.0, 0.0, 1.0]).unwrap();
        assert!(l.tau2.is_none());
    }

    #[test]
    fn uniform_l_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>()).collect();
        let l = l_moments(&xs).unwrap();
        assert!((l.theta[0] - 0.5).abs() < 2e-3);
        assert!((l.theta[1] - 1.0 / 6.0).abs() < 2e-3);
        assert!(l.tau3.abs() < 2e-3);
    }

    #[test]
    fn l_scale_nonnegative_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..10_000 {
            let n = rng.random_range(3..30);
            let xs: Vec<f64> = (0..n).map(|_| rng.random_range(-50.0..50.0)).collect();
            let l = l_moments(&xs).unwrap();
            assert!(l.theta[1] >= 0.0);
            assert!(l.tau3.abs() < 1.0);
        }
    }

    proptest! {
        #[test]
        fn affine_equivariance(
            xs in proptest::collection::vec(-100.0f64..100.0, 3..40),
            a in prop_oneof![-20.0f64..-0.05, 0.05f64..20.0],
            b in -100.0f64..100.0,
        ) {
            let Ok(base) = l_moments(&xs) else { return Ok(()) };
            let ys: Vec<f64> = xs.iter().map(|x| a * x + b).collect();
            let l = l_moments(&ys).unwrap();
            // magnitude of the transformed values bounds the rounding error
            let scale = a.abs() * 100.0 + b.abs();
            prop_assert!((l.theta[0] - (a * base.theta[0] + b)).abs() < 1e-10 * scale);
            prop_assert!((l.theta[1] - a.abs() * base.theta[1]).abs() < 1e-10 * scale);
            let tau_tol = 1e-10 * scale / (a.abs() * base.theta[1]);
            prop_assert!((l.tau3 - a.signum() * base.tau3).abs() < tau_tol);
        }

        #[test]
        fn permutation_gives_identical_output(
            xs in proptest::collection::vec(-100.0f64..100.0, 3..40),
            seed in any::<u64>(),
        ) {
            let Ok(base) = l_moments(&xs) else { return Ok(()) };
            let mut ys = xs.clone();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..ys.len()).rev() {
                let j = rng.random_range(0..=i);
                ys.swap(i, j);
            }
            prop_assert_eq!(l_moments(&ys).unwrap(), base);
        }
    }
}
