//! Monte-Carlo summaries: Wilson score intervals and a chi-squared uniformity test.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Estimated probability of an event with its 95% Wilson interval.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub successes: u64,
    pub trials: u64,
    pub seed: u64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64, seed: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials);
        let estimate = if trials == 0 {
            0.0
        } else {
            successes as f64 / trials as f64
        };
        Estimate {
            estimate,
            ci_low,
            ci_high,
            successes,
            trials,
            seed,
        }
    }
}

/// Wilson score interval at 95%, clamped to [0, 1].
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquaredResult {
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
}

/// Pearson chi-squared goodness of fit against the uniform distribution on the bins.
pub fn chi_squared_uniform(counts: &[u64]) -> ChiSquaredResult {
    assert!(counts.len() >= 2, "need at least two bins");
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum::<f64>();
    let dof = counts.len() as u64 - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    ChiSquaredResult {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    }
}

/// Pearson chi-squared against arbitrary expected proportions.
pub fn chi_squared_expected(counts: &[u64], weights: &[f64]) -> ChiSquaredResult {
    assert_eq!(counts.len(), weights.len());
    assert!(counts.len() >= 2, "need at least two bins");
    let total: u64 = counts.iter().sum();
    let wsum: f64 = weights.iter().sum();
    let statistic = counts
        .iter()
        .zip(weights)
        .map(|(&c, &w)| {
            let e = total as f64 * w / wsum;
            let d = c as f64 - e;
            d * d / e
        })
        .sum::<f64>();
    let dof = counts.len() as u64 - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    ChiSquaredResult {
        statistic,
        dof,
        p_value: dist.sf(statistic),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_basic() {
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
        let (lo, hi) = wilson_interval(0, 20);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.1 && hi < 0.2);
        let (lo, hi) = wilson_interval(20, 20);
        assert!(lo > 0.8 && hi == 1.0);
    }

    #[test]
    fn chi_squared_uniform_extremes() {
        assert!(chi_squared_uniform(&[100, 100, 100, 100]).p_value > 0.99);
        assert!(chi_squared_uniform(&[400, 0, 0, 0]).p_value < 1e-10);
        let r = chi_squared_expected(&[50, 150], &[1.0, 3.0]);
        assert!(r.statistic.abs() < 1e-12);
    }
}
