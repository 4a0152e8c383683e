// SPDX-License-Identifier: Apache-2.0

//! Binomial intervals and goodness-of-fit helpers shared by the experiments.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Two-sided standard normal quantile for the given confidence level.
pub fn normal_quantile(confidence: f64) -> f64 {
    assert!(confidence > 0.0 && confidence < 1.0);
    Normal::new(0.0, 1.0)
        .expect("standard normal")
        .inverse_cdf(0.5 + confidence / 2.0)
}

/// A proportion with its Wilson score interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proportion {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub confidence: f64,
}

impl Proportion {
    pub fn contains(&self, p: f64) -> bool {
        self.ci_lo <= p && p <= self.ci_hi
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson(successes: u64, trials: u64, confidence: f64) -> Proportion {
    assert!(successes <= trials);
    if trials == 0 {
        return Proportion {
            successes,
            trials,
            estimate: f64::NAN,
            ci_lo: 0.0,
            ci_hi: 1.0,
            confidence,
        };
    }
    let z = normal_quantile(confidence);
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Proportion {
        successes,
        trials,
        estimate: p,
        ci_lo: (center - half).max(0.0),
        ci_hi: (center + half).min(1.0),
        confidence,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of observed counts against expected counts.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> ChiSquareTest {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() >= 2);
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let df = observed.len() - 1;
    let p_value = ChiSquared::new(df as f64).expect("df > 0").sf(statistic);
    ChiSquareTest {
        statistic,
        df,
        p_value,
    }
}

/// Chi-square test of counts against the uniform law on their cells.
pub fn chi_square_uniform(observed: &[u64]) -> ChiSquareTest {
    let total: u64 = observed.iter().sum();
    let e = total as f64 / observed.len() as f64;
    chi_square(observed, &vec![e; observed.len()])
}

/// Total variation distance between two mass functions on `0..`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let len = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..len).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

/// Empirical mass function of nonnegative integer samples.
pub fn empirical_pmf(samples: &[usize]) -> Vec<f64> {
    let Some(&max) = samples.iter().max() else {
        return Vec::new();
    };
    let mut counts = vec![0usize; max + 1];
    for &s in samples {
        counts[s] += 1;
    }
    let n = samples.len() as f64;
    counts.into_iter().map(|c| c as f64 / n).collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // 95% interval for 10/100 from the closed form
        let p = wilson(10, 100, 0.95);
        assert!((p.ci_lo - 0.05522).abs() < 1e-4, "{}", p.ci_lo);
        assert!((p.ci_hi - 0.17437).abs() < 1e-4, "{}", p.ci_hi);
        let zero = wilson(0, 50, 0.99);
        assert_eq!(zero.ci_lo, 0.0);
        assert!(zero.ci_hi > 0.0 && zero.ci_hi < 0.15);
        let all = wilson(50, 50, 0.99);
        assert_eq!(all.ci_hi, 1.0);
    }

    #[test]
    fn quantiles() {
        assert!((normal_quantile(0.95) - 1.959964).abs() < 1e-5);
        assert!((normal_quantile(0.99) - 2.575829).abs() < 1e-5);
    }

    #[test]
    fn chi_square_on_perfect_fit() {
        let t = chi_square_uniform(&[100, 100, 100, 100]);
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.df, 3);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        // chi2 with 1 df at 3.841 has upper tail 0.05
        let t = chi_square(&[0, 0], &[1.0, 1.0]);
        assert!((t.statistic - 2.0).abs() < 1e-12);
        let t = ChiSquared::new(1.0).unwrap().sf(3.841458820694124);
        assert!((t - 0.05).abs() < 1e-9);
    }

    #[test]
    fn tv_of_disjoint_supports() {
        assert_eq!(tv_distance(&[1.0], &[0.0, 1.0]), 1.0);
        assert_eq!(tv_distance(&[0.5, 0.5], &[0.5, 0.5]), 0.0);
        assert_eq!(empirical_pmf(&[0, 2, 2, 2]), vec![0.25, 0.0, 0.75]);
    }
}
