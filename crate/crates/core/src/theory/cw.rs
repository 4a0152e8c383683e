// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

use super::{DegreeDist, SERIES_TOL};
use crate::error::{Error, Result};

/// `sum_{t >= from} lam^t / t!`, summed upward from its first term.
pub(crate) fn exp_tail(lam: f64, from: usize) -> f64 {
    let mut term = first_term(lam, from);
    let mut sum = 0.0;
    let mut t = from;
    loop {
        sum += term;
        let ratio = lam / (t + 1) as f64;
        term *= ratio;
        t += 1;
        // remaining tail <= term / (1 - ratio) once ratio < 1
        if ratio < 0.5 && term <= f64::EPSILON * 1e-3 * sum {
            break;
        }
        if term == 0.0 {
            break;
        }
    }
    sum
}

/// `lam^t / t!` without overflow for moderate `t`.
pub(crate) fn first_term(lam: f64, t: usize) -> f64 {
    if t == 0 {
        return 1.0;
    }
    if lam == 0.0 {
        return 0.0;
    }
    let ln = t as f64 * lam.ln() - ln_factorial(t);
    ln.exp()
}

pub(crate) fn ln_factorial(t: usize) -> f64 {
    statrs::function::gamma::ln_gamma(t as f64 + 1.0)
}

/// `lam Z_k'(lam) / Z_k(lam)`, the mean of the truncated Poisson law.
fn mean_of(k: usize, lam: f64) -> f64 {
    lam * exp_tail(lam, k - 1) / exp_tail(lam, k)
}

/// Solves `lam Z_k'(lam) / Z_k(lam) = c` for `lam` by bisection.
pub fn solve_lambda(k: usize, c: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    if !(c > k as f64) || !c.is_finite() {
        return Err(Error::invalid(format!(
            "mean degree {c} must exceed k = {k}"
        )));
    }
    let mut hi = c.max(1.0);
    while mean_of(k, hi) < c {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mean_of(k, mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rl, rh) = ((mean_of(k, lo) - c).abs(), (mean_of(k, hi) - c).abs());
    let lam = if rl <= rh { lo } else { hi };
    if lam == 0.0 {
        return Err(Error::invalid(format!(
            "mean degree {c} too close to k = {k}"
        )));
    }
    Ok(lam)
}

/// Poisson(`lambda`) conditioned on being at least `k`.
#[derive(Clone, Debug)]
pub struct TruncPoisson {
    pub k: usize,
    pub lambda: f64,
    /// `Z_k(lambda)`.
    pub z: f64,
    /// `rho_t` for `t < pmf.len()`; zero below `k`.
    pmf: Vec<f64>,
}

impl TruncPoisson {
    pub fn new(k: usize, lambda: f64) -> Result<Self> {
        if k == 0 || !(lambda > 0.0) || !lambda.is_finite() || lambda > 500.0 {
            return Err(Error::invalid(format!(
                "bad truncated Poisson parameters k = {k}, lambda = {lambda}"
            )));
        }
        let z = exp_tail(lambda, k);
        let mut pmf = vec![0.0; k];
        let mut term = first_term(lambda, k) / z;
        let mut t = k;
        let mut mass = 0.0;
        loop {
            pmf.push(term);
            mass += term;
            let ratio = lambda / (t + 1) as f64;
            if ratio < 0.5 && term * ratio / (1.0 - ratio) < SERIES_TOL {
                break;
            }
            term *= ratio;
            t += 1;
        }
        debug_assert!((mass - 1.0).abs() < 1e-12);
        Ok(TruncPoisson { k, lambda, z, pmf })
    }

    /// The law whose mean is `c`.
    pub fn for_mean_degree(k: usize, c: f64) -> Result<Self> {
        Self::new(k, solve_lambda(k, c)?)
    }

    pub fn rho(&self, t: usize) -> f64 {
        self.pmf.get(t).copied().unwrap_or(0.0)
    }

    /// Index past which all masses are negligible.
    pub fn support_end(&self) -> usize {
        self.pmf.len()
    }

    pub fn mean(&self) -> f64 {
        mean_of(self.k, self.lambda)
    }

    pub fn as_dist(&self) -> DegreeDist {
        DegreeDist::new(self.pmf.clone())
    }

    pub fn cdf_table(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.pmf
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect()
    }

    pub fn sample_with<R: Rng + ?Sized>(&self, cdf: &[f64], rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
        cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
    }
}

/// Degree-law quantities after removing the vertices of degree at least
/// `delta_cut` from a random `alpha` fraction.
#[derive(Clone, Debug)]
pub struct CwMod {
    pub k: usize,
    pub lambda: f64,
    pub z: f64,
    pub alpha: f64,
    pub delta_cut: usize,
    pub beta: f64,
    /// Fraction of half-edges owned by removed vertices.
    pub gamma: f64,
    /// The same quantity through `Z_k'`; agrees with `gamma` to rounding.
    pub gamma_alt: f64,
    /// `delta[t]`: mass of untouched-side vertices left with degree `t`.
    pub delta: Vec<f64>,
    /// `delta_prime[t]`: mass of selected low-degree vertices left with
    /// degree `t`.
    pub delta_prime: Vec<f64>,
}

impl CwMod {
    /// `P(Binomial(j, 1 - gamma) = t)`.
    pub fn zeta(&self, j: usize, t: usize) -> f64 {
        zeta(self.gamma, j, t)
    }

    pub fn mu(&self) -> DegreeDist {
        let scale = 1.0 / (1.0 - self.beta);
        DegreeDist::new(
            self.delta
                .iter()
                .zip(&self.delta_prime)
                .map(|(a, b)| (a + b) * scale)
                .collect(),
        )
    }

    /// The unnormalized comparison function `nu`.
    pub fn nu(&self) -> DegreeDist {
        let (k, d, a, g, lam) = (self.k, self.delta_cut, self.alpha, self.gamma, self.lambda);
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        let len = self.delta.len().max(k + 2);
        let pmf = (0..len)
            .map(|t| {
                let head = ((1.0 - g) * lam).powi(t as i32) * (-ln_factorial(t)).exp()
                    / ((1.0 - self.beta) * self.z);
                let w = (ind(t >= k) - a * ind(t >= d))
                    + g * lam * (ind(t + 1 >= k) - a * ind(t + 1 >= d));
                head * w
            })
            .collect();
        DegreeDist::unnormalized(pmf)
    }
}

pub(crate) fn zeta(gamma: f64, j: usize, t: usize) -> f64 {
    if t > j {
        return 0.0;
    }
    let ln_binom = ln_factorial(j) - ln_factorial(t) - ln_factorial(j - t);
    ln_binom.exp() * gamma.powi((j - t) as i32) * (1.0 - gamma).powi(t as i32)
}

/// Evaluates the modified degree-law quantities.
pub fn cw_mod(tp: &TruncPoisson, alpha: f64, delta_cut: usize, c: f64) -> Result<CwMod> {
    let k = tp.k;
    if k < 3 || delta_cut < k {
        return Err(Error::invalid(format!(
            "need delta_cut >= k >= 3, got k = {k}, delta_cut = {delta_cut}"
        )));
    }
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::invalid(format!(
            "alpha = {alpha} must lie in [0, 1)"
        )));
    }
    if !(c > 0.0) {
        return Err(Error::invalid("mean degree must be positive"));
    }
    let end = tp.support_end();
    let beta = alpha * (delta_cut..end).map(|t| tp.rho(t)).sum::<f64>();
    let gamma = alpha / c * (delta_cut..end).map(|t| t as f64 * tp.rho(t)).sum::<f64>();
    let gamma_alt = alpha / exp_tail(tp.lambda, k - 1) * exp_tail(tp.lambda, delta_cut - 1);
    let mut delta = vec![0.0; end];
    let mut delta_prime = vec![0.0; end];
    for j in k..end {
        let rj = tp.rho(j);
        for t in 0..=j {
            let z = zeta(gamma, j, t);
            delta[t] += (1.0 - alpha) * rj * z;
            if j < delta_cut {
                delta_prime[t] += alpha * rj * z;
            }
        }
    }
    Ok(CwMod {
        k,
        lambda: tp.lambda,
        z: tp.z,
        alpha,
        delta_cut,
        beta,
        gamma,
        gamma_alt,
        delta,
        delta_prime,
    })
}
