// SPDX-License-Identifier: Apache-2.0

use super::cw::{cw_mod, CwMod, TruncPoisson};
use crate::error::{Error, Result};

/// A mass function on the nonnegative integers, stored up to the index past
/// which all remaining mass is negligible.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeDist {
    pmf: Vec<f64>,
    normalized: bool,
}

impl DegreeDist {
    pub fn new(pmf: Vec<f64>) -> Self {
        DegreeDist {
            pmf,
            normalized: true,
        }
    }

    /// A nonnegative function that is not expected to sum to one.
    pub fn unnormalized(pmf: Vec<f64>) -> Self {
        DegreeDist {
            pmf,
            normalized: false,
        }
    }

    pub fn point_mass(d: usize) -> Self {
        let mut pmf = vec![0.0; d + 1];
        pmf[d] = 1.0;
        Self::new(pmf)
    }

    /// Normalizes a histogram of counts.
    pub fn from_counts(counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let scale = if total == 0 { 0.0 } else { 1.0 / total as f64 };
        Self::new(counts.iter().map(|&c| c as f64 * scale).collect())
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn get(&self, t: usize) -> f64 {
        self.pmf.get(t).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.pmf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pmf.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.pmf
    }

    pub fn total(&self) -> f64 {
        self.pmf.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(i, p)| i as f64 * p).sum()
    }

    /// Total variation distance to `other`.
    pub fn tv(&self, other: &DegreeDist) -> f64 {
        let len = self.len().max(other.len());
        0.5 * (0..len)
            .map(|t| (self.get(t) - other.get(t)).abs())
            .sum::<f64>()
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
}

/// `phi_f(x) = sum_i f(i) x^i` or its first or second derivative.
pub fn phi_eval(f: &DegreeDist, x: f64, order: u32) -> f64 {
    assert!(order <= 2, "only derivatives up to order 2 are supported");
    let o = order as usize;
    let mut sum = 0.0;
    let mut pw = 1.0;
    for (i, &fi) in f.as_slice().iter().enumerate().skip(o) {
        let falling = match o {
            0 => 1.0,
            1 => i as f64,
            _ => (i * (i - 1)) as f64,
        };
        sum += fi * falling * pw;
        pw *= x;
    }
    sum
}

struct MEval<'a> {
    f: &'a DegreeDist,
    dphi1: f64,
}

impl<'a> MEval<'a> {
    fn new(f: &'a DegreeDist) -> Result<Self> {
        let dphi1 = phi_eval(f, 1.0, 1);
        if !(dphi1 > 0.0) {
            return Err(Error::invalid("M_f needs a function with positive mean"));
        }
        Ok(MEval { f, dphi1 })
    }

    fn at(&self, x: f64) -> f64 {
        let y = 1.0 - x;
        let d = phi_eval(self.f, y, 1);
        x * d + phi_eval(self.f, y, 0) + phi_eval(self.f, 1.0 - d / self.dphi1, 0) - 1.0
    }
}

/// `M_f(x) = x phi'(1-x) + phi(1-x) + phi(1 - phi'(1-x)/phi'(1)) - 1`.
pub fn m_f(f: &DegreeDist, x: f64) -> Result<f64> {
    Ok(MEval::new(f)?.at(x))
}

/// Grid points used by [`max_m`] by default.
pub const MAX_M_GRID: usize = 10_000;

fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
    }
    if gc >= gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Maximizes `g` over `[0, 1]`: dense grid, then golden section in the
/// best cell's neighbourhood.
fn grid_golden_max(g: impl Fn(f64) -> f64, points: usize) -> (f64, f64) {
    let h = 1.0 / points as f64;
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..=points {
        let v = g(i as f64 * h);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = (best_i.saturating_sub(1)) as f64 * h;
    let b = ((best_i + 1).min(points)) as f64 * h;
    let (x, v) = golden_max(&g, a, b);
    if v > best {
        (x, v)
    } else {
        (best_i as f64 * h, best)
    }
}

/// Global maximum of `M_f` on `[0, 1]`.
pub fn max_m(f: &DegreeDist) -> Result<(f64, f64)> {
    max_m_with_grid(f, MAX_M_GRID)
}

pub fn max_m_with_grid(f: &DegreeDist, points: usize) -> Result<(f64, f64)> {
    let m = MEval::new(f)?;
    Ok(grid_golden_max(|x| m.at(x), points))
}

/// `sup_x |M_f(x) - M_g(x)|` on `[0, 1]`.
pub fn sup_m_difference(f: &DegreeDist, g: &DegreeDist) -> Result<f64> {
    let (mf, mg) = (MEval::new(f)?, MEval::new(g)?);
    Ok(grid_golden_max(|x| (mf.at(x) - mg.at(x)).abs(), MAX_M_GRID).1)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LogConcavity {
    pub passes: bool,
    /// Interior index of the first triple violating midpoint log-concavity.
    pub first_violation: Option<usize>,
    /// Largest `log g[i-1] + log g[i+1] - 2 log g[i]` seen.
    pub worst_excess: f64,
}

/// Midpoint log-concavity of uniformly spaced positive samples.
pub fn log_concavity_check(samples: &[f64], tol: f64) -> Result<LogConcavity> {
    if let Some(i) = samples.iter().position(|&s| !(s > 0.0)) {
        return Err(Error::invalid(format!("sample {i} is not positive")));
    }
    let logs: Vec<f64> = samples.iter().map(|s| s.ln()).collect();
    let scale = 1.0 + logs.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let mut first = None;
    let mut worst = f64::NEG_INFINITY;
    for i in 1..logs.len().saturating_sub(1) {
        let excess = logs[i - 1] + logs[i + 1] - 2.0 * logs[i];
        worst = worst.max(excess);
        if first.is_none() && excess > tol * scale {
            first = Some(i);
        }
    }
    Ok(LogConcavity {
        passes: first.is_none(),
        first_violation: first,
        worst_excess: worst,
    })
}

/// `tilde_mu(t) = (t + 1) mu(t + 1) / mean(mu)`.
pub fn size_biased(mu: &DegreeDist) -> Result<DegreeDist> {
    let mean = mu.mean();
    if !(mean > 0.0) {
        return Err(Error::invalid("size-biasing needs positive mean"));
    }
    Ok(DegreeDist::new(
        (0..mu.len().saturating_sub(1))
            .map(|t| (t + 1) as f64 * mu.get(t + 1) / mean)
            .collect(),
    ))
}

/// Numeric verdicts on the corank functional of the modified core law.
#[derive(Clone, Debug)]
pub struct RankAnalysis {
    pub delta_cut: usize,
    pub beta: f64,
    pub gamma: f64,
    pub m_mu_at_0: f64,
    /// `phi_mu(1) + mu(0) - 1`, which must equal `m_mu_at_0`.
    pub m_mu_at_0_identity: f64,
    pub argmax: f64,
    pub sup_m_mu: f64,
    pub sup_m_diff: f64,
    pub log_concave: LogConcavity,
}

impl RankAnalysis {
    pub fn m0_vanishes(&self, tol: f64) -> bool {
        self.m_mu_at_0.abs() <= tol
    }

    pub fn sup_within_beta_16(&self) -> bool {
        self.sup_m_mu <= self.beta / 16.0
    }

    pub fn diff_within_beta_32(&self) -> bool {
        self.sup_m_diff <= self.beta / 32.0
    }

    pub fn all_hold(&self, m0_tol: f64) -> bool {
        self.m0_vanishes(m0_tol)
            && self.sup_within_beta_16()
            && self.diff_within_beta_32()
            && self.log_concave.passes
    }
}

/// Samples `phi_nu''` on a uniform grid of `[0, 1]`.
///
/// `phi_nu(x)` is a positive multiple of the rescaled series `phi(y)` at
/// `y = (1 - gamma) lambda x`, so this grid is also a uniform grid for
/// `phi''` on `[0, (1 - gamma) lambda]` and the log-concavity verdicts agree.
pub fn nu_second_derivative_samples(q: &CwMod, points: usize) -> Vec<f64> {
    let nu = q.nu();
    (0..=points)
        .map(|i| phi_eval(&nu, i as f64 / points as f64, 2))
        .collect()
}

pub fn rank_analysis(k: usize, c: f64, alpha: f64, delta_cut: usize) -> Result<RankAnalysis> {
    let tp = TruncPoisson::for_mean_degree(k, c)?;
    let q = cw_mod(&tp, alpha, delta_cut, c)?;
    let mu = q.mu();
    let nu = q.nu();
    let (argmax, sup_m_mu) = max_m(&mu)?;
    let m_mu_at_0 = m_f(&mu, 0.0)?;
    let m_mu_at_0_identity = phi_eval(&mu, 1.0, 0) + mu.get(0) - 1.0;
    let sup_m_diff = sup_m_difference(&mu, &nu)?;
    let log_concave = log_concavity_check(&nu_second_derivative_samples(&q, 2000), 1e-9)?;
    Ok(RankAnalysis {
        delta_cut,
        beta: q.beta,
        gamma: q.gamma,
        m_mu_at_0,
        m_mu_at_0_identity,
        argmax,
        sup_m_mu,
        sup_m_diff,
        log_concave,
    })
}

/// Smallest extraction threshold from which every verdict holds up to the
/// largest threshold still resolvable in double precision.
#[derive(Clone, Debug)]
pub struct DeltaStar {
    pub delta_star: Option<usize>,
    /// Largest threshold with `beta >= BETA_FLOOR`.
    pub delta_max: usize,
    pub table: Vec<RankAnalysis>,
}

/// Below this `beta` the comparisons against `beta/16` sit at rounding level.
pub const BETA_FLOOR: f64 = 1e-12;

pub fn delta_star(
    k: usize,
    c: f64,
    alpha: f64,
    max_delta: usize,
    m0_tol: f64,
) -> Result<DeltaStar> {
    let mut table = Vec::new();
    for d in k.max(3)..=max_delta {
        let ra = rank_analysis(k, c, alpha, d)?;
        if ra.beta < BETA_FLOOR {
            break;
        }
        table.push(ra);
    }
    let delta_max = table.last().map_or(k, |r| r.delta_cut);
    let mut delta_star = None;
    for ra in table.iter().rev() {
        if ra.all_hold(m0_tol) {
            delta_star = Some(ra.delta_cut);
        } else {
            break;
        }
    }
    Ok(DeltaStar {
        delta_star,
        delta_max,
        table,
    })
}
