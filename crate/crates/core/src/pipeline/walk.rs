// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{wilson, Proportion};

/// Confidence level of the reported interval on `Pr(X_n != 0)`.
pub const WALK_CONFIDENCE: f64 = 0.99;

/// A time-homogeneous nonnegative integer walk that drifts towards zero.
///
/// From `x > 0`: up one with probability `up`, stay with probability
/// `stay`, otherwise drop by `drop` (floored at zero). From zero: up one with
/// probability `up_zero`, otherwise stay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WalkSpec {
    pub p: f64,
    pub up: f64,
    pub stay: f64,
    pub drop: u32,
    pub up_zero: f64,
}

impl WalkSpec {
    /// Rises with probability exactly `p` whenever it may, otherwise steps
    /// down by one.
    pub fn adversarial(p: f64) -> Self {
        WalkSpec {
            p,
            up: p,
            stay: 0.0,
            drop: 1,
            up_zero: p,
        }
    }

    /// Checks the drift hypotheses against `p`.
    pub fn validate(&self) -> Result<()> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.p) || !unit(self.up) || !unit(self.stay) || !unit(self.up_zero) {
            return Err(Error::invalid("walk probabilities must lie in [0, 1]"));
        }
        if self.drop == 0 {
            return Err(Error::invalid("drop must be at least 1"));
        }
        if self.up + self.stay > self.p + 1e-15 || self.up_zero > self.p + 1e-15 {
            return Err(Error::invalid(format!(
                "a non-decrease has probability above p = {}",
                self.p
            )));
        }
        Ok(())
    }

    fn step<R: Rng + ?Sized>(&self, x: u32, rng: &mut R) -> u32 {
        let u: f64 = rng.random();
        if x == 0 {
            return (u < self.up_zero) as u32;
        }
        if u < self.up {
            x + 1
        } else if u < self.up + self.stay {
            x
        } else {
            x.saturating_sub(self.drop)
        }
    }

    /// `(next state, probability)` pairs from `x`.
    fn kernel(&self, x: u32) -> Vec<(u32, f64)> {
        if x == 0 {
            return vec![(1, self.up_zero), (0, 1.0 - self.up_zero)];
        }
        vec![
            (x + 1, self.up),
            (x, self.stay),
            (x.saturating_sub(self.drop), 1.0 - self.up - self.stay),
        ]
    }
}

/// The supermartingale-type inequality at one visited state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateAudit {
    pub x: u32,
    pub visits: u64,
    pub y: f64,
    /// Exact `E[Y_{t+1} | X_t = x]` under the spec.
    pub conditional_mean: f64,
    /// Sample mean of `Y_{t+1}` over the visits.
    pub empirical_mean: f64,
    /// `2 sqrt(p) Y_t + 2 sqrt(p)`.
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkReport {
    pub spec: WalkSpec,
    pub n_steps: usize,
    pub x0: u32,
    pub trials: u64,
    pub nonzero_final: u64,
    pub nonzero: Proportion,
    /// `min(1, 1000 p)`.
    pub bound: f64,
    /// `9 p`, which the argument gives directly for fewer than ten steps.
    pub refined_bound: f64,
    /// Steps checked against the inequality for `Y_t`; zero when `p = 0`.
    pub audited_steps: u64,
    pub audit_violations: u64,
    pub states: Vec<StateAudit>,
}

impl WalkReport {
    pub fn within_bound(&self) -> bool {
        self.nonzero.estimate <= self.bound
    }
}

/// Simulates `trials` walks of `n_steps` steps from `x0` and audits
/// `Y_t = (1/sqrt p)^{X_t} - 1` at every step taken.
pub fn random_walk_sim<R: Rng + ?Sized>(
    spec: &WalkSpec,
    n_steps: usize,
    x0: u32,
    trials: u64,
    rng: &mut R,
) -> Result<WalkReport> {
    spec.validate()?;
    if 2 * x0 as usize > n_steps {
        return Err(Error::invalid(format!(
            "X_0 = {x0} exceeds n / 2 = {}",
            n_steps / 2
        )));
    }
    let audit = spec.p > 0.0;
    let q = if audit { 1.0 / spec.p.sqrt() } else { 0.0 };
    let y = |x: u32| q.powi(x as i32) - 1.0;
    // state -> (visits, sum of Y_{t+1})
    let mut visits: BTreeMap<u32, (u64, f64)> = BTreeMap::new();
    let mut nonzero_final = 0u64;
    for _ in 0..trials {
        let mut x = x0;
        for _ in 0..n_steps {
            let next = spec.step(x, rng);
            if audit {
                let e = visits.entry(x).or_insert((0, 0.0));
                e.0 += 1;
                e.1 += y(next);
            }
            x = next;
        }
        nonzero_final += (x != 0) as u64;
    }

    let sp = spec.p.sqrt();
    let mut states = Vec::with_capacity(visits.len());
    let (mut audited, mut violations) = (0u64, 0u64);
    for (&x, &(count, sum)) in &visits {
        let yx = y(x);
        let conditional_mean: f64 = spec.kernel(x).iter().map(|&(z, pr)| pr * y(z)).sum();
        let bound = 2.0 * sp * yx + 2.0 * sp;
        let holds = conditional_mean <= bound * (1.0 + 1e-12);
        audited += count;
        if !holds {
            violations += count;
        }
        states.push(StateAudit {
            x,
            visits: count,
            y: yx,
            conditional_mean,
            empirical_mean: sum / count as f64,
            bound,
            holds,
        });
    }
    Ok(WalkReport {
        spec: *spec,
        n_steps,
        x0,
        trials,
        nonzero_final,
        nonzero: wilson(nonzero_final, trials, WALK_CONFIDENCE),
        bound: (1000.0 * spec.p).min(1.0),
        refined_bound: 9.0 * spec.p,
        audited_steps: audited,
        audit_violations: violations,
        states,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn zero_p_always_ends_at_zero() {
        let mut rng = RngStream::new(1, 0);
        let r = random_walk_sim(&WalkSpec::adversarial(0.0), 40, 20, 200, &mut rng).unwrap();
        assert_eq!(r.nonzero_final, 0);
        assert_eq!(r.audited_steps, 0);
    }

    #[test]
    fn starting_at_zero_stays_often() {
        let mut rng = RngStream::new(2, 0);
        let p = 0.01;
        let n = 50;
        let r = random_walk_sim(&WalkSpec::adversarial(p), n, 0, 20_000, &mut rng).unwrap();
        let floor = (1.0 - p).powi(n as i32);
        assert!(r.nonzero.ci_lo <= 1.0 - floor);
        assert_eq!(r.audit_violations, 0);
    }

    #[test]
    fn exact_conditional_mean_of_adversary() {
        // from x > 0: E[Y'] = (Y + 1) sqrt(p) (2 - p) - 1
        let mut rng = RngStream::new(3, 0);
        let p = 1e-2;
        let r = random_walk_sim(&WalkSpec::adversarial(p), 20, 10, 100, &mut rng).unwrap();
        for s in r.states.iter().filter(|s| s.x > 0) {
            let expect = (s.y + 1.0) * p.sqrt() * (2.0 - p) - 1.0;
            assert!((s.conditional_mean - expect).abs() <= 1e-9 * expect.abs().max(1.0));
            assert!(s.holds);
        }
    }

    #[test]
    fn rejects_hypothesis_violations() {
        let mut rng = RngStream::new(4, 0);
        let mut s = WalkSpec::adversarial(0.01);
        assert!(random_walk_sim(&s, 10, 6, 1, &mut rng).is_err());
        s.stay = 0.01;
        assert!(s.validate().is_err());
        s.stay = 0.0;
        s.drop = 0;
        assert!(s.validate().is_err());
        s.drop = 3;
        assert!(s.validate().is_ok());
    }
}
