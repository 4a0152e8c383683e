// SPDX-License-Identifier: Apache-2.0

//! Per-trial bodies of the Monte Carlo campaigns. Each trial draws from its
//! own stream and returns a flat map of metrics and tags.

use std::collections::BTreeMap;

use serde::Serialize;

use super::boost::{boost, BoostParams};
use super::extraction::{audit_superset, extract, random_superset};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::linalg::{
    fraction_free_rank, rational_rank, Certainty, RankCertificate, DEFAULT_FRACTION_FREE_CAP,
};
use crate::rng::RngStream;
use crate::samplers::{gnp, random_permutation, sample_core};
use crate::stats::{empirical_pmf, tv_distance};
use crate::theory::{cw_mod, max_m, TruncPoisson};

/// Metrics and tags of one trial.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub metrics: BTreeMap<String, f64>,
    pub tags: BTreeMap<String, String>,
}

impl TrialOutcome {
    pub fn set(&mut self, name: &str, value: impl Into<f64>) {
        self.metrics.insert(name.to_owned(), value.into());
    }

    pub fn flag(&mut self, name: &str, value: bool) {
        self.set(name, if value { 1.0 } else { 0.0 });
    }

    pub fn tag(&mut self, name: &str, value: impl Into<String>) {
        self.tags.insert(name.to_owned(), value.into());
    }

    pub fn metric(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }
}

/// `G(n, lambda/n)` and the order of the core taken from it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoreParams {
    pub n: usize,
    pub lambda: f64,
    pub k: usize,
}

/// Fraction of vertices selected and the degree cut.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExtractParams {
    pub alpha: f64,
    pub delta: usize,
}

impl ExtractParams {
    fn validate(&self, k: usize) -> Result<()> {
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!(
                "alpha = {} must lie in [0, 1)",
                self.alpha
            )));
        }
        if self.delta < k {
            return Err(Error::invalid(format!(
                "delta = {} is below k = {k}",
                self.delta
            )));
        }
        Ok(())
    }
}

/// A core with its vertices relabeled by a uniform permutation, so that any
/// fixed index set is a uniformly random vertex subset.
pub fn sample_shuffled_core(p: &CoreParams, rng: &mut RngStream) -> Graph {
    let cs = sample_core(p.n, p.lambda, p.k, rng);
    let perm = random_permutation(cs.core.n(), rng);
    cs.core.relabel(&perm)
}

/// The first `floor(alpha |V|)` vertices.
pub fn selected_set(n: usize, alpha: f64) -> VertexSet {
    VertexSet::new((0..(alpha * n as f64).floor() as usize).collect())
}

fn high_degree(core: &Graph, s: &VertexSet, delta: usize) -> VertexSet {
    VertexSet::new(
        s.iter()
            .copied()
            .filter(|&v| core.degree(v) >= delta)
            .collect(),
    )
}

fn certainty_tag(c: Certainty) -> &'static str {
    match c {
        Certainty::Exact => "exact",
        Certainty::LowerBound => "lower-bound",
    }
}

/// Multi-prime rank, replaced by the fraction-free rank when the matrix is
/// small enough for it.
fn rank_with_recheck(
    g: &Graph,
    num_primes: usize,
    fraction_free_max: usize,
    rng: &mut RngStream,
) -> Result<RankCertificate> {
    let mut cert = rational_rank(g, num_primes, rng);
    if g.n() <= fraction_free_max && cert.certainty != Certainty::Exact {
        let r = fraction_free_rank(g, DEFAULT_FRACTION_FREE_CAP)?;
        cert = RankCertificate::exact(g.n(), g.n(), r, crate::linalg::RankMethod::FractionFree);
    }
    Ok(cert)
}

/// Degree statistics of the core and of `G[V \ T]` against the limiting laws
/// at the trial's own mean degree `c = 2m/|V|`.
pub fn degree_law_trial(
    cp: &CoreParams,
    ep: &ExtractParams,
    rng: &mut RngStream,
) -> Result<TrialOutcome> {
    ep.validate(cp.k)?;
    let core = sample_shuffled_core(cp, rng);
    let nv = core.n();
    let mut out = TrialOutcome::default();
    out.set("core_size", nv as f64);
    out.set("core_edges", core.m() as f64);
    out.flag("empty_core", nv == 0);
    if nv == 0 {
        return Ok(out);
    }
    let c = 2.0 * core.m() as f64 / nv as f64;
    out.set("mean_degree", c);
    let tp = TruncPoisson::for_mean_degree(cp.k, c)?;
    let q = cw_mod(&tp, ep.alpha, ep.delta, c)?;

    let degrees = core.degrees();
    out.set(
        "tv_rho",
        tv_distance(&empirical_pmf(&degrees), tp.as_dist().as_slice()),
    );

    let s = selected_set(nv, ep.alpha);
    let t = high_degree(&core, &s, ep.delta);
    let t_mask = t.mask(nv);
    let rest_deg: Vec<usize> = (0..nv)
        .map(|v| {
            core.neighbors(v)
                .iter()
                .filter(|&&w| !t_mask[w as usize])
                .count()
        })
        .collect();
    let mut outside_s = vec![0u64; q.delta.len().max(1)];
    let mut inside_s = vec![0u64; q.delta.len().max(1)];
    let mut rest = Vec::with_capacity(nv - t.len());
    for v in (0..nv).filter(|&v| !t_mask[v]) {
        let d = rest_deg[v];
        rest.push(d);
        let hist = if s.contains(v) {
            &mut inside_s
        } else {
            &mut outside_s
        };
        if d >= hist.len() {
            hist.resize(d + 1, 0);
        }
        hist[d] += 1;
    }
    let beta_hat = t.len() as f64 / nv as f64;
    out.set("t_size", t.len() as f64);
    out.set("beta_hat", beta_hat);
    out.set("beta", q.beta);
    out.set("beta_dev", (beta_hat - q.beta).abs());
    out.set(
        "tv_mu",
        tv_distance(&empirical_pmf(&rest), q.mu().as_slice()),
    );
    let max_dev = |hist: &[u64], law: &[f64]| {
        (0..hist.len().max(law.len()))
            .map(|t| {
                let h = hist.get(t).map_or(0.0, |&x| x as f64 / nv as f64);
                (h - law.get(t).copied().unwrap_or(0.0)).abs()
            })
            .fold(0.0, f64::max)
    };
    out.set("max_dev_delta", max_dev(&outside_s, &q.delta));
    out.set("max_dev_delta_prime", max_dev(&inside_s, &q.delta_prime));
    Ok(out)
}

/// Coranks of the core and of `G[V \ T]` against `|T|/8` and the limiting
/// corank densities.
pub fn corank_trial(
    cp: &CoreParams,
    ep: &ExtractParams,
    num_primes: usize,
    bls_slack: f64,
    rng: &mut RngStream,
) -> Result<TrialOutcome> {
    ep.validate(cp.k)?;
    let core = sample_shuffled_core(cp, rng);
    let nv = core.n();
    let mut out = TrialOutcome::default();
    out.set("core_size", nv as f64);
    out.flag("empty_core", nv == 0);
    if nv == 0 {
        return Ok(out);
    }
    let c = 2.0 * core.m() as f64 / nv as f64;
    let tp = TruncPoisson::for_mean_degree(cp.k, c)?;
    let q = cw_mod(&tp, ep.alpha, ep.delta, c)?;
    let max_rho = max_m(&tp.as_dist())?.1;
    let max_mu = max_m(&q.mu())?.1;

    let s = selected_set(nv, ep.alpha);
    let t = high_degree(&core, &s, ep.delta);
    let rest = core.without(&t).graph;
    let c_rest = rational_rank(&rest, num_primes, rng);
    let c_core = rational_rank(&core, num_primes, rng);
    let ratio_rest = if rest.n() == 0 {
        0.0
    } else {
        c_rest.corank() as f64 / rest.n() as f64
    };
    let ratio_core = c_core.corank() as f64 / nv as f64;

    out.set("t_size", t.len() as f64);
    out.set("corank_rest", c_rest.corank() as f64);
    out.set("corank_core", c_core.corank() as f64);
    out.set("ratio_rest", ratio_rest);
    out.set("ratio_core", ratio_core);
    out.set("max_m_rho", max_rho);
    out.set("max_m_mu", max_mu);
    out.flag("pass_t8", 8 * c_rest.corank() <= t.len());
    out.flag("pass_core_bls", ratio_core <= max_rho + bls_slack);
    out.flag("pass_rest_bls", ratio_rest <= max_mu + bls_slack);
    out.tag("certainty_rest", certainty_tag(c_rest.certainty));
    out.tag("certainty_core", certainty_tag(c_core.certainty));
    Ok(out)
}

/// Singularity of the core of `G(n, lambda/n)` next to that of the whole
/// graph `G(n, lambda_whole/n)`.
pub fn main_theorem_trial(
    cp: &CoreParams,
    lambda_whole: f64,
    num_primes: usize,
    fraction_free_max: usize,
    stream: &RngStream,
) -> Result<TrialOutcome> {
    let mut rng = stream.child(0);
    let cs = sample_core(cp.n, cp.lambda, cp.k, &mut rng);
    let mut out = TrialOutcome::default();
    out.set("n", cp.n as f64);
    out.set("core_size", cs.core.n() as f64);
    let cert = rank_with_recheck(&cs.core, num_primes, fraction_free_max, &mut rng)?;
    out.flag("core_singular", !cert.is_nonsingular());
    out.tag("certainty", certainty_tag(cert.certainty));

    let mut rng = stream.child(1);
    let p = if cp.n == 0 {
        0.0
    } else {
        (lambda_whole / cp.n as f64).min(1.0)
    };
    let g = gnp(cp.n, p, &mut rng);
    let isolated = (0..g.n()).filter(|&v| g.degree(v) == 0).count();
    out.set("whole_isolated", isolated as f64);
    let whole_singular = if isolated > 0 {
        out.tag("whole_certainty", "exact");
        true
    } else {
        let cert = rank_with_recheck(&g, num_primes, fraction_free_max, &mut rng)?;
        out.tag("whole_certainty", certainty_tag(cert.certainty));
        !cert.is_nonsingular()
    };
    out.flag("whole_singular", whole_singular);
    Ok(out)
}

/// Settings of [`boost_trial`] beyond the core and extraction parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoostTrialParams {
    pub num_primes: usize,
    pub theta: f64,
    pub eta: f64,
    pub check_goodness: bool,
    pub check_ukp: bool,
    /// Random supersets of `V \ T'` audited per trial, beyond `V \ T'`.
    pub supersets: usize,
}

/// Extraction audit plus the boosting trace on one core.
pub fn boost_trial(
    cp: &CoreParams,
    ep: &ExtractParams,
    bp: &BoostTrialParams,
    rng: &mut RngStream,
) -> Result<TrialOutcome> {
    ep.validate(cp.k)?;
    let core = sample_shuffled_core(cp, rng);
    let nv = core.n();
    let mut out = TrialOutcome::default();
    out.set("core_size", nv as f64);
    out.flag("empty_core", nv == 0);
    if nv == 0 {
        return Ok(out);
    }
    let s = selected_set(nv, ep.alpha);
    let ex = extract(&core, &s, ep.delta, cp.k)?;
    let mut audit_failures = usize::from(!audit_superset(&core, &ex, &ex.base(nv))?.holds);
    for _ in 0..bp.supersets {
        let u = random_superset(nv, &ex, rng);
        audit_failures += usize::from(!audit_superset(&core, &ex, &u)?.holds);
    }
    let deg_e_ok = ex.deg_e.iter().all(|&d| d * d >= ep.delta);

    let mut primes = Vec::with_capacity(bp.num_primes);
    while primes.len() < bp.num_primes {
        let p = crate::linalg::random_prime(rng);
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    let params = BoostParams {
        primes,
        theta: bp.theta,
        eta: bp.eta,
        check_goodness: bp.check_goodness,
        check_ukp: bp.check_ukp,
    };
    let tr = boost(&core, &ex, &params)?;

    out.set("t_size", ex.t.len() as f64);
    out.set("t_bad_size", ex.t_bad.len() as f64);
    out.set("t_low_size", ex.t_low.len() as f64);
    out.set("b_bias_size", ex.b_bias.len() as f64);
    out.set("t_prime_size", tr.t_prime_size as f64);
    out.set("x0", tr.x0 as f64);
    out.set("final_corank", tr.final_corank as f64);
    out.set("audit_failures", audit_failures as f64);
    out.flag("deg_e_ok", deg_e_ok);
    out.flag("initial_rank_ok", tr.initial_rank_ok());
    out.flag("increments_ok", tr.increments_ok());
    out.flag("success", tr.initial_rank_ok() && tr.final_corank == 0);
    let incs = tr.steps.iter().map(|s| s.increment);
    out.set("max_increment", incs.clone().max().unwrap_or(0) as f64);
    out.set("min_increment", incs.min().unwrap_or(0) as f64);
    let count = |f: &dyn Fn(&super::BoostStep) -> Option<bool>, want: bool| {
        tr.steps.iter().filter(|s| f(s) == Some(want)).count() as f64
    };
    if bp.check_goodness {
        out.set("good_steps", count(&|s| s.good, true));
    }
    if bp.check_ukp {
        out.set("ukp_pass_steps", count(&|s| s.ukp, true));
        out.set(
            "ukp_capped_steps",
            tr.steps.iter().filter(|s| s.ukp.is_none()).count() as f64,
        );
    }
    out.tag("certainty", certainty_tag(tr.certainty));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(n: usize) -> CoreParams {
        CoreParams {
            n,
            lambda: 10.0,
            k: 3,
        }
    }

    #[test]
    fn alpha_zero_reduces_to_core_law() {
        let mut rng = RngStream::new(5, 0);
        let ep = ExtractParams {
            alpha: 0.0,
            delta: 20,
        };
        let out = degree_law_trial(&cp(3000), &ep, &mut rng).unwrap();
        assert_eq!(out.metric("t_size"), Some(0.0));
        assert!((out.metric("tv_mu").unwrap() - out.metric("tv_rho").unwrap()).abs() < 1e-12);
        assert!(out.metric("tv_rho").unwrap() < 0.06);
    }

    #[test]
    fn huge_delta_leaves_t_empty() {
        let mut rng = RngStream::new(6, 0);
        let ep = ExtractParams {
            alpha: 0.2,
            delta: 60,
        };
        for _ in 0..3 {
            let out = degree_law_trial(&cp(2000), &ep, &mut rng).unwrap();
            assert_eq!(out.metric("t_size"), Some(0.0));
        }
    }

    #[test]
    fn empty_core_is_flagged() {
        let mut rng = RngStream::new(7, 0);
        let small = CoreParams {
            n: 50,
            lambda: 0.5,
            k: 3,
        };
        let ep = ExtractParams {
            alpha: 0.1,
            delta: 5,
        };
        let out = degree_law_trial(&small, &ep, &mut rng).unwrap();
        assert_eq!(out.metric("empty_core"), Some(1.0));
        let out = main_theorem_trial(&small, 2.0, 3, 64, &RngStream::new(7, 1)).unwrap();
        assert_eq!(out.metric("core_singular"), Some(0.0));
        assert_eq!(out.metric("whole_singular"), Some(1.0));
    }

    #[test]
    fn corank_and_boost_trials_run() {
        let mut rng = RngStream::new(8, 0);
        let ep = ExtractParams {
            alpha: 0.1,
            delta: 15,
        };
        let out = corank_trial(&cp(400), &ep, 3, 0.01, &mut rng).unwrap();
        assert!(out.metric("max_m_rho").unwrap() >= 0.0);
        let bp = BoostTrialParams {
            num_primes: 2,
            theta: 0.05,
            eta: 0.1,
            check_goodness: true,
            check_ukp: false,
            supersets: 5,
        };
        let out = boost_trial(&cp(400), &ep, &bp, &mut rng).unwrap();
        assert_eq!(out.metric("audit_failures"), Some(0.0));
        assert_eq!(out.metric("deg_e_ok"), Some(1.0));
        assert_eq!(out.metric("increments_ok"), Some(1.0));
    }

    #[test]
    fn trials_replay_from_their_stream() {
        let ep = ExtractParams {
            alpha: 0.1,
            delta: 15,
        };
        let a = corank_trial(&cp(300), &ep, 3, 0.01, &mut RngStream::new(9, 4)).unwrap();
        let b = corank_trial(&cp(300), &ep, 3, 0.01, &mut RngStream::new(9, 4)).unwrap();
        assert_eq!(a, b);
    }
}
