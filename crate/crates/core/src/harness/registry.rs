// SPDX-License-Identifier: Apache-2.0

//! The named experiments: their configuration schema, trial bodies and
//! acceptance verdicts.

use serde::Serialize;

use super::config::ExperimentConfig;
use super::summary::{flag_rate, group_by_x, Summary};
use super::TrialRecord;
use crate::error::{Error, Result};
use crate::pipeline::{
    boost_trial, corank_trial, degree_law_trial, main_theorem_trial, random_walk_sim,
    BoostTrialParams, CoreParams, ExtractParams, TrialOutcome, WalkSpec,
};
use crate::rng::RngStream;

/// Every registered experiment name.
pub const EXPERIMENTS: [&str; 5] = [
    "degree-law",
    "corank",
    "main-theorem",
    "boost",
    "random-walk",
];

const COMMON: &[(&str, Option<&str>)] = &[
    ("experiment.name", None),
    ("experiment.seed", None),
    ("experiment.trials", None),
];

const GRAPH: &[(&str, Option<&str>)] = &[
    ("graph.n", Some("2000")),
    ("graph.lambda", Some("10")),
    ("graph.k", Some("3")),
];

fn schema(name: &str) -> Result<Vec<(&'static str, Option<&'static str>)>> {
    let extra: &[(&str, Option<&str>)] = match name {
        "degree-law" => &[
            ("graph.n", Some("100000")),
            ("graph.lambda", Some("10")),
            ("graph.k", Some("3")),
            ("extraction.alpha", Some("0.1")),
            ("extraction.delta", Some("20")),
            ("acceptance.tv_max", Some("0.02")),
            ("acceptance.min_pass_fraction", Some("0.96")),
        ],
        "corank" => &[
            ("extraction.alpha", Some("0.1")),
            ("extraction.delta", Some("20")),
            ("rank.primes", Some("3")),
            ("acceptance.bls_slack", Some("0.01")),
            ("acceptance.min_pass_fraction", Some("0.95")),
        ],
        "main-theorem" => &[
            ("graph.n", Some("500,1000,2000")),
            ("graph.lambda", Some("10")),
            ("graph.k", Some("3")),
            ("graph.lambda_whole", Some("2")),
            ("rank.primes", Some("3")),
            ("rank.fraction_free_max", Some("64")),
            ("acceptance.min_separation", Some("0.5")),
            ("acceptance.min_whole_singular", Some("0.95")),
        ],
        "boost" => &[
            ("extraction.alpha", Some("0.1")),
            ("extraction.delta", Some("15")),
            ("extraction.supersets", Some("20")),
            ("rank.primes", Some("3")),
            ("structure.theta", Some("0.05")),
            ("structure.eta", Some("0.1")),
            ("structure.check_goodness", Some("true")),
            ("structure.check_ukp", Some("false")),
            ("acceptance.min_success", Some("0.9")),
        ],
        "random-walk" => &[
            ("walk.p", Some("0.001,0.01")),
            ("walk.steps", Some("100")),
            ("walk.x0", Some("50")),
            ("walk.walks", Some("100000")),
        ],
        other => return Err(Error::UnknownExperiment(other.to_owned())),
    };
    let mut out: Vec<_> = COMMON.to_vec();
    let uses_graph = name != "random-walk";
    for &(k, d) in GRAPH.iter().filter(|_| uses_graph) {
        if !extra.iter().any(|&(e, _)| e == k) {
            out.push((k, d));
        }
    }
    out.extend_from_slice(extra);
    Ok(out)
}

/// Checks the keys of `cfg` against its experiment's schema and fills in
/// defaults, so that equivalent configurations hash alike.
pub fn normalize(cfg: &ExperimentConfig) -> Result<ExperimentConfig> {
    let name = cfg.name()?;
    let schema = schema(name)?;
    if let Some(k) = cfg.keys().find(|k| !schema.iter().any(|&(s, _)| s == *k)) {
        return Err(Error::invalid(format!(
            "unknown key `{k}` for experiment `{name}`"
        )));
    }
    let mut out = cfg.clone();
    for &(k, default) in &schema {
        if out.get(k).is_none() {
            match default {
                Some(d) => out.set(k, d),
                None => return Err(Error::invalid(format!("missing `{k}`"))),
            }
        }
    }
    Plan::from_config(&out)?;
    Ok(out)
}

/// A validated configuration, ready to run.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum Plan {
    DegreeLaw {
        core: CoreParams,
        extract: ExtractParams,
        tv_max: f64,
        min_pass_fraction: f64,
    },
    Corank {
        core: CoreParams,
        extract: ExtractParams,
        primes: usize,
        bls_slack: f64,
        min_pass_fraction: f64,
    },
    MainTheorem {
        ns: Vec<usize>,
        lambda: f64,
        k: usize,
        lambda_whole: f64,
        primes: usize,
        fraction_free_max: usize,
        min_separation: f64,
        min_whole_singular: f64,
    },
    Boost {
        core: CoreParams,
        extract: ExtractParams,
        params: BoostTrialParams,
        min_success: f64,
    },
    RandomWalk {
        ps: Vec<f64>,
        steps: usize,
        x0: u32,
        walks: u64,
    },
}

fn positive<T: PartialOrd + Default + std::fmt::Display + Copy>(key: &str, x: T) -> Result<T> {
    if x > T::default() {
        Ok(x)
    } else {
        Err(Error::invalid(format!("`{key}` = {x} must be positive")))
    }
}

fn fraction(key: &str, x: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(Error::invalid(format!("`{key}` = {x} must lie in [0, 1]")))
    }
}

impl Plan {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Plan> {
        let name = cfg.name()?;
        let core = || -> Result<CoreParams> {
            let k = cfg.parsed("graph.k")?;
            if k < 3 {
                return Err(Error::invalid(format!(
                    "`graph.k` = {k} must be at least 3"
                )));
            }
            Ok(CoreParams {
                n: cfg.parsed("graph.n")?,
                lambda: positive("graph.lambda", cfg.parsed("graph.lambda")?)?,
                k,
            })
        };
        let extract = |k: usize| -> Result<ExtractParams> {
            let alpha: f64 = cfg.parsed("extraction.alpha")?;
            let delta: usize = cfg.parsed("extraction.delta")?;
            if !(0.0..1.0).contains(&alpha) {
                return Err(Error::invalid(format!(
                    "`extraction.alpha` = {alpha} must lie in [0, 1)"
                )));
            }
            if delta < k {
                return Err(Error::invalid(format!(
                    "`extraction.delta` = {delta} is below k = {k}"
                )));
            }
            Ok(ExtractParams { alpha, delta })
        };
        let primes = || positive("rank.primes", cfg.parsed::<usize>("rank.primes")?);
        Ok(match name {
            "degree-law" => {
                let core = core()?;
                Plan::DegreeLaw {
                    core,
                    extract: extract(core.k)?,
                    tv_max: cfg.parsed("acceptance.tv_max")?,
                    min_pass_fraction: fraction(
                        "acceptance.min_pass_fraction",
                        cfg.parsed("acceptance.min_pass_fraction")?,
                    )?,
                }
            }
            "corank" => {
                let core = core()?;
                Plan::Corank {
                    core,
                    extract: extract(core.k)?,
                    primes: primes()?,
                    bls_slack: cfg.parsed("acceptance.bls_slack")?,
                    min_pass_fraction: fraction(
                        "acceptance.min_pass_fraction",
                        cfg.parsed("acceptance.min_pass_fraction")?,
                    )?,
                }
            }
            "main-theorem" => {
                let k: usize = cfg.parsed("graph.k")?;
                if k < 3 {
                    return Err(Error::invalid(format!(
                        "`graph.k` = {k} must be at least 3"
                    )));
                }
                let ns: Vec<usize> = cfg.parsed_list("graph.n")?;
                if ns.is_empty() || ns.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::invalid(
                        "`graph.n` must be a strictly increasing list",
                    ));
                }
                Plan::MainTheorem {
                    ns,
                    lambda: positive("graph.lambda", cfg.parsed("graph.lambda")?)?,
                    k,
                    lambda_whole: positive(
                        "graph.lambda_whole",
                        cfg.parsed("graph.lambda_whole")?,
                    )?,
                    primes: primes()?,
                    fraction_free_max: cfg.parsed("rank.fraction_free_max")?,
                    min_separation: cfg.parsed("acceptance.min_separation")?,
                    min_whole_singular: fraction(
                        "acceptance.min_whole_singular",
                        cfg.parsed("acceptance.min_whole_singular")?,
                    )?,
                }
            }
            "boost" => {
                let core = core()?;
                let theta: f64 = cfg.parsed("structure.theta")?;
                let eta: f64 = cfg.parsed("structure.eta")?;
                for (key, x) in [("structure.theta", theta), ("structure.eta", eta)] {
                    if !(x > 0.0 && x < 1.0) {
                        return Err(Error::invalid(format!("`{key}` = {x} must lie in (0, 1)")));
                    }
                }
                Plan::Boost {
                    core,
                    extract: extract(core.k)?,
                    params: BoostTrialParams {
                        num_primes: primes()?,
                        theta,
                        eta,
                        check_goodness: cfg.parsed("structure.check_goodness")?,
                        check_ukp: cfg.parsed("structure.check_ukp")?,
                        supersets: cfg.parsed("extraction.supersets")?,
                    },
                    min_success: fraction(
                        "acceptance.min_success",
                        cfg.parsed("acceptance.min_success")?,
                    )?,
                }
            }
            "random-walk" => {
                let ps: Vec<f64> = cfg.parsed_list("walk.p")?;
                for &p in &ps {
                    WalkSpec::adversarial(p).validate()?;
                }
                let steps: usize = cfg.parsed("walk.steps")?;
                let x0: u32 = cfg.parsed("walk.x0")?;
                if 2 * x0 as usize > steps {
                    return Err(Error::invalid(format!(
                        "`walk.x0` = {x0} exceeds half of `walk.steps` = {steps}"
                    )));
                }
                Plan::RandomWalk {
                    ps,
                    steps,
                    x0,
                    walks: cfg.parsed("walk.walks")?,
                }
            }
            other => return Err(Error::UnknownExperiment(other.to_owned())),
        })
    }

    /// Number of grid points; trials run once per point.
    pub fn grid_len(&self) -> usize {
        match self {
            Plan::MainTheorem { ns, .. } => ns.len(),
            Plan::RandomWalk { ps, .. } => ps.len(),
            _ => 1,
        }
    }

    /// The metric that indexes the grid, if any.
    pub fn x_axis(&self) -> Option<&'static str> {
        x_axis_of(self.name())
    }

    pub fn name(&self) -> &'static str {
        match self {
            Plan::DegreeLaw { .. } => "degree-law",
            Plan::Corank { .. } => "corank",
            Plan::MainTheorem { .. } => "main-theorem",
            Plan::Boost { .. } => "boost",
            Plan::RandomWalk { .. } => "random-walk",
        }
    }

    /// Runs trial `index`; with `trials` per grid point, the grid point is
    /// `index / trials`.
    pub fn run_trial(&self, index: u64, trials: u64, stream: &RngStream) -> Result<TrialOutcome> {
        let point = (index / trials.max(1)) as usize;
        let mut rng = stream.clone();
        match self {
            Plan::DegreeLaw { core, extract, .. } => degree_law_trial(core, extract, &mut rng),
            Plan::Corank {
                core,
                extract,
                primes,
                bls_slack,
                ..
            } => corank_trial(core, extract, *primes, *bls_slack, &mut rng),
            Plan::MainTheorem {
                ns,
                lambda,
                k,
                lambda_whole,
                primes,
                fraction_free_max,
                ..
            } => {
                let cp = CoreParams {
                    n: ns[point],
                    lambda: *lambda,
                    k: *k,
                };
                main_theorem_trial(&cp, *lambda_whole, *primes, *fraction_free_max, stream)
            }
            Plan::Boost {
                core,
                extract,
                params,
                ..
            } => boost_trial(core, extract, params, &mut rng),
            Plan::RandomWalk {
                ps,
                steps,
                x0,
                walks,
            } => {
                let r = random_walk_sim(
                    &WalkSpec::adversarial(ps[point]),
                    *steps,
                    *x0,
                    *walks,
                    &mut rng,
                )?;
                let mut out = TrialOutcome::default();
                out.set("p", ps[point]);
                out.set("nonzero_frac", r.nonzero.estimate);
                out.set("nonzero_ci_lo", r.nonzero.ci_lo);
                out.set("nonzero_ci_hi", r.nonzero.ci_hi);
                out.set("bound", r.bound);
                out.set("refined_bound", r.refined_bound);
                out.flag("within_bound", r.within_bound());
                out.flag(
                    "within_refined_bound",
                    r.nonzero.estimate <= r.refined_bound,
                );
                out.set("audited_steps", r.audited_steps as f64);
                out.set("audit_violations", r.audit_violations as f64);
                Ok(out)
            }
        }
    }

    /// Pass/fail checks against the configured thresholds.
    pub fn verdicts(&self, records: &[TrialRecord]) -> Vec<Verdict> {
        let kept: Vec<&TrialRecord> = records
            .iter()
            .filter(|r| r.metric("empty_core") != Some(1.0))
            .collect();
        let rate_of = |pred: &dyn Fn(&TrialRecord) -> bool| {
            if kept.is_empty() {
                0.0
            } else {
                kept.iter().filter(|r| pred(r)).count() as f64 / kept.len() as f64
            }
        };
        let at_least = |name: &str, value: f64, threshold: f64| Verdict {
            name: name.to_owned(),
            value,
            threshold,
            passed: value >= threshold,
        };
        match self {
            Plan::DegreeLaw {
                tv_max,
                min_pass_fraction,
                ..
            } => vec![
                at_least(
                    "tv_rho_pass_fraction",
                    rate_of(&|r| r.metric("tv_rho").is_some_and(|x| x < *tv_max)),
                    *min_pass_fraction,
                ),
                at_least(
                    "tv_mu_pass_fraction",
                    rate_of(&|r| r.metric("tv_mu").is_some_and(|x| x < *tv_max)),
                    *min_pass_fraction,
                ),
                at_least(
                    "tv_both_pass_fraction",
                    rate_of(&|r| {
                        r.metric("tv_rho").is_some_and(|x| x < *tv_max)
                            && r.metric("tv_mu").is_some_and(|x| x < *tv_max)
                    }),
                    *min_pass_fraction,
                ),
            ],
            Plan::Corank {
                min_pass_fraction, ..
            } => vec![
                at_least(
                    "t8_pass_fraction",
                    rate_of(&|r| r.metric("pass_t8") == Some(1.0)),
                    *min_pass_fraction,
                ),
                at_least(
                    "core_bls_pass_fraction",
                    rate_of(&|r| r.metric("pass_core_bls") == Some(1.0)),
                    *min_pass_fraction,
                ),
            ],
            Plan::MainTheorem {
                min_separation,
                min_whole_singular,
                ..
            } => {
                let groups = group_by_x(records, "n");
                let core: Vec<_> = groups
                    .iter()
                    .map(|(_, g)| flag_rate(g, "core_singular"))
                    .collect();
                let whole: Vec<_> = groups
                    .iter()
                    .map(|(_, g)| flag_rate(g, "whole_singular"))
                    .collect();
                let mut monotone = true;
                for i in 0..core.len() {
                    for j in i + 1..core.len() {
                        monotone &= core[j].ci_lo <= core[i].ci_hi;
                    }
                }
                let separation = core
                    .iter()
                    .zip(&whole)
                    .map(|(c, w)| w.estimate - c.estimate)
                    .fold(f64::INFINITY, f64::min);
                let whole_min = whole
                    .iter()
                    .map(|w| w.estimate)
                    .fold(f64::INFINITY, f64::min);
                vec![
                    Verdict {
                        name: "core_singular_non_increasing".into(),
                        value: monotone as u8 as f64,
                        threshold: 1.0,
                        passed: monotone && !core.is_empty(),
                    },
                    at_least("min_separation", separation, *min_separation),
                    Verdict {
                        name: "min_whole_singular".into(),
                        value: whole_min,
                        threshold: *min_whole_singular,
                        passed: whole_min > *min_whole_singular,
                    },
                ]
            }
            Plan::Boost { min_success, .. } => vec![
                at_least(
                    "success_fraction",
                    rate_of(&|r| r.metric("success") == Some(1.0)),
                    *min_success,
                ),
                at_least(
                    "increments_ok_fraction",
                    rate_of(&|r| r.metric("increments_ok") == Some(1.0)),
                    1.0,
                ),
                at_least(
                    "extraction_audit_fraction",
                    rate_of(&|r| r.metric("audit_failures") == Some(0.0)),
                    1.0,
                ),
                at_least(
                    "deg_e_ok_fraction",
                    rate_of(&|r| r.metric("deg_e_ok") == Some(1.0)),
                    1.0,
                ),
            ],
            Plan::RandomWalk { .. } => vec![
                at_least(
                    "within_bound_fraction",
                    rate_of(&|r| r.metric("within_bound") == Some(1.0)),
                    1.0,
                ),
                at_least(
                    "audit_clean_fraction",
                    rate_of(&|r| r.metric("audit_violations") == Some(0.0)),
                    1.0,
                ),
            ],
        }
    }
}

pub(crate) fn x_axis_of(name: &str) -> Option<&'static str> {
    match name {
        "main-theorem" => Some("n"),
        "random-walk" => Some("p"),
        _ => None,
    }
}

/// One acceptance check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub passed: bool,
}

/// The summary plus verdicts of a finished run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub experiment: String,
    pub config_hash: String,
    pub dir: std::path::PathBuf,
    pub records: usize,
    pub summary: Summary,
    pub verdicts: Vec<Verdict>,
}

impl RunSummary {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}
