// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use super::extraction::ExtractionResult;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::linalg::{principal_ranks, BitMatrix, Certainty};
use crate::structure::{build_q, check_ukp_f2, goodness};

/// Settings for [`boost`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoostParams {
    pub primes: Vec<u64>,
    pub theta: f64,
    pub eta: f64,
    pub check_goodness: bool,
    /// Runs the GF(2) kernel check at every step; the most expensive part.
    pub check_ukp: bool,
}

/// One vertex of `T'` added back.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoostStep {
    pub vertex: usize,
    pub deg_e: usize,
    pub corank: usize,
    pub increment: i64,
    /// `None` when not requested.
    pub good: Option<bool>,
    /// `None` when not requested or when the checker's caps were hit.
    pub ukp: Option<bool>,
}

/// Coranks along `A_0 = A[V \ T'], A_1, ..., A_t = A`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoostTrace {
    pub t_prime_size: usize,
    pub x0: usize,
    pub x0_good: Option<bool>,
    pub x0_ukp: Option<bool>,
    pub steps: Vec<BoostStep>,
    pub final_corank: usize,
    /// `LowerBound` if any rank along the trace came from a non-full
    /// multi-prime reduction.
    pub certainty: Certainty,
    pub primes: Vec<u64>,
}

impl BoostTrace {
    /// `corank A' <= |T'| / 2`.
    pub fn initial_rank_ok(&self) -> bool {
        2 * self.x0 <= self.t_prime_size
    }

    /// Corank changes by at most one upwards, as any symmetric extension by
    /// one row and column must.
    pub fn increments_ok(&self) -> bool {
        self.steps.iter().all(|s| (-2..=1).contains(&s.increment))
    }
}

fn verdicts(
    core: &Graph,
    u: &VertexSet,
    params: &BoostParams,
) -> Result<(Option<bool>, Option<bool>)> {
    let good = if params.check_goodness {
        Some(goodness(core, u, params.theta, params.eta)?.good)
    } else {
        None
    };
    let ukp = if params.check_ukp {
        let sub = core.induced(u);
        let q = sub.localize(&build_q(core, u)?);
        match check_ukp_f2(&BitMatrix::adjacency(&sub.graph), 2, &q, params.eta) {
            Ok(r) => Some(r.passed),
            Err(Error::CapExceeded { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok((good, ukp))
}

/// Adds the vertices of `T'` back to `G[V \ T']` in ascending id order and
/// records the corank after each one.
pub fn boost(core: &Graph, ex: &ExtractionResult, params: &BoostParams) -> Result<BoostTrace> {
    let n = core.n();
    if !ex.t_prime.valid_for(n) || ex.deg_e.len() != ex.t_prime.len() {
        return Err(Error::invalid("extraction does not belong to this core"));
    }
    let order = ex.t_prime.as_slice();
    let certs = principal_ranks(core, order, &params.primes)?;
    let certainty = if certs.iter().all(|c| c.certainty == Certainty::Exact) {
        Certainty::Exact
    } else {
        Certainty::LowerBound
    };
    let primes = certs[0].primes.clone();

    let mut u = ex.base(n);
    let (x0_good, x0_ukp) = verdicts(core, &u, params)?;
    let mut steps = Vec::with_capacity(order.len());
    let mut prev = certs[0].corank();
    for (i, (&v, &d)) in order.iter().zip(&ex.deg_e).enumerate() {
        u = u.union(&VertexSet::from_sorted(vec![v]));
        let corank = certs[i + 1].corank();
        let (good, ukp) = verdicts(core, &u, params)?;
        steps.push(BoostStep {
            vertex: v,
            deg_e: d,
            corank,
            increment: corank as i64 - prev as i64,
            good,
            ukp,
        });
        prev = corank;
    }
    Ok(BoostTrace {
        t_prime_size: order.len(),
        x0: certs[0].corank(),
        x0_good,
        x0_ukp,
        steps,
        final_corank: prev,
        certainty,
        primes,
    })
}
