// SPDX-License-Identifier: Apache-2.0

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::structure::{joined_pairs, min_distance_between};

/// Paths of at most this length between two vertices of `T` inside
/// `G[T ∪ B_bias]` put both endpoints in `T_bad`.
pub const JOIN_RADIUS: u32 = 6;

/// Distance from a low-degree vertex within which `B_bias` is grown.
pub const BIAS_RADIUS: u32 = 2;

/// The sets cut out of a core before the boosting walk. All sets hold core
/// vertex ids.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionResult {
    pub s: VertexSet,
    pub t: VertexSet,
    pub b_bias: VertexSet,
    pub t_bad: VertexSet,
    pub e: VertexSet,
    pub t_low: VertexSet,
    pub t_prime: VertexSet,
    pub delta: usize,
    pub k: usize,
    /// `deg_E(v)` for `v` in `t_prime`, aligned with its iteration order.
    pub deg_e: Vec<usize>,
}

impl ExtractionResult {
    /// `V \ T'`, the vertex set the boosting walk starts from.
    pub fn base(&self, n: usize) -> VertexSet {
        self.t_prime.complement(n)
    }
}

/// `deg_E(v) < sqrt(delta)`, decided in integers.
fn below_sqrt(deg: usize, delta: usize) -> bool {
    (deg as u128) * (deg as u128) < delta as u128
}

/// Runs the extraction on `core` with selected set `s`, degree cut `delta`
/// and core order `k`.
pub fn extract(core: &Graph, s: &VertexSet, delta: usize, k: usize) -> Result<ExtractionResult> {
    let n = core.n();
    if !s.valid_for(n) {
        return Err(Error::invalid("S is not a subset of the core's vertex set"));
    }
    if k == 0 || delta < k {
        return Err(Error::invalid(format!(
            "need delta >= k >= 1, got delta = {delta}, k = {k}"
        )));
    }
    if let Some(d) = core.min_degree().filter(|&d| d < k) {
        return Err(Error::invalid(format!(
            "core has a vertex of degree {d} < k = {k}"
        )));
    }

    let t = VertexSet::from_sorted(
        s.iter()
            .copied()
            .filter(|&v| core.degree(v) >= delta)
            .collect(),
    );
    let rest = core.without(&t);
    let low = VertexSet::from_sorted(
        (0..rest.graph.n())
            .filter(|&v| rest.graph.degree(v) < k)
            .collect(),
    );
    let b_bias = rest.globalize(&rest.graph.within_distance(&low, BIAS_RADIUS));

    let joint = core.induced(&t.union(&b_bias));
    let mut bad = Vec::new();
    for (u, v) in joined_pairs(&joint.graph, &joint.localize(&t), JOIN_RADIUS)? {
        bad.push(joint.original[u]);
        bad.push(joint.original[v]);
    }
    let t_bad = VertexSet::new(bad);

    let e = b_bias.union(s).complement(n);
    let e_mask = e.mask(n);
    let deg_e_of = |v: usize| {
        core.neighbors(v)
            .iter()
            .filter(|&&w| e_mask[w as usize])
            .count()
    };
    let t_low = VertexSet::from_sorted(
        t.iter()
            .copied()
            .filter(|&v| below_sqrt(deg_e_of(v), delta))
            .collect(),
    );
    let t_prime = t.difference(&t_bad.union(&t_low));
    let deg_e = t_prime.iter().map(|&v| deg_e_of(v)).collect();

    Ok(ExtractionResult {
        s: s.clone(),
        t,
        b_bias,
        t_bad,
        e,
        t_low,
        t_prime,
        delta,
        k,
        deg_e,
    })
}

/// The structural guarantee of the extraction for one `U ⊇ V \ T'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SupersetAudit {
    pub size: usize,
    pub min_degree: Option<usize>,
    pub degree2_min_distance: Option<u32>,
    pub holds: bool,
}

/// Checks that `G[U]` has minimum degree at least 2 and no two degree-2
/// vertices within distance 4.
pub fn audit_superset(core: &Graph, ex: &ExtractionResult, u: &VertexSet) -> Result<SupersetAudit> {
    if !u.valid_for(core.n()) || !ex.base(core.n()).is_subset_of(u) {
        return Err(Error::invalid("U must contain V \\ T'"));
    }
    let h = core.induced(u).graph;
    let min_degree = h.min_degree();
    let deg2: Vec<usize> = (0..h.n()).filter(|&v| h.degree(v) == 2).collect();
    let degree2_min_distance = min_distance_between(&h, &deg2);
    let holds = min_degree.is_none_or(|d| d >= 2) && degree2_min_distance.is_none_or(|d| d > 4);
    Ok(SupersetAudit {
        size: u.len(),
        min_degree,
        degree2_min_distance,
        holds,
    })
}

/// `V \ T'` plus an independent fair coin per vertex of `T'`.
pub fn random_superset<R: Rng + ?Sized>(n: usize, ex: &ExtractionResult, rng: &mut R) -> VertexSet {
    let extra: Vec<usize> = ex
        .t_prime
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.5))
        .collect();
    ex.base(n).union(&VertexSet::from_sorted(extra))
}
