// SPDX-License-Identifier: Apache-2.0

//! Random graph samplers: binomial and uniform-edge-count graphs, the
//! configuration model, uniform simple graphs with given degrees by
//! rejection, and the exact k-core sampler.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{k_core, Graph, MultiGraph, VertexSet};
use crate::theory::TruncPoisson;

/// Default rejection cap for [`uniform_graph_with_degrees`].
pub const DEFAULT_MAX_REJECTIONS: usize = 10_000;

/// Above this edge probability `gnp` flips one coin per pair.
const GEOMETRIC_SKIP_MAX_P: f64 = 0.1;

/// Samples `G(n, p)`.
pub fn gnp<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Graph {
    assert!((0.0..=1.0).contains(&p), "p must lie in [0, 1]");
    if n < 2 || p == 0.0 {
        return Graph::empty(n);
    }
    if p == 1.0 {
        return Graph::complete(n);
    }
    let mut edges = Vec::new();
    if p <= GEOMETRIC_SKIP_MAX_P {
        // walk the lower triangle (v, w), w < v, jumping geometric gaps
        let lp = (1.0 - p).ln();
        let (mut v, mut w) = (1usize, -1i64);
        while v < n {
            let r: f64 = rng.random();
            let skip = ((1.0 - r).ln() / lp).floor();
            w += 1 + skip as i64;
            while v < n && w >= v as i64 {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                edges.push((w as usize, v));
            }
        }
    } else {
        for v in 1..n {
            for w in 0..v {
                if rng.random_bool(p) {
                    edges.push((w, v));
                }
            }
        }
    }
    Graph::build(n, &edges)
}

fn pair_count(n: usize) -> u64 {
    (n as u64) * (n.saturating_sub(1) as u64) / 2
}

/// Inverse of `idx = v(v-1)/2 + u` for `u < v`.
fn decode_pair(idx: u64) -> (usize, usize) {
    let mut v = ((1.0 + (1.0 + 8.0 * idx as f64).sqrt()) / 2.0) as u64;
    while v * (v - 1) / 2 > idx {
        v -= 1;
    }
    while (v + 1) * v / 2 <= idx {
        v += 1;
    }
    let u = idx - v * (v - 1) / 2;
    (u as usize, v as usize)
}

/// Samples a uniformly random simple graph with exactly `m` edges.
pub fn gnm<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    let total = pair_count(n);
    if m as u64 > total {
        return Err(Error::invalid(format!(
            "m = {m} exceeds the {total} vertex pairs of n = {n}"
        )));
    }
    // Floyd's subset sampling over pair indices
    let mut chosen: HashSet<u64> = HashSet::with_capacity(m);
    for j in (total - m as u64)..total {
        let t = rng.random_range(0..=j);
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    let edges: Vec<_> = chosen.into_iter().map(decode_pair).collect();
    Ok(Graph::build(n, &edges))
}

fn check_parity(d: &[usize]) -> Result<usize> {
    let sum: usize = d.iter().sum();
    if sum % 2 == 1 {
        return Err(Error::OddDegreeSum(sum as u64));
    }
    Ok(sum)
}

/// Contracts a uniformly random perfect matching on `sum(d)` points.
pub fn configuration_multigraph<R: Rng + ?Sized>(d: &[usize], rng: &mut R) -> Result<MultiGraph> {
    let sum = check_parity(d)?;
    let mut points = Vec::with_capacity(sum);
    for (v, &dv) in d.iter().enumerate() {
        points.extend(std::iter::repeat_n(v, dv));
    }
    points.shuffle(rng);
    let edges = points.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    Ok(MultiGraph::new(d.len(), edges))
}

/// Uniform simple graph with degree sequence `d`, by rejecting non-simple
/// configurations.
pub fn uniform_graph_with_degrees<R: Rng + ?Sized>(
    d: &[usize],
    rng: &mut R,
    max_rejections: usize,
) -> Result<Graph> {
    check_parity(d)?;
    for _ in 0..max_rejections {
        let mg = configuration_multigraph(d, rng)?;
        if let Some(g) = mg.to_simple() {
            return Ok(g);
        }
    }
    Err(Error::RejectionCap(max_rejections))
}

/// A k-core drawn through `G(n, λ/n)`.
#[derive(Clone, Debug)]
pub struct CoreSample {
    /// The core, relabeled `0..|V|`.
    pub core: Graph,
    /// Host ids of the core vertices.
    pub vertices: VertexSet,
    pub m: usize,
}

/// Draws `G ~ G(n, lambda_edge / n)` and returns its `k`-core. Given its
/// vertex set and edge count, the core is uniform over graphs on that set
/// with that many edges and minimum degree at least `k`.
pub fn sample_core<R: Rng + ?Sized>(
    n: usize,
    lambda_edge: f64,
    k: usize,
    rng: &mut R,
) -> CoreSample {
    assert!(k >= 1, "k must be positive");
    let p = if n == 0 {
        0.0
    } else {
        (lambda_edge / n as f64).clamp(0.0, 1.0)
    };
    let g = gnp(n, p, rng);
    let (vertices, sub) = k_core(&g, k);
    let m = sub.graph.m();
    CoreSample {
        core: sub.graph,
        vertices,
        m,
    }
}

/// I.i.d. truncated-Poisson degrees with mean solved for `2m/n`, adjusted by
/// single-entry resampling until the sum is exactly `2m`.
///
/// This approximates the degree law of a uniform core with these
/// parameters; it is not exact.
pub fn truncated_poisson_degrees<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    k: usize,
    rng: &mut R,
    max_retries: usize,
) -> Result<Vec<usize>> {
    if n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if 2 * m < k * n {
        return Err(Error::invalid(format!(
            "m = {m} is below kn/2 for k = {k}, n = {n}"
        )));
    }
    let target = 2 * m;
    if target == k * n {
        return Ok(vec![k; n]);
    }
    let tp = TruncPoisson::for_mean_degree(k, target as f64 / n as f64)?;
    let table = tp.cdf_table();
    let mut d: Vec<usize> = (0..n).map(|_| tp.sample_with(&table, rng)).collect();
    let mut sum: usize = d.iter().sum();
    let mut tries = 0;
    while sum != target {
        if tries == max_retries {
            return Err(Error::RejectionCap(max_retries));
        }
        tries += 1;
        let i = rng.random_range(0..n);
        let x = tp.sample_with(&table, rng);
        let new_sum = sum - d[i] + x;
        if new_sum.abs_diff(target) < sum.abs_diff(target) {
            d[i] = x;
            sum = new_sum;
        }
    }
    Ok(d)
}

/// A uniformly random permutation of `0..n`.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}
