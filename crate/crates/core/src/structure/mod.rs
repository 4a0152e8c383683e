// SPDX-License-Identifier: Apache-2.0

//! Structural predicates on induced subgraphs: goodness, the exceptional
//! set `Q`, the unstructured kernel property over GF(2), expansion
//! falsifiers and `r`-joined pairs.

mod expansion;
mod ukp;

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet, UNREACHED};

pub use expansion::{
    expansion1_falsify, expansion2_check, Expansion1Report, Expansion2Report, SearchMode,
    EXP1_EXACT_MAX_N,
};
pub use ukp::{check_ukp_f2, UkpReport, UkpWitness, UKP_MAX_KERNEL_DIM, UKP_MAX_N};

/// Radius around degree-2 vertices that counts towards the third goodness
/// condition and towards `Q`.
pub const DEGREE2_RADIUS: u32 = 7;

/// Degree-2 vertices at distance at most this from each other break
/// goodness.
pub const DEGREE2_SEPARATION: u32 = 4;

/// The four goodness conditions evaluated on `G[U]`, with `n = |U|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoodnessReport {
    pub n: usize,
    pub theta: f64,
    pub eta: f64,
    pub odd_degree_count: usize,
    pub min_degree: Option<usize>,
    pub degree2_count: usize,
    pub count_within_7_of_degree2: usize,
    /// `None` when there are fewer than two degree-2 vertices or no two are
    /// connected.
    pub min_pairwise_distance_between_degree2: Option<u32>,
    pub enough_odd: bool,
    pub min_degree_ok: bool,
    pub few_near_degree2: bool,
    pub degree2_separated: bool,
    pub good: bool,
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::invalid(format!("{name} = {x} must lie in (0, 1)")));
    }
    Ok(())
}

fn check_set(g: &Graph, u: &VertexSet) -> Result<()> {
    if !u.valid_for(g.n()) {
        return Err(Error::invalid("vertex set out of range"));
    }
    Ok(())
}

/// Evaluates goodness of `G[U]` against thresholds `theta` and `eta`.
pub fn goodness(g: &Graph, u: &VertexSet, theta: f64, eta: f64) -> Result<GoodnessReport> {
    check_unit("theta", theta)?;
    check_unit("eta", eta)?;
    check_set(g, u)?;
    let h = g.induced(u).graph;
    let n = h.n();
    let deg2: Vec<usize> = (0..n).filter(|&v| h.degree(v) == 2).collect();
    let near = h
        .bfs_distances(&deg2, DEGREE2_RADIUS)
        .iter()
        .filter(|&&d| d != UNREACHED)
        .count();
    let min_pair = min_distance_between(&h, &deg2);
    let odd = h.odd_degree_vertices().len();
    let min_degree = h.min_degree();
    let nf = n as f64;
    let enough_odd = odd as f64 >= theta * nf;
    let min_degree_ok = min_degree.is_none_or(|d| d >= 2);
    let few_near_degree2 = near as f64 <= eta / 4.0 * nf;
    let degree2_separated = min_pair.is_none_or(|d| d > DEGREE2_SEPARATION);
    Ok(GoodnessReport {
        n,
        theta,
        eta,
        odd_degree_count: odd,
        min_degree,
        degree2_count: deg2.len(),
        count_within_7_of_degree2: near,
        min_pairwise_distance_between_degree2: min_pair,
        enough_odd,
        min_degree_ok,
        few_near_degree2,
        degree2_separated,
        good: enough_odd && min_degree_ok && few_near_degree2 && degree2_separated,
    })
}

/// Shortest distance between two distinct members of `sources`, by a
/// multi-source BFS that labels each vertex with its nearest source.
pub(crate) fn min_distance_between(g: &Graph, sources: &[usize]) -> Option<u32> {
    let mut dist = vec![UNREACHED; g.n()];
    let mut label = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    for &s in sources {
        dist[s] = 0;
        label[s] = s;
        queue.push_back(s);
    }
    let mut best: Option<u32> = None;
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            let w = w as usize;
            if dist[w] == UNREACHED {
                dist[w] = dist[u] + 1;
                label[w] = label[u];
                queue.push_back(w);
            } else if label[w] != label[u] {
                let d = dist[u] + dist[w] + 1;
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
    }
    best
}

/// Vertices lying on some 4-cycle.
pub fn four_cycle_vertices(g: &Graph) -> VertexSet {
    let mut on = vec![false; g.n()];
    let mut paths: HashMap<usize, usize> = HashMap::new();
    for v in 0..g.n() {
        paths.clear();
        for &a in g.neighbors(v) {
            for &w in g.neighbors(a as usize) {
                if w as usize != v {
                    *paths.entry(w as usize).or_default() += 1;
                }
            }
        }
        on[v] = paths.values().any(|&c| c >= 2);
    }
    VertexSet::from_mask(&on)
}

/// Vertices with a neighbour on a 4-cycle.
pub fn adjacent_to_four_cycle(g: &Graph) -> VertexSet {
    let on = four_cycle_vertices(g).mask(g.n());
    VertexSet::from_mask(
        &(0..g.n())
            .map(|v| g.neighbors(v).iter().any(|&w| on[w as usize]))
            .collect::<Vec<_>>(),
    )
}

/// The exceptional set for the kernel check on `G[U]`: vertices with a
/// neighbour on a 4-cycle, together with vertices within distance 7 of a
/// degree-2 vertex, all computed inside `G[U]`. Returned in host ids.
pub fn build_q(g: &Graph, u: &VertexSet) -> Result<VertexSet> {
    check_set(g, u)?;
    let sub = g.induced(u);
    let h = &sub.graph;
    let deg2: Vec<usize> = (0..h.n()).filter(|&v| h.degree(v) == 2).collect();
    let near = h.within_distance(&VertexSet::from_sorted(deg2), DEGREE2_RADIUS);
    Ok(sub.globalize(&adjacent_to_four_cycle(h).union(&near)))
}

/// Length of the shortest cycle through `u`, if at most `max_len`.
///
/// In a BFS tree from `u`, every non-tree edge joining two different
/// branches closes a cycle through `u` of length `d(a) + d(b) + 1`, and the
/// shortest such cycle arises this way.
pub fn shortest_cycle_through(g: &Graph, u: usize, max_len: u32) -> Option<u32> {
    let n = g.n();
    let mut dist = vec![UNREACHED; n];
    let mut branch = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[u] = 0;
    for &c in g.neighbors(u) {
        let c = c as usize;
        dist[c] = 1;
        branch[c] = c;
        queue.push_back(c);
    }
    let mut best = UNREACHED;
    while let Some(a) = queue.pop_front() {
        if 2 * dist[a] + 1 > max_len.min(best) {
            break;
        }
        for &b in g.neighbors(a) {
            let b = b as usize;
            if b == u {
                continue;
            }
            if dist[b] == UNREACHED {
                dist[b] = dist[a] + 1;
                branch[b] = branch[a];
                queue.push_back(b);
            } else if branch[b] != branch[a] {
                best = best.min(dist[a] + dist[b] + 1);
            }
        }
    }
    (best <= max_len).then_some(best)
}

/// All ordered `r`-joined pairs in `X`: `(u, v)` with `u != v` at distance
/// at most `r`, and `(u, u)` when `u` lies on a cycle of length at most `r`.
pub fn joined_pairs(g: &Graph, x: &VertexSet, r: u32) -> Result<Vec<(usize, usize)>> {
    if r > 8 {
        return Err(Error::invalid(format!("r = {r} exceeds 8")));
    }
    check_set(g, x)?;
    let mut out = Vec::new();
    for &u in x.iter() {
        let dist = g.bfs_distances(&[u], r);
        for &v in x.iter() {
            if v == u {
                if shortest_cycle_through(g, u, r).is_some() {
                    out.push((u, u));
                }
            } else if dist[v] != UNREACHED {
                out.push((u, v));
            }
        }
    }
    Ok(out)
}
