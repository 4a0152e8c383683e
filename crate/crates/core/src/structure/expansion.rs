// SPDX-License-Identifier: Apache-2.0

//! Falsifiers for the two expansion estimates. Both properties are hard to
//! decide in general, so each search reports whether it was exhaustive.

use serde::Serialize;

use super::adjacent_to_four_cycle;
use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHED};

/// Up to this many vertices the first estimate is decided by enumeration.
pub const EXP1_EXACT_MAX_N: usize = 20;

/// Dense subgraphs are sought among vertex sets smaller than this.
const DENSE_SET_LIMIT: usize = 12;

/// Largest `|S|` for which the `(S, W)` system is enumerated exhaustively.
const SW_EXACT_MAX_S: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchMode {
    Exact,
    Heuristic,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expansion1Report {
    pub n: usize,
    /// Largest `|S|` with `|S| < eta n`.
    pub max_set_size: usize,
    /// `theta n - 2`.
    pub coverage_needed: f64,
    pub best_coverage: usize,
    pub best_set: Vec<usize>,
    pub counterexample: Option<Vec<usize>>,
    pub mode: SearchMode,
}

fn largest_below(x: f64) -> usize {
    // largest integer strictly below x, clamped at 0
    if x <= 0.0 {
        0
    } else {
        (x.ceil() as usize).saturating_sub(1)
    }
}

fn coverage(g: &Graph, set: &[usize], covered: &mut [bool]) -> usize {
    covered.iter_mut().for_each(|c| *c = false);
    let mut count = 0;
    for &s in set {
        for &w in g.neighbors(s) {
            let w = w as usize;
            if !covered[w] {
                covered[w] = true;
                count += 1;
            }
        }
    }
    count
}

/// Searches for `S` with `|S| < eta n` such that at least `theta n - 2`
/// vertices have a neighbour in `S`.
///
/// Coverage is monotone in `S`, so only sets of the maximal size are
/// examined: all of them when `n <= EXP1_EXACT_MAX_N`, otherwise greedy
/// max-coverage runs seeded by the `budget` highest-degree vertices.
pub fn expansion1_falsify(g: &Graph, eta: f64, theta: f64, budget: usize) -> Expansion1Report {
    let n = g.n();
    let s = largest_below(eta * n as f64).min(n);
    let need = theta * n as f64 - 2.0;
    let (best_set, best_coverage, mode) = if n <= EXP1_EXACT_MAX_N {
        let (set, cov) = exhaustive_cover(g, s);
        (set, cov, SearchMode::Exact)
    } else {
        let (set, cov) = greedy_cover(g, s, budget.max(1));
        (set, cov, SearchMode::Heuristic)
    };
    let counterexample = (best_coverage as f64 >= need).then(|| best_set.clone());
    Expansion1Report {
        n,
        max_set_size: s,
        coverage_needed: need,
        best_coverage,
        best_set,
        counterexample,
        mode,
    }
}

fn exhaustive_cover(g: &Graph, s: usize) -> (Vec<usize>, usize) {
    let n = g.n();
    let masks: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    if s == 0 {
        return (vec![], 0);
    }
    let mut best = (0u32, 0u32);
    // Gosper's hack over s-subsets of n bits
    let mut c: u64 = (1 << s) - 1;
    while c < 1 << n {
        let mut cover = 0u32;
        let mut bits = c;
        while bits != 0 {
            cover |= masks[bits.trailing_zeros() as usize];
            bits &= bits - 1;
        }
        if cover.count_ones() > best.1 || best.0 == 0 {
            best = (c as u32, cover.count_ones());
        }
        let t = c & c.wrapping_neg();
        let r = c + t;
        c = (((r ^ c) >> 2) / t) | r;
    }
    let set = (0..n).filter(|&v| best.0 >> v & 1 == 1).collect();
    (set, best.1 as usize)
}

fn greedy_cover(g: &Graph, s: usize, restarts: usize) -> (Vec<usize>, usize) {
    let n = g.n();
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let mut covered = vec![false; n];
    let mut best: (Vec<usize>, usize) = (vec![], 0);
    for &seed in by_degree.iter().take(restarts.min(n)) {
        if s == 0 {
            break;
        }
        let mut set = vec![seed];
        let mut cov = coverage(g, &set, &mut covered);
        let mut used = vec![false; n];
        used[seed] = true;
        while set.len() < s {
            let gain = |v: usize| {
                g.neighbors(v)
                    .iter()
                    .filter(|&&w| !covered[w as usize])
                    .count()
            };
            let Some(v) = (0..n)
                .filter(|&v| !used[v])
                .max_by_key(|&v| (gain(v), std::cmp::Reverse(v)))
            else {
                break;
            };
            used[v] = true;
            set.push(v);
            for &w in g.neighbors(v) {
                if !covered[w as usize] {
                    covered[w as usize] = true;
                    cov += 1;
                }
            }
        }
        if cov > best.1 || best.0.is_empty() {
            set.sort_unstable();
            best = (set, cov);
        }
    }
    best
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expansion2Report {
    pub n: usize,
    /// A set of fewer than 12 vertices spanning more edges than vertices.
    pub dense_witness: Option<Vec<usize>>,
    pub dense_ok: bool,
    pub dense_mode: SearchMode,
    /// Vertices with a neighbour on a 4-cycle.
    pub four_cycle_adjacent: usize,
    pub log_n: f64,
    pub four_cycle_ok: bool,
    pub sw_witness: Option<(Vec<usize>, Vec<usize>)>,
    pub sw_ok: bool,
    /// Every `S` up to this size was examined.
    pub sw_exhaustive_up_to: usize,
    pub sw_mode: SearchMode,
}

/// Evaluates the three conditions of the second expansion estimate.
///
/// Condition one is decided exactly (within `budget` DFS steps): a set of at
/// most 11 vertices with more edges than vertices contains two distinct
/// cycles whose union, joined by a shortest path if disjoint, is at most as
/// large, so it suffices to pair up cycles of length at most 10. Condition
/// three enumerates every `S` of size at most 7 when `C(n, 7)` fits in
/// `budget`, otherwise it grows sets greedily.
pub fn expansion2_check(g: &Graph, eta: f64, budget: usize) -> Result<Expansion2Report> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta = {eta} must lie in (0, 1)")));
    }
    let n = g.n();
    let (dense_witness, dense_complete) = dense_small_subgraph(g, budget);
    let four = adjacent_to_four_cycle(g).len();
    let log_n = (n.max(1) as f64).ln();
    let s_max = largest_below(eta * n as f64).min(n);
    let (sw_witness, exhaustive_up_to) = sw_search(g, s_max, budget);
    let sw_mode = if sw_witness.is_some() || exhaustive_up_to >= s_max {
        SearchMode::Exact
    } else {
        SearchMode::Heuristic
    };
    Ok(Expansion2Report {
        n,
        dense_ok: dense_witness.is_none(),
        dense_witness,
        dense_mode: if dense_complete {
            SearchMode::Exact
        } else {
            SearchMode::Heuristic
        },
        four_cycle_adjacent: four,
        log_n,
        four_cycle_ok: four as f64 <= log_n,
        sw_ok: sw_witness.is_none(),
        sw_witness,
        sw_exhaustive_up_to: exhaustive_up_to,
        sw_mode,
    })
}

fn edges_within(g: &Graph, set: &[usize]) -> usize {
    let mask: std::collections::HashSet<usize> = set.iter().copied().collect();
    set.iter()
        .map(|&v| {
            g.neighbors(v)
                .iter()
                .filter(|&&w| mask.contains(&(w as usize)))
                .count()
        })
        .sum::<usize>()
        / 2
}

/// Calls `visit` on every cycle of length at most `max_len`, as a sorted
/// vertex list, each found once from its least vertex. Stops early when
/// `visit` returns true. Returns `None` past `budget` DFS steps.
fn for_each_short_cycle(
    g: &Graph,
    max_len: usize,
    budget: usize,
    visit: &mut dyn FnMut(Vec<usize>) -> bool,
) -> Option<()> {
    let n = g.n();
    let mut dfs = CycleDfs {
        g,
        s: 0,
        max_len,
        dist: vec![UNREACHED; n],
        path: Vec::new(),
        on_path: vec![false; n],
        steps: 0,
        budget,
    };
    for s in 0..n {
        // distances back to s avoiding smaller vertices, for pruning
        dfs.dist.iter_mut().for_each(|d| *d = UNREACHED);
        dfs.dist[s] = 0;
        let mut frontier = vec![s];
        for d in 1..=(max_len / 2) as u32 {
            let mut next = vec![];
            for &u in &frontier {
                for &w in g.neighbors(u) {
                    let w = w as usize;
                    if w > s && dfs.dist[w] == UNREACHED {
                        dfs.dist[w] = d;
                        next.push(w);
                    }
                }
            }
            frontier = next;
        }
        dfs.s = s;
        dfs.path = vec![s];
        dfs.on_path[s] = true;
        let flow = dfs.extend(visit);
        dfs.on_path[s] = false;
        match flow {
            Flow::Continue => {}
            Flow::Stop => return Some(()),
            Flow::OutOfBudget => return None,
        }
    }
    Some(())
}

enum Flow {
    Continue,
    Stop,
    OutOfBudget,
}

struct CycleDfs<'a> {
    g: &'a Graph,
    s: usize,
    max_len: usize,
    dist: Vec<u32>,
    path: Vec<usize>,
    on_path: Vec<bool>,
    steps: usize,
    budget: usize,
}

impl CycleDfs<'_> {
    fn extend(&mut self, visit: &mut dyn FnMut(Vec<usize>) -> bool) -> Flow {
        self.steps += 1;
        if self.steps > self.budget {
            return Flow::OutOfBudget;
        }
        let (g, s) = (self.g, self.s);
        let last = *self.path.last().unwrap();
        for &w in g.neighbors(last) {
            let w = w as usize;
            if w == s {
                // count each cycle in one direction only
                if self.path.len() >= 3 && self.path[1] < last {
                    let mut c = self.path.clone();
                    c.sort_unstable();
                    if visit(c) {
                        return Flow::Stop;
                    }
                }
                continue;
            }
            if w < s || self.on_path[w] || self.path.len() >= self.max_len {
                continue;
            }
            let back = if self.dist[w] == UNREACHED {
                self.max_len / 2 + 1
            } else {
                self.dist[w] as usize
            };
            if self.path.len() + back > self.max_len {
                continue;
            }
            self.path.push(w);
            self.on_path[w] = true;
            let flow = self.extend(visit);
            self.on_path[w] = false;
            self.path.pop();
            if !matches!(flow, Flow::Continue) {
                return flow;
            }
        }
        Flow::Continue
    }
}

/// A witness for condition one, and whether the search finished. Every
/// new cycle is paired with the ones seen before, stopping at the first
/// witness.
fn dense_small_subgraph(g: &Graph, budget: usize) -> (Option<Vec<usize>>, bool) {
    let limit = DENSE_SET_LIMIT - 1;
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut found: Option<Vec<usize>> = None;
    let mut visit = |c: Vec<usize>| {
        for prev in &seen {
            if let Some(w) = pair_witness(g, prev, &c, limit) {
                found = Some(w);
                return true;
            }
        }
        seen.push(c);
        false
    };
    let done = for_each_short_cycle(g, limit - 1, budget, &mut visit).is_some();
    let complete = done || found.is_some();
    (found, complete)
}

/// The union of two distinct cycles, joined by a shortest path when they
/// are disjoint, if it has at most `limit` vertices.
fn pair_witness(g: &Graph, a: &[usize], b: &[usize], limit: usize) -> Option<Vec<usize>> {
    let mut union: Vec<usize> = a.iter().chain(b).copied().collect();
    union.sort_unstable();
    union.dedup();
    if union.len() < a.len() + b.len() {
        // distinct cycles on one vertex set still leave an extra edge
        let ok = union.len() <= limit && edges_within(g, &union) > union.len();
        return ok.then_some(union);
    }
    if a.len() + b.len() > limit {
        return None;
    }
    let reach = (limit + 1 - a.len() - b.len()) as u32;
    let path = shortest_path_between(g, a, b, reach)?;
    union.extend(path);
    union.sort_unstable();
    union.dedup();
    debug_assert!(edges_within(g, &union) > union.len());
    Some(union)
}

/// Interior vertices of a shortest path from `a` to `b` of length at most
/// `max_len`.
fn shortest_path_between(g: &Graph, a: &[usize], b: &[usize], max_len: u32) -> Option<Vec<usize>> {
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut dist = vec![UNREACHED; n];
    let mut queue = std::collections::VecDeque::new();
    for &v in a {
        dist[v] = 0;
        queue.push_back(v);
    }
    let in_b: std::collections::HashSet<usize> = b.iter().copied().collect();
    while let Some(u) = queue.pop_front() {
        if in_b.contains(&u) {
            let mut inner = vec![];
            let mut x = parent[u];
            while dist[x] > 0 {
                inner.push(x);
                x = parent[x];
            }
            return Some(inner);
        }
        if dist[u] >= max_len {
            continue;
        }
        for &w in g.neighbors(u) {
            let w = w as usize;
            if dist[w] == UNREACHED {
                dist[w] = dist[u] + 1;
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    None
}

/// Returns a `W` completing `S` to a violation of condition three, if any.
fn sw_violation(g: &Graph, s: &[usize]) -> Option<Vec<usize>> {
    let size = s.len();
    let in_s: std::collections::HashSet<usize> = s.iter().copied().collect();
    let e_s = edges_within(g, s);
    let a = (5 * size).div_ceil(2);
    // |W| <= a/2 - e(S) + 1, over the reals
    let cap2 = a as i64 + 2 - 2 * e_s as i64;
    if cap2 < 0 {
        return None;
    }
    let w_cap = (cap2 / 2) as usize;
    let need = a.saturating_sub(2 * e_s);
    let mut into: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for &v in s {
        for &w in g.neighbors(v) {
            if !in_s.contains(&(w as usize)) {
                *into.entry(w as usize).or_default() += 1;
            }
        }
    }
    let mut cand: Vec<(usize, usize)> = into.into_iter().map(|(w, c)| (c, w)).collect();
    cand.sort_unstable_by(|x, y| y.cmp(x));
    cand.truncate(w_cap);
    let got: usize = cand.iter().map(|&(c, _)| c).sum();
    (got >= need).then(|| {
        let mut w: Vec<usize> = cand.into_iter().map(|(_, w)| w).collect();
        w.sort_unstable();
        w
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

type SwWitness = (Vec<usize>, Vec<usize>);

/// Condition three. Returns a witness and the largest size searched
/// exhaustively.
fn sw_search(g: &Graph, s_max: usize, budget: usize) -> (Option<SwWitness>, usize) {
    let n = g.n();
    if s_max < 5 {
        return (None, s_max);
    }
    let exact_top = s_max.min(SW_EXACT_MAX_S);
    let total: u128 = (5..=exact_top).map(|k| binomial(n, k)).sum();
    let mut exhaustive = 4;
    if total <= budget as u128 {
        for k in 5..=exact_top {
            let mut idx: Vec<usize> = (0..k).collect();
            loop {
                if let Some(w) = sw_violation(g, &idx) {
                    return (Some((idx, w)), exhaustive);
                }
                // next k-combination in lexicographic order
                let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
                    break;
                };
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
            }
            exhaustive = k;
        }
    }
    // greedy growth from every vertex: add the outside vertex with the most
    // neighbours in S
    for seed in 0..n {
        let mut s = vec![seed];
        while s.len() < s_max {
            let in_s: std::collections::HashSet<usize> = s.iter().copied().collect();
            let mut best: Option<(usize, usize)> = None;
            for &v in &s {
                for &w in g.neighbors(v) {
                    let w = w as usize;
                    if in_s.contains(&w) {
                        continue;
                    }
                    let c = g
                        .neighbors(w)
                        .iter()
                        .filter(|&&x| in_s.contains(&(x as usize)))
                        .count();
                    if best.is_none_or(|(bc, bw)| {
                        (c, std::cmp::Reverse(w)) > (bc, std::cmp::Reverse(bw))
                    }) {
                        best = Some((c, w));
                    }
                }
            }
            let Some((_, w)) = best else { break };
            s.push(w);
            if s.len() >= 5 {
                let mut sorted = s.clone();
                sorted.sort_unstable();
                if let Some(wset) = sw_violation(g, &sorted) {
                    return (Some((sorted, wset)), exhaustive);
                }
            }
        }
    }
    (None, exhaustive)
}
