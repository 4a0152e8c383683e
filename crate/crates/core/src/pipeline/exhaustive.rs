// SPDX-License-Identifier: Apache-2.0

//! Exact checks by enumerating every labelled graph on a handful of
//! vertices. Graphs are bitmasks over the vertex pairs `(i, j)`, `i < j`, in
//! lexicographic order.

use std::collections::HashMap;

use serde::Serialize;

use super::extraction::extract;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Largest vertex count accepted by the enumerations.
pub const EXHAUSTIVE_MAX_N: usize = 8;

struct Pairs {
    n: usize,
    list: Vec<(usize, usize)>,
}

impl Pairs {
    fn new(n: usize) -> Self {
        let list = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Pairs { n, list }
    }

    fn count(&self) -> usize {
        self.list.len()
    }

    fn adjacency(&self, g: u32) -> [u8; EXHAUSTIVE_MAX_N] {
        let mut adj = [0u8; EXHAUSTIVE_MAX_N];
        for (b, &(i, j)) in self.list.iter().enumerate() {
            if g >> b & 1 == 1 {
                adj[i] |= 1 << j;
                adj[j] |= 1 << i;
            }
        }
        adj
    }

    /// Pair mask of all pairs inside the vertex mask `v`.
    fn inside(&self, v: u8) -> u32 {
        let mut m = 0;
        for (b, &(i, j)) in self.list.iter().enumerate() {
            if v >> i & 1 == 1 && v >> j & 1 == 1 {
                m |= 1 << b;
            }
        }
        m
    }

    fn graph(&self, g: u32) -> Graph {
        let edges = self
            .list
            .iter()
            .enumerate()
            .filter(|&(b, _)| g >> b & 1 == 1)
            .map(|(_, &e)| e);
        Graph::from_edges(self.n, edges).expect("pairs are valid edges")
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::cap(
            "exhaustive vertex count",
            n as u64,
            EXHAUSTIVE_MAX_N as u64,
        ));
    }
    Ok(())
}

/// Vertex mask of the `k`-core of the graph with adjacency `adj`.
fn core_mask(n: usize, adj: &[u8; EXHAUSTIVE_MAX_N], k: usize) -> u8 {
    let mut alive: u8 = if n == 8 { u8::MAX } else { (1u8 << n) - 1 };
    loop {
        let mut next = alive;
        for v in 0..n {
            if alive >> v & 1 == 1 && ((adj[v] & alive).count_ones() as usize) < k {
                next &= !(1 << v);
            }
        }
        if next == alive {
            return alive;
        }
        alive = next;
    }
}

/// Outcome of the exhaustive check that the `k`-core of `G(n, 1/2)` is
/// uniform given its vertex set and edge count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotateCoreReport {
    pub n: usize,
    pub k: usize,
    pub graphs: u64,
    /// Nonempty `(V, m)` classes.
    pub classes: usize,
    /// Classes where some graph of `K(V, m, k)` never appears as the core or
    /// appears with a different multiplicity than the others.
    pub nonuniform_classes: usize,
    pub uniform: bool,
}

/// Enumerates all `2^(n choose 2)` graphs on `n` vertices, tallies each
/// `k`-core, and compares every `(V, m)` class against an independent count
/// of graphs on `V` with `m` edges and minimum degree at least `k`.
pub fn rotate_core_exhaustive(n: usize, k: usize) -> Result<RotateCoreReport> {
    check_n(n)?;
    if n == 8 {
        // 2^28 graphs; the tally table alone would not fit comfortably
        return Err(Error::cap("rotate-core vertex count", 8u64, 7u64));
    }
    let pairs = Pairs::new(n);
    let total: u32 = 1 << pairs.count();
    let inside: Vec<u32> = (0..1u16 << n).map(|v| pairs.inside(v as u8)).collect();

    let mut tally: HashMap<(u8, u32), u64> = HashMap::new();
    for g in 0..total {
        let adj = pairs.adjacency(g);
        let v = core_mask(n, &adj, k);
        *tally.entry((v, g & inside[v as usize])).or_default() += 1;
    }

    // (V, m) -> (distinct cores seen, min multiplicity, max multiplicity)
    let mut classes: HashMap<(u8, u32), (u64, u64, u64)> = HashMap::new();
    for (&(v, h), &c) in &tally {
        let e = classes
            .entry((v, h.count_ones()))
            .or_insert((0, u64::MAX, 0));
        e.0 += 1;
        e.1 = e.1.min(c);
        e.2 = e.2.max(c);
    }

    let mut nonuniform = 0;
    for (&(v, m), &(seen, lo, hi)) in &classes {
        let expected = count_min_degree_graphs(&pairs, inside[v as usize], v, k, m);
        if seen != expected || lo != hi {
            nonuniform += 1;
        }
    }
    Ok(RotateCoreReport {
        n,
        k,
        graphs: total as u64,
        classes: classes.len(),
        nonuniform_classes: nonuniform,
        uniform: nonuniform == 0,
    })
}

/// `|K(V, m, k)|` by walking the subsets of the pairs inside `V`.
fn count_min_degree_graphs(pairs: &Pairs, inside: u32, v: u8, k: usize, m: u32) -> u64 {
    let mut count = 0;
    let mut sub = inside;
    loop {
        if sub.count_ones() == m {
            let adj = pairs.adjacency(sub);
            let ok =
                (0..pairs.n).all(|x| v >> x & 1 == 0 || (adj[x] & v).count_ones() as usize >= k);
            count += ok as u64;
        }
        if sub == 0 {
            return count;
        }
        sub = (sub - 1) & inside;
    }
}

fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    (0..r).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Outcome of the exact conditional-uniformity check for extracted
/// neighbourhoods.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtractionUniformityReport {
    pub max_vertices: usize,
    pub k: usize,
    /// Graphs of minimum degree at least `k`, summed over vertex counts.
    pub graphs: u64,
    /// `(graph, |S|, Delta)` instances run through the extraction.
    pub instances: u64,
    /// Distinct revealed-information tuples, indexed by `|T'|`.
    pub classes_by_t_prime: Vec<usize>,
    /// Classes whose size differs from `prod_v C(|E|, deg_E(v))`.
    pub violations: usize,
    pub passed: bool,
}

/// For every vertex count `k+1..=max_vertices`, every graph on those
/// vertices with minimum degree at least `k` (the support of `K(V, m, k)`,
/// uniform within each `m`), every `|S|` and every admissible `Delta`:
/// groups graphs by the revealed information `(V, m, |S|, Delta, T', E,
/// edges not between T' and E, (deg_E v)_{v in T'})`.
///
/// A graph is determined by its class and its `T'`-`E` edges, so the law of
/// the neighbourhoods is uniform over the product of `deg_E(v)`-subsets of
/// `E` exactly when each class has the size of that product.
pub fn uniformity_test_extraction(
    max_vertices: usize,
    k: usize,
) -> Result<ExtractionUniformityReport> {
    check_n(max_vertices)?;
    if k == 0 {
        return Err(Error::invalid("k must be positive"));
    }
    let mut graphs = 0u64;
    let mut instances = 0u64;
    let mut classes: HashMap<u128, (u64, u64, usize)> = HashMap::new();
    for nv in k + 1..=max_vertices {
        let pairs = Pairs::new(nv);
        for g in 0..1u32 << pairs.count() {
            let adj = pairs.adjacency(g);
            if (0..nv).any(|v| (adj[v].count_ones() as usize) < k) {
                continue;
            }
            graphs += 1;
            let graph = pairs.graph(g);
            for s_len in 1..=nv {
                let s = VertexSet::new((0..s_len).collect());
                for delta in k..nv {
                    instances += 1;
                    let ex = extract(&graph, &s, delta, k)?;
                    let (key, expected) = class_key(&pairs, g, nv, s_len, delta, &ex);
                    let e = classes
                        .entry(key)
                        .or_insert((0, expected, ex.t_prime.len()));
                    e.0 += 1;
                }
            }
        }
    }
    let mut by_t = vec![0usize; max_vertices + 1];
    let mut violations = 0;
    for &(count, expected, t) in classes.values() {
        by_t[t] += 1;
        violations += (count != expected) as usize;
    }
    Ok(ExtractionUniformityReport {
        max_vertices,
        k,
        graphs,
        instances,
        classes_by_t_prime: by_t,
        violations,
        passed: violations == 0,
    })
}

fn class_key(
    pairs: &Pairs,
    g: u32,
    nv: usize,
    s_len: usize,
    delta: usize,
    ex: &super::ExtractionResult,
) -> (u128, u64) {
    let mask = |set: &VertexSet| set.iter().fold(0u8, |m, &v| m | 1 << v);
    let (tp, e) = (mask(&ex.t_prime), mask(&ex.e));
    let mut hidden = 0u32;
    for (b, &(i, j)) in pairs.list.iter().enumerate() {
        if (tp >> i & 1 == 1 && e >> j & 1 == 1) || (tp >> j & 1 == 1 && e >> i & 1 == 1) {
            hidden |= 1 << b;
        }
    }
    let mut degs = 0u128;
    let mut expected = 1u64;
    for (slot, &d) in ex.deg_e.iter().enumerate() {
        degs |= (d as u128) << (4 * slot);
        expected *= binomial(ex.e.len(), d);
    }
    // 28 + 8 + 8 + 4 * 8 + 4 + 4 + 4 bits
    let key = (g & !hidden) as u128
        | (tp as u128) << 28
        | (e as u128) << 36
        | degs << 44
        | (nv as u128) << 76
        | (s_len as u128) << 80
        | (delta as u128) << 84;
    (key, expected)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn core_mask_examples() {
        let p = Pairs::new(4);
        let full = (1u32 << p.count()) - 1;
        assert_eq!(core_mask(4, &p.adjacency(full), 3), 0b1111);
        assert_eq!(core_mask(4, &p.adjacency(full), 4), 0);
        // a triangle on {0, 1, 2} plus the edge 2-3
        let tri = p.inside(0b0111) | 1 << p.list.iter().position(|&e| e == (2, 3)).unwrap();
        assert_eq!(core_mask(4, &p.adjacency(tri), 2), 0b0111);
    }

    #[test]
    fn min_degree_counts_against_direct_filter() {
        // |K(V, m, 2)| on 5 vertices summed over m: 2-regular-or-more graphs
        let p = Pairs::new(5);
        let inside = p.inside(0b11111);
        let by_m: u64 = (0..=10)
            .map(|m| count_min_degree_graphs(&p, inside, 0b11111, 2, m))
            .sum();
        let direct = (0..1u32 << 10)
            .filter(|&g| {
                let adj = p.adjacency(g);
                (0..5).all(|v| adj[v].count_ones() >= 2)
            })
            .count() as u64;
        assert_eq!(by_m, direct);
        assert_eq!(count_min_degree_graphs(&p, inside, 0b11111, 4, 10), 1);
    }

    #[test]
    fn rotate_core_small_cases() {
        for n in 1..=5 {
            for k in 1..=3 {
                let r = rotate_core_exhaustive(n, k).unwrap();
                assert!(r.uniform, "n = {n}, k = {k}");
            }
        }
        assert!(rotate_core_exhaustive(9, 3).is_err());
    }

    #[test]
    fn extraction_uniformity_six_vertices() {
        let r = uniformity_test_extraction(6, 3).unwrap();
        assert!(r.passed, "{r:?}");
        assert!(r.classes_by_t_prime[1] > 0);
    }
}
