// SPDX-License-Identifier: Apache-2.0

//! Simple undirected graphs in compressed adjacency form, plus the
//! configuration-model multigraph and vertex-set plumbing shared by every
//! other module.
//!
//! Graphs are immutable once built. Every subgraph operation returns a new
//! graph whose vertices are relabeled `0..len` together with the map back to
//! the host ids.

mod io;
mod kcore;

use std::collections::VecDeque;

use serde::Serialize;

pub use io::{read_edge_list, write_edge_list};
pub use kcore::{core_numbers, k_core};

use crate::error::{Error, Result};

/// Marker for "not reached" in BFS distance arrays.
pub const UNREACHED: u32 = u32::MAX;

/// A simple undirected graph with sorted adjacency lists.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    nbrs: Vec<u32>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n())
            .field("m", &self.m())
            .finish()
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            nbrs: Vec::new(),
        }
    }

    /// Builds a graph from an edge list, rejecting loops, duplicate edges and
    /// out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let edges: Vec<(usize, usize)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if u >= n || v >= n {
                return Err(Error::invalid(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
        }
        let g = Self::build(n, &edges);
        if g.nbrs.len() != 2 * edges.len() {
            return Err(Error::invalid("duplicate edge in edge list"));
        }
        Ok(g)
    }

    /// Builds from edges that are known to be in range and loop-free;
    /// duplicates are merged.
    pub(crate) fn build(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut deg = vec![0usize; n];
        for &(u, v) in edges {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets.clone();
        let mut nbrs = vec![0u32; offsets[n]];
        for &(u, v) in edges {
            nbrs[fill[u]] = v as u32;
            fill[u] += 1;
            nbrs[fill[v]] = u as u32;
            fill[v] += 1;
        }
        // sort and dedup each list, compacting in place
        let mut write = 0;
        let mut new_offsets = Vec::with_capacity(n + 1);
        new_offsets.push(0);
        for v in 0..n {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            nbrs[lo..hi].sort_unstable();
            let mut last = None;
            for i in lo..hi {
                let x = nbrs[i];
                if last != Some(x) {
                    nbrs[write] = x;
                    write += 1;
                    last = Some(x);
                }
            }
            new_offsets.push(write);
        }
        nbrs.truncate(write);
        Graph {
            offsets: new_offsets,
            nbrs,
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::build(n, &edges)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycle needs at least 3 vertices");
        let edges: Vec<_> = (0..n).map(|u| (u, (u + 1) % n)).collect();
        Self::build(n, &edges)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|u| (u - 1, u)).collect();
        Self::build(n, &edges)
    }

    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|u| (0, u)).collect();
        Self::build(n, &edges)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.nbrs.len() / 2
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.nbrs[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.neighbors(a).binary_search(&(b as u32)).is_ok()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n()).map(|v| self.degree(v)).collect()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> Option<usize> {
        (0..self.n()).map(|v| self.degree(v)).min()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    /// Induced subgraph on `set`, relabeled contiguously in ascending id order.
    pub fn induced(&self, set: &VertexSet) -> InducedSubgraph {
        let mut local = vec![u32::MAX; self.n()];
        for (i, &v) in set.iter().enumerate() {
            local[v] = i as u32;
        }
        let mut offsets = Vec::with_capacity(set.len() + 1);
        offsets.push(0);
        let mut nbrs = Vec::new();
        for &v in set.iter() {
            // host lists are sorted and the relabeling is monotone
            nbrs.extend(
                self.neighbors(v)
                    .iter()
                    .map(|&u| local[u as usize])
                    .filter(|&u| u != u32::MAX),
            );
            offsets.push(nbrs.len());
        }
        InducedSubgraph {
            graph: Graph { offsets, nbrs },
            original: set.as_slice().to_vec(),
        }
    }

    /// Subgraph induced by the complement of `set`.
    pub fn without(&self, set: &VertexSet) -> InducedSubgraph {
        self.induced(&set.complement(self.n()))
    }

    /// Number of neighbours of `v` inside `set`.
    pub fn deg_into(&self, v: usize, set: &VertexSet) -> usize {
        self.neighbors(v)
            .iter()
            .filter(|&&u| set.contains(u as usize))
            .count()
    }

    /// Number of ordered pairs `(x, y)` in `S × T` with `xy` an edge, so
    /// edges inside `S ∩ T` count twice.
    pub fn ordered_edge_count(&self, s: &VertexSet, t: &VertexSet) -> usize {
        let t_mask = t.mask(self.n());
        s.iter()
            .map(|&x| {
                self.neighbors(x)
                    .iter()
                    .filter(|&&y| t_mask[y as usize])
                    .count()
            })
            .sum()
    }

    /// Multi-source BFS distances, truncated at `max_depth`.
    pub fn bfs_distances(&self, sources: &[usize], max_depth: u32) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.n()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            let du = dist[u];
            if du >= max_depth {
                continue;
            }
            for &w in self.neighbors(u) {
                let w = w as usize;
                if dist[w] == UNREACHED {
                    dist[w] = du + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All vertices at distance at most `r` from `sources` (sources included).
    pub fn within_distance(&self, sources: &VertexSet, r: u32) -> VertexSet {
        let dist = self.bfs_distances(sources.as_slice(), r);
        VertexSet::from_sorted((0..self.n()).filter(|&v| dist[v] != UNREACHED).collect())
    }

    pub fn odd_degree_vertices(&self) -> VertexSet {
        VertexSet::from_sorted((0..self.n()).filter(|&v| self.degree(v) % 2 == 1).collect())
    }

    pub fn vertices(&self) -> VertexSet {
        VertexSet::from_sorted((0..self.n()).collect())
    }

    /// Returns a copy with vertex `v` renamed to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n());
        let edges: Vec<_> = self.edges().map(|(u, v)| (perm[u], perm[v])).collect();
        Graph::build(self.n(), &edges)
    }

    /// Checks the structural invariants: symmetric, sorted, loop-free,
    /// duplicate-free adjacency.
    pub fn check_invariants(&self) -> bool {
        let n = self.n();
        for v in 0..n {
            let nb = self.neighbors(v);
            if nb.windows(2).any(|w| w[0] >= w[1]) {
                return false;
            }
            for &u in nb {
                let u = u as usize;
                if u >= n || u == v || !self.neighbors(u).binary_search(&(v as u32)).is_ok() {
                    return false;
                }
            }
        }
        self.offsets[n] == 2 * self.m()
    }
}

/// An induced subgraph together with the host id of each local vertex.
#[derive(Clone, Debug)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `original[i]` is the host id of local vertex `i`; strictly increasing.
    pub original: Vec<usize>,
}

impl InducedSubgraph {
    pub fn local_index(&self, host: usize) -> Option<usize> {
        self.original.binary_search(&host).ok()
    }

    /// Maps a host-level vertex set into local ids, dropping absent vertices.
    pub fn localize(&self, set: &VertexSet) -> VertexSet {
        VertexSet::from_sorted(set.iter().filter_map(|&v| self.local_index(v)).collect())
    }

    /// Maps a local vertex set back to host ids.
    pub fn globalize(&self, set: &VertexSet) -> VertexSet {
        VertexSet::from_sorted(set.iter().map(|&v| self.original[v]).collect())
    }
}

/// Sorted, duplicate-free set of vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub fn new(mut ids: Vec<usize>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        VertexSet(ids)
    }

    pub(crate) fn from_sorted(ids: Vec<usize>) -> Self {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]));
        VertexSet(ids)
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        VertexSet(
            mask.iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, usize> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn mask(&self, n: usize) -> Vec<bool> {
        let mut m = vec![false; n];
        for &v in &self.0 {
            m[v] = true;
        }
        m
    }

    pub fn complement(&self, n: usize) -> VertexSet {
        let mask = self.mask(n);
        VertexSet((0..n).filter(|&v| !mask[v]).collect())
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        VertexSet::new(v)
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        VertexSet(
            self.0
                .iter()
                .copied()
                .filter(|&v| !other.contains(v))
                .collect(),
        )
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        VertexSet(
            self.0
                .iter()
                .copied()
                .filter(|&v| other.contains(v))
                .collect(),
        )
    }

    pub fn is_subset_of(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|&v| other.contains(v))
    }

    /// Checks that every id is below `n`.
    pub fn valid_for(&self, n: usize) -> bool {
        self.0.last().is_none_or(|&v| v < n)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        VertexSet::new(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a usize;
    type IntoIter = std::slice::Iter<'a, usize>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Configuration-model output: an edge multiset that may contain loops and
/// parallel edges. Loops contribute 2 to the degree of their vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

impl MultiGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let edges = edges
            .into_iter()
            .map(|(u, v)| if u <= v { (u, v) } else { (v, u) })
            .collect();
        MultiGraph { n, edges }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges as `(u, v)` with `u <= v`, in generation order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n];
        for &(u, v) in &self.edges {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    pub fn loop_count(&self) -> usize {
        self.edges.iter().filter(|(u, v)| u == v).count()
    }

    pub fn is_simple(&self) -> bool {
        if self.loop_count() > 0 {
            return false;
        }
        let mut sorted = self.edges.clone();
        sorted.sort_unstable();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// Multiplicity of the unordered pair `{u, v}`.
    pub fn multiplicity(&self, u: usize, v: usize) -> usize {
        let key = if u <= v { (u, v) } else { (v, u) };
        self.edges.iter().filter(|&&e| e == key).count()
    }

    pub fn to_simple(&self) -> Option<Graph> {
        self.is_simple().then(|| Graph::build(self.n, &self.edges))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[usize]) -> VertexSet {
        VertexSet::new(ids.to_vec())
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        let g = Graph::from_edges(3, [(2, 0), (1, 2)]).unwrap();
        assert!(g.check_invariants());
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 2), (1, 2)]);
    }

    #[test]
    fn induced_subgraphs() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.induced(&VertexSet::default()).graph.n(), 0);
        assert_eq!(k4.induced(&k4.vertices()).graph, k4);
        let tri = k4.induced(&set(&[0, 1, 2]));
        assert_eq!(tri.graph, Graph::cycle(3));
        let c5 = Graph::cycle(5);
        let sub = c5.induced(&set(&[1, 2, 4]));
        assert_eq!(sub.graph.m(), 1);
        assert_eq!(sub.original, vec![1, 2, 4]);
        assert_eq!(sub.local_index(4), Some(2));
        assert_eq!(sub.local_index(3), None);
    }

    #[test]
    fn deg_into_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.deg_into(0, &VertexSet::default()), 0);
        assert_eq!(k4.deg_into(0, &set(&[1, 2, 3])), 3);
        assert_eq!(Graph::cycle(5).deg_into(0, &set(&[1])), 1);
    }

    #[test]
    fn ordered_edge_count_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(k4.ordered_edge_count(&k4.vertices(), &k4.vertices()), 12);
        let c4 = Graph::cycle(4);
        assert_eq!(c4.ordered_edge_count(&set(&[0, 1]), &set(&[2, 3])), 2);
        assert_eq!(
            c4.ordered_edge_count(&VertexSet::default(), &c4.vertices()),
            0
        );
    }

    #[test]
    fn within_distance_examples() {
        let p5 = Graph::path(5);
        assert_eq!(p5.within_distance(&set(&[3]), 0), set(&[3]));
        assert_eq!(p5.within_distance(&set(&[0]), 2), set(&[0, 1, 2]));
        let g = Graph::from_edges(3, [(0, 1)]).unwrap();
        assert_eq!(g.within_distance(&set(&[2]), 10), set(&[2]));
    }

    #[test]
    fn odd_degree_examples() {
        assert_eq!(Graph::complete(4).odd_degree_vertices().len(), 4);
        assert!(Graph::cycle(5).odd_degree_vertices().is_empty());
        assert_eq!(Graph::path(2).odd_degree_vertices(), set(&[0, 1]));
    }

    #[test]
    fn multigraph_degrees_count_loops_twice() {
        let mg = MultiGraph::new(2, vec![(0, 0), (1, 0), (0, 1)]);
        assert_eq!(mg.degrees(), vec![4, 2]);
        assert_eq!(mg.loop_count(), 1);
        assert_eq!(mg.multiplicity(0, 1), 2);
        assert!(!mg.is_simple());
        assert!(mg.to_simple().is_none());
        let simple = MultiGraph::new(3, vec![(0, 1), (2, 1)]);
        assert_eq!(simple.to_simple().unwrap(), Graph::path(3));
    }

    #[test]
    fn vertex_set_algebra() {
        let a = set(&[3, 1, 1, 4]);
        assert_eq!(a.as_slice(), &[1, 3, 4]);
        assert_eq!(a.complement(6), set(&[0, 2, 5]));
        assert_eq!(a.union(&set(&[0, 3])), set(&[0, 1, 3, 4]));
        assert_eq!(a.difference(&set(&[3])), set(&[1, 4]));
        assert_eq!(a.intersection(&set(&[3, 5])), set(&[3]));
        assert!(a.valid_for(5));
        assert!(!a.valid_for(4));
    }
}
