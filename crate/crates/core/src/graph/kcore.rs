// SPDX-License-Identifier: Apache-2.0

use super::{Graph, InducedSubgraph, VertexSet};

/// Returns the vertex set of the `k`-core and the induced core graph.
///
/// Vertices of degree below `k` are deleted repeatedly until none remain.
/// The surviving set does not depend on the deletion order.
pub fn k_core(g: &Graph, k: usize) -> (VertexSet, InducedSubgraph) {
    assert!(k >= 1, "k must be positive");
    let n = g.n();
    let mut deg = g.degrees();
    let mut removed = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&v| deg[v] < k).collect();
    for &v in &stack {
        removed[v] = true;
    }
    while let Some(v) = stack.pop() {
        for &u in g.neighbors(v) {
            let u = u as usize;
            if removed[u] {
                continue;
            }
            deg[u] -= 1;
            if deg[u] < k {
                removed[u] = true;
                stack.push(u);
            }
        }
    }
    let set = VertexSet::from_sorted((0..n).filter(|&v| !removed[v]).collect());
    let sub = g.induced(&set);
    (set, sub)
}

/// Core number of every vertex, by bucket-queue peeling in `O(n + m)`.
pub fn core_numbers(g: &Graph) -> Vec<usize> {
    let n = g.n();
    if n == 0 {
        return Vec::new();
    }
    let mut deg = g.degrees();
    let max_deg = *deg.iter().max().unwrap();

    // bin[d] = start of the degree-d block in `order`
    let mut bin = vec![0usize; max_deg + 2];
    for &d in &deg {
        bin[d + 1] += 1;
    }
    for d in 1..bin.len() {
        bin[d] += bin[d - 1];
    }
    let mut pos = vec![0usize; n];
    let mut order = vec![0usize; n];
    let mut next = bin.clone();
    for v in 0..n {
        pos[v] = next[deg[v]];
        order[pos[v]] = v;
        next[deg[v]] += 1;
    }

    for i in 0..n {
        let v = order[i];
        for &u in g.neighbors(v) {
            let u = u as usize;
            if deg[u] > deg[v] {
                let du = deg[u];
                let pu = pos[u];
                let pw = bin[du];
                let w = order[pw];
                if u != w {
                    order.swap(pu, pw);
                    pos[u] = pw;
                    pos[w] = pu;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}
