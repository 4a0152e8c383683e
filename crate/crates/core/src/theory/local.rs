// SPDX-License-Identifier: Apache-2.0

//! Empirical total-variation distance between the rooted neighbourhoods of
//! a graph and a truncated Galton-Watson tree.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, VecDeque};

use rand::Rng;

use super::bls::{size_biased, DegreeDist};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Code shared by every ball that is not a tree.
pub const NON_TREE: &str = "*";

fn sample_index<R: Rng + ?Sized>(cdf: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random::<f64>() * cdf[cdf.len() - 1];
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Canonical code of the radius-`depth` ball around `root`, or [`NON_TREE`].
pub fn ball_code(g: &Graph, root: usize, depth: u32) -> String {
    let mut dist: BTreeMap<usize, u32> = BTreeMap::new();
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    let mut order = vec![root];
    dist.insert(root, 0);
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        if du == depth {
            continue;
        }
        for &w in g.neighbors(u) {
            let w = w as usize;
            if let Entry::Vacant(slot) = dist.entry(w) {
                slot.insert(du + 1);
                parent.insert(w, u);
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    let twice_edges: usize = order
        .iter()
        .map(|&u| {
            g.neighbors(u)
                .iter()
                .filter(|&&w| dist.contains_key(&(w as usize)))
                .count()
        })
        .sum();
    if twice_edges / 2 + 1 != order.len() {
        return NON_TREE.to_string();
    }
    let mut codes: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for &u in order.iter().rev() {
        let mut kids = codes.remove(&u).unwrap_or_default();
        kids.sort_unstable();
        let code = format!("({})", kids.concat());
        match parent.get(&u) {
            Some(&p) => codes.entry(p).or_default().push(code),
            None => return code,
        }
    }
    unreachable!("root is always last in reverse BFS order")
}

/// Canonical code of a Galton-Watson tree truncated at `depth`, with root
/// offspring drawn from `root_cdf` and all other offspring from `child_cdf`.
pub fn gw_code<R: Rng + ?Sized>(
    root_cdf: &[f64],
    child_cdf: &[f64],
    depth: u32,
    rng: &mut R,
) -> String {
    fn grow<R: Rng + ?Sized>(cdf: &[f64], child_cdf: &[f64], depth: u32, rng: &mut R) -> String {
        if depth == 0 {
            return "()".to_string();
        }
        let k = sample_index(cdf, rng);
        let mut kids: Vec<String> = (0..k)
            .map(|_| grow(child_cdf, child_cdf, depth - 1, rng))
            .collect();
        kids.sort_unstable();
        format!("({})", kids.concat())
    }
    grow(root_cdf, child_cdf, depth, rng)
}

#[derive(Clone, Debug)]
pub struct LocalTv {
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub graph_samples: usize,
    pub tree_samples: usize,
    pub non_tree_fraction: f64,
}

/// TV distance between two weighted empirical laws over the same code list,
/// computed in integers so identical laws give exactly zero.
fn tv_of(codes: &[&str], wa: &[u32], wb: &[u32]) -> f64 {
    let mut a: BTreeMap<&str, u64> = BTreeMap::new();
    let mut b: BTreeMap<&str, u64> = BTreeMap::new();
    for (i, c) in codes.iter().enumerate() {
        *a.entry(c).or_default() += wa[i] as u64;
        *b.entry(c).or_default() += wb[i] as u64;
    }
    let ta: u64 = a.values().sum();
    let tb: u64 = b.values().sum();
    let diff: u128 = a
        .iter()
        .map(|(c, &x)| (x as u128 * tb as u128).abs_diff(b[c] as u128 * ta as u128))
        .sum();
    diff as f64 / (2.0 * ta as f64 * tb as f64)
}

const BOOTSTRAP_ROUNDS: usize = 200;

/// TV distance between the law of the radius-`(r-1)` ball at a uniform
/// vertex of `g` and the first `r` generations of `T_mu`, with a 95%
/// bootstrap interval. When `samples >= n` every vertex is used once, so
/// the graph side is exact.
pub fn local_tv_distance<R: Rng + ?Sized>(
    g: &Graph,
    mu: &DegreeDist,
    r: u32,
    samples: usize,
    rng: &mut R,
) -> Result<LocalTv> {
    if !(1..=3).contains(&r) {
        return Err(Error::invalid(format!("radius r = {r} must lie in 1..=3")));
    }
    if g.n() == 0 || samples == 0 {
        return Err(Error::invalid(
            "need a nonempty graph and at least one sample",
        ));
    }
    let depth = r - 1;
    let roots: Vec<usize> = if samples >= g.n() {
        (0..g.n()).collect()
    } else {
        (0..samples).map(|_| rng.random_range(0..g.n())).collect()
    };
    let graph_codes: Vec<String> = roots.iter().map(|&v| ball_code(g, v, depth)).collect();
    let root_cdf = mu.cdf_table();
    let child_cdf = if depth >= 2 {
        size_biased(mu)?.cdf_table()
    } else {
        vec![1.0]
    };
    let tree_codes: Vec<String> = (0..samples)
        .map(|_| gw_code(&root_cdf, &child_cdf, depth, rng))
        .collect();

    // one code list, with graph-side and tree-side weights
    let (ng, nt) = (graph_codes.len(), tree_codes.len());
    let codes: Vec<&str> = graph_codes
        .iter()
        .chain(&tree_codes)
        .map(String::as_str)
        .collect();
    let weights = |g: &[u32], t: &[u32]| -> (Vec<u32>, Vec<u32>) {
        let mut wa = g.to_vec();
        wa.resize(ng + nt, 0);
        let mut wb = vec![0u32; ng];
        wb.extend_from_slice(t);
        (wa, wb)
    };
    let (wa, wb) = weights(&vec![1; ng], &vec![1; nt]);
    let estimate = tv_of(&codes, &wa, &wb);

    let resample = |len: usize, rng: &mut R| {
        let mut w = vec![0u32; len];
        for _ in 0..len {
            w[rng.random_range(0..len)] += 1;
        }
        w
    };
    let mut boot: Vec<f64> = (0..BOOTSTRAP_ROUNDS)
        .map(|_| {
            let (wa, wb) = weights(&resample(ng, rng), &resample(nt, rng));
            tv_of(&codes, &wa, &wb)
        })
        .collect();
    boot.sort_by(f64::total_cmp);
    let q = |p: f64| boot[((boot.len() - 1) as f64 * p).round() as usize];
    let non_tree = graph_codes
        .iter()
        .filter(|c| c.as_str() == NON_TREE)
        .count();
    Ok(LocalTv {
        estimate,
        ci_lo: q(0.025).min(estimate),
        ci_hi: q(0.975).max(estimate),
        graph_samples: graph_codes.len(),
        tree_samples: tree_codes.len(),
        non_tree_fraction: non_tree as f64 / graph_codes.len() as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn ball_codes() {
        let star = Graph::star(4);
        assert_eq!(ball_code(&star, 0, 1), "(()()())");
        assert_eq!(ball_code(&star, 1, 2), "((()()))");
        assert_eq!(ball_code(&Graph::complete(4), 0, 1), NON_TREE);
        assert_eq!(ball_code(&Graph::cycle(5), 0, 1), "(()())");
        assert_eq!(ball_code(&Graph::cycle(5), 0, 2), NON_TREE);
    }

    #[test]
    fn k4_is_far_from_trees() {
        let mut rng = RngStream::new(1, 0);
        let tv = local_tv_distance(
            &Graph::complete(4),
            &DegreeDist::point_mass(3),
            2,
            100,
            &mut rng,
        )
        .unwrap();
        assert_eq!(tv.estimate, 1.0);
        assert_eq!(tv.non_tree_fraction, 1.0);
    }

    #[test]
    fn radius_one_is_trivial() {
        let mut rng = RngStream::new(2, 0);
        let tv = local_tv_distance(
            &Graph::complete(4),
            &DegreeDist::point_mass(3),
            1,
            10,
            &mut rng,
        )
        .unwrap();
        assert_eq!(tv.estimate, 0.0);
        assert!(local_tv_distance(
            &Graph::complete(4),
            &DegreeDist::point_mass(3),
            4,
            10,
            &mut rng
        )
        .is_err());
    }
}
