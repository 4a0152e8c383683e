// SPDX-License-Identifier: Apache-2.0

//! Ranks of a nested family of principal submatrices: a fixed base index
//! set extended by border indices one at a time.
//!
//! The base block is eliminated once with the border columns carried along.
//! With `r` base pivots, the rank after `i` border indices is `r` plus the
//! rank of a residual matrix of side `(base corank) + i`.

use super::certificate::{log2_hadamard, Certainty, IntegerMatrix, RankCertificate, RankMethod};
use super::modp::{echelonize, eliminate};
use super::primes::{inv_mod, is_prime, prime_count_estimate, PRIME_BITS};
use crate::error::{Error, Result};

fn check_border<M: IntegerMatrix + ?Sized>(a: &M, border: &[usize]) -> Result<Vec<bool>> {
    if a.rows() != a.cols() {
        return Err(Error::invalid("principal submatrices need a square matrix"));
    }
    let mut in_border = vec![false; a.rows()];
    for &v in border {
        if v >= a.rows() || std::mem::replace(&mut in_border[v], true) {
            return Err(Error::invalid(format!(
                "border index {v} is out of range or repeated"
            )));
        }
    }
    Ok(in_border)
}

/// Rank mod `p` of `a[U_i, U_i]` for `i = 0..=border.len()`, where `U_0` is
/// the complement of `border` and `U_i` adds the first `i` border indices.
pub fn principal_ranks_mod_p<M: IntegerMatrix + ?Sized>(
    a: &M,
    border: &[usize],
    p: u64,
) -> Result<Vec<usize>> {
    if p >= 1 << 31 || !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let in_border = check_border(a, border)?;
    let n = a.rows();
    let t = border.len();
    let mut base: Vec<usize> = (0..n).filter(|&v| !in_border[v]).collect();
    let nnz = |i: usize| {
        let mut c = 0;
        a.for_each_nonzero(i, &mut |_, _| c += 1);
        c
    };
    let keys: Vec<usize> = (0..n).map(nnz).collect();
    base.sort_by_key(|&v| keys[v]);
    let nb = base.len();
    let cols = nb + t;
    // column position of every index: base in sorted order, then the border
    let mut pos = vec![0usize; n];
    for (c, &v) in base.iter().chain(border).enumerate() {
        pos[v] = c;
    }
    let modp = |x: i64| x.rem_euclid(p as i64) as u64;

    let mut data = vec![0u64; nb * cols];
    for (r, &v) in base.iter().enumerate() {
        let row = &mut data[r * cols..(r + 1) * cols];
        a.for_each_nonzero(v, &mut |j, x| row[pos[j]] = modp(x));
    }
    let ech = echelonize(&mut data, nb, cols, nb, p);
    let r0 = ech.pivots.len();
    let mut is_pivot_col = vec![false; nb];
    for &(_, c) in &ech.pivots {
        is_pivot_col[c] = true;
    }
    let free: Vec<usize> = (0..nb).filter(|&c| !is_pivot_col[c]).collect();

    // border rows reduced against the base pivots
    let mut z = vec![vec![0u64; cols]; t];
    for (zi, &v) in z.iter_mut().zip(border) {
        a.for_each_nonzero(v, &mut |j, x| zi[pos[j]] = modp(x));
        for &(pr, c) in &ech.pivots {
            let f = zi[c];
            if f == 0 {
                continue;
            }
            let row = &data[pr * cols..(pr + 1) * cols];
            let g = (p - f) * inv_mod(row[c], p) % p;
            for j in c..cols {
                if row[j] != 0 {
                    zi[j] = (zi[j] + g * row[j]) % p;
                }
            }
        }
    }

    let g0 = free.len();
    let mut ranks = Vec::with_capacity(t + 1);
    for i in 0..=t {
        // rows: base rows without a pivot, then z_1..z_i; cols: free, border 1..i
        let side = g0 + i;
        let mut m = vec![0u64; side * side];
        for (k, &r) in ech.rest.iter().enumerate() {
            for l in 0..i {
                m[k * side + g0 + l] = data[r * cols + nb + l];
            }
        }
        for (k, zk) in z[..i].iter().enumerate() {
            let row = &mut m[(g0 + k) * side..(g0 + k + 1) * side];
            for (slot, &c) in free.iter().enumerate() {
                row[slot] = zk[c];
            }
            row[g0..g0 + i].copy_from_slice(&zk[nb..nb + i]);
        }
        ranks.push(r0 + eliminate(&mut m, side, side, p));
    }
    Ok(ranks)
}

/// Multi-prime version of [`principal_ranks_mod_p`]: one certificate per
/// prefix, each holding the largest rank seen over the primes used.
pub fn principal_ranks<M: IntegerMatrix + ?Sized>(
    a: &M,
    border: &[usize],
    primes: &[u64],
) -> Result<Vec<RankCertificate>> {
    if primes.is_empty() {
        return Err(Error::invalid("at least one prime is required"));
    }
    check_border(a, border)?;
    let base = a.rows() - border.len();
    let mut best = vec![0usize; border.len() + 1];
    let mut used = Vec::new();
    for &p in primes {
        used.push(p);
        for (b, r) in best.iter_mut().zip(principal_ranks_mod_p(a, border, p)?) {
            *b = (*b).max(r);
        }
        if best.iter().enumerate().all(|(i, &r)| r == base + i) {
            break;
        }
    }
    // minors of a principal submatrix are minors of `a`
    let per_prime =
        (log2_hadamard(a) / f64::from(PRIME_BITS - 1) / prime_count_estimate()).min(1.0);
    Ok(best
        .into_iter()
        .enumerate()
        .map(|(i, rank)| {
            let side = base + i;
            let mut c = RankCertificate::exact(side, side, rank, RankMethod::ModP);
            c.primes = used.clone();
            if rank < side {
                c.certainty = Certainty::LowerBound;
                c.failure_bound = per_prime.powi(used.len() as i32);
            }
            c
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, VertexSet};
    use crate::linalg::certificate::rank_mod_prime;
    use crate::linalg::IntMatrix;
    use crate::rng::RngStream;
    use rand::seq::SliceRandom;
    use rand::Rng;

    fn recompute(g: &Graph, border: &[usize], p: u64) -> Vec<usize> {
        let mut keep: Vec<bool> = vec![true; g.n()];
        for &v in border {
            keep[v] = false;
        }
        let mut out = Vec::new();
        for i in 0..=border.len() {
            let mask: Vec<bool> = (0..g.n())
                .map(|v| keep[v] || border[..i].contains(&v))
                .collect();
            let sub = g.induced(&VertexSet::from_mask(&mask));
            out.push(rank_mod_prime(&sub.graph, p));
        }
        out
    }

    #[test]
    fn matches_recomputation_on_random_graphs() {
        let mut rng = RngStream::new(11, 0);
        for trial in 0..300 {
            let n = rng.random_range(1..60);
            let g = crate::samplers::gnp(n, rng.random_range(0.02..0.3), &mut rng);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let t = rng.random_range(0..=n.min(12));
            let border = &order[..t];
            let p = if trial % 2 == 0 { 3 } else { 1_000_003 };
            assert_eq!(
                principal_ranks_mod_p(&g, border, p).unwrap(),
                recompute(&g, border, p)
            );
        }
    }

    #[test]
    fn whole_matrix_as_border() {
        // empty base: ranks of the leading principal submatrices of C_8
        let g = Graph::cycle(8);
        let border: Vec<usize> = (0..8).collect();
        let r = principal_ranks_mod_p(&g, &border, 10007).unwrap();
        assert_eq!(r, vec![0, 0, 2, 2, 4, 4, 6, 6, 6]);
    }

    #[test]
    fn non_graph_entries() {
        let a = IntMatrix::from_rows(&[vec![2, 1, 0], vec![1, 5, 3], vec![0, 3, -1]]).unwrap();
        // base {1}; border 0 then 2
        let r = principal_ranks_mod_p(&a, &[0, 2], 10007).unwrap();
        assert_eq!(r, vec![1, 2, 3]);
    }

    #[test]
    fn certificates_take_the_best_prime() {
        // rank 4 over Q, but K_4 minus nothing has determinant -3: rank 3 mod 3
        let g = Graph::complete(4);
        let c = principal_ranks(&g, &[3], &[3, 10007]).unwrap();
        assert_eq!(c[1].rank, 4);
        assert_eq!(c[1].certainty, Certainty::Exact);
        assert_eq!(c[1].primes, vec![3, 10007]);
        let c = principal_ranks(&Graph::cycle(4), &[0], &[10007, 10009]).unwrap();
        assert_eq!((c[0].rank, c[1].rank), (2, 2));
        assert_eq!(c[1].certainty, Certainty::LowerBound);
        assert!(principal_ranks(&g, &[4], &[10007]).is_err());
        assert!(principal_ranks(&g, &[1, 1], &[10007]).is_err());
    }
}
