// SPDX-License-Identifier: Apache-2.0

use super::primes::{inv_mod, is_prime};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Rank over GF(p) of a growing symmetric matrix with zero diagonal, one
/// vertex (row and column) at a time.
///
/// Keeps an invertible `W` and `R = W A` in reduced echelon form: each pivot
/// row has a unit at its pivot column, which is zero in every other row, and
/// non-pivot rows of `R` are zero. Appending a vertex costs `O(n^2)`.
#[derive(Clone, Debug)]
pub struct IncrementalRank {
    p: u64,
    n: usize,
    w: Vec<Vec<u64>>,
    r: Vec<Vec<u64>>,
    /// Pivot column of each row, if any.
    pivot_of_row: Vec<Option<usize>>,
    rank: usize,
}

impl IncrementalRank {
    pub fn new(p: u64) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(IncrementalRank {
            p,
            n: 0,
            w: Vec::new(),
            r: Vec::new(),
            pivot_of_row: Vec::new(),
            rank: 0,
        })
    }

    /// Starts from the adjacency matrix of `g`, adding vertices in id order.
    pub fn from_graph(g: &Graph, p: u64) -> Result<Self> {
        let mut s = Self::new(p)?;
        for v in 0..g.n() {
            let earlier: Vec<usize> = g
                .neighbors(v)
                .iter()
                .map(|&w| w as usize)
                .filter(|&w| w < v)
                .collect();
            s.append_vertex(&earlier);
        }
        Ok(s)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn corank(&self) -> usize {
        self.n - self.rank
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    /// Adds a vertex adjacent to the listed existing vertices and returns
    /// the rank increment, which is 0, 1 or 2.
    pub fn append_vertex(&mut self, neighbors: &[usize]) -> usize {
        let mut x = vec![0u64; self.n];
        for &v in neighbors {
            assert!(v < self.n, "neighbor {v} out of range");
            x[v] = 1;
        }
        self.append(&x)
    }

    /// Adds a row and column `x` (entries mod p, over existing vertices)
    /// with zero diagonal, returning the rank increment.
    pub fn append(&mut self, x: &[u64]) -> usize {
        assert_eq!(x.len(), self.n);
        let (p, n) = (self.p, self.n);
        let x: Vec<u64> = x.iter().map(|&v| v % p).collect();
        let support: Vec<usize> = (0..n).filter(|&j| x[j] != 0).collect();

        // extend: R gains column W x, W gains a zero column
        for i in 0..n {
            let u = support
                .iter()
                .fold(0, |acc, &j| (acc + self.w[i][j] * x[j]) % p);
            self.r[i].push(u);
            self.w[i].push(0);
        }
        let mut z = x;
        z.push(0);
        let mut wb = vec![0u64; n + 1];
        wb[n] = 1;

        // reduce the new bottom row against existing pivots
        for i in 0..n {
            if let Some(c) = self.pivot_of_row[i] {
                let f = z[c];
                if f != 0 {
                    let g = p - f;
                    axpy(&mut z, g, &self.r[i], p);
                    axpy(&mut wb, g, &self.w[i], p);
                }
            }
        }
        self.r.push(z);
        self.w.push(wb);
        self.pivot_of_row.push(None);
        self.n += 1;

        let before = self.rank;
        // prefer an old column so that the new column can pivot separately
        if let Some(c) = (0..=n).find(|&c| self.r[n][c] != 0) {
            self.make_pivot(n, c);
        }
        let col_is_pivot = self.pivot_of_row.contains(&Some(n));
        if !col_is_pivot {
            if let Some(i) = (0..=n).find(|&i| self.pivot_of_row[i].is_none() && self.r[i][n] != 0)
            {
                self.make_pivot(i, n);
            }
        }
        self.rank - before
    }

    fn make_pivot(&mut self, row: usize, c: usize) {
        let p = self.p;
        let inv = inv_mod(self.r[row][c], p);
        for v in self.r[row].iter_mut().chain(self.w[row].iter_mut()) {
            *v = *v * inv % p;
        }
        let (pr, pw) = (self.r[row].clone(), self.w[row].clone());
        for i in 0..self.n {
            if i != row && self.r[i][c] != 0 {
                let g = p - self.r[i][c];
                axpy(&mut self.r[i], g, &pr, p);
                axpy(&mut self.w[i], g, &pw, p);
            }
        }
        self.pivot_of_row[row] = Some(c);
        self.rank += 1;
    }

    #[cfg(test)]
    fn check_invariant(&self, a: &[Vec<u64>]) -> bool {
        let p = self.p;
        for i in 0..self.n {
            for j in 0..self.n {
                let wa = (0..self.n).fold(0, |acc, k| (acc + self.w[i][k] * a[k][j]) % p);
                if wa != self.r[i][j] {
                    return false;
                }
            }
            if self.pivot_of_row[i].is_none() && self.r[i].iter().any(|&v| v != 0) {
                return false;
            }
        }
        true
    }
}

fn axpy(a: &mut [u64], g: u64, b: &[u64], p: u64) {
    for (x, &y) in a.iter_mut().zip(b) {
        if y != 0 {
            *x = (*x + g * y) % p;
        }
    }
}
