// SPDX-License-Identifier: Apache-2.0

//! Multi-modular rank over the rationals with a certainty tag.

use rand::Rng;
use serde::Serialize;

use super::modp::eliminate;
use super::primes::{is_prime, prime_count_estimate, random_prime, PRIME_BITS};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Read access to an integer matrix.
pub trait IntegerMatrix {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> i64;

    /// Calls `f(j, a_ij)` for every nonzero entry of row `i`.
    fn for_each_nonzero(&self, i: usize, f: &mut dyn FnMut(usize, i64)) {
        for j in 0..self.cols() {
            let x = self.entry(i, j);
            if x != 0 {
                f(j, x);
            }
        }
    }
}

impl IntegerMatrix for Graph {
    fn rows(&self) -> usize {
        self.n()
    }

    fn cols(&self) -> usize {
        self.n()
    }

    fn entry(&self, i: usize, j: usize) -> i64 {
        self.has_edge(i, j) as i64
    }

    fn for_each_nonzero(&self, i: usize, f: &mut dyn FnMut(usize, i64)) {
        for &j in self.neighbors(i) {
            f(j as usize, 1);
        }
    }
}

/// A dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i64>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("ragged matrix rows"));
        }
        Ok(IntMatrix {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn adjacency(g: &Graph) -> Self {
        let mut m = Self::zeros(g.n(), g.n());
        for (u, v) in g.edges() {
            m.set(u, v, 1);
            m.set(v, u, 1);
        }
        m
    }

    pub fn set(&mut self, i: usize, j: usize, x: i64) {
        self.data[i * self.cols + j] = x;
    }
}

impl IntegerMatrix for IntMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn entry(&self, i: usize, j: usize) -> i64 {
        self.data[i * self.cols + j]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankMethod {
    Gf2,
    ModP,
    FractionFree,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certainty {
    Exact,
    LowerBound,
}

/// The outcome of a rank computation and how far it can be trusted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankCertificate {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub method: RankMethod,
    pub primes: Vec<u64>,
    pub certainty: Certainty,
    /// Upper bound on the probability, over the prime draw, that the
    /// rational rank exceeds `rank`. Zero when exact.
    pub failure_bound: f64,
}

impl RankCertificate {
    pub fn corank(&self) -> usize {
        self.rows.min(self.cols) - self.rank
    }

    /// Square and full rank. The empty matrix counts as nonsingular.
    pub fn is_nonsingular(&self) -> bool {
        self.rows == self.cols && self.rank == self.rows
    }

    pub(crate) fn exact(rows: usize, cols: usize, rank: usize, method: RankMethod) -> Self {
        RankCertificate {
            rows,
            cols,
            rank,
            method,
            primes: Vec::new(),
            certainty: Certainty::Exact,
            failure_bound: 0.0,
        }
    }
}

/// `log2` of the Hadamard bound `prod_i max(1, |row_i|)`, which bounds every
/// minor of the matrix.
pub(crate) fn log2_hadamard<M: IntegerMatrix + ?Sized>(a: &M) -> f64 {
    (0..a.rows())
        .map(|i| {
            let mut sq = 0.0f64;
            a.for_each_nonzero(i, &mut |_, x| sq += (x as f64) * (x as f64));
            0.5 * sq.max(1.0).log2()
        })
        .sum()
}

/// Rank modulo `p`, with rows and columns eliminated sparse-first.
pub(crate) fn rank_mod_prime<M: IntegerMatrix + ?Sized>(a: &M, p: u64) -> usize {
    let (rows, cols) = (a.rows(), a.cols());
    let mut row_nnz = vec![0usize; rows];
    let mut col_nnz = vec![0usize; cols];
    for (i, rn) in row_nnz.iter_mut().enumerate() {
        a.for_each_nonzero(i, &mut |j, _| {
            *rn += 1;
            col_nnz[j] += 1;
        });
    }
    let mut row_order: Vec<usize> = (0..rows).collect();
    row_order.sort_by_key(|&i| row_nnz[i]);
    let mut col_order: Vec<usize> = (0..cols).collect();
    col_order.sort_by_key(|&j| col_nnz[j]);
    let mut col_pos = vec![0usize; cols];
    for (pos, &j) in col_order.iter().enumerate() {
        col_pos[j] = pos;
    }
    let mut data = vec![0u64; rows * cols];
    for (r, &i) in row_order.iter().enumerate() {
        let row = &mut data[r * cols..(r + 1) * cols];
        a.for_each_nonzero(i, &mut |j, x| {
            row[col_pos[j]] = x.rem_euclid(p as i64) as u64
        });
    }
    eliminate(&mut data, rows, cols, p)
}

/// Rational rank from `num_primes` random 30-bit primes; see
/// [`rational_rank_with_primes`].
pub fn rational_rank<M, R>(a: &M, num_primes: usize, rng: &mut R) -> RankCertificate
where
    M: IntegerMatrix + ?Sized,
    R: Rng + ?Sized,
{
    let mut primes: Vec<u64> = Vec::with_capacity(num_primes);
    while primes.len() < num_primes {
        let p = random_prime(rng);
        if !primes.contains(&p) {
            primes.push(p);
        }
    }
    rational_rank_with_primes(a, &primes).expect("random primes are valid")
}

/// The largest rank modulo the given primes.
///
/// Reduction mod `p` never raises rank, so the result is a lower bound on
/// the rational rank, and exact when it reaches `min(rows, cols)`. Otherwise
/// the rational rank is larger only if every prime divides one fixed nonzero
/// minor `D`. With `|D|` at most the Hadamard bound `H`, at most
/// `log2(H) / (PRIME_BITS - 1)` primes of this size divide `D`, which gives
/// the reported failure bound when the primes are drawn uniformly.
pub fn rational_rank_with_primes<M: IntegerMatrix + ?Sized>(
    a: &M,
    primes: &[u64],
) -> Result<RankCertificate> {
    if primes.is_empty() {
        return Err(Error::invalid("at least one prime is required"));
    }
    if let Some(&p) = primes.iter().find(|&&p| p >= 1 << 31 || !is_prime(p)) {
        return Err(Error::NotPrime(p));
    }
    let full = a.rows().min(a.cols());
    let mut rank = 0;
    let mut used = Vec::new();
    for &p in primes {
        used.push(p);
        rank = rank.max(rank_mod_prime(a, p));
        if rank == full {
            break;
        }
    }
    let (certainty, failure_bound) = if rank == full {
        (Certainty::Exact, 0.0)
    } else {
        let divisors = log2_hadamard(a) / f64::from(PRIME_BITS - 1);
        let per_prime = (divisors / prime_count_estimate()).min(1.0);
        (Certainty::LowerBound, per_prime.powi(used.len() as i32))
    };
    Ok(RankCertificate {
        rows: a.rows(),
        cols: a.cols(),
        rank,
        method: RankMethod::ModP,
        primes: used,
        certainty,
        failure_bound,
    })
}
