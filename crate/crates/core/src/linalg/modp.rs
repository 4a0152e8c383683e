// SPDX-License-Identifier: Apache-2.0

//! Dense elimination over GF(p) for primes below 2^31.
//!
//! Rows are held as `u64` accumulators and reduced lazily: a row absorbs as
//! many pivot-row updates of size below `p^2` as fit in 64 bits (15 for
//! 30-bit primes) before it is brought back into `[0, p)`.

use super::primes::{inv_mod, is_prime};
use crate::error::{Error, Result};

/// A dense matrix of residues modulo a prime `p < 2^31`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMatrix {
    rows: usize,
    cols: usize,
    p: u64,
    data: Vec<u64>,
}

impl ModMatrix {
    pub fn zeros(rows: usize, cols: usize, p: u64) -> Result<Self> {
        if p >= 1 << 31 || !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(ModMatrix {
            rows,
            cols,
            p,
            data: vec![0; rows * cols],
        })
    }

    pub fn identity(n: usize, p: u64) -> Result<Self> {
        let mut m = Self::zeros(n, n, p)?;
        for i in 0..n {
            m.set(i, i, 1);
        }
        Ok(m)
    }

    /// Reduces integer entries modulo `p`.
    pub fn from_rows(rows: &[Vec<i64>], p: u64) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols, p)?;
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid("ragged matrix rows"));
            }
            for (j, &x) in row.iter().enumerate() {
                m.set(i, j, x.rem_euclid(p as i64) as u64);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: u64) {
        self.data[i * self.cols + j] = v % self.p;
    }

    pub fn transpose(&self) -> ModMatrix {
        let mut t = ModMatrix {
            rows: self.cols,
            cols: self.rows,
            p: self.p,
            data: vec![0; self.data.len()],
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }
}

/// Rank of `a` over GF(p).
pub fn rank_mod_p(a: &ModMatrix) -> usize {
    let mut data = a.data.clone();
    eliminate(&mut data, a.rows, a.cols, a.p)
}

/// `x mod p` for any `x < 2^64`, using a floating-point quotient estimate
/// that is off by at most one.
#[inline(always)]
fn reduce(x: u64, p: u64, pinv: f64) -> u64 {
    let q = (x as f64 * pinv) as u64;
    let r = x.wrapping_sub(q.wrapping_mul(p)) as i64;
    let p = p as i64;
    (if r < 0 {
        r + p
    } else if r >= p {
        r - p
    } else {
        r
    }) as u64
}

type Axpy = fn(&mut [u64], u32, &[u32]);

#[inline(always)]
fn axpy_body(acc: &mut [u64], g: u32, b: &[u32]) {
    let g = g as u64;
    for (a, &x) in acc.iter_mut().zip(b) {
        *a = a.wrapping_add(g * x as u64);
    }
}

fn axpy_portable(acc: &mut [u64], g: u32, b: &[u32]) {
    axpy_body(acc, g, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn axpy_avx2(acc: &mut [u64], g: u32, b: &[u32]) {
    axpy_body(acc, g, b)
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx512f")]
unsafe fn axpy_avx512(acc: &mut [u64], g: u32, b: &[u32]) {
    axpy_body(acc, g, b)
}

fn select_axpy() -> Axpy {
    #[cfg(target_arch = "x86_64")]
    {
        if std::arch::is_x86_feature_detected!("avx512f") {
            // SAFETY: the feature was detected at runtime.
            return |a, g, b| unsafe { axpy_avx512(a, g, b) };
        }
        if std::arch::is_x86_feature_detected!("avx2") {
            // SAFETY: the feature was detected at runtime.
            return |a, g, b| unsafe { axpy_avx2(a, g, b) };
        }
    }
    axpy_portable
}

/// Rank of the row-major `rows x cols` matrix in `data` (entries in
/// `[0, p)`), destroying `data`. Columns are processed left to right, so
/// callers order columns sparse-first.
pub(crate) fn eliminate(data: &mut [u64], rows: usize, cols: usize, p: u64) -> usize {
    echelonize(data, rows, cols, cols, p).pivots.len()
}

/// Pivot structure left behind by [`echelonize`].
pub(crate) struct Echelon {
    /// `(row, col)` in elimination order; columns are increasing.
    pub pivots: Vec<(usize, usize)>,
    /// Rows that received no pivot; zero on the pivot-eligible columns.
    pub rest: Vec<usize>,
}

/// Row echelon form over the first `pivot_cols` columns, carrying the
/// remaining columns along. Rows stay in place; every entry of `data` is
/// reduced mod `p` on return.
pub(crate) fn echelonize(
    data: &mut [u64],
    rows: usize,
    cols: usize,
    pivot_cols: usize,
    p: u64,
) -> Echelon {
    assert!(p < 1 << 31);
    let pinv = 1.0 / p as f64;
    let lazy = ((u64::MAX - p) / ((p - 1) * (p - 1)).max(1)).min(255) as u8;
    let axpy = select_axpy();
    let mut remaining: Vec<usize> = (0..rows).collect();
    let mut pending = vec![0u8; rows];
    let mut pivot = vec![0u32; cols];
    let mut nz: Vec<usize> = Vec::with_capacity(cols);
    let mut hits: Vec<usize> = Vec::new();
    let mut pivots = Vec::new();

    for c in 0..pivot_cols.min(cols) {
        if remaining.is_empty() {
            break;
        }
        hits.clear();
        for (pos, &r) in remaining.iter().enumerate() {
            let x = &mut data[r * cols + c];
            if *x != 0 {
                *x = reduce(*x, p, pinv);
                if *x != 0 {
                    hits.push(pos);
                }
            }
        }
        let Some(&first) = hits.first() else {
            continue;
        };
        let pr = remaining[first];
        nz.clear();
        for j in c..cols {
            let v = reduce(data[pr * cols + j], p, pinv);
            pivot[j] = v as u32;
            if v != 0 && j > c {
                nz.push(j);
            }
        }
        let inv = inv_mod(pivot[c] as u64, p);
        let sparse = nz.len() * 4 < cols - c;
        for &h in &hits[1..] {
            let r = remaining[h];
            let row = &mut data[r * cols..(r + 1) * cols];
            let g = ((p - row[c]) * inv % p) as u32;
            if sparse {
                for &j in &nz {
                    row[j] = row[j].wrapping_add(g as u64 * pivot[j] as u64);
                }
            } else {
                axpy(&mut row[c + 1..], g, &pivot[c + 1..]);
            }
            row[c] = 0;
            pending[r] += 1;
            if pending[r] == lazy {
                for x in &mut row[c + 1..] {
                    *x = reduce(*x, p, pinv);
                }
                pending[r] = 0;
            }
        }
        remaining.swap_remove(first);
        pivots.push((pr, c));
    }
    for x in data[..rows * cols].iter_mut() {
        *x = reduce(*x, p, pinv);
    }
    Echelon {
        pivots,
        rest: remaining,
    }
}
