// SPDX-License-Identifier: Apache-2.0

use num_bigint::BigInt;
use num_traits::Zero;

use super::certificate::IntegerMatrix;
use crate::error::{Error, Result};

/// Largest dimension [`fraction_free_rank`] accepts by default.
pub const DEFAULT_FRACTION_FREE_CAP: usize = 64;

/// Exact rational rank by Bareiss elimination with arbitrary-precision
/// intermediates. Every entry after step `r` is an `(r+1)`-minor of the
/// input, so the divisions are exact.
pub fn fraction_free_rank<M: IntegerMatrix + ?Sized>(a: &M, cap: usize) -> Result<usize> {
    let (rows, cols) = (a.rows(), a.cols());
    let dim = rows.max(cols);
    if dim > cap {
        return Err(Error::cap(
            "fraction-free dimension",
            dim as u64,
            cap as u64,
        ));
    }
    let mut m: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| (0..cols).map(|j| BigInt::from(a.entry(i, j))).collect())
        .collect();
    let mut prev = BigInt::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let (top, rest) = m.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let piv = &pivot_row[c];
        for row in rest.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..cols {
                let x = piv * &row[j] - &f * &pivot_row[j];
                row[j] = x / &prev;
            }
        }
        prev = piv.clone();
        r += 1;
    }
    Ok(r)
}
