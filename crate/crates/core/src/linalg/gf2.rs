// SPDX-License-Identifier: Apache-2.0

//! Bit-packed linear algebra over GF(2).

use crate::graph::Graph;

const W: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(W)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s: String = (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect();
        write!(f, "BitVec({s})")
    }
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / W] >> (i % W) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        let m = 1u64 << (i % W);
        if b {
            self.words[i / W] |= m;
        } else {
            self.words[i / W] &= !m;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len);
        self.words[i / W] ^= 1u64 << (i % W);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        xor_words(&mut self.words, &other.words);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * W + b)
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }
}

#[inline]
fn xor_words(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

/// A dense matrix over GF(2) with rows packed 64 entries per word. Padding
/// bits past the last column are always zero.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let s: String = (0..self.cols)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Adjacency matrix of `g`.
    pub fn adjacency(g: &Graph) -> Self {
        let n = g.n();
        let mut m = Self::zeros(n, n);
        for v in 0..n {
            for &w in g.neighbors(v) {
                m.set(v, w as usize, true);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<bool>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.stride + j / W] >> (j % W) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, b: bool) {
        assert!(i < self.rows && j < self.cols, "({i}, {j}) out of range");
        let m = 1u64 << (j % W);
        let w = &mut self.data[i * self.stride + j / W];
        if b {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec {
            len: self.cols,
            words: self.row_words(i).to_vec(),
        }
    }

    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    /// `self[dst] ^= self[src]`.
    fn xor_rows(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..(dst + 1) * s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..(src + 1) * s])
        };
        xor_words(a, b);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for k in 0..s {
            self.data.swap(a * s + k, b * s + k);
        }
    }

    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len, self.cols);
        let mut out = BitVec::zeros(self.rows);
        for i in 0..self.rows {
            let ones: u32 = self
                .row_words(i)
                .iter()
                .zip(&v.words)
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if ones % 2 == 1 {
                out.set(i, true);
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in self.row(i).iter_ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// Reduces to row echelon form, optionally clearing above pivots and
    /// mirroring every row operation on `shadow`. Returns the pivot columns.
    fn echelon(&mut self, full: bool, mut shadow: Option<&mut BitMatrix>) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let (word, bit) = (c / W, 1u64 << (c % W));
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + word] & bit != 0)
            else {
                continue;
            };
            self.swap_rows(r, p);
            if let Some(s) = shadow.as_deref_mut() {
                s.swap_rows(r, p);
            }
            let start = if full { 0 } else { r + 1 };
            for i in start..self.rows {
                if i != r && self.data[i * self.stride + word] & bit != 0 {
                    self.xor_rows(i, r);
                    if let Some(s) = shadow.as_deref_mut() {
                        s.xor_rows(i, r);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }
}

/// Rank over GF(2).
pub fn rank_gf2(a: &BitMatrix) -> usize {
    a.clone().echelon(false, None).len()
}

/// A basis of `{v : Av = 0}` with one vector per free column.
pub fn nullspace_basis_gf2(a: &BitMatrix) -> Vec<BitVec> {
    let mut r = a.clone();
    let pivots = r.echelon(true, None);
    kernel_from_rref(&r, &pivots)
}

fn kernel_from_rref(r: &BitMatrix, pivots: &[usize]) -> Vec<BitVec> {
    let mut is_pivot = vec![false; r.cols];
    for &c in pivots {
        is_pivot[c] = true;
    }
    (0..r.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = BitVec::unit(r.cols, f);
            for (row, &pc) in pivots.iter().enumerate() {
                if r.get(row, f) {
                    v.set(pc, true);
                }
            }
            v
        })
        .collect()
}

/// Solves `Ax = s` over GF(2) for a fixed square `A` and many right-hand
/// sides.
///
/// Elimination records a transform `T` with `TA = R` in reduced echelon
/// form. Rows of `T` beyond the rank span the left kernel, so `Ax = s` is
/// solvable exactly when the *signature* of `s` (its products with those
/// rows) vanishes; signatures are linear, so for sparse `s` they are sums
/// of per-coordinate signatures.
#[derive(Clone, Debug)]
pub struct Gf2Solver {
    n: usize,
    transform: BitMatrix,
    pivots: Vec<usize>,
    kernel: Vec<BitVec>,
    /// Column `i` of the left-kernel block of the transform, one per `i`.
    signatures: Vec<BitVec>,
    /// Image of `e_i` under a fixed linear right inverse on the column
    /// space, built from the pivot rows of the transform.
    particular: Vec<BitVec>,
}

impl Gf2Solver {
    pub fn new(a: &BitMatrix) -> Self {
        assert_eq!(a.rows, a.cols, "square matrix required");
        let n = a.rows;
        let mut r = a.clone();
        let mut t = BitMatrix::identity(n);
        let pivots = r.echelon(true, Some(&mut t));
        let rank = pivots.len();
        let kernel = kernel_from_rref(&r, &pivots);
        let tt = t.transpose();
        let mut signatures = Vec::with_capacity(n);
        let mut particular = Vec::with_capacity(n);
        for i in 0..n {
            // column i of t is row i of tt
            let col = tt.row(i);
            let mut sig = BitVec::zeros(n - rank);
            let mut x = BitVec::zeros(n);
            for row in col.iter_ones() {
                if row < rank {
                    x.set(pivots[row], true);
                } else {
                    sig.set(row - rank, true);
                }
            }
            signatures.push(sig);
            particular.push(x);
        }
        Gf2Solver {
            n,
            transform: t,
            pivots,
            kernel,
            signatures,
            particular,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn kernel(&self) -> &[BitVec] {
        &self.kernel
    }

    pub fn signature(&self, i: usize) -> &BitVec {
        &self.signatures[i]
    }

    /// Solves `Ax = e_i` when `signature(i)` is zero. The map is linear, so
    /// `particular(i) + particular(j)` solves `Ax = e_i + e_j` whenever the
    /// two signatures agree.
    pub fn particular(&self, i: usize) -> &BitVec {
        &self.particular[i]
    }

    /// Some solution of `Ax = s`, or `None` if there is none.
    pub fn solve(&self, s: &BitVec) -> Option<BitVec> {
        assert_eq!(s.len, self.n);
        let rank = self.rank();
        let ts = self.transform.mul_vec(s);
        if ts.iter_ones().any(|r| r >= rank) {
            return None;
        }
        let mut x = BitVec::zeros(self.n);
        for r in ts.iter_ones() {
            x.set(self.pivots[r], true);
        }
        Some(x)
    }
}
