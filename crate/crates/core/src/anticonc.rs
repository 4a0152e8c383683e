// SPDX-License-Identifier: Apache-2.0

//! Atom probabilities of linear and quadratic forms of a uniform point on
//! the Boolean slice `{x in {0,1}^n : sum x = d}`.
//!
//! Exact computations take rational inputs and compare sums exactly after
//! scaling everything by a common denominator.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::index;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats::{wilson, Proportion};

/// Largest `C(n, d)` that exact enumeration accepts.
pub const ENUMERATION_CAP: u128 = 10_000_000;

/// Confidence level of Monte Carlo intervals.
pub const MC_CONFIDENCE: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SliceSpec {
    pub n: usize,
    pub d: usize,
}

impl SliceSpec {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d > n {
            return Err(Error::invalid(format!("d = {d} exceeds n = {n}")));
        }
        Ok(SliceSpec { n, d })
    }

    pub fn size(&self) -> u128 {
        binomial(self.n, self.d)
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::invalid(format!(
                "vector of length {len} for n = {}",
                self.n
            )));
        }
        Ok(())
    }
}

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| {
        // acc * (n - i) / (i + 1) is exact; cancel first so it fits
        let g = acc.gcd(&((i + 1) as u128));
        (acc / g) * ((n - i) as u128 / ((i + 1) as u128 / g))
    })
}

/// Exact rational value, or a Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq)]
pub enum Atom {
    Exact(BigRational),
    Estimate(Proportion),
}

impl Atom {
    pub fn value(&self) -> f64 {
        match self {
            Atom::Exact(q) => q.to_f64().unwrap_or(f64::NAN),
            Atom::Estimate(p) => p.estimate,
        }
    }
}

pub fn rational(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

pub fn rationals(xs: &[i64]) -> Vec<BigRational> {
    xs.iter().map(|&x| rational(x)).collect()
}

/// Scales rationals by the least common denominator. Returns the integers
/// and the denominator; fails if any scaled value leaves `i64`.
fn to_integers(values: &[&BigRational]) -> Result<(Vec<i64>, BigInt)> {
    let lcm = values
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints = values
        .iter()
        .map(|q| {
            (q.numer() * (&lcm / q.denom()))
                .to_i64()
                .ok_or_else(|| Error::invalid("scaled rational input exceeds 64 bits"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((ints, lcm))
}

/// Advances `idx` to the next `k`-subset of `0..n` in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
        return false;
    };
    idx[i] += 1;
    for j in i + 1..k {
        idx[j] = idx[j - 1] + 1;
    }
    true
}

fn check_cap(spec: SliceSpec) -> Result<u128> {
    let size = spec.size();
    if size > ENUMERATION_CAP {
        return Err(Error::cap("slice enumeration", size, ENUMERATION_CAP));
    }
    Ok(size)
}

/// Calls `f` with the ones of every point of the slice.
fn for_each_point(spec: SliceSpec, mut f: impl FnMut(&[usize])) {
    let mut idx: Vec<usize> = (0..spec.d).collect();
    loop {
        f(&idx);
        if !next_combination(&mut idx, spec.n) {
            break;
        }
    }
}

/// Law of `v^T x` by enumeration, as `(value, probability)` pairs in
/// increasing value order.
pub fn slice_law_exact(
    v: &[BigRational],
    spec: SliceSpec,
) -> Result<Vec<(BigRational, BigRational)>> {
    spec.check_len(v.len())?;
    let size = check_cap(spec)?;
    let refs: Vec<&BigRational> = v.iter().collect();
    let (ints, denom) = to_integers(&refs)?;
    let mut counts: BTreeMap<i128, u128> = BTreeMap::new();
    for_each_point(spec, |ones| {
        let s: i128 = ones.iter().map(|&i| ints[i] as i128).sum();
        *counts.entry(s).or_default() += 1;
    });
    let total = BigInt::from(size);
    Ok(counts
        .into_iter()
        .map(|(s, c)| {
            (
                BigRational::new(BigInt::from(s), denom.clone()),
                BigRational::new(BigInt::from(c), total.clone()),
            )
        })
        .collect())
}

/// `Pr(v^T x = target)` by enumerating the slice.
pub fn slice_atom_exact(
    v: &[BigRational],
    spec: SliceSpec,
    target: &BigRational,
) -> Result<BigRational> {
    spec.check_len(v.len())?;
    let size = check_cap(spec)?;
    let mut refs: Vec<&BigRational> = v.iter().collect();
    refs.push(target);
    let (ints, _) = to_integers(&refs)?;
    let t = ints[spec.n] as i128;
    let mut hits = 0u128;
    for_each_point(spec, |ones| {
        if ones.iter().map(|&i| ints[i] as i128).sum::<i128>() == t {
            hits += 1;
        }
    });
    Ok(BigRational::new(BigInt::from(hits), BigInt::from(size)))
}

/// Counts of `v^T x` over the slice by dynamic programming over
/// coordinates, with no enumeration cap. Returns the counts and `C(n, d)`.
pub fn slice_counts_dp(v: &[i64], spec: SliceSpec) -> Result<(BTreeMap<i64, u128>, u128)> {
    spec.check_len(v.len())?;
    if spec.n > 128 {
        return Err(Error::cap(
            "dynamic-programming slice length",
            spec.n as u64,
            128u64,
        ));
    }
    // layer[j] maps partial sums to the number of j-subsets reaching them
    let mut layer: Vec<HashMap<i64, u128>> = vec![HashMap::new(); spec.d + 1];
    layer[0].insert(0, 1);
    for (i, &vi) in v.iter().enumerate() {
        for j in (1..=spec.d.min(i + 1)).rev() {
            let (lo, hi) = layer.split_at_mut(j);
            for (&s, &c) in &lo[j - 1] {
                let slot = hi[0].entry(s + vi).or_default();
                *slot = slot
                    .checked_add(c)
                    .ok_or_else(|| Error::invalid("count overflow"))?;
            }
        }
    }
    let counts: BTreeMap<i64, u128> = layer.pop().unwrap().into_iter().collect();
    Ok((counts, spec.size()))
}

/// Largest atom of `v^T x`, exactly, via [`slice_counts_dp`].
pub fn slice_max_atom_dp(v: &[i64], spec: SliceSpec) -> Result<BigRational> {
    let (counts, total) = slice_counts_dp(v, spec)?;
    let max = counts.values().copied().max().unwrap_or(0);
    Ok(BigRational::new(BigInt::from(max), BigInt::from(total)))
}

fn uniform_point<R: Rng + ?Sized>(spec: SliceSpec, rng: &mut R) -> Vec<usize> {
    index::sample(rng, spec.n, spec.d).into_vec()
}

/// Monte Carlo `Pr(v^T x = target)` with a 99% Wilson interval.
pub fn slice_atom_mc<R: Rng + ?Sized>(
    v: &[BigRational],
    spec: SliceSpec,
    target: &BigRational,
    trials: u64,
    rng: &mut R,
) -> Result<Proportion> {
    spec.check_len(v.len())?;
    if trials == 0 {
        return Err(Error::invalid("trials must be positive"));
    }
    let mut refs: Vec<&BigRational> = v.iter().collect();
    refs.push(target);
    let (ints, _) = to_integers(&refs)?;
    let t = ints[spec.n] as i128;
    let mut hits = 0;
    for _ in 0..trials {
        let s: i128 = uniform_point(spec, rng)
            .iter()
            .map(|&i| ints[i] as i128)
            .sum();
        if s == t {
            hits += 1;
        }
    }
    Ok(wilson(hits, trials, MC_CONFIDENCE))
}

/// Monte Carlo estimate of the largest atom of `v^T x`: the frequency of
/// the most common value, with the Wilson interval of that value's count.
pub fn slice_max_atom_mc<R: Rng + ?Sized>(
    v: &[i64],
    spec: SliceSpec,
    trials: u64,
    rng: &mut R,
) -> Result<Proportion> {
    spec.check_len(v.len())?;
    let mut counts: HashMap<i128, u64> = HashMap::new();
    for _ in 0..trials {
        let s: i128 = uniform_point(spec, rng).iter().map(|&i| v[i] as i128).sum();
        *counts.entry(s).or_default() += 1;
    }
    let max = counts.values().copied().max().unwrap_or(0);
    Ok(wilson(max, trials, MC_CONFIDENCE))
}

/// Draws `x` on the slice by pairing: a uniform injection `pi` of `2d`
/// indices and signs `xi`; `x[pi(i)] = 1` if `xi_i = +1`, else
/// `x[pi(i + d)] = 1`. The marginal law of `x` is uniform on the slice.
pub fn coupled_slice_sampler<R: Rng + ?Sized>(spec: SliceSpec, rng: &mut R) -> Result<Vec<bool>> {
    let (n, d) = (spec.n, spec.d);
    if 2 * d > n {
        return Err(Error::invalid(format!("2d = {} exceeds n = {n}", 2 * d)));
    }
    let pi = index::sample(rng, n, 2 * d).into_vec();
    let mut x = vec![false; n];
    for i in 0..d {
        if rng.random_bool(0.5) {
            x[pi[i]] = true;
        } else {
            x[pi[i + d]] = true;
        }
    }
    Ok(x)
}

/// How the quadratic atom is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuadMode {
    Exact,
    MonteCarlo { trials: u64 },
}

fn quad_value(m: &[i64], n: usize, v: &[i64], ones: &[usize]) -> i128 {
    let mut s: i128 = 0;
    for &i in ones {
        s += v[i] as i128;
        let row = &m[i * n..(i + 1) * n];
        for &j in ones {
            s += row[j] as i128;
        }
    }
    s
}

/// `Pr(x^T M x + v^T x = target)` for symmetric rational `M`.
pub fn quad_slice_atom<R: Rng + ?Sized>(
    m: &[Vec<BigRational>],
    v: &[BigRational],
    spec: SliceSpec,
    target: &BigRational,
    mode: QuadMode,
    rng: &mut R,
) -> Result<Atom> {
    let n = spec.n;
    spec.check_len(v.len())?;
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("M must be n x n"));
    }
    if (0..n).any(|i| (0..i).any(|j| m[i][j] != m[j][i])) {
        return Err(Error::invalid("M must be symmetric"));
    }
    let mut refs: Vec<&BigRational> = m.iter().flatten().collect();
    refs.extend(v.iter());
    refs.push(target);
    let (ints, _) = to_integers(&refs)?;
    let (mi, rest) = ints.split_at(n * n);
    let (vi, t) = (&rest[..n], rest[n] as i128);
    match mode {
        QuadMode::Exact => {
            let size = check_cap(spec)?;
            let mut hits = 0u128;
            for_each_point(spec, |ones| {
                if quad_value(mi, n, vi, ones) == t {
                    hits += 1;
                }
            });
            Ok(Atom::Exact(BigRational::new(
                BigInt::from(hits),
                BigInt::from(size),
            )))
        }
        QuadMode::MonteCarlo { trials } => {
            if trials == 0 {
                return Err(Error::invalid("trials must be positive"));
            }
            let mut hits = 0;
            let mut ones = Vec::with_capacity(spec.d);
            for _ in 0..trials {
                let x = coupled_slice_sampler(spec, rng)?;
                ones.clear();
                ones.extend((0..n).filter(|&i| x[i]));
                if quad_value(mi, n, vi, &ones) == t {
                    hits += 1;
                }
            }
            Ok(Atom::Estimate(wilson(hits, trials, MC_CONFIDENCE)))
        }
    }
}

/// Monte Carlo largest atom of `x^T M x` for an integer matrix, using the
/// coupled sampler.
pub fn quad_max_atom_mc<R: Rng + ?Sized>(
    m: &[i64],
    spec: SliceSpec,
    trials: u64,
    rng: &mut R,
) -> Result<Proportion> {
    let n = spec.n;
    if m.len() != n * n {
        return Err(Error::invalid("M must be n x n"));
    }
    let zero = vec![0i64; n];
    let mut counts: HashMap<i128, u64> = HashMap::new();
    let mut ones = Vec::with_capacity(spec.d);
    for _ in 0..trials {
        let x = coupled_slice_sampler(spec, rng)?;
        ones.clear();
        ones.extend((0..n).filter(|&i| x[i]));
        *counts.entry(quad_value(m, n, &zero, &ones)).or_default() += 1;
    }
    let max = counts.values().copied().max().unwrap_or(0);
    Ok(wilson(max, trials, MC_CONFIDENCE))
}

/// `2 exp(-t^2 / (8 sum c_i^2))`, the concentration bound for a function
/// of a uniform random injection with coordinate sensitivities `c`. Not
/// clamped to 1.
pub fn azuma_injection_bound(c: &[f64], t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::invalid(format!("t = {t} must be nonnegative")));
    }
    if c.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::invalid("sensitivities must be nonnegative"));
    }
    let s: f64 = c.iter().map(|x| x * x).sum();
    if s == 0.0 {
        return Ok(if t == 0.0 { 2.0 } else { 0.0 });
    }
    Ok(2.0 * (-t * t / (8.0 * s)).exp())
}

/// Empirical `Pr(|F - E F| >= t)` for `F` the number of fixed points
/// `pi(i) = i` of a uniform injection `{0..m} -> {0..size}`.
pub fn injection_fixed_point_tails<R: Rng + ?Sized>(
    m: usize,
    size: usize,
    ts: &[f64],
    trials: u64,
    rng: &mut R,
) -> Result<Vec<Proportion>> {
    if m > size {
        return Err(Error::invalid("injection needs m <= |S|"));
    }
    let mean = m as f64 / size as f64;
    let mut hits = vec![0u64; ts.len()];
    for _ in 0..trials {
        let pi = index::sample(rng, size, m);
        let f = pi.iter().enumerate().filter(|&(i, p)| i == p).count() as f64;
        for (h, &t) in hits.iter_mut().zip(ts) {
            if (f - mean).abs() >= t {
                *h += 1;
            }
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| wilson(h, trials, MC_CONFIDENCE))
        .collect())
}

/// One row of a rate study: the largest atom at slice size `d` and its
/// normalization.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateRow {
    pub d: usize,
    pub n: usize,
    pub atom: f64,
    pub normalized: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub exact: bool,
}

/// Exact largest linear atom for the balanced 0/1 vector on `n = 2d`, which
/// has level sets of size exactly `n / 2`, normalized by `sqrt(eta d)` with
/// `eta = 1/2`.
pub fn balanced_linear_rate(ds: &[usize]) -> Result<Vec<RateRow>> {
    ds.iter()
        .map(|&d| {
            let n = 2 * d;
            let v: Vec<i64> = (0..n).map(|i| (i < d) as i64).collect();
            let atom = slice_max_atom_dp(&v, SliceSpec::new(n, d)?)?
                .to_f64()
                .unwrap();
            let normalized = atom * (0.5 * d as f64).sqrt();
            Ok(RateRow {
                d,
                n,
                atom,
                normalized,
                ci_lo: atom,
                ci_hi: atom,
                exact: true,
            })
        })
        .collect()
}

/// Largest linear atom for `v = (1, ..., n)` on `n = 2d`, normalized by
/// `sqrt(d)`: exact by dynamic programming up to `n = 128`, Monte Carlo
/// beyond.
pub fn ramp_linear_rate<R: Rng + ?Sized>(
    ds: &[usize],
    trials: u64,
    rng: &mut R,
) -> Result<Vec<RateRow>> {
    ds.iter()
        .map(|&d| {
            let n = 2 * d;
            let spec = SliceSpec::new(n, d)?;
            let v: Vec<i64> = (1..=n as i64).collect();
            let scale = (d as f64).sqrt();
            if n <= 128 {
                let atom = slice_max_atom_dp(&v, spec)?.to_f64().unwrap();
                Ok(RateRow {
                    d,
                    n,
                    atom,
                    normalized: atom * scale,
                    ci_lo: atom,
                    ci_hi: atom,
                    exact: true,
                })
            } else {
                let p = slice_max_atom_mc(&v, spec, trials, rng)?;
                Ok(RateRow {
                    d,
                    n,
                    atom: p.estimate,
                    normalized: p.estimate * scale,
                    ci_lo: p.ci_lo,
                    ci_hi: p.ci_hi,
                    exact: false,
                })
            }
        })
        .collect()
}

/// Largest quadratic atom for a random symmetric +-1 matrix on `n = 2d`,
/// normalized by `sqrt(d)`.
pub fn quadratic_rate<R: Rng + ?Sized>(
    ds: &[usize],
    trials: u64,
    rng: &mut R,
) -> Result<Vec<RateRow>> {
    ds.iter()
        .map(|&d| {
            let n = 2 * d;
            let mut m = vec![0i64; n * n];
            for i in 0..n {
                for j in i..n {
                    let s = if rng.random_bool(0.5) { 1 } else { -1 };
                    m[i * n + j] = s;
                    m[j * n + i] = s;
                }
            }
            let p = quad_max_atom_mc(&m, SliceSpec::new(n, d)?, trials, rng)?;
            let scale = (d as f64).sqrt();
            Ok(RateRow {
                d,
                n,
                atom: p.estimate,
                normalized: p.estimate * scale,
                ci_lo: p.ci_lo,
                ci_hi: p.ci_hi,
                exact: false,
            })
        })
        .collect()
}

/// Least-squares slope of `ln(normalized)` against `ln ln d`: the exponent
/// `C` in `atom ~ (log d)^C / sqrt d`.
pub fn fit_log_exponent(rows: &[RateRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.d >= 3 && r.normalized > 0.0)
        .map(|r| ((r.d as f64).ln().ln(), r.normalized.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Sum of probabilities in an exact law; used as a sanity check.
pub fn total_mass(law: &[(BigRational, BigRational)]) -> BigRational {
    law.iter().fold(BigRational::zero(), |acc, (_, p)| acc + p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;
    use crate::stats::chi_square_uniform;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn binomial_near_the_u128_limit() {
        assert_eq!(binomial(128, 64), 23951146041928082866135587776380551750);
        assert_eq!(binomial(10, 3), 120);
        assert_eq!(binomial(3, 5), 0);
    }

    #[test]
    fn trivial_atoms() {
        let spec = SliceSpec::new(6, 2).unwrap();
        let ones = rationals(&[1; 6]);
        assert_eq!(
            slice_atom_exact(&ones, spec, &rational(2)).unwrap(),
            rational(1)
        );
        let ramp = rationals(&[1, 2, 3, 4, 5, 6]);
        let one = SliceSpec::new(6, 1).unwrap();
        assert_eq!(slice_atom_exact(&ramp, one, &rational(3)).unwrap(), q(1, 6));
        let mut rng = RngStream::new(1, 0);
        let est = slice_atom_mc(&ones, spec, &rational(3), 1000, &mut rng).unwrap();
        assert_eq!(est.estimate, 0.0);
    }

    #[test]
    fn rational_targets_compare_exactly() {
        // 1/3 + 1/6 = 1/2 exactly, which floating point would also get, but
        // 0.1 + 0.2 style inputs are only equal as rationals
        let v = vec![q(1, 10), q(2, 10), q(3, 10)];
        let spec = SliceSpec::new(3, 2).unwrap();
        assert_eq!(slice_atom_exact(&v, spec, &q(3, 10)).unwrap(), q(1, 3));
        assert_eq!(slice_atom_exact(&v, spec, &q(1, 2)).unwrap(), q(1, 3));
    }

    #[test]
    fn law_sums_to_one_and_matches_dp() {
        let mut rng = RngStream::new(2, 0);
        for _ in 0..50 {
            let n = rng.random_range(1..=14);
            let d = rng.random_range(0..=n);
            let v: Vec<i64> = (0..n).map(|_| rng.random_range(-3..=3)).collect();
            let spec = SliceSpec::new(n, d).unwrap();
            let law = slice_law_exact(&rationals(&v), spec).unwrap();
            assert_eq!(total_mass(&law), rational(1));
            let (counts, total) = slice_counts_dp(&v, spec).unwrap();
            assert_eq!(counts.len(), law.len());
            for ((value, p), (&s, &c)) in law.iter().zip(&counts) {
                assert_eq!(value, &rational(s));
                assert_eq!(p, &BigRational::new(BigInt::from(c), BigInt::from(total)));
            }
        }
    }

    #[test]
    fn permutation_invariance() {
        let v = rationals(&[5, -1, 2, 2, 7, 0, 3]);
        let mut w = v.clone();
        w.reverse();
        w.swap(0, 3);
        let spec = SliceSpec::new(7, 3).unwrap();
        for t in -2..15 {
            assert_eq!(
                slice_atom_exact(&v, spec, &rational(t)).unwrap(),
                slice_atom_exact(&w, spec, &rational(t)).unwrap()
            );
        }
    }

    #[test]
    fn enumeration_cap() {
        let spec = SliceSpec::new(40, 20).unwrap();
        assert!(slice_atom_exact(&rationals(&[1; 40]), spec, &rational(0)).is_err());
    }

    #[test]
    fn quadratic_reductions() {
        let mut rng = RngStream::new(3, 0);
        let spec = SliceSpec::new(6, 3).unwrap();
        let zero = vec![rationals(&[0; 6]); 6];
        let v = rationals(&[1, 2, 3, 4, 5, 6]);
        for t in 6..=15 {
            let a =
                quad_slice_atom(&zero, &v, spec, &rational(t), QuadMode::Exact, &mut rng).unwrap();
            assert_eq!(
                a,
                Atom::Exact(slice_atom_exact(&v, spec, &rational(t)).unwrap())
            );
        }
        let id: Vec<Vec<BigRational>> = (0..6)
            .map(|i| (0..6).map(|j| rational((i == j) as i64)).collect())
            .collect();
        let zv = rationals(&[0; 6]);
        let a = quad_slice_atom(&id, &zv, spec, &rational(3), QuadMode::Exact, &mut rng).unwrap();
        assert_eq!(a, Atom::Exact(rational(1)));
        let a = quad_slice_atom(
            &id,
            &zv,
            spec,
            &rational(3),
            QuadMode::MonteCarlo { trials: 100 },
            &mut rng,
        )
        .unwrap();
        assert_eq!(a.value(), 1.0);
    }

    #[test]
    fn coupled_sampler_basics() {
        let mut rng = RngStream::new(4, 0);
        let spec = SliceSpec::new(2, 1).unwrap();
        let mut first = 0;
        for _ in 0..10_000 {
            let x = coupled_slice_sampler(spec, &mut rng).unwrap();
            assert_eq!(x.iter().filter(|&&b| b).count(), 1);
            first += x[0] as u64;
        }
        assert!((first as f64 / 10_000.0 - 0.5).abs() < 0.03);
        assert!(coupled_slice_sampler(SliceSpec::new(5, 3).unwrap(), &mut rng).is_err());
        let spec = SliceSpec::new(8, 3).unwrap();
        let mut counts = HashMap::new();
        for _ in 0..56_000 {
            let x = coupled_slice_sampler(spec, &mut rng).unwrap();
            let mask: u32 = (0..8).filter(|&i| x[i]).map(|i| 1 << i).sum();
            *counts.entry(mask).or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 56);
        let obs: Vec<u64> = counts.values().copied().collect();
        assert!(chi_square_uniform(&obs).p_value > 1e-4);
    }

    #[test]
    fn azuma_values() {
        assert_eq!(azuma_injection_bound(&[1.0, 2.0], 0.0).unwrap(), 2.0);
        assert!((azuma_injection_bound(&[1.0], 4.0).unwrap() - 2.0 * (-2f64).exp()).abs() < 1e-15);
        assert!(azuma_injection_bound(&[-1.0], 1.0).is_err());
    }

    #[test]
    fn balanced_rate_matches_hypergeometric_mode() {
        // the mode of the hypergeometric law C(d,j)^2 / C(2d,d) is at j = d/2
        let rows = balanced_linear_rate(&[4, 8]).unwrap();
        assert!((rows[0].atom - 36.0 / 70.0).abs() < 1e-15);
        assert!((rows[1].atom - 4900.0 / 12870.0).abs() < 1e-15);
    }
}
