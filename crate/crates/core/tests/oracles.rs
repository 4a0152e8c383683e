// SPDX-License-Identifier: Apache-2.0

//! Library routines against independent reimplementations in test code, and
//! reference values computed offline at 40 digits.

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use corelab::anticonc::{
    azuma_injection_bound, rational, slice_counts_dp, slice_law_exact, SliceSpec,
};
use corelab::graph::{core_numbers, k_core};
use corelab::linalg::{
    fraction_free_rank, rank_gf2, rational_rank_with_primes, BitMatrix, IntMatrix,
};
use corelab::stats::wilson;
use corelab::theory::{m_f, solve_lambda, DegreeDist, TruncPoisson};
use corelab::Graph;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

fn dense_rank_gf2(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][c]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != rank && row[c] {
                row.iter_mut().zip(&pivot).for_each(|(x, &y)| *x ^= y);
            }
        }
        rank += 1;
    }
    rank
}

fn dense_rank_q(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| rational(x)).collect())
        .collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            for (x, y) in row.iter_mut().zip(&pivot) {
                *x -= &f * y;
            }
        }
        rank += 1;
    }
    rank
}

fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

#[test]
fn gf2_rank_matches_dense_elimination() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let (r, c) = (rng.random_range(1..=70), rng.random_range(1..=70));
        let density = rng.random_range(0.01..0.7);
        let rows: Vec<Vec<bool>> = (0..r)
            .map(|_| (0..c).map(|_| rng.random_bool(density)).collect())
            .collect();
        assert_eq!(rank_gf2(&BitMatrix::from_rows(&rows)), dense_rank_gf2(rows));
    }
}

#[test]
fn rational_rank_matches_elimination_over_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let first = [1_000_003u64, 998_244_353];
    let second = [2_147_483_647u64, 1_000_000_007];
    for case in 0..80 {
        let n = rng.random_range(1..=16);
        let mut rows: Vec<Vec<i64>> = (0..n)
            .map(|_| (0..n).map(|_| rng.random_range(-3..=3)).collect())
            .collect();
        if case % 2 == 0 && n > 2 {
            // force a dependency: last row is a combination of the first two
            let s: Vec<i64> = rows[0]
                .iter()
                .zip(&rows[1])
                .map(|(a, b)| 2 * a - b)
                .collect();
            rows[n - 1] = s;
        }
        let exact = dense_rank_q(&rows);
        let m = IntMatrix::from_rows(&rows).unwrap();
        assert_eq!(fraction_free_rank(&m, 64).unwrap(), exact);
        assert_eq!(rational_rank_with_primes(&m, &first).unwrap().rank, exact);
        assert_eq!(rational_rank_with_primes(&m, &second).unwrap().rank, exact);
    }
    for _ in 0..40 {
        let g = random_graph(&mut rng, 30, 0.08);
        let rows: Vec<Vec<i64>> = (0..30)
            .map(|u| (0..30).map(|v| g.has_edge(u, v) as i64).collect())
            .collect();
        let exact = dense_rank_q(&rows);
        assert_eq!(rational_rank_with_primes(&g, &first).unwrap().rank, exact);
        assert_eq!(rational_rank_with_primes(&g, &second).unwrap().rank, exact);
    }
}

#[test]
fn k_core_matches_naive_peeling() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..50 {
        let n = rng.random_range(1..40);
        let p = rng.random_range(0.02..0.4);
        let g = random_graph(&mut rng, n, p);
        let naive = |k: usize| {
            let mut alive = vec![true; n];
            loop {
                let drop = (0..n).find(|&v| {
                    alive[v]
                        && g.neighbors(v)
                            .iter()
                            .filter(|&&u| alive[u as usize])
                            .count()
                            < k
                });
                match drop {
                    Some(v) => alive[v] = false,
                    None => return alive,
                }
            }
        };
        let numbers = core_numbers(&g);
        for k in 1..6 {
            let alive = naive(k);
            let want: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
            assert_eq!(k_core(&g, k).0.as_slice(), want.as_slice());
            for v in 0..n {
                assert_eq!(numbers[v] >= k, alive[v]);
            }
        }
    }
}

#[test]
fn slice_law_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..30 {
        let n = rng.random_range(1..=12);
        let d = rng.random_range(0..=n);
        let v: Vec<i64> = (0..n).map(|_| rng.random_range(-4..=4)).collect();
        let mut counts = std::collections::BTreeMap::<i64, u128>::new();
        let mut total = 0u128;
        for mask in 0u32..1 << n {
            if mask.count_ones() as usize == d {
                let s = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| v[i]).sum();
                *counts.entry(s).or_default() += 1;
                total += 1;
            }
        }
        let spec = SliceSpec::new(n, d).unwrap();
        let (dp, size) = slice_counts_dp(&v, spec).unwrap();
        assert_eq!(size, total);
        assert_eq!(dp, counts);
        let law =
            slice_law_exact(&v.iter().map(|&x| rational(x)).collect::<Vec<_>>(), spec).unwrap();
        let want: Vec<(BigRational, BigRational)> = counts
            .iter()
            .map(|(&s, &c)| {
                (
                    rational(s),
                    BigRational::new((c as i64).into(), (total as i64).into()),
                )
            })
            .collect();
        assert_eq!(law, want);
    }
}

#[test]
fn truncated_poisson_matches_reference_values() {
    for (k, c, lambda) in [
        (3, 4.0, 2.687_999_345_499_491_3),
        (3, 5.5, 5.024_801_653_779_758),
        (2, 3.0, 2.149_125_799_907_062_5),
        (5, 12.0, 11.933_240_630_210_02),
    ] {
        let got = solve_lambda(k, c).unwrap();
        assert!(close(got, lambda, 1e-10), "k={k} c={c}: {got}");

        let tp = TruncPoisson::new(k, got).unwrap();
        let term = |t: usize| (-got).exp() * (1..=t).fold(1.0, |acc, i| acc * got / i as f64);
        let z = 1.0 - (0..k).map(term).sum::<f64>();
        for t in 0..30 {
            let want = if t < k { 0.0 } else { term(t) / z };
            assert!((tp.rho(t) - want).abs() <= 1e-12, "t={t}");
        }
    }
}

#[test]
fn corank_functional_on_simple_laws() {
    let three = DegreeDist::point_mass(3);
    for x in [0.0, 0.1, 0.3, 0.5, 0.9, 1.0] {
        let y: f64 = 1.0 - x;
        let want = 3.0 * x * y * y + y.powi(3) + (1.0 - y * y).powi(3) - 1.0;
        assert!((m_f(&three, x).unwrap() - want).abs() < 1e-14, "x={x}");
    }
    // M(0) reduces to the mass at zero.
    let f = DegreeDist::new(vec![0.2, 0.3, 0.5]);
    assert!((m_f(&f, 0.0).unwrap() - 0.2).abs() < 1e-15);
    assert!(m_f(&DegreeDist::point_mass(0), 0.5).is_err());
}

#[test]
fn wilson_matches_reference_values() {
    for (k, n, conf, lo, hi) in [
        (5, 10, 0.95, 0.236_593_090_512_564, 0.763_406_909_487_436),
        (0, 20, 0.99, 0.0, 0.249_105_401_098_753),
        (37, 200, 0.99, 0.124_803_843_486_321, 0.265_424_999_402_275),
    ] {
        let p = wilson(k, n, conf);
        assert!(
            (p.ci_lo - lo).abs() < 1e-9 && (p.ci_hi - hi).abs() < 1e-9,
            "{k}/{n}: {p:?}"
        );
    }
}

#[test]
fn azuma_bound_reference_values() {
    let b = azuma_injection_bound(&[1.0; 4], 4.0).unwrap();
    assert!(close(b, 2.0 * (-0.5f64).exp(), 1e-15));
    assert!(close(b, 1.213_061_319_425_266_8, 1e-15));
    let b = azuma_injection_bound(&[0.5, 0.5], 1.0).unwrap();
    assert!(close(b, 1.557_601_566_142_809_8, 1e-15));
    assert!(azuma_injection_bound(&[1.0], -1.0).is_err());
}
