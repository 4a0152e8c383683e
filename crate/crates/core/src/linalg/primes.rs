// SPDX-License-Identifier: Apache-2.0

use rand::Rng;

/// Random primes are drawn from `[2^(PRIME_BITS-1), 2^PRIME_BITS)`.
pub const PRIME_BITS: u32 = 30;

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`.
pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const SMALL: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for p in SMALL {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in SMALL {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// A uniformly random prime of exactly [`PRIME_BITS`] bits.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    let lo = 1u64 << (PRIME_BITS - 1);
    let hi = 1u64 << PRIME_BITS;
    loop {
        let c = rng.random_range(lo..hi) | 1;
        if is_prime(c) {
            return c;
        }
    }
}

/// Approximate count of [`PRIME_BITS`]-bit primes, `li(2^b) - li(2^(b-1))`.
pub(crate) fn prime_count_estimate() -> f64 {
    let x = (1u64 << PRIME_BITS) as f64;
    let h = x / 2.0;
    // x/ln x (1 + 1/ln x) is within a fraction of a percent at this size
    let pi = |y: f64| y / y.ln() * (1.0 + 1.0 / y.ln());
    pi(x) - pi(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn primality_matches_sieve() {
        let n = 10_000;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(i as u64), p, "{i}");
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn random_primes_have_the_right_size() {
        let mut rng = RngStream::new(1, 0);
        for _ in 0..20 {
            let p = random_prime(&mut rng);
            assert!(is_prime(p));
            assert_eq!(64 - p.leading_zeros(), PRIME_BITS);
        }
    }

    #[test]
    fn inverses() {
        let p = 10007;
        for a in 1..200 {
            assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
        }
    }
}
