// SPDX-License-Identifier: Apache-2.0

//! Exact rank over GF(2), GF(p) and the rationals.
//!
//! Graph adjacency matrices are eliminated in ascending-degree order, which
//! keeps pivot rows sparse for the first part of the elimination.

mod bareiss;
mod bordered;
mod certificate;
mod gf2;
mod incremental;
mod modp;
mod primes;

pub use bareiss::{fraction_free_rank, DEFAULT_FRACTION_FREE_CAP};
pub use bordered::{principal_ranks, principal_ranks_mod_p};
pub use certificate::{
    rational_rank, rational_rank_with_primes, Certainty, IntMatrix, IntegerMatrix, RankCertificate,
    RankMethod,
};
pub use gf2::{nullspace_basis_gf2, rank_gf2, BitMatrix, BitVec, Gf2Solver};
pub use incremental::IncrementalRank;
pub use modp::{rank_mod_p, ModMatrix};
pub use primes::{is_prime, random_prime, PRIME_BITS};
