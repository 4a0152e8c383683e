// SPDX-License-Identifier: Apache-2.0

//! Numeric oracles: the truncated Poisson degree law and its modification
//! after extracting high-degree vertices, the generating-function corank
//! functional `M_f`, and Galton-Watson local-limit utilities.
//!
//! Everything here is `f64`. Series are summed until the remaining tail is
//! provably below [`SERIES_TOL`].

mod bls;
mod cw;
mod local;

pub use bls::{
    delta_star, log_concavity_check, m_f, max_m, max_m_with_grid, phi_eval, rank_analysis,
    size_biased, DegreeDist, DeltaStar, LogConcavity, RankAnalysis, BETA_FLOOR, MAX_M_GRID,
};
pub use cw::{cw_mod, solve_lambda, CwMod, TruncPoisson};
pub use local::{ball_code, gw_code, local_tv_distance, LocalTv, NON_TREE};

/// Absolute tail bound used when truncating probability series.
pub const SERIES_TOL: f64 = 1e-17;
