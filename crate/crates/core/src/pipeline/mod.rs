// SPDX-License-Identifier: Apache-2.0

//! The extraction of high-degree vertices, the corank-boosting walk that
//! adds them back, and the Monte Carlo campaigns built on both.

mod boost;
mod exhaustive;
mod experiments;
mod extraction;
mod walk;

pub use boost::{boost, BoostParams, BoostStep, BoostTrace};
pub use exhaustive::{
    rotate_core_exhaustive, uniformity_test_extraction, ExtractionUniformityReport,
    RotateCoreReport, EXHAUSTIVE_MAX_N,
};
pub use experiments::{
    boost_trial, corank_trial, degree_law_trial, main_theorem_trial, sample_shuffled_core,
    selected_set, BoostTrialParams, CoreParams, ExtractParams, TrialOutcome,
};
pub use extraction::{
    audit_superset, extract, random_superset, ExtractionResult, SupersetAudit, BIAS_RADIUS,
    JOIN_RADIUS,
};
pub use walk::{random_walk_sim, StateAudit, WalkReport, WalkSpec, WALK_CONFIDENCE};
