// SPDX-License-Identifier: Apache-2.0

pub mod anticonc;
pub mod error;
pub mod graph;
pub mod harness;
pub mod linalg;
pub mod pipeline;
pub mod rng;
pub mod samplers;
pub mod stats;
pub mod structure;
pub mod theory;

pub use error::{Error, Result};
pub use graph::{Graph, InducedSubgraph, MultiGraph, VertexSet};
