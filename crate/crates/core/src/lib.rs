//! Controllability toolkit for undirected networks under Laplacian leader-follower
//! dynamics.
//!
//! The crate is organised bottom-up:
//!
//! * [`graph`]: simple undirected graphs, lobster construction and random
//!   generation, spines and attachment profiles, JSON/DOT interchange.
//! * [`spectral`]: symmetric eigendecomposition grouped into eigenspaces and
//!   eigenvector-support queries.
//! * [`control`]: PBH (eigenspace rank) and exact Kalman-rank controllability
//!   verdicts, brute-force minimum leader search, minimum hitting sets.
//! * [`mpcs`]: critical / perfect critical / minimum perfect critical sets, a
//!   brute-force catalog and structural detectors for lobsters.
//! * [`csa`]: the critical set algorithm that assembles a leader set for a lobster.
//! * [`experiments`]: Monte Carlo sweeps over random lobsters with CSV/SVG output.
//!
//! Vertex ids are 1-based everywhere in the public API.

pub mod analysis;
pub mod control;
pub mod csa;
pub mod error;
pub mod experiments;
pub mod fixtures;
pub mod graph;
pub mod mpcs;
pub mod par;
pub mod spectral;

pub use analysis::Analysis;
pub use error::{Error, Result};
pub use graph::{Graph, LobsterSpec};

/// 1-based vertex id.
pub type Vertex = usize;
