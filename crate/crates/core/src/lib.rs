//! Induced-subgraph probabilities in random graphs with a given degree sequence.
//!
//! The crate pairs asymptotic B-graph counting formulas with the tools needed
//! to check them at desk scale: exact enumeration oracles, a uniform sampler
//! for the restricted pairing model, the switching operations that relate
//! defect classes, and Monte Carlo estimators.
//!
//! Vertex indices are 0-based throughout the library.

pub mod battery;
pub mod degseq;
pub mod error;
pub mod exactcount;
pub mod formulas;
pub mod montecarlo;
pub mod numeric;
pub mod pairing;
pub mod parallel;
pub mod switching;

pub use degseq::{
    feasibility, moments, mu_parameters, mu_single, residual, side_moments, subset_bipartition,
    Bipartition, DegreeSequence, Feasibility, InducedSubgraphSpec, Moments, MuParameters, Residual,
};
pub use error::{Error, Result};
pub use numeric::{BigCount, LogValue};
