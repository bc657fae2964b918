//! Metric geometry of masures over generalized Cartan matrices, at desk scale.
//!
//! The crate builds a branched masure from folding words, computes exact signed
//! and mixed distances by linear programming, and evaluates retractions,
//! geodesics and contraction homotopies on it.

pub mod acceptance;
pub mod apartment;
pub mod io;
pub mod lp;
pub mod masure;
pub mod metrics;
pub mod probes;
pub mod rootsys;
pub mod rat;
pub mod sample;
