//! Causal graph analysis for generalized DAGs (GDAGs): graphs whose nodes are
//! flagged observed or latent.
//!
//! The crate answers one question about a GDAG: can it separate classical
//! causal models from more general probabilistic theories? Three decision
//! procedures are provided, in increasing strength:
//!
//! * the skeleton comparison against a saturated comparator graph,
//! * the e-separation method with an explicit witness distribution,
//! * fine-grained entropic inequalities on post-intervention sections.
//!
//! Probability masses are exact rationals end to end; only entropies are
//! floating point. [`INEQ_TOL`] bounds inequality slack, [`IDENT_TOL`] bounds
//! identity checks.

pub mod catalog;
pub mod ci;
pub mod dist;
pub mod format;
pub mod graph;
pub mod interest;
pub mod naive;
pub mod reproduce;

pub use graph::{nodeset, Gdag, GraphError, NodeSet, Skeleton};

/// Tolerance for inequality checks on real-valued entropies.
pub const INEQ_TOL: f64 = 1e-9;

/// Tolerance for identity checks on real-valued entropies.
pub const IDENT_TOL: f64 = 1e-12;
