//! Simulation studies built on `ctxcent`: relative-change sweeps, payoff
//! correlation curves, seeding-strategy comparisons, homophily regressions
//! and desk checks of the random-graph expectation and viral-threshold
//! results.

pub mod common;
pub mod sweep;
pub mod correlation;
pub mod homophily;
pub mod strategies;
pub mod theory;
