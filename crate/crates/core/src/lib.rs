//! Contextual centrality and the machinery around it: sparse graphs and their
//! leading eigenpair, walk-counting centralities, independent-cascade payoff
//! simulation with an exhaustive percolation oracle, random network
//! generators, and the scalar diagnostics used to compare seeding strategies.

pub mod cascade;
pub mod centrality;
pub mod contribution;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod netgen;
pub mod regression;
pub mod rng;
pub mod spectral;

pub use contribution::ContributionVector;
pub use error::{Error, Result};
pub use graph::{EdgeProbabilities, Graph};
pub use spectral::{leading_eigenpair, leading_eigenpair_default, SpectralInfo};
