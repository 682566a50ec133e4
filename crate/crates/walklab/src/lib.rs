//! A laboratory for stochastic processes on graphs: random walks and their
//! cover/blanket times, randomized push broadcast, first-passage percolation,
//! exact walk quantities via dense linear algebra, and a relation engine that
//! checks the identities and inequalities tying these quantities together.
//!
//! Layout:
//! - [`graph`] — immutable simple connected graphs, generators, BFS machinery
//! - [`exact`] — transition kernels, hitting/commute times, resistance, spectra
//! - [`walk`] — Monte Carlo random-walk simulation (cover, blanket, hitting)
//! - [`broadcast`] — synchronous push broadcast and its continuous-time variant
//! - [`percolation`] — first-passage percolation with exponential edge weights
//! - [`relations`] — the relation catalog, quotient R(G), scaling sweeps
//! - [`harness`] — reproducible experiment runner behind the CLI

pub mod broadcast;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod percolation;
pub mod relations;
pub mod rng;
pub mod stats;
pub mod walk;

pub use graph::Graph;
pub use stats::Estimate;
