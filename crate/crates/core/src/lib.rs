//! Decentralized Bayesian learning over weighted social networks.
//!
//! Each agent repeatedly folds a fresh batch of local observations into its
//! belief with Bayes' rule, shares the result, and pools its neighbours'
//! beliefs by a weighted geometric mean. The crate provides the network
//! model ([`graph`]), the finite-parameter rule ([`belief`]), its Gaussian
//! specialization for linear regression ([`gaussian`]), the analytic
//! convergence rate and its empirical counterpart ([`rates`]), a seeded
//! multi-agent simulator ([`sim`]) and the experiment I/O used by the CLI
//! ([`io`]).

pub mod belief;
pub mod error;
pub mod gaussian;
pub mod graph;
pub mod io;
pub mod models;
pub mod rates;
pub mod sim;

pub use error::{Error, Result};
