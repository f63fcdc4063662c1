//! Geometric measure of entanglement for small multi-site pure states, and
//! the experiments built on it: Haar concentration, coin-flip simulation of
//! measurement-based strategies, graph-state bounds and tree tensor networks.
//!
//! Start with [`state`] and [`gme`]; the runnable programs under `examples/`
//! walk through every capability.

pub mod cli;
pub mod concentration;
pub mod config;
pub mod density;
pub mod gme;
pub mod graph;
pub mod mbqc;
pub mod mera;
pub mod report;
pub mod seed;
pub mod state;

mod error;

pub use error::{Error, Result};
pub use gme::{als_estimate, e_g_interval, AlsOptions, EntanglementInterval, IntervalOptions};
pub use state::{haar_random_state, ProductState, StateVector, C64};
