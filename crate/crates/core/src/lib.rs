//! Multi-objective ergodic search.
//!
//! A trajectory is *ergodic* with respect to an information map when the time it
//! spends in each region is proportional to the information mass there. This crate
//! plans trajectories that trade off coverage of several maps at once:
//!
//! * [`fourier`] holds the cosine spectral basis, information maps and the ergodic metric.
//! * [`dynamics`] rolls out robot models from control sequences.
//! * [`ergopt`] minimizes the ergodic metric for one (scalarized) map.
//! * [`moes`] covers the weight simplex breadth-first with warm-started episodes
//!   (basic or adaptive neighbor sampling) and provides the naive scalarization baseline.
//! * [`metrics`] has dominance, Pareto filtering and the hypervolume indicator.
//! * [`cli`] wires everything to config files and plot-ready CSV/JSON outputs.
//!
//! Data-parallel loops go through [`Execution`], which uses rayon when the
//! `parallel` feature is enabled and runs sequentially otherwise.

pub mod cli;
pub mod dynamics;
pub mod ergopt;
mod error;
mod exec;
pub mod fourier;
pub mod metrics;
pub mod moes;

pub use error::{Error, Result};
pub use exec::Execution;
