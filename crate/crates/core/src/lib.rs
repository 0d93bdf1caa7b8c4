//! Bayesian inversion of two-offset seismic AVO data into binary
//! lithology/fluid class (LFC) fields.
//!
//! The library combines a spatial prior for the binary field — either a
//! homogeneous Markov mesh model with fitted interaction parameters or a
//! manually specified profile Markov random field — with a linearised
//! Gaussian convolutional likelihood, and explores the posterior with a
//! column-block Metropolis–Hastings sampler. Posterior sample streams are
//! summarised into marginal maps, mode maps, contact probabilities and a
//! sand connectivity curve.
//!
//! The `lfci` binary exposes the pipeline as subcommands:
//! `simulate-prior`, `synth`, `invert`, `analyze` and `tune`.

pub mod analysis;
pub mod chain;
pub mod cli;
pub mod config;
pub mod error;
pub mod forward;
pub mod io;
pub mod lattice;
pub mod likelihood;
pub mod mesh_prior;
pub mod profile_prior;
pub mod sampler;
pub mod util;

pub use error::{Error, Result};
pub use lattice::{CellOffset, GridDims, LfcField};
