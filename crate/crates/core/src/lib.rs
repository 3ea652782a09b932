//! Parameter learning for state-space models by filtering an augmented model
//! in which the parameter is a latent process with vanishing artificial
//! dynamics.
//!
//! The crate is organised bottom-up:
//!
//! - [`dynamics`]: parameter spaces, schedules for the artificial dynamics and
//!   the truncated samplers that realise them;
//! - [`engine`]: the particle cloud, resampling and the online filters
//!   (plain, adaptive-fast and adaptive-slow);
//! - [`kalman`]: exact Kalman recursions and the Rao-Blackwellised propagator
//!   for linear Gaussian models;
//! - [`mle`]: data cloning, iterated filtering and the noisy optimiser;
//! - [`models`]: the concrete models (periodic linear Gaussian, stochastic
//!   volatility, SEIRD, Bernoulli-Laplace urn);
//! - [`harness`]: configuration files, observation loading and job runners
//!   used by the `sossm` binary.
//!
//! Runnable walkthroughs live under `examples/`.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod dynamics;
pub mod engine;
pub mod error;
pub mod harness;
pub mod kalman;
pub mod mle;
pub mod models;
pub mod rng;

pub use error::{Error, Result};
