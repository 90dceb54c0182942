//! Pilot-aided OFDM channel estimation over doubly selective fading with
//! Gaussian and Bernoulli-Gaussian impulse noise.
//!
//! The crate is organised bottom-up:
//!
//! - [`grid`]: 16-QAM mapping, unitary OFDM (de)modulation with cyclic prefix,
//!   and comb-pilot resource grids.
//! - [`channel`]: tapped-delay-line fading with a Jakes Doppler spectrum, plus
//!   AWGN and Bernoulli-Gaussian impulse noise calibrated to SNR/SIR targets.
//! - [`estimators`]: least-squares pilot estimates, the ε-Huber cost, the
//!   complex LS-SVM dual solver with RBF kernel interpolation, and the
//!   linear-interpolation baseline.
//! - [`harness`]: end-to-end Monte-Carlo runs and parameter sweeps.
//! - [`config`] and [`cli`]: the scenario file format and command-line driver.

pub mod channel;
pub mod cli;
pub mod config;
mod error;
pub mod estimators;
pub mod grid;
pub mod harness;
pub mod rng;

pub use error::{ConvergenceFailure, Error, Result};

/// Complex sample type used throughout the toolkit.
pub type Cf64 = num_complex::Complex<f64>;

/// Toolkit version echoed into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
