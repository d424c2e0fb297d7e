//! State estimation for spin-F systems by continuous weak measurement.
//!
//! The pipeline mirrors a single ensemble interrogation: a control waveform
//! drives the spin ([`dynamics`]), a fixed observable is read out weakly and
//! coarse-grained into a noisy record ([`measurement`]), and the initial
//! density matrix is recovered by least squares followed by a projection onto
//! physical states ([`estimator`]). [`metrics`], [`wigner`], [`sweep`] and
//! [`design`] provide diagnostics and waveform optimization; [`cli`] wires everything to
//! the `spintomo` binary.
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod cli;
pub mod design;
pub mod error;
pub mod dynamics;
pub mod estimator;
pub mod linalg;
pub mod measurement;
pub mod metrics;
pub mod optimize;
pub mod random;
pub mod rng;
pub mod spin;
pub mod sweep;
pub mod wigner;

pub use error::{Error, Result};
