//! Spectrum sensing for cognitive radio by single-cycle-frequency
//! cyclostationary feature detection.
//!
//! The crate is split along the processing chain:
//!
//! - [`siggen`] builds AM / BPSK primary-user waveforms and the AWGN channel.
//! - [`scd`] computes the DFT, the frequency-smoothed spectral correlation
//!   density at one cycle frequency, and the cycle-frequency profile.
//! - [`detect`] reduces slices and buffers to sensing metrics, calibrates
//!   thresholds from noise-only samples and renders decisions.
//! - [`harness`] runs the Monte Carlo ROC sweep, the operation-count model,
//!   CSV/text I/O and the command line front end.

pub mod detect;
pub mod error;
pub mod harness;
pub mod scd;
pub mod siggen;

pub use error::{Error, Result};
