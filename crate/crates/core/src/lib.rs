//! Simulation laboratory for the continuous-time AWGN channel impaired by
//! white (memoryless) phase noise.
//!
//! The channel `Y(t) = X(t) e^{jΘ(t)} + W(t)` is realized on refined time
//! grids. Projection receivers, the baud-sampled matched filter, and a set of
//! numerical experiments check what survives projection: the circular mean
//! `μ_Θ = E[e^{jΘ}]` as a gain, a flat floor carrying the rest of the power,
//! and a discrete-time equivalent channel `Y_k = μ_Θ A_k + W_k`.
//!
//! Module map:
//! - [`grid`]: time grids, pulses, the trigonometric basis, Riemann inner products.
//! - [`stochastics`]: phase noise, AWGN, reproducible random streams.
//! - [`channel`]: constellations, modulation, the waveform channel and its
//!   discrete equivalent.
//! - [`receiver`]: matched filter bank, basis projections, lemma projections.
//! - [`analysis`]: PSD, spectral loss, mutual information, convergence tables.
//! - [`verify`]: the acceptance suite behind `pnlab verify`.

pub mod analysis;
pub mod channel;
mod error;
pub mod grid;
pub mod output;
pub mod receiver;
pub mod stats;
pub mod stochastics;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
