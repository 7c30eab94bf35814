//! Synthesis of frequency-domain filters for a driven two-level system and
//! reverse engineering of the time-domain control fields that realize them.
//!
//! The pipeline: design an FIR impulse response with prescribed passbands
//! ([`filter`]), map it onto the auxiliary angles of an su(2) dynamical
//! invariant and recover the drive fields ([`invariant`]), predict the
//! spectral response analytically ([`response`]), and verify everything
//! against exact Schrödinger propagation ([`dynamics`]) including stochastic
//! dephasing ([`noise`]) and pulsed-echo baselines ([`cpmg`]).  Experiment
//! orchestration, result tables, waveform export and plotting live in
//! [`experiments`], [`table`], [`waveform`] and [`plot`].
//!
//! Units throughout: time in µs, user-facing frequencies in MHz (angular
//! conversion ω = 2πf), field amplitudes in rad/µs, ħ = 1.

pub mod cpmg;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod filter;
pub mod grid;
pub mod interp;
pub mod invariant;
pub mod noise;
pub mod plot;
pub mod response;
pub mod table;
pub mod waveform;

pub use error::{QifError, Result};
