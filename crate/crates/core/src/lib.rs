//! Pseudospectral simulation and harmonic analysis for the KP-I and KP-II equations
//! on doubly periodic domains.
//!
//! Each capability has a runnable example:
//!
//! ```text
//! cargo run --release --example soliton_residual
//! cargo run --release --example zaitsev_wave
//! cargo run --release --example conservation
//! cargo run --release --example littlewood_paley
//! cargo run --release --example envelope
//! cargo run --release --example strichartz_probe
//! cargo run --release --example decay_probe
//! cargo run --release --example resonance
//! cargo run --release --example scaling_law
//! cargo run --release --example perturbation
//! cargo run --release --example lipschitz_difference
//! cargo run --release --example config_run
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod decomposition;
pub mod error;
pub mod evolution;
pub mod perturbation;
pub mod probes;
pub mod snapshot;
pub mod solutions;
pub mod spectral;

pub use error::{KpError, Result};
pub use rustfft::num_complex::Complex64;
pub use spectral::{Equation, Grid2D, RealField, Spectrum};
