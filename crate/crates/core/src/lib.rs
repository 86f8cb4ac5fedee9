//! Simulator and benchmark harness for dynamical cavity-oscillator quantum
//! memories.
//!
//! A linear memory absorbs an incoming pulse into a cavity, optionally
//! handing it to a long-lived oscillator, and later releases it. The crate
//! evolves the mean amplitudes of that two-mode system under piecewise-constant
//! controls and filters the output with the time-reversed input mode, which
//! gives the memory efficiency `sqrt(eta_M)`. Average-fidelity benchmarks
//! against the best classical measure-and-prepare strategy follow from `eta_M`.
//!
//! Module map:
//!
//! - [`schedule`]: piecewise-constant controls and the three gating presets.
//! - [`modes`]: temporal mode functions on uniform grids, with trapezoidal overlaps.
//! - [`dynamics`]: closed-form propagators, RK4 integration, efficiencies.
//! - [`fock`]: exact truncated Fock-space loss channel (fidelity oracle).
//! - [`fidelity`]: closed-form and Monte Carlo average fidelities.
//! - [`cli`]: scenario configs, named presets and CSV emitters.

pub mod cli;
pub mod dynamics;
pub mod error;
pub mod fidelity;
pub mod fock;
pub mod modes;
pub mod schedule;

pub use error::{Error, Result};
pub use num_complex::Complex64;
