//! Dissipative Stern-Gerlach interferometry with a SQUID-loop readout.
//!
//! The crate models a spin-carrying matter wave travelling through a
//! Stern-Gerlach splitter whose gradient coils couple the particle to a lossy
//! superconducting circuit. The circuit acts as an Ohmic heat bath; the
//! resulting damped, decohering two-branch evolution is propagated in closed
//! form and cross-checked against brute-force numerics.

pub mod cli;
pub mod config;
pub mod constants;
pub mod density;
pub mod error;
pub mod kernels;
pub mod model;
pub mod oracle;
pub mod profile;
pub mod propagator;
pub mod quad;
pub mod svg;

pub use error::{Error, Result};
