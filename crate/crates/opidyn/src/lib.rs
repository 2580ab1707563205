//! Simulation and analytic verification of continuous-time stochastic
//! opinion dynamics: jump-diffusions whose interaction rate depends on the
//! opinion difference, their exact embedded-chain samplers, and the
//! closed-form stationary densities they converge to.
//!
//! The crate is organized around three routes to the same stationary law:
//!
//! 1. pathwise simulation of the jump-diffusion ([`sim`]),
//! 2. exact sampling through the embedded pre-jump chain ([`embedded`]),
//! 3. closed-form series densities and Mellin transforms ([`analytic`]),
//!
//! with [`pde`] verifying the analytic forms against the stationary
//! non-local ODE and [`stats`] quantifying agreement between the routes.

pub mod analytic;
pub mod cli;
pub mod config;
pub mod drift;
pub mod embedded;
pub mod error;
pub mod model;
pub mod pde;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod special;
pub mod stats;
pub mod svg;

pub use error::{Error, Result};
pub use model::{jump_apply, ModelParams, MultiAgentConfig, RateCeiling, RateFamily, RateFunction};
