//! Simulation and analysis toolkit for a self-correcting two-dimensional
//! cellular automaton whose structure layer is stabilized by Toom's rule.
//!
//! The crate is organized bottom-up:
//!
//! - [`lattice`]: periodic grid storage, the ideal structural trajectory, snapshots
//! - [`structure`]: Toom's rule, defect clusters, triangle norms
//! - [`noise`]: counter-keyed fault sampling and fault-path replay
//! - [`schedule`]: the refresh/simulation cycle with coordinate gating
//! - [`data`]: classical and Pauli-frame data rules, gadget checks
//! - [`runtime`]: synchronous, marching-soldier and continuous-time execution
//! - [`renorm`]: extended-rectangle accounting, sparsity, flow, lifetimes
//! - [`stats`]: confidence intervals, fits and goodness-of-fit tests
//!
//! Floating-point code is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the common choice.

pub mod data;
pub mod error;
pub mod lattice;
pub mod noise;
mod real;
pub mod renorm;
pub mod runtime;
pub mod schedule;
pub mod stats;
pub mod structure;

pub use error::{Error, Result};
pub use real::Real;

pub type RenormFlow64 = renorm::RenormFlow<f64>;
pub type RenormFlow32 = renorm::RenormFlow<f32>;
pub type LinearFit64 = stats::LinearFit<f64>;
pub type LinearFit32 = stats::LinearFit<f32>;
