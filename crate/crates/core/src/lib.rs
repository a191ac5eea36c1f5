//! Simulation of the two-photon state produced by spontaneous parametric
//! downconversion: pump models, phase matching, the joint amplitude computed
//! by direct superposition or in closed form, and entanglement diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod biphoton;
pub mod config;
pub mod dump;
pub mod error;
pub mod field;
pub mod phasematch;
pub mod pump;
pub mod run;

pub use error::{Result, SpdcError};
