//! Magnetomechanical coupling between a superconducting strip on a
//! cantilever and a flux-tunable microwave circuit.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic_strip;
pub mod commands;
pub mod coupling;
pub mod domain;
pub mod error;
pub mod mem;
pub mod noise;
pub mod numerics;
pub mod report;
pub mod scenario;
pub mod sources;
pub mod units;

pub use error::{Error, Result};
