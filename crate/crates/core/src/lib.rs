//! Numerical laboratory for gauge theory on an elliptic curve.
//!
//! Root-system combinatorics, level-k theta functions, Yang–Mills gradient
//! flow on the torus, and twisted Dolbeault spectra with ζ-regularized
//! determinants.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod flow;
pub mod gaugefield;
pub mod liealg;
pub mod spectral;
pub mod theta;

pub use error::{LabError, Result};
