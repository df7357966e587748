//! Numerics for infinitely divisible Stieltjes moment sequences.
//!
//! The crate builds moment sequences from Bernstein functions, closed-form
//! product convolution semigroups and q-series measures, and checks them:
//! Hankel positivity, log-moment representations, Mellin transforms and the
//! positivity of the Hermite generating function. Every numerical result
//! carries an error bound.

pub mod bernstein;
pub mod catalog;
pub mod error;
pub mod hankel;
pub mod hermite;
pub mod measure;
pub mod qseries;
pub mod quad;
pub mod semigroups;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use hankel::MomentSequence;
pub use measure::{AtomicMeasure, DensityMeasure, Measure, MellinValue};
