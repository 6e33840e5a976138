//! Signed extremal-point statistics of two-dimensional Gaussian random fields.

pub mod actions;
pub mod diff;
pub mod embedding;
pub mod error;
pub mod io;
pub mod kernels;
pub mod mcfield;
pub mod quad;
pub mod specfun;
pub mod twopoint;
pub mod wallprofile;

pub use error::{Error, Result};
