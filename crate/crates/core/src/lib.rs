//! Constructive factorization of perturbed products `fg + d = (f + d1)(g + d2)`
//! for sampled functions on intervals, finite graphs and finite spaces, and
//! an inversion scheme for general Banach function algebras.

pub mod cli;
pub mod error;
pub mod function;
pub mod graph;
pub mod interval;
pub mod pointwise;
pub mod probe;
pub mod quadratic;
pub mod sampling;
pub mod scheme;

pub use error::{Claim, Error, Result};
