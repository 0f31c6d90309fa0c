//! Sampled complex-valued functions on intervals, finite spaces, and finite
//! graphs, with the pointwise *-algebra structure and the sup norm.
//!
//! Identities are asserted at the nodes only; between nodes a function is
//! read as the piecewise-linear interpolant of its samples.

mod finite;
mod graph;
mod grid;
pub mod io;

pub use finite::FiniteSpaceFunction;
pub use graph::{Edge, EdgeEnd, EdgePoint, GraphDomain, GraphFunction, VERTEX_TOLERANCE};
pub use grid::{GridFunction, IntervalDomain};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pointwise operations shared by every sampled function type.
pub trait Sampled: Sized {
    fn sample_iter(&self) -> impl Iterator<Item = Complex64> + '_;

    /// Combine two functions node by node. Fails on a domain mismatch.
    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self>;

    fn map(&self, op: impl Fn(Complex64) -> Complex64) -> Self;

    fn sup_norm(&self) -> f64 {
        self.sample_iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    fn pointwise_product(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }
}

pub fn sup_norm<F: Sampled>(f: &F) -> f64 {
    f.sup_norm()
}

pub fn pointwise_product<F: Sampled>(f: &F, g: &F) -> Result<F> {
    f.pointwise_product(g)
}

/// Which joint modulus `min_modulus_sum` minimizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModulusSum {
    /// `|f| + |g|`
    #[default]
    Linear,
    /// `|f|^2 + |g|^2`
    Squared,
}

/// Minimum over all nodes of `|f| + |g|` (or of `|f|^2 + |g|^2`).
pub fn min_modulus_sum<F: Sampled>(f: &F, g: &F, variant: ModulusSum) -> Result<f64> {
    let joint = f.zip_with(g, |a, b| {
        let v = match variant {
            ModulusSum::Linear => a.norm() + b.norm(),
            ModulusSum::Squared => a.norm_sqr() + b.norm_sqr(),
        };
        Complex64::new(v, 0.0)
    })?;
    Ok(joint.sample_iter().fold(f64::INFINITY, |m, z| m.min(z.re)))
}

pub(crate) fn check_finite(values: &[Complex64]) -> Result<()> {
    match values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}
