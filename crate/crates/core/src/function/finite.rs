use num_complex::Complex64;

use super::{check_finite, GridFunction, Sampled};
use crate::error::{Error, Result};

/// A function on a finite discrete space, i.e. a nonempty vector of values.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteSpaceFunction {
    values: Vec<Complex64>,
}

impl FiniteSpaceFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDomain("finite space must be nonempty".into()));
        }
        check_finite(&values)?;
        Ok(Self { values })
    }

    pub fn constant(n: usize, c: Complex64) -> Result<Self> {
        Self::new(vec![c; n])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Pointwise reciprocal; fails if any value vanishes.
    pub fn recip(&self) -> Result<Self> {
        if self.values.iter().any(|z| *z == Complex64::new(0.0, 0.0)) {
            return Err(Error::NotInvertible);
        }
        Self::new(self.values.iter().map(|z| z.inv()).collect())
    }
}

impl From<&GridFunction> for FiniteSpaceFunction {
    fn from(f: &GridFunction) -> Self {
        Self { values: f.values().to_vec() }
    }
}

impl Sampled for FiniteSpaceFunction {
    fn sample_iter(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values.iter().copied()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::DomainMismatch);
        }
        Self::new(self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect())
    }

    fn map(&self, op: impl Fn(Complex64) -> Complex64) -> Self {
        Self { values: self.values.iter().map(|&z| op(z)).collect() }
    }
}
