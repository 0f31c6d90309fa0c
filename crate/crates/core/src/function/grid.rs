use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_finite, Sampled};
use crate::error::{Error, Result};

/// Uniform grid `a + k (b - a) / (n - 1)`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct IntervalDomain {
    a: f64,
    b: f64,
    n: usize,
}

#[derive(Deserialize)]
struct RawInterval {
    a: f64,
    b: f64,
    n: usize,
}

impl TryFrom<RawInterval> for IntervalDomain {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        IntervalDomain::new(raw.a, raw.b, raw.n)
    }
}

impl IntervalDomain {
    pub fn new(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::InvalidDomain(format!("need a < b, got [{a}, {b}]")));
        }
        if n < 2 {
            return Err(Error::InvalidDomain(format!("need at least 2 nodes, got {n}")));
        }
        Ok(Self { a, b, n })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.n - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k + 1 == self.n {
            self.b
        } else {
            self.a + k as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.node(k))
    }

    /// The sub-grid spanning nodes `lo..=hi`.
    pub fn sub(&self, lo: usize, hi: usize) -> Result<Self> {
        if hi >= self.n || lo >= hi {
            return Err(Error::InvalidDomain(format!("bad node range {lo}..={hi} of {}", self.n)));
        }
        IntervalDomain::new(self.node(lo), self.node(hi), hi - lo + 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: IntervalDomain,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(domain: IntervalDomain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::InvalidDomain(format!(
                "{} values for {} nodes",
                values.len(),
                domain.len()
            )));
        }
        check_finite(&values)?;
        Ok(Self { domain, values })
    }

    pub fn from_fn(domain: IntervalDomain, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let values = domain.nodes().map(f).collect();
        Self::new(domain, values)
    }

    pub fn constant(domain: IntervalDomain, c: Complex64) -> Self {
        Self { domain, values: vec![c; domain.len()] }
    }

    pub fn zeros(domain: IntervalDomain) -> Self {
        Self::constant(domain, Complex64::new(0.0, 0.0))
    }

    pub fn domain(&self) -> &IntervalDomain {
        &self.domain
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
        self.values.is_empty()
    }

    pub fn first(&self) -> Complex64 {
        self.values[0]
    }

    pub fn last(&self) -> Complex64 {
        self.values[self.values.len() - 1]
    }

    /// Restriction to nodes `lo..=hi`, on the corresponding sub-grid.
    pub fn restrict(&self, lo: usize, hi: usize) -> Result<Self> {
        let domain = self.domain.sub(lo, hi)?;
        Ok(Self { domain, values: self.values[lo..=hi].to_vec() })
    }

    /// Insert `factor - 1` linearly interpolated nodes between every pair of
    /// neighbours. Old nodes keep their exact values.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor < 2 {
            return Err(Error::PreconditionViolated(format!("refinement factor {factor} < 2")));
        }
        let n = (self.len() - 1) * factor + 1;
        let domain = IntervalDomain::new(self.domain.a, self.domain.b, n)?;
        let mut values = Vec::with_capacity(n);
        for w in self.values.windows(2) {
            values.push(w[0]);
            for j in 1..factor {
                let s = j as f64 / factor as f64;
                values.push(w[0] + (w[1] - w[0]) * s);
            }
        }
        values.push(self.last());
        Ok(Self { domain, values })
    }

    /// Evaluate the piecewise-linear interpolant at `t`.
    pub fn eval(&self, t: f64) -> Complex64 {
        let d = &self.domain;
        let x = ((t - d.a) / d.step()).clamp(0.0, (d.n - 1) as f64);
        let k = (x.floor() as usize).min(d.n - 2);
        let s = x - k as f64;
        self.values[k] + (self.values[k + 1] - self.values[k]) * s
    }

    /// Piecewise-linear resampling onto an `n`-node grid over the same interval.
    pub fn resample(&self, n: usize) -> Result<Self> {
        let domain = IntervalDomain::new(self.domain.a, self.domain.b, n)?;
        if n == self.len() {
            return Ok(self.clone());
        }
        Self::from_fn(domain, |t| self.eval(t))
    }
}

impl Sampled for GridFunction {
    fn sample_iter(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.values.iter().copied()
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Self::new(self.domain, values)
    }

    fn map(&self, op: impl Fn(Complex64) -> Complex64) -> Self {
        Self { domain: self.domain, values: self.values.iter().map(|&z| op(z)).collect() }
    }
}
