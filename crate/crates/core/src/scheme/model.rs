use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::function::{FiniteSpaceFunction, Sampled};

/// A commutative unital Banach *-algebra `A` with an injective
/// *-homomorphism `i` into a sup-normed function space.
///
/// `C ≥ 1` bounds `‖i(a)‖∞ ≤ C‖a‖`; `D` is the constant in
/// `‖ab‖ ≤ D(‖a‖‖i(b)‖∞ + ‖i(a)‖∞‖b‖)`; and `ψ` controls inverses:
/// `‖a⁻¹‖ ≤ ψ(‖a‖·‖i(a⁻¹)‖∞)/‖a‖`.
pub trait AlgebraModel {
    type Element: Clone + std::fmt::Debug + PartialEq;

    fn check_shape(&self, a: &Self::Element) -> Result<()>;
    fn norm(&self, a: &Self::Element) -> f64;
    fn embed(&self, a: &Self::Element) -> FiniteSpaceFunction;
    fn mul(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn add(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn sub(&self, a: &Self::Element, b: &Self::Element) -> Self::Element;
    fn conj(&self, a: &Self::Element) -> Self::Element;
    fn scale(&self, a: &Self::Element, c: Complex64) -> Self::Element;
    fn inverse(&self, a: &Self::Element) -> Result<Self::Element>;
    fn embedding_bound(&self) -> f64;
    fn differential_constant(&self) -> f64;
    fn norm_control(&self, t: f64) -> f64;
}

/// `C(X)` for a finite `X` with the sup norm: `C = D = 1`, `ψ(t) = t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupNormModel {
    points: usize,
}

impl SupNormModel {
    pub fn new(points: usize) -> Self {
        Self { points }
    }

    pub fn points(&self) -> usize {
        self.points
    }
}

impl AlgebraModel for SupNormModel {
    type Element = FiniteSpaceFunction;

    fn check_shape(&self, a: &FiniteSpaceFunction) -> Result<()> {
        if a.len() != self.points {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    fn norm(&self, a: &FiniteSpaceFunction) -> f64 {
        a.sup_norm()
    }

    fn embed(&self, a: &FiniteSpaceFunction) -> FiniteSpaceFunction {
        a.clone()
    }

    fn mul(&self, a: &FiniteSpaceFunction, b: &FiniteSpaceFunction) -> FiniteSpaceFunction {
        a.pointwise_product(b).expect("shapes checked on entry")
    }

    fn add(&self, a: &FiniteSpaceFunction, b: &FiniteSpaceFunction) -> FiniteSpaceFunction {
        Sampled::add(a, b).expect("shapes checked on entry")
    }

    fn sub(&self, a: &FiniteSpaceFunction, b: &FiniteSpaceFunction) -> FiniteSpaceFunction {
        Sampled::sub(a, b).expect("shapes checked on entry")
    }

    fn conj(&self, a: &FiniteSpaceFunction) -> FiniteSpaceFunction {
        Sampled::conj(a)
    }

    fn scale(&self, a: &FiniteSpaceFunction, c: Complex64) -> FiniteSpaceFunction {
        Sampled::scale(a, c)
    }

    fn inverse(&self, a: &FiniteSpaceFunction) -> Result<FiniteSpaceFunction> {
        a.recip()
    }

    fn embedding_bound(&self) -> f64 {
        1.0
    }

    fn differential_constant(&self) -> f64 {
        1.0
    }

    fn norm_control(&self, t: f64) -> f64 {
        t
    }
}
