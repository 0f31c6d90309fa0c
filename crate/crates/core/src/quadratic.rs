//! Roots of `γz² + βz + α` with `|γ| = 1`, and the map selecting the root of
//! strictly smaller modulus.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for `|γ| = 1`.
pub const UNIMODULAR_TOLERANCE: f64 = 1e-12;
/// Relative tolerance below which two root moduli count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Coefficients of `γz² + βz + α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticTriple {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub gamma: Complex64,
}

impl QuadraticTriple {
    pub fn new(alpha: Complex64, beta: Complex64, gamma: Complex64) -> Result<Self> {
        if (gamma.norm() - 1.0).abs() > UNIMODULAR_TOLERANCE {
            return Err(Error::PreconditionViolated(format!("|gamma| = {} != 1", gamma.norm())));
        }
        Ok(Self { alpha, beta, gamma })
    }

    /// Skips the `|γ| = 1` check; callers guarantee `γ ≠ 0`.
    pub(crate) fn from_parts(alpha: Complex64, beta: Complex64, gamma: Complex64) -> Self {
        Self { alpha, beta, gamma }
    }

    /// Both roots, larger modulus first.
    ///
    /// The larger root comes from the quadratic formula with the sign that
    /// avoids cancellation; the smaller is recovered from the Vieta product,
    /// so it stays accurate when `α` is tiny.
    pub fn roots(&self) -> (Complex64, Complex64) {
        let Self { alpha, beta, gamma } = *self;
        let disc = (beta * beta - 4.0 * gamma * alpha).sqrt();
        let s = if (beta.conj() * disc).re >= 0.0 { disc } else { -disc };
        let q = -(beta + s) * 0.5;
        if q == Complex64::new(0.0, 0.0) {
            return (q, q);
        }
        (q / gamma, alpha / q)
    }

    pub fn in_delta(&self) -> bool {
        let (z1, z2) = self.roots();
        let (m1, m2) = (z1.norm(), z2.norm());
        (m1 - m2).abs() > TIE_TOLERANCE * (1.0 + m1 + m2)
    }

    /// The root of strictly smaller modulus.
    pub fn smaller_root(&self) -> Result<Complex64> {
        let (z1, z2) = self.roots();
        let (m1, m2) = (z1.norm(), z2.norm());
        if (m1 - m2).abs() <= TIE_TOLERANCE * (1.0 + m1 + m2) {
            return Err(Error::NotInDelta);
        }
        Ok(if m1 < m2 { z1 } else { z2 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(re: f64) -> Complex64 {
        c(re, 0.0)
    }

    /// Textbook formula `(-β ± sqrt(β² - 4γα)) / 2γ`, kept independent of the
    /// cancellation-avoiding path under test.
    fn textbook_roots(t: &QuadraticTriple) -> (Complex64, Complex64) {
        let disc = (t.beta * t.beta - 4.0 * t.gamma * t.alpha).sqrt();
        ((-t.beta + disc) / (2.0 * t.gamma), (-t.beta - disc) / (2.0 * t.gamma))
    }

    fn sorted_by_modulus(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
        if a.norm() <= b.norm() {
            (a, b)
        } else {
            (b, a)
        }
    }

    #[test]
    fn factored_polynomial() {
        let t = QuadraticTriple::new(r(2.0), r(-3.0), r(1.0)).unwrap();
        let (big, small) = t.roots();
        assert!((big - r(2.0)).norm() < 1e-15);
        assert!((small - r(1.0)).norm() < 1e-15);
        assert!(t.in_delta());
        assert!((t.smaller_root().unwrap() - r(1.0)).norm() < 1e-15);
    }

    #[test]
    fn zero_root() {
        let b = c(0.3, -1.2);
        let t = QuadraticTriple::new(r(0.0), b, r(1.0)).unwrap();
        let (big, small) = t.roots();
        assert_eq!(small, r(0.0));
        assert!((big + b).norm() < 1e-15);
        assert_eq!(QuadraticTriple::new(r(0.0), r(1.0), r(1.0)).unwrap().smaller_root().unwrap(), r(0.0));
    }

    #[test]
    fn degenerate_triple() {
        let t = QuadraticTriple::new(r(0.0), r(0.0), c(0.0, 1.0)).unwrap();
        assert_eq!(t.roots(), (r(0.0), r(0.0)));
        assert_eq!(t.smaller_root(), Err(Error::NotInDelta));
    }

    #[test]
    fn equal_moduli_are_outside_delta() {
        let t = QuadraticTriple::new(r(1.0), r(0.0), r(1.0)).unwrap();
        assert!(!t.in_delta());
        assert_eq!(t.smaller_root(), Err(Error::NotInDelta));
    }

    #[test]
    fn small_alpha_against_textbook_formula() {
        let t = QuadraticTriple::new(r(0.01), r(1.0), r(1.0)).unwrap();
        // z² + z + 0.01: (-1 ± sqrt(0.96)) / 2
        let oracle_small = (-1.0 + 0.96f64.sqrt()) / 2.0;
        let oracle_big = (-1.0 - 0.96f64.sqrt()) / 2.0;
        assert!(t.in_delta());
        assert!((t.smaller_root().unwrap() - r(oracle_small)).norm() < 1e-15);
        assert!((t.roots().0 - r(oracle_big)).norm() < 1e-15);
        assert!((oracle_small + 0.010102).abs() < 1e-6);
    }

    #[test]
    fn rejects_non_unimodular_gamma() {
        assert!(QuadraticTriple::new(r(1.0), r(1.0), r(1.1)).is_err());
    }

    fn cplx(scale: f64) -> impl Strategy<Value = Complex64> {
        (-scale..scale, -scale..scale).prop_map(|(a, b)| c(a, b))
    }

    proptest! {
        #[test]
        fn vieta_residuals(alpha in cplx(3.0), beta in cplx(3.0), theta in 0.0f64..std::f64::consts::TAU) {
            let gamma = Complex64::from_polar(1.0, theta);
            let t = QuadraticTriple::new(alpha, beta, gamma).unwrap();
            let (z1, z2) = t.roots();
            let tol = 1e-10 * (1.0 + beta.norm() + alpha.norm());
            prop_assert!((gamma * (z1 + z2) + beta).norm() <= tol);
            prop_assert!((gamma * z1 * z2 - alpha).norm() <= tol);
        }

        #[test]
        fn agrees_with_textbook_formula(alpha in cplx(2.0), beta in cplx(2.0), theta in 0.0f64..std::f64::consts::TAU) {
            let t = QuadraticTriple::new(alpha, beta, Complex64::from_polar(1.0, theta)).unwrap();
            let (a, b) = t.roots();
            let (s1, b1) = sorted_by_modulus(a, b);
            let (o1, o2) = textbook_roots(&t);
            let (s2, b2) = sorted_by_modulus(o1, o2);
            if (s2.norm() - b2.norm()).abs() > 1e-6 {
                prop_assert!((s1 - s2).norm() <= 1e-9 * (1.0 + b2.norm()));
                prop_assert!((b1 - b2).norm() <= 1e-9 * (1.0 + b2.norm()));
            }
        }

        /// If |β| ≥ η and |α| ≤ δ with 2δ/η ≤ ε and 2δ/η < η/2, the triple is in Δ
        /// and the smaller root has modulus at most 2|α|/η ≤ ε.
        #[test]
        fn small_root_bound_chain(
            eta in 0.01f64..2.0,
            eps in 0.01f64..2.0,
            a_frac in 0.0f64..1.0,
            a_arg in 0.0f64..std::f64::consts::TAU,
            b_extra in 0.0f64..3.0,
            b_arg in 0.0f64..std::f64::consts::TAU,
            g_arg in 0.0f64..std::f64::consts::TAU,
        ) {
            let delta = (eps * eta / 2.0).min(eta * eta / 5.0);
            let alpha = Complex64::from_polar(a_frac * delta, a_arg);
            let beta = Complex64::from_polar(eta + b_extra, b_arg);
            let t = QuadraticTriple::new(alpha, beta, Complex64::from_polar(1.0, g_arg)).unwrap();
            prop_assert!(t.in_delta());
            let z = t.smaller_root().unwrap();
            prop_assert!(z.norm() <= 2.0 * alpha.norm() / beta.norm() * (1.0 + 1e-12));
            prop_assert!(z.norm() <= eps * (1.0 + 1e-12));
        }

        /// Finite-difference continuity: halving the perturbation halves the change.
        #[test]
        fn smaller_root_is_lipschitz_near_regular_points(
            alpha in cplx(0.05),
            b_arg in 0.0f64..std::f64::consts::TAU,
            g_arg in 0.0f64..std::f64::consts::TAU,
            dir in (0.0f64..std::f64::consts::TAU, 0.0f64..std::f64::consts::TAU, 0.0f64..std::f64::consts::TAU),
        ) {
            let beta = Complex64::from_polar(1.0, b_arg);
            let gamma = Complex64::from_polar(1.0, g_arg);
            let base = QuadraticTriple::from_parts(alpha, beta, gamma).smaller_root().unwrap();
            let mut prev = f64::INFINITY;
            for k in 0..6 {
                let h = 1e-3 / f64::from(1 << k);
                let moved = QuadraticTriple::from_parts(
                    alpha + Complex64::from_polar(h, dir.0),
                    beta + Complex64::from_polar(h, dir.1),
                    gamma * Complex64::from_polar(1.0, h * dir.2.cos()),
                )
                .smaller_root()
                .unwrap();
                let change = (moved - base).norm();
                prop_assert!(change <= 10.0 * h);
                if prev.is_finite() && prev > 1e-13 {
                    prop_assert!(change <= 0.6 * prev + 1e-14);
                }
                prev = change;
            }
        }
    }
}
