//! Finite spaces, where each point can be treated on its own, and the
//! unitised diagonal algebra with a weighted `ℓ¹` norm.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{FiniteSpaceFunction, Sampled};
use crate::scheme::{run_scheme, scheme_params, AlgebraModel, SchemeOptions, SchemeOutcome};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `x'y' = xy + w` with `|x' − x|, |y' − y| ≤ ε`, for `|w| ≤ ε²/4`.
///
/// If either factor is at least `1.25·|w|/ε` in modulus the perturbation is
/// divided into the other factor (`x` is tried first), moving it by at most
/// `0.8ε`. Otherwise both are below `0.3125ε` and each is replaced by
/// `√(xy + w)`, a move of at most `0.91ε`. Neither branch sits on the edge of
/// the ball, so rounding cannot push a result past `ε`.
pub fn scalar_factor(x: Complex64, y: Complex64, w: Complex64, eps: f64) -> Result<(Complex64, Complex64)> {
    if !(eps > 0.0) {
        return Err(Error::PreconditionViolated(format!("need eps > 0, got {eps}")));
    }
    let limit = eps * eps / 4.0;
    if w.norm() > limit * (1.0 + 1e-12) {
        return Err(Error::PerturbationTooLarge { bound: "eps^2/4", value: w.norm(), limit });
    }
    if w == ZERO {
        return Ok((x, y));
    }
    let reach = 1.25 * w.norm() / eps;
    Ok(if x.norm() >= reach {
        (x, y + w / x)
    } else if y.norm() >= reach {
        (x + w / y, y)
    } else {
        let r = (x * y + w).sqrt();
        (r, r)
    })
}

/// [`scalar_factor`] at every point.
pub fn open_mult_finite(
    a: &FiniteSpaceFunction,
    b: &FiniteSpaceFunction,
    d: &FiniteSpaceFunction,
    eps: f64,
) -> Result<(FiniteSpaceFunction, FiniteSpaceFunction)> {
    if a.len() != b.len() || a.len() != d.len() {
        return Err(Error::DomainMismatch);
    }
    let limit = eps * eps / 4.0;
    if d.sup_norm() > limit * (1.0 + 1e-12) {
        return Err(Error::PerturbationTooLarge { bound: "eps^2/4", value: d.sup_norm(), limit });
    }
    let (mut x, mut y) = (Vec::with_capacity(a.len()), Vec::with_capacity(a.len()));
    for ((&p, &q), &w) in a.values().iter().zip(b.values()).zip(d.values()) {
        let (p2, q2) = scalar_factor(p, q, w, eps)?;
        x.push(p2);
        y.push(q2);
    }
    Ok((FiniteSpaceFunction::new(x)?, FiniteSpaceFunction::new(y)?))
}

/// Which rule was applied at a point by [`nondeg_approx`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// `|f| ≥ ε/3`.
    F,
    /// `|f| < ε/3 ≤ |g|`.
    G,
    /// both below `ε/3`.
    Small,
}

pub fn region(f: Complex64, g: Complex64, eps: f64) -> Region {
    if f.norm() >= eps / 3.0 {
        Region::F
    } else if g.norm() >= eps / 3.0 {
        Region::G
    } else {
        Region::Small
    }
}

/// Largest power of two not above `x > 0`.
fn pow2_floor(x: f64) -> f64 {
    2f64.powi(x.log2().floor() as i32).min(x)
}

/// A jointly non-degenerate pair `(f', g')` within `ε` of `(f, g)` with
/// `f'g' = fg` exactly.
///
/// Points where `f` or `g` is at least `ε/3` keep their values. Elsewhere
/// `f'` is a fixed constant `s` near `ε/2` and `g' = fg/s`; `s` is `ε/2`
/// when that division is exact and otherwise a power of two just below it.
pub fn nondeg_approx(f: &FiniteSpaceFunction, g: &FiniteSpaceFunction, eps: f64) -> Result<(FiniteSpaceFunction, FiniteSpaceFunction)> {
    if f.len() != g.len() {
        return Err(Error::DomainMismatch);
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::PreconditionViolated(format!("need eps > 0, got {eps}")));
    }
    let half = eps / 2.0;
    let (mut fo, mut go) = (Vec::with_capacity(f.len()), Vec::with_capacity(f.len()));
    for (&a, &b) in f.values().iter().zip(g.values()) {
        if region(a, b, eps) != Region::Small {
            fo.push(a);
            go.push(b);
            continue;
        }
        let p = a * b;
        let s = if Complex64::new(half, 0.0) * (p / half) == p { half } else { pow2_floor(half) };
        fo.push(Complex64::new(s, 0.0));
        go.push(p / s);
    }
    Ok((FiniteSpaceFunction::new(fo)?, FiniteSpaceFunction::new(go)?))
}

/// An element `λ·1 + a` of the unitisation of the diagonal algebra on a
/// finite index set, normed by `|λ| + Σ w_γ |a_γ|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalAlgebraElement {
    pub scalar: Complex64,
    pub coords: Vec<Complex64>,
    pub weights: Vec<f64>,
}

impl DiagonalAlgebraElement {
    pub fn new(scalar: Complex64, coords: Vec<Complex64>, weights: Vec<f64>) -> Result<Self> {
        validate_weights(&weights)?;
        if coords.len() != weights.len() {
            return Err(Error::InvalidModel(format!("{} coordinates for {} weights", coords.len(), weights.len())));
        }
        if !scalar.is_finite() || coords.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFinite(0));
        }
        Ok(Self { scalar, coords, weights })
    }

    pub fn norm(&self) -> f64 {
        self.scalar.norm() + self.coords.iter().zip(&self.weights).map(|(z, w)| w * z.norm()).sum::<f64>()
    }

    fn with(&self, scalar: Complex64, coords: Vec<Complex64>) -> Self {
        Self { scalar, coords, weights: self.weights.clone() }
    }
}

fn validate_weights(weights: &[f64]) -> Result<()> {
    for (k, &w) in weights.iter().enumerate() {
        if !(w >= 1.0 && w.is_finite()) {
            return Err(Error::InvalidModel(format!("weight {k} = {w}; weights must be finite and at least 1")));
        }
    }
    Ok(())
}

/// The unitised diagonal algebra as an [`AlgebraModel`]. The embedding
/// evaluates `λ + a_γ` at each index and `λ` at the added point at
/// infinity. Weights of at least 1 make the norm submultiplicative with
/// `C = D = 1`; inversion is controlled by `ψ(t) = t²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalModel {
    weights: Vec<f64>,
}

impl DiagonalModel {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        validate_weights(&weights)?;
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn element(&self, scalar: Complex64, coords: Vec<Complex64>) -> Result<DiagonalAlgebraElement> {
        DiagonalAlgebraElement::new(scalar, coords, self.weights.clone())
    }
}

impl AlgebraModel for DiagonalModel {
    type Element = DiagonalAlgebraElement;

    fn check_shape(&self, a: &DiagonalAlgebraElement) -> Result<()> {
        if a.weights != self.weights {
            return Err(Error::DomainMismatch);
        }
        Ok(())
    }

    fn norm(&self, a: &DiagonalAlgebraElement) -> f64 {
        a.norm()
    }

    fn embed(&self, a: &DiagonalAlgebraElement) -> FiniteSpaceFunction {
        let mut v: Vec<Complex64> = a.coords.iter().map(|&z| a.scalar + z).collect();
        v.push(a.scalar);
        FiniteSpaceFunction::new(v).expect("finite elements embed to finite samples")
    }

    fn mul(&self, a: &DiagonalAlgebraElement, b: &DiagonalAlgebraElement) -> DiagonalAlgebraElement {
        let coords = a
            .coords
            .iter()
            .zip(&b.coords)
            .map(|(&x, &y)| a.scalar * y + b.scalar * x + x * y)
            .collect();
        a.with(a.scalar * b.scalar, coords)
    }

    fn add(&self, a: &DiagonalAlgebraElement, b: &DiagonalAlgebraElement) -> DiagonalAlgebraElement {
        a.with(a.scalar + b.scalar, a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect())
    }

    fn sub(&self, a: &DiagonalAlgebraElement, b: &DiagonalAlgebraElement) -> DiagonalAlgebraElement {
        a.with(a.scalar - b.scalar, a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect())
    }

    fn conj(&self, a: &DiagonalAlgebraElement) -> DiagonalAlgebraElement {
        a.with(a.scalar.conj(), a.coords.iter().map(|z| z.conj()).collect())
    }

    fn scale(&self, a: &DiagonalAlgebraElement, c: Complex64) -> DiagonalAlgebraElement {
        a.with(a.scalar * c, a.coords.iter().map(|z| z * c).collect())
    }

    fn inverse(&self, a: &DiagonalAlgebraElement) -> Result<DiagonalAlgebraElement> {
        let l = a.scalar;
        if l == ZERO || a.coords.iter().any(|&z| l + z == ZERO) {
            return Err(Error::NotInvertible);
        }
        Ok(a.with(1.0 / l, a.coords.iter().map(|&z| -z / (l * (l + z))).collect()))
    }

    fn embedding_bound(&self) -> f64 {
        1.0
    }

    fn differential_constant(&self) -> f64 {
        1.0
    }

    fn norm_control(&self, t: f64) -> f64 {
        t * t
    }
}

/// Factor `ab + d` in the unitised diagonal algebra by running the
/// inversion scheme with [`DiagonalModel`].
pub fn diagonal_open_mult(
    a: &DiagonalAlgebraElement,
    b: &DiagonalAlgebraElement,
    d: &DiagonalAlgebraElement,
    eps: f64,
) -> Result<SchemeOutcome<DiagonalAlgebraElement>> {
    let model = DiagonalModel::new(a.weights.clone())?;
    let params = scheme_params(a, b, eps, &model)?;
    run_scheme(a, b, d, &params, &model, &SchemeOptions::default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scheme::norm_control_h;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(x: f64) -> Complex64 {
        c(x, 0.0)
    }

    fn fs(v: &[Complex64]) -> FiniteSpaceFunction {
        FiniteSpaceFunction::new(v.to_vec()).unwrap()
    }

    #[test]
    fn scalar_examples() {
        let (x, y) = scalar_factor(r(2.0), r(3.0), r(0.1), 1.0).unwrap();
        assert_eq!(x, r(2.0));
        assert!((y - r(3.05)).norm() < 1e-15);
        assert!((x * y - r(6.1)).norm() < 1e-14);
        assert_eq!(scalar_factor(r(0.0), r(0.0), r(0.25), 1.0).unwrap(), (r(0.5), r(0.5)));
        assert!(matches!(scalar_factor(r(0.0), r(0.0), r(0.3), 1.0), Err(Error::PerturbationTooLarge { .. })));
    }

    #[test]
    fn scalar_grid_stays_in_the_ball() {
        let steps = 9;
        for eps in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0] {
            let wmod = eps * eps / 4.0;
            let mut worst = 0.0f64;
            for i in 0..steps {
                for j in 0..steps {
                    for k in 0..steps {
                        for (pa, pb) in [(0.0, 0.0), (1.0, 2.5), (3.0, 4.5)] {
                            let x = Complex64::from_polar(2.0 * i as f64 / (steps - 1) as f64, pa);
                            let y = Complex64::from_polar(2.0 * j as f64 / (steps - 1) as f64, pb);
                            let w = Complex64::from_polar(wmod, TAU * k as f64 / steps as f64);
                            let (x2, y2) = scalar_factor(x, y, w, eps).unwrap();
                            assert!((x2 * y2 - x * y - w).norm() <= 1e-12 * (1.0 + (x * y + w).norm()));
                            worst = worst.max((x2 - x).norm().max((y2 - y).norm()) / eps);
                        }
                    }
                }
            }
            assert!(worst <= 0.95, "eps {eps}: ratio {worst}");
        }
    }

    #[test]
    fn finite_examples() {
        let a = fs(&[r(1.0), c(0.0, 2.0), r(0.0)]);
        let b = fs(&[r(0.5), r(0.0), r(0.0)]);
        let zero = fs(&[r(0.0); 3]);
        assert_eq!(open_mult_finite(&a, &b, &zero, 0.5).unwrap(), (a.clone(), b.clone()));
        let one = open_mult_finite(&fs(&[r(2.0)]), &fs(&[r(3.0)]), &fs(&[r(0.1)]), 1.0).unwrap();
        assert_eq!(one.0.values()[0], scalar_factor(r(2.0), r(3.0), r(0.1), 1.0).unwrap().0);
        assert_eq!(one.1.values()[0], scalar_factor(r(2.0), r(3.0), r(0.1), 1.0).unwrap().1);
    }

    #[test]
    fn random_finite_vectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let eps = rng.gen_range(0.01..1.0);
            let mut gen = |m: f64| {
                fs(&(0..16).map(|_| Complex64::from_polar(rng.gen_range(0.0..m), rng.gen_range(0.0..TAU))).collect::<Vec<_>>())
            };
            let a = gen(1.0);
            let b = gen(1.0);
            let d = gen(eps * eps / 4.0);
            let (a2, b2) = open_mult_finite(&a, &b, &d, eps).unwrap();
            for k in 0..16 {
                let lhs = a2.values()[k] * b2.values()[k];
                let rhs = a.values()[k] * b.values()[k] + d.values()[k];
                assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
            }
            assert!(a2.sub(&a).unwrap().sup_norm() <= eps);
            assert!(b2.sub(&b).unwrap().sup_norm() <= eps);
        }
    }

    #[test]
    fn nondeg_examples() {
        let f = fs(&[r(1.0), c(0.0, -0.5)]);
        let g = fs(&[r(0.0), r(0.2)]);
        assert_eq!(nondeg_approx(&f, &g, 0.6).unwrap(), (f.clone(), g.clone()));

        let (f2, g2) = nondeg_approx(&fs(&[r(1.0), r(0.0)]), &fs(&[r(0.0), r(0.0)]), 0.6).unwrap();
        assert_eq!(f2.values(), &[r(1.0), r(0.3)]);
        assert_eq!(g2.values(), &[r(0.0), r(0.0)]);
        let m = (0..2).map(|k| f2.values()[k].norm_sqr() + g2.values()[k].norm_sqr()).fold(f64::INFINITY, f64::min);
        assert!((m - 0.09).abs() < 1e-15);

        let (f2, g2) = nondeg_approx(&fs(&[r(0.0); 4]), &fs(&[r(0.0); 4]), 1.0).unwrap();
        assert!(f2.values().iter().all(|&z| z == r(0.5)));
        assert!(g2.values().iter().all(|&z| z == r(0.0)));
    }

    #[test]
    fn pow2_floor_examples() {
        assert_eq!(pow2_floor(0.5), 0.5);
        assert_eq!(pow2_floor(0.3), 0.25);
        assert_eq!(pow2_floor(3.0), 2.0);
    }

    proptest! {
        #[test]
        fn nondeg_product_is_bit_exact(
            vals in prop::collection::vec((0.0f64..1.0, 0.0f64..TAU, 0.0f64..1.0, 0.0f64..TAU), 1..20),
            eps in 0.01f64..2.0,
        ) {
            let f = fs(&vals.iter().map(|v| Complex64::from_polar(v.0, v.1)).collect::<Vec<_>>());
            let g = fs(&vals.iter().map(|v| Complex64::from_polar(v.2, v.3)).collect::<Vec<_>>());
            let (f2, g2) = nondeg_approx(&f, &g, eps).unwrap();
            for k in 0..f.len() {
                prop_assert_eq!(f2.values()[k] * g2.values()[k], f.values()[k] * g.values()[k]);
                prop_assert!(f2.values()[k].norm_sqr() + g2.values()[k].norm_sqr() > 0.0);
            }
            prop_assert!(f2.sub(&f).unwrap().sup_norm() <= eps);
            prop_assert!(g2.sub(&g).unwrap().sup_norm() <= eps);
        }

        #[test]
        fn diagonal_differential_inequality(
            a in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 4),
            b in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 4),
            w in prop::collection::vec(1.0f64..5.0, 3),
        ) {
            let m = DiagonalModel::new(w).unwrap();
            let x = m.element(c(a[0].0, a[0].1), a[1..].iter().map(|p| c(p.0, p.1)).collect()).unwrap();
            let y = m.element(c(b[0].0, b[0].1), b[1..].iter().map(|p| c(p.0, p.1)).collect()).unwrap();
            let ab = m.norm(&m.mul(&x, &y));
            let bound = m.norm(&x) * m.embed(&y).sup_norm() + m.embed(&x).sup_norm() * m.norm(&y);
            prop_assert!(ab <= m.differential_constant() * bound * (1.0 + 1e-12));
            prop_assert!(m.embed(&x).sup_norm() <= m.embedding_bound() * m.norm(&x) * (1.0 + 1e-12));
            prop_assert!(ab <= m.norm(&x) * m.norm(&y) * (1.0 + 1e-12));
        }

        /// ψ(t) = t² dominates the true inverse norm.
        #[test]
        fn diagonal_norm_control_dominates(
            a in prop::collection::vec((0.1f64..3.0, 0.0f64..TAU), 5),
            w in prop::collection::vec(1.0f64..5.0, 4),
        ) {
            let m = DiagonalModel::new(w).unwrap();
            let lam = Complex64::from_polar(a[0].0, a[0].1);
            // Keep λ + a_γ away from zero.
            let coords: Vec<Complex64> = a[1..].iter().map(|p| Complex64::from_polar(p.0, p.1) - lam).collect();
            let x = m.element(lam, coords).unwrap();
            let inv = m.inverse(&x).unwrap();
            let one = m.mul(&x, &inv);
            prop_assert!((one.scalar - r(1.0)).norm() < 1e-12);
            prop_assert!(one.coords.iter().all(|z| z.norm() < 1e-12));
            let h = norm_control_h(m.norm(&x), m.embed(&inv).sup_norm(), &m).unwrap();
            prop_assert!(m.norm(&inv) <= h * (1.0 + 1e-12));
        }
    }

    #[test]
    fn diagonal_zero_perturbation() {
        let m = DiagonalModel::new(vec![1.0, 1.0]).unwrap();
        let a = m.element(r(1.0), vec![c(0.5, 0.0), c(0.0, 0.3)]).unwrap();
        let b = m.element(r(0.5), vec![r(0.0), r(0.2)]).unwrap();
        let d = m.element(r(0.0), vec![r(0.0), r(0.0)]).unwrap();
        let out = diagonal_open_mult(&a, &b, &d, 0.5).unwrap();
        assert_eq!((out.f, out.g, out.iterations), (a, b, 0));
    }

    #[test]
    fn pure_scalars_follow_the_scalar_recursion() {
        let m = DiagonalModel::new(vec![]).unwrap();
        let one = m.element(r(1.0), vec![]).unwrap();
        let params = scheme_params(&one, &one, 0.5, &m).unwrap();
        let h0 = params.delta / 2.0;
        let d = m.element(r(h0), vec![]).unwrap();
        let out = diagonal_open_mult(&one, &one, &d, 0.5).unwrap();
        assert!((out.trace.entries[1].norm_f - (1.0 + h0 / 2.0)).abs() < 1e-16);
        assert!((out.f.scalar * out.g.scalar - r(1.0 + h0)).norm() < 1e-15);
    }

    #[test]
    fn random_diagonal_runs_converge() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = DiagonalModel::new(vec![1.0, 1.0]).unwrap();
        for _ in 0..20 {
            let mut el = |s: f64| {
                m.element(
                    Complex64::from_polar(rng.gen_range(0.5..1.5), rng.gen_range(0.0..TAU)),
                    (0..2).map(|_| Complex64::from_polar(rng.gen_range(0.0..s), rng.gen_range(0.0..TAU))).collect(),
                )
                .unwrap()
            };
            let a = el(0.4);
            let b = el(0.4);
            let dir = el(1.0);
            let params = scheme_params(&a, &b, 0.5, &m).unwrap();
            let d = m.scale(&dir, r(0.9 * params.delta / m.norm(&dir)));
            let out = diagonal_open_mult(&a, &b, &d, 0.5).unwrap();
            let target = m.add(&m.mul(&a, &b), &d);
            assert!(m.norm(&m.sub(&m.mul(&out.f, &out.g), &target)) <= 1e-9);
            assert!(out.distance_f <= 0.5 && out.distance_g <= 0.5);
        }
    }
}
