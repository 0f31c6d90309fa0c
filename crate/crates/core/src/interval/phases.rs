use num_complex::Complex64;

use super::quadratic_step::{lemma45_phi_impl, phi_node};
use super::{shortest_arc, Gate};
use crate::error::{Error, Result};
use crate::function::{GridFunction, IntervalDomain, Sampled};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The unimodular `c = i·conj(w)·z / |conj(w)·z|`, for which
/// `|z + c·w|² = |z|² + |w|²`.
pub fn phase_offset(z: Complex64, w: Complex64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) || w == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument);
    }
    let p = w.conj() * z;
    Ok(Complex64::i() * p / p.norm())
}

/// Extend a partially defined unimodular function to the whole grid.
/// Interior gaps follow the shortest arc between the neighbouring defined
/// values, gaps touching an end are constant, and an empty input gives 1.
pub fn circle_extend(domain: IntervalDomain, partial: &[Option<Complex64>]) -> Result<GridFunction> {
    if partial.len() != domain.len() {
        return Err(Error::InvalidDomain(format!("{} values for {} nodes", partial.len(), domain.len())));
    }
    for (index, z) in partial.iter().enumerate() {
        if let Some(z) = z {
            if (z.norm() - 1.0).abs() > 1e-9 {
                return Err(Error::NonUnimodularInput { index, modulus: z.norm() });
            }
        }
    }
    let n = partial.len();
    let mut out = vec![ONE; n];
    let mut prev: Option<usize> = None;
    let mut k = 0;
    while k < n {
        if let Some(z) = partial[k] {
            out[k] = z;
            prev = Some(k);
            k += 1;
            continue;
        }
        let start = k;
        while k < n && partial[k].is_none() {
            k += 1;
        }
        let next = (k < n).then_some(k);
        match (prev, next) {
            (Some(i), Some(j)) => {
                let (zi, zj) = (partial[i].unwrap(), partial[j].unwrap());
                let sweep = shortest_arc(zi.arg(), zj.arg());
                for (m, slot) in out.iter_mut().enumerate().take(j).skip(start) {
                    let s = (m - i) as f64 / (j - i) as f64;
                    *slot = zi * Complex64::from_polar(1.0, s * sweep);
                }
            }
            (Some(i), None) => out[start..].fill(partial[i].unwrap()),
            (None, Some(j)) => out[start..j].fill(partial[j].unwrap()),
            (None, None) => {}
        }
    }
    GridFunction::new(domain, out)
}

/// Unimodular `β1 ≡ 1` and `β2` with `|h1·β1 + h2·β2| ≥ η` at every node,
/// given `|h1|² + |h2|² ≥ η²` everywhere.
///
/// Where both `|h1|` and `|h2|` exceed `τ·η0` the phase offset makes the
/// two terms orthogonal; elsewhere one term dominates and `β2` is filled in
/// continuously.
pub fn nondeg_phases(h1: &GridFunction, h2: &GridFunction, eta: f64) -> Result<(GridFunction, GridFunction)> {
    nondeg_phases_pinned(h1, h2, eta, [None, None])
}

/// As [`nondeg_phases`], with `β2` optionally prescribed at either end.
pub(crate) fn nondeg_phases_pinned(
    h1: &GridFunction,
    h2: &GridFunction,
    eta: f64,
    pins: [Option<Complex64>; 2],
) -> Result<(GridFunction, GridFunction)> {
    if h1.domain() != h2.domain() {
        return Err(Error::DomainMismatch);
    }
    if !(eta > 0.0) {
        return Err(Error::PreconditionViolated(format!("need eta > 0, got {eta}")));
    }
    let (a, b) = (h1.values(), h2.values());
    let min_sq = a.iter().zip(b).map(|(x, y)| x.norm_sqr() + y.norm_sqr()).fold(f64::INFINITY, f64::min);
    if min_sq < eta * eta * (1.0 - 1e-12) {
        return Err(Error::PreconditionViolated(format!(
            "inf(|h1|^2 + |h2|^2) = {min_sq} < eta^2 = {}",
            eta * eta
        )));
    }
    let eta0 = (min_sq - eta * eta).max(0.0).sqrt();
    let tau = eta0 / (2.0 * (eta + eta0));
    let threshold = tau * eta0;
    let n = a.len();
    let partial: Vec<Option<Complex64>> = (0..n)
        .map(|k| {
            let pin = if k == 0 { pins[0] } else if k == n - 1 { pins[1] } else { None };
            if pin.is_some() {
                return pin;
            }
            let m = a[k].norm().min(b[k].norm());
            if m == 0.0 || m < threshold {
                None
            } else {
                phase_offset(a[k], b[k]).ok()
            }
        })
        .collect();
    let beta2 = circle_extend(*h1.domain(), &partial)?;
    let beta1 = GridFunction::constant(*h1.domain(), ONE);
    for (k, (&x, (&y, &c))) in a.iter().zip(b.iter().zip(beta2.values())).enumerate() {
        let lower = (x + y * c).norm();
        if lower < eta * (1.0 - 1e-9) {
            return Err(Error::PreconditionViolated(format!(
                "|h1 + h2 beta2| = {lower} < eta = {eta} at node {k}"
            )));
        }
    }
    Ok((beta1, beta2))
}

/// Node-level kernel of the perturbation step with `β1 = 1`: returns
/// `(z1, z2) = (φ, β2 φ)` where `φ` solves
/// `(h1 + h2 β2) φ + β2 φ² = d`.
pub(crate) fn nondeg_node(h1: Complex64, h2: Complex64, d: Complex64, beta2: Complex64) -> Result<(Complex64, Complex64)> {
    let f = h1 * ONE + h2 * beta2;
    let phi = phi_node(f, ONE * beta2, d)?;
    Ok((ONE * phi, beta2 * phi))
}

/// Small `z1, z2` with `h1 z1 + h2 z2 + z1 z2 = d` for a jointly
/// non-degenerate pair. Needs `sup|d| ≤ delta45(η, ε)` and gives
/// `‖z1‖, ‖z2‖ ≤ ε`.
pub fn perturb_nondeg(
    h1: &GridFunction,
    h2: &GridFunction,
    d: &GridFunction,
    eta: f64,
    eps: f64,
) -> Result<(GridFunction, GridFunction)> {
    perturb_nondeg_impl(h1, h2, d, eta, eps, [None, None], Gate::Strict)
}

pub(crate) fn perturb_nondeg_impl(
    h1: &GridFunction,
    h2: &GridFunction,
    d: &GridFunction,
    eta: f64,
    eps: f64,
    pins: [Option<Complex64>; 2],
    gate: Gate,
) -> Result<(GridFunction, GridFunction)> {
    if h1.domain() != d.domain() {
        return Err(Error::DomainMismatch);
    }
    let (beta1, beta2) = nondeg_phases_pinned(h1, h2, eta, pins)?;
    let f = h1.pointwise_product(&beta1)?.add(&h2.pointwise_product(&beta2)?)?;
    let g = beta1.pointwise_product(&beta2)?;
    let phi = lemma45_phi_impl(&f, &g, d, eta, eps, gate)?;
    let z1 = beta1.pointwise_product(&phi)?;
    let z2 = beta2.pointwise_product(&phi)?;
    for k in 0..d.len() {
        let (x1, x2) = (z1.values()[k], z2.values()[k]);
        let residual = (h1.values()[k] * x1 + h2.values()[k] * x2 + x1 * x2 - d.values()[k]).norm();
        let limit = 1e-9 * (1.0 + d.values()[k].norm());
        if residual > limit {
            return Err(Error::IdentityViolation { residual, limit });
        }
    }
    Ok((z1, z2))
}
