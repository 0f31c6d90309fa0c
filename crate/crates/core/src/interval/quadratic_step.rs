use num_complex::Complex64;

use super::Gate;
use crate::error::{Error, Result};
use crate::function::{GridFunction, Sampled};
use crate::quadratic::QuadraticTriple;

/// Admissible perturbation size for the quadratic step: `2δ/η ≤ ε` and
/// `2δ/η < η/2`, the second with margin.
pub fn delta45(eta: f64, eps: f64) -> f64 {
    (eps * eta / 2.0).min(eta * eta / 5.0)
}

/// Smaller root of `g φ² + f φ - d = 0`.
pub(crate) fn phi_node(f: Complex64, g: Complex64, d: Complex64) -> Result<Complex64> {
    QuadraticTriple::from_parts(-d, f, g).smaller_root()
}

/// Solve `f φ + g φ² = d` node-wise with `φ` the smaller root, so that
/// `‖φ‖ ≤ ε` whenever `|f| ≥ η`, `|g| = 1` and `‖d‖ ≤ delta45(η, ε)`.
pub fn lemma45_phi(f: &GridFunction, g: &GridFunction, d: &GridFunction, eta: f64, eps: f64) -> Result<GridFunction> {
    lemma45_phi_impl(f, g, d, eta, eps, Gate::Strict)
}

pub(crate) fn lemma45_phi_impl(
    f: &GridFunction,
    g: &GridFunction,
    d: &GridFunction,
    eta: f64,
    eps: f64,
    gate: Gate,
) -> Result<GridFunction> {
    if !(eta > 0.0 && eps > 0.0) {
        return Err(Error::PreconditionViolated(format!("need eta, eps > 0, got {eta}, {eps}")));
    }
    if f.domain() != g.domain() || f.domain() != d.domain() {
        return Err(Error::DomainMismatch);
    }
    for (k, (&fk, &gk)) in f.values().iter().zip(g.values()).enumerate() {
        if fk.norm() < eta * (1.0 - 1e-9) {
            return Err(Error::PreconditionViolated(format!("|f| = {} < eta = {eta} at node {k}", fk.norm())));
        }
        if (gk.norm() - 1.0).abs() > 1e-9 {
            return Err(Error::PreconditionViolated(format!("|g| = {} != 1 at node {k}", gk.norm())));
        }
    }
    let budget = delta45(eta, eps);
    if gate == Gate::Strict && d.sup_norm() > budget * (1.0 + 1e-12) {
        return Err(Error::PreconditionViolated(format!(
            "sup|d| = {} exceeds delta45 = {budget}",
            d.sup_norm()
        )));
    }
    let mut phi = Vec::with_capacity(f.len());
    for ((&fk, &gk), &dk) in f.values().iter().zip(g.values()).zip(d.values()) {
        let p = phi_node(fk, gk, dk)?;
        let residual = (fk * p + gk * p * p - dk).norm();
        let limit = 1e-10 * (1.0 + fk.norm() + dk.norm());
        if residual > limit {
            return Err(Error::IdentityViolation { residual, limit });
        }
        phi.push(p);
    }
    let phi = GridFunction::new(*f.domain(), phi)?;
    if gate == Gate::Strict && phi.sup_norm() > eps * (1.0 + 1e-9) {
        return Err(Error::NormBudgetExceeded { value: phi.sup_norm(), limit: eps });
    }
    Ok(phi)
}
