use num_complex::Complex64;

use super::{shortest_arc, Gate};
use crate::error::{Error, Result};
use crate::function::{GridFunction, Sampled};

/// Which end of the interval carries the prescribed boundary values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn arg0(z: Complex64) -> f64 {
    if z == ZERO {
        0.0
    } else {
        z.arg()
    }
}

fn check_product(z: Complex64, w: Complex64, psi: Complex64, what: &str) -> Result<()> {
    if (z * w - psi).norm() > 1e-9 * (1.0 + psi.norm()) {
        return Err(Error::BoundaryMismatch(format!("{what}: product {} differs from psi = {psi}", z * w)));
    }
    Ok(())
}

/// Factor `ψ = Z1 Z2` on an interval with `(Z1, Z2) = (za, wa)` at the
/// prescribed end and `Z1 = Z2 = ẑ` at the other, keeping
/// `‖Z1‖, ‖Z2‖ ≤ ε` when `sup|ψ| ≤ ε²`.
///
/// The factor that starts larger moves from its boundary value to `ẑ` with
/// linearly interpolated modulus (never below `√|ψ|`) and shortest-arc phase;
/// the other factor is `ψ` divided by it.
pub fn factor_halfboundary(
    psi: &GridFunction,
    eps: f64,
    za: Complex64,
    wa: Complex64,
    zhat: Complex64,
    side: Side,
) -> Result<(GridFunction, GridFunction)> {
    halfboundary_impl(psi, eps, za, wa, zhat, side, Gate::Strict)
}

pub(crate) fn halfboundary_impl(
    psi: &GridFunction,
    eps: f64,
    za: Complex64,
    wa: Complex64,
    zhat: Complex64,
    side: Side,
    gate: Gate,
) -> Result<(GridFunction, GridFunction)> {
    let n = psi.len();
    let v = psi.values();
    let (pre, post) = match side {
        Side::Left => (0, n - 1),
        Side::Right => (n - 1, 0),
    };
    if gate == Gate::Strict {
        check_budget(psi, eps, &[za, wa, zhat])?;
    }
    check_product(za, wa, v[pre], "prescribed end")?;
    check_product(zhat, zhat, v[post], "free end")?;

    let swap = wa.norm() > za.norm();
    let (m0, _) = if swap { (wa, za) } else { (za, wa) };
    let (r0, r1) = (m0.norm(), zhat.norm());
    let theta0 = arg0(m0);
    let sweep = shortest_arc(theta0, arg0(zhat));
    let mut main = vec![ZERO; n];
    let mut other = vec![ZERO; n];
    for k in 0..n {
        let p = match side {
            Side::Left => k,
            Side::Right => n - 1 - k,
        };
        let s = p as f64 / (n - 1) as f64;
        let r = ((1.0 - s) * r0 + s * r1).max(v[k].norm().sqrt());
        let z = Complex64::from_polar(r, theta0 + s * sweep);
        main[k] = z;
        other[k] = if z == ZERO { ZERO } else { v[k] / z };
    }
    main[pre] = m0;
    other[pre] = if swap { za } else { wa };
    main[post] = zhat;
    other[post] = zhat;
    let (z1, z2) = if swap { (other, main) } else { (main, other) };
    let z1 = GridFunction::new(*psi.domain(), z1)?;
    let z2 = GridFunction::new(*psi.domain(), z2)?;
    verify(psi, &z1, &z2, eps, gate)?;
    Ok((z1, z2))
}

fn check_budget(psi: &GridFunction, eps: f64, boundary: &[Complex64]) -> Result<()> {
    if !(eps > 0.0) {
        return Err(Error::PreconditionViolated(format!("need eps > 0, got {eps}")));
    }
    if psi.sup_norm() > eps * eps * (1.0 + 1e-9) {
        return Err(Error::PreconditionViolated(format!(
            "sup|psi| = {} exceeds eps^2 = {}",
            psi.sup_norm(),
            eps * eps
        )));
    }
    for z in boundary {
        if z.norm() > eps * (1.0 + 1e-9) {
            return Err(Error::BoundaryMismatch(format!("boundary value modulus {} exceeds eps = {eps}", z.norm())));
        }
    }
    Ok(())
}

fn verify(psi: &GridFunction, z1: &GridFunction, z2: &GridFunction, eps: f64, gate: Gate) -> Result<()> {
    for ((&p, &a), &b) in psi.values().iter().zip(z1.values()).zip(z2.values()) {
        let residual = (a * b - p).norm();
        let limit = 1e-9 * (1.0 + p.norm());
        if residual > limit {
            return Err(Error::IdentityViolation { residual, limit });
        }
    }
    if gate == Gate::Strict {
        let value = z1.sup_norm().max(z2.sup_norm());
        if value > eps * (1.0 + 1e-9) {
            return Err(Error::NormBudgetExceeded { value, limit: eps });
        }
    }
    Ok(())
}

/// Factor `ψ = Z1 Z2` with both boundary pairs prescribed. The interval is
/// split at its middle node, where both halves meet at `√ψ`.
pub fn factor_interval(
    psi: &GridFunction,
    eps: f64,
    za: Complex64,
    wa: Complex64,
    zb: Complex64,
    wb: Complex64,
) -> Result<(GridFunction, GridFunction)> {
    factor_interval_impl(psi, eps, [za, wa, zb, wb], Gate::Strict)
}

pub(crate) fn factor_interval_impl(
    psi: &GridFunction,
    eps: f64,
    [za, wa, zb, wb]: [Complex64; 4],
    gate: Gate,
) -> Result<(GridFunction, GridFunction)> {
    let n = psi.len();
    if n == 2 {
        if gate == Gate::Strict {
            check_budget(psi, eps, &[za, wa, zb, wb])?;
        }
        check_product(za, wa, psi.first(), "left end")?;
        check_product(zb, wb, psi.last(), "right end")?;
        let z1 = GridFunction::new(*psi.domain(), vec![za, zb])?;
        let z2 = GridFunction::new(*psi.domain(), vec![wa, wb])?;
        verify(psi, &z1, &z2, eps, gate)?;
        return Ok((z1, z2));
    }
    let mid = (n - 1) / 2;
    let zhat = psi.values()[mid].sqrt();
    let (l1, l2) = halfboundary_impl(&psi.restrict(0, mid)?, eps, za, wa, zhat, Side::Left, gate)?;
    let (r1, r2) = halfboundary_impl(&psi.restrict(mid, n - 1)?, eps, zb, wb, zhat, Side::Right, gate)?;
    let join = |l: GridFunction, r: GridFunction| {
        let mut v = l.into_values();
        v.extend_from_slice(&r.values()[1..]);
        GridFunction::new(*psi.domain(), v)
    };
    Ok((join(l1, r1)?, join(l2, r2)?))
}
