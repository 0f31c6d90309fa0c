//! Empirical openness moduli, for checking the constructive constants from
//! below.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::function::GridFunction;
use crate::interval::{factor_with_pins, Gate, PipelineConfig};
use crate::sampling::perturbation;

/// Smallest `|ψ/x' − y|` over `x'` in the closed `ε`-ball around `x`,
/// found by a polar grid search and local refinement. Returns early once
/// the value drops to `ε`.
fn best_partner_gap(x: Complex64, y: Complex64, psi: Complex64, eps: f64, grid: usize) -> f64 {
    let target = eps * (1.0 + 1e-9);
    let gap = |z: Complex64| {
        if (z - x).norm() > eps * (1.0 + 1e-12) {
            f64::INFINITY
        } else if z == Complex64::new(0.0, 0.0) {
            if psi == Complex64::new(0.0, 0.0) {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (psi / z - y).norm()
        }
    };
    let mut best = (gap(x), x);
    for i in 1..=grid {
        let rho = eps * i as f64 / grid as f64;
        for j in 0..grid {
            let z = x + Complex64::from_polar(rho, TAU * j as f64 / grid as f64);
            let v = gap(z);
            if v < best.0 {
                best = (v, z);
            }
        }
        if best.0 <= target {
            return best.0;
        }
    }
    let mut step = eps / grid as f64;
    while step > eps * 1e-9 && best.0 > target {
        let mut moved = false;
        for j in 0..8 {
            let z = best.1 + Complex64::from_polar(step, TAU * j as f64 / 8.0);
            let v = gap(z);
            if v < best.0 {
                best = (v, z);
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    best.0
}

/// Whether `xy + w` has a factorization within `ε` of `(x, y)`.
fn reachable(x: Complex64, y: Complex64, w: Complex64, eps: f64, grid: usize) -> bool {
    let psi = x * y + w;
    if psi == Complex64::new(0.0, 0.0) {
        return x.norm() <= eps || y.norm() <= eps;
    }
    best_partner_gap(x, y, psi, eps, grid) <= eps * (1.0 + 1e-9)
}

/// Largest `r` (to relative precision `1e-4`) such that every sampled
/// perturbation `w` with `|w| = r` can be absorbed by factors within `ε`
/// of `(x, y)`. `grid` sets both the number of sampled phases of `w` and the
/// resolution of the inner search.
pub fn brute_scalar_delta(eps: f64, x: Complex64, y: Complex64, grid: usize) -> Result<f64> {
    if grid < 8 {
        return Err(Error::PreconditionViolated(format!("grid {grid} < 8")));
    }
    if !(eps > 0.0) {
        return Err(Error::PreconditionViolated(format!("need eps > 0, got {eps}")));
    }
    let ok = |r: f64| (0..grid).all(|j| reachable(x, y, Complex64::from_polar(r, TAU * j as f64 / grid as f64), eps, grid));
    let mut lo = 0.0;
    let mut hi = (x.norm() + eps) * (y.norm() + eps) + x.norm() * y.norm();
    while ok(hi) {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > 1e-4 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub eps: f64,
    /// The radius the pipeline certifies.
    pub delta_constructive: f64,
    /// Largest sampled radius at which every trial succeeded.
    pub delta_empirical: f64,
    pub samples: usize,
    pub seed: u64,
    /// `(r, success rate)` for each sampled radius, increasing in `r`.
    pub curve: Vec<(f64, f64)>,
}

impl ProbeReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,success_rate\n");
        for (r, s) in &self.curve {
            out.push_str(&format!("{r},{s}\n"));
        }
        out
    }
}

/// Radii probed: `delta0 · 1.5^k`.
const PROBE_STEPS: usize = 32;

/// Run the pipeline on `trials` random perturbation shapes scaled to radii
/// `delta0(ε0)·1.5^k`, stopping after the first radius where nothing
/// succeeds. Size gates are lifted; identities and the final `ε0` bounds are
/// still enforced, so a success is a genuine factorization.
pub fn probe_pipeline(f: &GridFunction, g: &GridFunction, eps0: f64, trials: usize, seed: u64) -> Result<ProbeReport> {
    if trials == 0 {
        return Err(Error::PreconditionViolated("trials must be at least 1".into()));
    }
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch);
    }
    let config = PipelineConfig::new(eps0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = (0..trials).map(|_| perturbation(&mut rng, *f.domain(), 1.0)).collect::<Result<Vec<_>>>()?;
    let mut curve = Vec::new();
    let mut delta_empirical = 0.0;
    let mut all_passed = true;
    for k in 0..PROBE_STEPS {
        let r = config.delta0 * 1.5f64.powi(k as i32);
        let wins = shapes
            .iter()
            .filter(|shape| {
                let d = crate::function::Sampled::scale(*shape, Complex64::new(r, 0.0));
                factor_with_pins(f, g, &d, &config, [None, None], Gate::Relaxed).is_ok()
            })
            .count();
        let rate = wins as f64 / trials as f64;
        curve.push((r, rate));
        if wins == trials && all_passed {
            delta_empirical = r;
        } else {
            all_passed = false;
        }
        if wins == 0 {
            break;
        }
    }
    Ok(ProbeReport { eps: eps0, delta_constructive: config.delta0, delta_empirical, samples: trials, seed, curve })
}
