use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::boundary::factor_interval_impl;
use super::cover::{sublevel_cover, IntervalCover};
use super::phases::perturb_nondeg_impl;
use super::quadratic_step::delta45;
use super::Gate;
use crate::error::{Error, Result};
use crate::function::io::FunctionDoc;
use crate::function::{GridFunction, Sampled};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Admissible perturbation radius for target accuracy `ε0`.
pub fn delta0(eps0: f64) -> f64 {
    let e1 = eps0 / 7.0;
    (e1 * e1).min(delta45(e1, e1))
}

/// Constants derived from the target accuracy `ε0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub epsilon0: f64,
    pub epsilon1: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub delta0: f64,
}

impl PipelineConfig {
    pub fn new(epsilon0: f64) -> Result<Self> {
        if !(epsilon0 > 0.0 && epsilon0.is_finite()) {
            return Err(Error::PreconditionViolated(format!("epsilon must be positive and finite, got {epsilon0}")));
        }
        let epsilon1 = epsilon0 / 7.0;
        Ok(Self {
            epsilon0,
            epsilon1,
            eta1: epsilon1 * epsilon1,
            eta2: 4.0 * epsilon1 * epsilon1,
            delta0: delta0(epsilon0),
        })
    }

    /// Budget for the factors built on the small set.
    pub fn cover_epsilon(&self) -> f64 {
        5.0 * self.epsilon1
    }
}

/// Output of the interval pipeline: `(f + d1)(g + d2) = fg + d` at every node.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationResult {
    pub d1: GridFunction,
    pub d2: GridFunction,
    /// Largest node residual of the factorization identity.
    pub residual: f64,
    pub bound1: f64,
    pub bound2: f64,
    pub cover: IntervalCover,
    pub config: PipelineConfig,
}

impl Serialize for FactorizationResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("FactorizationResult", 7)?;
        st.serialize_field("d1", &FunctionDoc::from(&self.d1))?;
        st.serialize_field("d2", &FunctionDoc::from(&self.d2))?;
        st.serialize_field("residual", &self.residual.to_string())?;
        st.serialize_field("bound1", &self.bound1.to_string())?;
        st.serialize_field("bound2", &self.bound2.to_string())?;
        st.serialize_field("cover", &self.cover)?;
        st.serialize_field("config", &self.config)?;
        st.end()
    }
}

/// Given `f, g` and a perturbation `d` with `sup|d| ≤ delta0(ε0)`, find
/// `d1, d2` with `(f + d1)(g + d2) = fg + d` and `‖d1‖, ‖d2‖ ≤ ε0`.
pub fn open_mult_interval(f: &GridFunction, g: &GridFunction, d: &GridFunction, eps0: f64) -> Result<FactorizationResult> {
    let config = PipelineConfig::new(eps0)?;
    factor_with_pins(f, g, d, &config, [None, None], Gate::Strict)
}

/// Values of `d1, d2` fixed at an end of the interval. On a jointly
/// non-degenerate end, `beta2` also fixes the phase used there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EndpointPin {
    pub d1: Complex64,
    pub d2: Complex64,
    pub beta2: Option<Complex64>,
}

pub(crate) fn factor_with_pins(
    f: &GridFunction,
    g: &GridFunction,
    d: &GridFunction,
    config: &PipelineConfig,
    pins: [Option<EndpointPin>; 2],
    gate: Gate,
) -> Result<FactorizationResult> {
    if f.domain() != g.domain() || f.domain() != d.domain() {
        return Err(Error::DomainMismatch);
    }
    let sup_d = d.sup_norm();
    if gate == Gate::Strict && sup_d > config.delta0 * (1.0 + 1e-12) {
        return Err(Error::PerturbationTooLarge { bound: "delta0", value: sup_d, limit: config.delta0 });
    }
    let n = f.len();
    let (fv, gv) = (f.values(), g.values());
    let psi = f.pointwise_product(g)?.add(d)?;
    let unpinned = pins.iter().flatten().all(|p| p.d1 == ZERO && p.d2 == ZERO);
    if sup_d == 0.0 && unpinned {
        let zero = GridFunction::zeros(*f.domain());
        return finish(f, g, &psi, zero.clone(), zero, IntervalCover::default(), *config);
    }
    let h = f.zip_with(g, |a, b| Complex64::new(a.norm_sqr() + b.norm_sqr(), 0.0))?;
    let cover = sublevel_cover(&h, config.eta1, config.eta2)?;

    let mut d1: Vec<Option<Complex64>> = vec![None; n];
    let mut d2: Vec<Option<Complex64>> = vec![None; n];
    for (pin, k) in pins.iter().zip([0, n - 1]) {
        if let Some(p) = pin {
            d1[k] = Some(p.d1);
            d2[k] = Some(p.d2);
        }
    }

    for piece in cover.complement(n) {
        let (lo, hi) = (piece.start, piece.end);
        let beta_pins = [
            if lo == 0 { pins[0].and_then(|p| p.beta2) } else { None },
            if hi == n - 1 { pins[1].and_then(|p| p.beta2) } else { None },
        ];
        let (z1, z2) = perturb_nondeg_impl(
            &f.restrict(lo, hi)?,
            &g.restrict(lo, hi)?,
            &d.restrict(lo, hi)?,
            config.epsilon1,
            config.epsilon1,
            beta_pins,
            gate,
        )?;
        for k in lo..=hi {
            if d1[k].is_none() {
                d1[k] = Some(z2.values()[k - lo]);
                d2[k] = Some(z1.values()[k - lo]);
            }
        }
    }

    for r in cover.intervals() {
        let (lo, hi) = (r.start, r.end);
        let end_values = |k: usize| match (d1[k], d2[k]) {
            (Some(a), Some(b)) => (fv[k] + a, gv[k] + b),
            _ => {
                let z = psi.values()[k].sqrt();
                (z, if z == ZERO { ZERO } else { psi.values()[k] / z })
            }
        };
        let (za, wa) = end_values(lo);
        let (zb, wb) = end_values(hi);
        let (z1, z2) = factor_interval_impl(&psi.restrict(lo, hi)?, config.cover_epsilon(), [za, wa, zb, wb], gate)?;
        for k in lo..=hi {
            if d1[k].is_none() {
                d1[k] = Some(z1.values()[k - lo] - fv[k]);
                d2[k] = Some(z2.values()[k - lo] - gv[k]);
            }
        }
    }

    let unwrap = |v: Vec<Option<Complex64>>| v.into_iter().map(|z| z.expect("every node is assigned")).collect();
    let d1 = GridFunction::new(*f.domain(), unwrap(d1))?;
    let d2 = GridFunction::new(*f.domain(), unwrap(d2))?;
    finish(f, g, &psi, d1, d2, cover, *config)
}

fn finish(
    f: &GridFunction,
    g: &GridFunction,
    psi: &GridFunction,
    d1: GridFunction,
    d2: GridFunction,
    cover: IntervalCover,
    config: PipelineConfig,
) -> Result<FactorizationResult> {
    let lhs = f.add(&d1)?.pointwise_product(&g.add(&d2)?)?;
    let residual = lhs.sub(psi)?.sup_norm();
    let limit = 1e-9 * (1.0 + psi.sup_norm());
    if residual > limit {
        return Err(Error::IdentityViolation { residual, limit });
    }
    let (bound1, bound2) = (d1.sup_norm(), d2.sup_norm());
    let value = bound1.max(bound2);
    if value > config.epsilon0 {
        return Err(Error::NormBudgetExceeded { value, limit: config.epsilon0 });
    }
    Ok(FactorizationResult { d1, d2, residual, bound1, bound2, cover, config })
}
