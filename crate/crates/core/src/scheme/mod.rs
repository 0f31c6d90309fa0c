//! Openness at jointly non-degenerate pairs in algebras with norm-controlled
//! inversion.
//!
//! Starting from `(F, G, H)` the recursion
//!
//! ```text
//! u_n     = F_n F_n* + G_n G_n*
//! F_{n+1} = F_n + H_n G_n* u_n⁻¹
//! G_{n+1} = G_n + H_n F_n* u_n⁻¹
//! H_{n+1} = -H_n² (F_n G_n)* u_n⁻²
//! ```
//!
//! keeps `F_n G_n + H_n = FG + H` and drives `H_n` to zero, so the limits
//! factor the perturbed product.

mod model;

pub use model::{AlgebraModel, SupNormModel};

use serde::Serialize;

use crate::error::{Claim, Error, Result};
use crate::function::{min_modulus_sum, ModulusSum};

/// `(1/‖a‖)·ψ(‖a‖·δ)`: the bound on `‖a⁻¹‖` available when `‖i(a⁻¹)‖∞ ≤ δ`.
pub fn norm_control_h<M: AlgebraModel>(norm_a: f64, inv_sup: f64, model: &M) -> Result<f64> {
    if !(norm_a > 0.0 && inv_sup > 0.0) {
        return Err(Error::PreconditionViolated(format!("need positive arguments, got {norm_a}, {inv_sup}")));
    }
    Ok(model.norm_control(norm_a * inv_sup) / norm_a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SchemeParams {
    pub epsilon: f64,
    pub gamma: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "T_hat")]
    pub t_hat: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub delta: f64,
    #[serde(rename = "C")]
    pub c: f64,
}

fn check_model<M: AlgebraModel>(model: &M) -> Result<()> {
    let c = model.embedding_bound();
    if !(c >= 1.0 && c.is_finite()) {
        return Err(Error::InvalidModel(format!("embedding bound C = {c} must be at least 1")));
    }
    let d = model.differential_constant();
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::InvalidModel(format!("differential constant D = {d} must be positive")));
    }
    Ok(())
}

/// Constants of the recursion for the pair `(F, G)` and target `ε ∈ (0, 1)`.
pub fn scheme_params<M: AlgebraModel>(f: &M::Element, g: &M::Element, eps: f64, model: &M) -> Result<SchemeParams> {
    check_model(model)?;
    model.check_shape(f)?;
    model.check_shape(g)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::PreconditionViolated(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    let inf = min_modulus_sum(&model.embed(f), &model.embed(g), ModulusSum::Linear)?;
    if !(inf > 0.0) {
        return Err(Error::DegeneratePair);
    }
    let c = model.embedding_bound();
    let gamma = (0.5 * inf).min(1.0);
    let k = 2.0 * model.norm(f).max(model.norm(g)).max(1.0);
    let t_hat = 2.0 * c / (gamma * gamma) * model.norm_control(4.0 * k * k / (gamma * gamma));
    let t = t_hat.max(1.0);
    let delta = eps * gamma / (c * k.powi(3) * t * t);
    Ok(SchemeParams { epsilon: eps, gamma, k, t_hat, t, delta, c })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeOptions {
    /// Stop once `‖H_n‖ ≤ tol`. `None` means `1e-12·δ`.
    pub tol: Option<f64>,
    pub max_iter: usize,
    /// Check claims (i)–(iv) at every iteration and fail on the first miss.
    pub audit: bool,
}

impl Default for SchemeOptions {
    fn default() -> Self {
        Self { tol: None, max_iter: 200, audit: true }
    }
}

/// Measurements at one iterate `(F_n, G_n, H_n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceEntry {
    pub n: usize,
    pub norm_f: f64,
    pub norm_g: f64,
    pub norm_h: f64,
    /// `min |i(F_n)| + |i(G_n)|` over embedding nodes.
    pub inf_modulus_sum: f64,
    /// `‖F_n G_n + H_n − (FG + H)‖`.
    pub identity_residual: f64,
    /// `‖FG + H‖`.
    pub reference_norm: f64,
    /// `‖F_n − F_{n−1}‖`, zero at `n = 0`.
    pub step_f: f64,
    pub step_g: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SchemeTrace {
    pub entries: Vec<TraceEntry>,
}

impl SchemeTrace {
    /// One JSON object per iteration.
    pub fn to_json_lines(&self) -> String {
        self.entries
            .iter()
            .map(|e| serde_json::to_string(e).expect("trace entries always serialize") + "\n")
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClaimCheck {
    pub claim: Claim,
    pub passed: bool,
    /// Distance to the bound; negative when violated.
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationAudit {
    pub n: usize,
    pub checks: [ClaimCheck; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub iterations: Vec<IterationAudit>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<(usize, Claim)>,
}

fn check_entry(e: &TraceEntry, p: &SchemeParams) -> IterationAudit {
    let decay = 0.5f64.powi(e.n as i32);
    let identity_limit = 1e-9 * (1.0 + e.reference_norm);
    let norm_limit = 0.5 * p.k + 1.0 - decay + 1e-12;
    let inf_limit = p.gamma + p.gamma * decay - 1e-12;
    let h_limit = decay * p.delta * (1.0 + 1e-12);
    let check = |claim, slack: f64| ClaimCheck { claim, passed: slack >= 0.0, slack };
    IterationAudit {
        n: e.n,
        checks: [
            check(Claim::Identity, identity_limit - e.identity_residual),
            check(Claim::NormBound, norm_limit - e.norm_f.max(e.norm_g)),
            check(Claim::InfBound, e.inf_modulus_sum - inf_limit),
            check(Claim::PerturbationDecay, h_limit - e.norm_h),
        ],
    }
}

/// Evaluate claims (i)–(iv) at every recorded iterate.
pub fn audit_claims(trace: &SchemeTrace, params: &SchemeParams) -> Result<AuditReport> {
    if trace.entries.is_empty() {
        return Err(Error::PreconditionViolated("empty trace".into()));
    }
    let iterations: Vec<IterationAudit> = trace.entries.iter().map(|e| check_entry(e, params)).collect();
    let first_failure = iterations
        .iter()
        .find_map(|it| it.checks.iter().find(|c| !c.passed).map(|c| (it.n, c.claim)));
    Ok(AuditReport { passed: first_failure.is_none(), iterations, first_failure })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutcome<E> {
    pub f: E,
    pub g: E,
    pub trace: SchemeTrace,
    pub params: SchemeParams,
    /// Number of recursion steps taken.
    pub iterations: usize,
    /// `‖fg − (FG + H)‖`.
    pub residual: f64,
    pub distance_f: f64,
    pub distance_g: f64,
}

/// Run the recursion from `(F, G, H)` until `‖H_n‖ ≤ tol`.
pub fn run_scheme<M: AlgebraModel>(
    f0: &M::Element,
    g0: &M::Element,
    h0: &M::Element,
    params: &SchemeParams,
    model: &M,
    options: &SchemeOptions,
) -> Result<SchemeOutcome<M::Element>> {
    check_model(model)?;
    for x in [f0, g0, h0] {
        model.check_shape(x)?;
    }
    let norm_h0 = model.norm(h0);
    if norm_h0 >= params.delta && norm_h0 > 0.0 {
        return Err(Error::PerturbationTooLarge { bound: "delta", value: norm_h0, limit: params.delta });
    }
    let tol = options.tol.unwrap_or(1e-12 * params.delta);
    let target = model.add(&model.mul(f0, g0), h0);
    let reference_norm = model.norm(&target);

    let (mut f, mut g, mut h) = (f0.clone(), g0.clone(), h0.clone());
    let (mut step_f, mut step_g) = (0.0, 0.0);
    let mut trace = SchemeTrace::default();
    let mut n = 0;
    loop {
        let lhs = model.add(&model.mul(&f, &g), &h);
        let entry = TraceEntry {
            n,
            norm_f: model.norm(&f),
            norm_g: model.norm(&g),
            norm_h: model.norm(&h),
            inf_modulus_sum: min_modulus_sum(&model.embed(&f), &model.embed(&g), ModulusSum::Linear)?,
            identity_residual: model.norm(&model.sub(&lhs, &target)),
            reference_norm,
            step_f,
            step_g,
        };
        trace.entries.push(entry);
        if options.audit {
            if let Some(c) = check_entry(&entry, params).checks.iter().find(|c| !c.passed) {
                return Err(Error::ClaimViolation { iteration: n, claim: c.claim });
            }
        }
        if entry.norm_h <= tol {
            break;
        }
        if n == options.max_iter {
            return Err(Error::NonConvergence { iterations: n });
        }
        let u = model.add(&model.mul(&f, &model.conj(&f)), &model.mul(&g, &model.conj(&g)));
        let u_inv = model.inverse(&u)?;
        let df = model.mul(&model.mul(&h, &model.conj(&g)), &u_inv);
        let dg = model.mul(&model.mul(&h, &model.conj(&f)), &u_inv);
        let h_next = model.scale(
            &model.mul(&model.mul(&model.mul(&h, &h), &model.conj(&model.mul(&f, &g))), &model.mul(&u_inv, &u_inv)),
            num_complex::Complex64::new(-1.0, 0.0),
        );
        step_f = model.norm(&df);
        step_g = model.norm(&dg);
        f = model.add(&f, &df);
        g = model.add(&g, &dg);
        h = h_next;
        n += 1;
    }

    let product = model.mul(&f, &g);
    let residual = model.norm(&model.sub(&product, &target));
    let limit = tol * (1.0 + model.norm(&f) + model.norm(&g)) + 1e-12 * (1.0 + reference_norm);
    if residual > limit {
        return Err(Error::ClaimViolation { iteration: n, claim: Claim::Identity });
    }
    let distance_f = model.norm(&model.sub(&f, f0));
    let distance_g = model.norm(&model.sub(&g, g0));
    if distance_f >= params.epsilon || distance_g >= params.epsilon {
        return Err(Error::ClaimViolation { iteration: n, claim: Claim::Distance });
    }
    Ok(SchemeOutcome { f, g, trace, params: *params, iterations: n, residual, distance_f, distance_g })
}
