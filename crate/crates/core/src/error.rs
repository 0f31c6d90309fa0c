use std::fmt;

use thiserror::Error;

/// The four per-iteration claims of the inversion scheme, plus the final
/// distance bound on the limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Claim {
    Identity,
    NormBound,
    InfBound,
    PerturbationDecay,
    Distance,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Claim::Identity => "(i) F_n G_n + H_n = FG + H",
            Claim::NormBound => "(ii) norm bound on F_n, G_n",
            Claim::InfBound => "(iii) lower bound on |F_n| + |G_n|",
            Claim::PerturbationDecay => "(iv) geometric bound on H_n",
            Claim::Distance => "distance of limits from (F, G)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("functions live on different domains")]
    DomainMismatch,
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("non-finite sample at index {0}")]
    NonFinite(usize),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("quadratic has two roots of equal modulus")]
    NotInDelta,
    #[error("phase offset needs two nonzero arguments")]
    ZeroArgument,
    #[error("value at node {index} has modulus {modulus}, expected 1")]
    NonUnimodularInput { index: usize, modulus: f64 },
    #[error("sublevel cover infeasible at node {node}: refine the grid")]
    CoverInfeasible { node: usize },
    #[error("boundary data mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("norm budget exceeded: {value} > {limit}")]
    NormBudgetExceeded { value: f64, limit: f64 },
    #[error("perturbation exceeds {bound}: {value} > {limit}")]
    PerturbationTooLarge { bound: &'static str, value: f64, limit: f64 },
    #[error("factorization identity violated: residual {residual} > {limit}")]
    IdentityViolation { residual: f64, limit: f64 },
    #[error("vertex {vertex} disagrees across incident edges by {gap}")]
    VertexInconsistency { vertex: u64, gap: f64 },
    #[error("pair is not jointly non-degenerate")]
    DegeneratePair,
    #[error("claim {claim} violated at iteration {iteration}")]
    ClaimViolation { iteration: usize, claim: Claim },
    #[error("scheme did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("invalid algebra model: {0}")]
    InvalidModel(String),
    #[error("element not invertible")]
    NotInvertible,
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// Whether the error reports bad input rather than a broken invariant.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            Error::NotInDelta
                | Error::NormBudgetExceeded { .. }
                | Error::IdentityViolation { .. }
                | Error::VertexInconsistency { .. }
                | Error::ClaimViolation { .. }
                | Error::NonConvergence { .. }
        )
    }

    /// Short machine-readable name of the violated bound or condition.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DomainMismatch => "domain_mismatch",
            Error::InvalidDomain(_) => "invalid_domain",
            Error::NonFinite(_) => "non_finite",
            Error::PreconditionViolated(_) => "precondition",
            Error::NotInDelta => "not_in_delta",
            Error::ZeroArgument => "zero_argument",
            Error::NonUnimodularInput { .. } => "non_unimodular",
            Error::CoverInfeasible { .. } => "cover_infeasible",
            Error::BoundaryMismatch(_) => "boundary_mismatch",
            Error::NormBudgetExceeded { .. } => "norm_budget_exceeded",
            Error::PerturbationTooLarge { bound, .. } => bound,
            Error::IdentityViolation { .. } => "identity_violation",
            Error::VertexInconsistency { .. } => "vertex_inconsistency",
            Error::DegeneratePair => "degenerate_pair",
            Error::ClaimViolation { .. } => "claim_violation",
            Error::NonConvergence { .. } => "non_convergence",
            Error::InvalidModel(_) => "invalid_model",
            Error::NotInvertible => "not_invertible",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
