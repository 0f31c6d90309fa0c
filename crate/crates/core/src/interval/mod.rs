//! Uniform openness of multiplication on a single interval.
//!
//! The pipeline splits `[a, b]` by the size of `|f|² + |g|²`. Where the pair
//! is jointly non-degenerate the perturbation is absorbed by a quadratic
//! root ([`perturb_nondeg`]); on the small set the perturbed product is
//! re-factored directly ([`factor_interval`]). The two kinds of pieces share
//! their endpoint nodes, which are assigned once.

mod boundary;
mod cover;
mod phases;
mod pipeline;
mod quadratic_step;

pub use boundary::{factor_halfboundary, factor_interval, Side};
pub use cover::{sublevel_cover, IntervalCover, NodeRange};
pub use phases::{circle_extend, nondeg_phases, perturb_nondeg, phase_offset};
pub use pipeline::{delta0, open_mult_interval, FactorizationResult, PipelineConfig};
pub use quadratic_step::{delta45, lemma45_phi};

pub(crate) use phases::nondeg_node;

pub(crate) use pipeline::{factor_with_pins, EndpointPin};

use std::f64::consts::PI;

/// Whether step-level size preconditions are enforced. The probe relaxes
/// them to measure how far past the certified radius the construction still
/// produces valid factors; identities and final bounds are always checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Gate {
    Strict,
    Relaxed,
}

/// Signed angle of the shortest arc from `from` to `to` on the circle.
/// Antipodal points go counterclockwise.
pub(crate) fn shortest_arc(from: f64, to: f64) -> f64 {
    let mut d = (to - from).rem_euclid(2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    }
    if (d.abs() - PI).abs() < 1e-12 {
        d = PI;
    }
    d
}
