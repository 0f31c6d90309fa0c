//! Openness of multiplication on finite graphs, edge by edge.
//!
//! Vertex values of `d1, d2` are fixed first and every incident edge runs
//! the interval pipeline with those values pinned, so agreement at vertices
//! holds by construction.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::function::io::FunctionDoc;
use crate::function::{Edge, EdgeEnd, GraphDomain, GraphFunction, GridFunction, Sampled};
use crate::interval::{factor_with_pins, nondeg_node, phase_offset, EndpointPin, FactorizationResult, Gate, PipelineConfig};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Where each original edge went after splitting at junctions.
#[derive(Debug, Clone, PartialEq)]
struct SplitPlan {
    domain: GraphDomain,
    /// `(original edge, lo, hi)` for every new edge, in order.
    pieces: Vec<(usize, usize, usize)>,
}

fn split_plan(g: &GraphDomain) -> Result<SplitPlan> {
    if g.is_partitioned() {
        let pieces = g.edges().iter().enumerate().map(|(k, e)| (k, 0, e.domain.len() - 1)).collect();
        return Ok(SplitPlan { domain: g.clone(), pieces });
    }
    let mut next_id = g.vertices().iter().max().map_or(0, |m| m + 1);
    let mut vertices = g.vertices().to_vec();
    let mut cuts: Vec<Vec<(usize, u64)>> = vec![Vec::new(); g.edges().len()];
    for junction in g.junctions() {
        for p in junction {
            cuts[p.edge].push((p.node, next_id));
        }
        vertices.push(next_id);
        next_id += 1;
    }
    let mut edges = Vec::new();
    let mut pieces = Vec::new();
    for (k, (e, mut c)) in g.edges().iter().zip(cuts).enumerate() {
        c.sort_unstable();
        let mut lo = (0, e.u);
        for hi in c.into_iter().chain([(e.domain.len() - 1, e.v)]) {
            edges.push(Edge { u: lo.1, v: hi.1, domain: e.domain.sub(lo.0, hi.0)? });
            pieces.push((k, lo.0, hi.0));
            lo = hi;
        }
    }
    Ok(SplitPlan { domain: GraphDomain::new(vertices, edges, vec![])?, pieces })
}

/// Turn every junction into a vertex and split the edges through it, so
/// that edge interiors become pairwise disjoint. New vertices get ids above
/// the existing ones.
pub fn refine_partition(g: &GraphDomain) -> Result<GraphDomain> {
    Ok(split_plan(g)?.domain)
}

/// The same function on [`refine_partition`] of its domain.
pub fn refine_function(f: &GraphFunction) -> Result<GraphFunction> {
    let plan = split_plan(f.domain())?;
    let edges = plan
        .pieces
        .iter()
        .map(|&(k, lo, hi)| f.edge(k).restrict(lo, hi))
        .collect::<Result<Vec<_>>>()?;
    GraphFunction::new(plan.domain, edges)
}

/// Prescribed values at the endpoints of one edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryValue {
    Pinned { d1: Complex64, d2: Complex64 },
    Free,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgePlan {
    pub edge: usize,
    pub start: BoundaryValue,
    pub end: BoundaryValue,
}

/// What was decided at one vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VertexReport {
    pub id: u64,
    /// `|f|² + |g|²` at the vertex.
    pub h: f64,
    pub degenerate: bool,
    pub d1: Complex64,
    pub d2: Complex64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta2: Option<Complex64>,
    /// Largest disagreement of the computed `d1, d2` across incident edges.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFactorization {
    pub d1: GraphFunction,
    pub d2: GraphFunction,
    pub edges: Vec<FactorizationResult>,
    pub plans: Vec<EdgePlan>,
    pub vertices: Vec<VertexReport>,
    pub residual: f64,
    pub bound1: f64,
    pub bound2: f64,
    pub config: PipelineConfig,
}

impl Serialize for GraphFactorization {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct EdgeEntry<'a> {
            edge: usize,
            result: &'a FactorizationResult,
        }
        let edges: Vec<_> = self.edges.iter().enumerate().map(|(edge, result)| EdgeEntry { edge, result }).collect();
        let mut st = s.serialize_struct("GraphFactorization", 8)?;
        st.serialize_field("d1", &FunctionDoc::from(&self.d1))?;
        st.serialize_field("d2", &FunctionDoc::from(&self.d2))?;
        st.serialize_field("residual", &self.residual.to_string())?;
        st.serialize_field("bound1", &self.bound1.to_string())?;
        st.serialize_field("bound2", &self.bound2.to_string())?;
        st.serialize_field("vertices", &self.vertices)?;
        st.serialize_field("edges", &edges)?;
        st.serialize_field("config", &self.config)?;
        st.end()
    }
}

struct VertexPin {
    report: VertexReport,
    pin: EndpointPin,
}

fn vertex_pin(id: u64, f: Complex64, g: Complex64, d: Complex64, config: &PipelineConfig) -> Result<VertexPin> {
    let h = f.norm_sqr() + g.norm_sqr();
    let (d1, d2, beta2) = if h <= config.eta1 {
        let psi = f * g + d;
        let za = psi.sqrt();
        let wa = if za == ZERO { ZERO } else { psi / za };
        (za - f, wa - g, None)
    } else {
        let beta2 = if f != ZERO && g != ZERO { phase_offset(f, g)? } else { ONE };
        let (z1, z2) = nondeg_node(f, g, d, beta2)?;
        (z2, z1, Some(beta2))
    };
    Ok(VertexPin {
        report: VertexReport { id, h, degenerate: beta2.is_none(), d1, d2, beta2, gap: 0.0 },
        pin: EndpointPin { d1, d2, beta2 },
    })
}

/// The interval pipeline on every edge of a finite graph, with one shared
/// `delta0(ε0)`. Junctions are first turned into vertices.
pub fn open_mult_graph(f: &GraphFunction, g: &GraphFunction, d: &GraphFunction, eps0: f64) -> Result<GraphFactorization> {
    if f.domain() != g.domain() || f.domain() != d.domain() {
        return Err(Error::DomainMismatch);
    }
    let config = PipelineConfig::new(eps0)?;
    let sup_d = d.sup_norm();
    if sup_d > config.delta0 * (1.0 + 1e-12) {
        return Err(Error::PerturbationTooLarge { bound: "delta0", value: sup_d, limit: config.delta0 });
    }
    let (f, g, d) = (refine_function(f)?, refine_function(g)?, refine_function(d)?);
    let domain = f.domain().clone();

    let mut pins: Vec<(u64, VertexPin)> = Vec::new();
    for &id in domain.vertices() {
        if let (Some(fv), Some(gv), Some(dv)) = (f.vertex_value(id), g.vertex_value(id), d.vertex_value(id)) {
            pins.push((id, vertex_pin(id, fv, gv, dv, &config)?));
        }
    }
    let pin_of = |id: u64| pins.iter().find(|(v, _)| *v == id).map(|(_, p)| p.pin);

    let mut results = Vec::with_capacity(domain.edges().len());
    let mut plans = Vec::with_capacity(domain.edges().len());
    for (k, e) in domain.edges().iter().enumerate() {
        let ends = [pin_of(e.u), pin_of(e.v)];
        let r = factor_with_pins(f.edge(k), g.edge(k), d.edge(k), &config, ends, Gate::Strict)?;
        let boundary = |p: Option<EndpointPin>| match p {
            Some(p) => BoundaryValue::Pinned { d1: p.d1, d2: p.d2 },
            None => BoundaryValue::Free,
        };
        plans.push(EdgePlan { edge: k, start: boundary(ends[0]), end: boundary(ends[1]) });
        results.push(r);
    }

    let mut vertices: Vec<VertexReport> = pins.into_iter().map(|(_, p)| p.report).collect();
    for v in &mut vertices {
        for (k, end) in domain.incidences(v.id) {
            let node = domain.node_index(k, end);
            let r = &results[k];
            let gap = (r.d1.values()[node] - v.d1).norm().max((r.d2.values()[node] - v.d2).norm());
            v.gap = v.gap.max(gap);
        }
        if v.gap > crate::function::VERTEX_TOLERANCE {
            return Err(Error::VertexInconsistency { vertex: v.id, gap: v.gap });
        }
    }

    let collect = |pick: fn(&FactorizationResult) -> &GridFunction| -> Result<GraphFunction> {
        GraphFunction::new(domain.clone(), results.iter().map(|r| pick(r).clone()).collect())
    };
    let d1 = collect(|r| &r.d1)?;
    let d2 = collect(|r| &r.d2)?;
    let residual = results.iter().map(|r| r.residual).fold(0.0, f64::max);
    let (bound1, bound2) = (d1.sup_norm(), d2.sup_norm());
    Ok(GraphFactorization { d1, d2, edges: results, plans, vertices, residual, bound1, bound2, config })
}

/// Whether the edge end is pinned in `plan`.
pub fn is_pinned(plan: &EdgePlan, end: EdgeEnd) -> bool {
    let b = match end {
        EdgeEnd::Start => plan.start,
        EdgeEnd::End => plan.end,
    };
    matches!(b, BoundaryValue::Pinned { .. })
}
