//! Random test functions on grids and graphs.
//!
//! Families are smooth with bounded slopes, so 1025-node interval grids and
//! 257-node graph edges resolve the sublevel sets the pipeline needs for
//! every `ε0 ≥ 0.07`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;
use crate::function::{Edge, GraphDomain, GraphFunction, GridFunction, IntervalDomain, Sampled};

fn disk<R: Rng>(rng: &mut R, radius: f64) -> Complex64 {
    Complex64::from_polar(radius * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU))
}

fn unit_phase<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::from_polar(1.0, rng.gen_range(0.0..TAU))
}

/// `Σ_{|k|≤2} c_k e^{2πikt}` with `|c_k| ≤ 0.6/(1+|k|)`, in the variable
/// `(t − a)/(b − a)`.
pub fn trig_function<R: Rng>(rng: &mut R, domain: IntervalDomain) -> Result<GridFunction> {
    let coeffs: Vec<(f64, Complex64)> = (-2i32..=2).map(|k| (f64::from(k), disk(rng, 0.6 / (1.0 + f64::from(k.abs()))))).collect();
    let (a, len) = (domain.a(), domain.b() - domain.a());
    GridFunction::from_fn(domain, |t| {
        let s = (t - a) / len;
        coeffs.iter().map(|&(k, c)| c * Complex64::from_polar(1.0, TAU * k * s)).sum()
    })
}

/// A cubic in `(t − mid)/(b − a)` with coefficients in the unit disk.
pub fn poly_function<R: Rng>(rng: &mut R, domain: IntervalDomain) -> Result<GridFunction> {
    let coeffs: Vec<Complex64> = (0..4).map(|_| disk(rng, 1.0)).collect();
    let (mid, len) = (0.5 * (domain.a() + domain.b()), domain.b() - domain.a());
    GridFunction::from_fn(domain, |t| {
        let s = (t - mid) / len;
        coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * s + c)
    })
}

/// A pair vanishing together at a random interior point, with slopes in
/// `[0.5, 2]` and slowly turning phases.
pub fn joint_zero_pair<R: Rng>(rng: &mut R, domain: IntervalDomain) -> Result<(GridFunction, GridFunction)> {
    let (a, len) = (domain.a(), domain.b() - domain.a());
    let t0 = a + len * rng.gen_range(0.2..0.8);
    let mut factor = || {
        let slope = rng.gen_range(0.5..2.0);
        let phase = unit_phase(rng);
        let turn = rng.gen_range(-1.0..1.0);
        move |t: f64| phase * Complex64::from_polar(slope * (t - t0) / len, turn * (t - a) / len)
    };
    let (p, q) = (factor(), factor());
    Ok((GridFunction::from_fn(domain, p)?, GridFunction::from_fn(domain, q)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairFamily {
    Trig,
    Polynomial,
    JointZero,
}

impl PairFamily {
    pub const ALL: [PairFamily; 3] = [PairFamily::Trig, PairFamily::Polynomial, PairFamily::JointZero];
}

pub fn random_pair<R: Rng>(rng: &mut R, domain: IntervalDomain, family: PairFamily) -> Result<(GridFunction, GridFunction)> {
    match family {
        PairFamily::Trig => Ok((trig_function(rng, domain)?, trig_function(rng, domain)?)),
        PairFamily::Polynomial => Ok((poly_function(rng, domain)?, poly_function(rng, domain)?)),
        PairFamily::JointZero => joint_zero_pair(rng, domain),
    }
}

/// A smooth random function with sup norm exactly `r` (zero if `r = 0`).
pub fn perturbation<R: Rng>(rng: &mut R, domain: IntervalDomain, r: f64) -> Result<GridFunction> {
    let base = trig_function(rng, domain)?;
    let m = base.sup_norm();
    if m == 0.0 {
        return Ok(GridFunction::constant(domain, Complex64::new(r, 0.0)));
    }
    Ok(base.scale(Complex64::new(r / m, 0.0)))
}

/// Node values drawn independently from the disk of radius `r`, then scaled
/// so the sup norm is exactly `r`.
pub fn rough_perturbation<R: Rng>(rng: &mut R, domain: IntervalDomain, r: f64) -> Result<GridFunction> {
    let v: Vec<Complex64> = (0..domain.len()).map(|_| disk(rng, 1.0)).collect();
    let f = GridFunction::new(domain, v)?;
    let m = f.sup_norm();
    Ok(if m == 0.0 { f } else { f.scale(Complex64::new(r / m, 0.0)) })
}

fn unit_edges(pairs: &[(u64, u64)], n: usize) -> Result<Vec<Edge>> {
    pairs.iter().map(|&(u, v)| Ok(Edge { u, v, domain: IntervalDomain::new(0.0, 1.0, n)? })).collect()
}

/// Three edges from a common centre `0`.
pub fn star3(n: usize) -> Result<GraphDomain> {
    GraphDomain::new(vec![0, 1, 2, 3], unit_edges(&[(0, 1), (0, 2), (0, 3)], n)?, vec![])
}

/// Two vertices joined by three parallel edges.
pub fn theta(n: usize) -> Result<GraphDomain> {
    GraphDomain::new(vec![0, 1], unit_edges(&[(0, 1), (0, 1), (0, 1)], n)?, vec![])
}

/// The complete graph on four vertices.
pub fn k4(n: usize) -> Result<GraphDomain> {
    GraphDomain::new(vec![0, 1, 2, 3], unit_edges(&[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], n)?, vec![])
}

/// Per-edge recipe: linear between the vertex values plus bumps that vanish
/// at both ends; optionally pulled to zero at `zero_at`.
struct EdgeRecipe {
    bumps: [Complex64; 2],
    zero_at: Option<f64>,
}

fn edge_value(start: Complex64, end: Complex64, recipe: &EdgeRecipe, s: f64) -> Complex64 {
    let bump = |s: f64| s * (1.0 - s) * (recipe.bumps[0] + recipe.bumps[1] * (PI * s).cos());
    let raw = |s: f64| start * (1.0 - s) + end * s + bump(s);
    match recipe.zero_at {
        Some(s0) => raw(s) - raw(s0) * (s * (1.0 - s)) / (s0 * (1.0 - s0)),
        None => raw(s),
    }
}

/// Options for [`random_graph_triple`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphSampling {
    /// Force a joint zero of `f` and `g` inside one random edge.
    pub interior_joint_zero: bool,
    /// Force `f = g = 0` at one random vertex.
    pub degenerate_vertex: bool,
}

/// Random `f, g` and a perturbation `d` with sup norm exactly `r` on a
/// graph whose edges are parametrised over `[0, 1]`.
pub fn random_graph_triple<R: Rng>(
    rng: &mut R,
    domain: &GraphDomain,
    r: f64,
    opts: GraphSampling,
) -> Result<(GraphFunction, GraphFunction, GraphFunction)> {
    let nv = domain.vertices().len();
    let ne = domain.edges().len();
    let index = |id: u64| domain.vertices().iter().position(|&v| v == id).expect("edge endpoints are vertices");
    let mut vertex_pair: Vec<(Complex64, Complex64, Complex64)> =
        (0..nv).map(|_| (disk(rng, 1.0), disk(rng, 1.0), disk(rng, 1.0))).collect();
    if opts.degenerate_vertex && nv > 0 {
        let k = rng.gen_range(0..nv);
        vertex_pair[k].0 = Complex64::new(0.0, 0.0);
        vertex_pair[k].1 = Complex64::new(0.0, 0.0);
    }
    let zero_edge = (opts.interior_joint_zero && ne > 0).then(|| (rng.gen_range(0..ne), rng.gen_range(0.3..0.7)));
    let mut recipes = Vec::with_capacity(ne);
    for k in 0..ne {
        let zero_at = zero_edge.and_then(|(e, s0)| (e == k).then_some(s0));
        let make = |rng: &mut R| EdgeRecipe { bumps: [disk(rng, 1.0), disk(rng, 0.5)], zero_at };
        recipes.push([make(rng), make(rng), EdgeRecipe { bumps: [disk(rng, 1.0), disk(rng, 0.5)], zero_at: None }]);
    }
    let build = |which: usize| {
        GraphFunction::from_fn(domain.clone(), |k, s| {
            let e = &domain.edges()[k];
            let (pu, pv) = (vertex_pair[index(e.u)], vertex_pair[index(e.v)]);
            let pick = |p: (Complex64, Complex64, Complex64)| [p.0, p.1, p.2][which];
            edge_value(pick(pu), pick(pv), &recipes[k][which], s)
        })
    };
    let (f, g, d) = (build(0)?, build(1)?, build(2)?);
    let m = d.sup_norm();
    let d = if m == 0.0 { d } else { d.scale(Complex64::new(r / m, 0.0)) };
    Ok((f, g, d))
}
