use std::collections::{HashMap, HashSet};

use num_complex::Complex64;

use super::{GridFunction, IntervalDomain, Sampled};
use crate::error::{Error, Result};

/// Agreement tolerance for values meeting at a vertex or junction.
pub const VERTEX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: u64,
    pub v: u64,
    pub domain: IntervalDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeEnd {
    Start,
    End,
}

/// An interior node of an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgePoint {
    pub edge: usize,
    pub node: usize,
}

/// A finite 1-complex. Each edge carries its own grid; its first node sits at
/// vertex `u` and its last node at vertex `v`. A junction identifies interior
/// nodes of one or more edges with a single point that is not (yet) a vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphDomain {
    vertices: Vec<u64>,
    edges: Vec<Edge>,
    junctions: Vec<Vec<EdgePoint>>,
}

impl GraphDomain {
    pub fn new(vertices: Vec<u64>, edges: Vec<Edge>, junctions: Vec<Vec<EdgePoint>>) -> Result<Self> {
        let ids: HashSet<u64> = vertices.iter().copied().collect();
        if ids.len() != vertices.len() {
            return Err(Error::InvalidDomain("duplicate vertex id".into()));
        }
        for (k, e) in edges.iter().enumerate() {
            if !ids.contains(&e.u) || !ids.contains(&e.v) {
                return Err(Error::InvalidDomain(format!("edge {k} has an endpoint outside the vertex set")));
            }
        }
        let mut seen = HashSet::new();
        for j in &junctions {
            if j.is_empty() {
                return Err(Error::InvalidDomain("empty junction".into()));
            }
            for p in j {
                let Some(e) = edges.get(p.edge) else {
                    return Err(Error::InvalidDomain(format!("junction refers to missing edge {}", p.edge)));
                };
                if p.node == 0 || p.node + 1 >= e.domain.len() {
                    return Err(Error::InvalidDomain(format!(
                        "junction node {} is not interior to edge {}",
                        p.node, p.edge
                    )));
                }
                if !seen.insert(*p) {
                    return Err(Error::InvalidDomain("edge point used by two junctions".into()));
                }
            }
        }
        Ok(Self { vertices, edges, junctions })
    }

    pub fn vertices(&self) -> &[u64] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn junctions(&self) -> &[Vec<EdgePoint>] {
        &self.junctions
    }

    /// Edge interiors are pairwise disjoint once no junctions remain.
    pub fn is_partitioned(&self) -> bool {
        self.junctions.is_empty()
    }

    /// All `(edge, end)` pairs attached to vertex `id`, in edge order.
    pub fn incidences(&self, id: u64) -> Vec<(usize, EdgeEnd)> {
        let mut out = Vec::new();
        for (k, e) in self.edges.iter().enumerate() {
            if e.u == id {
                out.push((k, EdgeEnd::Start));
            }
            if e.v == id {
                out.push((k, EdgeEnd::End));
            }
        }
        out
    }

    pub fn node_index(&self, edge: usize, end: EdgeEnd) -> usize {
        match end {
            EdgeEnd::Start => 0,
            EdgeEnd::End => self.edges[edge].domain.len() - 1,
        }
    }

    /// Groups of `(edge, node)` positions that denote the same point.
    fn identified_points(&self) -> Vec<Vec<(usize, usize)>> {
        let mut groups: Vec<Vec<(usize, usize)>> = self
            .vertices
            .iter()
            .map(|&v| self.incidences(v).into_iter().map(|(e, end)| (e, self.node_index(e, end))).collect())
            .collect();
        groups.extend(self.junctions.iter().map(|j| j.iter().map(|p| (p.edge, p.node)).collect()));
        groups
    }
}

/// Per-edge samples of a continuous function on a [`GraphDomain`].
#[derive(Debug, Clone, PartialEq)]
pub struct GraphFunction {
    domain: GraphDomain,
    edges: Vec<GridFunction>,
}

impl GraphFunction {
    /// Validates agreement at every vertex and junction, then snaps each
    /// identified point to the value carried by its first incident edge.
    pub fn new(domain: GraphDomain, mut edges: Vec<GridFunction>) -> Result<Self> {
        if edges.len() != domain.edges.len() {
            return Err(Error::InvalidDomain(format!(
                "{} edge functions for {} edges",
                edges.len(),
                domain.edges.len()
            )));
        }
        for (k, (f, e)) in edges.iter().zip(&domain.edges).enumerate() {
            if *f.domain() != e.domain {
                return Err(Error::InvalidDomain(format!("edge {k} samples do not match its grid")));
            }
        }
        let groups = domain.identified_points();
        let mut snapped: HashMap<usize, Vec<(usize, Complex64)>> = HashMap::new();
        for (gi, group) in groups.iter().enumerate() {
            let Some(&(e0, k0)) = group.first() else { continue };
            let reference = edges[e0].values()[k0];
            for &(e, k) in group {
                let gap = (edges[e].values()[k] - reference).norm();
                if gap > VERTEX_TOLERANCE * (1.0 + reference.norm()) {
                    let vertex = domain.vertices.get(gi).copied().unwrap_or(u64::MAX);
                    return Err(Error::VertexInconsistency { vertex, gap });
                }
                snapped.entry(e).or_default().push((k, reference));
            }
        }
        for (e, fixes) in snapped {
            let mut values = edges[e].values().to_vec();
            for (k, z) in fixes {
                values[k] = z;
            }
            edges[e] = GridFunction::new(domain.edges[e].domain, values)?;
        }
        Ok(Self { domain, edges })
    }

    pub fn from_fn(domain: GraphDomain, f: impl Fn(usize, f64) -> Complex64) -> Result<Self> {
        let edges = domain
            .edges
            .iter()
            .enumerate()
            .map(|(k, e)| GridFunction::from_fn(e.domain, |t| f(k, t)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(domain, edges)
    }

    pub fn domain(&self) -> &GraphDomain {
        &self.domain
    }

    pub fn edge(&self, k: usize) -> &GridFunction {
        &self.edges[k]
    }

    pub fn edge_functions(&self) -> &[GridFunction] {
        &self.edges
    }

    /// Value at vertex `id`, or `None` for an isolated or unknown vertex.
    pub fn vertex_value(&self, id: u64) -> Option<Complex64> {
        let (e, end) = *self.domain.incidences(id).first()?;
        Some(self.edges[e].values()[self.domain.node_index(e, end)])
    }

    /// Largest disagreement between incident edge values at any vertex.
    pub fn max_vertex_gap(&self) -> f64 {
        let mut worst = 0.0f64;
        for group in self.domain.identified_points() {
            if let Some(&(e0, k0)) = group.first() {
                let r = self.edges[e0].values()[k0];
                for (e, k) in group {
                    worst = worst.max((self.edges[e].values()[k] - r).norm());
                }
            }
        }
        worst
    }
}

impl Sampled for GraphFunction {
    fn sample_iter(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.edges.iter().flat_map(|f| f.values().iter().copied())
    }

    fn zip_with(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let edges = self
            .edges
            .iter()
            .zip(&other.edges)
            .map(|(a, b)| a.zip_with(b, &op))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.domain.clone(), edges)
    }

    fn map(&self, op: impl Fn(Complex64) -> Complex64) -> Self {
        let edges = self.edges.iter().map(|f| f.map(&op)).collect();
        Self::new(self.domain.clone(), edges).expect("pointwise map preserves vertex agreement")
    }
}
