//! JSON and CSV interchange for sampled functions.
//!
//! ```json
//! {"domain": {"type": "interval", "a": 0.0, "b": 1.0, "n": 1025}, "values": [[re, im], ...]}
//! {"domain": {"type": "finite", "n": 16}, "values": [[re, im], ...]}
//! {"domain": {"type": "graph", "vertices": [0, 1], "edges": [{"u": 0, "v": 1, "n": 65}]},
//!  "values": [[[re, im], ...], ...]}
//! ```

use std::io::Read;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Edge, EdgePoint, FiniteSpaceFunction, GraphDomain, GraphFunction, GridFunction, IntervalDomain};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub u: u64,
    pub v: u64,
    pub n: usize,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "unit")]
    pub b: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgePointDoc {
    pub edge: usize,
    pub node: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum DomainDoc {
    Interval {
        a: f64,
        b: f64,
        n: usize,
    },
    Finite {
        n: usize,
    },
    Graph {
        vertices: Vec<u64>,
        edges: Vec<EdgeDoc>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        junctions: Vec<Vec<EdgePointDoc>>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ValuesDoc {
    Flat(Vec<Complex64>),
    PerEdge(Vec<Vec<Complex64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionDoc {
    pub domain: DomainDoc,
    pub values: ValuesDoc,
}

/// A decoded function of any supported domain type.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyFunction {
    Interval(GridFunction),
    Finite(FiniteSpaceFunction),
    Graph(GraphFunction),
}

impl AnyFunction {
    pub fn kind(&self) -> &'static str {
        match self {
            AnyFunction::Interval(_) => "interval",
            AnyFunction::Finite(_) => "finite",
            AnyFunction::Graph(_) => "graph",
        }
    }

    /// Sample values as a finite-space function (graph edges concatenated).
    pub fn to_finite(&self) -> Result<FiniteSpaceFunction> {
        match self {
            AnyFunction::Interval(f) => Ok(f.into()),
            AnyFunction::Finite(f) => Ok(f.clone()),
            AnyFunction::Graph(f) => {
                FiniteSpaceFunction::new(f.edge_functions().iter().flat_map(|e| e.values().to_vec()).collect())
            }
        }
    }
}

pub fn graph_domain_from_doc(vertices: Vec<u64>, edges: &[EdgeDoc], junctions: &[Vec<EdgePointDoc>]) -> Result<GraphDomain> {
    let edges = edges
        .iter()
        .map(|e| Ok(Edge { u: e.u, v: e.v, domain: IntervalDomain::new(e.a, e.b, e.n)? }))
        .collect::<Result<Vec<_>>>()?;
    let junctions = junctions
        .iter()
        .map(|j| j.iter().map(|p| EdgePoint { edge: p.edge, node: p.node }).collect())
        .collect();
    GraphDomain::new(vertices, edges, junctions)
}

pub fn graph_domain_to_doc(g: &GraphDomain) -> DomainDoc {
    DomainDoc::Graph {
        vertices: g.vertices().to_vec(),
        edges: g
            .edges()
            .iter()
            .map(|e| EdgeDoc { u: e.u, v: e.v, n: e.domain.len(), a: e.domain.a(), b: e.domain.b() })
            .collect(),
        junctions: g
            .junctions()
            .iter()
            .map(|j| j.iter().map(|p| EdgePointDoc { edge: p.edge, node: p.node }).collect())
            .collect(),
    }
}

impl TryFrom<FunctionDoc> for AnyFunction {
    type Error = Error;

    fn try_from(doc: FunctionDoc) -> Result<Self> {
        match (doc.domain, doc.values) {
            (DomainDoc::Interval { a, b, n }, ValuesDoc::Flat(v)) => {
                Ok(AnyFunction::Interval(GridFunction::new(IntervalDomain::new(a, b, n)?, v)?))
            }
            (DomainDoc::Finite { n }, ValuesDoc::Flat(v)) => {
                if v.len() != n {
                    return Err(Error::InvalidDomain(format!("{} values for {n} points", v.len())));
                }
                Ok(AnyFunction::Finite(FiniteSpaceFunction::new(v)?))
            }
            (DomainDoc::Graph { vertices, edges, junctions }, ValuesDoc::PerEdge(v)) => {
                let domain = graph_domain_from_doc(vertices, &edges, &junctions)?;
                let fns = domain
                    .edges()
                    .iter()
                    .zip(v)
                    .map(|(e, vals)| GridFunction::new(e.domain, vals))
                    .collect::<Result<Vec<_>>>()?;
                Ok(AnyFunction::Graph(GraphFunction::new(domain, fns)?))
            }
            // An empty value list parses as Flat; accept it for an edgeless graph.
            (DomainDoc::Graph { vertices, edges, junctions }, ValuesDoc::Flat(v)) if v.is_empty() && edges.is_empty() => {
                let domain = graph_domain_from_doc(vertices, &edges, &junctions)?;
                Ok(AnyFunction::Graph(GraphFunction::new(domain, vec![])?))
            }
            _ => Err(Error::Parse("value layout does not match domain type".into())),
        }
    }
}

impl From<&GridFunction> for FunctionDoc {
    fn from(f: &GridFunction) -> Self {
        let d = f.domain();
        FunctionDoc {
            domain: DomainDoc::Interval { a: d.a(), b: d.b(), n: d.len() },
            values: ValuesDoc::Flat(f.values().to_vec()),
        }
    }
}

impl From<&FiniteSpaceFunction> for FunctionDoc {
    fn from(f: &FiniteSpaceFunction) -> Self {
        FunctionDoc { domain: DomainDoc::Finite { n: f.len() }, values: ValuesDoc::Flat(f.values().to_vec()) }
    }
}

impl From<&GraphFunction> for FunctionDoc {
    fn from(f: &GraphFunction) -> Self {
        FunctionDoc {
            domain: graph_domain_to_doc(f.domain()),
            values: ValuesDoc::PerEdge(f.edge_functions().iter().map(|e| e.values().to_vec()).collect()),
        }
    }
}

impl From<&AnyFunction> for FunctionDoc {
    fn from(f: &AnyFunction) -> Self {
        match f {
            AnyFunction::Interval(g) => g.into(),
            AnyFunction::Finite(g) => g.into(),
            AnyFunction::Graph(g) => g.into(),
        }
    }
}

pub fn parse_function(json: &str) -> Result<AnyFunction> {
    let doc: FunctionDoc = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
    doc.try_into()
}

pub fn to_json(f: &AnyFunction) -> String {
    serde_json::to_string(&FunctionDoc::from(f)).expect("function documents always serialize")
}

#[derive(Deserialize)]
struct CsvRow {
    t: f64,
    re: f64,
    im: f64,
}

/// Read a grid function from CSV with columns `t, re, im`. The `t` column
/// must be an increasing uniform grid.
pub fn grid_from_csv<R: Read>(reader: R) -> Result<GridFunction> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut ts = Vec::new();
    let mut vals = Vec::new();
    for row in rdr.deserialize() {
        let row: CsvRow = row.map_err(|e| Error::Parse(e.to_string()))?;
        ts.push(row.t);
        vals.push(Complex64::new(row.re, row.im));
    }
    if ts.len() < 2 {
        return Err(Error::Parse("need at least two rows".into()));
    }
    let domain = IntervalDomain::new(ts[0], ts[ts.len() - 1], ts.len())?;
    let h = domain.step();
    for (k, &t) in ts.iter().enumerate() {
        if (t - domain.node(k)).abs() > 1e-9 * h.max(t.abs()) {
            return Err(Error::Parse(format!("row {k}: t = {t} is off the uniform grid")));
        }
    }
    GridFunction::new(domain, vals)
}

pub fn grid_to_csv(f: &GridFunction) -> String {
    let mut out = String::from("t,re,im\n");
    for (t, z) in f.domain().nodes().zip(f.values()) {
        out.push_str(&format!("{t},{},{}\n", z.re, z.im));
    }
    out
}
