//! The `openmult` command line.
//!
//! Exit status is 0 on success, 2 when the input breaks a precondition
//! (including unreadable or malformed input), and 1 when an internal
//! invariant fails. Failures print one JSON diagnostic line on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::function::io::{grid_from_csv, AnyFunction, FunctionDoc};
use crate::function::{Edge, FiniteSpaceFunction, GraphDomain, GraphFunction, GridFunction, Sampled};
use crate::graph::open_mult_graph;
use crate::interval::{open_mult_interval, PipelineConfig};
use crate::pointwise::{nondeg_approx, open_mult_finite, DiagonalAlgebraElement, DiagonalModel};
use crate::probe::probe_pipeline;
use crate::scheme::{audit_claims, run_scheme, scheme_params, AlgebraModel, SchemeOptions, SchemeOutcome, SupNormModel};

/// Subcommands that would claim results this tool cannot check at finite
/// scale: non-uniform openness of convolution algebras on groups, and
/// compacta beyond finite graphs.
pub const REFUSED_COMMANDS: &[&str] = &[
    "factor-convolution",
    "convolution",
    "factor-l1",
    "factor-group-algebra",
    "factor-compact",
    "factor-inverse-limit",
    "inverse-limit",
    "factor-non-metrizable",
];

#[derive(Debug, Parser)]
#[command(name = "openmult", version, about = "Factor perturbed products of sampled functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    FactorInterval,
    FactorGraph,
    FactorFinite,
    Scheme,
    Probe,
    NondegApprox,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::FactorInterval => "factor-interval",
            CommandKind::FactorGraph => "factor-graph",
            CommandKind::FactorFinite => "factor-finite",
            CommandKind::Scheme => "scheme",
            CommandKind::Probe => "probe",
            CommandKind::NondegApprox => "nondeg-approx",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Factor fg + d on an interval grid.
    FactorInterval(RunArgs),
    /// Factor fg + d on a finite graph.
    FactorGraph(RunArgs),
    /// Factor ab + d point by point on a finite space.
    FactorFinite(RunArgs),
    /// Run the inversion scheme (sup-norm or diagonal algebra).
    Scheme(RunArgs),
    /// Estimate the empirical perturbation radius of the interval pipeline.
    Probe(RunArgs),
    /// Replace (f, g) by a jointly non-degenerate pair with the same product.
    NondegApprox(RunArgs),
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Bundle JSON with keys f, g, d, or one function per flag (JSON or CSV), in the order f, g, d.
    #[arg(long = "input", required = true)]
    inputs: Vec<PathBuf>,
    /// Target accuracy, in (0, 1).
    #[arg(long)]
    epsilon: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Resample interval and graph inputs to this many nodes per interval.
    #[arg(long)]
    grid: Option<usize>,
    /// Report path; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Check the scheme's claims at every iteration.
    #[arg(long)]
    audit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub inputs: Vec<PathBuf>,
    pub epsilon: f64,
    pub seed: u64,
    pub grid: Option<usize>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub audit: bool,
}

impl Command {
    fn into_config(self) -> RunConfig {
        let (command, a) = match self {
            Command::FactorInterval(a) => (CommandKind::FactorInterval, a),
            Command::FactorGraph(a) => (CommandKind::FactorGraph, a),
            Command::FactorFinite(a) => (CommandKind::FactorFinite, a),
            Command::Scheme(a) => (CommandKind::Scheme, a),
            Command::Probe(a) => (CommandKind::Probe, a),
            Command::NondegApprox(a) => (CommandKind::NondegApprox, a),
        };
        RunConfig {
            command,
            inputs: a.inputs,
            epsilon: a.epsilon,
            seed: a.seed,
            grid: a.grid,
            output: a.output,
            format: a.format,
            audit: a.audit,
        }
    }
}

/// A failed run: exit status and the diagnostic object.
#[derive(Debug)]
struct Failure {
    status: i32,
    diagnostic: Value,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let mut diagnostic = json!({ "error": e.code(), "message": e.to_string() });
        match &e {
            Error::PerturbationTooLarge { bound, value, limit } => {
                diagnostic["error"] = json!("perturbation_too_large");
                diagnostic["bound"] = json!(bound);
                diagnostic["value"] = json!(value.to_string());
                diagnostic["limit"] = json!(limit.to_string());
            }
            Error::ClaimViolation { iteration, claim } => {
                diagnostic["iteration"] = json!(iteration);
                diagnostic["claim"] = json!(claim);
            }
            _ => {}
        }
        Failure { status: if e.is_precondition() { 2 } else { 1 }, diagnostic }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { status: 2, diagnostic: json!({ "error": "usage", "message": message.into() }) }
}

fn input_error(path: &Path, message: impl std::fmt::Display) -> Failure {
    Failure {
        status: 2,
        diagnostic: json!({ "error": "input", "path": path.display().to_string(), "message": message.to_string() }),
    }
}

/// Run the command line and return the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    if let Some(cmd) = args.get(1).and_then(|a| a.to_str()) {
        if REFUSED_COMMANDS.contains(&cmd) {
            let d = json!({
                "error": "out_of_scope",
                "command": cmd,
                "message": "this command would assert openness results for convolution algebras or non-graph \
                            compacta, which cannot be verified on finite samples; supported commands are \
                            factor-interval, factor-graph, factor-finite, scheme, probe, nondeg-approx",
            });
            let _ = writeln!(stderr, "{d}");
            return 2;
        }
    }
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = writeln!(stderr, "{}", usage(e.to_string().trim_end()).diagnostic);
            return 2;
        }
    };
    let config = cli.command.into_config();
    match execute(&config) {
        Ok(report) => {
            let written = match &config.output {
                Some(path) => std::fs::write(path, &report).map_err(|e| input_error(path, e)),
                None => stdout.write_all(report.as_bytes()).map_err(|e| usage(e.to_string())),
            };
            match written {
                Ok(()) => 0,
                Err(f) => {
                    let _ = writeln!(stderr, "{}", f.diagnostic);
                    f.status
                }
            }
        }
        Err(f) => {
            let _ = writeln!(stderr, "{}", f.diagnostic);
            f.status
        }
    }
}

#[derive(Debug, Default, Deserialize)]
struct Bundle {
    #[serde(alias = "F")]
    f: Option<Value>,
    #[serde(alias = "G")]
    g: Option<Value>,
    #[serde(alias = "H")]
    d: Option<Value>,
    trials: Option<usize>,
    model: Option<ModelDoc>,
}

#[derive(Debug, Deserialize)]
struct ModelDoc {
    weights: Vec<f64>,
    #[serde(default = "yes")]
    unital: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
struct DiagonalDoc {
    scalar: Complex64,
    coords: Vec<Complex64>,
}

/// Raw inputs in slot order `f, g, d`.
struct Inputs {
    slots: [Option<Value>; 3],
    csv: [Option<GridFunction>; 3],
    trials: Option<usize>,
    model: Option<ModelDoc>,
}

fn load_inputs(paths: &[PathBuf]) -> Result<Inputs, Failure> {
    let mut inputs = Inputs { slots: [None, None, None], csv: [None, None, None], trials: None, model: None };
    let mut next = 0;
    for path in paths {
        let is_csv = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"));
        if is_csv {
            if next == 3 {
                return Err(input_error(path, "more than three functions supplied"));
            }
            let file = std::fs::File::open(path).map_err(|e| input_error(path, e))?;
            inputs.csv[next] = Some(grid_from_csv(file).map_err(|e| input_error(path, e))?);
            next += 1;
            continue;
        }
        let text = std::fs::read_to_string(path).map_err(|e| input_error(path, e))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| input_error(path, e))?;
        if value.get("domain").is_some() {
            if next == 3 {
                return Err(input_error(path, "more than three functions supplied"));
            }
            inputs.slots[next] = Some(value);
            next += 1;
            continue;
        }
        let bundle: Bundle = serde_json::from_value(value).map_err(|e| input_error(path, e))?;
        for (k, v) in [bundle.f, bundle.g, bundle.d].into_iter().enumerate() {
            if v.is_some() {
                inputs.slots[k] = v;
                next = next.max(k + 1);
            }
        }
        inputs.trials = bundle.trials.or(inputs.trials);
        inputs.model = bundle.model.or(inputs.model.take());
    }
    Ok(inputs)
}

const SLOT_NAMES: [&str; 3] = ["f", "g", "d"];

impl Inputs {
    fn function(&mut self, slot: usize, grid: Option<usize>) -> Result<AnyFunction, Failure> {
        let f = if let Some(g) = self.csv[slot].take() {
            AnyFunction::Interval(g)
        } else {
            let value = self.slots[slot]
                .take()
                .ok_or_else(|| usage(format!("missing input function '{}'", SLOT_NAMES[slot])))?;
            let doc: FunctionDoc = serde_json::from_value(value).map_err(|e| Failure::from(Error::Parse(e.to_string())))?;
            AnyFunction::try_from(doc)?
        };
        match grid {
            Some(n) => Ok(resample(f, n)?),
            None => Ok(f),
        }
    }

    fn diagonal(&mut self, slot: usize, model: &DiagonalModel) -> Result<DiagonalAlgebraElement, Failure> {
        let value = self.slots[slot]
            .take()
            .ok_or_else(|| usage(format!("missing algebra element '{}'", SLOT_NAMES[slot])))?;
        let doc: DiagonalDoc = serde_json::from_value(value).map_err(|e| Failure::from(Error::Parse(e.to_string())))?;
        Ok(model.element(doc.scalar, doc.coords)?)
    }
}

fn resample(f: AnyFunction, n: usize) -> crate::error::Result<AnyFunction> {
    Ok(match f {
        AnyFunction::Interval(g) => AnyFunction::Interval(g.resample(n)?),
        AnyFunction::Graph(g) => {
            let dom = g.domain();
            let edges = dom
                .edges()
                .iter()
                .map(|e| Ok(Edge { u: e.u, v: e.v, domain: crate::function::IntervalDomain::new(e.domain.a(), e.domain.b(), n)? }))
                .collect::<crate::error::Result<Vec<_>>>()?;
            let domain = GraphDomain::new(dom.vertices().to_vec(), edges, vec![])?;
            if !dom.is_partitioned() {
                return Err(Error::InvalidDomain("cannot resample a graph with junctions".into()));
            }
            let values = g.edge_functions().iter().map(|e| e.resample(n)).collect::<crate::error::Result<Vec<_>>>()?;
            AnyFunction::Graph(GraphFunction::new(domain, values)?)
        }
        other => other,
    })
}

fn interval(f: AnyFunction, slot: usize) -> Result<GridFunction, Failure> {
    match f {
        AnyFunction::Interval(g) => Ok(g),
        other => Err(usage(format!("'{}' must be an interval function, got {}", SLOT_NAMES[slot], other.kind()))),
    }
}

fn graph(f: AnyFunction, slot: usize) -> Result<GraphFunction, Failure> {
    match f {
        AnyFunction::Graph(g) => Ok(g),
        other => Err(usage(format!("'{}' must be a graph function, got {}", SLOT_NAMES[slot], other.kind()))),
    }
}

fn timestamp() -> String {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0).to_string()
}

fn pipeline_constants(c: &PipelineConfig) -> Value {
    json!({ "epsilon0": c.epsilon0, "epsilon1": c.epsilon1, "eta1": c.eta1, "eta2": c.eta2, "delta0": c.delta0 })
}

fn envelope(config: &RunConfig, constants: Value, result: Value) -> String {
    let report = json!({
        "command": config.command.name(),
        "timestamp": timestamp(),
        "seed": config.seed,
        "constants": constants,
        "result": result,
    });
    serde_json::to_string_pretty(&report).expect("reports always serialize") + "\n"
}

fn values_csv(header: &str, rows: impl Iterator<Item = (String, Vec<Complex64>)>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for (key, zs) in rows {
        out.push_str(&key);
        for z in zs {
            out.push_str(&format!(",{},{}", z.re, z.im));
        }
        out.push('\n');
    }
    out
}

fn execute(config: &RunConfig) -> Result<String, Failure> {
    if !(config.epsilon > 0.0 && config.epsilon < 1.0) {
        return Err(Failure::from(Error::PreconditionViolated(format!(
            "epsilon must lie in (0, 1), got {}",
            config.epsilon
        ))));
    }
    if config.grid.is_some_and(|n| n < 2) {
        return Err(usage("--grid needs at least 2 nodes"));
    }
    let mut inputs = load_inputs(&config.inputs)?;
    let eps = config.epsilon;
    match config.command {
        CommandKind::FactorInterval => {
            let f = interval(inputs.function(0, config.grid)?, 0)?;
            let g = interval(inputs.function(1, config.grid)?, 1)?;
            let d = interval(inputs.function(2, config.grid)?, 2)?;
            let r = open_mult_interval(&f, &g, &d, eps)?;
            Ok(match config.format {
                Format::Json => envelope(config, pipeline_constants(&r.config), serde_json::to_value(&r).expect("serializable")),
                Format::Csv => values_csv(
                    "t,d1_re,d1_im,d2_re,d2_im",
                    f.domain().nodes().enumerate().map(|(k, t)| (t.to_string(), vec![r.d1.values()[k], r.d2.values()[k]])),
                ),
            })
        }
        CommandKind::FactorGraph => {
            let f = graph(inputs.function(0, config.grid)?, 0)?;
            let g = graph(inputs.function(1, config.grid)?, 1)?;
            let d = graph(inputs.function(2, config.grid)?, 2)?;
            let r = open_mult_graph(&f, &g, &d, eps)?;
            Ok(match config.format {
                Format::Json => envelope(config, pipeline_constants(&r.config), serde_json::to_value(&r).expect("serializable")),
                Format::Csv => {
                    let rows = r.d1.edge_functions().iter().zip(r.d2.edge_functions()).enumerate().flat_map(|(k, (a, b))| {
                        a.domain()
                            .nodes()
                            .enumerate()
                            .map(move |(i, t)| (format!("{k},{t}"), vec![a.values()[i], b.values()[i]]))
                            .collect::<Vec<_>>()
                    });
                    values_csv("edge,t,d1_re,d1_im,d2_re,d2_im", rows)
                }
            })
        }
        CommandKind::FactorFinite => {
            let a = inputs.function(0, None)?.to_finite()?;
            let b = inputs.function(1, None)?.to_finite()?;
            let d = inputs.function(2, None)?.to_finite()?;
            let (a2, b2) = open_mult_finite(&a, &b, &d, eps)?;
            let residual = a2.pointwise_product(&b2)?.sub(&a.pointwise_product(&b)?.add(&d)?)?.sup_norm();
            let (da, db) = (a2.sub(&a)?.sup_norm(), b2.sub(&b)?.sup_norm());
            Ok(match config.format {
                Format::Json => envelope(
                    config,
                    json!({ "epsilon": eps, "delta": eps * eps / 4.0 }),
                    json!({
                        "a": FunctionDoc::from(&a2),
                        "b": FunctionDoc::from(&b2),
                        "residual": residual.to_string(),
                        "distance_a": da.to_string(),
                        "distance_b": db.to_string(),
                    }),
                ),
                Format::Csv => finite_csv("index,a_re,a_im,b_re,b_im", &a2, &b2),
            })
        }
        CommandKind::NondegApprox => {
            let f = inputs.function(0, None)?.to_finite()?;
            let g = inputs.function(1, None)?.to_finite()?;
            let (f2, g2) = nondeg_approx(&f, &g, eps)?;
            let min_sq = crate::function::min_modulus_sum(&f2, &g2, crate::function::ModulusSum::Squared)?;
            Ok(match config.format {
                Format::Json => envelope(
                    config,
                    json!({ "epsilon": eps }),
                    json!({
                        "f": FunctionDoc::from(&f2),
                        "g": FunctionDoc::from(&g2),
                        "distance_f": f2.sub(&f)?.sup_norm().to_string(),
                        "distance_g": g2.sub(&g)?.sup_norm().to_string(),
                        "min_modulus_sq_sum": min_sq.to_string(),
                        "product_exact": f2.pointwise_product(&g2)? == f.pointwise_product(&g)?,
                    }),
                ),
                Format::Csv => finite_csv("index,f_re,f_im,g_re,g_im", &f2, &g2),
            })
        }
        CommandKind::Scheme => {
            let options = SchemeOptions { audit: config.audit, ..SchemeOptions::default() };
            if let Some(model) = inputs.model.take() {
                if !model.unital {
                    return Err(usage("only the unitised diagonal algebra is supported"));
                }
                let m = DiagonalModel::new(model.weights)?;
                let (f, g, h) = (inputs.diagonal(0, &m)?, inputs.diagonal(1, &m)?, inputs.diagonal(2, &m)?);
                let params = scheme_params(&f, &g, eps, &m)?;
                let out = run_scheme(&f, &g, &h, &params, &m, &options)?;
                scheme_report(config, &m, out, |e| json!({ "scalar": e.scalar, "coords": e.coords }))
            } else {
                let f = inputs.function(0, config.grid)?.to_finite()?;
                let g = inputs.function(1, config.grid)?.to_finite()?;
                let h = inputs.function(2, config.grid)?.to_finite()?;
                let m = SupNormModel::new(f.len());
                let params = scheme_params(&f, &g, eps, &m)?;
                let out = run_scheme(&f, &g, &h, &params, &m, &options)?;
                scheme_report(config, &m, out, |e: &FiniteSpaceFunction| json!(FunctionDoc::from(e)))
            }
        }
        CommandKind::Probe => {
            let f = interval(inputs.function(0, config.grid)?, 0)?;
            let g = interval(inputs.function(1, config.grid)?, 1)?;
            let trials = inputs.trials.unwrap_or(16);
            let report = probe_pipeline(&f, &g, eps, trials, config.seed)?;
            let constants = pipeline_constants(&PipelineConfig::new(eps)?);
            Ok(match config.format {
                Format::Json => envelope(config, constants, serde_json::to_value(&report).expect("serializable")),
                Format::Csv => report.to_csv(),
            })
        }
    }
}

fn finite_csv(header: &str, a: &FiniteSpaceFunction, b: &FiniteSpaceFunction) -> String {
    values_csv(header, a.values().iter().zip(b.values()).enumerate().map(|(k, (&x, &y))| (k.to_string(), vec![x, y])))
}

fn scheme_report<M: AlgebraModel>(
    config: &RunConfig,
    model: &M,
    out: SchemeOutcome<M::Element>,
    element: impl Fn(&M::Element) -> Value,
) -> Result<String, Failure> {
    let audit = audit_claims(&out.trace, &out.params)?;
    if let Some(path) = &config.output {
        let mut trace_path = path.clone().into_os_string();
        trace_path.push(".trace.jsonl");
        std::fs::write(&trace_path, out.trace.to_json_lines()).map_err(|e| input_error(path, e))?;
    }
    Ok(match config.format {
        Format::Json => {
            let p = &out.params;
            let constants = json!({
                "epsilon": p.epsilon, "gamma": p.gamma, "K": p.k, "T_hat": p.t_hat, "T": p.t, "delta": p.delta,
                "C": model.embedding_bound(), "D": model.differential_constant(),
            });
            envelope(
                config,
                constants,
                json!({
                    "f": element(&out.f),
                    "g": element(&out.g),
                    "iterations": out.iterations,
                    "residual": out.residual.to_string(),
                    "distance_f": out.distance_f.to_string(),
                    "distance_g": out.distance_g.to_string(),
                    "audit": audit,
                    "trace": out.trace.entries,
                }),
            )
        }
        Format::Csv => {
            let mut s = String::from("n,norm_f,norm_g,norm_h,inf_modulus_sum,identity_residual,step_f,step_g\n");
            for e in &out.trace.entries {
                s.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    e.n, e.norm_f, e.norm_g, e.norm_h, e.inf_modulus_sum, e.identity_residual, e.step_f, e.step_g
                ));
            }
            s
        }
    })
}
