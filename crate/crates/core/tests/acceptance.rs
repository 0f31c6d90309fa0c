//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use openmult::function::{min_modulus_sum, FiniteSpaceFunction, GridFunction, IntervalDomain, ModulusSum, Sampled};
use openmult::graph::open_mult_graph;
use openmult::interval::{
    delta0, delta45, factor_halfboundary, factor_interval, lemma45_phi, nondeg_phases, open_mult_interval, phase_offset,
    sublevel_cover, PipelineConfig, Side,
};
use openmult::pointwise::{nondeg_approx, region, scalar_factor, Region};
use openmult::probe::brute_scalar_delta;
use openmult::sampling::{k4, perturbation, random_graph_triple, random_pair, star3, theta, trig_function, GraphSampling, PairFamily};
use openmult::scheme::{audit_claims, run_scheme, scheme_params, SchemeOptions, SupNormModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn polar<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(lo..hi), rng.gen_range(0.0..std::f64::consts::TAU))
}

fn tally(name: &str, failures: usize, total: usize, extra: String) -> Outcome {
    let line = format!("{name}: {}/{total} ok{extra}", total - failures);
    if failures == 0 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn ac1_interval_openness() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let dom = IntervalDomain::new(0.0, 1.0, 1025).unwrap();
    let (mut fails, mut total, mut worst) = (0, 0, 0.0f64);
    for eps0 in [0.7, 0.35, 0.07] {
        let r = delta0(eps0);
        for k in 0..500 {
            let family = [PairFamily::Trig, PairFamily::Polynomial][k % 2];
            let (f, g) = random_pair(&mut rng, dom, family).unwrap();
            let d = perturbation(&mut rng, dom, r).unwrap();
            total += 1;
            let ok = match open_mult_interval(&f, &g, &d, eps0) {
                Ok(res) => {
                    let psi = f.pointwise_product(&g).unwrap().add(&d).unwrap();
                    let lhs = f.add(&res.d1).unwrap().pointwise_product(&g.add(&res.d2).unwrap()).unwrap();
                    let residual = lhs.sub(&psi).unwrap().sup_norm() / (1.0 + psi.sup_norm());
                    worst = worst.max(residual);
                    residual <= 1e-9 && res.d1.sup_norm() <= eps0 && res.d2.sup_norm() <= eps0
                }
                Err(_) => false,
            };
            fails += usize::from(!ok);
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let out = tally("interval openness at delta0 = eps0^2/245", fails, total, format!(", worst residual {worst:.1e}, {secs:.1} s"));
    if secs >= 60.0 {
        return Err(format!("{} (over 60 s)", out.unwrap_or_else(|e| e)));
    }
    out
}

fn ac2_scheme_audit() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 257;
    let model = SupNormModel::new(n);
    let eps = 0.5;
    let (mut fails, mut iterations) = (0, 0);
    for _ in 0..200 {
        let draw = |rng: &mut ChaCha8Rng, lo: f64| FiniteSpaceFunction::new((0..n).map(|_| polar(rng, lo, 1.0)).collect()).unwrap();
        let (f, g) = if rng.gen_bool(0.5) { (draw(&mut rng, 0.2), draw(&mut rng, 0.0)) } else { (draw(&mut rng, 0.0), draw(&mut rng, 0.2)) };
        let params = scheme_params(&f, &g, eps, &model).unwrap();
        let h = draw(&mut rng, 0.0);
        let h = h.scale(c(0.99 * params.delta / h.sup_norm(), 0.0));
        let options = SchemeOptions { audit: true, ..SchemeOptions::default() };
        let ok = match run_scheme(&f, &g, &h, &params, &model, &options) {
            Ok(out) => {
                iterations += out.trace.entries.len();
                let audit = audit_claims(&out.trace, &params).unwrap();
                let halving = out.trace.entries.iter().all(|e| e.norm_h <= 0.5f64.powi(e.n as i32) * params.delta);
                let target = f.pointwise_product(&g).unwrap().add(&h).unwrap();
                let residual = out.f.pointwise_product(&out.g).unwrap().sub(&target).unwrap().sup_norm();
                let close = out.f.sub(&f).unwrap().sup_norm() < eps && out.g.sub(&g).unwrap().sup_norm() < eps;
                audit.passed && halving && residual <= 1e-9 && close
            }
            Err(_) => false,
        };
        fails += usize::from(!ok);
    }
    tally("scheme claims (i)-(iv) at every iteration", fails, 200, format!(", {iterations} audited iterations"))
}

fn ac3_zero_dimensional() -> Outcome {
    let mut pts = vec![c(0.0, 0.0)];
    for r in [0.25, 0.7, 1.3, 2.0] {
        for j in 0..6 {
            pts.push(Complex64::from_polar(r, std::f64::consts::TAU * (j as f64 + 0.3) / 6.0));
        }
    }
    let (mut fails, mut total) = (0, 0);
    for k in 1..=10 {
        let eps = k as f64 / 10.0;
        for &x in &pts {
            for &y in &pts {
                for j in 0..4 {
                    let w = Complex64::from_polar(eps * eps / 4.0, std::f64::consts::TAU * j as f64 / 4.0 + 0.1);
                    total += 1;
                    let ok = match scalar_factor(x, y, w, eps) {
                        Ok((x2, y2)) => {
                            (x2 - x).norm() <= eps
                                && (y2 - y).norm() <= eps
                                && (x2 * y2 - x * y - w).norm() <= 1e-12
                        }
                        Err(_) => false,
                    };
                    fails += usize::from(!ok);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut brute_fails, mut brute_total, mut min_ratio) = (0, 0, f64::INFINITY);
    for eps in [0.2, 0.5, 1.0] {
        for k in 0..8 {
            let (x, y) = if k == 0 { (c(0.0, 0.0), c(0.0, 0.0)) } else { (polar(&mut rng, 0.0, 2.0), polar(&mut rng, 0.0, 2.0)) };
            let r = brute_scalar_delta(eps, x, y, 12).unwrap();
            let ratio = r / (eps * eps / 4.0);
            min_ratio = min_ratio.min(ratio);
            brute_total += 1;
            brute_fails += usize::from(ratio < 1.0 - 1e-3);
        }
    }
    tally(
        "zero-dimensional modulus eps^2/4",
        fails + brute_fails,
        total + brute_total,
        format!(", {total} grid cases, {brute_total} brute-force points, min delta_emp/(eps^2/4) = {min_ratio:.3}"),
    )
}

fn ac4_graphs() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let eps0 = 0.7;
    let r = delta0(eps0);
    let (mut fails, mut total) = (0, 0);
    let mut per_graph = Vec::new();
    for (name, dom) in [("star3", star3(257).unwrap()), ("theta", theta(257).unwrap()), ("K4", k4(257).unwrap())] {
        let mut graph_fails = 0;
        for k in 0..100 {
            let opts = GraphSampling { interior_joint_zero: k % 2 == 0, degenerate_vertex: k % 3 == 0 };
            let (f, g, d) = random_graph_triple(&mut rng, &dom, r, opts).unwrap();
            let ok = match open_mult_graph(&f, &g, &d, eps0) {
                Ok(res) => {
                    let edges_ok = (0..dom.edges().len()).all(|e| {
                        let psi = f.edge(e).pointwise_product(g.edge(e)).unwrap().add(d.edge(e)).unwrap();
                        let lhs = f.edge(e).add(res.d1.edge(e)).unwrap().pointwise_product(&g.edge(e).add(res.d2.edge(e)).unwrap()).unwrap();
                        lhs.sub(&psi).unwrap().sup_norm() <= 1e-9
                    });
                    edges_ok
                        && res.d1.max_vertex_gap() <= 1e-9
                        && res.d2.max_vertex_gap() <= 1e-9
                        && res.bound1 <= eps0
                        && res.bound2 <= eps0
                }
                Err(_) => false,
            };
            total += 1;
            graph_fails += usize::from(!ok);
        }
        fails += graph_fails;
        per_graph.push(format!("{name} {}/100", 100 - graph_fails));
    }
    tally("graphs share delta0(0.7)", fails, total, format!(" ({})", per_graph.join(", ")))
}

fn ac5_building_blocks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut report = Vec::new();
    let mut fails = 0;

    let mut bad = 0;
    for _ in 0..100_000 {
        let (z, w) = (polar(&mut rng, 1e-6, 1.0), polar(&mut rng, 1e-6, 1.0));
        let cst = phase_offset(z, w).unwrap();
        let lhs = (z + cst * w).norm_sqr();
        bad += usize::from((lhs - z.norm_sqr() - w.norm_sqr()).abs() > 1e-12 || (cst.norm() - 1.0).abs() > 1e-12);
    }
    report.push(format!("phase offset {}/100000", 100_000 - bad));
    fails += bad;

    let dom = IntervalDomain::new(0.0, 1.0, 1025).unwrap();
    let mut bad = 0;
    for k in 0..1000 {
        let cfg = PipelineConfig::new([0.7, 0.35, 0.07][k % 3]).unwrap();
        let (f, g) = random_pair(&mut rng, dom, PairFamily::ALL[k % 3]).unwrap();
        let h = GridFunction::new(dom, f.values().iter().zip(g.values()).map(|(a, b)| c(a.norm_sqr() + b.norm_sqr(), 0.0)).collect()).unwrap();
        let ok = match sublevel_cover(&h, cfg.eta1, cfg.eta2) {
            Ok(cover) => {
                let disjoint = cover.intervals().windows(2).all(|w| w[0].end < w[1].start);
                disjoint
                    && h.values().iter().enumerate().all(|(k, v)| {
                        (v.norm() > cfg.eta1 || cover.contains(k)) && (!cover.contains(k) || v.norm() < cfg.eta2)
                    })
            }
            Err(_) => false,
        };
        bad += usize::from(!ok);
    }
    report.push(format!("sublevel cover {}/1000", 1000 - bad));
    fails += bad;

    let dom = IntervalDomain::new(0.0, 1.0, 257).unwrap();
    let mut bad = 0;
    for _ in 0..1000 {
        let (h1, h2) = (trig_function(&mut rng, dom).unwrap(), trig_function(&mut rng, dom).unwrap());
        let min_sq = min_modulus_sum(&h1, &h2, ModulusSum::Squared).unwrap();
        let eta = min_sq.sqrt() * rng.gen_range(0.3..0.95);
        let ok = match nondeg_phases(&h1, &h2, eta) {
            Ok((b1, b2)) => (0..dom.len()).all(|k| {
                let (p, q) = (b1.values()[k], b2.values()[k]);
                (p.norm() - 1.0).abs() <= 1e-12
                    && (q.norm() - 1.0).abs() <= 1e-9
                    && (h1.values()[k] * p + h2.values()[k] * q).norm() >= eta
            }),
            Err(_) => false,
        };
        bad += usize::from(!ok);
    }
    report.push(format!("phase lower bound {}/1000", 1000 - bad));
    fails += bad;

    let dom = IntervalDomain::new(0.0, 1.0, 129).unwrap();
    let mut bad = 0;
    for k in 0..1000 {
        let eps = rng.gen_range(0.05..1.0);
        let shape = trig_function(&mut rng, dom).unwrap();
        let psi = shape.scale(c(eps * eps * rng.gen_range(0.1..1.0) / shape.sup_norm(), 0.0));
        let mut boundary = |p: Complex64| {
            let z = if p.norm() == 0.0 {
                polar(&mut rng, 0.0, eps)
            } else {
                Complex64::from_polar(rng.gen_range(p.norm() / eps..=eps), rng.gen_range(0.0..6.3))
            };
            (z, if z.norm() == 0.0 { c(0.0, 0.0) } else { p / z })
        };
        let (za, wa) = boundary(psi.first());
        let (zb, wb) = boundary(psi.last());
        let result = if k % 2 == 0 {
            factor_interval(&psi, eps, za, wa, zb, wb).map(|r| (r, [za, wa, zb, wb]))
        } else {
            let zhat = psi.last().sqrt();
            factor_halfboundary(&psi, eps, za, wa, zhat, Side::Left).map(|r| (r, [za, wa, zhat, zhat]))
        };
        let ok = match result {
            Ok(((z1, z2), ends)) => {
                z1.pointwise_product(&z2).unwrap().sub(&psi).unwrap().sup_norm() <= 1e-9
                    && z1.sup_norm() <= eps * (1.0 + 1e-9)
                    && z2.sup_norm() <= eps * (1.0 + 1e-9)
                    && [z1.first(), z2.first(), z1.last(), z2.last()] == ends
            }
            Err(_) => false,
        };
        bad += usize::from(!ok);
    }
    report.push(format!("boundary factorization {}/1000", 1000 - bad));
    fails += bad;

    let line = format!("building-block properties: {}", report.join(", "));
    if fails == 0 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn ac6_continuity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (eta, eps) = (0.3, 0.1);
    let mut worst = f64::INFINITY;
    for _ in 0..20 {
        let (a, b, w) = (polar(&mut rng, 0.0, 1.0), rng.gen_range(-3.0..3.0), polar(&mut rng, 0.0, 1.0));
        let shape = trig_function(&mut rng, IntervalDomain::new(0.0, 1.0, 2049).unwrap()).unwrap();
        let scale = delta45(eta, eps) / shape.sup_norm();
        let mut jumps = Vec::new();
        for level in 0..5 {
            let dom = IntervalDomain::new(0.0, 1.0, 128 * (1 << level) + 1).unwrap();
            let f = GridFunction::from_fn(dom, |t| (eta + 0.5 + 0.4 * (a * t).re) * Complex64::from_polar(1.0, b * t)).unwrap();
            let g = GridFunction::from_fn(dom, |t| Complex64::from_polar(1.0, 2.0 * t + w.im)).unwrap();
            let d = GridFunction::from_fn(dom, |t| shape.eval(t) * scale).unwrap();
            let phi = lemma45_phi(&f, &g, &d, eta, eps).unwrap();
            jumps.push(phi.values().windows(2).map(|p| (p[1] - p[0]).norm()).fold(0.0, f64::max));
        }
        for pair in jumps.windows(2) {
            worst = worst.min((pair[0] / pair[1]).log2());
        }
    }
    let line = format!("continuity of the quadratic root: worst rate {worst:.3} per doubling over 20 instances x 4 doublings");
    if worst >= 0.9 {
        Ok(line)
    } else {
        Err(line)
    }
}

fn ac7_nondeg_approx() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut fails = 0;
    let mut seen = [0usize; 3];
    for _ in 0..10_000 {
        let n = rng.gen_range(1..24);
        let eps = rng.gen_range(1e-3..1.0);
        let draw = |rng: &mut ChaCha8Rng| {
            let v = (0..n)
                .map(|_| match rng.gen_range(0..4) {
                    0 => c(0.0, 0.0),
                    1 => polar(rng, 0.0, eps / 3.0),
                    2 => polar(rng, 0.0, 1e-300),
                    _ => polar(rng, 0.0, 2.0),
                })
                .collect();
            FiniteSpaceFunction::new(v).unwrap()
        };
        let (f, g) = (draw(&mut rng), draw(&mut rng));
        for (p, q) in f.values().iter().zip(g.values()) {
            seen[match region(*p, *q, eps) {
                Region::F => 0,
                Region::G => 1,
                Region::Small => 2,
            }] += 1;
        }
        let ok = match nondeg_approx(&f, &g, eps) {
            Ok((f2, g2)) => {
                f2.pointwise_product(&g2).unwrap() == f.pointwise_product(&g).unwrap()
                    && f2.sub(&f).unwrap().sup_norm() <= eps
                    && g2.sub(&g).unwrap().sup_norm() <= eps
                    && min_modulus_sum(&f2, &g2, ModulusSum::Squared).unwrap() > 0.0
            }
            Err(_) => false,
        };
        fails += usize::from(!ok);
    }
    tally(
        "non-degenerate approximation, exact products",
        fails,
        10_000,
        format!(" (points by region F/G/small: {}/{}/{})", seen[0], seen[1], seen[2]),
    )
}

fn ac8_scope() -> Outcome {
    let mut refused = 0;
    for cmd in openmult::cli::REFUSED_COMMANDS {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = openmult::cli::run(["openmult", cmd, "--epsilon", "0.5"], &mut out, &mut err);
        let diag: serde_json::Value = serde_json::from_slice(&err).unwrap_or_default();
        refused += usize::from(code == 2 && out.is_empty() && diag["error"] == "out_of_scope");
    }
    let (mut help, mut err) = (Vec::new(), Vec::new());
    openmult::cli::run(["openmult", "--help"], &mut help, &mut err);
    let help = String::from_utf8(help).unwrap();
    let listed = openmult::cli::REFUSED_COMMANDS.iter().filter(|c| help.contains(*c)).count();
    let readme = include_str!("../../../README.md");
    let declared = readme.contains("Out of scope");
    let total = openmult::cli::REFUSED_COMMANDS.len();
    let line = format!("scope declared: {refused}/{total} out-of-scope commands refused with exit 2, {listed} advertised, README scope section present: {declared}");
    if refused == total && listed == 0 && declared {
        Ok(line)
    } else {
        Err(line)
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("AC1", ac1_interval_openness),
        ("AC2", ac2_scheme_audit),
        ("AC3", ac3_zero_dimensional),
        ("AC4", ac4_graphs),
        ("AC5", ac5_building_blocks),
        ("AC6", ac6_continuity),
        ("AC7", ac7_nondeg_approx),
        ("AC8", ac8_scope),
    ];
    let mut failed = 0;
    for (id, check) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(line) => println!("{id} PASS {line}"),
            Err(line) => {
                failed += 1;
                println!("{id} FAIL {line}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
