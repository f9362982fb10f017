use std::fmt::Write as _;

use nalgebra::Matrix3;
use serde_json::{json, Value};

use slaglab::algebra::ImOctonion;
use slaglab::g2::{normal_structure, pairing_iso, selfdual_graph_bform, SelfDualFieldSample};
use slaglab::io::{MuDocument, PairDocument};
use slaglab::loops::{
    comparison_loop, connected_sum_descriptor, eta_report, mu_parity, trajectory, validate_pair_loop,
    ConnectedSumDescriptor, ModelKind, PairLoop,
};
use slaglab::random::{self, Stratum};
use slaglab::slag::{
    classify_region, classify_stabilizer, graph_bilinear_form, graphicality_margin, negative_eigenline,
    normal_form, transversality_margin, RegionClass,
};
use slaglab::tol::Tolerances;
use slaglab::verify::{verify_suites, VerifyError};
use slaglab::Z2;

use crate::report::{Failure, Report};
use crate::{Cli, Command, GenArgs, GenKind, ModelArg, StratumArg};

pub const SEED_VAR: &str = "SLAGLAB_SEED";

fn resolve_seed(cli: &Cli) -> Result<u64, Failure> {
    if let Some(s) = cli.global.seed {
        return Ok(s);
    }
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Malformed(format!("{SEED_VAR}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn tolerances(cli: &Cli) -> Result<Tolerances, Failure> {
    let g = &cli.global;
    let t = Tolerances {
        algebra: g.algebra_tol,
        gap: g.gap_tol,
        wall: g.wall_tol,
        transverse: g.transverse_tol,
    };
    for (name, v) in [
        ("algebra-tol", t.algebra),
        ("gap-tol", t.gap),
        ("wall-tol", t.wall),
        ("transverse-tol", t.transverse),
    ] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Failure::Malformed(format!("--{name} must be positive, got {v}")));
        }
    }
    Ok(t)
}

fn name(c: &Command) -> &'static str {
    match c {
        Command::NormalForm { .. } => "normal-form",
        Command::Classify { .. } => "classify",
        Command::Bilinear { .. } => "bilinear",
        Command::Eta { .. } => "eta",
        Command::Mu { .. } => "mu",
        Command::Gen(_) => "gen",
        Command::Consum { .. } => "consum",
        Command::Verify { .. } => "verify",
    }
}

fn args_value(c: &Command) -> Value {
    match c {
        Command::NormalForm { pair } | Command::Classify { pair } => json!({ "pair": pair }),
        Command::Bilinear { pair, field } => json!({ "pair": pair, "field": field }),
        Command::Eta { path, csv } => json!({ "loop": path, "csv": csv }),
        Command::Mu { framings } => json!({ "framings": framings }),
        Command::Gen(g) => serde_json::to_value(g).unwrap(),
        Command::Consum {
            k,
            mu,
            plus_name,
            minus_name,
        } => json!({ "k": k, "mu": mu, "plus_name": plus_name, "minus_name": minus_name }),
        Command::Verify { suite, trials } => json!({ "suite": suite, "trials": trials }),
    }
}

/// Runs one command. On failure the rendered report is returned together
/// with the reason, which determines the exit code.
pub fn run(cli: &Cli) -> Result<String, (String, Failure)> {
    let sub = name(&cli.command);
    let setup = resolve_seed(cli).and_then(|s| tolerances(cli).map(|t| (s, t)));
    let (seed, tol) = match setup {
        Ok(x) => x,
        Err(f) => {
            let rep = Report::new(sub, json!({ "args": args_value(&cli.command) }));
            return Err((rep.render(Some(&f)), f));
        }
    };
    let config = json!({
        "seed": seed,
        "tolerances": tol,
        "args": args_value(&cli.command),
    });
    let mut rep = Report::new(sub, config);
    let outcome = dispatch(&cli.command, seed, &tol, &mut rep);
    match outcome {
        Ok(Some(raw)) => Ok(raw),
        Ok(None) if rep.passed() => Ok(rep.render(None)),
        Ok(None) => Err((rep.render(Some(&Failure::ChecksFailed)), Failure::ChecksFailed)),
        Err(f) => Err((rep.render(Some(&f)), f)),
    }
}

/// `Ok(Some(text))` replaces the report with raw output.
fn dispatch(c: &Command, seed: u64, tol: &Tolerances, rep: &mut Report) -> Result<Option<String>, Failure> {
    match c {
        Command::NormalForm { pair } => {
            let p: PairDocument = rep.load(pair)?;
            let nf = normal_form(&p.v, &p.vp).map_err(Failure::computation)?;
            let err = nf.reconstruction_error(&p.v, &p.vp);
            let class = classify_stabilizer(&nf.theta, tol.gap);
            rep.results = json!({
                "theta": nf.theta.theta(),
                "m": nf.theta.trace_class(),
                "normal_form": nf,
                "stabilizer": class,
                "stabilizer_dimension": class.expected_dimension(),
                "reconstruction_error": err,
            });
            rep.check("reconstruction", err < 1e-8);
        }
        Command::Classify { pair } => {
            let p: PairDocument = rep.load(pair)?;
            let margin = transversality_margin(&p.v, &p.vp);
            if 2.0 * margin < tol.transverse {
                return Err(Failure::computation(slaglab::slag::SlagError::NotTransverse(margin)));
            }
            let nf = normal_form(&p.v, &p.vp).map_err(Failure::computation)?;
            let region = classify_region(&nf.theta, tol.wall);
            rep.results = json!({
                "theta": nf.theta.theta(),
                "m": nf.theta.trace_class(),
                "stabilizer": classify_stabilizer(&nf.theta, tol.gap),
                "region": region,
                "close": region.is_close(),
                "graphical": region != RegionClass::PWall,
                "transversality_margin": margin,
                "graphicality_margin": graphicality_margin(&p.v, &p.vp),
            });
        }
        Command::Bilinear { pair, field } => {
            if let Some(pair) = pair {
                let p: PairDocument = rep.load(pair)?;
                let b = graph_bilinear_form(&p.v, &p.vp).map_err(Failure::computation)?;
                let residual = b.trace_det_residual();
                let eigenvalues = b.eigenvalues();
                let line = negative_eigenline(&b, 1e-12).ok().map(|l| [l[0], l[1], l[2]]);
                rep.results = json!({
                    "B": b,
                    "trace": b.trace(),
                    "det": b.det(),
                    "trace_det_residual": residual,
                    "eigenvalues": eigenvalues,
                    "negative_eigenline": line,
                });
                rep.check("trace_equals_det", residual < 1e-9 * (1.0 + b.matrix().norm().powi(3)));
            } else if let Some(field) = field {
                let f: SelfDualFieldSample = rep.load(field)?;
                let r = selfdual_graph_bform(&f);
                rep.results = serde_json::to_value(r).unwrap();
                rep.check("closed_field", !r.flagged);
            }
        }
        Command::Eta { path, csv } => {
            let l: PairLoop = rep.load(path)?;
            if *csv {
                let rows = trajectory(&l).map_err(Failure::computation)?;
                let mut out = String::from("index,theta1,theta2,theta3,lambda1,lambda2,lambda3");
                for r in rows {
                    let [a, b, c] = r.theta;
                    let [x, y, z] = r.eigenvalues;
                    write!(out, "\n{},{a:.12},{b:.12},{c:.12},{x:.12},{y:.12},{z:.12}", r.index).unwrap();
                }
                return Ok(Some(out));
            }
            let diag = validate_pair_loop(&l).map_err(Failure::computation)?;
            let eta = eta_report(&l).map_err(Failure::computation)?;
            rep.results = json!({ "eta": eta.eta, "report": eta, "diagnostics": diag });
        }
        Command::Mu { framings } => {
            let d: MuDocument = rep.load(framings)?;
            let (iso, source): (Vec<Matrix3<f64>>, &str) = if let Some(iso) = &d.iso {
                (iso.clone(), "given")
            } else if let Some(pairs) = &d.pairs {
                let ns = normal_structure(&ImOctonion::basis(5)).map_err(Failure::computation)?;
                let iso = pairs
                    .samples
                    .iter()
                    .map(|s| pairing_iso(&ns, &s.v, &s.vp))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(Failure::computation)?;
                (iso, "pairs")
            } else {
                (vec![-Matrix3::identity(); d.plus.len()], "minus_identity")
            };
            let parity = mu_parity(&d.plus, &d.minus, &iso).map_err(Failure::computation)?;
            let comparison = comparison_loop(&d.plus, &d.minus, &iso).map_err(Failure::computation)?;
            let max_step = (0..comparison.len())
                .map(|i| comparison[i].angle_to(&comparison[(i + 1) % comparison.len()]))
                .fold(0.0, f64::max);
            rep.results = json!({
                "mu": parity,
                "samples": d.plus.len(),
                "iso_source": source,
                "max_comparison_step": max_step,
                "component": d.plus.component,
            });
        }
        Command::Gen(g) => return generate(g, seed, rep),
        Command::Consum {
            k,
            mu,
            plus_name,
            minus_name,
        } => {
            let mu = parse_mu(mu)?;
            if mu.len() != *k {
                return Err(Failure::Malformed(format!("--k {k} but --mu has {} values", mu.len())));
            }
            let d = ConnectedSumDescriptor {
                mu,
                plus_name: plus_name.clone(),
                minus_name: minus_name.clone(),
            };
            let r = connected_sum_descriptor(&d).map_err(Failure::computation)?;
            rep.results = serde_json::to_value(r).unwrap();
        }
        Command::Verify { suite, trials } => {
            let r = verify_suites(suite, *trials, seed, tol).map_err(|e| match e {
                VerifyError::UnknownSuite(_) => Failure::Malformed(e.to_string()),
            })?;
            for s in &r.suites {
                for c in &s.checks {
                    rep.check(&format!("{}/{}", s.suite, c.name), c.passed);
                }
            }
            rep.results = serde_json::to_value(r).unwrap();
        }
    }
    Ok(None)
}

fn parse_mu(s: &str) -> Result<Vec<Z2>, Failure> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<i64>()
                .ok()
                .and_then(Z2::from_i64)
                .ok_or_else(|| Failure::Malformed(format!("μ value {t:?} is not ±1")))
        })
        .collect()
}

fn stratum(s: StratumArg) -> Stratum {
    match s {
        StratumArg::Generic => Stratum::Generic,
        StratumArg::LowPair => Stratum::LowPair,
        StratumArg::HighPair => Stratum::HighPair,
        StratumArg::Equal => Stratum::Equal,
    }
}

fn pair_doc(p: &random::GeneratedPair) -> Value {
    serde_json::to_value(slaglab::loops::PairSample { v: p.v, vp: p.vp }).unwrap()
}

fn generate(g: &GenArgs, seed: u64, rep: &mut Report) -> Result<Option<String>, Failure> {
    let kind = match (g.kind, g.model, g.twists) {
        (Some(k), _, _) => k,
        (None, Some(_), _) => GenKind::PairLoop,
        (None, None, Some(_)) => GenKind::FramingLoop,
        (None, None, None) => return Err(Failure::Malformed("gen needs --kind, --model or --twists".into())),
    };
    let mut r = random::rng(seed);
    let (doc, summary) = match kind {
        GenKind::Su3 => {
            let a = random::su3(&mut r);
            let doc = serde_json::to_value(slaglab::linalg::nested::ComplexRows::from(a)).unwrap();
            (doc, json!({ "unitarity_residual": slaglab::linalg::unitarity_residual(&a) }))
        }
        GenKind::AngleVector => {
            let t = random::angle_vector_in(&mut r, g.m, stratum(g.stratum));
            (serde_json::to_value(t).unwrap(), json!({ "theta": t.theta() }))
        }
        GenKind::SlagPlane => {
            let p = random::slag_plane(&mut r);
            (serde_json::to_value(p).unwrap(), json!({ "special_residual": p.special_residual() }))
        }
        GenKind::TransversePair => {
            let p = random::transverse_pair(&mut r, stratum(g.stratum));
            (pair_doc(&p), json!({ "theta": p.theta.theta() }))
        }
        GenKind::CloseGraphicalPair => {
            let p = random::close_graphical_pair(&mut r);
            (pair_doc(&p), json!({ "theta": p.theta.theta() }))
        }
        GenKind::PairLoop => {
            let model = match g.model.unwrap_or(ModelArg::Moebius) {
                ModelArg::Trivial => ModelKind::Trivial,
                ModelArg::Moebius => ModelKind::Moebius,
            };
            let l = random::pair_loop(&mut r, model, g.samples, g.lambda_prime).map_err(Failure::computation)?;
            (serde_json::to_value(&l).unwrap(), json!({ "samples": l.len(), "delta": l.delta }))
        }
        GenKind::FramingLoop => {
            let f = random::framing_loop(&mut r, g.twists.unwrap_or(0), g.samples).map_err(Failure::computation)?;
            (serde_json::to_value(&f).unwrap(), json!({ "samples": f.len(), "delta": f.delta }))
        }
    };
    let text = serde_json::to_string_pretty(&doc).unwrap();
    match &g.out {
        None => Ok(Some(text)),
        Some(path) => {
            std::fs::write(path, format!("{text}\n"))
                .map_err(|e| Failure::Malformed(format!("cannot write {}: {e}", path.display())))?;
            rep.results = json!({ "kind": kind, "out": path, "summary": summary });
            Ok(None)
        }
    }
}
