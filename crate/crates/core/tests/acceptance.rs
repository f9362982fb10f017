//! One line per acceptance criterion; exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;

use slaglab::algebra::{cross, phi0_eval};
use slaglab::g2::{
    coassoc_from_slag, is_coassociative, normal_slag_pair, normal_structure, observed_order, pairing_iso,
    pairing_orientation, selfdual_graph_bform, SelfDualFieldSample,
};
use slaglab::linalg::{complexify, loop_parity, CMat3, RotationMatrix};
use slaglab::loops::{
    comparison_loop, connected_sum_descriptor, eta_invariant, framing_loop, generate_model_loop, mu_parity,
    perturb_loop, refine_loop, ConnectedSumDescriptor, FramingLoop, ModelKind, REFLECTION,
};
use slaglab::random::{self, Stratum};
use slaglab::slag::{
    alpha_curve, angle_involution, classify_stabilizer, fixes_pair, graph_bilinear_form, is_special_lagrangian,
    normal_form, plane_from_angles, stabilizer_dimension_numeric, AngleVector, SLagPlane,
};
use slaglab::tol::Tolerances;
use slaglab::verify::verify_suites;
use slaglab::Z2;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn max_diff(a: [f64; 3], b: [f64; 3]) -> f64 {
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn g2_identities() -> Outcome {
    let start = Instant::now();
    let mut r = random::rng(101);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let x = random::im_octonion(&mut r);
        let y = random::im_octonion(&mut r);
        let z = random::im_octonion(&mut r);
        worst = worst.max((phi0_eval(&x, &y, &z) - cross(&x, &y).dot(&z)).abs());
        let u = x.normalized();
        let w = y.axpy(-y.dot(&u), &u).normalized();
        worst = worst.max((cross(&u, &cross(&u, &w)) + w).norm());
        worst = worst.max((phi0_eval(&u, &cross(&u, &w), &z) + w.dot(&z)).abs());
    }
    let t = start.elapsed();
    ensure(worst < 1e-10, format!("worst residual {worst:e}"))?;
    ensure(t < Duration::from_secs(5), format!("took {t:?}"))?;
    Ok(format!("10^4 triples, worst residual {worst:.1e}, {:.2} s", t.as_secs_f64()))
}

fn special_iff_integral_trace() -> Outcome {
    let mut r = random::rng(102);
    let mut disagreements = 0;
    let mut special = 0;
    let mut n = 0;
    while n < 1000 {
        let mut t: [f64; 3] = std::array::from_fn(|_| r.random_range(0.0..PI));
        match n % 4 {
            // exactly on a trace class, or just off it
            0 | 1 => {
                let m = if n % 8 < 4 { PI } else { 2.0 * PI };
                let off = [0.0, 1e-12, 1e-10, 1e-6][r.random_range(0..4usize)];
                t[2] = m - t[0] - t[1] + off;
                if !(t[2] > 0.0 && t[2] < PI) {
                    continue;
                }
            }
            _ => {}
        }
        n += 1;
        let sum: f64 = t.iter().sum();
        let dist = (sum - (sum / PI).round() * PI).abs();
        let expect = dist < 1e-8;
        let got = is_special_lagrangian(plane_from_angles(t).frame(), 1e-8);
        special += got as usize;
        if got != expect {
            disagreements += 1;
        }
    }
    ensure(disagreements == 0, format!("{disagreements} disagreements"))?;
    Ok(format!("10^3 angle vectors ({special} special), 0 disagreements"))
}

fn normal_form_round_trip() -> Outcome {
    let mut r = random::rng(103);
    let mut worst = [0.0f64; 2];
    let mut swap = 0.0f64;
    for (stratum, count, tol, slot) in [
        (Stratum::Generic, 1000, 1e-8, 0),
        (Stratum::LowPair, 100, 1e-7, 1),
        (Stratum::HighPair, 100, 1e-7, 1),
    ] {
        for _ in 0..count {
            let p = random::transverse_pair(&mut r, stratum);
            let nf = normal_form(&p.v, &p.vp).map_err(|e| e.to_string())?;
            let e = max_diff(nf.theta.theta(), p.theta.theta()).max(nf.reconstruction_error(&p.v, &p.vp));
            ensure(e < tol, format!("{stratum:?}: error {e:e}"))?;
            worst[slot] = worst[slot].max(e);
            let back = normal_form(&p.vp, &p.v).map_err(|e| e.to_string())?.theta;
            let s = max_diff(back.theta(), angle_involution(&nf.theta).theta());
            ensure(s < 1e-8, format!("swap law error {s:e}"))?;
            swap = swap.max(s);
        }
    }
    Ok(format!(
        "generic worst {:.1e}, degenerate worst {:.1e}, swap worst {swap:.1e}",
        worst[0], worst[1]
    ))
}

fn stabilizer_agreement() -> Outcome {
    let mut r = random::rng(104);
    let mut seen = Vec::new();
    for stratum in Stratum::ALL {
        let mut dims = std::collections::BTreeSet::new();
        for _ in 0..200 {
            let p = random::transverse_pair(&mut r, stratum);
            let class = classify_stabilizer(&p.theta, 1e-6);
            let d = stabilizer_dimension_numeric(&p.v, &p.vp).map_err(|e| e.to_string())?;
            ensure(d == class.expected_dimension(), format!("{stratum:?}: {} vs {d}", class.tag()))?;
            dims.insert(d);
        }
        seen.push(format!("{stratum:?}={dims:?}"));
    }
    Ok(format!("800 pairs, 0 disagreements ({})", seen.join(" ")))
}

fn trace_det_law() -> Outcome {
    let mut r = random::rng(105);
    let mut worst = 0.0f64;
    let mut diag_worst = 0.0f64;
    for _ in 0..1000 {
        let p = random::graphical_pair(&mut r);
        let b = graph_bilinear_form(&p.v, &p.vp).map_err(|e| e.to_string())?;
        worst = worst.max(b.trace_det_residual());
        let t = p.theta.theta();
        let d = graph_bilinear_form(&SLagPlane::standard(), &p.theta.plane()).map_err(|e| e.to_string())?;
        let want = Matrix3::from_diagonal(&Vector3::from(t.map(f64::tan)));
        diag_worst = diag_worst.max((d.matrix() - want).abs().max());
    }
    ensure(worst < 1e-9, format!("|tr − det| up to {worst:e}"))?;
    ensure(diag_worst < 1e-9, format!("diag(tan θ) error {diag_worst:e}"))?;
    for _ in 0..1000 {
        let mut p = random::close_graphical_pair(&mut r);
        // the (−,+,+) signature refers to the pair ordered into the π side
        if p.theta.trace_class() == 2 {
            std::mem::swap(&mut p.v, &mut p.vp);
        }
        let b = graph_bilinear_form(&p.v, &p.vp).map_err(|e| e.to_string())?;
        let l = b.eigenvalues();
        ensure(l[0] < 0.0 && l[1] > 0.0 && l[2] > 0.0, format!("signature {l:?}"))?;
    }
    Ok(format!(
        "|tr − det| ≤ {worst:.1e}, diag(tan θ) ≤ {diag_worst:.1e}, signature (−,+,+) in 1000/1000"
    ))
}

fn eta_models() -> Outcome {
    let start = Instant::now();
    let lp: f64 = 0.5;
    let lambda = 2.0 * lp / (lp * lp - 1.0);
    ensure((lambda + 4.0 / 3.0).abs() < 1e-12, format!("λ = {lambda}"))?;
    let mut perturbed = 0;
    for (kind, want) in [(ModelKind::Trivial, Z2::Plus), (ModelKind::Moebius, Z2::Minus)] {
        let l = generate_model_loop(kind, 64, lp).map_err(|e| e.to_string())?;
        for s in &l.samples {
            let b = graph_bilinear_form(&s.v, &s.vp).map_err(|e| e.to_string())?;
            ensure(
                (b.trace() + 1.0 / 3.0).abs() < 1e-12 && (b.det() + 1.0 / 3.0).abs() < 1e-12,
                format!("tr {} det {}", b.trace(), b.det()),
            )?;
        }
        let eta = eta_invariant(&l).map_err(|e| e.to_string())?;
        ensure(eta == want, format!("{kind:?}: η = {eta}"))?;
        let fine = refine_loop(&l).map_err(|e| e.to_string())?;
        ensure(eta_invariant(&fine).map_err(|e| e.to_string())? == want, "doubling changed η")?;
        for seed in 0..100 {
            let p = perturb_loop(&l, seed, 0.05).map_err(|e| e.to_string())?;
            ensure(eta_invariant(&p).map_err(|e| e.to_string())? == want, format!("seed {seed} changed η"))?;
            perturbed += 1;
        }
    }
    let t = start.elapsed();
    ensure(t < Duration::from_secs(10), format!("took {t:?}"))?;
    Ok(format!(
        "trivial +1, moebius −1, λ = −4/3, tr = det = −1/3; {perturbed} perturbations and doubling unchanged; {:.2} s",
        t.as_secs_f64()
    ))
}

fn mu_parities() -> Outcome {
    let iso = -Matrix3::identity();
    let fixed_minus = |n: usize| framing_loop(&(REFLECTION * iso), &Vector3::z(), 0, n).unwrap();
    let twisted = |twists: i32, n: usize| framing_loop(&Matrix3::identity(), &Vector3::x(), twists, n).unwrap();
    let mu = |fp: &FramingLoop| {
        let n = fp.len();
        mu_parity(fp, &fixed_minus(n), &vec![iso; n]).map_err(|e| e.to_string())
    };
    let c = comparison_loop(&twisted(0, 32), &fixed_minus(32), &vec![iso; 32]).map_err(|e| e.to_string())?;
    ensure(
        c.iter().all(|x| (x.matrix() - Matrix3::identity()).norm() < 1e-12),
        "comparison loop is not the identity",
    )?;
    ensure(mu(&twisted(0, 32))? == Z2::Plus, "identity comparison")?;
    ensure(mu(&twisted(1, 32))? == Z2::Minus, "one twist")?;
    ensure(mu(&twisted(2, 32))? == Z2::Plus, "two twists")?;

    let mut r = random::rng(107);
    for seed in 0..50 {
        let twists = (seed % 5) as i32 - 2;
        let want = if twists % 2 == 0 { Z2::Plus } else { Z2::Minus };
        // same seed, twice the samples: the coarse loop sits at the even indices
        let coarse = random::framing_loop(&mut random::rng(seed), twists, 48).map_err(|e| e.to_string())?;
        let fine = random::framing_loop(&mut random::rng(seed), twists, 96).map_err(|e| e.to_string())?;
        for (i, m) in coarse.samples().iter().enumerate() {
            ensure((m - fine.samples()[2 * i]).norm() < 1e-9, "refined loop does not contain the coarse one")?;
        }
        ensure(mu(&coarse)? == want && mu(&fine)? == want, format!("refinement at seed {seed}"))?;

        let cl = comparison_loop(&coarse, &fixed_minus(48), &vec![iso; 48]).map_err(|e| e.to_string())?;
        let g = random::so3(&mut r);
        let conj: Vec<RotationMatrix> = cl.iter().map(|x| g.compose(x).compose(&g.inverse())).collect();
        ensure(loop_parity(&conj).map_err(|e| e.to_string())? == want, format!("conjugation at seed {seed}"))?;
        let h = *random::so3(&mut r).matrix();
        let iso2 = REFLECTION * h * REFLECTION * h.transpose() * iso;
        let reflected = mu_parity(&coarse, &fixed_minus(48), &vec![iso2; 48]).map_err(|e| e.to_string())?;
        ensure(reflected == want, format!("reflection conjugation at seed {seed}"))?;
    }
    Ok("identity +1, one twist −1, two twists +1; refinement and conjugation invariant on 50 seeds".into())
}

fn coassociative_suite() -> Outcome {
    let mut r = random::rng(108);
    let mut worst_j = 0.0f64;
    let mut worst_trip = 0.0f64;
    let mut min_vol = f64::INFINITY;
    let mut min_det = f64::INFINITY;
    for _ in 0..100 {
        let u = random::unit_im_octonion(&mut r);
        let ns = normal_structure(&u).map_err(|e| e.to_string())?;
        for _ in 0..3 {
            let v = random::im_octonion(&mut r);
            let v = v.axpy(-v.dot(&u), &u);
            worst_j = worst_j.max((ns.j(&ns.j(&v)) + v).norm() / v.norm());
        }
        min_vol = min_vol.min(ns.volume_ratio().abs());
        let pair = random::transverse_pair(&mut r, Stratum::Generic);
        let pp = coassoc_from_slag(&ns, &pair.v).map_err(|e| e.to_string())?;
        let pm = coassoc_from_slag(&ns, &pair.vp).map_err(|e| e.to_string())?;
        ensure(
            is_coassociative(pp.span()).map_err(|e| e.to_string())?
                && is_coassociative(pm.span()).map_err(|e| e.to_string())?,
            "coassoc_from_slag output is not coassociative",
        )?;
        let (a, b) = normal_slag_pair(&ns, &pp, &pm).map_err(|e| e.to_string())?;
        worst_trip = worst_trip.max(a.distance(&pair.v).max(b.distance(&pair.vp)));
        let m = pairing_iso(&ns, &pair.v, &pair.vp).map_err(|e| e.to_string())?;
        min_det = min_det.min(m.determinant().abs());
        let o = pairing_orientation(&m, &pair.v, &pair.vp).map_err(|e| e.to_string())?;
        let expect = if pair.theta.trace_class() == 2 { -1.0 } else { 1.0 };
        ensure(o.reverses() && o.calibrated_sign == expect, format!("orientation {o:?}"))?;
    }
    ensure(worst_j < 1e-10, format!("J² + Id residual {worst_j:e}"))?;
    ensure(min_vol > 1e-6, format!("Ω′∧Ω″ ratio {min_vol:e}"))?;
    ensure(worst_trip < 1e-10, format!("round trip {worst_trip:e}"))?;
    ensure(min_det > 1e-9, format!("pairing det {min_det:e}"))?;
    Ok(format!(
        "100 directions: J² residual {worst_j:.1e}, |Ω′∧Ω″| ≥ {min_vol:.2}, round trip {worst_trip:.1e}, |det M| ≥ {min_det:.1e}, orientation reversed"
    ))
}

fn finite_differences() -> Outcome {
    let mut r = random::rng(109);
    let mut worst_linear = 0.0f64;
    for _ in 0..20 {
        let p = random::graphical_pair(&mut r);
        let m = *graph_bilinear_form(&SLagPlane::standard(), &p.theta.plane())
            .map_err(|e| e.to_string())?
            .matrix();
        let field = SelfDualFieldSample::from_fn(0.05, 1, |x| {
            let y = m * Vector3::new(x[1], x[2], x[3]);
            [y[0], y[1], y[2]]
        })
        .map_err(|e| e.to_string())?;
        let rep = selfdual_graph_bform(&field);
        let scale = m.abs().max().max(1.0);
        worst_linear = worst_linear.max(rep.symmetry_residual / scale).max(rep.trace_residual / scale);
    }
    ensure(worst_linear < 1e-9, format!("linear model residual {worst_linear:e}"))?;

    let open = selfdual_graph_bform(&SelfDualFieldSample::from_fn(0.1, 1, |x| [x[2], 0.0, 0.0]).map_err(|e| e.to_string())?);
    ensure(open.flagged && open.symmetry_residual > 0.5, format!("non-closed residual {}", open.symmetry_residual))?;

    // gradient of ½xᵀBx + c·(x₁x₂³ + x₂x₃³ + x₃x₁³)
    let m = Matrix3::from_diagonal(&Vector3::new(-4.0 / 3.0, 0.5, 0.5));
    let c = 0.7;
    let grad = |x: [f64; 4]| {
        let (a, b, d) = (x[1], x[2], x[3]);
        let y = m * Vector3::new(a, b, d);
        [
            y[0] + c * (b.powi(3) + 3.0 * d * a * a),
            y[1] + c * (3.0 * a * b * b + d.powi(3)),
            y[2] + c * (3.0 * b * d * d + a.powi(3)),
        ]
    };
    let residuals = |h: f64| -> Result<(f64, f64), String> {
        let rep = selfdual_graph_bform(&SelfDualFieldSample::from_fn(h, 1, grad).map_err(|e| e.to_string())?);
        Ok(((rep.raw - m).abs().max(), rep.symmetry_residual))
    };
    let mut orders = Vec::new();
    for h in [0.08, 0.04, 0.02] {
        let (e1, s1) = residuals(h)?;
        let (e2, s2) = residuals(h / 2.0)?;
        let oe = observed_order(e1, e2);
        let os = observed_order(s1, s2);
        ensure(oe >= 1.9 && os >= 1.9, format!("orders {oe:.3} {os:.3} at h = {h}"))?;
        orders.push(oe.min(os));
    }
    Ok(format!(
        "linear residual {worst_linear:.1e}, non-closed residual {:.2}, observed orders {:?}",
        open.symmetry_residual,
        orders.iter().map(|o| (o * 1000.0).round() / 1000.0).collect::<Vec<_>>()
    ))
}

fn descriptor_cases() -> Outcome {
    let d = |mu: &[i64]| {
        connected_sum_descriptor(&ConnectedSumDescriptor::new(
            mu.iter().map(|x| Z2::from_i64(*x).unwrap()).collect(),
        ))
        .unwrap()
    };
    let a = d(&[1]);
    ensure(a.canonical == "X+ # X- # (S2xS2)" && a.wall.is_none(), format!("{a:?}"))?;
    let b = d(&[1, -1]);
    ensure(
        b.canonical == "X+ # X- # (S2xS2) # (CP2#CP2bar) # (S1xS3)"
            && b.wall.as_deref() == Some("X+ # X- # 2(CP2#CP2bar) # (S1xS3)"),
        format!("{b:?}"),
    )?;
    let c = d(&[-1, -1, -1]);
    ensure(
        c.canonical == "X+ # X- # 3(CP2#CP2bar) # 2(S1xS3)" && c.wall.as_deref() == Some(c.canonical.as_str()),
        format!("{c:?}"),
    )?;
    let mut r = random::rng(110);
    for _ in 0..1000 {
        let k = r.random_range(1..10usize);
        let mu: Vec<i64> = (0..k).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect();
        ensure(d(&mu).wall.is_some() == mu.contains(&-1), format!("wall form for {mu:?}"))?;
    }
    Ok("three cases exact; wall form iff some μ = −1 on 1000 random lists".into())
}

fn alpha_witness() -> Outcome {
    let d = |a: f64, b: f64, c: f64| complexify(&Matrix3::from_diagonal(&Vector3::new(a, b, c)));
    ensure(alpha_curve(FRAC_PI_2) == d(1.0, -1.0, -1.0), "α̃(π/2)")?;
    ensure(alpha_curve(-FRAC_PI_2) == d(-1.0, 1.0, -1.0), "α̃(−π/2)")?;
    let mut r = random::rng(111);
    let v0 = SLagPlane::standard();
    let mut checked = 0;
    for i in 0..20 {
        let stratum = if i % 2 == 0 { Stratum::Generic } else { Stratum::LowPair };
        let theta: AngleVector = random::angle_vector_in(&mut r, 1 + (i % 4 >= 2) as u8, stratum);
        let vt = theta.plane();
        let degenerate = (theta.theta()[0] - theta.theta()[1]).abs() < 1e-12;
        for k in 0..=100 {
            let phi = -FRAC_PI_2 + PI * k as f64 / 100.0;
            let a: CMat3 = alpha_curve(phi);
            ensure((a.determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-12, format!("det at φ = {phi}"))?;
            let expect = degenerate || k == 0 || k == 100;
            ensure(
                fixes_pair(&a, &v0, &vt, 1e-8) == expect,
                format!("fixed-point criterion at θ = {:?}, φ = {phi}", theta.theta()),
            )?;
            checked += 1;
        }
    }
    Ok(format!("endpoints exact; {checked} (θ, φ) checks"))
}

fn verify_budget() -> Outcome {
    let start = Instant::now();
    let rep = verify_suites("all", 100, 0, &Tolerances::default()).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    ensure(rep.passed, "a suite failed")?;
    ensure(t < Duration::from_secs(60), format!("took {t:?}"))?;
    Ok(format!("verify all at 100 trials passed in {:.2} s", t.as_secs_f64()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("1 G2 identities", g2_identities),
        ("2 special iff integral trace", special_iff_integral_trace),
        ("3 normal form round trip", normal_form_round_trip),
        ("4 stabilizer agreement", stabilizer_agreement),
        ("5 tr = det law", trace_det_law),
        ("6 eta models", eta_models),
        ("7 mu parity", mu_parities),
        ("8 coassociative suite", coassociative_suite),
        ("9 finite differences", finite_differences),
        ("10 connected sum descriptor", descriptor_cases),
        ("11 alpha witness", alpha_witness),
        ("12 verify all under 60 s", verify_budget),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, f) in criteria {
        if !filter.is_empty() && !filter.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        match result {
            Ok(msg) => println!("PASS criterion {name}: {msg}"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
