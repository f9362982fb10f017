//! Randomized invariant suites, one per module, with per-check trial counts
//! and worst residuals.
//!
//! Each suite draws from its own stream derived from the seed, so the result
//! of a suite does not depend on which other suites were selected.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{contract, cross, hodge_star, phi0, phi0_eval, wedge, ImOctonion, Octonion};
use crate::g2::{
    coassoc_from_slag, is_coassociative, normal_slag_pair, normal_structure, one_form, pairing_iso,
    pairing_orientation, selfdual_graph_bform, SelfDualFieldSample,
};
use crate::linalg::{loop_parity, symmetric_unitary_diag, CMat3, CVec3, RotationMatrix};
use crate::loops::{
    self, connected_sum_descriptor, eta_invariant, generate_model_loop, mu_parity, perturb_loop,
    refine_loop, ConnectedSumDescriptor, ModelKind, REFLECTION,
};
use crate::random::{self, Stratum};
use crate::slag::{
    alpha_curve, angle_involution, characteristic_angles, classify_stabilizer, fixes_pair,
    graph_bilinear_form, graph_over, normal_form, plane_from_angles, project_trace_det,
    stabilizer_dimension_numeric, AngleVector, SLagPlane, SymForm3,
};
use crate::tol::Tolerances;
use crate::Z2;

pub const SUITES: [&str; 5] = [
    "algebra-core",
    "unitary-linalg",
    "slag-planes",
    "g2-circle",
    "loops-invariants",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VerifyError {
    #[error("unknown suite {0:?}; expected one of {SUITES:?} or \"all\"")]
    UnknownSuite(String),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest residual seen; `null` for checks that only count agreements.
    pub worst_residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckReport>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub filter: String,
    pub trials: usize,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub suites: Vec<SuiteReport>,
    pub passed: bool,
}

struct Check {
    name: &'static str,
    tolerance: Option<f64>,
    trials: usize,
    failures: usize,
    worst: f64,
}

impl Check {
    fn residual(name: &'static str, tolerance: f64) -> Self {
        Check {
            name,
            tolerance: Some(tolerance),
            trials: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    fn agreement(name: &'static str) -> Self {
        Check {
            name,
            tolerance: None,
            trials: 0,
            failures: 0,
            worst: 0.0,
        }
    }

    fn record(&mut self, r: f64) {
        self.trials += 1;
        if r.is_nan() || r >= self.tolerance.unwrap_or(f64::INFINITY) {
            self.failures += 1;
        }
        if r.is_nan() || r > self.worst {
            self.worst = r;
        }
    }

    fn agree(&mut self, ok: bool) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
        }
    }

    fn finish(self) -> CheckReport {
        CheckReport {
            name: self.name.into(),
            trials: self.trials,
            failures: self.failures,
            worst_residual: self.tolerance.map(|_| self.worst),
            tolerance: self.tolerance,
            passed: self.failures == 0 && self.trials > 0,
        }
    }
}

fn suite(name: &str, checks: Vec<Check>) -> SuiteReport {
    let checks: Vec<CheckReport> = checks.into_iter().map(Check::finish).collect();
    SuiteReport {
        suite: name.into(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn stream(seed: u64, index: usize) -> ChaCha8Rng {
    random::rng(seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index as u64 + 1)))
}

pub fn verify_suites(filter: &str, trials: usize, seed: u64, tol: &Tolerances) -> Result<VerifyReport, VerifyError> {
    let selected: Vec<usize> = if filter == "all" {
        (0..SUITES.len()).collect()
    } else {
        vec![SUITES
            .iter()
            .position(|s| *s == filter)
            .ok_or_else(|| VerifyError::UnknownSuite(filter.into()))?]
    };
    let trials = trials.max(1);
    let suites: Vec<SuiteReport> = selected
        .into_iter()
        .map(|i| {
            let mut r = stream(seed, i);
            match i {
                0 => algebra_suite(&mut r, trials, tol),
                1 => linalg_suite(&mut r, trials),
                2 => slag_suite(&mut r, trials, tol),
                3 => g2_suite(&mut r, trials, tol),
                _ => loops_suite(&mut r, trials, seed),
            }
        })
        .collect();
    Ok(VerifyReport {
        filter: filter.into(),
        trials,
        seed,
        tolerances: *tol,
        passed: suites.iter().all(|s| s.passed),
        suites,
    })
}

fn normal(r: &mut impl Rng) -> f64 {
    r.sample(StandardNormal)
}

fn algebra_suite(r: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteReport {
    let mut phi_cross = Check::residual("phi0_equals_cross_inner", tol.algebra);
    let mut double = Check::residual("double_cross_is_minus_identity", tol.algebra);
    let mut contracted = Check::residual("phi0_of_cross_is_minus_inner", tol.algebra);
    let mut norm = Check::residual("norm_is_multiplicative", tol.algebra);
    let mut nondeg = Check::residual("contraction_is_nondegenerate", tol.algebra);
    let phi = phi0();
    for _ in 0..trials {
        let x = random::im_octonion(r);
        let y = random::im_octonion(r);
        let z = random::im_octonion(r);
        let scale = x.norm() * y.norm() * z.norm();
        let p = phi.eval(&[x, y, z]).unwrap();
        phi_cross.record((p - cross(&x, &y).dot(&z)).abs() / scale.max(1.0));

        let u = x.normalized();
        let w = y.axpy(-y.dot(&u), &u).normalized();
        double.record((cross(&u, &cross(&u, &w)) + w).norm());
        contracted.record((phi0_eval(&u, &cross(&u, &w), &z) + w.dot(&z)).abs() / z.norm().max(1.0));

        let a = Octonion(std::array::from_fn(|_| normal(r)));
        let b = Octonion(std::array::from_fn(|_| normal(r)));
        norm.record(((a * b).norm() - a.norm() * b.norm()).abs() / (a.norm() * b.norm()).max(1.0));

        // ι_uφ₀ for unit u is a Kähler form on u⊥ with three unit terms.
        let omega = contract(&phi, &u).unwrap();
        nondeg.record((omega.norm() * omega.norm() - 3.0).abs());
    }
    suite("algebra-core", vec![phi_cross, double, contracted, norm, nondeg])
}

fn random_rotation_loop(r: &mut impl Rng, n: usize) -> (Box<dyn Fn(f64) -> RotationMatrix>, Z2) {
    let twists = r.random_range(0..3i32);
    let g = random::so3(r);
    let a = Vector3::from_fn(|_, _| normal(r)).normalize();
    let b = Vector3::from_fn(|_, _| normal(r)).normalize();
    let wiggle = 0.4 * r.random::<f64>();
    let _ = n;
    let path = move |t: f64| {
        g.compose(&RotationMatrix::about_axis(&a, TAU * twists as f64 * t))
            .compose(&RotationMatrix::about_axis(&b, wiggle * (TAU * t).sin()))
    };
    let parity = if twists % 2 == 0 { Z2::Plus } else { Z2::Minus };
    (Box::new(path), parity)
}

fn linalg_suite(r: &mut ChaCha8Rng, trials: usize) -> SuiteReport {
    let mut sud = Check::residual("symmetric_unitary_round_trip", 1e-9);
    let mut lift = Check::agreement("lift_parity_matches_twists");
    let mut refine = Check::agreement("lift_parity_refinement_invariant");
    let mut conj = Check::agreement("lift_parity_conjugation_invariant");
    for t in 0..trials {
        let o = *random::so3(r).matrix();
        let mut alpha: [f64; 3] = std::array::from_fn(|_| r.random::<f64>() * TAU);
        if t % 2 == 1 {
            alpha[1] = alpha[0];
        }
        if t % 4 == 3 {
            alpha[2] = alpha[0];
        }
        let oc = o.map(|x| Complex64::new(x, 0.0));
        let s = oc * CMat3::from_diagonal(&CVec3::from(alpha.map(|a| Complex64::from_polar(1.0, a)))) * oc.transpose();
        match symmetric_unitary_diag(&s) {
            Ok(d) => sud.record((d.reconstruct() - s).norm()),
            Err(_) => sud.record(f64::NAN),
        }

        let n = 24;
        let (path, expect) = random_rotation_loop(r, n);
        let coarse: Vec<RotationMatrix> = (0..n).map(|i| path(i as f64 / n as f64)).collect();
        let fine: Vec<RotationMatrix> = (0..2 * n).map(|i| path(i as f64 / (2 * n) as f64)).collect();
        let g = random::so3(r);
        let conjugated: Vec<RotationMatrix> = coarse.iter().map(|x| g.compose(x).compose(&g.inverse())).collect();
        let p = loop_parity(&coarse).ok();
        lift.agree(p == Some(expect));
        refine.agree(p.is_some() && loop_parity(&fine).ok() == p);
        conj.agree(p.is_some() && loop_parity(&conjugated).ok() == p);
    }
    suite("unitary-linalg", vec![sud, lift, refine, conj])
}

fn theta_error(a: &AngleVector, b: &AngleVector) -> f64 {
    a.theta()
        .iter()
        .zip(b.theta())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn slag_suite(r: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteReport {
    let mut angles = Check::residual("normal_form_recovers_angles", 1e-8);
    let mut recon = Check::residual("normal_form_reconstructs_pair", 1e-8);
    let mut swap = Check::residual("swap_law", 1e-8);
    let mut degenerate = Check::residual("degenerate_strata_round_trip", 1e-7);
    let mut stab = Check::agreement("stabilizer_class_matches_numeric_dimension");
    let mut graph = Check::residual("graph_form_inverts_graph_over", 1e-9);
    let mut tan = Check::residual("trace_equals_det", 1e-9);
    let mut fixed = Check::agreement("alpha_fixed_point_criterion");
    for t in 0..trials {
        let theta = random::angle_vector(r);
        let pair = random::pair_with_angles(r, theta);
        match normal_form(&pair.v, &pair.vp) {
            Ok(nf) => {
                angles.record(theta_error(&nf.theta, &pair.theta));
                recon.record(nf.reconstruction_error(&pair.v, &pair.vp));
            }
            Err(_) => {
                angles.record(f64::NAN);
                recon.record(f64::NAN);
            }
        }
        let swapped = characteristic_angles(&pair.vp, &pair.v)
            .map(|s| theta_error(&s, &angle_involution(&pair.theta)))
            .unwrap_or(f64::NAN);
        swap.record(swapped);

        let stratum = [Stratum::LowPair, Stratum::HighPair][t % 2];
        let dp = random::transverse_pair(r, stratum);
        degenerate.record(
            normal_form(&dp.v, &dp.vp)
                .map(|nf| theta_error(&nf.theta, &dp.theta).max(nf.reconstruction_error(&dp.v, &dp.vp)))
                .unwrap_or(f64::NAN),
        );

        for s in Stratum::ALL {
            let sp = random::transverse_pair(r, s);
            let class = classify_stabilizer(&sp.theta, tol.gap);
            let numeric = stabilizer_dimension_numeric(&sp.v, &sp.vp).ok();
            stab.agree(numeric == Some(class.expected_dimension()));
        }

        let raw = Matrix3::from_fn(|_, _| normal(r));
        if let Some(b) = project_trace_det(&((raw + raw.transpose()) * 0.5)) {
            if b.norm() < 1e3 {
                let v = random::slag_plane(r);
                let b = SymForm3::symmetrized(&b);
                let back = graph_bilinear_form(&v, &graph_over(&v, &b))
                    .map(|x| (x.matrix() - b.matrix()).norm() / b.matrix().norm().max(1.0))
                    .unwrap_or(f64::NAN);
                graph.record(back);
            }
        }

        let gp = random::graphical_pair(r);
        tan.record(
            graph_bilinear_form(&gp.v, &gp.vp)
                .map(|b| b.trace_det_residual() / (1.0 + b.matrix().norm().powi(3)))
                .unwrap_or(f64::NAN),
        );

        let theta = if t % 2 == 0 {
            random::angle_vector_in(r, 1 + (t % 4 == 0) as u8, Stratum::Generic)
        } else {
            random::angle_vector_in(r, 1 + (t % 4 == 1) as u8, Stratum::LowPair)
        };
        let generic = t % 2 == 0;
        let v0 = SLagPlane::standard();
        let vt = plane_from_angles(theta.theta());
        let phi = if t % 3 == 0 {
            [FRAC_PI_2, -FRAC_PI_2][t % 2]
        } else {
            loop {
                let p = (2.0 * r.random::<f64>() - 1.0) * PI;
                if (p.abs() - FRAC_PI_2).abs() > 1e-3 {
                    break p;
                }
            }
        };
        let fixes = fixes_pair(&alpha_curve(phi), &v0, &vt, 1e-8);
        let expect = !generic || phi.abs() == FRAC_PI_2;
        fixed.agree(fixes == expect && (alpha_curve(phi).determinant() - 1.0).norm() < 1e-12);
    }
    suite(
        "slag-planes",
        vec![angles, recon, swap, degenerate, stab, graph, tan, fixed],
    )
}

fn g2_suite(r: &mut ChaCha8Rng, trials: usize, tol: &Tolerances) -> SuiteReport {
    let mut jsq = Check::residual("j_squares_to_minus_identity", tol.algebra);
    let mut herm = Check::residual("hermitian_metric_and_kahler_form", tol.algebra);
    let mut pull = Check::residual("pullbacks_of_standard_forms", tol.algebra);
    let mut split = Check::residual("splitting_identity", tol.algebra);
    let mut dual = Check::residual("duality_identity", tol.algebra);
    let mut vol = Check::agreement("top_form_nonzero");
    let mut coassoc = Check::agreement("coassoc_from_slag_is_coassociative");
    let mut trip = Check::residual("normal_slag_pair_round_trip", tol.algebra);
    let mut pairing = Check::agreement("pairing_reverses_orientation");
    let mut fd = Check::residual("finite_difference_graph_model", 1e-6);
    let trials = trials.min(1000);
    let phi = phi0();
    for t in 0..trials {
        let u = if t == 0 { ImOctonion::basis(5) } else { random::unit_im_octonion(r) };
        let Ok(ns) = normal_structure(&u) else {
            jsq.record(f64::NAN);
            continue;
        };
        let perp = |x: ImOctonion| x.axpy(-x.dot(&u), &u);
        let v = perp(random::im_octonion(r));
        let w = perp(random::im_octonion(r));
        jsq.record((ns.j(&ns.j(&v)) + v).norm() / v.norm());
        let h = ns.hermitian(&v, &w) - ns.hermitian(&w, &v).conj();
        herm.record(h.norm().max((ns.omega_eval(&v, &w) - ns.j(&v).dot(&w)).abs()) / (v.norm() * w.norm()));

        let (omega0, re, im) = ns.standard_forms();
        pull.record(
            omega0
                .max_abs_diff(&ns.omega)
                .max(im.scale(-1.0).max_abs_diff(&ns.omega_prime))
                .max(re.max_abs_diff(&ns.omega_double_prime)),
        );
        let ustar = one_form(&u);
        split.record(wedge(&ustar, &ns.omega).unwrap().add(&ns.omega_prime).max_abs_diff(&phi));
        dual.record(hodge_star(&ns.omega_prime).max_abs_diff(&wedge(&ustar, &ns.omega_double_prime).unwrap()));
        vol.agree(ns.volume_ratio().abs() > 0.1);

        let pair = random::transverse_pair(r, Stratum::Generic);
        match (coassoc_from_slag(&ns, &pair.v), coassoc_from_slag(&ns, &pair.vp)) {
            (Ok(pp), Ok(pm)) => {
                coassoc.agree(
                    is_coassociative(pp.span()).unwrap_or(false) && is_coassociative(pm.span()).unwrap_or(false),
                );
                trip.record(
                    normal_slag_pair(&ns, &pp, &pm)
                        .map(|(a, b)| a.distance(&pair.v).max(b.distance(&pair.vp)))
                        .unwrap_or(f64::NAN),
                );
            }
            _ => {
                coassoc.agree(false);
                trip.record(f64::NAN);
            }
        }
        let o = pairing_iso(&ns, &pair.v, &pair.vp)
            .ok()
            .and_then(|m| pairing_orientation(&m, &pair.v, &pair.vp).ok());
        let expect = if pair.theta.trace_class() == 2 { -1.0 } else { 1.0 };
        pairing.agree(o.is_some_and(|o| o.reverses() && o.calibrated_sign == expect && o.det.abs() > 1e-9));

        if t < 50 {
            let gp = random::graphical_pair(r);
            let b = graph_bilinear_form(&SLagPlane::standard(), &gp.theta.plane()).map(|b| *b.matrix());
            let res = b
                .ok()
                .and_then(|m| {
                    let field = SelfDualFieldSample::from_fn(0.05, 1, |x| {
                        let y = m * Vector3::new(x[1], x[2], x[3]);
                        [y[0], y[1], y[2]]
                    })
                    .ok()?;
                    let rep = selfdual_graph_bform(&field);
                    Some(
                        ((rep.b.matrix() - m).norm() / m.norm().max(1.0))
                            .max(rep.symmetry_residual / m.norm().max(1.0)),
                    )
                })
                .unwrap_or(f64::NAN);
            fd.record(res);
        }
    }
    suite(
        "g2-circle",
        vec![jsq, herm, pull, split, dual, vol, coassoc, trip, pairing, fd],
    )
}

fn loops_suite(r: &mut ChaCha8Rng, trials: usize, seed: u64) -> SuiteReport {
    let mut models = Check::agreement("model_loops_have_expected_eta");
    let mut perturbed = Check::agreement("eta_invariant_under_perturbation");
    let mut refined = Check::agreement("eta_invariant_under_refinement");
    let mut swapped = Check::agreement("eta_invariant_under_swap");
    let mut twists = Check::agreement("mu_counts_twists_mod_two");
    let mut mu_refine = Check::agreement("mu_invariant_under_refinement");
    let mut mu_conj = Check::agreement("mu_invariant_under_conjugation");
    let mut mu_concat = Check::agreement("mu_multiplicative_under_concatenation");
    let mut wall = Check::agreement("wall_form_iff_some_minus");
    let mut perm = Check::agreement("descriptor_permutation_invariant");

    let base: Vec<(ModelKind, Z2, _)> = [(ModelKind::Trivial, Z2::Plus), (ModelKind::Moebius, Z2::Minus)]
        .into_iter()
        .map(|(k, e)| (k, e, generate_model_loop(k, 64, 0.5).expect("model loop")))
        .collect();
    for (_, e, l) in &base {
        models.agree(eta_invariant(l).ok() == Some(*e));
        refined.agree(refine_loop(l).ok().and_then(|x| eta_invariant(&x).ok()) == Some(*e));
        swapped.agree(eta_invariant(&l.swapped()).ok() == Some(*e));
    }
    let n_perturb = trials.min(100);
    for s in 0..n_perturb as u64 {
        for (_, e, l) in &base {
            let p = perturb_loop(l, seed.wrapping_add(s), 0.05);
            perturbed.agree(p.ok().and_then(|x| eta_invariant(&x).ok()) == Some(*e));
        }
    }

    let iso = -Matrix3::identity();
    for t in 0..trials.min(50) {
        let n = 32;
        let k: i32 = r.random_range(-2..=2);
        let fp = random::framing_loop(r, k, n).expect("framing loop");
        let fm0 = loops::framing_loop(&(REFLECTION * iso * fp.samples()[0]), &Vector3::x(), 0, n).expect("framing");
        let isos = vec![iso; n];
        let expect = if k % 2 == 0 { Z2::Plus } else { Z2::Minus };
        let got = mu_parity(&fp, &fm0, &isos).ok();
        twists.agree(got == Some(expect));

        let axis = Vector3::from_fn(|_, _| normal(r)).normalize();
        let g = *random::so3(r).matrix();
        let fine_p = loops::framing_loop(&g, &axis, k, 2 * n).unwrap();
        let coarse_p = loops::framing_loop(&g, &axis, k, n).unwrap();
        let minus = |m: usize| loops::framing_loop(&(REFLECTION * iso * g), &Vector3::z(), 0, m).unwrap();
        let coarse = mu_parity(&coarse_p, &minus(n), &isos).ok();
        let fine = mu_parity(&fine_p, &minus(2 * n), &vec![iso; 2 * n]).ok();
        mu_refine.agree(coarse.is_some() && coarse == fine);

        let c = loops::comparison_loop(&coarse_p, &minus(n), &isos).unwrap();
        let h = random::so3(r);
        let conj: Vec<RotationMatrix> = c.iter().map(|x| h.compose(x).compose(&h.inverse())).collect();
        mu_conj.agree(coarse.is_some() && loop_parity(&conj).ok() == coarse);

        let k2: i32 = r.random_range(-2..=2);
        let second = loops::framing_loop(&g, &axis, k2, n).unwrap();
        let joined: Vec<Matrix3<f64>> = coarse_p.samples().iter().chain(second.samples()).copied().collect();
        let joined = loops::FramingLoop::new(0, coarse_p.delta.max(second.delta), joined).unwrap();
        let p2 = mu_parity(&second, &minus(n), &isos).ok();
        let pj = mu_parity(&joined, &minus(2 * n), &vec![iso; 2 * n]).ok();
        mu_concat.agree(matches!((coarse, p2, pj), (Some(a), Some(b), Some(j)) if a * b == j));
        let _ = t;
    }

    for _ in 0..trials.min(200) {
        let k = r.random_range(1..=6);
        let mut mu: Vec<Z2> = (0..k).map(|_| if r.random::<bool>() { Z2::Plus } else { Z2::Minus }).collect();
        let a = connected_sum_descriptor(&ConnectedSumDescriptor::new(mu.clone()));
        mu.shuffle(r);
        let b = connected_sum_descriptor(&ConnectedSumDescriptor::new(mu.clone()));
        let any_minus = mu.contains(&Z2::Minus);
        wall.agree(a.as_ref().is_ok_and(|a| a.wall.is_some() == any_minus));
        perm.agree(a.is_ok() && a == b);
    }
    suite(
        "loops-invariants",
        vec![
            models, perturbed, refined, swapped, twists, mu_refine, mu_conj, mu_concat, wall, perm,
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_at_small_trials() {
        let rep = verify_suites("all", 20, 1, &Tolerances::default()).unwrap();
        for s in &rep.suites {
            for c in &s.checks {
                assert!(c.passed, "{} / {}: {:?}", s.suite, c.name, c);
            }
        }
        assert!(rep.passed);
    }

    #[test]
    fn suites_are_independent_of_selection() {
        let all = verify_suites("all", 5, 3, &Tolerances::default()).unwrap();
        let one = verify_suites("slag-planes", 5, 3, &Tolerances::default()).unwrap();
        assert_eq!(all.suites[2], one.suites[0]);
        assert!(matches!(
            verify_suites("nope", 5, 3, &Tolerances::default()),
            Err(VerifyError::UnknownSuite(_))
        ));
    }
}
