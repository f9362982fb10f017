use std::f64::consts::PI;

use nalgebra::{Matrix3, Matrix6, Vector3};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::pair_loop::{validate_pair_loop, PairLoop, PairSample};
use super::LoopError;
use crate::linalg::{complexify, real_polar, CMat3, CVec3};
use crate::random;
use crate::slag::{
    graph_bilinear_form, graph_over, negative_eigenline, project_trace_det, realify, RegionClass,
    SLagPlane, SymForm3,
};
use crate::Z2;

/// Consecutive eigenlines with `|⟨ℓ, ℓ′⟩|` below this are ambiguous.
pub const AMBIGUITY: f64 = 0.1;
const EIGEN_MARGIN: f64 = 1e-12;

/// The negative eigenline of the sample as a unit vector of `V ⊂ ℂ³`.
///
/// For `S_2π` samples `B` has signature `(+,−,−)` and the line is taken from
/// `−B`; under `(V, V′) ↦ (V′, V)` this is the line that corresponds to the
/// negative eigenline of the swapped pair.
fn ambient_eigenline(s: &PairSample, region: RegionClass) -> Result<CVec3, LoopError> {
    let b = graph_bilinear_form(&s.v, &s.vp)?;
    let b = if region == RegionClass::S2PiClose { -b } else { b };
    let l = negative_eigenline(&b, EIGEN_MARGIN)?;
    Ok(s.v.frame() * complexify_vec(&l))
}

fn complexify_vec(v: &Vector3<f64>) -> CVec3 {
    v.map(|x| Complex64::new(x, 0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaReport {
    pub component: u64,
    pub eta: Z2,
    /// `⟨ℓ_i, ℓ_{i+1}⟩` for every cyclic step; the last entry is the closure.
    pub inner_products: Vec<f64>,
    pub closure_inner: f64,
    pub min_abs_inner: f64,
    pub region: RegionClass,
}

/// η with per-step eigenline overlaps.
///
/// Eigenlines are compared as vectors of the ambient ℂ³ = ℝ⁶, which is the
/// same as comparing their coordinates after aligning each frame of `V` with
/// the previous one.
pub fn eta_report(l: &PairLoop) -> Result<EtaReport, LoopError> {
    let diag = validate_pair_loop(l)?;
    let lines = l
        .samples
        .iter()
        .map(|s| ambient_eigenline(s, diag.region))
        .collect::<Result<Vec<_>, _>>()?;
    let n = lines.len();
    let mut inner = Vec::with_capacity(n);
    for i in 0..n {
        let next = (i + 1) % n;
        let d = lines[i].dotc(&lines[next]).re;
        if d.abs() < AMBIGUITY {
            return Err(LoopError::EigenlineAmbiguous {
                index: i,
                next,
                inner: d.abs(),
            });
        }
        inner.push(d);
    }
    let eta = inner.iter().map(|d| Z2::from_sign(*d)).product();
    Ok(EtaReport {
        component: l.component,
        eta,
        closure_inner: *inner.last().unwrap(),
        min_abs_inner: inner.iter().map(|d| d.abs()).fold(f64::INFINITY, f64::min),
        inner_products: inner,
        region: diag.region,
    })
}

pub fn eta_invariant(l: &PairLoop) -> Result<Z2, LoopError> {
    eta_report(l).map(|r| r.eta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Trivial,
    Moebius,
}

/// Continuity budget of the model loops is `MODEL_DELTA / N`. The moebius
/// model steps by about `8.7 / N`; the trivial model is constant.
pub const MODEL_DELTA: f64 = 16.0;

/// `V = V₀` and `V′(t) = graph of B(t)` with `B = λ` on `L(t)` and `λ′` on
/// `L(t)⊥`, `λ = 2λ′/(λ′² − 1)`. `L(t)` is the first axis (trivial) or
/// `cos(πt)e₁ + sin(πt)e₂` (moebius).
pub fn generate_model_loop(kind: ModelKind, n: usize, lambda_prime: f64) -> Result<PairLoop, LoopError> {
    if !(lambda_prime > 0.0 && lambda_prime < 1.0) {
        return Err(LoopError::BadLambda(lambda_prime));
    }
    if n < 8 {
        return Err(LoopError::TooFewSamples(n));
    }
    let lp = lambda_prime;
    let lambda = 2.0 * lp / (lp * lp - 1.0);
    let v = SLagPlane::standard();
    let samples: Vec<PairSample> = (0..n)
        .map(|i| {
            let t = i as f64 / n as f64;
            let axis = match kind {
                ModelKind::Trivial => Vector3::x(),
                ModelKind::Moebius => Vector3::new((PI * t).cos(), (PI * t).sin(), 0.0),
            };
            let b = Matrix3::identity() * lp + axis * axis.transpose() * (lambda - lp);
            PairSample {
                v,
                vp: graph_over(&v, &SymForm3::symmetrized(&b)),
            }
        })
        .collect();
    PairLoop::new(0, MODEL_DELTA / n as f64, samples)
}

const HARMONICS: usize = 2;

/// A random smooth 1-periodic family of symmetric 6×6 matrices of norm ≲ 1.
struct AmbientField {
    cos: Vec<Matrix6<f64>>,
    sin: Vec<Matrix6<f64>>,
}

impl AmbientField {
    fn draw(r: &mut impl Rng) -> Self {
        let mut sym = || {
            let m = Matrix6::<f64>::from_fn(|_, _| r.sample(StandardNormal));
            let s = m + m.transpose();
            s / (s.norm() * (2 * HARMONICS + 1) as f64)
        };
        AmbientField {
            cos: (0..=HARMONICS).map(|_| sym()).collect(),
            sin: (0..=HARMONICS).map(|_| sym()).collect(),
        }
    }

    fn at(&self, t: f64) -> Matrix6<f64> {
        let mut e = Matrix6::zeros();
        for k in 0..=HARMONICS {
            let w = 2.0 * PI * k as f64 * t;
            e += self.cos[k] * w.cos() + self.sin[k] * w.sin();
        }
        e
    }
}

const PERTURB_ATTEMPTS: usize = 8;

/// Replaces each `V′_i` by the graph over `V_i` of `B_i + εE(t_i)`, moved
/// back onto `tr = det`. `E` is the restriction to `V_i` of a smooth random
/// loop of symmetric forms on ℝ⁶, so it is continuous along the loop
/// regardless of the frames. The region and class of the loop are kept.
pub fn perturb_loop(l: &PairLoop, seed: u64, epsilon: f64) -> Result<PairLoop, LoopError> {
    if epsilon == 0.0 {
        return Ok(l.clone());
    }
    let base = validate_pair_loop(l)?;
    let forms = l
        .samples
        .iter()
        .map(|s| graph_bilinear_form(&s.v, &s.vp))
        .collect::<Result<Vec<_>, _>>()?;
    let n = l.len();
    let mut r = random::rng(seed);
    'attempt: for _ in 0..PERTURB_ATTEMPTS {
        let field = AmbientField::draw(&mut r);
        let mut samples = Vec::with_capacity(n);
        for (i, (s, b)) in l.samples.iter().zip(&forms).enumerate() {
            let f = realify(s.v.frame());
            let e = f.transpose() * field.at(i as f64 / n as f64) * f;
            let Some(bp) = project_trace_det(&(b.matrix() + e * epsilon)) else {
                continue 'attempt;
            };
            samples.push(PairSample {
                v: s.v,
                vp: graph_over(&s.v, &SymForm3::symmetrized(&bp)),
            });
        }
        let out = PairLoop {
            samples,
            ..l.clone()
        };
        match validate_pair_loop(&out) {
            Ok(d) if d.region == base.region => return Ok(out),
            _ => continue,
        }
    }
    Err(LoopError::PerturbationLeftRegion(PERTURB_ATTEMPTS))
}

/// Unitary frame of `u` rotated by the orthogonal polar factor of
/// `Re(U†U_prev)`, so that it is as close as possible to `U_prev`.
fn aligned(u: &CMat3, prev: &CMat3) -> CMat3 {
    let c = (u.adjoint() * prev).map(|z| z.re);
    u * complexify(&real_polar(&c))
}

/// A special Lagrangian plane near the frame midpoint of `a` and `b`.
fn midpoint(a: &SLagPlane, b: &SLagPlane) -> SLagPlane {
    let ua = a.frame();
    let ub = aligned(b.frame(), ua);
    let m = (ua + ub) * Complex64::new(0.5, 0.0);
    let svd = m.svd(true, true);
    let w = svd.u.unwrap() * svd.v_t.unwrap();
    let beta = w.determinant().arg();
    let k = (beta / PI).round();
    SLagPlane::from_frame_unchecked(w * Complex64::from_polar(1.0, -(beta - k * PI) / 3.0))
}

/// Doubles the sampling by inserting a midpoint between every cyclic pair of
/// samples, including the closing one.
pub fn refine_loop(l: &PairLoop) -> Result<PairLoop, LoopError> {
    let n = l.len();
    let mut samples = Vec::with_capacity(2 * n);
    for i in 0..n {
        let (a, b) = (&l.samples[i], &l.samples[(i + 1) % n]);
        samples.push(*a);
        samples.push(PairSample {
            v: midpoint(&a.v, &b.v),
            vp: midpoint(&a.vp, &b.vp),
        });
    }
    let out = PairLoop {
        samples,
        ..l.clone()
    };
    validate_pair_loop(&out).map_err(|e| LoopError::RefinementFailed(e.to_string()))?;
    Ok(out)
}

/// One row of the angle and eigenvalue trajectory of a loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub index: usize,
    pub theta: [f64; 3],
    pub eigenvalues: [f64; 3],
}

pub fn trajectory(l: &PairLoop) -> Result<Vec<TrajectoryRow>, LoopError> {
    l.samples
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let theta = crate::slag::characteristic_angles(&s.v, &s.vp)?.theta();
            let eigenvalues = graph_bilinear_form(&s.v, &s.vp)?.eigenvalues();
            Ok(TrajectoryRow {
                index,
                theta,
                eigenvalues,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn models_have_expected_eta() {
        let t = generate_model_loop(ModelKind::Trivial, 64, 0.5).unwrap();
        let m = generate_model_loop(ModelKind::Moebius, 64, 0.5).unwrap();
        assert_eq!(eta_invariant(&t).unwrap(), Z2::Plus);
        assert_eq!(eta_invariant(&m).unwrap(), Z2::Minus);
        assert_eq!(eta_invariant(&m.swapped()).unwrap(), Z2::Minus);
    }

    #[test]
    fn model_errors() {
        assert!(matches!(
            generate_model_loop(ModelKind::Trivial, 64, 1.0),
            Err(LoopError::BadLambda(_))
        ));
        assert!(matches!(
            generate_model_loop(ModelKind::Trivial, 4, 0.5),
            Err(LoopError::TooFewSamples(4))
        ));
    }

    #[test]
    fn projection_lands_on_constraint() {
        let b = Matrix3::new(0.3, 0.1, 0.0, 0.1, 0.2, 0.05, 0.0, 0.05, -1.0);
        let p = project_trace_det(&b).unwrap();
        assert!((p.trace() - p.determinant()).abs() < 1e-13);
        assert!((p - p.transpose()).norm() < 1e-15);
    }

    #[test]
    fn perturbation_contracts() {
        let m = generate_model_loop(ModelKind::Moebius, 32, 0.5).unwrap();
        assert_eq!(perturb_loop(&m, 3, 0.0).unwrap(), m);
        let p = perturb_loop(&m, 3, 0.05).unwrap();
        assert_eq!(eta_invariant(&p).unwrap(), Z2::Minus);
        assert!(matches!(
            perturb_loop(&m, 3, 50.0),
            Err(LoopError::PerturbationLeftRegion(_))
        ));
    }

    #[test]
    fn refinement_keeps_eta() {
        let m = generate_model_loop(ModelKind::Moebius, 16, 0.5).unwrap();
        let r = refine_loop(&m).unwrap();
        assert_eq!(r.len(), 32);
        assert_eq!(eta_invariant(&r).unwrap(), Z2::Minus);
    }
}
