//! Seeded generators for every input class. All draws go through
//! `ChaCha8Rng`, so a seed fixes every output across platforms.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{Matrix3, UnitQuaternion, Vector3, Vector4};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::ImOctonion;
use crate::linalg::{CMat3, CVec3, RotationMatrix};
use crate::loops::{self, generate_model_loop, FramingLoop, LoopError, ModelKind, PairLoop, PairSample};
use crate::slag::{angle_involution, plane_from_angles, AngleVector, SLagPlane};

/// Minimum spacing between distinct angles produced by the stratum generators.
pub const MIN_GAP: f64 = 0.05;
/// Minimum distance from the walls `θ_j = π/2` for graphical generators.
pub const WALL_MARGIN: f64 = 0.05;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal(r: &mut impl Rng) -> f64 {
    r.sample(StandardNormal)
}

/// Haar-distributed element of SU(3).
pub fn su3(r: &mut impl Rng) -> CMat3 {
    let g = CMat3::from_fn(|_, _| Complex64::new(normal(r), normal(r)));
    let qr = g.qr();
    let (q, rr) = (qr.q(), qr.r());
    let phases = CVec3::from_fn(|i, _| {
        let d = rr[(i, i)];
        d / d.norm()
    });
    let u = q * CMat3::from_diagonal(&phases);
    let det = u.determinant();
    u * Complex64::from_polar(1.0, -det.arg() / 3.0)
}

/// Haar-distributed rotation.
pub fn so3(r: &mut impl Rng) -> RotationMatrix {
    let q = UnitQuaternion::from_quaternion(nalgebra::Quaternion::from(Vector4::from_fn(
        |_, _| normal(r),
    )));
    RotationMatrix::new(q.to_rotation_matrix().into_inner()).expect("quaternion rotation")
}

/// Real orthogonal matrix with determinant `±1`, uniformly in either component.
pub fn o3(r: &mut impl Rng) -> Matrix3<f64> {
    let mut m = *so3(r).matrix();
    if r.random::<bool>() {
        m.column_mut(0).neg_mut();
    }
    m
}

pub fn unit_im_octonion(r: &mut impl Rng) -> ImOctonion {
    ImOctonion(std::array::from_fn(|_| normal(r))).normalized()
}

pub fn im_octonion(r: &mut impl Rng) -> ImOctonion {
    ImOctonion(std::array::from_fn(|_| normal(r)))
}

/// Equal-angle strata: `Δ₀` generic, `θ₁ = θ₂`, `θ₂ = θ₃`, all equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    Generic,
    LowPair,
    HighPair,
    Equal,
}

impl Stratum {
    pub const ALL: [Stratum; 4] = [
        Stratum::Generic,
        Stratum::LowPair,
        Stratum::HighPair,
        Stratum::Equal,
    ];
}

fn uniform(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * r.random::<f64>()
}

/// Angle vector of trace class `m` in the given stratum.
pub fn angle_vector_in(r: &mut impl Rng, m: u8, stratum: Stratum) -> AngleVector {
    let mp = m as f64 * PI;
    let theta = match stratum {
        Stratum::Equal => [mp / 3.0; 3],
        Stratum::LowPair => {
            let lo = (m as f64 - 1.0) * FRAC_PI_2;
            let t = uniform(r, lo + MIN_GAP, mp / 3.0 - MIN_GAP);
            [t, t, mp - 2.0 * t]
        }
        Stratum::HighPair => {
            let t = uniform(r, mp / 3.0 + MIN_GAP, if m == 1 { FRAC_PI_2 } else { PI } - MIN_GAP);
            [mp - 2.0 * t, t, t]
        }
        Stratum::Generic => loop {
            let a = uniform(r, 0.0, PI);
            let b = uniform(r, 0.0, PI);
            let mut t = [a, b, mp - a - b];
            t.sort_by(f64::total_cmp);
            if t[0] > MIN_GAP / 2.0
                && t[2] < PI - MIN_GAP / 2.0
                && t[1] - t[0] > MIN_GAP
                && t[2] - t[1] > MIN_GAP
            {
                break t;
            }
        },
    };
    AngleVector::new(theta).expect("generated angles are admissible")
}

/// Generic angle vector of a random trace class.
pub fn angle_vector(r: &mut impl Rng) -> AngleVector {
    let m = if r.random::<bool>() { 1 } else { 2 };
    angle_vector_in(r, m, Stratum::Generic)
}

/// `θ ∈ (0, π)³` uniformly, with no constraint on the sum.
pub fn raw_angles(r: &mut impl Rng) -> [f64; 3] {
    std::array::from_fn(|_| uniform(r, 0.0, PI))
}

/// `A·V₀` for Haar `A`.
pub fn slag_plane(r: &mut impl Rng) -> SLagPlane {
    SLagPlane::standard().transformed(&su3(r))
}

/// A random frame of the same plane: columns mixed by an element of O(3).
pub fn reframe(r: &mut impl Rng, p: &SLagPlane) -> SLagPlane {
    let o = o3(r).map(|x| Complex64::new(x, 0.0));
    SLagPlane::lagrangian(p.frame() * o).expect("unitary")
}

/// A transverse pair `(A·V₀, A·V_θ)` together with `A` and `θ`.
#[derive(Debug, Clone, Copy)]
pub struct GeneratedPair {
    pub v: SLagPlane,
    pub vp: SLagPlane,
    pub a: CMat3,
    pub theta: AngleVector,
}

pub fn pair_with_angles(r: &mut impl Rng, theta: AngleVector) -> GeneratedPair {
    let a = su3(r);
    GeneratedPair {
        v: reframe(r, &SLagPlane::standard().transformed(&a)),
        vp: reframe(r, &plane_from_angles(theta.theta()).transformed(&a)),
        a,
        theta,
    }
}

pub fn transverse_pair(r: &mut impl Rng, stratum: Stratum) -> GeneratedPair {
    let m = if r.random::<bool>() { 1 } else { 2 };
    let theta = angle_vector_in(r, m, stratum);
    pair_with_angles(r, theta)
}

fn off_walls(t: &AngleVector) -> bool {
    t.theta().iter().all(|x| (x - FRAC_PI_2).abs() > WALL_MARGIN)
}

/// A generic pair with every angle at least [`WALL_MARGIN`] from `π/2`.
pub fn graphical_pair(r: &mut impl Rng) -> GeneratedPair {
    loop {
        let t = angle_vector(r);
        if off_walls(&t) {
            return pair_with_angles(r, t);
        }
    }
}

/// A close graphical pair, in `S_π` or `S_2π` with equal probability.
pub fn close_graphical_pair(r: &mut impl Rng) -> GeneratedPair {
    loop {
        let t = angle_vector_in(r, 1, Stratum::Generic);
        if off_walls(&t) && t.theta()[2] > FRAC_PI_2 {
            let t = if r.random::<bool>() { t } else { angle_involution(&t) };
            return pair_with_angles(r, t);
        }
    }
}

/// A model loop moved by one random element of SU(3).
pub fn pair_loop(r: &mut impl Rng, kind: ModelKind, n: usize, lambda_prime: f64) -> Result<PairLoop, LoopError> {
    let l = generate_model_loop(kind, n, lambda_prime)?;
    let a = su3(r);
    let samples = l
        .samples
        .iter()
        .map(|s| PairSample {
            v: s.v.transformed(&a),
            vp: s.vp.transformed(&a),
        })
        .collect();
    Ok(PairLoop { samples, ..l })
}

/// A framing loop with `twists` full turns about a random axis, starting at
/// a random rotation.
pub fn framing_loop(r: &mut impl Rng, twists: i32, n: usize) -> Result<FramingLoop, LoopError> {
    let base = *so3(r).matrix();
    let axis = unit_vector3(r);
    loops::framing_loop(&base, &axis, twists, n)
}

fn unit_vector3(r: &mut impl Rng) -> Vector3<f64> {
    Vector3::from_fn(|_, _| normal(r)).normalize()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;
    use crate::slag::{classify_stabilizer, StabilizerClass};
    use crate::tol;

    #[test]
    fn su3_is_deterministic_and_special() {
        let a = su3(&mut rng(0));
        let b = su3(&mut rng(0));
        assert_eq!(a, b);
        assert!(unitarity_residual(&a) < 1e-12);
        assert!((a.determinant() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn strata_are_hit() {
        let mut r = rng(7);
        for (s, c) in [
            (Stratum::Generic, StabilizerClass::K4),
            (Stratum::LowPair, StabilizerClass::O2Low),
            (Stratum::HighPair, StabilizerClass::O2High),
            (Stratum::Equal, StabilizerClass::SO3),
        ] {
            for m in [1, 2] {
                for _ in 0..50 {
                    let t = angle_vector_in(&mut r, m, s);
                    assert_eq!(t.trace_class(), m);
                    assert_eq!(classify_stabilizer(&t, tol::GAP), c);
                }
            }
        }
    }

    #[test]
    fn generated_framing_twist_flips_mu() {
        use crate::loops::{mu_parity, REFLECTION};
        let mut r = rng(5);
        let fp = framing_loop(&mut r, 1, 48).unwrap();
        let fp0 = framing_loop(&mut r, 0, 48).unwrap();
        let iso = vec![-Matrix3::identity(); 48];
        let fm = crate::loops::framing_loop(
            &(REFLECTION * -Matrix3::identity() * fp0.samples()[0]),
            &Vector3::x(),
            0,
            48,
        )
        .unwrap();
        assert_eq!(mu_parity(&fp0, &fm, &iso).unwrap(), crate::Z2::Plus);
        assert_eq!(mu_parity(&fp, &fm, &iso).unwrap(), crate::Z2::Minus);
    }

    #[test]
    fn generated_pair_loops_keep_eta() {
        let mut r = rng(6);
        let l = pair_loop(&mut r, ModelKind::Moebius, 64, 0.5).unwrap();
        assert_eq!(crate::loops::eta_invariant(&l).unwrap(), crate::Z2::Minus);
    }
}
