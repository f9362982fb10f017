use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, Matrix3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::plane::{realify, SLagPlane};
use super::SlagError;
use crate::linalg::{complexify, nested, symmetric_unitary_diag, CMat3};
use crate::tol;

/// Sorted characteristic angles `θ₁ ≤ θ₂ ≤ θ₃` in `(0, π)` with
/// `θ₁ + θ₂ + θ₃ = mπ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AngleDoc", into = "AngleDoc")]
pub struct AngleVector {
    theta: [f64; 3],
    m: u8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AngleDoc {
    theta: [f64; 3],
    m: u8,
}

impl TryFrom<AngleDoc> for AngleVector {
    type Error = SlagError;
    fn try_from(d: AngleDoc) -> Result<Self, SlagError> {
        let a = AngleVector::new(d.theta)?;
        if a.m != d.m {
            return Err(SlagError::BadAngles { theta: d.theta });
        }
        Ok(a)
    }
}

impl From<AngleVector> for AngleDoc {
    fn from(a: AngleVector) -> AngleDoc {
        AngleDoc {
            theta: a.theta,
            m: a.m,
        }
    }
}

impl AngleVector {
    /// Sorts `theta` and infers the trace class.
    pub fn new(mut theta: [f64; 3]) -> Result<Self, SlagError> {
        theta.sort_by(f64::total_cmp);
        if theta.iter().any(|t| !(*t > 0.0 && *t < PI)) {
            return Err(SlagError::BadAngles { theta });
        }
        let sum: f64 = theta.iter().sum();
        let m = (sum / PI).round();
        if !(m == 1.0 || m == 2.0) || (sum - m * PI).abs() >= tol::TRACE_CLASS {
            return Err(SlagError::BadAngles { theta });
        }
        Ok(AngleVector { theta, m: m as u8 })
    }

    pub fn theta(&self) -> [f64; 3] {
        self.theta
    }

    pub fn trace_class(&self) -> u8 {
        self.m
    }

    pub fn plane(&self) -> SLagPlane {
        super::plane_from_angles(self.theta)
    }
}

/// `B ∈ SU(3)` with `B·V = V₀` and `B·V′ = V_θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalForm {
    #[serde(rename = "B", with = "nested::complex")]
    pub b: CMat3,
    pub theta: AngleVector,
}

impl NormalForm {
    /// `max(dist(B·V, V₀), dist(B·V′, V_θ))`.
    pub fn reconstruction_error(&self, v: &SLagPlane, vp: &SLagPlane) -> f64 {
        let e0 = v.transformed(&self.b).distance(&SLagPlane::standard());
        let e1 = vp.transformed(&self.b).distance(&self.theta.plane());
        e0.max(e1)
    }
}

fn half_angle(d: Complex64) -> f64 {
    let mut a = d.arg();
    if a <= 0.0 {
        a += 2.0 * PI;
    }
    a / 2.0
}

pub fn normal_form(v: &SLagPlane, vp: &SLagPlane) -> Result<NormalForm, SlagError> {
    let a = v.oriented().frame().adjoint();
    let m = a * vp.invariant() * a.transpose();
    let m = (m + m.transpose()) * Complex64::new(0.5, 0.0);
    let diag = symmetric_unitary_diag(&m)?;

    let margin = diag
        .d
        .iter()
        .map(|d| (d - Complex64::new(1.0, 0.0)).norm())
        .fold(f64::INFINITY, f64::min);
    if margin < tol::TRANSVERSE {
        return Err(SlagError::NotTransverse(margin));
    }

    let raw = diag.d.map(half_angle);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let mut q = Matrix3::from_columns(&order.map(|i| diag.q.column(i).into_owned()));
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    let theta = AngleVector::new(order.map(|i| raw[i]))?;
    Ok(NormalForm {
        b: complexify(&q).transpose() * a,
        theta,
    })
}

pub fn characteristic_angles(v: &SLagPlane, vp: &SLagPlane) -> Result<AngleVector, SlagError> {
    normal_form(v, vp).map(|nf| nf.theta)
}

/// `θ′_j = π − θ_{4−j}`, the angles of the swapped pair.
pub fn angle_involution(theta: &AngleVector) -> AngleVector {
    let t = theta.theta;
    AngleVector {
        theta: [PI - t[2], PI - t[1], PI - t[0]],
        m: 3 - theta.m,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilizerClass {
    SO3,
    #[serde(rename = "O2_LOW")]
    O2Low,
    #[serde(rename = "O2_HIGH")]
    O2High,
    K4,
}

impl StabilizerClass {
    pub fn expected_dimension(self) -> usize {
        match self {
            StabilizerClass::SO3 => 3,
            StabilizerClass::O2Low | StabilizerClass::O2High => 1,
            StabilizerClass::K4 => 0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            StabilizerClass::SO3 => "SO3",
            StabilizerClass::O2Low => "O2_LOW",
            StabilizerClass::O2High => "O2_HIGH",
            StabilizerClass::K4 => "K4",
        }
    }
}

pub fn classify_stabilizer(theta: &AngleVector, gap_tol: f64) -> StabilizerClass {
    let t = theta.theta;
    let low = t[1] - t[0] < gap_tol;
    let high = t[2] - t[1] < gap_tol;
    match (low, high) {
        (true, true) => StabilizerClass::SO3,
        (true, false) => StabilizerClass::O2Low,
        (false, true) => StabilizerClass::O2High,
        (false, false) => StabilizerClass::K4,
    }
}

/// `i·λ_a/√2` for the Gell-Mann matrices `λ_a`.
fn su3_basis() -> [CMat3; 8] {
    let z = Complex64::new(0.0, 0.0);
    let r = |x: f64| Complex64::new(x, 0.0);
    let im = |x: f64| Complex64::new(0.0, x);
    let s3 = 1.0 / 3f64.sqrt();
    let gm = [
        [[z, r(1.0), z], [r(1.0), z, z], [z, z, z]],
        [[z, im(-1.0), z], [im(1.0), z, z], [z, z, z]],
        [[r(1.0), z, z], [z, r(-1.0), z], [z, z, z]],
        [[z, z, r(1.0)], [z, z, z], [r(1.0), z, z]],
        [[z, z, im(-1.0)], [z, z, z], [im(1.0), z, z]],
        [[z, z, z], [z, z, r(1.0)], [z, r(1.0), z]],
        [[z, z, z], [z, z, im(-1.0)], [z, im(1.0), z]],
        [[r(s3), z, z], [z, r(s3), z], [z, z, r(-2.0 * s3)]],
    ];
    gm.map(|rows| CMat3::from_fn(|i, j| rows[i][j] * Complex64::new(0.0, 1.0 / 2f64.sqrt())))
}

/// Dimension of the Lie algebra of the common stabilizer of `V` and `V′` in
/// SU(3), as the nullity of the linear conditions `A·V ⊂ V`, `A·V′ ⊂ V′`.
pub fn stabilizer_dimension_numeric(v: &SLagPlane, vp: &SLagPlane) -> Result<usize, SlagError> {
    let margin = super::transversality_margin(v, vp);
    if 2.0 * margin < tol::TRANSVERSE {
        return Err(SlagError::NotTransverse(2.0 * margin));
    }
    let basis = su3_basis();
    let mut system = DMatrix::<f64>::zeros(36, 8);
    for (a, gen) in basis.iter().enumerate() {
        for (p, plane) in [v, vp].into_iter().enumerate() {
            let image = gen * plane.frame();
            let mut normal = image;
            for j in 0..3 {
                let col = image.column(j).into_owned();
                normal.set_column(j, &(col - plane.project(&col)));
            }
            let rows = realify(&normal);
            for j in 0..3 {
                for k in 0..6 {
                    system[(p * 18 + j * 6 + k, a)] = rows[(k, j)];
                }
            }
        }
    }
    let sv = system.singular_values();
    Ok(sv.iter().filter(|s| **s < tol::NULLITY).count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionClass {
    #[serde(rename = "P_WALL")]
    PWall,
    #[serde(rename = "S_PI_CLOSE")]
    SPiClose,
    #[serde(rename = "S_2PI_CLOSE")]
    S2PiClose,
    #[serde(rename = "G_PI_FAR")]
    GPiFar,
    #[serde(rename = "G_2PI_FAR")]
    G2PiFar,
}

impl RegionClass {
    pub fn is_close(self) -> bool {
        matches!(self, RegionClass::SPiClose | RegionClass::S2PiClose)
    }

    pub fn tag(self) -> &'static str {
        match self {
            RegionClass::PWall => "P_WALL",
            RegionClass::SPiClose => "S_PI_CLOSE",
            RegionClass::S2PiClose => "S_2PI_CLOSE",
            RegionClass::GPiFar => "G_PI_FAR",
            RegionClass::G2PiFar => "G_2PI_FAR",
        }
    }
}

pub fn classify_region(theta: &AngleVector, tol: f64) -> RegionClass {
    let t = theta.theta;
    if t.iter().any(|x| (x - FRAC_PI_2).abs() < tol) {
        return RegionClass::PWall;
    }
    match theta.m {
        1 if t[2] > FRAC_PI_2 => RegionClass::SPiClose,
        1 => RegionClass::GPiFar,
        _ if t[0] < FRAC_PI_2 => RegionClass::S2PiClose,
        _ => RegionClass::G2PiFar,
    }
}
