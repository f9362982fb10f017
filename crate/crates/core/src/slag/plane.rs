use nalgebra::{Matrix6x3, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SlagError;
use crate::linalg::{nested, unitarity_residual, CMat3, CVec3};
use crate::tol;

/// A Lagrangian 3-plane in ℂ³, the real span of the columns of a unitary
/// frame. Planes built through [`SLagPlane::new`] are also special.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlaneDoc", into = "PlaneDoc")]
pub struct SLagPlane {
    frame: CMat3,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaneDoc {
    #[serde(with = "nested::complex")]
    frame: CMat3,
}

impl TryFrom<PlaneDoc> for SLagPlane {
    type Error = SlagError;
    fn try_from(d: PlaneDoc) -> Result<Self, SlagError> {
        SLagPlane::new(d.frame)
    }
}

impl From<SLagPlane> for PlaneDoc {
    fn from(p: SLagPlane) -> PlaneDoc {
        PlaneDoc { frame: p.frame }
    }
}

impl SLagPlane {
    /// Validates `U†U = I` and `Im det U = 0`.
    pub fn new(frame: CMat3) -> Result<Self, SlagError> {
        let p = SLagPlane::lagrangian(frame)?;
        let phase = p.special_residual();
        if phase >= tol::SPECIAL_PHASE {
            return Err(SlagError::NotSpecialLagrangian(phase));
        }
        Ok(p)
    }

    /// Validates only `U†U = I`.
    pub fn lagrangian(frame: CMat3) -> Result<Self, SlagError> {
        let r = unitarity_residual(&frame);
        if r >= tol::FRAME_UNITARY {
            return Err(SlagError::NotUnitary(r));
        }
        Ok(SLagPlane { frame })
    }

    pub(crate) fn from_frame_unchecked(frame: CMat3) -> Self {
        SLagPlane { frame }
    }

    /// `V₀ = ℝ³ ⊂ ℂ³`.
    pub fn standard() -> Self {
        SLagPlane {
            frame: CMat3::identity(),
        }
    }

    pub fn frame(&self) -> &CMat3 {
        &self.frame
    }

    /// `|Im det U|`.
    pub fn special_residual(&self) -> f64 {
        self.frame.determinant().im.abs()
    }

    pub fn is_special(&self) -> bool {
        self.special_residual() < tol::SPECIAL_PHASE
    }

    /// The frame-independent invariant `S = U·Uᵀ`.
    pub fn invariant(&self) -> CMat3 {
        self.frame * self.frame.transpose()
    }

    /// `‖S − S′‖_F`, zero iff the planes coincide.
    pub fn distance(&self, other: &SLagPlane) -> f64 {
        (self.invariant() - other.invariant()).norm()
    }

    pub fn transformed(&self, a: &CMat3) -> SLagPlane {
        SLagPlane {
            frame: a * self.frame,
        }
    }

    /// `sign Re det U`, the orientation the frame induces on the plane.
    pub fn orientation(&self) -> f64 {
        if self.frame.determinant().re >= 0.0 {
            1.0
        } else {
            -1.0
        }
    }

    /// The same plane with the first column negated if needed so that
    /// `Re det U > 0`.
    pub fn oriented(&self) -> SLagPlane {
        let mut f = self.frame;
        if self.orientation() < 0.0 {
            f.column_mut(0).neg_mut();
        }
        SLagPlane { frame: f }
    }

    /// `i·V`.
    pub fn times_i(&self) -> SLagPlane {
        SLagPlane {
            frame: self.frame * Complex64::i(),
        }
    }

    /// Orthogonal projection of `w` onto the plane: `U·Re(U†w)`.
    pub fn project(&self, w: &CVec3) -> CVec3 {
        let coords = (self.frame.adjoint() * w).map(|z| Complex64::new(z.re, 0.0));
        self.frame * coords
    }

    /// Real coordinates of `w` in the frame, i.e. `Re(U†w)`.
    pub fn coordinates(&self, w: &CVec3) -> Vector3<f64> {
        (self.frame.adjoint() * w).map(|z| z.re)
    }
}

/// `V_θ = diag(e^{iθ₁}, e^{iθ₂}, e^{iθ₃})·ℝ³`. The result is Lagrangian for
/// every θ and special iff `Σθ ∈ πℤ`.
pub fn plane_from_angles(theta: [f64; 3]) -> SLagPlane {
    SLagPlane::from_frame_unchecked(CMat3::from_diagonal(&CVec3::new(
        Complex64::from_polar(1.0, theta[0]),
        Complex64::from_polar(1.0, theta[1]),
        Complex64::from_polar(1.0, theta[2]),
    )))
}

pub fn is_special_lagrangian(u: &CMat3, tol: f64) -> bool {
    unitarity_residual(u) < tol && u.determinant().im.abs() < tol
}

/// Columns of `M` as vectors in ℝ⁶ = (Re, Im).
pub fn realify(m: &CMat3) -> Matrix6x3<f64> {
    Matrix6x3::from_fn(|i, j| if i < 3 { m[(i, j)].re } else { m[(i - 3, j)].im })
}

/// Smallest singular value of the component of `V′` normal to `V`, as a real
/// 6×3 matrix. For a pair in normal form this is `min_j |sin θ_j|`.
pub fn transversality_margin(v: &SLagPlane, vp: &SLagPlane) -> f64 {
    let mut normal = *vp.frame();
    for j in 0..3 {
        let col = vp.frame().column(j).into_owned();
        normal.set_column(j, &(col - v.project(&col)));
    }
    realify(&normal).singular_values().min()
}
