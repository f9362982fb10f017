//! Small dense complex linear algebra on ℂ³.
//!
//! Contents: projection onto SU(3), simultaneous real-orthogonal
//! diagonalization of symmetric unitary matrices, and continuous quaternion
//! lifts of sampled rotation paths.

use nalgebra::{Matrix3, SymmetricEigen, UnitQuaternion, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::Z2;

/// 3×3 complex matrix.
pub type CMat3 = Matrix3<Complex64>;
/// Complex 3-vector.
pub type CVec3 = Vector3<Complex64>;

/// Eigenvalues of `Re S` closer than this are resolved by `Im S`.
pub const DEGENERACY_GAP: f64 = 1e-7;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is numerically singular (smallest singular value {0:e})")]
    SingularInput(f64),
    #[error("matrix is not symmetric (residual {0:e})")]
    NotSymmetric(f64),
    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("not a rotation matrix (orthogonality residual {residual:e}, det {det})")]
    NotRotation { residual: f64, det: f64 },
    #[error("consecutive rotations {index} and {next} differ by {angle} rad (limit π/2)")]
    SamplingTooCoarse { index: usize, next: usize, angle: f64 },
    #[error("empty rotation path")]
    EmptyPath,
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn complexify(m: &Matrix3<f64>) -> CMat3 {
    m.map(|x| c(x, 0.0))
}

/// `‖M†M − I‖_F`.
pub fn unitarity_residual(m: &CMat3) -> f64 {
    (m.adjoint() * m - CMat3::identity()).norm()
}

/// `‖M − Mᵀ‖_F`.
pub fn symmetry_residual(m: &CMat3) -> f64 {
    (m - m.transpose()).norm()
}

/// `‖MᵀM − I‖_F`.
pub fn orthogonality_residual(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).norm()
}

/// Orthogonal polar factor of a real 3×3 matrix.
pub fn real_polar(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Nearest special unitary matrix: the unitary polar factor of `m`, rescaled
/// by a cube root of its determinant's phase.
pub fn project_special_unitary(m: &CMat3) -> Result<CMat3, LinalgError> {
    let svd = m.svd(true, true);
    let smin = svd.singular_values.min();
    if smin <= 1e-12 {
        return Err(LinalgError::SingularInput(smin));
    }
    let u = svd.u.unwrap() * svd.v_t.unwrap();
    let phase = u.determinant().arg();
    Ok(u * Complex64::from_polar(1.0, -phase / 3.0))
}

/// `S = Q · diag(d) · Qᵀ` with `Q` real orthogonal and `|d_j| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricUnitaryDiag {
    pub q: Matrix3<f64>,
    pub d: [Complex64; 3],
}

impl SymmetricUnitaryDiag {
    pub fn reconstruct(&self) -> CMat3 {
        let qc = complexify(&self.q);
        let dm = CMat3::from_diagonal(&CVec3::new(self.d[0], self.d[1], self.d[2]));
        qc * dm * qc.transpose()
    }
}

fn sorted_eigen(m: &Matrix3<f64>) -> (Vec<f64>, Matrix3<f64>) {
    let eig = SymmetricEigen::new(*m);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Matrix3::from_columns(&[
        eig.eigenvectors.column(order[0]).into_owned(),
        eig.eigenvectors.column(order[1]).into_owned(),
        eig.eigenvectors.column(order[2]).into_owned(),
    ]);
    (vals, vecs)
}

/// Diagonalize a symmetric unitary 3×3 matrix by real orthogonal congruence.
///
/// `Re S` and `Im S` commute; `Re S` is diagonalized first and any eigenvalue
/// cluster narrower than [`DEGENERACY_GAP`] is split by diagonalizing `Im S`
/// inside it. A block degenerate in both parts keeps an arbitrary orthonormal
/// basis.
pub fn symmetric_unitary_diag(s: &CMat3) -> Result<SymmetricUnitaryDiag, LinalgError> {
    let sym = symmetry_residual(s);
    if sym >= 1e-9 {
        return Err(LinalgError::NotSymmetric(sym));
    }
    let uni = unitarity_residual(s);
    if uni >= 1e-9 {
        return Err(LinalgError::NotUnitary(uni));
    }
    let re = s.map(|z| z.re);
    let im = s.map(|z| z.im);
    let re = (re + re.transpose()) * 0.5;
    let im = (im + im.transpose()) * 0.5;

    let (vals, mut q) = sorted_eigen(&re);
    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && vals[end] - vals[end - 1] < DEGENERACY_GAP {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            let block = q.columns(start, size).into_owned();
            let yb = block.transpose() * im * &block;
            let yb = (&yb + yb.transpose()) * 0.5;
            let eig = SymmetricEigen::new(yb);
            let rotated = &block * eig.eigenvectors;
            q.columns_mut(start, size).copy_from(&rotated);
        }
        start = end;
    }

    let qc = complexify(&q);
    let diag = qc.transpose() * s * qc;
    let d = [0, 1, 2].map(|j| {
        let z = diag[(j, j)];
        z / z.norm()
    });
    Ok(SymmetricUnitaryDiag { q, d })
}

/// A 3×3 rotation, `RᵀR = I` and `det R = 1` within `1e−9`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "nested::RealRows", into = "nested::RealRows")]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn new(m: Matrix3<f64>) -> Result<Self, LinalgError> {
        let residual = orthogonality_residual(&m);
        let det = m.determinant();
        if residual >= 1e-9 || (det - 1.0).abs() >= 1e-9 {
            return Err(LinalgError::NotRotation { residual, det });
        }
        Ok(RotationMatrix(m))
    }

    pub fn identity() -> Self {
        RotationMatrix(Matrix3::identity())
    }

    /// Rotation by `angle` about the unit vector `axis`.
    pub fn about_axis(axis: &Vector3<f64>, angle: f64) -> Self {
        let q = UnitQuaternion::from_axis_angle(&nalgebra::Unit::new_normalize(*axis), angle);
        RotationMatrix(q.to_rotation_matrix().into_inner())
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn compose(&self, other: &RotationMatrix) -> RotationMatrix {
        RotationMatrix(self.0 * other.0)
    }

    pub fn inverse(&self) -> RotationMatrix {
        RotationMatrix(self.0.transpose())
    }

    /// Rotation angle of `selfᵀ · other`, in `[0, π]`.
    pub fn angle_to(&self, other: &RotationMatrix) -> f64 {
        let rel = self.0.transpose() * other.0;
        ((rel.trace() - 1.0) * 0.5).clamp(-1.0, 1.0).acos()
    }

    /// One of the two unit quaternions covering this rotation.
    pub fn to_quaternion(&self) -> UnitQuaternion<f64> {
        let rot = nalgebra::Rotation3::from_matrix_unchecked(self.0);
        UnitQuaternion::from_rotation_matrix(&rot)
    }
}

impl TryFrom<nested::RealRows> for RotationMatrix {
    type Error = LinalgError;
    fn try_from(m: nested::RealRows) -> Result<Self, LinalgError> {
        RotationMatrix::new(m.into())
    }
}

impl From<RotationMatrix> for nested::RealRows {
    fn from(r: RotationMatrix) -> nested::RealRows {
        r.0.into()
    }
}

/// Result of lifting a rotation path through `SU(2) → SO(3)`.
#[derive(Debug, Clone)]
pub struct QuaternionLift {
    /// Lifted quaternions, one per sample, sign-continuous.
    pub lifted: Vec<UnitQuaternion<f64>>,
    /// Lift of the final sample.
    pub end: UnitQuaternion<f64>,
    /// For a closed path (last sample equals the first): `+1` when the lift
    /// closes up, `−1` when it ends at the antipode.
    pub closed_parity: Option<Z2>,
}

fn qdot(a: &UnitQuaternion<f64>, b: &UnitQuaternion<f64>) -> f64 {
    a.coords.dot(&b.coords)
}

/// Continuous lift of a sampled rotation path, starting from the lift of the
/// first sample with non-negative scalar part (exactly `+1` for a path that
/// starts at the identity).
///
/// Consecutive samples must differ by less than π/2.
pub fn quaternion_lift(path: &[RotationMatrix]) -> Result<QuaternionLift, LinalgError> {
    let first = path.first().ok_or(LinalgError::EmptyPath)?;
    let mut q0 = first.to_quaternion();
    if q0.w < 0.0 {
        q0 = UnitQuaternion::new_unchecked(-q0.into_inner());
    }
    let limit = std::f64::consts::FRAC_PI_4.cos();
    let mut lifted = Vec::with_capacity(path.len());
    lifted.push(q0);
    for (i, r) in path.iter().enumerate().skip(1) {
        let prev = lifted[i - 1];
        let mut q = r.to_quaternion();
        let d = qdot(&prev, &q);
        if d.abs() <= limit {
            return Err(LinalgError::SamplingTooCoarse {
                index: i - 1,
                next: i,
                angle: 2.0 * d.abs().clamp(-1.0, 1.0).acos(),
            });
        }
        if d < 0.0 {
            q = UnitQuaternion::new_unchecked(-q.into_inner());
        }
        lifted.push(q);
    }
    let end = *lifted.last().unwrap();
    let closed = path.len() > 1 && (path.last().unwrap().0 - first.0).norm() < 1e-9;
    let closed_parity = closed.then(|| Z2::from_sign(qdot(&end, &q0)));
    Ok(QuaternionLift {
        lifted,
        end,
        closed_parity,
    })
}

/// Closure parity of a cyclic sequence of rotations (the closing edge from
/// the last sample back to the first is implied).
pub fn loop_parity(samples: &[RotationMatrix]) -> Result<Z2, LinalgError> {
    let first = *samples.first().ok_or(LinalgError::EmptyPath)?;
    let mut closed: Vec<RotationMatrix> = samples.to_vec();
    closed.push(first);
    let lift = quaternion_lift(&closed)?;
    Ok(lift.closed_parity.unwrap_or(Z2::Plus))
}

/// Row-major nested-array JSON forms of 3×3 matrices.
///
/// Real matrices are `[[a, b, c], …]`; complex ones `[[[re, im], …], …]`.
pub mod nested {
    use super::CMat3;
    use nalgebra::Matrix3;
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
    pub struct RealRows(pub [[f64; 3]; 3]);

    #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
    pub struct ComplexRows(pub [[[f64; 2]; 3]; 3]);

    impl From<RealRows> for Matrix3<f64> {
        fn from(r: RealRows) -> Self {
            Matrix3::from_fn(|i, j| r.0[i][j])
        }
    }

    impl From<Matrix3<f64>> for RealRows {
        fn from(m: Matrix3<f64>) -> Self {
            RealRows(std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])))
        }
    }

    impl From<ComplexRows> for CMat3 {
        fn from(r: ComplexRows) -> Self {
            CMat3::from_fn(|i, j| Complex64::new(r.0[i][j][0], r.0[i][j][1]))
        }
    }

    impl From<CMat3> for ComplexRows {
        fn from(m: CMat3) -> Self {
            ComplexRows(std::array::from_fn(|i| {
                std::array::from_fn(|j| [m[(i, j)].re, m[(i, j)].im])
            }))
        }
    }

    /// For `#[serde(with = "nested::complex")]`.
    pub mod complex {
        use super::*;
        pub fn serialize<S: Serializer>(m: &CMat3, s: S) -> Result<S::Ok, S::Error> {
            ComplexRows::from(*m).serialize(s)
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat3, D::Error> {
            ComplexRows::deserialize(d).map(Into::into)
        }
    }

    /// For `#[serde(with = "nested::real")]`.
    pub mod real {
        use super::*;
        pub fn serialize<S: Serializer>(m: &Matrix3<f64>, s: S) -> Result<S::Ok, S::Error> {
            RealRows::from(*m).serialize(s)
        }
        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Matrix3<f64>, D::Error> {
            RealRows::deserialize(d).map(Into::into)
        }
    }
}
