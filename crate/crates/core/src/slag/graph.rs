use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::plane::{realify, transversality_margin, SLagPlane};
use super::SlagError;
use crate::linalg::{complexify, nested, CMat3};
use crate::tol;

/// A real symmetric bilinear form on a 3-plane, written in the plane's frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "nested::RealRows", into = "nested::RealRows")]
pub struct SymForm3(Matrix3<f64>);

impl TryFrom<nested::RealRows> for SymForm3 {
    type Error = SlagError;
    fn try_from(r: nested::RealRows) -> Result<Self, SlagError> {
        SymForm3::new(r.into())
    }
}

impl From<SymForm3> for nested::RealRows {
    fn from(b: SymForm3) -> Self {
        b.0.into()
    }
}

impl SymForm3 {
    /// Accepts `m` if `‖m − mᵀ‖_F < 1e−8` and stores its symmetric part.
    pub fn new(m: Matrix3<f64>) -> Result<Self, SlagError> {
        let r = (m - m.transpose()).norm();
        if r >= 1e-8 {
            return Err(SlagError::NotSymmetric(r));
        }
        Ok(SymForm3::symmetrized(&m))
    }

    pub fn symmetrized(m: &Matrix3<f64>) -> Self {
        SymForm3((m + m.transpose()) * 0.5)
    }

    pub fn diagonal(d: [f64; 3]) -> Self {
        SymForm3(Matrix3::from_diagonal(&Vector3::from(d)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    /// `|tr B − det B|`.
    pub fn trace_det_residual(&self) -> f64 {
        (self.trace() - self.det()).abs()
    }

    /// Eigenvalues ascending with matching unit eigenvectors as columns.
    pub fn eigen(&self) -> ([f64; 3], Matrix3<f64>) {
        let e = SymmetricEigen::new(self.0);
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let vals = order.map(|i| e.eigenvalues[i]);
        let vecs = Matrix3::from_columns(&order.map(|i| e.eigenvectors.column(i).into_owned()));
        (vals, vecs)
    }

    pub fn eigenvalues(&self) -> [f64; 3] {
        self.eigen().0
    }

    /// `Q·B·Qᵀ`.
    pub fn conjugated(&self, q: &Matrix3<f64>) -> SymForm3 {
        SymForm3::symmetrized(&(q * self.0 * q.transpose()))
    }
}

impl std::ops::Neg for SymForm3 {
    type Output = SymForm3;
    fn neg(self) -> SymForm3 {
        SymForm3(-self.0)
    }
}

/// Smallest singular value of the component of `V′` normal to `i·V`. For a
/// pair in normal form this is `min_j |cos θ_j|`.
pub fn graphicality_margin(v: &SLagPlane, vp: &SLagPlane) -> f64 {
    let iv = v.times_i();
    let mut normal = *vp.frame();
    for j in 0..3 {
        let col = vp.frame().column(j).into_owned();
        normal.set_column(j, &(col - iv.project(&col)));
    }
    realify(&normal).singular_values().min()
}

fn check_transverse(v: &SLagPlane, vp: &SLagPlane) -> Result<(), SlagError> {
    let margin = 2.0 * transversality_margin(v, vp);
    if margin < tol::TRANSVERSE {
        return Err(SlagError::NotTransverse(margin));
    }
    Ok(())
}

/// Whether `i·V` and `V′` are transverse.
pub fn is_graphical(v: &SLagPlane, vp: &SLagPlane) -> Result<bool, SlagError> {
    check_transverse(v, vp)?;
    Ok(graphicality_margin(v, vp) >= tol::WALL)
}

/// The symmetric `B` with `V′ = {x + i·Bx : x ∈ V}` in the frame of `V`.
pub fn graph_bilinear_form(v: &SLagPlane, vp: &SLagPlane) -> Result<SymForm3, SlagError> {
    check_transverse(v, vp)?;
    let c = v.frame().adjoint() * vp.frame();
    let a = c.map(|z| z.re);
    let b = c.map(|z| z.im);
    let smin = a.singular_values().min();
    if smin < tol::WALL {
        return Err(SlagError::NotGraphical(smin));
    }
    let inv = a.try_inverse().ok_or(SlagError::NotGraphical(smin))?;
    Ok(SymForm3::symmetrized(&(b * inv)))
}

/// Unit eigenvector of the single negative eigenvalue, signed so that its
/// largest-magnitude coordinate is positive.
pub fn negative_eigenline(b: &SymForm3, margin: f64) -> Result<Vector3<f64>, SlagError> {
    let (vals, vecs) = b.eigen();
    if !(vals[0] < -margin && vals[1] > margin) {
        return Err(SlagError::EigenvalueSignatureViolated(vals));
    }
    let mut l = vecs.column(0).into_owned();
    let big = l.iamax();
    if l[big] < 0.0 {
        l = -l;
    }
    Ok(l)
}

/// The graph of `x ↦ i·Bx` over `V`, with unitary frame `U(I + iB)(I + B²)^{−1/2}`.
///
/// The result is Lagrangian for every symmetric `B`, and special iff
/// `tr B = det B` when `V` is.
pub fn graph_over(v: &SLagPlane, b: &SymForm3) -> SLagPlane {
    let (vals, p) = b.eigen();
    let n = p * Matrix3::from_diagonal(&Vector3::from(vals.map(|l| 1.0 / (1.0 + l * l).sqrt())))
        * p.transpose();
    let lift = CMat3::from_fn(|i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        Complex64::new(d, b.matrix()[(i, j)])
    });
    SLagPlane::from_frame_unchecked(v.frame() * lift * complexify(&n))
}

/// Cofactor matrix, the gradient of `det` at `b`.
fn cofactor(b: &Matrix3<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| {
        let r: Vec<usize> = (0..3).filter(|&k| k != i).collect();
        let c: Vec<usize> = (0..3).filter(|&k| k != j).collect();
        let minor = b[(r[0], c[0])] * b[(r[1], c[1])] - b[(r[0], c[1])] * b[(r[1], c[0])];
        if (i + j) % 2 == 0 {
            minor
        } else {
            -minor
        }
    })
}

/// Nearby symmetric form with `tr B = det B`, by Newton steps along the
/// gradient of `tr − det`. `None` if the iteration stalls.
pub fn project_trace_det(b: &Matrix3<f64>) -> Option<Matrix3<f64>> {
    let mut b = *b;
    for _ in 0..50 {
        let g = b.trace() - b.determinant();
        if g.abs() < 1e-14 {
            return Some(b);
        }
        let grad = Matrix3::identity() - cofactor(&b);
        let nn = grad.norm_squared();
        if nn < 1e-20 {
            return None;
        }
        b -= grad * (g / nn);
        b = (b + b.transpose()) * 0.5;
    }
    None
}

/// `α̃(φ)` with rows `[sin φ, cos φ, 0]`, `[cos φ, −sin φ, 0]`, `[0, 0, −1]`.
///
/// At `φ = ±π/2` the entries are exact: `α̃(π/2) = diag(1, −1, −1)` and
/// `α̃(−π/2) = diag(−1, 1, −1)`.
pub fn alpha_curve(phi: f64) -> CMat3 {
    let (s, c) = if phi.abs() == std::f64::consts::FRAC_PI_2 {
        (phi.signum(), 0.0)
    } else {
        phi.sin_cos()
    };
    complexify(&Matrix3::new(s, c, 0.0, c, -s, 0.0, 0.0, 0.0, -1.0))
}

/// Whether `g` maps both planes of the pair to themselves.
pub fn fixes_pair(g: &CMat3, v: &SLagPlane, vp: &SLagPlane, tol: f64) -> bool {
    v.transformed(g).distance(v) < tol && vp.transformed(g).distance(vp) < tol
}
