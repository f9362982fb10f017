use nalgebra::{Matrix3, SMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::structure::{im_oct, vec7, NormalStructure};
use super::G2Error;
use crate::algebra::{contract, phi0, ImOctonion, KForm};
use crate::linalg::{CMat3, CVec3};
use crate::slag::{normal_form, transversality_margin, SLagPlane, SlagError};
use crate::tol;

/// An oriented coassociative 4-plane in Im 𝕆 with an orthonormal spanning
/// set. `orient = +1` when the span order is the orientation in which
/// `(ι_n φ₀)|_P` is self-dual, `−1` when it is the reverse.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CoassocDoc", into = "CoassocDoc")]
pub struct CoassocPlane {
    span: [ImOctonion; 4],
    orient: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoassocDoc {
    span: [[f64; 7]; 4],
    orient: i8,
}

impl TryFrom<CoassocDoc> for CoassocPlane {
    type Error = G2Error;
    fn try_from(d: CoassocDoc) -> Result<Self, G2Error> {
        let p = CoassocPlane::new(d.span.map(ImOctonion))?;
        if p.orient != d.orient {
            return Err(G2Error::OrientationFlag {
                given: d.orient,
                expected: p.orient,
            });
        }
        Ok(p)
    }
}

impl From<CoassocPlane> for CoassocDoc {
    fn from(p: CoassocPlane) -> Self {
        CoassocDoc {
            span: p.span.map(|v| v.0),
            orient: p.orient,
        }
    }
}

fn span_matrix(vectors: &[ImOctonion; 4]) -> SMatrix<f64, 7, 4> {
    SMatrix::<f64, 7, 4>::from_columns(&vectors.map(|v| vec7(&v)))
}

fn orthonormalize(vectors: &[ImOctonion; 4]) -> Result<[ImOctonion; 4], G2Error> {
    let m = span_matrix(vectors);
    let smin = m.singular_values().min();
    if smin < 1e-10 {
        return Err(G2Error::DegenerateSpan(smin));
    }
    let q = m.qr().q();
    Ok(std::array::from_fn(|j| im_oct(&q.column(j).into_owned())))
}

fn phi0_residual(basis: &[ImOctonion; 4]) -> f64 {
    let phi = phi0();
    let triples = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];
    triples
        .iter()
        .map(|t| phi.eval(&t.map(|i| basis[i])).unwrap().abs())
        .fold(0.0, f64::max)
}

/// Whether `φ₀` vanishes on the span of four independent vectors.
pub fn is_coassociative(vectors: &[ImOctonion; 4]) -> Result<bool, G2Error> {
    let basis = orthonormalize(vectors)?;
    Ok(phi0_residual(&basis) < tol::ALGEBRA)
}

/// Self-dual and anti-self-dual coefficients of a 2-form `a` in the
/// oriented basis `p₀…p₃`: `((a₀₁+a₂₃), (a₀₂−a₁₃), (a₀₃+a₁₂))/2` and the
/// same with the second terms negated.
fn split_2form(a: &KForm, p: &[ImOctonion; 4]) -> ([f64; 3], [f64; 3]) {
    let e = |i: usize, j: usize| a.eval(&[p[i], p[j]]).unwrap();
    let (a01, a02, a03, a12, a13, a23) = (e(0, 1), e(0, 2), e(0, 3), e(1, 2), e(1, 3), e(2, 3));
    (
        [(a01 + a23) / 2.0, (a02 - a13) / 2.0, (a03 + a12) / 2.0],
        [(a01 - a23) / 2.0, (a02 + a13) / 2.0, (a03 - a12) / 2.0],
    )
}

fn norm3(x: &[f64; 3]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

impl CoassocPlane {
    /// Requires an orthonormal coassociative spanning set; the orientation
    /// flag is computed.
    pub fn new(span: [ImOctonion; 4]) -> Result<Self, G2Error> {
        let m = span_matrix(&span);
        let gram = (m.transpose() * m - SMatrix::<f64, 4, 4>::identity()).norm();
        if gram >= tol::ALGEBRA {
            return Err(G2Error::NotOrthonormal(gram));
        }
        let res = phi0_residual(&span);
        if res >= tol::ALGEBRA {
            return Err(G2Error::NotCoassociative(res));
        }
        let mut p = CoassocPlane { span, orient: 1 };
        let n = p.normal_basis()[0];
        let (sd, asd) = split_2form(&contract(&phi0(), &n).unwrap(), &span);
        if norm3(&asd) > norm3(&sd) {
            p.orient = -1;
        }
        Ok(p)
    }

    /// Orthonormalizes four independent vectors first.
    pub fn from_vectors(vectors: &[ImOctonion; 4]) -> Result<Self, G2Error> {
        CoassocPlane::new(orthonormalize(vectors)?)
    }

    pub fn span(&self) -> &[ImOctonion; 4] {
        &self.span
    }

    pub fn orient(&self) -> i8 {
        self.orient
    }

    /// The span with `p₀` negated when `orient = −1`.
    pub fn oriented_span(&self) -> [ImOctonion; 4] {
        let mut s = self.span;
        if self.orient < 0 {
            s[0] = -s[0];
        }
        s
    }

    pub fn project(&self, v: &ImOctonion) -> ImOctonion {
        self.span
            .iter()
            .fold(ImOctonion::ZERO, |acc, p| acc.axpy(v.dot(p), p))
    }

    /// Orthonormal basis of the orthogonal complement.
    pub fn normal_basis(&self) -> [ImOctonion; 3] {
        let mut out: Vec<ImOctonion> = Vec::with_capacity(3);
        for _ in 0..3 {
            let mut best = ImOctonion::ZERO;
            for l in 2..=8 {
                let mut r = ImOctonion::basis(l);
                for b in self.span.iter().chain(out.iter()) {
                    r = r.axpy(-r.dot(b), b);
                }
                for b in self.span.iter().chain(out.iter()) {
                    r = r.axpy(-r.dot(b), b);
                }
                if r.norm() > best.norm() {
                    best = r;
                }
            }
            out.push(best.normalized());
        }
        [out[0], out[1], out[2]]
    }
}

/// `n ↦ (ι_n φ₀)|_P` for `n ⊥ P`.
pub fn eq24_iso(p: &CoassocPlane, n: &ImOctonion) -> Result<KForm, G2Error> {
    let along = p.project(n).norm();
    if along > tol::ALGEBRA {
        return Err(G2Error::NotNormal(along));
    }
    Ok(contract(&phi0(), n).unwrap().restrict_to(p.span()).pruned(1e-15))
}

/// Self-dual and anti-self-dual coefficients of a 2-form on `P` in the
/// oriented span.
pub fn selfdual_parts(p: &CoassocPlane, form: &KForm) -> ([f64; 3], [f64; 3]) {
    split_2form(form, &p.oriented_span())
}

/// `ℝu ⊕ f(V)` for a special Lagrangian `V` written in the frame of `ns`.
pub fn coassoc_from_slag(ns: &NormalStructure, v: &SLagPlane) -> Result<CoassocPlane, G2Error> {
    if !v.is_special() {
        return Err(G2Error::NotSpecialLagrangian(v.special_residual()));
    }
    let cols: [ImOctonion; 3] =
        std::array::from_fn(|j| ns.from_complex(&v.frame().column(j).into_owned()));
    CoassocPlane::new([ns.u, cols[0], cols[1], cols[2]])
}

fn normal_part(ns: &NormalStructure, p: &CoassocPlane) -> Result<SLagPlane, G2Error> {
    let miss = (p.project(&ns.u) - ns.u).norm();
    if miss > 1e-8 {
        return Err(G2Error::DirectionNotContained(miss));
    }
    let projected = SMatrix::<f64, 7, 4>::from_columns(
        &p.span().map(|q| vec7(&q.axpy(-q.dot(&ns.u), &ns.u))),
    );
    let svd = projected.svd(true, false);
    let left = svd.u.unwrap();
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let basis: [ImOctonion; 3] =
        std::array::from_fn(|k| im_oct(&left.column(order[k]).into_owned()));
    let frame = CMat3::from_columns(&[
        ns.to_complex(&basis[0]),
        ns.to_complex(&basis[1]),
        ns.to_complex(&basis[2]),
    ]);
    SLagPlane::new(frame).map_err(|e| match e {
        SlagError::NotSpecialLagrangian(r) => G2Error::NotSpecialLagrangian(r),
        other => G2Error::Slag(other),
    })
}

/// The orthocomplements of `u` in `P₊` and `P₋` as planes in ℂ³.
pub fn normal_slag_pair(
    ns: &NormalStructure,
    pplus: &CoassocPlane,
    pminus: &CoassocPlane,
) -> Result<(SLagPlane, SLagPlane), G2Error> {
    let vp = normal_part(ns, pplus)?;
    let vm = normal_part(ns, pminus)?;
    let margin = transversality_margin(&vp, &vm);
    if 2.0 * margin < tol::TRANSVERSE {
        return Err(G2Error::ExcessIntersection(margin));
    }
    Ok((vp, vm))
}

/// The matrix of `V₊ → V₋`, `x ↦ (−ω(x, ·))♯`, in the given frames:
/// `M_kj = −ω(v⁺_j, v⁻_k)`. In ℂ³ coordinates `M = Im(U₋†U₊)`.
pub fn pairing_iso(
    ns: &NormalStructure,
    vplus: &SLagPlane,
    vminus: &SLagPlane,
) -> Result<Matrix3<f64>, G2Error> {
    let margin = 2.0 * transversality_margin(vplus, vminus);
    if margin < tol::TRANSVERSE {
        return Err(G2Error::Slag(SlagError::NotTransverse(margin)));
    }
    let amb = |p: &SLagPlane| -> [ImOctonion; 3] {
        std::array::from_fn(|j| ns.from_complex(&p.frame().column(j).into_owned()))
    };
    let (a, b) = (amb(vplus), amb(vminus));
    Ok(Matrix3::from_fn(|k, j| -ns.omega_eval(&a[j], &b[k])))
}

/// Orientation bookkeeping for [`pairing_iso`].
///
/// `frame_sign` is the product of the orientations of the two frames
/// relative to the standard frames of the normal form (`ℝ³` and
/// `diag(e^{iθ})·ℝ³`); there `M = diag(−sin θ)`, so `det M` always has the
/// sign opposite to `frame_sign`. `calibrated_sign` compares against the
/// orientations with `Re Ω₀ > 0` instead and equals `(−1)^{m+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingOrientation {
    pub det: f64,
    pub frame_sign: f64,
    pub calibrated_sign: f64,
    pub trace_class: u8,
}

impl PairingOrientation {
    pub fn reverses(&self) -> bool {
        self.det * self.frame_sign < 0.0
    }
}

pub fn pairing_orientation(
    m: &Matrix3<f64>,
    vplus: &SLagPlane,
    vminus: &SLagPlane,
) -> Result<PairingOrientation, G2Error> {
    let nf = normal_form(vplus, vminus)?;
    let theta = nf.theta.theta();
    let unphase = CMat3::from_diagonal(&CVec3::from(theta.map(|t| Complex64::from_polar(1.0, -t))));
    let rp = (nf.b * vplus.frame()).determinant().re.signum();
    let rm = (unphase * nf.b * vminus.frame()).determinant().re.signum();
    let det = m.determinant();
    Ok(PairingOrientation {
        det,
        frame_sign: rp * rm,
        calibrated_sign: det.signum() * vplus.orientation() * vminus.orientation(),
        trace_class: nf.theta.trace_class(),
    })
}
