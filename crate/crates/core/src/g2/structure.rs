use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

use super::G2Error;
use crate::algebra::{contract, cross, phi0, psi0, wedge, ImOctonion, KForm};
use crate::linalg::CVec3;
use crate::tol;

pub type Vec7 = SVector<f64, 7>;

pub fn vec7(x: &ImOctonion) -> Vec7 {
    Vec7::from_column_slice(&x.0)
}

pub fn im_oct(v: &Vec7) -> ImOctonion {
    let mut c = [0.0; 7];
    c.copy_from_slice(v.as_slice());
    ImOctonion(c)
}

/// The metric dual `v♭` as a 1-form.
pub fn one_form(v: &ImOctonion) -> KForm {
    let mut f = KForm::zero(1);
    for l in 2u8..=8 {
        let c = v.coord(l);
        if c != 0.0 {
            f = f.add(&KForm::basis(&[l]).unwrap().scale(c));
        }
    }
    f
}

/// The SU(3) structure `(ω, J, Ω′, Ω″)` on `u⊥` together with a unitary
/// frame `w₁, w₂, w₃` identifying `u⊥` with ℂ³ through
/// `z ↦ Σ Re z_k·w_k + Im z_k·J w_k`.
#[derive(Debug, Clone)]
pub struct NormalStructure {
    pub u: ImOctonion,
    /// `ι_u φ₀`.
    pub omega: KForm,
    /// `J v = u × v`, zero on `u`.
    pub jmat: SMatrix<f64, 7, 7>,
    /// The part of `φ₀` in `Λ³(u⊥)*`.
    pub omega_prime: KForm,
    /// `ι_u ∗φ₀`.
    pub omega_double_prime: KForm,
    pub frame: [ImOctonion; 3],
}

fn largest_residual(candidates: &[usize], against: &[ImOctonion]) -> ImOctonion {
    let mut best = ImOctonion::ZERO;
    let mut best_norm = -1.0;
    for &l in candidates {
        let mut r = ImOctonion::basis(l);
        for b in against {
            r = r.axpy(-r.dot(b), b);
        }
        let n = r.norm();
        if n > best_norm {
            best_norm = n;
            best = r;
        }
    }
    best.normalized()
}

const CANDIDATES: [usize; 7] = [6, 7, 8, 2, 3, 4, 5];

pub fn normal_structure(u: &ImOctonion) -> Result<NormalStructure, G2Error> {
    let n = u.norm();
    if (n - 1.0).abs() > tol::ALGEBRA {
        return Err(G2Error::NotUnit(n));
    }
    let j = |v: &ImOctonion| cross(u, v);
    let a = largest_residual(&CANDIDATES, &[*u]);
    let b = largest_residual(&CANDIDATES, &[*u, a, j(&a)]);
    let c = largest_residual(&CANDIDATES, &[*u, a, j(&a), b, j(&b)]);
    let real_frame = [a, j(&a), b, j(&b), c, j(&c)];

    let phi = phi0();
    let omega_prime = phi.restrict_to(&real_frame).pruned(1e-15);
    let omega_double_prime = contract(&psi0(), u).unwrap().pruned(1e-15);

    let jc = j(&c);
    let p = omega_prime.eval(&[a, b, c]).unwrap();
    let q = omega_prime.eval(&[a, b, jc]).unwrap();
    let r = p.hypot(q);
    let (mut cs, mut sn) = if r < 1e-14 { (1.0, 0.0) } else { (-q / r, p / r) };
    let rotated = |cs: f64, sn: f64| c.scale(cs).axpy(sn, &jc);
    if omega_double_prime.eval(&[a, b, rotated(cs, sn)]).unwrap() < 0.0 {
        cs = -cs;
        sn = -sn;
    }
    let w3 = rotated(cs, sn);

    let jmat = SMatrix::<f64, 7, 7>::from_fn(|row, col| j(&ImOctonion::basis(col + 2)).0[row]);
    Ok(NormalStructure {
        u: *u,
        omega: contract(&phi, u).unwrap().pruned(1e-15),
        jmat,
        omega_prime,
        omega_double_prime,
        frame: [a, b, w3],
    })
}

impl NormalStructure {
    pub fn j(&self, v: &ImOctonion) -> ImOctonion {
        im_oct(&(self.jmat * vec7(v)))
    }

    /// `w₁, w₂, w₃, Jw₁, Jw₂, Jw₃`, an orthonormal basis of `u⊥`.
    pub fn real_frame(&self) -> [ImOctonion; 6] {
        let [a, b, c] = self.frame;
        [a, b, c, self.j(&a), self.j(&b), self.j(&c)]
    }

    /// `f(z) = Σ Re z_k·w_k + Im z_k·J w_k`.
    pub fn from_complex(&self, z: &CVec3) -> ImOctonion {
        let rf = self.real_frame();
        let mut v = ImOctonion::ZERO;
        for k in 0..3 {
            v = v.axpy(z[k].re, &rf[k]).axpy(z[k].im, &rf[k + 3]);
        }
        v
    }

    /// `f⁻¹` composed with the orthogonal projection onto `u⊥`.
    pub fn to_complex(&self, v: &ImOctonion) -> CVec3 {
        let rf = self.real_frame();
        CVec3::from_fn(|k, _| Complex64::new(v.dot(&rf[k]), v.dot(&rf[k + 3])))
    }

    /// `ω(v, w)`.
    pub fn omega_eval(&self, v: &ImOctonion, w: &ImOctonion) -> f64 {
        self.omega.eval(&[*v, *w]).unwrap()
    }

    /// `h(v, w) = ⟨v, w⟩ − i⟨Jv, w⟩`.
    pub fn hermitian(&self, v: &ImOctonion, w: &ImOctonion) -> Complex64 {
        Complex64::new(v.dot(w), -self.j(v).dot(w))
    }

    /// `ι_u vol`, the volume form of `u⊥`.
    pub fn perp_volume(&self) -> KForm {
        contract(&KForm::volume(), &self.u).unwrap()
    }

    /// `Ω′∧Ω″` divided by the volume form of `u⊥`.
    pub fn volume_ratio(&self) -> f64 {
        let top = wedge(&self.omega_prime, &self.omega_double_prime).unwrap();
        let rf = self.real_frame();
        top.eval(&rf).unwrap() / self.perp_volume().eval(&rf).unwrap()
    }

    /// Push-forwards under `f` of `ω₀`, `Re Ω₀` and `Im Ω₀`, as forms on ℝ⁷
    /// vanishing on `u`.
    pub fn standard_forms(&self) -> (KForm, KForm, KForm) {
        let rf = self.real_frame();
        let dx: Vec<KForm> = rf[..3].iter().map(one_form).collect();
        let dy: Vec<KForm> = rf[3..].iter().map(one_form).collect();
        let mut omega0 = KForm::zero(2);
        for k in 0..3 {
            omega0 = omega0.add(&wedge(&dx[k], &dy[k]).unwrap());
        }
        // dz₁∧dz₂∧dz₃ expanded over the eight choices of dx or i·dy per slot
        let mut re = KForm::zero(3);
        let mut im = KForm::zero(3);
        for mask in 0u8..8 {
            let pick = |k: usize| if mask >> k & 1 == 1 { &dy[k] } else { &dx[k] };
            let term = wedge(&wedge(pick(0), pick(1)).unwrap(), pick(2)).unwrap();
            match mask.count_ones() {
                0 => re = re.add(&term),
                1 => im = im.add(&term),
                2 => re = re.sub(&term),
                _ => im = im.sub(&term),
            }
        }
        (omega0, re, im)
    }
}
