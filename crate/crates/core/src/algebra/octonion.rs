//! Octonions built as pairs of quaternions, 𝕆 = ℍ ⊕ ℍe.
//!
//! Basis labels follow the ordering `e1 = 1, e2 = i, e3 = j, e4 = k,
//! e5 = e, e6 = ie, e7 = je, e8 = ke`. Products use the Cayley–Dickson rule
//!
//! ```text
//! (a + b e)(c + d e) = (a c − d̄ b) + (d a + b c̄) e
//! ```
//!
//! which reproduces the standard 3-form returned by [`phi0`](super::phi0)
//! through `φ₀(x, y, z) = ⟨x, y z⟩`.

use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

type Quat = [f64; 4];

fn qmul(a: &Quat, b: &Quat) -> Quat {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

fn qconj(a: &Quat) -> Quat {
    [a[0], -a[1], -a[2], -a[3]]
}

/// An octonion with coefficients over `e1 … e8` (stored at indices `0 … 7`).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub const ONE: Octonion = Octonion([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

    /// Basis element `e_label` for `label ∈ 1..=8`.
    pub fn basis(label: usize) -> Self {
        assert!((1..=8).contains(&label), "octonion basis label {label} out of range");
        let mut c = [0.0; 8];
        c[label - 1] = 1.0;
        Octonion(c)
    }

    pub fn real(&self) -> f64 {
        self.0[0]
    }

    pub fn imag(&self) -> ImOctonion {
        let mut c = [0.0; 7];
        c.copy_from_slice(&self.0[1..]);
        ImOctonion(c)
    }

    pub fn conj(&self) -> Self {
        let mut c = self.0;
        for x in &mut c[1..] {
            *x = -*x;
        }
        Octonion(c)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Octonion(self.0.map(|x| x * s))
    }

    fn halves(&self) -> (Quat, Quat) {
        let mut a = [0.0; 4];
        let mut b = [0.0; 4];
        a.copy_from_slice(&self.0[..4]);
        b.copy_from_slice(&self.0[4..]);
        (a, b)
    }
}

/// Octonion product.
pub fn oct_mul(x: &Octonion, y: &Octonion) -> Octonion {
    let (a, b) = x.halves();
    let (c, d) = y.halves();
    let ac = qmul(&a, &c);
    let db = qmul(&qconj(&d), &b);
    let da = qmul(&d, &a);
    let bc = qmul(&b, &qconj(&c));
    let mut out = [0.0; 8];
    for i in 0..4 {
        out[i] = ac[i] - db[i];
        out[i + 4] = da[i] + bc[i];
    }
    Octonion(out)
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        oct_mul(&self, &rhs)
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(rhs.0) {
            *x += y;
        }
        Octonion(c)
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        self + (-rhs)
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion(self.0.map(|x| -x))
    }
}

/// An imaginary octonion, coefficients over `e2 … e8` (stored at `0 … 6`).
///
/// This is also the crate's vector type for ℝ⁷ with the basis ordering above.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ImOctonion(pub [f64; 7]);

impl ImOctonion {
    pub const ZERO: ImOctonion = ImOctonion([0.0; 7]);

    /// Basis vector `e_label` for `label ∈ 2..=8`.
    pub fn basis(label: usize) -> Self {
        assert!((2..=8).contains(&label), "imaginary basis label {label} out of range");
        let mut c = [0.0; 7];
        c[label - 2] = 1.0;
        ImOctonion(c)
    }

    /// Coefficient on `e_label`.
    pub fn coord(&self, label: u8) -> f64 {
        self.0[label as usize - 2]
    }

    pub fn to_octonion(&self) -> Octonion {
        let mut c = [0.0; 8];
        c[1..].copy_from_slice(&self.0);
        Octonion(c)
    }

    pub fn conj(&self) -> Self {
        -*self
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        ImOctonion(self.0.map(|x| x * s))
    }

    pub fn normalized(&self) -> Self {
        self.scale(1.0 / self.norm())
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        let mut c = self.0;
        for (x, y) in c.iter_mut().zip(other.0) {
            *x += s * y;
        }
        ImOctonion(c)
    }
}

impl Index<usize> for ImOctonion {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for ImOctonion {
    type Output = ImOctonion;
    fn add(self, rhs: ImOctonion) -> ImOctonion {
        self.axpy(1.0, &rhs)
    }
}

impl Sub for ImOctonion {
    type Output = ImOctonion;
    fn sub(self, rhs: ImOctonion) -> ImOctonion {
        self.axpy(-1.0, &rhs)
    }
}

impl Neg for ImOctonion {
    type Output = ImOctonion;
    fn neg(self) -> ImOctonion {
        ImOctonion(self.0.map(|x| -x))
    }
}

/// Cross product `x × y = Im(ȳ x)`.
pub fn cross(x: &ImOctonion, y: &ImOctonion) -> ImOctonion {
    oct_mul(&y.to_octonion().conj(), &x.to_octonion()).imag()
}

/// One entry of the basis multiplication table: `e_i · e_j = sign · e_k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableEntry {
    pub i: u8,
    pub j: u8,
    pub k: u8,
    pub sign: i8,
}

/// All 64 basis products, row-major in `(i, j)`.
pub fn multiplication_table() -> Vec<TableEntry> {
    let mut table = Vec::with_capacity(64);
    for i in 1..=8 {
        for j in 1..=8 {
            let p = oct_mul(&Octonion::basis(i), &Octonion::basis(j));
            let (k, c) = p
                .0
                .iter()
                .enumerate()
                .find(|(_, c)| c.abs() > 0.5)
                .expect("basis product is a signed basis element");
            table.push(TableEntry {
                i: i as u8,
                j: j as u8,
                k: (k + 1) as u8,
                sign: c.signum() as i8,
            });
        }
    }
    table
}
