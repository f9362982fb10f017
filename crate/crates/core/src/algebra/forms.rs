//! Alternating forms on ℝ⁷ = Im(𝕆).
//!
//! A [`KForm`] stores its coefficients sparsely, keyed by strictly increasing
//! tuples of basis labels in `2..=8`. Orientation and metric are the ones of
//! the ordered orthonormal basis `e2, …, e8`.

use std::collections::BTreeMap;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use super::octonion::ImOctonion;

pub const DIM: usize = 7;
const LABELS: [u8; DIM] = [2, 3, 4, 5, 6, 7, 8];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FormError {
    #[error("degree overflow: {0} + {1} exceeds 7")]
    DegreeOverflow(usize, usize),
    #[error("cannot contract a 0-form")]
    ZeroDegree,
    #[error("invalid basis index tuple {0:?}")]
    BadIndex(Vec<u8>),
    #[error("expected {expected} vectors, got {got}")]
    Arity { expected: usize, got: usize },
}

/// Sign of the permutation that sorts `idx`, or `None` when a label repeats.
pub(crate) fn sort_sign(idx: &[u8]) -> Option<(Vec<u8>, f64)> {
    let mut v = idx.to_vec();
    let mut sign = 1.0;
    // insertion sort, counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

fn det(n: usize, m: &mut [f64]) -> f64 {
    let mut d = 1.0;
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&a, &b| m[a * n + c].abs().total_cmp(&m[b * n + c].abs()))
            .unwrap();
        if m[piv * n + c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            for k in 0..n {
                m.swap(c * n + k, piv * n + k);
            }
            d = -d;
        }
        let p = m[c * n + c];
        d *= p;
        for r in (c + 1)..n {
            let f = m[r * n + c] / p;
            if f != 0.0 {
                for k in c..n {
                    m[r * n + k] -= f * m[c * n + k];
                }
            }
        }
    }
    d
}

/// An alternating k-form on ℝ⁷.
#[derive(Debug, Clone, PartialEq)]
pub struct KForm {
    degree: usize,
    terms: BTreeMap<Vec<u8>, f64>,
}

impl KForm {
    pub fn zero(degree: usize) -> Self {
        assert!(degree <= DIM);
        KForm {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn scalar(c: f64) -> Self {
        let mut f = KForm::zero(0);
        f.add_term(&[], c).unwrap();
        f
    }

    /// `e^{i1} ∧ … ∧ e^{ik}` for labels in any order (the permutation sign is applied).
    pub fn basis(idx: &[u8]) -> Result<Self, FormError> {
        let mut f = KForm::zero(idx.len());
        f.add_term(idx, 1.0)?;
        Ok(f)
    }

    /// Build a form from `(labels, coefficient)` pairs; repeated tuples accumulate.
    pub fn from_terms(degree: usize, terms: &[(&[u8], f64)]) -> Result<Self, FormError> {
        let mut f = KForm::zero(degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(FormError::BadIndex(idx.to_vec()));
            }
            f.add_term(idx, *c)?;
        }
        Ok(f)
    }

    /// Volume form `e^{2345678}`.
    pub fn volume() -> Self {
        KForm::basis(&LABELS).unwrap()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Nonzero terms in increasing tuple order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u8], f64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.abs() <= tol)
    }

    fn add_term(&mut self, idx: &[u8], c: f64) -> Result<(), FormError> {
        if idx.len() != self.degree || idx.iter().any(|l| !(2..=8).contains(l)) {
            return Err(FormError::BadIndex(idx.to_vec()));
        }
        let (sorted, sign) = sort_sign(idx).ok_or_else(|| FormError::BadIndex(idx.to_vec()))?;
        let v = self.terms.get(&sorted).copied().unwrap_or(0.0) + sign * c;
        if v == 0.0 {
            self.terms.remove(&sorted);
        } else {
            self.terms.insert(sorted, v);
        }
        Ok(())
    }

    /// Coefficient on the given labels (any order; repeated labels give 0).
    pub fn coeff(&self, idx: &[u8]) -> f64 {
        if idx.len() != self.degree {
            return 0.0;
        }
        match sort_sign(idx) {
            Some((sorted, sign)) => sign * self.terms.get(&sorted).copied().unwrap_or(0.0),
            None => 0.0,
        }
    }

    /// Evaluate on `k` vectors.
    pub fn eval(&self, vectors: &[ImOctonion]) -> Result<f64, FormError> {
        let k = self.degree;
        if vectors.len() != k {
            return Err(FormError::Arity {
                expected: k,
                got: vectors.len(),
            });
        }
        let mut total = 0.0;
        let mut m = vec![0.0; k * k];
        for (idx, c) in &self.terms {
            for (a, &l) in idx.iter().enumerate() {
                for (b, v) in vectors.iter().enumerate() {
                    m[a * k + b] = v.coord(l);
                }
            }
            total += c * det(k, &mut m);
        }
        Ok(total)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = KForm::zero(self.degree);
        for (k, v) in &self.terms {
            if v * s != 0.0 {
                out.terms.insert(k.clone(), v * s);
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree, "adding forms of different degree");
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k, *v).unwrap();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Largest coefficient difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.degree != other.degree {
            return f64::INFINITY;
        }
        self.sub(other).terms.values().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Drop coefficients below `tol`.
    pub fn pruned(&self, tol: f64) -> Self {
        KForm {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.abs() > tol)
                .map(|(k, c)| (k.clone(), *c))
                .collect(),
        }
    }

    /// The form `w ↦ self(P w₁, …, P w_k)` where `P` is the orthogonal
    /// projection onto the span of the orthonormal set `basis`.
    pub fn restrict_to(&self, basis: &[ImOctonion]) -> Self {
        // P = Σ b bᵀ, so P*e^l = Σ_b b_l b^♭
        let mut out = KForm::zero(self.degree);
        if self.degree == 0 {
            return self.clone();
        }
        let k = self.degree;
        // coefficients of P*e^l in the standard coframe
        let pe: Vec<[f64; DIM]> = LABELS
            .iter()
            .map(|&l| {
                let mut row = [0.0; DIM];
                for b in basis {
                    for (m, r) in row.iter_mut().enumerate() {
                        *r += b.coord(l) * b.0[m];
                    }
                }
                row
            })
            .collect();
        let mut target = vec![0u8; k];
        for (idx, c) in &self.terms {
            // expand e^{i1}∧…∧e^{ik} after pullback, one sorted target tuple at a time
            for_each_combination(k, &mut target, 0, 0, &mut |t: &[u8]| {
                let mut m = vec![0.0; k * k];
                for (a, &l) in idx.iter().enumerate() {
                    for (b, &tl) in t.iter().enumerate() {
                        m[a * k + b] = pe[(l - 2) as usize][(tl - 2) as usize];
                    }
                }
                let v = c * det(k, &mut m);
                if v.abs() > 1e-300 {
                    out.add_term(t, v).unwrap();
                }
            });
        }
        out
    }
}

fn for_each_combination(
    k: usize,
    buf: &mut Vec<u8>,
    pos: usize,
    start: usize,
    f: &mut dyn FnMut(&[u8]),
) {
    if pos == k {
        f(buf);
        return;
    }
    for i in start..DIM {
        buf[pos] = LABELS[i];
        for_each_combination(k, buf, pos + 1, i + 1, f);
    }
}

/// The standard G₂ 3-form
/// `e*234 − e*278 − e*638 − e*674 − e*265 − e*375 − e*485`.
pub fn phi0() -> KForm {
    KForm::from_terms(
        3,
        &[
            (&[2, 3, 4], 1.0),
            (&[2, 7, 8], -1.0),
            (&[6, 3, 8], -1.0),
            (&[6, 7, 4], -1.0),
            (&[2, 6, 5], -1.0),
            (&[3, 7, 5], -1.0),
            (&[4, 8, 5], -1.0),
        ],
    )
    .expect("static index tuples are valid")
}

/// `a ∧ b`.
pub fn wedge(a: &KForm, b: &KForm) -> Result<KForm, FormError> {
    if a.degree + b.degree > DIM {
        return Err(FormError::DegreeOverflow(a.degree, b.degree));
    }
    let mut out = KForm::zero(a.degree + b.degree);
    let mut idx = Vec::with_capacity(out.degree);
    for (ia, ca) in &a.terms {
        for (ib, cb) in &b.terms {
            idx.clear();
            idx.extend_from_slice(ia);
            idx.extend_from_slice(ib);
            if sort_sign(&idx).is_some() {
                out.add_term(&idx, ca * cb)?;
            }
        }
    }
    Ok(out)
}

/// Interior product `v ⌟ a`, contracting into the first slot.
pub fn contract(a: &KForm, v: &ImOctonion) -> Result<KForm, FormError> {
    if a.degree == 0 {
        return Err(FormError::ZeroDegree);
    }
    let mut out = KForm::zero(a.degree - 1);
    let mut rest = Vec::with_capacity(a.degree - 1);
    for (idx, c) in &a.terms {
        for (s, &l) in idx.iter().enumerate() {
            let vl = v.coord(l);
            if vl == 0.0 {
                continue;
            }
            rest.clear();
            rest.extend(idx.iter().enumerate().filter(|(t, _)| *t != s).map(|(_, &x)| x));
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            out.add_term(&rest, sign * vl * c)?;
        }
    }
    Ok(out)
}

/// Euclidean Hodge star on ℝ⁷, oriented by `e2, …, e8`.
pub fn hodge_star(a: &KForm) -> KForm {
    let mut out = KForm::zero(DIM - a.degree);
    for (idx, c) in &a.terms {
        let comp: Vec<u8> = LABELS.iter().copied().filter(|l| !idx.contains(l)).collect();
        let mut joined = idx.clone();
        joined.extend_from_slice(&comp);
        let (_, sign) = sort_sign(&joined).expect("complementary labels are distinct");
        out.add_term(&comp, sign * c).unwrap();
    }
    out
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    idx: Vec<u8>,
    c: f64,
}

#[derive(Serialize, Deserialize)]
struct KFormDoc {
    degree: usize,
    terms: Vec<TermDoc>,
}

impl Serialize for KForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        KFormDoc {
            degree: self.degree,
            terms: self
                .terms
                .iter()
                .map(|(k, v)| TermDoc { idx: k.clone(), c: *v })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = KFormDoc::deserialize(d)?;
        if doc.degree > DIM {
            return Err(serde::de::Error::custom(format!("degree {} exceeds 7", doc.degree)));
        }
        let mut f = KForm::zero(doc.degree);
        for t in doc.terms {
            let strictly_increasing = t.idx.windows(2).all(|w| w[0] < w[1]);
            if !strictly_increasing {
                return Err(serde::de::Error::custom(format!(
                    "index tuple {:?} is not strictly increasing",
                    t.idx
                )));
            }
            f.add_term(&t.idx, t.c).map_err(serde::de::Error::custom)?;
        }
        Ok(f)
    }
}
