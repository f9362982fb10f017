use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use super::G2Error;
use crate::linalg::nested;
use crate::slag::SymForm3;

/// Symmetry residuals above this mark a field as not closed.
pub const FLAG_TOL: f64 = 1e-3;

type Grid4 = Vec<Vec<Vec<Vec<f64>>>>;

/// Coefficients `f₁, f₂, f₃` of a self-dual 2-form sampled on the cubic
/// stencil `h·{−r…r}⁴` in coordinates `(x₀, x₁, x₂, x₃)`, with `x₀` along `u`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldDoc", into = "FieldDoc")]
pub struct SelfDualFieldSample {
    h: f64,
    radius: usize,
    f: [Vec<f64>; 3],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    h: f64,
    radius: usize,
    f: [Grid4; 3],
}

impl TryFrom<FieldDoc> for SelfDualFieldSample {
    type Error = G2Error;
    fn try_from(d: FieldDoc) -> Result<Self, G2Error> {
        let n = 2 * d.radius + 1;
        let mut flat: [Vec<f64>; 3] = Default::default();
        for (j, grid) in d.f.iter().enumerate() {
            let ok = grid.len() == n
                && grid.iter().all(|a| {
                    a.len() == n && a.iter().all(|b| b.len() == n && b.iter().all(|c| c.len() == n))
                });
            if !ok {
                return Err(G2Error::BadStencil(format!(
                    "f[{j}] is not a {n}×{n}×{n}×{n} array"
                )));
            }
            flat[j] = grid.iter().flatten().flatten().flatten().copied().collect();
        }
        SelfDualFieldSample::new(d.h, d.radius, flat)
    }
}

impl From<SelfDualFieldSample> for FieldDoc {
    fn from(s: SelfDualFieldSample) -> Self {
        let n = s.side();
        let f = std::array::from_fn(|j| {
            (0..n)
                .map(|a| {
                    (0..n)
                        .map(|b| {
                            (0..n)
                                .map(|c| (0..n).map(|d| s.f[j][s.flat([a, b, c, d])]).collect())
                                .collect()
                        })
                        .collect()
                })
                .collect()
        });
        FieldDoc {
            h: s.h,
            radius: s.radius,
            f,
        }
    }
}

impl SelfDualFieldSample {
    pub fn new(h: f64, radius: usize, f: [Vec<f64>; 3]) -> Result<Self, G2Error> {
        if !(h > 0.0 && h <= 0.1) {
            return Err(G2Error::BadStencil(format!("spacing h = {h} must lie in (0, 0.1]")));
        }
        if radius < 1 {
            return Err(G2Error::BadStencil("radius must be at least 1".into()));
        }
        let side = 2 * radius + 1;
        if f.iter().any(|g| g.len() != side.pow(4)) {
            return Err(G2Error::BadStencil(format!("expected {} samples", side.pow(4))));
        }
        let s = SelfDualFieldSample { h, radius, f };
        let r = radius as i64;
        let mut worst: f64 = 0.0;
        for i in -r..=r {
            for g in &s.f {
                worst = worst.max(g[s.flat_signed([i, 0, 0, 0])].abs());
            }
        }
        if worst > 1e-9 {
            return Err(G2Error::FieldNonvanishingOnZ(worst));
        }
        Ok(s)
    }

    /// Samples `field(x)` at every stencil point.
    pub fn from_fn(
        h: f64,
        radius: usize,
        field: impl Fn([f64; 4]) -> [f64; 3],
    ) -> Result<Self, G2Error> {
        let side = 2 * radius + 1;
        let mut f: [Vec<f64>; 3] = Default::default();
        for idx in 0..side.pow(4) {
            let mut rem = idx;
            let mut x = [0.0; 4];
            for k in (0..4).rev() {
                x[k] = h * ((rem % side) as f64 - radius as f64);
                rem /= side;
            }
            let v = field(x);
            for j in 0..3 {
                f[j].push(v[j]);
            }
        }
        SelfDualFieldSample::new(h, radius, f)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    fn side(&self) -> usize {
        2 * self.radius + 1
    }

    fn flat(&self, idx: [usize; 4]) -> usize {
        let n = self.side();
        ((idx[0] * n + idx[1]) * n + idx[2]) * n + idx[3]
    }

    fn flat_signed(&self, idx: [i64; 4]) -> usize {
        let r = self.radius as i64;
        self.flat(idx.map(|i| (i + r) as usize))
    }

    /// `f_j` at stencil offset `idx ∈ {−r…r}⁴`.
    pub fn value(&self, j: usize, idx: [i64; 4]) -> f64 {
        self.f[j][self.flat_signed(idx)]
    }
}

/// Output of [`selfdual_graph_bform`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfDualReport {
    /// `B_km = D_{e_k} f_m` before symmetrization.
    #[serde(with = "nested::real")]
    pub raw: Matrix3<f64>,
    pub b: SymForm3,
    /// `max |B_km − B_mk|`.
    pub symmetry_residual: f64,
    /// `|tr B − det B|` of the raw matrix.
    pub trace_residual: f64,
    pub flagged: bool,
}

/// Central differences `D_{e_k} f_m` at the stencil center, `k, m ∈ {1,2,3}`.
pub fn selfdual_graph_bform(field: &SelfDualFieldSample) -> SelfDualReport {
    let h = field.h;
    let raw = Matrix3::from_fn(|k, m| {
        let mut plus = [0i64; 4];
        let mut minus = [0i64; 4];
        plus[k + 1] = 1;
        minus[k + 1] = -1;
        (field.value(m, plus) - field.value(m, minus)) / (2.0 * h)
    });
    let asym = raw - raw.transpose();
    let symmetry_residual = asym.abs().max();
    let trace_residual = (raw.trace() - raw.determinant()).abs();
    SelfDualReport {
        raw,
        b: SymForm3::symmetrized(&raw),
        symmetry_residual,
        trace_residual,
        flagged: symmetry_residual > FLAG_TOL,
    }
}

/// `log₂(coarse/fine)` for residuals at spacings `h` and `h/2`.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}
