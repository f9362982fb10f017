use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::LoopError;
use crate::linalg::{loop_parity, nested, orthogonality_residual, real_polar, LinalgError, RotationMatrix};
use crate::Z2;

/// `diag(1, 1, −1)` in the frame of the second normal bundle. Composed with
/// an orientation-reversing pairing it gives an orientation-preserving map.
pub const REFLECTION: Matrix3<f64> = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -1.0);

const FRAME_TOL: f64 = 1e-9;

/// Cyclically sampled orthonormal frames of a rank-3 bundle over a circle.
/// Columns of each sample are the frame vectors in fibre coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FramingDoc", into = "FramingDoc")]
pub struct FramingLoop {
    pub component: u64,
    pub delta: f64,
    samples: Vec<Matrix3<f64>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FramingDoc {
    component: u64,
    delta: f64,
    samples: Vec<nested::RealRows>,
}

impl TryFrom<FramingDoc> for FramingLoop {
    type Error = LoopError;
    fn try_from(d: FramingDoc) -> Result<Self, LoopError> {
        FramingLoop::new(
            d.component,
            d.delta,
            d.samples.into_iter().map(Into::into).collect(),
        )
    }
}

impl From<FramingLoop> for FramingDoc {
    fn from(f: FramingLoop) -> Self {
        FramingDoc {
            component: f.component,
            delta: f.delta,
            samples: f.samples.into_iter().map(Into::into).collect(),
        }
    }
}

impl FramingLoop {
    pub fn new(component: u64, delta: f64, samples: Vec<Matrix3<f64>>) -> Result<Self, LoopError> {
        if samples.is_empty() {
            return Err(LoopError::Empty);
        }
        if !(delta > 0.0) {
            return Err(LoopError::BadDelta(delta));
        }
        for (index, f) in samples.iter().enumerate() {
            let residual = orthogonality_residual(f);
            if residual >= FRAME_TOL {
                return Err(LoopError::NotOrthonormal { index, residual });
            }
        }
        let n = samples.len();
        for i in 0..n {
            let next = (i + 1) % n;
            let step = (samples[next] - samples[i]).norm();
            if step > delta {
                return Err(LoopError::Discontinuous {
                    index: i,
                    next,
                    step,
                    delta,
                });
            }
        }
        Ok(FramingLoop {
            component,
            delta,
            samples,
        })
    }

    pub fn samples(&self) -> &[Matrix3<f64>] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// `F_i = G · Rot(axis, 2π·twists·i/n)` for `i < n`, with `δ` set to twice
/// the largest step.
pub fn framing_loop(
    base: &Matrix3<f64>,
    axis: &Vector3<f64>,
    twists: i32,
    n: usize,
) -> Result<FramingLoop, LoopError> {
    let samples: Vec<Matrix3<f64>> = (0..n)
        .map(|i| {
            let angle = std::f64::consts::TAU * twists as f64 * i as f64 / n as f64;
            base * RotationMatrix::about_axis(axis, angle).matrix()
        })
        .collect();
    let step = (0..n)
        .map(|i| (samples[(i + 1) % n] - samples[i]).norm())
        .fold(0.0, f64::max);
    FramingLoop::new(0, (2.0 * step).max(1e-6), samples)
}

fn check_lengths(fplus: &FramingLoop, fminus: &FramingLoop, iso: &[Matrix3<f64>]) -> Result<(), LoopError> {
    if fplus.len() != fminus.len() || fplus.len() != iso.len() {
        return Err(LoopError::LengthMismatch(format!(
            "F+ has {}, F- has {}, iso has {}",
            fplus.len(),
            fminus.len(),
            iso.len()
        )));
    }
    Ok(())
}

/// `R_i = F₋ᵢᵀ · r · isoᵢ · F₊ᵢ`, with the pairing replaced by its orthogonal
/// polar factor.
pub fn comparison_loop(
    fplus: &FramingLoop,
    fminus: &FramingLoop,
    iso: &[Matrix3<f64>],
) -> Result<Vec<RotationMatrix>, LoopError> {
    check_lengths(fplus, fminus, iso)?;
    fplus
        .samples
        .iter()
        .zip(&fminus.samples)
        .zip(iso)
        .enumerate()
        .map(|(index, ((p, m), a))| {
            let r = real_polar(&(m.transpose() * REFLECTION * a * p));
            let det = r.determinant();
            if det < 0.0 {
                return Err(LoopError::OrientationMismatch { index, det });
            }
            Ok(RotationMatrix::new(r)?)
        })
        .collect()
}

/// `+1` when the two framings agree up to homotopy through the pairing.
pub fn mu_parity(fplus: &FramingLoop, fminus: &FramingLoop, iso: &[Matrix3<f64>]) -> Result<Z2, LoopError> {
    let r = comparison_loop(fplus, fminus, iso)?;
    let n = r.len();
    loop_parity(&r).map_err(|e| match e {
        LinalgError::SamplingTooCoarse { index, next, angle } => LoopError::SamplingTooCoarse {
            index,
            next: next % n,
            angle,
        },
        other => other.into(),
    })
}
