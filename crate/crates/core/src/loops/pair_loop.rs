use serde::{Deserialize, Serialize};

use super::LoopError;
use crate::linalg::nested;
use crate::slag::{
    characteristic_angles, classify_region, transversality_margin, graphicality_margin,
    RegionClass, SLagPlane,
};
use crate::tol;

/// JSON: `{"V": frame, "Vp": frame}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "SampleDoc", into = "SampleDoc")]
pub struct PairSample {
    pub v: SLagPlane,
    pub vp: SLagPlane,
}

impl PairSample {
    pub fn swapped(&self) -> PairSample {
        PairSample {
            v: self.vp,
            vp: self.v,
        }
    }
}

/// A cyclic sequence of pairs over a sampled circle. The sample after the
/// last is the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LoopDoc", into = "LoopDoc")]
pub struct PairLoop {
    pub component: u64,
    pub delta: f64,
    pub samples: Vec<PairSample>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SampleDoc {
    #[serde(rename = "V", with = "plane_frame")]
    v: SLagPlane,
    #[serde(rename = "Vp", with = "plane_frame")]
    vp: SLagPlane,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LoopDoc {
    component: u64,
    delta: f64,
    samples: Vec<PairSample>,
}

/// A plane written as its bare frame, validated as it is read.
mod plane_frame {
    use serde::{de::Error, Deserializer, Serializer};

    use super::{nested, SLagPlane};

    pub fn serialize<S: Serializer>(p: &SLagPlane, s: S) -> Result<S::Ok, S::Error> {
        nested::complex::serialize(p.frame(), s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<SLagPlane, D::Error> {
        SLagPlane::new(nested::complex::deserialize(d)?).map_err(D::Error::custom)
    }
}

impl From<SampleDoc> for PairSample {
    fn from(s: SampleDoc) -> Self {
        PairSample { v: s.v, vp: s.vp }
    }
}

impl From<PairSample> for SampleDoc {
    fn from(s: PairSample) -> Self {
        SampleDoc { v: s.v, vp: s.vp }
    }
}

impl TryFrom<LoopDoc> for PairLoop {
    type Error = LoopError;
    fn try_from(d: LoopDoc) -> Result<Self, LoopError> {
        PairLoop::new(d.component, d.delta, d.samples)
    }
}

impl From<PairLoop> for LoopDoc {
    fn from(l: PairLoop) -> Self {
        LoopDoc {
            component: l.component,
            delta: l.delta,
            samples: l.samples,
        }
    }
}

impl PairLoop {
    pub fn new(component: u64, delta: f64, samples: Vec<PairSample>) -> Result<Self, LoopError> {
        if samples.is_empty() {
            return Err(LoopError::Empty);
        }
        if !(delta > 0.0) {
            return Err(LoopError::BadDelta(delta));
        }
        Ok(PairLoop {
            component,
            delta,
            samples,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Every pair `(V, V′)` replaced by `(V′, V)`.
    pub fn swapped(&self) -> PairLoop {
        PairLoop {
            samples: self.samples.iter().map(PairSample::swapped).collect(),
            ..self.clone()
        }
    }

    /// The same loop started at sample `k`.
    pub fn rotated(&self, k: usize) -> PairLoop {
        let mut samples = self.samples.clone();
        samples.rotate_left(k % self.len());
        PairLoop {
            samples,
            ..self.clone()
        }
    }

    /// `max(dist(V_i, V_{i+1}), dist(V′_i, V′_{i+1}))` for each cyclic step.
    pub fn steps(&self) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let (a, b) = (&self.samples[i], &self.samples[(i + 1) % n]);
                a.v.distance(&b.v).max(a.vp.distance(&b.vp))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopDiagnostics {
    pub samples: usize,
    pub max_step: f64,
    pub delta: f64,
    pub min_transversality: f64,
    pub min_graphicality: f64,
    pub region: RegionClass,
    pub regions: Vec<RegionClass>,
}

/// Checks continuity, transversality, and that every sample lies in one
/// close graphical region.
pub fn validate_pair_loop(l: &PairLoop) -> Result<LoopDiagnostics, LoopError> {
    let steps = l.steps();
    let n = l.len();
    for (i, s) in steps.iter().enumerate() {
        if *s > l.delta {
            return Err(LoopError::Discontinuous {
                index: i,
                next: (i + 1) % n,
                step: *s,
                delta: l.delta,
            });
        }
    }
    let mut regions = Vec::with_capacity(n);
    let mut min_t = f64::INFINITY;
    let mut min_g = f64::INFINITY;
    for (i, s) in l.samples.iter().enumerate() {
        let margin = 2.0 * transversality_margin(&s.v, &s.vp);
        if margin < tol::TRANSVERSE {
            return Err(LoopError::NotTransverse { index: i, margin });
        }
        min_t = min_t.min(margin);
        min_g = min_g.min(graphicality_margin(&s.v, &s.vp));
        let theta = characteristic_angles(&s.v, &s.vp)?;
        let region = classify_region(&theta, tol::WALL);
        let expected = regions.first().copied().unwrap_or(region);
        if !region.is_close() || region != expected {
            let expected = if expected.is_close() { expected } else { RegionClass::SPiClose };
            return Err(LoopError::NotCloseGraphical {
                index: i,
                region: region.tag(),
                expected: expected.tag(),
            });
        }
        regions.push(region);
    }
    Ok(LoopDiagnostics {
        samples: n,
        max_step: steps.iter().copied().fold(0.0, f64::max),
        delta: l.delta,
        min_transversality: min_t,
        min_graphicality: min_g,
        region: regions[0],
        regions,
    })
}
