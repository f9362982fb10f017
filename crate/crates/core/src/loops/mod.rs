//! Sampled loops over an intersection circle and the two ℤ₂ invariants.
//!
//! * η: holonomy of the negative eigenline of the graph bilinear form along
//!   a loop of close graphical pairs.
//! * μ: spin-lift parity of the loop comparing two framings of the normal
//!   bundles through the pairing isomorphism.

mod consum;
mod eta;
mod mu;
mod pair_loop;

use thiserror::Error;

pub use consum::{connected_sum_descriptor, ConnectedSumDescriptor, DescriptorReport};
pub use eta::{
    eta_invariant, eta_report, generate_model_loop, perturb_loop, refine_loop, trajectory,
    EtaReport, ModelKind, TrajectoryRow,
};
pub use mu::{comparison_loop, framing_loop, mu_parity, FramingLoop, REFLECTION};
pub use pair_loop::{validate_pair_loop, LoopDiagnostics, PairLoop, PairSample};

use crate::linalg::LinalgError;
use crate::slag::SlagError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LoopError {
    #[error("loop has no samples")]
    Empty,
    #[error("continuity tolerance must be positive, got {0}")]
    BadDelta(f64),
    #[error("step {index} → {next} has S-distance {step:e} above δ = {delta:e}")]
    Discontinuous {
        index: usize,
        next: usize,
        step: f64,
        delta: f64,
    },
    #[error("sample {index} is not transverse (margin {margin:e})")]
    NotTransverse { index: usize, margin: f64 },
    #[error("sample {index} is in region {region}, expected {expected}")]
    NotCloseGraphical {
        index: usize,
        region: &'static str,
        expected: &'static str,
    },
    #[error("eigenlines at samples {index} and {next} are nearly orthogonal (|⟨ℓ, ℓ′⟩| = {inner:.3e}); refine the loop")]
    EigenlineAmbiguous { index: usize, next: usize, inner: f64 },
    #[error("λ′ = {0} is outside (0, 1)")]
    BadLambda(f64),
    #[error("at least 8 samples are required, got {0}")]
    TooFewSamples(usize),
    #[error("perturbation left the close graphical region after {0} attempts")]
    PerturbationLeftRegion(usize),
    #[error("refined loop failed validation: {0}")]
    RefinementFailed(String),
    #[error("frame {index} is not orthonormal (residual {residual:e})")]
    NotOrthonormal { index: usize, residual: f64 },
    #[error("loops have mismatched lengths: {0}")]
    LengthMismatch(String),
    #[error("comparison matrix {index} has det {det} (expected +1)")]
    OrientationMismatch { index: usize, det: f64 },
    #[error("sampling too coarse between {index} and {next}: rotation angle {angle} ≥ π/2")]
    SamplingTooCoarse { index: usize, next: usize, angle: f64 },
    #[error("no components")]
    EmptyComponents,
    #[error(transparent)]
    Slag(#[from] SlagError),
    #[error(transparent)]
    Linalg(LinalgError),
}

impl From<LinalgError> for LoopError {
    fn from(e: LinalgError) -> Self {
        match e {
            LinalgError::SamplingTooCoarse { index, next, angle } => {
                LoopError::SamplingTooCoarse { index, next, angle }
            }
            other => LoopError::Linalg(other),
        }
    }
}
