//! Special Lagrangian 3-planes in ℂ³ and pairs of them.
//!
//! ℂ³ carries `ω₀ = Σ dx_k∧dy_k` and `Ω₀ = dz₁∧dz₂∧dz₃`. A plane is stored as a
//! unitary frame whose real span is the plane. Everything here is written
//! for n = 3.

mod angles;
mod graph;
mod plane;

use thiserror::Error;

pub use angles::{
    angle_involution, characteristic_angles, classify_region, classify_stabilizer, normal_form,
    stabilizer_dimension_numeric, AngleVector, NormalForm, RegionClass, StabilizerClass,
};
pub use graph::{
    alpha_curve, fixes_pair, graph_bilinear_form, graph_over, graphicality_margin, is_graphical,
    negative_eigenline, project_trace_det, SymForm3,
};
pub use plane::{
    is_special_lagrangian, plane_from_angles, realify, transversality_margin, SLagPlane,
};

use crate::linalg::LinalgError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SlagError {
    #[error("frame is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("plane is not special Lagrangian (|Im det U| = {0:e})")]
    NotSpecialLagrangian(f64),
    #[error("planes are not transverse (margin {0:e})")]
    NotTransverse(f64),
    #[error("pair is not graphical (margin {0:e})")]
    NotGraphical(f64),
    #[error("angles {theta:?} do not sum to a multiple of π in {{π, 2π}}")]
    BadAngles { theta: [f64; 3] },
    #[error("form is not symmetric (residual {0:e})")]
    NotSymmetric(f64),
    #[error("eigenvalue signature is not (−,+,+): {0:?}")]
    EigenvalueSignatureViolated([f64; 3]),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
