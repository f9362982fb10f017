//! The SU(3) structure on the complement of a unit direction in Im 𝕆,
//! coassociative 4-planes through that direction, and finite-difference
//! bilinear forms of sampled self-dual fields.

mod coassoc;
mod field;
mod structure;

use thiserror::Error;

pub use coassoc::{
    coassoc_from_slag, eq24_iso, is_coassociative, normal_slag_pair, pairing_iso,
    pairing_orientation, selfdual_parts, CoassocPlane, PairingOrientation,
};
pub use field::{selfdual_graph_bform, observed_order, SelfDualFieldSample, SelfDualReport};
pub use structure::{normal_structure, one_form, vec7, im_oct, NormalStructure, Vec7};

use crate::slag::SlagError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum G2Error {
    #[error("direction is not a unit vector (|u| = {0})")]
    NotUnit(f64),
    #[error("spanning vectors are linearly dependent (smallest singular value {0:e})")]
    DegenerateSpan(f64),
    #[error("spanning vectors are not orthonormal (residual {0:e})")]
    NotOrthonormal(f64),
    #[error("plane is not coassociative (residual {0:e})")]
    NotCoassociative(f64),
    #[error("orientation flag {given} disagrees with the self-dual orientation {expected}")]
    OrientationFlag { given: i8, expected: i8 },
    #[error("plane is not special Lagrangian (residual {0:e})")]
    NotSpecialLagrangian(f64),
    #[error("plane does not contain the direction (distance {0:e})")]
    DirectionNotContained(f64),
    #[error("planes meet in more than a line (margin {0:e})")]
    ExcessIntersection(f64),
    #[error("vector is not normal to the plane (residual {0:e})")]
    NotNormal(f64),
    #[error("field does not vanish on the axis (max {0:e})")]
    FieldNonvanishingOnZ(f64),
    #[error("stencil shape is invalid: {0}")]
    BadStencil(String),
    #[error(transparent)]
    Slag(#[from] SlagError),
}
