//! Tolerances shared across modules.
//!
//! Defaults can be overridden per call through [`Tolerances`]; reports always
//! echo the values actually used.

use serde::{Deserialize, Serialize};

/// Algebraic identities on ≤7-dimensional products.
pub const ALGEBRA: f64 = 1e-10;
/// `U†U = I` for plane frames.
pub const FRAME_UNITARY: f64 = 1e-10;
/// `Im det U = 0` for special Lagrangian frames.
pub const SPECIAL_PHASE: f64 = 1e-9;
/// Distance of an eigenvalue `e^{2iθ}` from `1` below which a pair is not transverse.
pub const TRANSVERSE: f64 = 1e-8;
/// `Σθ = mπ` for angle vectors.
pub const TRACE_CLASS: f64 = 1e-8;
/// Equal-angle strata.
pub const GAP: f64 = 1e-6;
/// `θ_j = π/2` walls.
pub const WALL: f64 = 1e-8;
/// Singular value cutoff for numerical stabilizer dimensions.
pub const NULLITY: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub algebra: f64,
    pub gap: f64,
    pub wall: f64,
    pub transverse: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: ALGEBRA,
            gap: GAP,
            wall: WALL,
            transverse: TRANSVERSE,
        }
    }
}
