//! Flat-space linear algebra behind transverse pairs of coassociative 4-planes.
//!
//! * [`algebra`]: octonions, the G₂ 3-form `φ₀` and exterior algebra on ℝ⁷.
//! * [`linalg`]: SU(3) projection, symmetric unitary diagonalization and
//!   quaternion lifts of rotation paths.
//! * [`slag`]: special Lagrangian 3-planes in ℂ³, characteristic angles,
//!   normal forms, stabilizers, regions and graph bilinear forms.
//! * [`g2`]: the SU(3) structure on the complement of a unit vector in ℝ⁷,
//!   coassociative planes and the finite-difference bilinear form.
//! * [`loops`]: sampled loops over a circle and the two ℤ₂ invariants η, μ.
//! * [`random`], [`io`], [`verify`]: seeded generators, JSON documents and
//!   invariant suites used by the command-line tool.

pub mod algebra;
pub mod g2;
pub mod io;
pub mod linalg;
pub mod loops;
pub mod random;
pub mod slag;
pub mod tol;
pub mod verify;

mod z2;

pub use z2::Z2;
