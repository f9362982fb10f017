//! Octonion arithmetic and exterior algebra on ℝ⁷.

mod forms;
mod octonion;

pub use forms::{contract, hodge_star, phi0, wedge, FormError, KForm, DIM};
pub use octonion::{cross, multiplication_table, oct_mul, ImOctonion, Octonion, TableEntry};

/// `φ₀(x, y, z)` evaluated directly from the coefficient table.
pub fn phi0_eval(x: &ImOctonion, y: &ImOctonion, z: &ImOctonion) -> f64 {
    phi0().eval(&[*x, *y, *z]).expect("three vectors for a 3-form")
}

/// `*φ₀`, the coassociative 4-form.
pub fn psi0() -> KForm {
    hodge_star(&phi0())
}
