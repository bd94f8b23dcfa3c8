//! Exact-size complex linear algebra (2×2 and 3×3) and entropy helpers.

mod eigen;
mod entropy;
mod matrix;

pub use eigen::{hermitian_eigen, hermitian_eigen_with_tol, unitary_exp, Spectrum};
pub use entropy::{binary_entropy_bits, clamp_probability, shannon_entropy_bits};
pub use matrix::SmallMatrix;

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;

/// `⟨u|v⟩` with the conjugate on the left argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    debug_assert_eq!(u.len(), v.len());
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Euclidean norm of a complex vector.
pub fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `sin(x)/x`, continuous at the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}
