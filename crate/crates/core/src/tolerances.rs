//! Numerical tolerances shared across the crate.
//!
//! Functions that depend on one of these take it from here; the few that
//! tests need to tighten or relax also have a `*_with_tol` variant.

/// Max `|m_ij − conj(m_ji)|` for a matrix to count as Hermitian.
pub const HERMITIAN: f64 = 1e-12;

/// Max deviation of eigenvector inner products from δ_ij.
pub const ORTHONORMAL: f64 = 1e-10;

/// Max-norm bound on `‖Σ λ v v† − M‖`.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Max-norm bound on `‖U†U − I‖` for exponentials of Hermitian matrices.
pub const UNITARITY: f64 = 1e-12;

/// Probabilities in `[−CLAMP, 0)` are treated as exact zeros.
pub const PROBABILITY_CLAMP: f64 = 1e-12;

/// Allowed `|Σp − 1|` for a probability vector.
pub const NORMALIZATION: f64 = 1e-9;

/// Allowed `||α|² + |β|² − 1|` and unit-norm drift of pure states.
pub const STATE_NORM: f64 = 1e-12;

/// Allowed trace drift for reduced density matrices.
pub const TRACE: f64 = 1e-10;

/// Eigenvalues of density matrices may dip this far below zero.
pub const POSITIVITY: f64 = 1e-10;

/// Below this system entropy (bits) a profile is flagged `NoDecoherence`.
pub const MIN_SYSTEM_ENTROPY: f64 = 1e-12;

/// Slack on the `Ω ≤ π/2` bound so grids ending at `FRAC_PI_2` stay valid.
pub const ANGLE_SLACK: f64 = 1e-12;

/// Largest `γ·dt` used by the fixed-step dephasing integrator.
pub const INTEGRATOR_STEP: f64 = 1e-3;
