//! Collision-model simulator for the temporal unfolding of quantum Darwinism.
//!
//! A qubit system collides once with each of a long train of fresh ancillas.
//! Every collision imprints a conditional state on the ancilla, so the global
//! state keeps a two-branch structure
//!
//! ```text
//! |Ψ_ℓ⟩ = α|↓⟩ ⊗ |φ⁺⟩^{⊗ℓ} ⊗ |a⟩^{⊗(n−ℓ)} + β|↑⟩ ⊗ |φ⁻⟩^{⊗ℓ} ⊗ |a⟩^{⊗(n−ℓ)}
//! ```
//!
//! and every entropy of interest follows from the single overlap
//! `κ = ⟨φ⁻|φ⁺⟩`. The crate is organised as:
//!
//! - [`math`]: 2×2 / 3×3 complex Hermitian algebra and entropies.
//! - [`models`]: the qubit-ancilla (base), Zeno and anti-Zeno ancilla models.
//! - [`branch`]: closed-form entropies, mutual information and redundancy.
//! - [`oracle`]: brute-force state-vector simulation for small environments.
//! - [`lindblad`]: continuous-time dephasing used as a continuum-limit check.
//! - [`sweep`]: parameter grids and the figure presets.
//! - [`io`]: configuration files and CSV/JSON result encoding.

pub mod branch;
pub mod error;
pub mod io;
pub mod lindblad;
pub mod math;
pub mod models;
pub mod oracle;
pub mod sweep;
pub mod tolerances;

pub use branch::{DarwinProfile, FragmentSize, SystemAmplitudes};
pub use error::{Error, Result};
pub use math::C64;
pub use models::{BranchPair, ModelKind, ModelParams};
pub use sweep::{Preset, SweepConfig, SweepResult};
