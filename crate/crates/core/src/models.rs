//! Ancilla models and their per-collision branch states.
//!
//! Every model couples the system through `ω σ̂ᶻ ⊗ X` for a collision time
//! `τ`, where `X` acts on the ancilla:
//!
//! - [`ModelKind::Base`]: qubit ancilla with basis `(a, b)`, `X = σ̂ˣ`.
//! - [`ModelKind::Zeno`]: qutrit ancilla with basis `(c, b, a)`, `X` the
//!   Rabi-dressed coupling matrix for `|a⟩ ↔ |c⟩` flopping at rate `Ω`.
//! - [`ModelKind::AntiZeno`]: as Zeno, with the `|c⟩` level detuned by `2ε`.
//!
//! Ancillas start in `|a⟩`. When the system is in `|↓⟩` (σᶻ = −1) the ancilla
//! ends in `plus = e^{+iωτX}|a⟩`; for `|↑⟩` it ends in `minus = e^{−iωτX}|a⟩`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{self, sinc, unitary_exp, SmallMatrix, C64};
use crate::tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Base,
    Zeno,
    AntiZeno,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Base, ModelKind::Zeno, ModelKind::AntiZeno];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Base => "base",
            ModelKind::Zeno => "zeno",
            ModelKind::AntiZeno => "anti-zeno",
        }
    }

    pub fn ancilla_dim(self) -> usize {
        match self {
            ModelKind::Base => 2,
            ModelKind::Zeno | ModelKind::AntiZeno => 3,
        }
    }

    /// Index of `|a⟩` in the ancilla basis.
    pub fn ground_index(self) -> usize {
        match self {
            ModelKind::Base => 0,
            ModelKind::Zeno | ModelKind::AntiZeno => 2,
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(ModelKind::Base),
            "zeno" => Ok(ModelKind::Zeno),
            "anti-zeno" | "antizeno" | "anti_zeno" => Ok(ModelKind::AntiZeno),
            other => Err(Error::params(format!(
                "unknown model `{other}` (expected base, zeno or anti-zeno)"
            ))),
        }
    }
}

/// Physical parameters of one collision model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub kind: ModelKind,
    /// Coupling ω (1/time).
    pub omega: f64,
    /// Collision duration τ.
    pub tau: f64,
    /// Dimensionless Rabi rate Ω ∈ [0, π/2].
    pub rabi: f64,
    /// Dimensionless detuning ε ≥ 0.
    pub detuning: f64,
}

impl ModelParams {
    pub fn new(kind: ModelKind, omega: f64, tau: f64, rabi: f64, detuning: f64) -> Result<Self> {
        let p = Self {
            kind,
            omega,
            tau,
            rabi,
            detuning,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn base(omega: f64, tau: f64) -> Result<Self> {
        Self::new(ModelKind::Base, omega, tau, 0.0, 0.0)
    }

    pub fn zeno(omega: f64, tau: f64, rabi: f64) -> Result<Self> {
        Self::new(ModelKind::Zeno, omega, tau, rabi, 0.0)
    }

    pub fn anti_zeno(omega: f64, tau: f64, rabi: f64, detuning: f64) -> Result<Self> {
        Self::new(ModelKind::AntiZeno, omega, tau, rabi, detuning)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.omega, self.tau, self.rabi, self.detuning]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::params("all parameters must be finite"));
        }
        if self.omega < 0.0 {
            return Err(Error::params(format!("omega = {} must be ≥ 0", self.omega)));
        }
        if self.tau <= 0.0 {
            return Err(Error::params(format!("tau = {} must be > 0", self.tau)));
        }
        if !(0.0..=FRAC_PI_2 + tolerances::ANGLE_SLACK).contains(&self.rabi) {
            return Err(Error::params(format!(
                "rabi = {} outside [0, π/2]",
                self.rabi
            )));
        }
        if self.detuning < 0.0 {
            return Err(Error::params(format!(
                "detuning = {} must be ≥ 0",
                self.detuning
            )));
        }
        match self.kind {
            ModelKind::Base if self.rabi != 0.0 => {
                Err(Error::params("rabi must be 0 for the base model"))
            }
            ModelKind::Base | ModelKind::Zeno if self.detuning != 0.0 => Err(Error::params(
                format!("detuning must be 0 for the {} model", self.kind),
            )),
            _ => Ok(()),
        }
    }

    /// `ωτ`, the rotation angle imparted by one collision.
    pub fn collision_angle(&self) -> f64 {
        self.omega * self.tau
    }

    /// The ancilla operator `X` in `ω σ̂ᶻ ⊗ X`.
    pub fn ancilla_coupling(&self) -> Result<SmallMatrix> {
        self.validate()?;
        match self.kind {
            ModelKind::Base => SmallMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]]),
            ModelKind::Zeno => zeno_matrix(self.rabi),
            ModelKind::AntiZeno => anti_zeno_matrix(self.rabi, self.detuning),
        }
    }

    /// `1 − κ` for the signed closed-form κ, written without cancellation.
    ///
    /// With `κ = cos(2ωτ) + (1 − cos 2ωτ)·w` this is `2 sin²(ωτ)·(1 − w)`,
    /// where `w` is the weight the frozen `|a⟩` component keeps.
    pub fn coherence_gap(&self) -> Result<f64> {
        self.validate()?;
        let s = self.collision_angle().sin();
        let coupled = match self.kind {
            ModelKind::Base => 1.0,
            ModelKind::Zeno => self.rabi.cos().powi(2),
            ModelKind::AntiZeno => {
                let nu = self.rabi.hypot(self.detuning);
                nu.cos().powi(2) + (self.detuning * sinc(nu)).powi(2)
            }
        };
        Ok(2.0 * s * s * coupled)
    }

    /// `ln|κ|`, accurate when κ is close to 1.
    pub fn ln_abs_kappa(&self) -> Result<f64> {
        let gap = self.coherence_gap()?;
        Ok(if gap < 1.0 {
            (-gap).ln_1p()
        } else {
            (gap - 1.0).ln()
        })
    }
}

/// Coupling matrix of the Zeno model in the `(c, b, a)` basis.
pub fn zeno_matrix(rabi: f64) -> Result<SmallMatrix> {
    let (s, c) = rabi.sin_cos();
    let z = C64::new(0.0, 0.0);
    SmallMatrix::from_rows(&[
        [z, C64::new(0.0, -s), z],
        [C64::new(0.0, s), z, C64::new(c, 0.0)],
        [z, C64::new(c, 0.0), z],
    ])
}

/// Coupling matrix of the detuned model in the `(c, b, a)` basis, `ν = √(ε² + Ω²)`.
pub fn anti_zeno_matrix(rabi: f64, detuning: f64) -> Result<SmallMatrix> {
    let nu = rabi.hypot(detuning);
    let sn = sinc(nu);
    let z = C64::new(0.0, 0.0);
    let up = C64::from_polar(1.0, detuning);
    let down = C64::from_polar(1.0, -detuning);
    let cb = C64::new(0.0, rabi * sn) * down;
    let bc = C64::new(0.0, -rabi * sn) * up;
    let ba = up * C64::new(nu.cos(), -detuning * sn);
    let ab = down * C64::new(nu.cos(), detuning * sn);
    SmallMatrix::from_rows(&[[z, cb, z], [bc, z, ba], [z, ab, z]])
}

/// Conditional ancilla states after one collision and their overlap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchPair {
    /// Ancilla state correlated with `|↓⟩`.
    pub plus: Vec<C64>,
    /// Ancilla state correlated with `|↑⟩`.
    pub minus: Vec<C64>,
    /// `⟨minus|plus⟩`.
    pub kappa: C64,
}

pub fn branch_pair(p: &ModelParams) -> Result<BranchPair> {
    p.validate()?;
    let theta = p.collision_angle();
    let (plus, minus) = match p.kind {
        ModelKind::Base => {
            let (s, c) = theta.sin_cos();
            (
                vec![C64::new(c, 0.0), C64::new(0.0, s)],
                vec![C64::new(c, 0.0), C64::new(0.0, -s)],
            )
        }
        ModelKind::Zeno | ModelKind::AntiZeno => {
            let x = p.ancilla_coupling()?;
            let a = p.kind.ground_index();
            let column = |u: SmallMatrix| (0..u.dim()).map(|i| u.get(i, a)).collect::<Vec<_>>();
            (
                column(unitary_exp(&x, -theta)?),
                column(unitary_exp(&x, theta)?),
            )
        }
    };
    let kappa = math::inner(&minus, &plus);
    Ok(BranchPair { plus, minus, kappa })
}

/// Closed-form decoherence factor.
///
/// Base returns `|cos 2ωτ|`; Zeno and anti-Zeno return the signed expressions.
pub fn kappa_closed_form(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    let c = (2.0 * p.omega * p.tau).cos();
    Ok(match p.kind {
        ModelKind::Base => c.abs(),
        ModelKind::Zeno => c * p.rabi.cos().powi(2) + p.rabi.sin().powi(2),
        ModelKind::AntiZeno => {
            let (om, eps) = (p.rabi, p.detuning);
            let nu = om.hypot(eps);
            let nu2 = nu * nu;
            if nu2 > 1e-200 {
                (om * om * nu.sin().powi(2)
                    + c * (nu2 * nu.cos().powi(2) + eps * eps * nu.sin().powi(2)))
                    / nu2
            } else {
                // ν → 0 limit, where sin ν / ν → 1.
                let sn = sinc(nu);
                om * om * sn * sn + c * (nu.cos().powi(2) + eps * eps * sn * sn)
            }
        }
    })
}

/// Effective continuous-time dephasing rate γ.
pub fn dephasing_rate(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    let base = p.omega * p.omega * p.tau;
    match p.kind {
        ModelKind::Base => Ok(base),
        ModelKind::Zeno => Ok(base * p.rabi.cos().powi(2)),
        ModelKind::AntiZeno => Err(Error::Unsupported(
            "no closed-form dephasing rate for the anti-Zeno model".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::FRAC_PI_4;

    use proptest::prelude::*;

    use super::*;

    #[test]
    fn base_without_coupling_leaves_ancilla_in_a() {
        let bp = branch_pair(&ModelParams::base(0.0, 0.05).unwrap()).unwrap();
        assert_eq!(bp.plus, vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        assert_eq!(bp.plus, bp.minus);
        assert_eq!(bp.kappa, C64::new(1.0, 0.0));
    }

    #[test]
    fn base_quarter_turn_gives_orthogonal_branches() {
        let tau = 0.05;
        let p = ModelParams::base(FRAC_PI_4 / tau, tau).unwrap();
        assert!(branch_pair(&p).unwrap().kappa.norm() < 1e-15);
        assert!(kappa_closed_form(&p).unwrap() < 1e-15);
    }

    #[test]
    fn full_zeno_freezing() {
        for omega in [0.5, 5.0, 12.0] {
            let p = ModelParams::zeno(omega, 0.05, FRAC_PI_2).unwrap();
            let bp = branch_pair(&p).unwrap();
            assert!((bp.kappa - C64::new(1.0, 0.0)).norm() < 1e-12);
            assert!((kappa_closed_form(&p).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn base_closed_form_value() {
        let p = ModelParams::base(5.0, 0.05).unwrap();
        assert!((kappa_closed_form(&p).unwrap() - 0.5_f64.cos()).abs() < 1e-16);
        assert!((kappa_closed_form(&p).unwrap() - 0.877_582_561_890_372_8).abs() < 1e-15);
    }

    #[test]
    fn zeno_without_rabi_is_signed_base() {
        for omega in [1.0, 5.0, 20.0, 30.0] {
            let z = kappa_closed_form(&ModelParams::zeno(omega, 0.05, 0.0).unwrap()).unwrap();
            let b = kappa_closed_form(&ModelParams::base(omega, 0.05).unwrap()).unwrap();
            assert_eq!(z.abs(), b);
            assert_eq!(z, (2.0 * omega * 0.05).cos());
        }
    }

    #[test]
    fn anti_zeno_reduces_to_zeno_without_detuning() {
        for rabi in [0.0, 0.2, 0.9, 1.5, FRAC_PI_2] {
            let a = kappa_closed_form(&ModelParams::anti_zeno(5.0, 0.05, rabi, 0.0).unwrap());
            let z = kappa_closed_form(&ModelParams::zeno(5.0, 0.05, rabi).unwrap());
            assert!((a.unwrap() - z.unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn anti_zeno_origin_uses_limit() {
        let p = ModelParams::anti_zeno(5.0, 0.05, 0.0, 0.0).unwrap();
        assert_eq!(kappa_closed_form(&p).unwrap(), 0.5_f64.cos());
        let bp = branch_pair(&p).unwrap();
        assert!((bp.kappa.re - 0.5_f64.cos()).abs() < 1e-12);
    }

    #[test]
    fn dephasing_rates() {
        let p = ModelParams::base(5.0, 0.05).unwrap();
        assert!((dephasing_rate(&p).unwrap() - 1.25).abs() < 1e-15);
        let z = ModelParams::zeno(5.0, 0.05, FRAC_PI_2).unwrap();
        assert!(dephasing_rate(&z).unwrap() < 1e-30);
        let z0 = ModelParams::zeno(5.0, 0.05, 0.0).unwrap();
        assert_eq!(dephasing_rate(&z0).unwrap(), dephasing_rate(&p).unwrap());
        let az = ModelParams::anti_zeno(5.0, 0.05, 1.0, 1.0).unwrap();
        assert!(matches!(dephasing_rate(&az), Err(Error::Unsupported(_))));
    }

    #[test]
    fn invalid_parameter_combinations() {
        assert!(ModelParams::new(ModelKind::Base, 5.0, 0.05, 0.3, 0.0).is_err());
        assert!(ModelParams::new(ModelKind::Base, 5.0, 0.05, 0.0, 0.3).is_err());
        assert!(ModelParams::new(ModelKind::Zeno, 5.0, 0.05, 0.3, 0.1).is_err());
        assert!(ModelParams::zeno(5.0, 0.05, 1.6).is_err());
        assert!(ModelParams::zeno(5.0, 0.05, -0.1).is_err());
        assert!(ModelParams::base(-1.0, 0.05).is_err());
        assert!(ModelParams::base(1.0, 0.0).is_err());
        assert!(ModelParams::base(f64::NAN, 0.05).is_err());
        assert!(ModelParams::anti_zeno(5.0, 0.05, 0.3, -1.0).is_err());
        let mut p = ModelParams::base(1.0, 0.1).unwrap();
        p.rabi = 0.2;
        assert!(matches!(branch_pair(&p), Err(Error::InvalidParams(_))));
        assert!(kappa_closed_form(&p).is_err());
    }

    #[test]
    fn model_kind_round_trips_through_strings() {
        for kind in ModelKind::ALL {
            assert_eq!(kind.as_str().parse::<ModelKind>().unwrap(), kind);
        }
        assert!("qubit".parse::<ModelKind>().is_err());
    }

    #[test]
    fn coupling_matrices_are_hermitian_with_unit_spectrum() {
        for (rabi, eps) in [(0.0, 0.0), (0.7, 0.3), (1.5, 3.0), (FRAC_PI_2, 0.01)] {
            let m = anti_zeno_matrix(rabi, eps).unwrap();
            assert!(m.hermiticity_defect() < 1e-15);
            let eig = math::hermitian_eigen(&m).unwrap();
            for (got, want) in eig.eigenvalues.iter().zip([-1.0, 0.0, 1.0]) {
                assert!((got - want).abs() < 1e-12);
            }
        }
    }

    fn any_params() -> impl Strategy<Value = ModelParams> {
        let omega = 0.0_f64..40.0;
        let tau = 1e-3_f64..1.0;
        let rabi = 0.0_f64..=FRAC_PI_2;
        let eps = 0.0_f64..4.0;
        (0usize..3, omega, tau, rabi, eps).prop_map(|(k, omega, tau, rabi, eps)| match k {
            0 => ModelParams::base(omega, tau).unwrap(),
            1 => ModelParams::zeno(omega, tau, rabi).unwrap(),
            _ => ModelParams::anti_zeno(omega, tau, rabi, eps).unwrap(),
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn closed_form_matches_branch_overlap(p in any_params()) {
            let closed = kappa_closed_form(&p).unwrap();
            let bp = branch_pair(&p).unwrap();
            prop_assert!((math::norm(&bp.plus) - 1.0).abs() < 1e-12);
            prop_assert!((math::norm(&bp.minus) - 1.0).abs() < 1e-12);
            prop_assert!(bp.kappa.norm() <= 1.0 + 1e-12);
            match p.kind {
                ModelKind::Base => prop_assert!((bp.kappa.norm() - closed).abs() < 1e-12),
                _ => {
                    prop_assert!((bp.kappa.re - closed).abs() < 1e-10);
                    prop_assert!(bp.kappa.im.abs() < 1e-10);
                }
            }
        }

        #[test]
        fn closed_form_is_bounded(p in any_params()) {
            prop_assert!(kappa_closed_form(&p).unwrap().abs() <= 1.0 + 1e-15);
        }

        #[test]
        fn gap_matches_printed_form(p in any_params()) {
            let printed = kappa_closed_form(&p).unwrap();
            let signed = 1.0 - p.coherence_gap().unwrap();
            prop_assert!((printed.abs() - signed.abs()).abs() < 1e-12);
        }

        #[test]
        fn zeno_kappa_non_decreasing_in_rabi(angle in 0.0_f64..FRAC_PI_4, r1 in 0.0_f64..=FRAC_PI_2, r2 in 0.0_f64..=FRAC_PI_2) {
            let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
            let k_lo = kappa_closed_form(&ModelParams::zeno(angle, 1.0, lo).unwrap()).unwrap();
            let k_hi = kappa_closed_form(&ModelParams::zeno(angle, 1.0, hi).unwrap()).unwrap();
            prop_assert!(k_lo <= k_hi + 1e-15);
        }

        #[test]
        fn anti_zeno_continuous_at_zero_detuning(omega in 0.0_f64..40.0, tau in 1e-3_f64..1.0, rabi in 0.0_f64..=FRAC_PI_2) {
            let near = kappa_closed_form(&ModelParams::anti_zeno(omega, tau, rabi, 1e-4).unwrap()).unwrap();
            let at = kappa_closed_form(&ModelParams::anti_zeno(omega, tau, rabi, 0.0).unwrap()).unwrap();
            prop_assert!((near - at).abs() < 1e-6);
        }
    }
}
