//! Pure dephasing `dρ/dt = γ(σ̂ᶻρσ̂ᶻ − ρ)` and its agreement with the collision model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::C64;
use crate::models::{dephasing_rate, ModelKind, ModelParams};
use crate::tolerances;

/// A qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitDensity {
    m: [[C64; 2]; 2],
}

impl QubitDensity {
    pub fn new(m: [[C64; 2]; 2]) -> Result<Self> {
        let rho = Self { m };
        rho.validate()?;
        Ok(rho)
    }

    /// `|ψ⟩⟨ψ|` for `ψ = (a, b)`.
    pub fn pure(a: C64, b: C64) -> Result<Self> {
        Self::new([[a * a.conj(), a * b.conj()], [b * a.conj(), b * b.conj()]])
    }

    fn validate(&self) -> Result<()> {
        let m = &self.m;
        if m.iter()
            .flatten()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::range("density matrix entries must be finite"));
        }
        let asym = (m[0][1] - m[1][0].conj())
            .norm()
            .max(m[0][0].im.abs())
            .max(m[1][1].im.abs());
        if asym > tolerances::HERMITIAN {
            return Err(Error::NonHermitian {
                max_asymmetry: asym,
            });
        }
        let trace = self.trace();
        if (trace - 1.0).abs() > tolerances::STATE_NORM {
            return Err(Error::range(format!("trace {trace} ≠ 1")));
        }
        if self.min_eigenvalue() < -tolerances::POSITIVITY {
            return Err(Error::range("density matrix is not positive semidefinite"));
        }
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[i][j]
    }

    pub fn trace(&self) -> f64 {
        self.m[0][0].re + self.m[1][1].re
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let (a, d) = (self.m[0][0].re, self.m[1][1].re);
        let half_gap = ((a - d) * 0.5).hypot(self.m[0][1].norm());
        0.5 * (a + d) - half_gap
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

fn check_rate_and_time(gamma: f64, t: f64) -> Result<()> {
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::range(format!("γ = {gamma} must be finite and ≥ 0")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::range(format!("t = {t} must be finite and ≥ 0")));
    }
    Ok(())
}

/// Exact solution: populations fixed, coherences scaled by `e^{−2γt}`.
pub fn evolve_dephasing(rho0: &QubitDensity, gamma: f64, t: f64) -> Result<QubitDensity> {
    check_rate_and_time(gamma, t)?;
    let decay = (-2.0 * gamma * t).exp();
    let mut m = rho0.m;
    m[0][1] *= decay;
    m[1][0] *= decay;
    Ok(QubitDensity { m })
}

fn generator(rho: &[[C64; 2]; 2], gamma: f64) -> [[C64; 2]; 2] {
    let sz = [1.0, -1.0];
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (rho[i][j] * (sz[i] * sz[j]) - rho[i][j]) * gamma;
        }
    }
    out
}

fn axpy(y: &[[C64; 2]; 2], h: f64, k: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    let mut out = *y;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += k[i][j] * h;
        }
    }
    out
}

/// Classical fourth-order Runge–Kutta with `γ·dt ≤ 10⁻³`.
pub fn evolve_dephasing_rk4(rho0: &QubitDensity, gamma: f64, t: f64) -> Result<QubitDensity> {
    check_rate_and_time(gamma, t)?;
    let steps = ((gamma * t) / tolerances::INTEGRATOR_STEP).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let mut y = rho0.m;
    for _ in 0..steps {
        let k1 = generator(&y, gamma);
        let k2 = generator(&axpy(&y, dt / 2.0, &k1), gamma);
        let k3 = generator(&axpy(&y, dt / 2.0, &k2), gamma);
        let k4 = generator(&axpy(&y, dt, &k3), gamma);
        for i in 0..2 {
            for j in 0..2 {
                y[i][j] += (k1[i][j] + k2[i][j] * 2.0 + k3[i][j] * 2.0 + k4[i][j]) * (dt / 6.0);
            }
        }
    }
    Ok(QubitDensity { m: y })
}

/// `max_{ℓ≤n} | |κ|^ℓ − e^{−2γℓτ} | / e^{−2γℓτ}`, identifying step ℓ with time `ℓτ`.
pub fn continuum_consistency(p: &ModelParams, n: usize) -> Result<f64> {
    if p.kind == ModelKind::AntiZeno {
        return Err(Error::Unsupported(
            "continuum comparison needs a dephasing rate; anti-Zeno has none".into(),
        ));
    }
    let gamma = dephasing_rate(p)?;
    let ln_kappa = p.ln_abs_kappa()?;
    let per_step = ln_kappa + 2.0 * gamma * p.tau;
    Ok((0..=n)
        .map(|ell| {
            if ell == 0 {
                0.0
            } else if ln_kappa == f64::NEG_INFINITY {
                1.0
            } else {
                (ell as f64 * per_step).exp_m1().abs()
            }
        })
        .fold(0.0, f64::max))
}
