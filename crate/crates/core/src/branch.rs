//! Closed-form entropies and redundancy from the two-branch structure.
//!
//! After `ℓ` collisions the reduced system state is
//! `[[|α|², αβ*κ^ℓ], [α*βκ*^ℓ, |β|²]]`, so its entropy depends only on
//! `|κ|^{2ℓ}`. Purity of the global state then fixes every fragment entropy:
//! `S(F_m) = S_S(min(m, ℓ))` and `S(SF_m) = S_S(max(ℓ − m, 0))`.

use std::fmt;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::math::{binary_entropy_bits, SmallMatrix, C64};
use crate::models::{kappa_closed_form, ModelParams};
use crate::tolerances;

/// Default information deficit δ.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Initial system state `α|↓⟩ + β|↑⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemAmplitudes {
    pub alpha: C64,
    pub beta: C64,
}

impl SystemAmplitudes {
    pub fn new(alpha: C64, beta: C64) -> Result<Self> {
        let amps = Self { alpha, beta };
        amps.validate()?;
        Ok(amps)
    }

    /// `α = β = 1/√2`.
    pub fn uniform() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            alpha: C64::new(h, 0.0),
            beta: C64::new(h, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.alpha.re, self.alpha.im, self.beta.re, self.beta.im]
            .iter()
            .all(|x| x.is_finite());
        let norm = self.alpha.norm_sqr() + self.beta.norm_sqr();
        if !finite || (norm - 1.0).abs() > tolerances::STATE_NORM {
            return Err(Error::range(format!(
                "amplitudes must satisfy |α|² + |β|² = 1 (got {norm})"
            )));
        }
        Ok(())
    }

    /// `|α|²|β|²`, at most 1/4.
    pub fn population_product(&self) -> f64 {
        self.alpha.norm_sqr() * self.beta.norm_sqr()
    }
}

impl Default for SystemAmplitudes {
    fn default() -> Self {
        Self::uniform()
    }
}

/// Smallest fragment meeting the deficit condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FragmentSize {
    Size(usize),
    /// The system never acquired entropy, so there is nothing to proliferate.
    NoDecoherence,
}

impl FragmentSize {
    pub const SENTINEL: &'static str = "NoDecoherence";

    pub fn size(self) -> Option<usize> {
        match self {
            FragmentSize::Size(m) => Some(m),
            FragmentSize::NoDecoherence => None,
        }
    }
}

impl fmt::Display for FragmentSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentSize::Size(m) => write!(f, "{m}"),
            FragmentSize::NoDecoherence => f.write_str(Self::SENTINEL),
        }
    }
}

impl Serialize for FragmentSize {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FragmentSize::Size(m) => s.serialize_u64(*m as u64),
            FragmentSize::NoDecoherence => s.serialize_str(Self::SENTINEL),
        }
    }
}

impl<'de> Deserialize<'de> for FragmentSize {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Size(u64),
            Flag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Size(m) => Ok(FragmentSize::Size(m as usize)),
            Raw::Flag(s) if s == Self::SENTINEL => Ok(FragmentSize::NoDecoherence),
            Raw::Flag(s) => Err(de::Error::custom(format!("unexpected fragment size `{s}`"))),
        }
    }
}

fn check_kappa(kappa_mod: f64) -> Result<f64> {
    if !(0.0..=1.0 + tolerances::STATE_NORM).contains(&kappa_mod) {
        return Err(Error::range(format!("|κ| = {kappa_mod} outside [0, 1]")));
    }
    Ok(kappa_mod.min(1.0))
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 1.0 {
        Ok(())
    } else {
        Err(Error::range(format!("δ = {delta} outside (0, 1)")))
    }
}

/// System entropies `S_S(k)` for `k = 0..=len` at fixed `|κ|` and amplitudes.
#[derive(Debug, Clone)]
pub struct EntropyTable {
    entropies: Vec<f64>,
}

impl EntropyTable {
    pub fn new(kappa_mod: f64, len: usize, amps: &SystemAmplitudes) -> Result<Self> {
        let kappa_mod = check_kappa(kappa_mod)?;
        amps.validate()?;
        let ln_kappa = kappa_mod.ln();
        let pp = amps.population_product();
        let entropies = (0..=len).map(|k| entropy_after(ln_kappa, k, pp)).collect();
        Ok(Self { entropies })
    }

    pub fn len(&self) -> usize {
        self.entropies.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// `S_S(k)` in bits.
    pub fn get(&self, k: usize) -> f64 {
        self.entropies[k]
    }

    /// Mutual information `I(S, F_m)` after `ell` collisions.
    pub fn mutual_information(&self, ell: usize, m: usize) -> f64 {
        self.get(ell) + self.get(m.min(ell)) - self.get(ell.saturating_sub(m))
    }

    fn threshold(&self, ell: usize, delta: f64) -> Option<f64> {
        let s = self.get(ell);
        (s >= tolerances::MIN_SYSTEM_ENTROPY).then_some((1.0 - delta) * s)
    }

    pub fn fragment_size_linear(&self, ell: usize, delta: f64) -> FragmentSize {
        let Some(target) = self.threshold(ell, delta) else {
            return FragmentSize::NoDecoherence;
        };
        (1..=ell)
            .find(|&m| self.mutual_information(ell, m) >= target)
            .map_or(FragmentSize::Size(ell), FragmentSize::Size)
    }

    pub fn fragment_size_bisect(&self, ell: usize, delta: f64) -> FragmentSize {
        let Some(target) = self.threshold(ell, delta) else {
            return FragmentSize::NoDecoherence;
        };
        // Invariant: I(lo) < target ≤ I(hi), with lo = 0 holding since I(0) = 0.
        let (mut lo, mut hi) = (0, ell);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.mutual_information(ell, mid) >= target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        FragmentSize::Size(hi)
    }
}

/// Entropy of ρ_S after `ell` collisions given `ln|κ|` and `|α|²|β|²`.
fn entropy_after(ln_kappa: f64, ell: usize, pop_product: f64) -> f64 {
    // 1 − |κ|^{2ℓ}
    let lost = if ell == 0 {
        0.0
    } else if ln_kappa == f64::NEG_INFINITY {
        1.0
    } else {
        -(2.0 * ell as f64 * ln_kappa).exp_m1()
    };
    let q = lost * pop_product;
    // λ₋ = (1 − √(1 − 4q))/2, rewritten to avoid cancellation for small q.
    let lambda_minus = 2.0 * q / (1.0 + (1.0 - 4.0 * q).max(0.0).sqrt());
    binary_entropy_bits(lambda_minus)
}

/// Entropy in bits of the system after `ell` collisions.
pub fn system_entropy(kappa_mod: f64, ell: usize, amps: &SystemAmplitudes) -> Result<f64> {
    let kappa_mod = check_kappa(kappa_mod)?;
    amps.validate()?;
    Ok(entropy_after(
        kappa_mod.ln(),
        ell,
        amps.population_product(),
    ))
}

/// Entropy of the fragment made of the first `m` ancillas after `ell` collisions.
pub fn fragment_entropy(
    kappa_mod: f64,
    ell: usize,
    m: usize,
    amps: &SystemAmplitudes,
) -> Result<f64> {
    system_entropy(kappa_mod, m.min(ell), amps)
}

/// Entropy of system plus the first `m` ancillas after `ell` collisions.
pub fn joint_entropy(kappa_mod: f64, ell: usize, m: usize, amps: &SystemAmplitudes) -> Result<f64> {
    system_entropy(kappa_mod, ell.saturating_sub(m), amps)
}

/// `I(S, F_m)` in bits after `ell` collisions.
///
/// `m < ℓ` gives `S(ℓ) + S(m) − S(ℓ−m)`; `m ≥ ℓ` gives `2 S(ℓ)`.
pub fn mutual_information(
    kappa_mod: f64,
    ell: usize,
    m: usize,
    amps: &SystemAmplitudes,
) -> Result<f64> {
    let table = EntropyTable::new(kappa_mod, ell, amps)?;
    Ok(table.mutual_information(ell, m))
}

/// Smallest `m` with `I(S, F_m) ≥ (1 − δ) S(ρ_S)` (linear scan).
pub fn fragment_size_for_deficit(
    kappa_mod: f64,
    ell: usize,
    delta: f64,
    amps: &SystemAmplitudes,
) -> Result<FragmentSize> {
    check_delta(delta)?;
    Ok(EntropyTable::new(kappa_mod, ell, amps)?.fragment_size_linear(ell, delta))
}

/// Same result as [`fragment_size_for_deficit`] via bisection on the monotone `I(m)`.
pub fn fragment_size_for_deficit_bisect(
    kappa_mod: f64,
    ell: usize,
    delta: f64,
    amps: &SystemAmplitudes,
) -> Result<FragmentSize> {
    check_delta(delta)?;
    Ok(EntropyTable::new(kappa_mod, ell, amps)?.fragment_size_bisect(ell, delta))
}

/// `R = n / m_δ`, or 0 when the system never decoheres.
pub fn redundancy(kappa_mod: f64, n: usize, delta: f64, amps: &SystemAmplitudes) -> Result<f64> {
    if n == 0 {
        return Err(Error::range("redundancy needs at least one collision"));
    }
    Ok(redundancy_from(
        fragment_size_for_deficit(kappa_mod, n, delta, amps)?,
        n,
    ))
}

fn redundancy_from(m_delta: FragmentSize, n: usize) -> f64 {
    match m_delta {
        FragmentSize::Size(m) => n as f64 / m as f64,
        FragmentSize::NoDecoherence => 0.0,
    }
}

/// Decay-rate estimate `−n ln|κ|`; `+∞` at `κ = 0`.
pub fn redundancy_estimate(kappa_mod: f64, n: usize) -> Result<f64> {
    let kappa_mod = check_kappa(kappa_mod)?;
    if kappa_mod == 0.0 {
        return Ok(f64::INFINITY);
    }
    if kappa_mod == 1.0 {
        return Ok(0.0);
    }
    Ok(-(n as f64) * kappa_mod.ln())
}

/// Reduced system state after `ell` collisions for a (possibly complex) overlap.
pub fn system_density(kappa: C64, ell: usize, amps: &SystemAmplitudes) -> Result<SmallMatrix> {
    amps.validate()?;
    let k = kappa.powu(ell as u32);
    let (a, b) = (amps.alpha, amps.beta);
    let off = a * b.conj() * k;
    SmallMatrix::from_rows(&[
        [C64::new(a.norm_sqr(), 0.0), off],
        [off.conj(), C64::new(b.norm_sqr(), 0.0)],
    ])
}

/// `|κ|` as used by every entropy formula, clamped into `[0, 1]`.
pub fn kappa_modulus(p: &ModelParams) -> Result<f64> {
    Ok(kappa_closed_form(p)?.abs().min(1.0))
}

/// Mutual information over all fragment sizes plus the derived redundancy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DarwinProfile {
    pub kappa_mod: f64,
    /// Collisions ℓ that have taken place.
    pub n_collisions: usize,
    /// Ancillas in the environment; `mutual_info_bits` has this length + 1.
    pub environment_size: usize,
    pub system_entropy_bits: f64,
    /// `I(S, F_m)` for `m = 0..=environment_size`.
    pub mutual_info_bits: Vec<f64>,
    pub m_delta: FragmentSize,
    pub redundancy: f64,
    pub delta: f64,
}

/// Profile after `n` collisions in an environment of exactly `n` ancillas.
pub fn darwin_profile(
    p: &ModelParams,
    n: usize,
    delta: f64,
    amps: &SystemAmplitudes,
) -> Result<DarwinProfile> {
    darwin_profile_in_environment(p, n, n, delta, amps)
}

/// Profile after `ell` collisions, reporting fragments up to `environment_size`.
pub fn darwin_profile_in_environment(
    p: &ModelParams,
    ell: usize,
    environment_size: usize,
    delta: f64,
    amps: &SystemAmplitudes,
) -> Result<DarwinProfile> {
    profile_from_kappa(kappa_modulus(p)?, ell, environment_size, delta, amps)
}

pub fn profile_from_kappa(
    kappa_mod: f64,
    ell: usize,
    environment_size: usize,
    delta: f64,
    amps: &SystemAmplitudes,
) -> Result<DarwinProfile> {
    check_delta(delta)?;
    if environment_size < ell {
        return Err(Error::range(format!(
            "environment of {environment_size} ancillas cannot host {ell} collisions"
        )));
    }
    let kappa_mod = check_kappa(kappa_mod)?;
    let table = EntropyTable::new(kappa_mod, ell, amps)?;
    let mutual_info_bits = (0..=environment_size)
        .map(|m| table.mutual_information(ell, m))
        .collect();
    let m_delta = table.fragment_size_linear(ell, delta);
    let redundancy = if ell == 0 {
        0.0
    } else {
        redundancy_from(m_delta, ell)
    };
    Ok(DarwinProfile {
        kappa_mod,
        n_collisions: ell,
        environment_size,
        system_entropy_bits: table.get(ell),
        mutual_info_bits,
        m_delta,
        redundancy,
        delta,
    })
}
