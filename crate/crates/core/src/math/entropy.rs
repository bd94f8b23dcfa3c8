use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::tolerances;

/// Maps tiny negative round-off to exactly zero; leaves anything else alone.
pub fn clamp_probability(p: f64) -> f64 {
    if (-tolerances::PROBABILITY_CLAMP..0.0).contains(&p) {
        0.0
    } else {
        p
    }
}

/// Shannon entropy in bits with `0·log₂0 = 0`.
pub fn shannon_entropy_bits(probs: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    let mut entropy = 0.0;
    for &raw in probs {
        if !raw.is_finite() {
            return Err(Error::range("probability is not finite"));
        }
        let p = clamp_probability(raw);
        if p < 0.0 {
            return Err(Error::NegativeProbability { value: p });
        }
        sum += p;
        if p > 0.0 {
            entropy -= p * p.log2();
        }
    }
    if !((sum - 1.0).abs() <= tolerances::NORMALIZATION) {
        return Err(Error::NotNormalized { sum });
    }
    Ok(entropy.max(0.0))
}

/// `H(p) = −p log₂p − (1−p) log₂(1−p)`, accurate for `p` near 0 or 1.
pub fn binary_entropy_bits(p: f64) -> f64 {
    let p = p.clamp(0.0, 1.0);
    let q = 1.0 - p;
    let term = |x: f64, ln_x: f64| if x > 0.0 { -x * ln_x } else { 0.0 };
    let (small, large) = if p <= q { (p, q) } else { (q, p) };
    // ln(large) = ln(1 − small) keeps full precision when small ≪ 1.
    (term(small, small.ln()) + term(large, (-small).ln_1p())) / LN_2
}
