//! Moments of the Hamming distance between two independent Bernoulli vectors.
//!
//! Bit `k` disagrees with probability `m_k = p_k (1 - q_k) + (1 - p_k) q_k`,
//! so the distance is a sum of independent Bernoulli(m_k) variables.

use crate::error::{Error, Result};

#[inline]
pub(crate) fn disagreement(p: f64, q: f64) -> f64 {
    p * (1.0 - q) + (1.0 - p) * q
}

fn check_lengths(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() == q.len() {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            what: "probability vector length",
            expected: p.len(),
            found: q.len(),
        })
    }
}

/// μ = Σ_k m_k, in `[0, d]`.
pub fn expected_hamming(p: &[f64], q: &[f64]) -> Result<f64> {
    check_lengths(p, q)?;
    Ok(p.iter().zip(q).map(|(&a, &b)| disagreement(a, b)).sum())
}

/// σ² = Σ_k m_k (1 - m_k), in `[0, d/4]`.
pub fn hamming_variance(p: &[f64], q: &[f64]) -> Result<f64> {
    check_lengths(p, q)?;
    Ok(p.iter()
        .zip(q)
        .map(|(&a, &b)| {
            let m = disagreement(a, b);
            m * (1.0 - m)
        })
        .sum())
}

/// Both moments in one pass.
pub(crate) fn hamming_moments(p: &[f64], q: &[f64]) -> (f64, f64) {
    let mut mean = 0.0;
    let mut var = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let m = disagreement(a, b);
        mean += m;
        var += m * (1.0 - m);
    }
    (mean, var)
}
