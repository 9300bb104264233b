//! Noise-contrastive loss terms.
//!
//! For a score `s = a * distance + b` and noise probability `q`:
//!
//! ```text
//! positive: -ln(e^s / (e^s + q)) = softplus(ln q - s)
//! negative: -ln(q / (e^s + q))   = softplus(s - ln q)
//! ```
//!
//! Both are evaluated from `ln q` so a zero noise probability is harmless on
//! the positive side.

use crate::error::{Error, Result};
use crate::math::{sigmoid, softplus};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    /// A true edge `(i, j)`.
    Positive,
    /// A noise sample `(i, K)`.
    Negative,
}

/// Loss, first and second derivative of one term with respect to the score.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TermDerivs {
    pub value: f64,
    pub d_score: f64,
    pub d2_score: f64,
}

#[inline]
pub(crate) fn term_derivs(kind: TermKind, score: f64, ln_noise: f64) -> TermDerivs {
    let (u, sign) = match kind {
        TermKind::Positive => (ln_noise - score, -1.0),
        TermKind::Negative => (score - ln_noise, 1.0),
    };
    let s = sigmoid(u);
    TermDerivs {
        value: softplus(u),
        d_score: sign * s,
        d2_score: s * (1.0 - s),
    }
}

#[inline]
pub(crate) fn term_value(kind: TermKind, score: f64, ln_noise: f64) -> f64 {
    match kind {
        TermKind::Positive => softplus(ln_noise - score),
        TermKind::Negative => softplus(score - ln_noise),
    }
}

fn check_noise(q: f64) -> Result<()> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("noise probability must be in (0, 1], got {q}")))
    }
}

fn check_score(s: f64, what: &str) -> Result<()> {
    if s.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: format!("{what} score {s}"),
        })
    }
}

/// `-ln(e^s / (e^s + q))`
pub fn positive_term(score: f64, noise_prob: f64) -> Result<f64> {
    check_score(score, "positive")?;
    check_noise(noise_prob)?;
    Ok(term_value(TermKind::Positive, score, noise_prob.ln()))
}

/// `-ln(q / (e^s + q))`
pub fn negative_term(score: f64, noise_prob: f64) -> Result<f64> {
    check_score(score, "negative")?;
    check_noise(noise_prob)?;
    Ok(term_value(TermKind::Negative, score, noise_prob.ln()))
}

/// Loss of one positive pair against one noise sample.
pub fn nce_pair_loss(score_pos: f64, score_neg: f64, noise_pos: f64, noise_neg: f64) -> Result<f64> {
    Ok(positive_term(score_pos, noise_pos)? + negative_term(score_neg, noise_neg)?)
}
