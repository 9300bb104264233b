use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Midpoint rule in Gaussian-CDF space: abscissae `Φ⁻¹((2n - 1) / 2Q)` for
/// `n = 1..=Q`, each with weight `1/Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    abscissae: Vec<f64>,
}

impl QuadratureSpec {
    pub fn new(points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one point".into()));
        }
        let normal = Normal::standard();
        let mut abscissae = vec![0.0; points];
        // Fill the lower half and mirror it so the rule is exactly antisymmetric.
        for n in 0..points / 2 {
            let u = (2 * n + 1) as f64 / (2 * points) as f64;
            let z = normal.inverse_cdf(u);
            abscissae[n] = z;
            abscissae[points - 1 - n] = -z;
        }
        Ok(QuadratureSpec { abscissae })
    }

    pub fn points(&self) -> usize {
        self.abscissae.len()
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn weight(&self) -> f64 {
        1.0 / self.abscissae.len() as f64
    }

    /// `(1/Q) Σ f(z_n)`
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let sum: f64 = self.abscissae.iter().map(|&z| f(z)).sum();
        sum * self.weight()
    }
}
