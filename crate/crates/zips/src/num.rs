//! Scalar abstraction for the distribution layer.

use num_traits::{Float, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

/// Floating-point scalar the distribution and likelihood code is generic over.
///
/// Implemented for `f32` and `f64`. The estimation layer (root finding, BFGS,
/// MCMC) always works in `f64`; the distribution layer can run at either
/// precision.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Sum<Self> + Debug + Display + Send + Sync + 'static
{
    /// Natural logarithm of the gamma function.
    fn ln_gamma(self) -> Self;

    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 converts to scalar")
    }

    /// Lossy view as `f64`, used for error messages and reports.
    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    #[inline]
    fn ln_gamma(self) -> f64 {
        statrs::function::gamma::ln_gamma(self)
    }
}

impl Scalar for f32 {
    #[inline]
    fn ln_gamma(self) -> f32 {
        statrs::function::gamma::ln_gamma(self as f64) as f32
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_gamma_matches_factorials() {
        // ln Gamma(n+1) = ln n!
        let mut fact = 1.0f64;
        for n in 1..15u64 {
            fact *= n as f64;
            assert!((f64::ln_gamma((n + 1) as f64) - fact.ln()).abs() < 1e-10);
        }
        assert!((f32::ln_gamma(5.0) - 24.0f32.ln()).abs() < 1e-5);
    }
}
