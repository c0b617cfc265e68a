//! Power series distribution families.
//!
//! A power series distribution puts mass `b(x) θ^x / f(θ)` on the
//! nonnegative integers, where `f(θ) = Σ_x b(x) θ^x` is the series
//! normalizer and `θ` is the power parameter. The concrete families here
//! (Poisson, geometric, negative binomial, binomial, logarithmic) all have
//! closed forms for `f` and its first two derivatives, which is what the
//! moment and dispersion machinery relies on.
//!
//! Two conventions differ from the most common textbook parameterizations:
//!
//! * The negative binomial normalizer is `f(θ) = (1−θ)^{−r}`. The variant
//!   `(1−θ)^r` sometimes seen in print does not normalize
//!   `Σ C(x+r−1, x) θ^x` and is inconsistent with the family's index of
//!   dispersion `1 + θ/(1−θ)`.
//! * The binomial family uses the odds parameterization `θ = p/(1−p)` with
//!   `f(θ) = (1+θ)^n`, so every family shares the single `(b, f)` interface
//!   with `θ > 0`.

use crate::num::Scalar;
use rand::Rng;
use thiserror::Error;

/// Largest support point visited when summing an infinite-support family.
pub const SUPPORT_HARD_CAP: u64 = 1_000_000;

/// Tail mass left behind by truncated support sums (`1e-13` in f64).
pub const TAIL_MASS: f64 = 1e-13;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("theta = {theta} outside the {family} domain ({lo}, {hi})")]
    ThetaOutOfDomain {
        family: &'static str,
        theta: f64,
        lo: f64,
        hi: f64,
    },
    #[error("negative binomial size parameter r = {0} must be positive and finite")]
    InvalidSize(f64),
    #[error("binomial trial count must be at least 1")]
    InvalidTrials,
}

/// A discrete power series family, possibly carrying a nuisance parameter.
///
/// The nuisance parameters (`r` for the negative binomial, `n` for the
/// binomial) are fixed structural inputs; they are never estimated by the
/// fitting routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerSeriesFamily<S> {
    Poisson,
    Geometric,
    NegativeBinomial { size: S },
    Binomial { trials: u64 },
    Logarithmic,
}

/// The normalizer `f(θ)` together with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTriple<S> {
    pub f: S,
    pub f_prime: S,
    pub f_second: S,
}

/// Mean and variance of a distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments<S> {
    pub mean: S,
    pub variance: S,
}

impl<S: Scalar> PowerSeriesFamily<S> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Poisson => "Poisson",
            Self::Geometric => "Geometric",
            Self::NegativeBinomial { .. } => "NegativeBinomial",
            Self::Binomial { .. } => "Binomial",
            Self::Logarithmic => "Logarithmic",
        }
    }

    /// Open interval of admissible power parameters.
    pub fn theta_domain(&self) -> (S, S) {
        match self {
            Self::Poisson | Self::Binomial { .. } => (S::zero(), S::infinity()),
            Self::Geometric | Self::NegativeBinomial { .. } | Self::Logarithmic => {
                (S::zero(), S::one())
            }
        }
    }

    /// Smallest support point (1 for the logarithmic family, 0 otherwise).
    pub fn support_start(&self) -> u64 {
        match self {
            Self::Logarithmic => 1,
            _ => 0,
        }
    }

    /// Largest support point, when the support is finite.
    pub fn support_max(&self) -> Option<u64> {
        match self {
            Self::Binomial { trials } => Some(*trials),
            _ => None,
        }
    }

    fn validate(&self) -> Result<(), DomainError> {
        match self {
            Self::NegativeBinomial { size } => {
                if !size.is_finite() || *size <= S::zero() {
                    return Err(DomainError::InvalidSize(size.as_f64()));
                }
            }
            Self::Binomial { trials } if *trials == 0 => return Err(DomainError::InvalidTrials),
            _ => {}
        }
        Ok(())
    }

    pub fn validate_theta(&self, theta: S) -> Result<(), DomainError> {
        self.validate()?;
        let (lo, hi) = self.theta_domain();
        if theta.is_finite() && theta > lo && theta < hi {
            Ok(())
        } else {
            Err(DomainError::ThetaOutOfDomain {
                family: self.name(),
                theta: theta.as_f64(),
                lo: lo.as_f64(),
                hi: hi.as_f64(),
            })
        }
    }

    /// `ln b(x)`; `-inf` outside the support.
    pub fn ln_coeff(&self, x: u64) -> S {
        let xf = S::of(x as f64);
        match self {
            Self::Poisson => -(xf + S::one()).ln_gamma(),
            Self::Geometric => S::zero(),
            Self::NegativeBinomial { size } => {
                (xf + *size).ln_gamma() - size.ln_gamma() - (xf + S::one()).ln_gamma()
            }
            Self::Binomial { trials } => {
                if x > *trials {
                    return S::neg_infinity();
                }
                let nf = S::of(*trials as f64);
                (nf + S::one()).ln_gamma()
                    - (xf + S::one()).ln_gamma()
                    - (nf - xf + S::one()).ln_gamma()
            }
            Self::Logarithmic => {
                if x == 0 {
                    S::neg_infinity()
                } else {
                    -xf.ln()
                }
            }
        }
    }

    /// The series coefficient `b(x)` (0 outside the support).
    pub fn coeff(&self, x: u64) -> S {
        self.ln_coeff(x).exp()
    }

    /// Closed-form `(f, f', f'')` at `theta`.
    pub fn evaluate_series(&self, theta: S) -> Result<SeriesTriple<S>, DomainError> {
        self.validate_theta(theta)?;
        let one = S::one();
        let q = one - theta;
        let t = match self {
            Self::Poisson => {
                let e = theta.exp();
                SeriesTriple { f: e, f_prime: e, f_second: e }
            }
            Self::Geometric => SeriesTriple {
                f: q.recip(),
                f_prime: (q * q).recip(),
                f_second: S::of(2.0) / (q * q * q),
            },
            Self::NegativeBinomial { size } => {
                let r = *size;
                let f = q.powf(-r);
                SeriesTriple {
                    f,
                    f_prime: r * f / q,
                    f_second: r * (r + one) * f / (q * q),
                }
            }
            Self::Binomial { trials } => {
                let n = S::of(*trials as f64);
                let base = one + theta;
                let f = base.powf(n);
                let f_prime = n * f / base;
                let f_second = if *trials >= 2 {
                    n * (n - one) * f / (base * base)
                } else {
                    S::zero()
                };
                SeriesTriple { f, f_prime, f_second }
            }
            Self::Logarithmic => SeriesTriple {
                f: -q.ln(),
                f_prime: q.recip(),
                f_second: (q * q).recip(),
            },
        };
        Ok(t)
    }

    /// `ln pmf(x; θ)`, with `-inf` outside the support.
    pub fn ln_pmf(&self, theta: S, x: u64) -> Result<S, DomainError> {
        let series = self.evaluate_series(theta)?;
        let lb = self.ln_coeff(x);
        if lb == S::neg_infinity() {
            return Ok(S::neg_infinity());
        }
        Ok(lb + S::of(x as f64) * theta.ln() - series.f.ln())
    }

    /// `pmf(x; θ) = b(x) θ^x / f(θ)`. Points outside the support get
    /// probability zero rather than an error.
    pub fn pmf(&self, theta: S, x: u64) -> Result<S, DomainError> {
        Ok(self.ln_pmf(theta, x)?.exp())
    }

    /// Mean and variance: `μ = θ f'/f`, `σ² = θ² f''/f + μ(1−μ)`.
    pub fn moments(&self, theta: S) -> Result<Moments<S>, DomainError> {
        let s = self.evaluate_series(theta)?;
        let mean = theta * s.f_prime / s.f;
        let variance = theta * theta * s.f_second / s.f + mean * (S::one() - mean);
        Ok(Moments { mean, variance })
    }

    /// Index of dispersion `ID = 1 + θ f''/f' − μ`, which equals
    /// variance/mean. The Poisson family gives exactly 1 (equidispersion);
    /// the negative binomial gives `1 + θ/(1−θ)` independently of `r`.
    pub fn dispersion_index(&self, theta: S) -> Result<S, DomainError> {
        let s = self.evaluate_series(theta)?;
        let mean = theta * s.f_prime / s.f;
        Ok(S::one() + theta * s.f_second / s.f_prime - mean)
    }

    /// Ratio `pmf(x+1)/pmf(x)`, used to walk the support without
    /// re-evaluating gamma functions.
    fn pmf_ratio(&self, theta: S, x: u64) -> S {
        let xf = S::of(x as f64);
        let one = S::one();
        match self {
            Self::Poisson => theta / (xf + one),
            Self::Geometric => theta,
            Self::NegativeBinomial { size } => theta * (xf + *size) / (xf + one),
            Self::Binomial { trials } => {
                if x >= *trials {
                    S::zero()
                } else {
                    theta * (S::of(*trials as f64) - xf) / (xf + one)
                }
            }
            Self::Logarithmic => theta * xf / (xf + one),
        }
    }

    /// Iterator over `(x, pmf(x))` pairs starting at the bottom of the
    /// support. Infinite supports are cut off at [`SUPPORT_HARD_CAP`];
    /// callers normally stop much earlier via cumulative mass.
    pub fn pmf_iter(&self, theta: S) -> Result<PmfIter<S>, DomainError> {
        let start = self.support_start();
        let p = self.pmf(theta, start)?;
        Ok(PmfIter {
            family: *self,
            theta,
            x: start,
            pmf: p,
            max: self.support_max().unwrap_or(SUPPORT_HARD_CAP),
            done: false,
        })
    }

    /// Walks the support accumulating `visit(x, pmf(x))` until all but
    /// [`TAIL_MASS`] of the probability has been seen (or the support ends).
    /// Returns the total mass visited.
    pub fn truncated_scan(
        &self,
        theta: S,
        mut visit: impl FnMut(u64, S),
    ) -> Result<S, DomainError> {
        let cutoff = S::one() - S::of(TAIL_MASS).max(S::epsilon() * S::of(8.0));
        let mut cum = S::zero();
        for (x, p) in self.pmf_iter(theta)? {
            cum = cum + p;
            visit(x, p);
            if cum >= cutoff {
                break;
            }
        }
        Ok(cum)
    }

    /// Draws one value by an inverse-CDF walk over the pmf.
    pub fn sample<R: Rng + ?Sized>(&self, theta: S, rng: &mut R) -> Result<u64, DomainError> {
        let mut u = S::of(rng.random::<f64>());
        let mut last = self.support_start();
        for (x, p) in self.pmf_iter(theta)? {
            if u < p {
                return Ok(x);
            }
            u = u - p;
            last = x;
        }
        // Ran off the truncated tail; the leftover mass is ~TAIL_MASS.
        Ok(last)
    }
}

/// See [`PowerSeriesFamily::pmf_iter`].
pub struct PmfIter<S> {
    family: PowerSeriesFamily<S>,
    theta: S,
    x: u64,
    pmf: S,
    max: u64,
    done: bool,
}

impl<S: Scalar> Iterator for PmfIter<S> {
    type Item = (u64, S);

    fn next(&mut self) -> Option<(u64, S)> {
        if self.done {
            return None;
        }
        let item = (self.x, self.pmf);
        if self.x >= self.max {
            self.done = true;
        } else {
            self.pmf = self.pmf * self.family.pmf_ratio(self.theta, self.x);
            self.x += 1;
        }
        Some(item)
    }
}
