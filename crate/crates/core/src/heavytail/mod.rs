//! Symmetric α-stable laws and fractional lower-order moments.
//!
//! The fractional lower-order covariance of a pair is
//! `FLOC(Y1, Y2; A, B) = E[Y1^<A> · Y2^<B>]` with the signed power
//! `x^<c> = |x|^c · sgn(x)`. It is finite whenever both variables have
//! fractional moments below some order `a` and `A + B < a`; for stable laws
//! `a` is the stability index.

mod alpha;
mod stable;

pub use alpha::estimate_alpha;
pub use stable::{sample_sym_stable, sample_sym_stable_into, SymStable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Stability index and scale of a symmetric α-stable law `S(α, σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableParams {
    alpha: f64,
    sigma: f64,
}

impl StableParams {
    pub fn new(alpha: f64, sigma: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Parameter(format!("stability index must lie in (0, 2], got {alpha}")));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::Parameter(format!("scale must be positive and finite, got {sigma}")));
        }
        Ok(Self { alpha, sigma })
    }

    /// `S(α, 1)`, the null law used by every calibration.
    pub fn standard(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

/// Exponents of a FLOC together with the moment order they must stay below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlocParams {
    a_exp: f64,
    b_exp: f64,
    #[serde(with = "crate::io::inf_as_null")]
    moment_bound: f64,
}

impl FlocParams {
    /// `moment_bound` may be `f64::INFINITY` for data with all moments finite
    /// (Gaussian fixtures, where `A = B = 1` recovers ordinary covariance).
    pub fn new(a_exp: f64, b_exp: f64, moment_bound: f64) -> Result<Self> {
        if !(a_exp > 0.0 && a_exp.is_finite()) || !(b_exp > 0.0 && b_exp.is_finite()) {
            return Err(Error::Parameter(format!(
                "FLOC exponents must be positive and finite, got A={a_exp}, B={b_exp}"
            )));
        }
        if !(moment_bound > 0.0) {
            return Err(Error::Parameter(format!("moment bound must be positive, got {moment_bound}")));
        }
        if a_exp + b_exp >= moment_bound {
            return Err(Error::Parameter(format!(
                "FLOC exponents require A+B < {moment_bound}, got A+B = {}",
                a_exp + b_exp
            )));
        }
        Ok(Self { a_exp, b_exp, moment_bound })
    }

    /// Exponents valid for stable data with index `alpha` (`A + B < α`).
    pub fn for_alpha(a_exp: f64, b_exp: f64, alpha: f64) -> Result<Self> {
        StableParams::standard(alpha)?;
        Self::new(a_exp, b_exp, alpha)
    }

    /// Exponents used by the partial autocorrelation: `A` is pinned to 1.
    pub fn partial(b_exp: f64, moment_bound: f64) -> Result<Self> {
        Self::new(1.0, b_exp, moment_bound)
    }

    pub fn a_exp(&self) -> f64 {
        self.a_exp
    }

    pub fn b_exp(&self) -> f64 {
        self.b_exp
    }

    pub fn moment_bound(&self) -> f64 {
        self.moment_bound
    }

    pub fn total(&self) -> f64 {
        self.a_exp + self.b_exp
    }
}

/// `|x|^c · sgn(x)`, with `signed_power(0, c) = 0` and `signed_power(x, 1) = x`.
pub fn signed_power(x: f64, c: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("signed power of non-finite value {x}")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("signed power exponent must be positive, got {c}")));
    }
    Ok(signed_power_unchecked(x, c))
}

#[inline]
pub(crate) fn signed_power_unchecked(x: f64, c: f64) -> f64 {
    if c == 1.0 {
        x
    } else if x == 0.0 {
        0.0
    } else {
        x.abs().powf(c).copysign(x)
    }
}

/// Sample FLOC: mean of `x_i^<A> · y_i^<B>`.
pub fn floc_pairs(x: &[f64], y: &[f64], fp: &FlocParams) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Shape(format!("paired samples differ in length: {} vs {}", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(Error::Shape("paired samples are empty".into()));
    }
    check_finite(x)?;
    check_finite(y)?;
    let sum = crate::stats::compensated_sum(
        x.iter()
            .zip(y)
            .map(|(&a, &b)| signed_power_unchecked(a, fp.a_exp) * signed_power_unchecked(b, fp.b_exp)),
    );
    Ok(sum / x.len() as f64)
}

/// Sample FLOM: mean of `|x_i|^(A+B)`.
pub fn flom_sample(x: &[f64], fp: &FlocParams) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::Shape("sample is empty".into()));
    }
    check_finite(x)?;
    // Same factorisation as floc_pairs so that floc_pairs(x, x) == flom_sample(x) bit for bit.
    let sum = crate::stats::compensated_sum(
        x.iter()
            .map(|&a| signed_power_unchecked(a, fp.a_exp) * signed_power_unchecked(a, fp.b_exp)),
    );
    Ok(sum / x.len() as f64)
}

fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::Domain(format!("non-finite value at index {i}"))),
        None => Ok(()),
    }
}
