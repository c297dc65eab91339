use std::f64::consts::FRAC_PI_2;

use rand::distr::Distribution;
use rand::Rng;

use super::StableParams;

/// Chambers–Mallows–Stuck sampler for `S(α, σ)` (symmetric, zero location).
///
/// Each draw consumes one uniform angle and one exponential radius.
#[derive(Debug, Clone, Copy)]
pub struct SymStable {
    params: StableParams,
}

impl SymStable {
    pub fn new(params: StableParams) -> Self {
        Self { params }
    }

    pub fn params(&self) -> StableParams {
        self.params
    }
}

/// Uniform on the open interval (0, 1).
#[inline]
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

impl Distribution<f64> for SymStable {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let alpha = self.params.alpha();
        let v = (open_unit(rng) - 0.5) * std::f64::consts::PI;
        let w = -open_unit(rng).ln();
        let x = if alpha == 1.0 {
            v.tan()
        } else if alpha == 2.0 {
            // sin(2V)/sqrt(cos V) * sqrt(W/cos V) collapses to this
            2.0 * v.sin() * w.sqrt()
        } else {
            let av = alpha * v;
            av.sin() / v.cos().powf(1.0 / alpha) * (((1.0 - alpha) * v).cos() / w).powf((1.0 - alpha) / alpha)
        };
        debug_assert!(v.abs() < FRAC_PI_2);
        self.params.sigma() * x
    }
}

/// `n` i.i.d. draws from `S(α, σ)`.
pub fn sample_sym_stable<R: Rng + ?Sized>(params: &StableParams, n: usize, rng: &mut R) -> Vec<f64> {
    let mut out = vec![0.0; n];
    sample_sym_stable_into(params, &mut out, rng);
    out
}

pub fn sample_sym_stable_into<R: Rng + ?Sized>(params: &StableParams, out: &mut [f64], rng: &mut R) {
    let dist = SymStable::new(*params);
    for slot in out.iter_mut() {
        *slot = dist.sample(rng);
    }
}
