//! High-precision evaluation with rigorous additive error bounds.
//!
//! Every kernel returns an [`EvalResult`] whose `bound` majorizes the distance
//! between the returned value and the true value: truncation tails plus a
//! roundoff allowance. Bounds are deliberately conservative.

pub mod direct;
pub mod eval;
pub mod mp;
pub mod polylog;
pub mod zeta;

pub use direct::{mtzv_eval_direct, mzv_eval_direct};
pub use eval::{expr_eval, Evaluator, Route};
pub use mp::{Cf, Mp};
pub use polylog::mzv_eval;
pub use zeta::{even_zeta_exact, hurwitz_zeta, lerch_phi, lerch_phi_hurwitz, EvenZetaValue};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    /// Working mantissa length in bits.
    pub precision_bits: usize,
    /// Requested accuracy; kernels aim below it but always report the truth.
    pub target_tol: f64,
    /// Cap on the one-dimensional truncation length of any series.
    pub max_terms: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { precision_bits: 256, target_tol: 1e-30, max_terms: 1 << 20 }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        if self.precision_bits < 64 {
            return Err(Error::invalid("precision_bits must be at least 64"));
        }
        if !(self.target_tol > 0.0) {
            return Err(Error::invalid("target_tol must be positive"));
        }
        if self.max_terms < 16 {
            return Err(Error::invalid("max_terms must be at least 16"));
        }
        Ok(())
    }

    pub fn mp(&self) -> Mp {
        Mp::new(self.precision_bits)
    }
}

/// A value together with a sound majorant of its error.
#[derive(Debug, Clone)]
pub struct EvalResult {
    pub value: Cf,
    pub bound: f64,
}

impl EvalResult {
    pub fn new(value: Cf, bound: f64) -> Self {
        EvalResult { value, bound: round_up(bound) }
    }

    pub fn exact(value: Cf) -> Self {
        EvalResult { value, bound: 0.0 }
    }

    pub fn re(&self) -> f64 {
        mp::to_f64(&self.value.re)
    }

    pub fn im(&self) -> f64 {
        mp::to_f64(&self.value.im)
    }

    /// `|value − (re + i·im)|`, computed in working precision then rounded.
    pub fn distance_to(&self, mp: &Mp, re: &astro_float::BigFloat, im: &astro_float::BigFloat) -> f64 {
        let dr = mp::to_f64(&mp.sub(&self.value.re, re));
        let di = mp::to_f64(&mp.sub(&self.value.im, im));
        dr.hypot(di)
    }

    pub fn distance(&self, mp: &Mp, o: &EvalResult) -> f64 {
        self.distance_to(mp, &o.value.re, &o.value.im)
    }

    pub fn sub(&self, mp: &Mp, o: &EvalResult) -> EvalResult {
        let v = self.value.sub(mp, &o.value);
        let r = v.abs_f64() * mp.ulp();
        EvalResult::new(v, self.bound + o.bound + r)
    }

    pub fn add(&self, mp: &Mp, o: &EvalResult) -> EvalResult {
        let v = self.value.add(mp, &o.value);
        let r = v.abs_f64() * mp.ulp();
        EvalResult::new(v, self.bound + o.bound + r)
    }

    /// Product with the majorant `|a|β + |b|α + αβ`.
    pub fn mul(&self, mp: &Mp, o: &EvalResult) -> EvalResult {
        let v = self.value.mul(mp, &o.value);
        let a = self.value.abs_f64();
        let b = o.value.abs_f64();
        let e = a * o.bound + b * self.bound + self.bound * o.bound;
        EvalResult::new(v.clone(), e + 4.0 * mp.ulp() * v.abs_f64())
    }

    pub fn decimal_re(&self, mp: &Mp) -> String {
        mp.decimal(&self.value.re)
    }

    pub fn decimal_im(&self, mp: &Mp) -> String {
        mp.decimal(&self.value.im)
    }
}

/// Nudge an `f64` majorant upwards to absorb its own rounding.
pub(crate) fn round_up(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * (1.0 + 8.0 * f64::EPSILON) + f64::MIN_POSITIVE
    }
}

/// `∫_N^∞ x^{−p}(1+ln x)^q dx` in closed form (requires `p > 1`). Majorizes
/// `Σ_{n>N} n^{−p}(1+ln n)^q` once the integrand is decreasing on `[N, ∞)`,
/// which holds for `1 + ln N ≥ q/p`.
pub(crate) fn log_power_tail(n: f64, p: f64, q: usize) -> f64 {
    assert!(p > 1.0, "tail integral needs p > 1");
    let l = 1.0 + n.ln();
    let mut sum = 0.0;
    let mut fall = 1.0;
    for i in 0..=q {
        sum += fall * l.powi((q - i) as i32) / (p - 1.0).powi(i as i32 + 1);
        fall *= (q - i) as f64;
    }
    n.powf(1.0 - p) * sum
}
