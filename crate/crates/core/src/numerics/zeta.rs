//! Riemann, Hurwitz and Lerch (periodic) zeta values.

use num_traits::{Signed, ToPrimitive, Zero};

use super::mp::{pow_neg, rational_to_cf, Cf};
use super::{round_up, EvalConfig, EvalResult};
use crate::arith::{bernoulli, factorial, rat, rbig, ri, to_f64, Rational};
use crate::error::{Error, Result};
use crate::symexpr::CRat;

/// `ζ(2r) = coeff · π^{2r}` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvenZetaValue {
    pub coeff: Rational,
    pub pi_power: u32,
}

impl EvenZetaValue {
    pub fn eval(&self, cfg: &EvalConfig) -> EvalResult {
        let mp = cfg.mp();
        let c = mp.rational(&self.coeff);
        let v = if self.pi_power == 0 {
            c
        } else {
            mp.mul(&c, &mp.powi(&mp.pi(), self.pi_power as usize))
        };
        let err = if self.pi_power == 0 && exactly_representable(&self.coeff, cfg.precision_bits) {
            0.0
        } else {
            super::mp::abs_up(&v) * mp.ulp() * (self.pi_power as f64 + 4.0)
        };
        EvalResult::new(Cf::real(&mp, v), err)
    }
}

fn exactly_representable(r: &Rational, bits: usize) -> bool {
    let d = r.denom();
    d.trailing_zeros() == Some(d.bits() - 1) && r.numer().bits() as usize <= bits
}

/// `ζ(0) = −1/2`, `ζ(2r) = (−1)^{r+1} B_{2r} (2π)^{2r} / (2 (2r)!)`.
pub fn even_zeta_exact(m: u32) -> Result<EvenZetaValue> {
    if m % 2 == 1 {
        return Err(Error::invalid(format!("ζ({m}) has no closed form; odd arguments use series")));
    }
    if m == 0 {
        return Ok(EvenZetaValue { coeff: rat(-1, 2), pi_power: 0 });
    }
    let b = bernoulli(m as usize);
    let two_pow = rbig(num_bigint::BigInt::from(2).pow(m - 1));
    let coeff = b.abs() * two_pow / rbig(factorial(m as u64));
    Ok(EvenZetaValue { coeff, pi_power: m })
}

/// Rising factorial moduli and the Euler–Maclaurin remainder bound
/// `4|(s)_{2M}|/(2π)^{2M} · (N+a)^{1−σ−2M}/(σ+2M−1)`, in log space.
fn em_log_bound(s: (f64, f64), a: f64, n: usize, m: usize) -> f64 {
    let (sig, t) = s;
    let mut lg = 4f64.ln();
    for i in 0..2 * m {
        lg += (sig + i as f64).hypot(t).ln();
    }
    lg -= 2.0 * m as f64 * (2.0 * std::f64::consts::PI).ln();
    lg += (1.0 - sig - 2.0 * m as f64) * (n as f64 + a).ln();
    lg -= (sig + 2.0 * m as f64 - 1.0).ln();
    lg
}

/// Hurwitz `ζ(s, a) = Σ_{n≥0} (n+a)^{−s}` for `Re s > 1`, `0 < a ≤ 1`, by
/// Euler–Maclaurin summation with the remainder bound folded in.
pub fn hurwitz_zeta(s: &CRat, a: &Rational, cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    if s.re <= ri(1) {
        return Err(Error::domain(format!("Hurwitz zeta needs Re(s) > 1, got s = {s}")));
    }
    if !(a.is_positive() && a <= &ri(1)) {
        return Err(Error::invalid(format!("Hurwitz parameter must lie in (0, 1], got {a}")));
    }
    let mp = cfg.mp();
    let sf = (to_f64(&s.re), to_f64(&s.im));
    let af = to_f64(a);
    let target = (cfg.target_tol / 4.0).ln();
    let mut n = 8usize;
    let mut m = 8usize;
    loop {
        if em_log_bound(sf, af, n, m) <= target {
            break;
        }
        if n >= cfg.max_terms {
            break;
        }
        n = (n * 3 / 2).min(cfg.max_terms);
        m = (n / 2).max(8);
    }
    let rem = em_log_bound(sf, af, n, m).exp();

    let s_int = s.as_int();
    let sc = rational_to_cf(&mp, &s.re, &s.im);
    let a_bf = mp.rational(a);
    let mut sum = Cf::zero(&mp);
    let mut abs_sum = 0.0;
    for k in 0..n {
        let x = mp.add(&a_bf, &mp.int(k as i64));
        let t = pow_neg(&mp, &x, &sc, s_int);
        abs_sum += t.abs_f64();
        sum = sum.add(&mp, &t);
    }
    let x = mp.add(&a_bf, &mp.int(n as i64));
    let xs = pow_neg(&mp, &x, &sc, s_int);
    // (N+a)^{1−s}/(s−1)
    let s_minus_1 = sc.sub(&mp, &Cf::one(&mp));
    let integral = xs.scale(&mp, &x).mul(&mp, &s_minus_1.inv(&mp));
    let half = xs.scale(&mp, &mp.div(&mp.int(1), &mp.int(2)));
    sum = sum.add(&mp, &integral).add(&mp, &half);
    abs_sum += integral.abs_f64() + half.abs_f64();

    let inv_x = mp.div(&mp.int(1), &x);
    let inv_x2 = mp.mul(&inv_x, &inv_x);
    let mut rising = sc.clone();
    let mut y = xs.scale(&mp, &inv_x);
    for j in 1..=m {
        let c = bernoulli(2 * j) / rbig(factorial(2 * j as u64));
        let t = rising.mul(&mp, &y).scale(&mp, &mp.rational(&c));
        abs_sum += t.abs_f64();
        sum = sum.add(&mp, &t);
        let s1 = sc.add(&mp, &Cf::real(&mp, mp.int(2 * j as i64 - 1)));
        let s2 = sc.add(&mp, &Cf::real(&mp, mp.int(2 * j as i64)));
        rising = rising.mul(&mp, &s1).mul(&mp, &s2);
        y = y.scale(&mp, &inv_x2);
    }
    let roundoff = 16.0 * (n + m + 8) as f64 * mp.ulp() * abs_sum;
    Ok(EvalResult::new(sum, round_up(rem + roundoff)))
}

/// `φ(s, α) = Σ_{m≥1} e(mα)/m^s`. Integer `s` goes through the
/// iterated-integral kernel (which also covers `s = 1`, `α ∉ ℤ`); other `s`
/// need `Re s > 1` and use the Hurwitz decomposition.
pub fn lerch_phi(s: &CRat, alpha: &Rational, cfg: &EvalConfig) -> Result<EvalResult> {
    let alpha = alpha - alpha.floor();
    if let Some(n) = s.as_int() {
        if n >= 2 && n % 2 == 0 && alpha.is_zero() {
            return Ok(even_zeta_exact(n as u32)?.eval(cfg));
        }
        return super::polylog::mzv_eval(&[n], &[alpha], cfg);
    }
    lerch_phi_hurwitz(s, &alpha, cfg)
}

/// `φ(s, p/q) = q^{−s} Σ_{a=1}^{q} e(ap/q) ζ(s, a/q)`.
pub fn lerch_phi_hurwitz(s: &CRat, alpha: &Rational, cfg: &EvalConfig) -> Result<EvalResult> {
    if s.re <= ri(1) {
        return Err(Error::domain(format!(
            "φ({s}, {alpha}) needs Re(s) > 1 outside the integer-exponent route"
        )));
    }
    let alpha = alpha - alpha.floor();
    let mp = cfg.mp();
    let q = alpha.denom().to_i64().ok_or_else(|| Error::invalid("color denominator too large"))?;
    let p = alpha.numer().clone();
    let sub_cfg = EvalConfig { target_tol: cfg.target_tol / q as f64, ..cfg.clone() };
    let mut sum = Cf::zero(&mp);
    let mut err = 0.0;
    for a in 1..=q {
        let h = hurwitz_zeta(s, &rat(a, q), &sub_cfg)?;
        let w = mp.root_of_unity(&(Rational::from_integer(p.clone() * a) / Rational::from_integer(q.into())));
        sum = sum.add(&mp, &h.value.mul(&mp, &w));
        err += h.bound + h.value.abs_f64() * 8.0 * mp.ulp();
    }
    if q == 1 {
        return Ok(EvalResult::new(sum, err));
    }
    let sc = rational_to_cf(&mp, &s.re, &s.im);
    let scale = pow_neg(&mp, &mp.int(q), &sc, s.as_int());
    let mag = scale.abs_f64();
    let v = sum.mul(&mp, &scale);
    Ok(EvalResult::new(v.clone(), err * mag * (1.0 + 1e-12) + 8.0 * mp.ulp() * v.abs_f64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    #[test]
    fn even_zeta_closed_forms() {
        assert_eq!(even_zeta_exact(0).unwrap(), EvenZetaValue { coeff: rat(-1, 2), pi_power: 0 });
        assert_eq!(even_zeta_exact(2).unwrap(), EvenZetaValue { coeff: rat(1, 6), pi_power: 2 });
        assert_eq!(even_zeta_exact(4).unwrap(), EvenZetaValue { coeff: rat(1, 90), pi_power: 4 });
        // B_10 = 5/66 ⇒ ζ(10) = 2^9·(5/66)/10! π^10 = π^10/93555
        assert_eq!(even_zeta_exact(10).unwrap().coeff, rat(1, 93555));
        assert!(even_zeta_exact(3).is_err());
        let z0 = even_zeta_exact(0).unwrap().eval(&cfg());
        assert_eq!(z0.bound, 0.0);
        assert_eq!(z0.re(), -0.5);
    }

    #[test]
    fn hurwitz_at_one_is_riemann() {
        let h = hurwitz_zeta(&CRat::int(4), &ri(1), &cfg()).unwrap();
        let oracle = PI.powi(4) / 90.0;
        assert!((h.re() - oracle).abs() <= h.bound + 1e-15, "{} vs {}", h.re(), oracle);
        assert!(h.bound < 1e-29);
        let mp = cfg().mp();
        let exact = even_zeta_exact(4).unwrap().eval(&cfg());
        assert!(h.distance(&mp, &exact) <= h.bound + exact.bound);
    }

    #[test]
    fn hurwitz_half_against_direct_sum() {
        // ζ(2, 1/2) = Σ 1/(n+1/2)² = π²/2
        let h = hurwitz_zeta(&CRat::int(2), &rat(1, 2), &cfg()).unwrap();
        let mut direct = 0.0;
        for n in (0..1_000_000).rev() {
            direct += 1.0 / ((n as f64 + 0.5) * (n as f64 + 0.5));
        }
        // tail of the direct sum ≈ 1/10^6
        assert!((h.re() - direct - 1e-6).abs() < 1e-11);
        assert!((h.re() - PI * PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn hurwitz_complex_argument() {
        // ζ(2+i, 1) against a direct sum with Euler–Maclaurin-free tail estimate
        let s = CRat { re: ri(2), im: ri(1) };
        let h = hurwitz_zeta(&s, &ri(1), &cfg()).unwrap();
        let (mut re, mut im) = (0.0f64, 0.0f64);
        let n_max = 200_000;
        for n in 1..=n_max {
            let l = (n as f64).ln();
            let m = (-2.0 * l).exp();
            re += m * (-l).cos();
            im += m * (-l).sin();
        }
        // tail ∫ x^{-s} ≈ N^{1-s}/(s-1)
        let l = (n_max as f64).ln();
        let mag = (-l).exp();
        let (tr, ti) = (mag * (-l).cos(), mag * (-l).sin());
        // divide by (1+i): (a+bi)/(1+i) = ((a+b) + (b−a)i)/2
        re += (tr + ti) / 2.0;
        im += (ti - tr) / 2.0;
        assert!((h.re() - re).abs() < 1e-9 && (h.im() - im).abs() < 1e-9, "{:?}", (h.re(), h.im(), re, im));
    }

    #[test]
    fn hurwitz_rejects_outside_domain() {
        assert!(hurwitz_zeta(&CRat::int(1), &ri(1), &cfg()).unwrap_err().is_domain());
        assert!(hurwitz_zeta(&CRat::int(2), &ri(0), &cfg()).is_err());
    }

    #[test]
    fn hurwitz_bound_honest_under_refinement() {
        let s = CRat::real(rat(5, 2));
        let loose = EvalConfig { target_tol: 1e-8, ..cfg() };
        let a = hurwitz_zeta(&s, &rat(1, 3), &loose).unwrap();
        let b = hurwitz_zeta(&s, &rat(1, 3), &EvalConfig { target_tol: 4e-9, ..cfg() }).unwrap();
        let c = hurwitz_zeta(&s, &rat(1, 3), &cfg()).unwrap();
        let mp = cfg().mp();
        assert!(a.distance(&mp, &c) <= a.bound + c.bound);
        assert!(b.distance(&mp, &a) <= a.bound + b.bound);
    }

    #[test]
    fn lerch_alternating() {
        // φ(2, 1/2) = Σ (−1)^m/m² = −π²/12, by both routes
        let a = lerch_phi(&CRat::int(2), &rat(1, 2), &cfg()).unwrap();
        let b = lerch_phi_hurwitz(&CRat::int(2), &rat(1, 2), &cfg()).unwrap();
        let oracle = -PI * PI / 12.0;
        assert!((a.re() - oracle).abs() < 1e-15 && a.im().abs() < 1e-15);
        let mp = cfg().mp();
        assert!(a.distance(&mp, &b) <= a.bound + b.bound + 1e-60);
    }

    #[test]
    fn lerch_orthogonality() {
        // Σ_{a mod 3} φ(s, a/3) = 3^{1−s} ζ(s)
        let mp = cfg().mp();
        for s in [CRat::int(3), CRat::real(rat(5, 2))] {
            let mut total = lerch_phi_hurwitz(&s, &ri(0), &cfg()).unwrap();
            for a in 1..3 {
                total = total.add(&mp, &lerch_phi_hurwitz(&s, &rat(a, 3), &cfg()).unwrap());
            }
            let z = hurwitz_zeta(&s, &ri(1), &cfg()).unwrap();
            let sf = to_f64(&s.re);
            let rhs = 3f64.powf(1.0 - sf) * z.re();
            assert!((total.re() - rhs).abs() < 1e-14 && total.im().abs() < 1e-14);
        }
    }

    #[test]
    fn lerch_at_one_with_color() {
        // φ(1, 1/2) = −ln 2
        let v = lerch_phi(&CRat::int(1), &rat(1, 2), &cfg()).unwrap();
        assert!((v.re() + 2f64.ln()).abs() < 1e-15);
        assert!(lerch_phi(&CRat::int(1), &ri(0), &cfg()).unwrap_err().is_domain());
    }
}
