//! Exact rational arithmetic: Bernoulli numbers and polynomials, binomial and
//! multinomial coefficients, and the integral `C_s = ∫_0^1 Π B_{s_j}(x) dx`.

use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact fraction in lowest terms with positive denominator.
pub type Rational = BigRational;

pub fn ri(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rbig(n: BigInt) -> Rational {
    Rational::from_integer(n)
}

/// `(-1)^n` as a small integer.
pub fn sign_pow(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Parse `"p/q"` or `"p"` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::invalid(format!("not a rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => parse_decimal(s).ok_or_else(bad),
    }
}

/// Parse a decimal literal such as `-1.25` or `3` exactly.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    if body.is_empty() {
        return None;
    }
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().ok()? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    let v = Rational::new(num, den);
    Some(if neg { -v } else { v })
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Binomial coefficient as an integer; zero when `k < 0` or `k > n`.
pub fn binomial_int(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// `C(n, k)` with `C(n, k) = 0` for `k < 0` or `k > n`. Negative `n` is
/// rejected: no generalized binomials are ever needed.
pub fn binomial(n: i64, k: i64) -> Result<Rational> {
    if n < 0 {
        return Err(Error::invalid(format!("binomial with negative upper index {n}")));
    }
    Ok(rbig(binomial_int(n as u64, k)))
}

/// Multinomial `(Σ v choose v_1, …, v_t)`; zero if any component is negative.
pub fn multinomial(parts: &[i64]) -> BigInt {
    if parts.iter().any(|&p| p < 0) {
        return BigInt::zero();
    }
    let mut total = 0u64;
    let mut acc = BigInt::one();
    for &p in parts {
        total += p as u64;
        acc *= binomial_int(total, p);
    }
    acc
}

fn table() -> &'static RwLock<Vec<Rational>> {
    static TABLE: OnceLock<RwLock<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| RwLock::new(vec![Rational::one()]))
}

/// Bernoulli number `B_n` under the convention `t e^{xt}/(e^t-1)` at `x = 0`,
/// so `B_1 = -1/2`. Memoized; the shared table only ever grows.
pub fn bernoulli(n: usize) -> Rational {
    if let Some(b) = table().read().expect("bernoulli table poisoned").get(n) {
        return b.clone();
    }
    let mut t = table().write().expect("bernoulli table poisoned");
    // Another writer may have extended the table in between.
    while t.len() <= n {
        let m = t.len();
        // Σ_{k=0}^{m} C(m+1,k) B_k = 0
        let mut acc = Rational::zero();
        for (k, b) in t.iter().enumerate() {
            if !b.is_zero() {
                acc += b * rbig(binomial_int(m as u64 + 1, k as i64));
            }
        }
        t.push(-acc / ri(m as i64 + 1));
    }
    t[n].clone()
}

/// Coefficients of `B_n(x)` in ascending powers of `x`.
pub fn bernoulli_poly(n: usize) -> Vec<Rational> {
    (0..=n)
        .map(|k| rbig(binomial_int(n as u64, k as i64)) * bernoulli(n - k))
        .collect()
}

/// `C_s = ∫_0^1 Π_j B_{s_j}(x) dx` by the closed multiple sum
/// `Σ_r Π_j C(s_j, r_j) B_{s_j - r_j} / (|r| + 1)`.
pub fn c_const(s: &[u32]) -> Result<Rational> {
    if s.is_empty() || s.contains(&0) {
        return Err(Error::invalid("c_const needs a non-empty vector of positive entries"));
    }
    // Fold one factor at a time, keyed by the running |r|.
    let mut acc: Vec<Rational> = vec![Rational::one()];
    for &sj in s {
        let sj = sj as usize;
        let mut next = vec![Rational::zero(); acc.len() + sj];
        for (deg, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for r in 0..=sj {
                let b = bernoulli(sj - r);
                if b.is_zero() {
                    continue;
                }
                next[deg + r] += a * rbig(binomial_int(sj as u64, r as i64)) * b;
            }
        }
        acc = next;
    }
    Ok(acc
        .into_iter()
        .enumerate()
        .map(|(deg, a)| a / ri(deg as i64 + 1))
        .sum())
}

/// Dense polynomial helpers over the rationals (ascending coefficients).
pub mod poly {
    use super::*;

    pub fn mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }

    pub fn eval(p: &[Rational], x: &Rational) -> Rational {
        p.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn derivative(p: &[Rational]) -> Vec<Rational> {
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * ri(k as i64))
            .collect()
    }

    pub fn integrate_unit(p: &[Rational]) -> Rational {
        p.iter()
            .enumerate()
            .map(|(k, c)| c / ri(k as i64 + 1))
            .sum()
    }

    pub fn trim(mut p: Vec<Rational>) -> Vec<Rational> {
        while p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }
}

/// Render a rational as `p` or `p/q`.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Serde adapter storing a rational as its `p/q` string.
pub mod rational_str {
    use super::{fmt_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let t = String::deserialize(d)?;
        parse_rational(&t).map_err(serde::de::Error::custom)
    }
}

/// Approximate a rational as `f64` (used only for diagnostics and bounds).
pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| if r.is_negative() { f64::MIN } else { f64::MAX })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bernoulli numbers from the power series of t/(e^t - 1), computed by
    /// inverting (e^t - 1)/t = Σ t^k/(k+1)! term by term.
    fn bernoulli_by_series(n: usize) -> Vec<Rational> {
        let e: Vec<Rational> = (0..=n)
            .map(|k| Rational::new(BigInt::one(), factorial(k as u64 + 1)))
            .collect();
        let mut inv = vec![Rational::zero(); n + 1];
        inv[0] = Rational::one();
        for m in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=m {
                acc += &e[k] * &inv[m - k];
            }
            inv[m] = -acc;
        }
        inv.into_iter()
            .enumerate()
            .map(|(k, c)| c * rbig(factorial(k as u64)))
            .collect()
    }

    #[test]
    fn bernoulli_small_values() {
        assert_eq!(bernoulli(0), ri(1));
        assert_eq!(bernoulli(1), rat(-1, 2));
        assert_eq!(bernoulli(2), rat(1, 6));
        assert_eq!(bernoulli(7), ri(0));
        assert_eq!(bernoulli(10), rat(5, 66));
    }

    #[test]
    fn bernoulli_twelve_matches_series() {
        let series = bernoulli_by_series(12);
        assert_eq!(bernoulli(12), series[12]);
        assert_eq!(series[12], rat(-691, 2730));
        for (n, b) in series.iter().enumerate() {
            assert_eq!(&bernoulli(n), b, "B_{n}");
        }
    }

    #[test]
    fn bernoulli_recurrence_holds_to_forty() {
        for n in 1..=40usize {
            let s: Rational = (0..=n)
                .map(|k| rbig(binomial_int(n as u64 + 1, k as i64)) * bernoulli(k))
                .sum();
            assert!(s.is_zero(), "n = {n}");
        }
        for m in 1..=20 {
            assert!(bernoulli(2 * m + 1).is_zero());
        }
    }

    #[test]
    fn binomial_conventions() {
        assert_eq!(binomial(0, -1).unwrap(), ri(0));
        assert_eq!(binomial(4, 2).unwrap(), ri(6));
        assert_eq!(binomial(3, 4).unwrap(), ri(0));
        assert!(binomial(-1, 0).is_err());
        // complementary index: C(a+b-2r-1, a-2r) = C(a+b-2r-1, b-1) at a=3, b=2, r=1
        assert_eq!(binomial(2, 1).unwrap(), ri(2));
        assert_eq!(binomial(3 + 2 - 2 - 1, 3 - 2).unwrap(), binomial(3 + 2 - 2 - 1, 2 - 1).unwrap());
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(&[2, 1, 1]), BigInt::from(12));
        assert_eq!(multinomial(&[0, 0]), BigInt::one());
        assert_eq!(multinomial(&[3, -1]), BigInt::zero());
    }

    #[test]
    fn bernoulli_polynomials() {
        assert_eq!(bernoulli_poly(0), vec![ri(1)]);
        assert_eq!(bernoulli_poly(2), vec![rat(1, 6), ri(-1), ri(1)]);
        let d5 = poly::derivative(&bernoulli_poly(5));
        let b4: Vec<Rational> = bernoulli_poly(4).into_iter().map(|c| c * ri(5)).collect();
        assert_eq!(d5, b4);
        for n in 0..=30 {
            assert_eq!(poly::eval(&bernoulli_poly(n), &ri(0)), bernoulli(n));
        }
    }

    #[test]
    fn c_const_examples() {
        for n in 1..8 {
            assert!(c_const(&[n]).unwrap().is_zero());
        }
        assert_eq!(c_const(&[1, 1]).unwrap(), rat(1, 12));
        assert_eq!(c_const(&[2, 2]).unwrap(), rat(1, 180));
        assert!(c_const(&[]).is_err());
    }

    #[test]
    fn c_const_matches_polynomial_integration() {
        let mut cases: Vec<Vec<u32>> = Vec::new();
        for a in 1..=5 {
            cases.push(vec![a]);
            for b in 1..=5 {
                cases.push(vec![a, b]);
                for c in 1..=5 {
                    cases.push(vec![a, b, c]);
                }
            }
        }
        for s in cases {
            let prod = s
                .iter()
                .fold(vec![ri(1)], |acc, &k| poly::mul(&acc, &bernoulli_poly(k as usize)));
            assert_eq!(c_const(&s).unwrap(), poly::integrate_unit(&prod), "s = {s:?}");
        }
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_decimal("1.5"), Some(rat(3, 2)));
        assert_eq!(parse_decimal("-0.25"), Some(rat(-1, 4)));
        assert_eq!(parse_decimal("2"), Some(ri(2)));
        assert_eq!(parse_decimal("abc"), None);
        assert_eq!(parse_rational("2/6").unwrap(), rat(1, 3));
        assert!(parse_rational("1/0").is_err());
    }
}
