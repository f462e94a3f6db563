//! Truncated direct summation in `f64` complex arithmetic, for exponents the
//! exact-arithmetic kernels do not cover (non-integer `z`, far colors).
//! Bounds are sound but loose: tails are majorized by integrals of
//! `x^{−p}(1+ln x)^q` and roundoff by running absolute sums.

use num_complex::Complex64;
use num_traits::ToPrimitive;

use super::mp::Cf;
use super::{log_power_tail, round_up, EvalConfig, EvalResult};
use crate::arith::{to_f64, Rational};
use crate::error::{Error, Result};
use crate::symexpr::CRat;

/// Largest total for the quadratic-cost convolution.
const MT_CAP: usize = 4096;

/// `n ↦ e(c n)` with exact reduction of `c n` modulo 1.
struct Character {
    p: i128,
    q: i128,
    table: Option<Vec<Complex64>>,
}

impl Character {
    fn new(c: &Rational) -> Result<Self> {
        let c = c - c.floor();
        let (p, q) = match (c.numer().to_i128(), c.denom().to_i128()) {
            (Some(p), Some(q)) => (p, q),
            _ => return Err(Error::invalid("color denominator too large for direct summation")),
        };
        let table = (q <= 4096).then(|| (0..q).map(|r| cis(r as f64 / q as f64)).collect());
        Ok(Character { p, q, table })
    }

    fn at(&self, n: usize) -> Complex64 {
        if self.p == 0 {
            return Complex64::new(1.0, 0.0);
        }
        let r = (self.p * n as i128).rem_euclid(self.q);
        match &self.table {
            Some(t) => t[r as usize],
            None => cis(r as f64 / self.q as f64),
        }
    }
}

fn cis(t: f64) -> Complex64 {
    let a = 2.0 * std::f64::consts::PI * t;
    Complex64::new(a.cos(), a.sin())
}

fn exp_c64(s: &CRat) -> Complex64 {
    Complex64::new(to_f64(&s.re), to_f64(&s.im))
}

/// `n^{−s}`.
fn pow_neg(n: usize, s: Complex64) -> Complex64 {
    if s.im == 0.0 && s.re.fract() == 0.0 {
        return Complex64::new((n as f64).powi(-(s.re as i32)), 0.0);
    }
    (-s * (n as f64).ln()).exp()
}

fn to_result(cfg: &EvalConfig, v: Complex64, bound: f64) -> EvalResult {
    let mp = cfg.mp();
    EvalResult::new(Cf::new(mp.from_f64(v.re), mp.from_f64(v.im)), round_up(bound))
}

/// Smallest `N` with `tail(N) ≤ tol`, capped at `cap`.
fn choose_n(cap: usize, tol: f64, tail: impl Fn(f64) -> f64) -> usize {
    let mut n = 64usize.min(cap);
    while n < cap && tail(n as f64) > tol {
        n = (n * 2).min(cap);
    }
    n
}

fn tail_ok(n: f64, p: f64, q: usize) -> bool {
    1.0 + n.ln() >= q as f64 / p
}

/// `ζ(s_1,…,s_d; c_1,…,c_d) = Σ_{m_1>…>m_d} Π e(c_i m_i) m_i^{−s_i}` for
/// `Re s_1 > 1` and `Re s_j ≥ 1` otherwise.
pub fn mzv_eval_direct(exps: &[CRat], colors: &[Rational], cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    if exps.is_empty() || exps.len() != colors.len() {
        return Err(Error::invalid("MZV needs matching non-empty exponent and color vectors"));
    }
    let s: Vec<Complex64> = exps.iter().map(exp_c64).collect();
    let d = s.len();
    if s[0].re <= 1.0 || s[1..].iter().any(|x| x.re < 1.0) {
        return Err(Error::domain(format!(
            "direct MZV summation needs Re s_1 > 1 and Re s_j ≥ 1 (s = {})",
            exps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
        )));
    }
    let chars: Vec<Character> = colors.iter().map(Character::new).collect::<Result<_>>()?;
    let p = s[0].re;
    let tail = |n: f64| {
        if tail_ok(n, p, d - 1) {
            log_power_tail(n, p, d - 1)
        } else {
            f64::INFINITY
        }
    };
    let n = choose_n(cfg.max_terms, cfg.target_tol / 2.0, tail);

    // acc[j] holds the running sum over m_j ≤ m of the inner nested series.
    let mut acc = vec![Complex64::new(0.0, 0.0); d + 1];
    let mut abs = vec![0.0f64; d + 1];
    acc[d] = Complex64::new(1.0, 0.0);
    abs[d] = 1.0;
    for m in 1..=n {
        // Walk outward so each level sees the inner sum over indices < m.
        for j in 0..d {
            let t = chars[j].at(m) * pow_neg(m, s[j]);
            let inner = acc[j + 1];
            let inner_abs = abs[j + 1];
            acc[j] += t * inner;
            abs[j] += t.norm() * inner_abs;
        }
    }
    let roundoff = 8.0 * (n as f64 + 4.0) * (d as f64 + 2.0) * f64::EPSILON * abs[0];
    Ok(to_result(cfg, acc[0], tail(n as f64) + roundoff))
}

/// Colored Mordell–Tornheim value
/// `Σ_{m_i≥1} Π_{i≤k} e(α_i m_i) m_i^{−s_i} · e(α_{k+1} M) M^{−s_{k+1}}`,
/// `M = m_1+…+m_k`, by convolution over the total `M ≤ N`. Needs
/// `k ≤ 3`, `Re s_i ≥ 1` for `i ≤ k`, `Re s_{k+1} ≥ 0` and `min Re s_i + Re s_{k+1} > 1`.
pub fn mtzv_eval_direct(exps: &[CRat], colors: &[Rational], cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    if exps.len() < 2 || exps.len() != colors.len() {
        return Err(Error::invalid("MT needs matching exponent and color vectors of length ≥ 2"));
    }
    let s: Vec<Complex64> = exps.iter().map(exp_c64).collect();
    let k = s.len() - 1;
    if k > 3 {
        return Err(Error::domain("direct MT summation is limited to depth 3; use the conversion route"));
    }
    let last = s[k].re;
    let min_inner = s[..k].iter().map(|x| x.re).fold(f64::INFINITY, f64::min);
    if min_inner < 1.0 || last < 0.0 || min_inner + last <= 1.0 {
        return Err(Error::domain(format!(
            "direct MT summation outside its bounded region (s = {})",
            exps.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(",")
        )));
    }
    let chars: Vec<Character> = colors.iter().map(Character::new).collect::<Result<_>>()?;
    let kf = k as f64;
    let tail = |n: f64| {
        let mut t = 0.0;
        for x in &s[..k] {
            let p = x.re + last;
            if !tail_ok(n, p, k - 1) {
                return f64::INFINITY;
            }
            t += kf.powf(x.re) * log_power_tail(n, p, k - 1);
        }
        t
    };
    let n = choose_n(cfg.max_terms.min(MT_CAP), cfg.target_tol / 2.0, tail);

    let term = |i: usize, m: usize| chars[i].at(m) * pow_neg(m, s[i]);
    // conv[M] = Σ_{m_1+…+m_j = M} Π term(i, m_i)
    let mut conv: Vec<Complex64> = (0..=n).map(|m| if m == 0 { 0.0.into() } else { term(0, m) }).collect();
    let mut conv_abs: Vec<f64> = conv.iter().map(|c| c.norm()).collect();
    for i in 1..k {
        let f: Vec<Complex64> = (0..=n).map(|m| if m == 0 { 0.0.into() } else { term(i, m) }).collect();
        let mut next = vec![Complex64::new(0.0, 0.0); n + 1];
        let mut next_abs = vec![0.0; n + 1];
        for total in 2..=n {
            let mut a = Complex64::new(0.0, 0.0);
            let mut b = 0.0;
            for m in 1..total {
                a += conv[total - m] * f[m];
                b += conv_abs[total - m] * f[m].norm();
            }
            next[total] = a;
            next_abs[total] = b;
        }
        conv = next;
        conv_abs = next_abs;
    }
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs = 0.0;
    for total in 1..=n {
        let w = chars[k].at(total) * pow_neg(total, s[k]);
        sum += conv[total] * w;
        abs += conv_abs[total] * w.norm();
    }
    let roundoff = 8.0 * (n as f64 + 4.0) * (k as f64 + 3.0) * f64::EPSILON * abs;
    Ok(to_result(cfg, sum, tail(n as f64) + roundoff))
}
