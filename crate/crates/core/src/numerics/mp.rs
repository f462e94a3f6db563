//! Thin complex layer over `astro_float::BigFloat` at a fixed precision.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as BigSign};
use num_traits::ToPrimitive;

use crate::arith::Rational;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

fn pi_cache() -> &'static RwLock<HashMap<usize, BigFloat>> {
    static PI: OnceLock<RwLock<HashMap<usize, BigFloat>>> = OnceLock::new();
    PI.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Working precision plus the handful of real operations the kernels need.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mp {
    pub bits: usize,
}

impl Mp {
    pub fn new(bits: usize) -> Self {
        Mp { bits }
    }

    /// Unit roundoff `2^{1−p}` as an `f64` (0 if it underflows, which only
    /// happens far beyond any tolerance we report).
    pub fn ulp(&self) -> f64 {
        2f64.powi(1 - self.bits as i32)
    }

    pub fn zero(&self) -> BigFloat {
        BigFloat::from_u8(0, self.bits)
    }

    pub fn int(&self, n: i64) -> BigFloat {
        BigFloat::from_i64(n, self.bits)
    }

    pub fn from_f64(&self, x: f64) -> BigFloat {
        BigFloat::from_f64(x, self.bits)
    }

    pub fn bigint(&self, n: &BigInt) -> BigFloat {
        if let Some(v) = n.to_i64() {
            return self.int(v);
        }
        let (sign, limbs) = n.to_u64_digits();
        let base = BigFloat::from_u8(2, self.bits).powi(64, self.bits, RM);
        let mut acc = self.zero();
        for &l in limbs.iter().rev() {
            acc = acc.mul(&base, self.bits, RM).add(&BigFloat::from_u64(l, self.bits), self.bits, RM);
        }
        if sign == BigSign::Minus {
            acc.inv_sign();
        }
        acc
    }

    pub fn rational(&self, r: &Rational) -> BigFloat {
        let n = self.bigint(r.numer());
        if r.denom() == &BigInt::from(1) {
            return n;
        }
        n.div(&self.bigint(r.denom()), self.bits, RM)
    }

    pub fn add(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.add(b, self.bits, RM)
    }

    pub fn sub(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.sub(b, self.bits, RM)
    }

    pub fn mul(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.mul(b, self.bits, RM)
    }

    pub fn div(&self, a: &BigFloat, b: &BigFloat) -> BigFloat {
        a.div(b, self.bits, RM)
    }

    pub fn powi(&self, a: &BigFloat, n: usize) -> BigFloat {
        a.powi(n, self.bits, RM)
    }

    pub fn sqrt(&self, a: &BigFloat) -> BigFloat {
        a.sqrt(self.bits, RM)
    }

    pub fn ln(&self, a: &BigFloat) -> BigFloat {
        with_cc(|cc| a.ln(self.bits, RM, cc))
    }

    pub fn exp(&self, a: &BigFloat) -> BigFloat {
        with_cc(|cc| a.exp(self.bits, RM, cc))
    }

    pub fn sin(&self, a: &BigFloat) -> BigFloat {
        with_cc(|cc| a.sin(self.bits, RM, cc))
    }

    pub fn cos(&self, a: &BigFloat) -> BigFloat {
        with_cc(|cc| a.cos(self.bits, RM, cc))
    }

    pub fn atan(&self, a: &BigFloat) -> BigFloat {
        with_cc(|cc| a.atan(self.bits, RM, cc))
    }

    /// π at this precision, computed once per precision level.
    pub fn pi(&self) -> BigFloat {
        if let Some(p) = pi_cache().read().expect("pi cache").get(&self.bits) {
            return p.clone();
        }
        let p = with_cc(|cc| cc.pi(self.bits, RM));
        pi_cache().write().expect("pi cache").insert(self.bits, p.clone());
        p
    }

    /// `e(θ) = exp(2πiθ)` for rational `θ`, exact at the quarter points.
    pub fn root_of_unity(&self, theta: &Rational) -> Cf {
        let t = theta - theta.floor();
        let four = &t * Rational::from_integer(4.into());
        if four.is_integer() {
            let (re, im) = match four.to_integer().to_i64().unwrap_or(0) {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            return Cf::new(self.int(re), self.int(im));
        }
        let ang = self.mul(&self.mul(&self.pi(), &self.int(2)), &self.rational(&t));
        Cf::new(self.cos(&ang), self.sin(&ang))
    }

    pub fn decimal(&self, a: &BigFloat) -> String {
        with_cc(|cc| a.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }
}

/// Nearest-ish `f64` of a `BigFloat` (top mantissa word only).
pub fn to_f64(a: &BigFloat) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    if a.is_nan() {
        return f64::NAN;
    }
    if a.is_inf() {
        return if a.is_inf_pos() { f64::INFINITY } else { f64::NEG_INFINITY };
    }
    let Some((m, _, s, e, _)) = a.as_raw_parts() else {
        return f64::NAN;
    };
    let top = *m.last().unwrap_or(&0) as f64;
    let mag = top * 2f64.powi(e.saturating_sub(64).max(-1100));
    if s == Sign::Neg {
        -mag
    } else {
        mag
    }
}

/// Upper bound for `|a|` as `f64`, rounded away from zero.
pub fn abs_up(a: &BigFloat) -> f64 {
    to_f64(a).abs() * (1.0 + 4.0 * f64::EPSILON) + f64::MIN_POSITIVE
}

/// Complex number at working precision.
#[derive(Debug, Clone)]
pub struct Cf {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cf {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Cf { re, im }
    }

    pub fn real(mp: &Mp, re: BigFloat) -> Self {
        Cf { re, im: mp.zero() }
    }

    pub fn zero(mp: &Mp) -> Self {
        Cf { re: mp.zero(), im: mp.zero() }
    }

    pub fn one(mp: &Mp) -> Self {
        Cf { re: mp.int(1), im: mp.zero() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, mp: &Mp, o: &Cf) -> Cf {
        Cf { re: mp.add(&self.re, &o.re), im: mp.add(&self.im, &o.im) }
    }

    pub fn sub(&self, mp: &Mp, o: &Cf) -> Cf {
        Cf { re: mp.sub(&self.re, &o.re), im: mp.sub(&self.im, &o.im) }
    }

    pub fn neg(&self) -> Cf {
        Cf { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, mp: &Mp, o: &Cf) -> Cf {
        match (self.is_real(), o.is_real()) {
            (true, true) => Cf::real(mp, mp.mul(&self.re, &o.re)),
            (true, false) => o.scale(mp, &self.re),
            (false, true) => self.scale(mp, &o.re),
            (false, false) => Cf {
                re: mp.sub(&mp.mul(&self.re, &o.re), &mp.mul(&self.im, &o.im)),
                im: mp.add(&mp.mul(&self.re, &o.im), &mp.mul(&self.im, &o.re)),
            },
        }
    }

    pub fn scale(&self, mp: &Mp, r: &BigFloat) -> Cf {
        if self.is_real() {
            return Cf::real(mp, mp.mul(&self.re, r));
        }
        Cf { re: mp.mul(&self.re, r), im: mp.mul(&self.im, r) }
    }

    pub fn inv(&self, mp: &Mp) -> Cf {
        if self.is_real() {
            return Cf::real(mp, mp.div(&mp.int(1), &self.re));
        }
        let d = mp.add(&mp.mul(&self.re, &self.re), &mp.mul(&self.im, &self.im));
        Cf { re: mp.div(&self.re, &d), im: mp.div(&self.im, &d).neg() }
    }

    pub fn abs_f64(&self) -> f64 {
        to_f64(&self.re).hypot(to_f64(&self.im))
    }

    /// `exp(w)` for complex `w`.
    pub fn exp(&self, mp: &Mp) -> Cf {
        let r = mp.exp(&self.re);
        if self.is_real() {
            return Cf::real(mp, r);
        }
        Cf { re: mp.mul(&r, &mp.cos(&self.im)), im: mp.mul(&r, &mp.sin(&self.im)) }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.re), to_f64(&self.im))
    }
}

/// Exact complex rational exponent converted to working precision.
pub fn rational_to_cf(mp: &Mp, re: &Rational, im: &Rational) -> Cf {
    Cf::new(mp.rational(re), mp.rational(im))
}

/// `x^{−s}` for real `x > 0` and complex `s`, with integer fast path.
pub fn pow_neg(mp: &Mp, x: &BigFloat, s: &Cf, s_int: Option<i64>) -> Cf {
    if let Some(n) = s_int {
        let p = mp.powi(x, n.unsigned_abs() as usize);
        let v = if n >= 0 { mp.div(&mp.int(1), &p) } else { p };
        return Cf::real(mp, v);
    }
    let l = mp.ln(x);
    let w = Cf::new(mp.mul(&s.re, &l).neg(), mp.mul(&s.im, &l).neg());
    w.exp(mp)
}
