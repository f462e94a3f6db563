//! Canonical rational-linear combinations of products of transcendental
//! atoms, with one optional symbol `z` appearing affinely in exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{fmt_rational, parse_decimal, parse_rational, ri, Rational};
use crate::error::{Error, Result};

/// Exponent `constant + z·[z]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AffineExp {
    pub z: bool,
    pub constant: i64,
}

impl AffineExp {
    pub const Z: AffineExp = AffineExp { z: true, constant: 0 };

    pub fn int(n: i64) -> Self {
        AffineExp { z: false, constant: n }
    }

    pub fn z_plus(n: i64) -> Self {
        AffineExp { z: true, constant: n }
    }

    pub fn checked_add(self, o: AffineExp) -> Result<AffineExp> {
        if self.z && o.z {
            return Err(Error::invalid("exponent would contain 2z"));
        }
        Ok(AffineExp { z: self.z || o.z, constant: self.constant + o.constant })
    }
}

impl fmt::Display for AffineExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.z, self.constant) {
            (false, c) => write!(f, "{c}"),
            (true, 0) => write!(f, "z"),
            (true, c) if c > 0 => write!(f, "z+{c}"),
            (true, c) => write!(f, "z{c}"),
        }
    }
}

impl From<AffineExp> for String {
    fn from(e: AffineExp) -> String {
        e.to_string()
    }
}

impl TryFrom<String> for AffineExp {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl std::str::FromStr for AffineExp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::invalid(format!("bad exponent {s:?}"));
        if let Some(rest) = s.strip_prefix('z') {
            let c = if rest.is_empty() {
                0
            } else {
                let rest = rest.strip_prefix('+').unwrap_or(rest);
                rest.parse().map_err(|_| bad())?
            };
            Ok(AffineExp::z_plus(c))
        } else {
            s.parse().map(AffineExp::int).map_err(|_| bad())
        }
    }
}

/// A root of unity `e(α)`, stored as `α` reduced into `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Color(Rational);

impl Color {
    pub fn new(a: Rational) -> Self {
        let f = a.floor();
        Color(a - f)
    }

    pub fn zero() -> Self {
        Color(Rational::zero())
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn add(&self, o: &Color) -> Color {
        Color::new(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Color) -> Color {
        Color::new(&self.0 - &o.0)
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

impl From<Color> for String {
    fn from(c: Color) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Color {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Ok(Color::new(parse_rational(&s)?))
    }
}

/// Transcendental factors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Atom {
    /// `ζ(m)` for even `m ≥ 0`, with `ζ(0) = −1/2`.
    EvenZeta { arg: u32 },
    /// `ζ(m)` if `m` is even, 0 otherwise.
    TildeZeta { arg: u32 },
    /// Colored Mordell–Tornheim value; the last slot is the total-sum slot.
    Mt { exps: Vec<AffineExp>, colors: Vec<Color> },
    /// Colored multiple zeta value `Σ_{m_1>…>m_d} Π e(c_i m_i)/m_i^{s_i}`.
    Mzv { exps: Vec<AffineExp>, colors: Vec<Color> },
    /// `φ(s, α) = Σ_m e(mα)/m^s`.
    Lerch { exp: AffineExp, color: Color },
}

impl Atom {
    pub fn even_zeta(arg: u32) -> Result<Atom> {
        if arg % 2 != 0 {
            return Err(Error::invalid(format!("even zeta at odd argument {arg}")));
        }
        Ok(Atom::EvenZeta { arg })
    }

    pub fn lerch(exp: AffineExp, color: Color) -> Atom {
        Atom::Lerch { exp, color }
    }

    pub fn zeta(exp: AffineExp) -> Atom {
        Atom::Lerch { exp, color: Color::zero() }
    }

    /// Canonical MT atom: the first `d` slots are sorted (the series is
    /// symmetric in them) and depth 1 collapses to a Lerch atom.
    pub fn mt(exps: Vec<AffineExp>, colors: Vec<Color>) -> Result<Atom> {
        if exps.len() != colors.len() || exps.len() < 2 {
            return Err(Error::invalid(format!(
                "MT atom needs matching exponent/color vectors of length ≥ 2, got {} and {}",
                exps.len(),
                colors.len()
            )));
        }
        if exps.iter().filter(|e| e.z).count() > 1 {
            return Err(Error::invalid("MT atom with two z-slots"));
        }
        if exps.len() == 2 {
            return Ok(Atom::Lerch {
                exp: exps[0].checked_add(exps[1])?,
                color: colors[0].add(&colors[1]),
            });
        }
        let d = exps.len() - 1;
        let mut slots: Vec<(AffineExp, Color)> =
            exps[..d].iter().copied().zip(colors[..d].iter().cloned()).collect();
        slots.sort();
        let (mut e, mut c): (Vec<_>, Vec<_>) = slots.into_iter().unzip();
        e.push(exps[d]);
        c.push(colors[d].clone());
        Ok(Atom::Mt { exps: e, colors: c })
    }

    /// Plain MT atom with all colors trivial.
    pub fn mt_plain(exps: &[AffineExp]) -> Result<Atom> {
        Atom::mt(exps.to_vec(), vec![Color::zero(); exps.len()])
    }

    pub fn mzv(exps: Vec<AffineExp>, colors: Vec<Color>) -> Result<Atom> {
        if exps.len() != colors.len() || exps.is_empty() {
            return Err(Error::invalid("MZV atom needs matching non-empty vectors"));
        }
        if exps[1..].iter().any(|e| e.z) {
            return Err(Error::invalid("z may only sit in the leading MZV slot"));
        }
        if exps.len() == 1 {
            return Ok(Atom::Lerch { exp: exps[0], color: colors[0].clone() });
        }
        Ok(Atom::Mzv { exps, colors })
    }

    pub fn mzv_plain(exps: &[i64]) -> Result<Atom> {
        Atom::mzv(exps.iter().map(|&e| AffineExp::int(e)).collect(), vec![Color::zero(); exps.len()])
    }

    pub fn has_z(&self) -> bool {
        match self {
            Atom::EvenZeta { .. } | Atom::TildeZeta { .. } => false,
            Atom::Mt { exps, .. } | Atom::Mzv { exps, .. } => exps.iter().any(|e| e.z),
            Atom::Lerch { exp, .. } => exp.z,
        }
    }

    /// Depth in the sense of number of summation variables (MT: `d`, MZV:
    /// its length, Lerch: 1, constants: 0).
    pub fn depth(&self) -> usize {
        match self {
            Atom::EvenZeta { .. } | Atom::TildeZeta { .. } => 0,
            Atom::Mt { exps, .. } => exps.len() - 1,
            Atom::Mzv { exps, .. } => exps.len(),
            Atom::Lerch { .. } => 1,
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        let colored = |c: &[Color]| c.iter().any(|x| !x.is_zero());
        match self {
            Atom::EvenZeta { arg } => write!(f, "zeta({arg})"),
            Atom::TildeZeta { arg } => write!(f, "tzeta({arg})"),
            Atom::Mt { exps, colors } if colored(colors) => {
                write!(f, "zeta_MT({};{})", list(exps), list(colors))
            }
            Atom::Mt { exps, .. } => write!(f, "zeta_MT({})", list(exps)),
            Atom::Mzv { exps, colors } if colored(colors) => {
                write!(f, "zeta({};{})", list(exps), list(colors))
            }
            Atom::Mzv { exps, .. } => write!(f, "zeta({})", list(exps)),
            Atom::Lerch { exp, color } if color.is_zero() => write!(f, "zeta({exp})"),
            Atom::Lerch { exp, color } => write!(f, "phi({exp};{color})"),
        }
    }
}

/// Behaviour the linear-combination container needs from its atoms.
pub trait Factor: Clone + Ord + fmt::Display {
    /// Simplified form: `None` means the factor is identically zero.
    fn simplify(self) -> Option<Self>;
    fn mentions_z(&self) -> bool;
}

impl Factor for Atom {
    fn simplify(self) -> Option<Self> {
        match self {
            Atom::TildeZeta { arg } if arg % 2 == 1 => None,
            Atom::TildeZeta { arg } => Some(Atom::EvenZeta { arg }),
            a => Some(a),
        }
    }

    fn mentions_z(&self) -> bool {
        self.has_z()
    }
}

/// Canonical `Σ coeff · Π atoms`: keys are sorted atom lists, zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinComb<A: Factor> {
    terms: BTreeMap<Vec<A>, Rational>,
}

pub type Expr = LinComb<Atom>;

impl<A: Factor> Default for LinComb<A> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<A: Factor> LinComb<A> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(c, Vec::new()).expect("constant term has no atoms")
    }

    pub fn atom(a: A) -> Self {
        Self::term(Rational::one(), vec![a]).expect("single atom cannot clash")
    }

    /// `c · Π atoms`, simplified; rejects two z-bearing factors.
    pub fn term(c: Rational, atoms: Vec<A>) -> Result<Self> {
        let mut out = Self::zero();
        out.add_term(c, atoms)?;
        Ok(out)
    }

    fn add_term(&mut self, c: Rational, atoms: Vec<A>) -> Result<()> {
        if c.is_zero() {
            return Ok(());
        }
        let mut key = Vec::with_capacity(atoms.len());
        for a in atoms {
            match a.simplify() {
                Some(a) => key.push(a),
                None => return Ok(()),
            }
        }
        if key.iter().filter(|a| a.mentions_z()).count() > 1 {
            let shown: Vec<String> = key.iter().map(|a| a.to_string()).collect();
            return Err(Error::invalid(format!(
                "product would contain two z-bearing factors: {}",
                shown.join("*")
            )));
        }
        key.sort();
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
        Ok(())
    }

    /// Re-apply simplification, merging and sorting. Idempotent.
    pub fn normalize(&self) -> Result<Self> {
        let mut out = Self::zero();
        for (k, c) in &self.terms {
            out.add_term(c.clone(), k.clone())?;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<A>, &Rational)> {
        self.terms.iter()
    }

    pub fn atoms(&self) -> impl Iterator<Item = &A> {
        self.terms.keys().flatten()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &o.terms {
            out.add_term(c.clone(), k.clone()).expect("keys are already canonical");
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&ri(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect() }
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let mut key = ka.clone();
                key.extend(kb.iter().cloned());
                out.add_term(ca * cb, key)?;
            }
        }
        Ok(out)
    }

    /// Replace every atom by an expression (a ring map on the monomials).
    pub fn map_atoms<B: Factor>(
        &self,
        mut f: impl FnMut(&A) -> Result<LinComb<B>>,
    ) -> Result<LinComb<B>> {
        let mut out = LinComb::<B>::zero();
        for (k, c) in &self.terms {
            let mut acc = LinComb::<B>::constant(c.clone());
            for a in k {
                acc = acc.mul(&f(a)?)?;
            }
            out = out.add(&acc);
        }
        Ok(out)
    }
}

impl<A: Factor> fmt::Display for LinComb<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let atoms: Vec<String> = k.iter().map(|a| a.to_string()).collect();
            if atoms.is_empty() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(&atoms.join("*"))?;
            } else {
                write!(f, "{}*{}", fmt_rational(&mag), atoms.join("*"))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson<A> {
    coeff: String,
    atoms: Vec<A>,
}

impl<A: Factor + Serialize> Serialize for LinComb<A> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<TermJson<&A>> = self
            .terms
            .iter()
            .map(|(k, c)| TermJson { coeff: fmt_rational(c), atoms: k.iter().collect() })
            .collect();
        v.serialize(s)
    }
}

impl<'de, A: Factor + Deserialize<'de>> Deserialize<'de> for LinComb<A> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<TermJson<A>> = Vec::deserialize(d)?;
        let mut out = Self::zero();
        for t in v {
            let c = parse_rational(&t.coeff).map_err(serde::de::Error::custom)?;
            out.add_term(c, t.atoms).map_err(serde::de::Error::custom)?;
        }
        Ok(out)
    }
}

impl Expr {
    /// Replace `ζ(0)` by `−1/2`.
    pub fn fold_zeta_zero(&self) -> Expr {
        self.map_atoms(|a| {
            Ok(match a {
                Atom::EvenZeta { arg: 0 } => Expr::constant(Rational::new((-1).into(), 2.into())),
                a => Expr::atom(a.clone()),
            })
        })
        .expect("folding constants cannot create z clashes")
    }

    /// Specialize `z` to an exact complex rational for evaluation.
    pub fn substitute_z(&self, z0: &CRat) -> Result<NumExpr> {
        if z0.re < ri(1) {
            return Err(Error::domain(format!("Re(z) = {} < 1 is outside the evaluation domain", z0)));
        }
        self.map_atoms(|a| Ok(NumExpr::atom(NumAtom::from_atom(a, z0))))
    }
}

/// Exact complex rational, used for the evaluation point of `z`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CRat {
    pub re: Rational,
    pub im: Rational,
}

impl CRat {
    pub fn real(re: Rational) -> Self {
        CRat { re, im: Rational::zero() }
    }

    pub fn int(n: i64) -> Self {
        CRat::real(ri(n))
    }

    pub fn shift(&self, n: i64) -> Self {
        CRat { re: &self.re + ri(n), im: self.im.clone() }
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// The value as an integer when it is one.
    pub fn as_int(&self) -> Option<i64> {
        if self.is_real() && self.re.is_integer() {
            use num_traits::ToPrimitive;
            self.re.to_integer().to_i64()
        } else {
            None
        }
    }

    pub fn from_affine(e: AffineExp, z0: &CRat) -> CRat {
        if e.z {
            z0.shift(e.constant)
        } else {
            CRat::int(e.constant)
        }
    }
}

impl fmt::Display for CRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            return f.write_str(&fmt_rational(&self.re));
        }
        let sign = if self.im.is_negative() { "-" } else { "+" };
        write!(f, "{}{}{}i", fmt_rational(&self.re), sign, fmt_rational(&self.im.abs()))
    }
}

impl std::str::FromStr for CRat {
    type Err = Error;
    /// Accepts `a`, `bi`, `a+bi`, `a-bi` with decimal or `p/q` components.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::invalid(format!("bad complex number {s:?}"));
        let part = |x: &str| -> Result<Rational> {
            if x.contains('/') {
                parse_rational(x)
            } else {
                parse_decimal(x).ok_or_else(bad)
            }
        };
        let Some(body) = t.strip_suffix('i') else {
            return Ok(CRat::real(part(&t)?));
        };
        // Split at the last sign that is not the leading one.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(_, c)| c == '+' || c == '-')
            .map(|(i, _)| i)
            .last();
        let (re, im) = match split {
            Some(i) => (part(&body[..i])?, &body[i..]),
            None => (Rational::zero(), body),
        };
        let im = match im {
            "" | "+" => ri(1),
            "-" => ri(-1),
            x => part(x)?,
        };
        Ok(CRat { re, im })
    }
}

/// An atom whose exponents have been specialized to numbers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NumAtom {
    EvenZeta(u32),
    Lerch { exp: CRat, color: Color },
    Mt { exps: Vec<CRat>, colors: Vec<Color> },
    Mzv { exps: Vec<CRat>, colors: Vec<Color> },
}

impl NumAtom {
    pub fn from_atom(a: &Atom, z0: &CRat) -> NumAtom {
        let sub = |v: &[AffineExp]| v.iter().map(|&e| CRat::from_affine(e, z0)).collect();
        match a {
            Atom::EvenZeta { arg } | Atom::TildeZeta { arg } => NumAtom::EvenZeta(*arg),
            Atom::Lerch { exp, color } => {
                let e = CRat::from_affine(*exp, z0);
                match e.as_int() {
                    Some(m) if color.is_zero() && m >= 2 && m % 2 == 0 => {
                        NumAtom::EvenZeta(m as u32)
                    }
                    _ => NumAtom::Lerch { exp: e, color: color.clone() },
                }
            }
            Atom::Mt { exps, colors } => NumAtom::Mt { exps: sub(exps), colors: colors.clone() },
            Atom::Mzv { exps, colors } => NumAtom::Mzv { exps: sub(exps), colors: colors.clone() },
        }
    }

    /// Integer exponents, when every slot is an integer.
    pub fn int_exps(exps: &[CRat]) -> Option<Vec<i64>> {
        exps.iter().map(|e| e.as_int()).collect()
    }
}

impl fmt::Display for NumAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list<T: fmt::Display>(v: &[T]) -> String {
            v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
        }
        match self {
            NumAtom::EvenZeta(m) => write!(f, "zeta({m})"),
            NumAtom::Lerch { exp, color } => write!(f, "phi({exp};{color})"),
            NumAtom::Mt { exps, colors } => write!(f, "zeta_MT({};{})", list(exps), list(colors)),
            NumAtom::Mzv { exps, colors } => write!(f, "zeta({};{})", list(exps), list(colors)),
        }
    }
}

impl Factor for NumAtom {
    fn simplify(self) -> Option<Self> {
        Some(self)
    }

    fn mentions_z(&self) -> bool {
        false
    }
}

pub type NumExpr = LinComb<NumAtom>;
