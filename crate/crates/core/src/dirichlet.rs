//! Dirichlet characters with exact root-of-unity values, Gauss sums, and
//! the expansion of MT L-values into colored MT values.

use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::arith::{fmt_rational, rat, ri, Rational};
use crate::error::{Error, Result};
use crate::numerics::{Cf, EvalConfig, EvalResult, Evaluator};
use crate::reduction::{theorem_identity, Identity};
use crate::symexpr::{CRat, Color, NumAtom};

pub const MAX_MODULUS: u32 = 50;

/// A character mod `modulus`; `angles[a]` is `θ` with `χ(a) = e(θ)`, or
/// `None` when `gcd(a, modulus) > 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    pub modulus: u32,
    pub index: usize,
    pub angles: Vec<Option<Rational>>,
    pub conductor: u32,
    pub primitive: bool,
}

/// Units group of `Z/f` as a product of cyclic factors.
struct UnitGroup {
    orders: Vec<u32>,
    /// `logs[a]` = exponent vector of `a` in the generators.
    logs: Vec<Option<Vec<u32>>>,
}

fn factor(mut n: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mul_order(a: u32, m: u32) -> u32 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 % m {
        x = x * a % m;
        k += 1;
    }
    k
}

/// `x ≡ r (mod q)`, `x ≡ 1 (mod f/q)`, for coprime `q` and `f/q`.
fn crt_lift(r: u32, q: u32, f: u32) -> u32 {
    (1..=f).find(|&x| x % q == r % q && x % (f / q) == 1 % (f / q)).expect("CRT solution exists")
}

impl UnitGroup {
    fn new(f: u32) -> Self {
        let mut gens = Vec::new();
        let mut orders = Vec::new();
        for (p, e) in factor(f) {
            let q = p.pow(e);
            let mut local: Vec<(u32, u32)> = Vec::new();
            if p == 2 {
                if e >= 2 {
                    local.push((q - 1, 2));
                }
                if e >= 3 {
                    local.push((5, q / 4));
                }
            } else {
                let phi = q / p * (p - 1);
                let g = (2..q).find(|&g| g.gcd(&p) == 1 && mul_order(g, q) == phi).expect("odd prime powers have primitive roots");
                local.push((g, phi));
            }
            for (g, ord) in local {
                gens.push(crt_lift(g, q, f));
                orders.push(ord);
            }
        }
        let mut logs = vec![None; f as usize];
        let mut exps = vec![0u32; gens.len()];
        loop {
            let mut a = 1 % f;
            for (g, &e) in gens.iter().zip(&exps) {
                for _ in 0..e {
                    a = a * g % f;
                }
            }
            logs[a as usize] = Some(exps.clone());
            let mut p = 0;
            loop {
                if p == gens.len() {
                    return UnitGroup { orders, logs };
                }
                exps[p] += 1;
                if exps[p] < orders[p] {
                    break;
                }
                exps[p] = 0;
                p += 1;
            }
        }
    }
}

fn reduce(t: Rational) -> Rational {
    &t - t.floor()
}

impl DirichletCharacter {
    pub fn value(&self, n: i64) -> Option<&Rational> {
        self.angles[n.rem_euclid(self.modulus as i64) as usize].as_ref()
    }

    pub fn is_principal(&self) -> bool {
        self.angles.iter().flatten().all(|t| t.is_zero())
    }

    pub fn conj(&self) -> DirichletCharacter {
        DirichletCharacter {
            angles: self.angles.iter().map(|a| a.as_ref().map(|t| reduce(-t.clone()))).collect(),
            ..self.clone()
        }
    }

    /// Numeric value `χ(n)`.
    pub fn eval(&self, n: i64, cfg: &EvalConfig) -> Cf {
        let mp = cfg.mp();
        match self.value(n) {
            None => Cf::zero(&mp),
            Some(t) => mp.root_of_unity(t),
        }
    }

    pub fn summary(&self) -> CharacterSummary {
        CharacterSummary {
            modulus: self.modulus,
            index: self.index,
            conductor: self.conductor,
            primitive: self.primitive,
            values: self.angles.iter().map(|a| a.as_ref().map(fmt_rational)).collect(),
        }
    }
}

/// Serializable view: `values[a]` is the angle `θ` of `χ(a) = e(θ)`.
#[derive(Debug, Clone, Serialize)]
pub struct CharacterSummary {
    pub modulus: u32,
    pub index: usize,
    pub conductor: u32,
    pub primitive: bool,
    pub values: Vec<Option<String>>,
}

/// Smallest `d | f` such that `χ(a) = 1` whenever `a ≡ 1 (mod d)`.
fn conductor(f: u32, angles: &[Option<Rational>]) -> u32 {
    (1..=f)
        .filter(|d| f % d == 0)
        .find(|&d| (1..f).filter(|a| a % d == 1 % d).all(|a| angles[a as usize].as_ref().is_none_or(|t| t.is_zero())))
        .unwrap_or(f)
}

/// All `φ(f)` characters mod `f`. Character `index` has generator images
/// `e(k_i / ord_i)` where `index = k_1 + ord_1 (k_2 + ord_2 (…))`; index 0 is
/// principal.
pub fn enumerate_characters(f: u32) -> Result<Vec<DirichletCharacter>> {
    if !(1..=MAX_MODULUS).contains(&f) {
        return Err(Error::invalid(format!("modulus must lie in 1..={MAX_MODULUS}, got {f}")));
    }
    let g = UnitGroup::new(f);
    let count: u32 = g.orders.iter().product();
    let mut out = Vec::with_capacity(count as usize);
    for index in 0..count {
        let mut ks = Vec::with_capacity(g.orders.len());
        let mut rest = index;
        for &o in &g.orders {
            ks.push(rest % o);
            rest /= o;
        }
        let angles: Vec<Option<Rational>> = g
            .logs
            .iter()
            .map(|l| {
                l.as_ref().map(|e| {
                    let mut t = ri(0);
                    for ((&k, &ei), &o) in ks.iter().zip(e).zip(&g.orders) {
                        t += rat((k * ei) as i64, o as i64);
                    }
                    reduce(t)
                })
            })
            .collect();
        let c = conductor(f, &angles);
        out.push(DirichletCharacter { modulus: f, index: index as usize, angles, conductor: c, primitive: c == f });
    }
    Ok(out)
}

pub fn character(f: u32, index: usize) -> Result<DirichletCharacter> {
    let all = enumerate_characters(f)?;
    let n = all.len();
    all.into_iter()
        .nth(index)
        .ok_or_else(|| Error::invalid(format!("character index {index} out of range: modulus {f} has {n} characters")))
}

/// `τ(χ) = Σ_{n=1}^{f} χ(n) e(n/f)`.
pub fn gauss_sum(chi: &DirichletCharacter, cfg: &EvalConfig) -> EvalResult {
    let mp = cfg.mp();
    let f = chi.modulus as i64;
    let mut acc = Cf::zero(&mp);
    let mut terms = 0.0;
    for n in 1..=f {
        if let Some(t) = chi.value(n) {
            acc = acc.add(&mp, &mp.root_of_unity(&reduce(t + rat(n, f))));
            terms += 1.0;
        }
    }
    EvalResult::new(acc, 16.0 * (terms + 1.0) * mp.ulp())
}

fn require_primitive(chi: &DirichletCharacter) -> Result<()> {
    if !chi.primitive {
        return Err(Error::domain(format!(
            "character {} mod {} is not primitive (conductor {})",
            chi.index, chi.modulus, chi.conductor
        )));
    }
    Ok(())
}

/// Weights `w_j = χ̄(j)/τ(χ̄)` with `χ(m) = Σ_j w_j e(jm/f)`.
pub fn color_weights(chi: &DirichletCharacter, cfg: &EvalConfig) -> Result<Vec<(Rational, EvalResult)>> {
    require_primitive(chi)?;
    let mp = cfg.mp();
    let bar = chi.conj();
    let tau = gauss_sum(&bar, cfg);
    let inv = tau.value.inv(&mp);
    // |τ| = √f, so 1/τ moves by at most bound/(√f(√f − bound)).
    let sf = (chi.modulus as f64).sqrt();
    let inv_err = tau.bound / (sf * (sf - tau.bound)) + 4.0 * mp.ulp();
    let inv = EvalResult::new(inv, inv_err);
    let f = chi.modulus as i64;
    let mut out = Vec::new();
    for j in 1..=f {
        if let Some(t) = bar.value(j) {
            let v = EvalResult::new(mp.root_of_unity(t), 4.0 * mp.ulp());
            out.push((rat(j, f), v.mul(&mp, &inv)));
        }
    }
    Ok(out)
}

/// `L_MT(s; χ_1, …, χ_{k+1})` assembled from colored values; with a single
/// exponent this is the Dirichlet L-value. `budget` caps `Π f_i`.
pub fn l_mt_assemble(
    exps: &[CRat],
    chis: &[DirichletCharacter],
    cfg: &EvalConfig,
    budget: usize,
) -> Result<EvalResult> {
    if exps.is_empty() || exps.len() != chis.len() {
        return Err(Error::invalid("need one character per exponent"));
    }
    let grid: usize = chis.iter().map(|c| c.modulus as usize).product();
    if grid > budget {
        return Err(Error::Budget(format!("color grid of {grid} points exceeds budget {budget}")));
    }
    let weights: Vec<Vec<(Rational, EvalResult)>> = chis.iter().map(|c| color_weights(c, cfg)).collect::<Result<_>>()?;
    let mp = cfg.mp();
    let mut ev = Evaluator::new(cfg.clone())?;
    let mut total = EvalResult::exact(Cf::zero(&mp));
    let mut pos = vec![0usize; chis.len()];
    loop {
        let colors: Vec<Color> = pos.iter().zip(&weights).map(|(&p, w)| Color::new(w[p].0.clone())).collect();
        let mut w = EvalResult::exact(Cf::one(&mp));
        for (&p, ws) in pos.iter().zip(&weights) {
            w = w.mul(&mp, &ws[p].1);
        }
        let atom = if exps.len() == 1 {
            NumAtom::Lerch { exp: exps[0].clone(), color: colors[0].clone() }
        } else {
            NumAtom::Mt { exps: exps.to_vec(), colors }
        };
        let v = ev.atom(&atom)?;
        total = total.add(&mp, &w.mul(&mp, &v));
        let mut p = 0;
        loop {
            if p == pos.len() {
                return Ok(total);
            }
            pos[p] += 1;
            if pos[p] < weights[p].len() {
                break;
            }
            pos[p] = 0;
            p += 1;
        }
    }
}

/// The character form of the cyclic-sum identity as a weighted family of
/// colored identities: `Σ_n w_n (lhs_n − rhs_n) = 0` with `w_n = χ̄(n)/τ(χ̄)`.
pub fn character_theorem_identity(
    s: &[u32],
    chi: &DirichletCharacter,
    cfg: &EvalConfig,
) -> Result<Vec<(EvalResult, Identity)>> {
    let weights = color_weights(chi, cfg)?;
    weights
        .into_iter()
        .map(|(alpha, w)| Ok((w, theorem_identity(s, &alpha)?)))
        .collect()
}

/// Result of checking the weighted family at one point.
#[derive(Debug, Clone)]
pub struct CharacterVerification {
    pub residual: f64,
    pub bound: f64,
}

pub fn verify_character_identity(
    family: &[(EvalResult, Identity)],
    z0: &CRat,
    cfg: &EvalConfig,
) -> Result<CharacterVerification> {
    let mp = cfg.mp();
    let mut ev = Evaluator::new(cfg.clone())?;
    let mut acc = EvalResult::exact(Cf::zero(&mp));
    for (w, id) in family {
        let v = id.verify(&mut ev, Some(z0))?;
        let diff = v.lhs.sub(&mp, &v.rhs);
        acc = acc.add(&mp, &w.mul(&mp, &diff));
    }
    Ok(CharacterVerification { residual: acc.value.abs_f64(), bound: acc.bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn euler_phi(n: u32) -> usize {
        (1..=n).filter(|a| a.gcd(&n) == 1).count()
    }

    fn cval(chi: &DirichletCharacter, a: i64) -> Complex64 {
        match chi.value(a) {
            None => Complex64::new(0.0, 0.0),
            Some(t) => Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * crate::arith::to_f64(t)),
        }
    }

    #[test]
    fn counts_and_multiplicativity() {
        for f in 1..=MAX_MODULUS {
            let chars = enumerate_characters(f).unwrap();
            assert_eq!(chars.len(), euler_phi(f), "f={f}");
            assert!(chars[0].is_principal());
            for c in &chars {
                assert_eq!(c.value(1), Some(&ri(0)));
                assert_eq!(f % c.conductor, 0);
                for a in 0..f as i64 {
                    for b in 0..f as i64 {
                        match (c.value(a), c.value(b), c.value(a * b)) {
                            (Some(x), Some(y), Some(z)) => assert_eq!(reduce(x + y), *z),
                            (None, _, None) | (_, None, None) => {}
                            other => panic!("f={f} a={a} b={b}: {other:?}"),
                        }
                    }
                }
            }
        }
        assert!(enumerate_characters(0).is_err() && enumerate_characters(51).is_err());
    }

    #[test]
    fn orthogonality() {
        for f in 1..=20 {
            let chars = enumerate_characters(f).unwrap();
            for x in &chars {
                for y in &chars {
                    let mut s = Complex64::new(0.0, 0.0);
                    for a in 0..f as i64 {
                        s += cval(x, a) * cval(y, a).conj();
                    }
                    let want = if x.index == y.index { euler_phi(f) as f64 } else { 0.0 };
                    assert!((s - want).norm() < 1e-9, "f={f} {} {}", x.index, y.index);
                }
            }
        }
    }

    #[test]
    fn conductors_by_brute_force() {
        let chars = enumerate_characters(4).unwrap();
        assert_eq!(chars.len(), 2);
        assert!(chars[1].primitive && chars[1].conductor == 4);
        // mod 12: only the product of the quadratic characters mod 4 and 3; mod 8 has two
        assert_eq!(enumerate_characters(12).unwrap().iter().filter(|c| c.primitive).count(), 1);
        assert_eq!(enumerate_characters(8).unwrap().iter().filter(|c| c.primitive).count(), 2);
        // induced-from test: χ mod f is induced from mod d iff it is constant on classes mod d among units
        for f in 1..=30u32 {
            for c in enumerate_characters(f).unwrap() {
                let induced = |d: u32| {
                    (1..f).all(|a| (1..f).all(|b| {
                        a % d != b % d || c.value(a as i64).is_none() || c.value(b as i64).is_none() || c.value(a as i64) == c.value(b as i64)
                    }))
                };
                let d = (1..=f).filter(|d| f % d == 0).find(|&d| induced(d)).unwrap();
                assert_eq!(d, c.conductor, "f={f} index={}", c.index);
            }
        }
    }

    #[test]
    fn gauss_sum_modulus() {
        let cfg = EvalConfig::default();
        let one = enumerate_characters(1).unwrap();
        let t = gauss_sum(&one[0], &cfg);
        assert!((t.re() - 1.0).abs() < 1e-30 && t.im().abs() < 1e-30);
        for f in 1..=20 {
            for c in enumerate_characters(f).unwrap().into_iter().filter(|c| c.primitive) {
                let t = gauss_sum(&c, &cfg);
                let m = t.re().hypot(t.im());
                assert!((m * m - f as f64).abs() < 1e-12, "f={f} {}", c.index);
            }
        }
    }

    #[test]
    fn catalan_constant() {
        let cfg = EvalConfig::default();
        let chi = character(4, 1).unwrap();
        let v = l_mt_assemble(&[CRat::int(2)], &[chi], &cfg, 1000).unwrap();
        let mut g = 0.0;
        for m in 0..2_000_000u64 {
            let t = 1.0 / ((2 * m + 1) as f64).powi(2);
            g += if m % 2 == 0 { t } else { -t };
        }
        assert!((v.re() - g).abs() < 1e-12, "{} vs {g}", v.re());
        assert!(v.im().abs() <= v.bound + 1e-30);
        assert!(v.bound < 1e-25);
    }

    #[test]
    fn complex_character_matches_hurwitz_decomposition() {
        // L(s, χ) = f^{−s} Σ_a χ(a) ζ(s, a/f) for a quartic character mod 5
        let cfg = EvalConfig::default();
        let mp = cfg.mp();
        for chi in enumerate_characters(5).unwrap().into_iter().filter(|c| c.primitive) {
            let v = l_mt_assemble(&[CRat::int(3)], std::slice::from_ref(&chi), &cfg, 1000).unwrap();
            let mut acc = EvalResult::exact(Cf::zero(&mp));
            for a in 1..5 {
                let h = crate::numerics::hurwitz_zeta(&CRat::int(3), &rat(a, 5), &cfg).unwrap();
                let c = EvalResult::new(chi.eval(a, &cfg), 4.0 * mp.ulp());
                acc = acc.add(&mp, &c.mul(&mp, &h));
            }
            let scale = EvalResult::exact(Cf::real(&mp, mp.div(&mp.int(1), &mp.int(125))));
            let h = acc.mul(&mp, &scale);
            assert!(v.distance(&mp, &h) <= v.bound + h.bound, "index {}", chi.index);
        }
    }

    #[test]
    fn last_slot_character_against_direct_double_sum() {
        let cfg = EvalConfig::default();
        let one = character(1, 0).unwrap();
        let chi = character(3, 1).unwrap();
        let v = l_mt_assemble(
            &[CRat::int(2), CRat::int(2), CRat::int(2)],
            &[one.clone(), one, chi.clone()],
            &cfg,
            1000,
        )
        .unwrap();
        let n = 2000;
        let mut d = Complex64::new(0.0, 0.0);
        for a in 1..=n {
            for b in 1..=n {
                let (x, y) = (a as f64, b as f64);
                d += cval(&chi, a + b) / (x * x * y * y * (x + y) * (x + y));
            }
        }
        assert!((Complex64::new(v.re(), v.im()) - d).norm() < 1e-3);
    }

    #[test]
    fn non_primitive_rejected() {
        let chi = character(9, 0).unwrap();
        assert!(l_mt_assemble(&[CRat::int(2)], &[chi], &EvalConfig::default(), 100).unwrap_err().is_domain());
        let chi = character(5, 1).unwrap();
        let e = l_mt_assemble(&[CRat::int(2), CRat::int(2)], &[chi.clone(), chi], &EvalConfig::default(), 10);
        assert!(matches!(e, Err(Error::Budget(_))));
    }

    #[test]
    fn weighted_family_for_trivial_modulus() {
        let cfg = EvalConfig::default();
        let fam = character_theorem_identity(&[2, 2], &character(1, 0).unwrap(), &cfg).unwrap();
        assert_eq!(fam.len(), 1);
        assert_eq!(fam[0].1.meta.alpha, Some(ri(0)));
        assert!((fam[0].0.re() - 1.0).abs() < 1e-30);
    }
}
