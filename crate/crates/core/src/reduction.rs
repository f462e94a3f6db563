//! Signed cyclic sums of colored Mordell–Tornheim values and their reduction
//! to lower depth, plus the finite-`N` integral identity behind them.

use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{binomial, multinomial, rational_str, rbig, ri, to_f64, Rational};
use crate::error::{Error, Result};
use crate::numerics::{EvalResult, Evaluator};
use crate::partitions::{enumerate, index_assignments, PartitionKind};
use crate::symexpr::{AffineExp, Atom, CRat, Color, Expr};

/// One signed term of an identity's left-hand side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LhsTerm {
    #[serde(with = "rational_str")]
    pub coeff: Rational,
    pub atom: Atom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityMeta {
    pub label: String,
    pub s: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub alpha: Option<Rational>,
    pub depth: usize,
}

mod opt_rational {
    use crate::arith::{fmt_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&fmt_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let t: Option<String> = Option::deserialize(d)?;
        t.map(|t| parse_rational(&t).map_err(serde::de::Error::custom)).transpose()
    }
}

/// `Σ lhs = rhs` as a symbolic object; `z` stays free until evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identity {
    pub lhs: Vec<LhsTerm>,
    pub rhs: Expr,
    pub meta: IdentityMeta,
}

/// Numeric check of an identity at one point.
#[derive(Debug, Clone)]
pub struct Verification {
    pub lhs: EvalResult,
    pub rhs: EvalResult,
    pub residual: f64,
    pub bound: f64,
}

impl Verification {
    pub fn holds(&self, tol: f64) -> bool {
        self.residual <= self.bound + tol
    }
}

impl Identity {
    pub fn lhs_expr(&self) -> Expr {
        let mut e = Expr::zero();
        for t in &self.lhs {
            e = e.add(&Expr::term(t.coeff.clone(), vec![t.atom.clone()]).expect("single atom"));
        }
        e
    }

    /// Multiply both sides by `c`.
    pub fn scaled(&self, c: &Rational) -> Identity {
        Identity {
            lhs: self.lhs.iter().map(|t| LhsTerm { coeff: &t.coeff * c, atom: t.atom.clone() }).collect(),
            rhs: self.rhs.scale(c),
            meta: self.meta.clone(),
        }
    }

    pub fn mentions_z(&self) -> bool {
        self.lhs.iter().any(|t| t.atom.has_z()) || self.rhs.atoms().any(|a| a.has_z())
    }

    /// Evaluate both sides independently and compare.
    pub fn verify(&self, ev: &mut Evaluator, z0: Option<&CRat>) -> Result<Verification> {
        let mp = ev.config().mp();
        let lhs = ev.expr(&self.lhs_expr(), z0)?;
        let rhs = ev.expr(&self.rhs, z0)?;
        let residual = lhs.distance(&mp, &rhs);
        Ok(Verification { bound: lhs.bound + rhs.bound, residual, lhs, rhs })
    }
}

fn sign(n: i64) -> Rational {
    if n.rem_euclid(2) == 0 {
        ri(1)
    } else {
        ri(-1)
    }
}

fn z_slot_atom(before: &[u32], total: AffineExp, alpha: &Rational) -> Result<Atom> {
    let mut exps: Vec<AffineExp> = before.iter().map(|&x| AffineExp::int(x as i64)).collect();
    let mut colors = vec![Color::zero(); exps.len()];
    exps.push(AffineExp::Z);
    colors.push(Color::new(alpha.clone()));
    exps.push(total);
    colors.push(Color::zero());
    Atom::mt(exps, colors)
}

fn lerch_z(shift: i64, alpha: &Rational) -> Atom {
    Atom::lerch(AffineExp::z_plus(shift), Color::new(alpha.clone()))
}

fn even_zeta(two_r: i64) -> Atom {
    Atom::EvenZeta { arg: two_r as u32 }
}

fn tilde_zeta(m: i64) -> Atom {
    Atom::TildeZeta { arg: m as u32 }
}

fn check_s(s: &[u32]) -> Result<()> {
    if s.contains(&0) {
        return Err(Error::invalid(format!("exponents must be positive, got {s:?}")));
    }
    Ok(())
}

/// The reduced form `E(s, i, α)` of the block of the cyclic sum indexed by
/// `i ⊆ [k]` (1-based, `ℓ(i) ≥ 2`). Every MT factor has `z` colored by `α`
/// and depth `k + 1 − ℓ(i)`; `ζ(0)` is left symbolic.
pub fn e_expr(s: &[u32], i: &[usize], alpha: &Rational) -> Result<Expr> {
    check_s(s)?;
    let k = s.len();
    let mut idx = i.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if idx.len() < 2 {
        return Err(Error::invalid("E(s, i, α) needs ℓ(i) ≥ 2"));
    }
    if idx.len() != i.len() || idx.iter().any(|&x| x == 0 || x > k) {
        return Err(Error::invalid(format!("bad index subset {i:?} for k = {k}")));
    }
    let sub: Vec<u32> = idx.iter().map(|&x| s[x - 1]).collect();
    let rest: Vec<u32> = (1..=k).filter(|x| !idx.contains(x)).map(|x| s[x - 1]).collect();
    let weight: i64 = sub.iter().map(|&x| x as i64).sum();
    let global_sign = sign(weight);

    let mut out = Expr::zero();
    for p in enumerate(&sub, PartitionKind::PreFat)? {
        let parts = p.parts();
        let q = parts.len();
        let two_pow = rbig(num_bigint::BigInt::from(2).pow((idx.len() - q) as u32));
        for r in index_assignments(&p, PartitionKind::PreFat) {
            let mut coeff = &global_sign * &two_pow;
            let mut atoms = Vec::new();
            for (j, part) in parts.iter().enumerate() {
                let rj = &r.parts[j];
                // c_{j,i} for i = 2..ℓ(r_j)+1 (1-based), using r_{j,i−1}
                let mut sig_p: i64 = part[0] as i64;
                let mut sig_r: i64 = 0;
                for (t, &rv) in rj.iter().enumerate() {
                    let s_i = part[t + 1] as i64;
                    sig_p += s_i;
                    sig_r += rv as i64;
                    let top = sig_p - 2 * sig_r - 1;
                    let c = binomial(top, s_i - 1)? + binomial(top, s_i - 2 * rv as i64)?;
                    coeff *= c;
                    atoms.push(even_zeta(2 * rv as i64));
                }
                let size: i64 = part.iter().map(|&x| x as i64).sum::<i64>() - 2 * r.part_sum(j) as i64;
                if j + 1 < q {
                    coeff *= sign(*part.last().expect("non-empty part") as i64);
                    atoms.push(tilde_zeta(size));
                } else {
                    atoms.push(z_slot_atom(&rest, AffineExp::int(size), alpha)?);
                }
            }
            out = out.add(&Expr::term(coeff, atoms)?);
        }
    }
    Ok(out)
}

/// Subsets of `[k]` as sorted 1-based index lists, by increasing bitmask.
fn subsets(k: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << k)).map(move |m| (1..=k).filter(|&x| m & (1 << (x - 1)) != 0).collect())
}

/// The signed cyclic sum of `ζ_MT(s, z; 0…0, α)` and its rotations, equated
/// with `Σ_{ℓ(i)≥2} (−1)^{ℓ(i)} E(s, i, α)`.
pub fn theorem_identity(s: &[u32], alpha: &Rational) -> Result<Identity> {
    check_s(s)?;
    let k = s.len();
    if k < 2 {
        return Err(Error::invalid("the cyclic sum needs k ≥ 2"));
    }
    let alpha = alpha - alpha.floor();
    let weight: i64 = s.iter().map(|&x| x as i64).sum();
    let mut lhs = Vec::with_capacity(k + 1);
    // ζ_MT(s_1,…,s_k, z; 0,…,0, α): z sits in the total slot
    let full = {
        let mut exps: Vec<AffineExp> = s.iter().map(|&x| AffineExp::int(x as i64)).collect();
        exps.push(AffineExp::Z);
        let mut colors = vec![Color::zero(); k];
        colors.push(Color::new(alpha.clone()));
        Atom::mt(exps, colors)?
    };
    lhs.push(LhsTerm { coeff: sign(k as i64 + weight), atom: full });
    for j in 0..k {
        let mut exps: Vec<AffineExp> = s.iter().map(|&x| AffineExp::int(x as i64)).collect();
        exps[j] = AffineExp::Z;
        exps.push(AffineExp::int(s[j] as i64));
        let mut colors = vec![Color::zero(); k + 1];
        colors[j] = Color::new(alpha.clone());
        lhs.push(LhsTerm { coeff: sign(s[j] as i64), atom: Atom::mt(exps, colors)? });
    }
    let mut rhs = Expr::zero();
    for i in subsets(k).filter(|i| i.len() >= 2) {
        rhs = rhs.add(&e_expr(s, &i, &alpha)?.scale(&sign(i.len() as i64)));
    }
    Ok(Identity {
        lhs,
        rhs: rhs.fold_zeta_zero(),
        meta: IdentityMeta { label: "cyclic-sum".into(), s: s.to_vec(), alpha: Some(alpha), depth: k },
    })
}

fn phase(m: i64, alpha: &Rational) -> Complex64 {
    let t = alpha * Rational::from_integer(m.into());
    let f = to_f64(&(&t - t.floor()));
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f)
}

fn pow_neg_c(m: i64, z: Complex64) -> Complex64 {
    (-z * (m as f64).ln()).exp()
}

/// Laurent polynomial in `w = e(x)` with coefficients for degrees
/// `lo..lo+len`.
#[derive(Clone)]
struct Laurent {
    lo: i64,
    c: Vec<Complex64>,
}

impl Laurent {
    fn one() -> Self {
        Laurent { lo: 0, c: vec![Complex64::new(1.0, 0.0)] }
    }

    fn mul(&self, o: &Laurent) -> Laurent {
        let mut c = vec![Complex64::new(0.0, 0.0); self.c.len() + o.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.norm_sqr() == 0.0 {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Laurent { lo: self.lo + o.lo, c }
    }

    fn coeff(&self, d: i64) -> Complex64 {
        let i = d - self.lo;
        if i < 0 || i as usize >= self.c.len() {
            Complex64::new(0.0, 0.0)
        } else {
            self.c[i as usize]
        }
    }
}

/// `f^+_{s,N}` and, when `two_sided`, `f_{s,N} = f^+ + f^−` with
/// `f^−_{s,N}(x) = Σ_{m=−1}^{−N} e(mx)/m^s`.
fn fourier_factor(s: u32, n: i64, two_sided: bool) -> Laurent {
    let lo = if two_sided { -n } else { 1 };
    let mut c = vec![Complex64::new(0.0, 0.0); (n - lo + 1) as usize];
    for m in 1..=n {
        let v = (m as f64).powi(-(s as i32));
        c[(m - lo) as usize] = Complex64::new(v, 0.0);
        if two_sided {
            let sg = if s % 2 == 0 { 1.0 } else { -1.0 };
            c[(-m - lo) as usize] = Complex64::new(sg * v, 0.0);
        }
    }
    Laurent { lo, c }
}

/// Both sides of the truncated integral identity
/// `∫_0^1 Π_{j∈i} f_{s_j,N} Π_{j∉i} f^+_{s_j,N} f^+_{z,N}(x+α) dx
///  = Σ_{J⊆i} (−1)^{|s(J)|} S_N(s, J, α)`, computed by unrelated routes:
/// the left by multiplying Fourier polynomials and reading the constant
/// term, the right by enumerating index tuples under the linear constraint.
pub fn finite_n_oracle(
    s: &[u32],
    i: &[usize],
    alpha: &Rational,
    z0: &CRat,
    n: usize,
) -> Result<(Complex64, Complex64)> {
    check_s(s)?;
    let k = s.len();
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    if i.is_empty() || i.iter().any(|&x| x == 0 || x > k) {
        return Err(Error::invalid(format!("bad index subset {i:?} for k = {k}")));
    }
    if z0.re < ri(1) {
        return Err(Error::domain("the finite-N identity is stated for Re(z) ≥ 1"));
    }
    let nn = n as i64;
    let z = Complex64::new(to_f64(&z0.re), to_f64(&z0.im));
    let in_i: Vec<bool> = (1..=k).map(|x| i.contains(&x)).collect();

    let mut prod = Laurent::one();
    for j in 0..k {
        prod = prod.mul(&fourier_factor(s[j], nn, in_i[j]));
    }
    let mut lhs = Complex64::new(0.0, 0.0);
    for m in 1..=nn {
        lhs += prod.coeff(-m) * phase(m, alpha) * pow_neg_c(m, z);
    }

    // right side: J ranges over subsets of i; S_N(∅) is empty
    let members: Vec<usize> = (0..k).filter(|&j| in_i[j]).collect();
    let signs: Vec<f64> = (0..(1u32 << members.len()))
        .map(|mask| {
            let w: u32 = members.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &j)| s[j]).sum();
            if w % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect();
    let mut rhs = Complex64::new(0.0, 0.0);
    let mut m = vec![1i64; k];
    loop {
        let base: f64 = (0..k).map(|j| (m[j] as f64).powi(-(s[j] as i32))).product();
        let total: i64 = m.iter().sum();
        for mask in 1..(1u32 << members.len()) {
            let in_j: i64 = members.iter().enumerate().filter(|(b, _)| mask & (1 << b) != 0).map(|(_, &j)| m[j]).sum();
            let last = in_j - (total - in_j);
            if (1..=nn).contains(&last) {
                rhs += signs[mask as usize] * base * phase(last, alpha) * pow_neg_c(last, z);
            }
        }
        // odometer over [1, N]^k
        let mut p = 0;
        loop {
            if p == k {
                return Ok((lhs, rhs));
            }
            m[p] += 1;
            if m[p] <= nn {
                break;
            }
            m[p] = 1;
            p += 1;
        }
    }
}

/// The three-term depth-two cyclic sum with its closed right-hand side.
pub fn cor_depth2(a: u32, b: u32, alpha: &Rational) -> Result<Identity> {
    check_s(&[a, b])?;
    let alpha = alpha - alpha.floor();
    let (ai, bi) = (a as i64, b as i64);
    let col = |x: usize| {
        let mut c = vec![Color::zero(); 3];
        c[x] = Color::new(alpha.clone());
        c
    };
    let int = AffineExp::int;
    let lhs = vec![
        LhsTerm { coeff: ri(1), atom: Atom::mt(vec![int(ai), int(bi), AffineExp::Z], col(2))? },
        LhsTerm { coeff: sign(bi), atom: Atom::mt(vec![AffineExp::Z, int(bi), int(ai)], col(0))? },
        LhsTerm { coeff: sign(ai), atom: Atom::mt(vec![int(ai), AffineExp::Z, int(bi)], col(1))? },
    ];
    let mut rhs = Expr::zero();
    for r in 0..=(ai.max(bi) / 2) {
        let top = ai + bi - 2 * r - 1;
        let c = (binomial(top, ai - 1)? + binomial(top, ai - 2 * r)?) * ri(2);
        rhs = rhs.add(&Expr::term(c, vec![even_zeta(2 * r), lerch_z(ai + bi - 2 * r, &alpha)])?);
    }
    Ok(Identity {
        lhs,
        rhs: rhs.fold_zeta_zero(),
        meta: IdentityMeta { label: "depth-2".into(), s: vec![a, b], alpha: Some(alpha), depth: 2 },
    })
}

fn mn(parts: &[i64]) -> Rational {
    rbig(multinomial(parts))
}

fn bn(n: i64, k: i64) -> Result<Rational> {
    binomial(n, k)
}

/// `E_2` for `s = (n,n,n,n)`, `i = {1,2}`.
pub fn e2(n: u32, alpha: &Rational) -> Result<Expr> {
    check_s(&[n])?;
    let n = n as i64;
    let mut out = Expr::zero();
    for r in 0..=n / 2 {
        let c = bn(2 * n - 2 * r - 1, n - 1)? * ri(4);
        let mt = z_slot_atom(&[n as u32, n as u32], AffineExp::int(2 * n - 2 * r), alpha)?;
        out = out.add(&Expr::term(c, vec![even_zeta(2 * r), mt])?);
    }
    Ok(out)
}

/// `E_3` for `s = (n,n,n,n)`, `i = {1,2,3}`.
pub fn e3(n: u32, alpha: &Rational) -> Result<Expr> {
    check_s(&[n])?;
    let nu32 = n;
    let n = n as i64;
    let mut out = Expr::term(ri(2), vec![even_zeta(2 * n), z_slot_atom(&[nu32], AffineExp::int(n), alpha)?])?;
    let pre = sign(n) * ri(8);
    for mu in 0..=n / 2 {
        for nu in 0..=(2 * n - 2 * mu).max(n) / 2 {
            let top = 3 * n - 2 * mu - 2 * nu - 1;
            let c = bn(2 * n - 2 * mu - 1, n - 1)? * bn(top, n - 1)? + mn(&[n - 2 * mu, n - 1, n - 2 * nu]);
            let mt = z_slot_atom(&[nu32], AffineExp::int(3 * n - 2 * mu - 2 * nu), alpha)?;
            out = out.add(&Expr::term(&pre * c, vec![even_zeta(2 * mu), even_zeta(2 * nu), mt])?);
        }
    }
    Ok(out)
}

/// `E_4` for `s = (n,n,n,n)`, `i = [4]`.
pub fn e4(n: u32, alpha: &Rational) -> Result<Expr> {
    check_s(&[n])?;
    let n = n as i64;
    let mut out = Expr::zero();
    for mu in 0..=n / 2 {
        let b1 = bn(2 * n - 2 * mu - 1, n - 1)?;
        for nu in 0..=(2 * n - 2 * mu).max(n) / 2 {
            let top3 = 3 * n - 2 * mu - 2 * nu - 1;
            for la in 0..=(3 * n - 2 * mu - 2 * nu).max(n) / 2 {
                let top4 = 4 * n - 2 * (mu + nu + la) - 1;
                let c = &b1 * bn(top3, n - 1)? * bn(top4, n - 1)?
                    + mn(&[n - 2 * mu, n - 1, n - 2 * nu]) * bn(top4, n - 1)?
                    + &b1 * mn(&[2 * n - 2 * mu - 2 * nu, n - 1, n - 2 * la])
                    + mn(&[n - 2 * mu, n - 1, n - 2 * nu, n - 2 * la]);
                let atoms = vec![
                    even_zeta(2 * mu),
                    even_zeta(2 * nu),
                    even_zeta(2 * la),
                    lerch_z(4 * n - 2 * (mu + nu + la), alpha),
                ];
                out = out.add(&Expr::term(c * ri(16), atoms)?);
            }
        }
        let c2 = sign(n) * ri(8) * &b1;
        out = out.add(&Expr::term(c2, vec![even_zeta(2 * n), even_zeta(2 * mu), lerch_z(2 * n - 2 * mu, alpha)])?);
        let c3 = ri(8) * &b1;
        out = out.add(&Expr::term(c3, vec![even_zeta(2 * mu), tilde_zeta(3 * n - 2 * mu), lerch_z(n, alpha)])?);
    }
    Ok(out)
}

/// `ζ_MT({n}_4, z; 0,…,0, α) + 4(−1)^n ζ_MT({n}_3, z, n; 0,0,0,α,0) = 6E_2 − 4E_3 + E_4`.
pub fn cor_specialn(n: u32, alpha: &Rational) -> Result<Identity> {
    check_s(&[n])?;
    let alpha = alpha - alpha.floor();
    let ni = n as i64;
    let full = {
        let mut e = vec![AffineExp::int(ni); 4];
        e.push(AffineExp::Z);
        let mut c = vec![Color::zero(); 4];
        c.push(Color::new(alpha.clone()));
        Atom::mt(e, c)?
    };
    let rotated = z_slot_atom(&[n, n, n], AffineExp::int(ni), &alpha)?;
    let lhs = vec![
        LhsTerm { coeff: ri(1), atom: full },
        LhsTerm { coeff: sign(ni) * ri(4), atom: rotated },
    ];
    let rhs = e2(n, &alpha)?.scale(&ri(6)).sub(&e3(n, &alpha)?.scale(&ri(4))).add(&e4(n, &alpha)?);
    Ok(Identity {
        lhs,
        rhs: rhs.fold_zeta_zero(),
        meta: IdentityMeta { label: "equal-entries-depth-4".into(), s: vec![n; 4], alpha: Some(alpha), depth: 4 },
    })
}

/// The `n = 1` case written out:
/// `4ζ_MT(1,1,1,z,1) − ζ_MT(1,1,1,1,z) = 12ζ_MT(1,1,z,2) + 24[…]`.
pub fn cor_special1(alpha: &Rational) -> Result<Identity> {
    let alpha = alpha - alpha.floor();
    let full = {
        let mut e = vec![AffineExp::int(1); 4];
        e.push(AffineExp::Z);
        let mut c = vec![Color::zero(); 4];
        c.push(Color::new(alpha.clone()));
        Atom::mt(e, c)?
    };
    let lhs = vec![
        LhsTerm { coeff: ri(4), atom: z_slot_atom(&[1, 1, 1], AffineExp::int(1), &alpha)? },
        LhsTerm { coeff: ri(-1), atom: full },
    ];
    let z2 = even_zeta(2);
    let terms: Vec<(i64, Vec<Atom>)> = vec![
        (12, vec![z_slot_atom(&[1, 1], AffineExp::int(2), &alpha)?]),
        (24, vec![z2.clone(), z_slot_atom(&[1], AffineExp::int(1), &alpha)?]),
        (-24, vec![z_slot_atom(&[1], AffineExp::int(3), &alpha)?]),
        (-24, vec![z2, lerch_z(2, &alpha)]),
        (24, vec![lerch_z(4, &alpha)]),
    ];
    let mut rhs = Expr::zero();
    for (c, atoms) in terms {
        rhs = rhs.add(&Expr::term(ri(c), atoms)?);
    }
    Ok(Identity {
        lhs,
        rhs,
        meta: IdentityMeta { label: "unit-entries-depth-4".into(), s: vec![1; 4], alpha: Some(alpha), depth: 4 },
    })
}

/// At `α = 0`, `z = n`: `4ζ_MT(1,1,1,n,1) − ζ_MT(1,1,1,1,n)` as a rational
/// combination of MZVs of depth ≤ 3.
pub fn cor_further(n: u32) -> Result<Identity> {
    check_s(&[n])?;
    let ni = n as i64;
    let int = AffineExp::int;
    let lhs = vec![
        LhsTerm { coeff: ri(4), atom: Atom::mt_plain(&[int(1), int(1), int(1), int(ni), int(1)])? },
        LhsTerm { coeff: ri(-1), atom: Atom::mt_plain(&[int(1), int(1), int(1), int(1), int(ni)])? },
    ];
    let z = |e: &[i64]| Atom::mzv_plain(e);
    let z2 = even_zeta(2);
    let mut inner = Expr::zero();
    let mut add = |c: i64, atoms: Vec<Atom>| -> Result<()> {
        inner = inner.add(&Expr::term(ri(c), atoms)?);
        Ok(())
    };
    add(2, vec![z(&[ni + 4])?])?;
    add(-2, vec![z(&[ni + 3, 1])?])?;
    add(2, vec![z(&[ni + 2, 1, 1])?])?;
    add(2, vec![z2.clone(), z(&[ni + 1, 1])?])?;
    add(-2, vec![z2.clone(), z(&[ni + 2])?])?;
    // The depth-3 part is 12ζ_MT(1,1,n;2) via the triple-sum closed form.
    // Argument order matters: ζ(3+ν, n−ν−μ, 1+μ) and ζ(3+ν, 1, n−ν) in
    // place of the terms below agree only at n = 1.
    for nu in 0..ni {
        for mu in 0..(ni - nu) {
            add(2, vec![z(&[3 + nu, 1 + mu, ni - nu - mu])?])?;
        }
        add(2, vec![z2.clone(), z(&[2 + nu, ni - nu])?])?;
        add(-2, vec![z(&[4 + nu, ni - nu])?])?;
        add(2, vec![z(&[3 + nu, ni - nu, 1])?])?;
    }
    Ok(Identity {
        lhs,
        rhs: inner.scale(&ri(12)),
        meta: IdentityMeta { label: "unit-entries-strong".into(), s: vec![1, 1, 1, 1, n], alpha: None, depth: 4 },
    })
}

/// Σ_{t=r}^{k} C(k−r, t−r)(−1)^t, which vanishes for r < k.
pub fn inclusion_exclusion_sum(k: u32, r: u32) -> Rational {
    let mut acc = Rational::zero();
    for t in r..=k {
        acc += rbig(crate::arith::binomial_int((k - r) as u64, (t - r) as i64)) * sign(t as i64);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use crate::numerics::EvalConfig;

    fn alphas() -> Vec<Rational> {
        vec![ri(0), rat(1, 3), rat(1, 2)]
    }

    #[test]
    fn unit_pair_block() {
        for a in alphas() {
            let e = e_expr(&[1, 1], &[1, 2], &a).unwrap().fold_zeta_zero();
            let want = Expr::term(ri(-2), vec![lerch_z(2, &a)]).unwrap();
            assert_eq!(e, want);
        }
    }

    #[test]
    fn block_validation() {
        assert!(e_expr(&[1, 2, 3], &[2], &ri(0)).is_err());
        assert!(e_expr(&[1, 2], &[1, 3], &ri(0)).is_err());
        assert!(theorem_identity(&[3], &ri(0)).is_err());
    }

    #[test]
    fn worked_pair_identity() {
        let id = theorem_identity(&[1, 1], &ri(0)).unwrap();
        let int = AffineExp::int;
        let want_lhs = vec![
            LhsTerm { coeff: ri(1), atom: Atom::mt_plain(&[int(1), int(1), AffineExp::Z]).unwrap() },
            LhsTerm { coeff: ri(-1), atom: Atom::mt_plain(&[AffineExp::Z, int(1), int(1)]).unwrap() },
            LhsTerm { coeff: ri(-1), atom: Atom::mt_plain(&[int(1), AffineExp::Z, int(1)]).unwrap() },
        ];
        assert_eq!(id.lhs, want_lhs);
        assert_eq!(id.rhs, Expr::term(ri(-2), vec![Atom::zeta(AffineExp::z_plus(2))]).unwrap());
    }

    #[test]
    fn rhs_atoms_have_lower_depth() {
        for s in [vec![1, 2, 3], vec![2, 2, 2, 1], vec![3, 1, 2]] {
            let k = s.len();
            let id = theorem_identity(&s, &rat(1, 3)).unwrap();
            assert_eq!(id.lhs.len(), k + 1);
            for a in id.rhs.atoms() {
                if let Atom::Mt { .. } = a {
                    assert!(a.depth() < k, "{a}");
                }
            }
        }
    }

    #[test]
    fn depth_two_matches_general_engine() {
        for a in 1..=4 {
            for b in 1..=4 {
                for al in alphas() {
                    let c = cor_depth2(a, b, &al).unwrap();
                    let t = theorem_identity(&[a, b], &al).unwrap().scaled(&sign((a + b) as i64));
                    assert_eq!(c.lhs_expr(), t.lhs_expr(), "({a},{b})");
                    assert_eq!(c.rhs, t.rhs, "({a},{b})");
                    let sw = cor_depth2(b, a, &al).unwrap();
                    assert_eq!(sw.rhs, c.rhs);
                }
            }
        }
    }

    #[test]
    fn equal_entry_blocks_match_general_engine() {
        for n in 1..=3 {
            for al in alphas() {
                let s = [n; 4];
                assert_eq!(e2(n, &al).unwrap(), e_expr(&s, &[1, 2], &al).unwrap(), "E2 n={n}");
                assert_eq!(e3(n, &al).unwrap(), e_expr(&s, &[1, 2, 3], &al).unwrap(), "E3 n={n}");
                assert_eq!(e4(n, &al).unwrap(), e_expr(&s, &[1, 2, 3, 4], &al).unwrap(), "E4 n={n}");
                let c = cor_specialn(n, &al).unwrap();
                let t = theorem_identity(&s, &al).unwrap();
                assert_eq!(c.lhs_expr(), t.lhs_expr());
                assert_eq!(c.rhs, t.rhs);
            }
        }
    }

    #[test]
    fn unit_entry_form_is_the_negated_general_case() {
        for al in alphas() {
            let c = cor_special1(&al).unwrap();
            let t = cor_specialn(1, &al).unwrap().scaled(&ri(-1));
            assert_eq!(c.lhs_expr(), t.lhs_expr());
            assert_eq!(c.rhs, t.rhs);
        }
    }

    #[test]
    fn finite_sums_single_tuple() {
        for a in alphas() {
            let (l, r) = finite_n_oracle(&[2, 1], &[1, 2], &a, &CRat::int(2), 1).unwrap();
            assert!((l - r).norm() < 1e-14);
        }
    }

    #[test]
    fn finite_sums_agree() {
        let cases: Vec<(Vec<u32>, Vec<usize>, Rational, CRat, usize)> = vec![
            (vec![2, 1], vec![1, 2], rat(1, 3), CRat::int(2), 30),
            (vec![1, 1, 1], vec![1, 2], rat(1, 2), CRat::int(1), 20),
            (vec![1, 3, 2], vec![2], ri(0), CRat::real(rat(3, 2)), 12),
            (vec![2, 2, 1], vec![1, 2, 3], rat(1, 3), "2+1i".parse().unwrap(), 10),
        ];
        for (s, i, a, z, n) in cases {
            let (l, r) = finite_n_oracle(&s, &i, &a, &z, n).unwrap();
            assert!((l - r).norm() < 1e-10, "{s:?} {i:?}: {l} vs {r}");
        }
    }

    #[test]
    fn inclusion_exclusion_vanishes() {
        for k in 1..=12 {
            for r in 0..k {
                assert!(inclusion_exclusion_sum(k, r).is_zero());
            }
            assert_eq!(inclusion_exclusion_sum(k, k), sign(k as i64));
        }
    }

    #[test]
    fn pair_identity_numerically() {
        let mut ev = Evaluator::new(EvalConfig::default()).unwrap();
        let v = theorem_identity(&[1, 1], &ri(0)).unwrap().verify(&mut ev, Some(&CRat::int(2))).unwrap();
        let pi4_45 = std::f64::consts::PI.powi(4) / 45.0;
        assert!((v.rhs.re() + pi4_45).abs() < 1e-14);
        assert!(v.holds(0.0) && v.bound < 1e-25, "{} {} {} {}", v.lhs.re(), v.rhs.re(), v.residual, v.bound);
    }

    #[test]
    fn strong_form_numerically() {
        let mut ev = Evaluator::new(crate::numerics::EvalConfig::default()).unwrap();
        for n in 1..=4 {
            let v = cor_further(n).unwrap().verify(&mut ev, None).unwrap();
            assert!(v.holds(0.0) && v.bound < 1e-40, "n={n}: {:e} vs {:e}", v.residual, v.bound);
            // same value as the unit-entry corollary at z = n
            let w = cor_special1(&ri(0)).unwrap();
            let c = w.verify(&mut ev, Some(&CRat::int(n as i64))).unwrap();
            assert!(c.lhs.distance(&ev.config().mp(), &v.lhs) <= c.lhs.bound + v.lhs.bound, "n={n}");
        }
    }

    #[test]
    fn json_round_trip() {
        let id = theorem_identity(&[2, 1, 2], &rat(1, 3)).unwrap();
        let s = serde_json::to_string(&id).unwrap();
        let back: Identity = serde_json::from_str(&s).unwrap();
        assert_eq!(back, id);
    }
}
