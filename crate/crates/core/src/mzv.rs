//! Conversion of (colored) Mordell–Tornheim values into rational
//! combinations of (colored) multiple zeta values of the same weight and
//! depth.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::arith::{binomial_int, multinomial, rbig, ri, Rational};
use crate::error::{Error, Result};
use crate::symexpr::{AffineExp, Atom, Color, Expr};

/// `Σ_j f(x_1, …, x̂_j, …, x_n, x_j)`: each variable in turn moved last.
pub fn per_sum<T: Clone>(xs: &[T], mut f: impl FnMut(&[T]) -> Result<Expr>) -> Result<Expr> {
    if xs.len() < 2 {
        return Err(Error::invalid("per-sum needs at least two variables"));
    }
    let mut out = Expr::zero();
    for j in 0..xs.len() {
        let mut v: Vec<T> = xs[..j].to_vec();
        v.extend_from_slice(&xs[j + 1..]);
        v.push(xs[j].clone());
        out = out.add(&f(&v)?);
    }
    Ok(out)
}

/// Absolute-convergence test for `ζ_MT(s_1, …, s_k; s_{k+1})` with the
/// first `k` entries sorted ascending: `s_{k+1} + Σ_{j≤r} s_j > r` for all r.
pub fn mt_converges(exps: &[f64]) -> bool {
    let Some((&last, head)) = exps.split_last() else {
        return false;
    };
    let mut sorted = head.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite exponents"));
    let mut acc = last;
    sorted.iter().enumerate().all(|(r, &s)| {
        acc += s;
        acc > (r + 1) as f64
    })
}

fn guard(exps: &[i64]) -> Result<()> {
    if exps.iter().any(|&e| e < 1) {
        return Err(Error::invalid(format!("exponents must be positive integers: {exps:?}")));
    }
    let f: Vec<f64> = exps.iter().map(|&e| e as f64).collect();
    if !mt_converges(&f) {
        return Err(Error::domain(format!("ζ_MT{exps:?} diverges")));
    }
    Ok(())
}

fn zeta_term(c: Rational, exps: &[i64]) -> Result<Expr> {
    Expr::term(c, vec![Atom::mzv_plain(exps)?])
}

/// `ζ_MT(a, b; c)` as `per{a,b} Σ_{ν<b} C(a+ν−1, ν) ζ(c+a+ν, b−ν)`.
pub fn mt_to_mzv_depth2(a: i64, b: i64, c: i64) -> Result<Expr> {
    guard(&[a, b, c])?;
    per_sum(&[a, b], |v| {
        let (a, b) = (v[0], v[1]);
        let mut out = Expr::zero();
        for nu in 0..b {
            let coeff = rbig(binomial_int((a + nu - 1) as u64, nu));
            out = out.add(&zeta_term(coeff, &[c + a + nu, b - nu])?);
        }
        Ok(out)
    })
}

/// `ζ_MT(a, b, c; d)` by the triple-sum closed form. In the second inner sum
/// the two trailing arguments are `(a−ν₁+ν₃, b−ν₂−ν₃)`; the other order does
/// not reproduce the series.
pub fn mt_to_mzv_depth3(a: i64, b: i64, c: i64, d: i64) -> Result<Expr> {
    guard(&[a, b, c, d])?;
    per_sum(&[a, b, c], |v| {
        let (a, b, c) = (v[0], v[1], v[2]);
        let mut out = Expr::zero();
        for n1 in 0..a {
            for n2 in 0..b {
                let m = rbig(multinomial(&[n1, n2, c - 1]));
                let lead = c + d + n1 + n2;
                for n3 in 0..(a - n1) {
                    let coeff = &m * rbig(binomial_int((b - n2 + n3 - 1) as u64, n3));
                    out = out.add(&zeta_term(coeff, &[lead, b - n2 + n3, a - n1 - n3])?);
                }
                for n3 in 0..(b - n2) {
                    let coeff = &m * rbig(binomial_int((a - n1 + n3 - 1) as u64, n3));
                    out = out.add(&zeta_term(coeff, &[lead, a - n1 + n3, b - n2 - n3])?);
                }
            }
        }
        Ok(out)
    })
}

// A product of powers of linear forms Σ_{i∈mask} m_i; the full mask is the
// total-sum form and is the only one allowed to carry z.
type Denominator = BTreeMap<u32, AffineExp>;

fn parent_of(d: &Denominator, set: u32) -> u32 {
    d.keys()
        .copied()
        .filter(|&o| o != set && o & set == set)
        .min_by_key(|o| o.count_ones())
        .expect("the total-sum form contains every other form")
}

// Two sibling forms to merge, lowest minimum variable first; None once the
// forms are nested in a chain.
fn pick_siblings(d: &Denominator, full: u32) -> Option<(u32, u32)> {
    let mut children: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &set in d.keys().filter(|&&s| s != full) {
        children.entry(parent_of(d, set)).or_default().push(set);
    }
    children
        .into_values()
        .filter(|c| c.len() >= 2)
        .map(|mut c| {
            c.sort_by_key(|s| s.trailing_zeros());
            (c[0], c[1])
        })
        .min_by_key(|&(a, b)| (a.trailing_zeros(), b.trailing_zeros()))
}

fn insert_form(d: &mut Denominator, set: u32, e: AffineExp) -> Result<()> {
    match d.get_mut(&set) {
        Some(old) => *old = old.checked_add(e)?,
        None => {
            d.insert(set, e);
        }
    }
    Ok(())
}

// Apply 1/(A^a B^b) = Σ_{i<a} C(b−1+i,i)/(A^{a−i}(A+B)^{b+i})
//                   + Σ_{i<b} C(a−1+i,i)/(B^{b−i}(A+B)^{a+i}).
fn merge(d: &Denominator, x: u32, y: u32) -> Result<Vec<(Rational, Denominator)>> {
    let (a, b) = (d[&x], d[&y]);
    if a.z || b.z {
        return Err(Error::invalid("z may only appear in the total-sum slot"));
    }
    let (a, b) = (a.constant, b.constant);
    let mut base = d.clone();
    base.remove(&x);
    base.remove(&y);
    let mut out = Vec::new();
    for (keep, kept_exp, other_exp) in [(x, a, b), (y, b, a)] {
        for i in 0..kept_exp {
            let mut nd = base.clone();
            nd.insert(keep, AffineExp::int(kept_exp - i));
            insert_form(&mut nd, x | y, AffineExp::int(other_exp + i))?;
            out.push((rbig(binomial_int((other_exp - 1 + i) as u64, i)), nd));
        }
    }
    Ok(out)
}

fn chain_to_atom(d: &Denominator, alphas: &[Color]) -> Result<Atom> {
    let k = alphas.len() - 1;
    let mut chain: Vec<(u32, AffineExp)> = d.iter().map(|(&s, &e)| (s, e)).collect();
    chain.sort_by_key(|(s, _)| s.count_ones());
    if chain.len() != k || chain.iter().enumerate().any(|(i, (s, _))| s.count_ones() as usize != i + 1)
    {
        return Err(Error::invalid("partial fractions did not end in a full chain"));
    }
    let beta = |v: usize| alphas[v].add(&alphas[k]);
    let mut owned = Vec::with_capacity(k);
    let mut prev = 0u32;
    for (s, _) in &chain {
        if s & prev != prev {
            return Err(Error::invalid("partial fractions did not end in a nested chain"));
        }
        owned.push((s & !prev).trailing_zeros() as usize);
        prev = *s;
    }
    // Leading slot is the outermost form.
    let mut exps = Vec::with_capacity(k);
    let mut colors = Vec::with_capacity(k);
    for i in (0..k).rev() {
        exps.push(chain[i].1);
        let c = if i + 1 == k { beta(owned[i]) } else { beta(owned[i]).sub(&beta(owned[i + 1])) };
        colors.push(c);
    }
    Atom::mzv(exps, colors)
}

/// Convert `ζ_MT(s_1, …, s_k; s_{k+1}; α_1, …, α_{k+1})` into colored MZVs by
/// repeatedly merging sibling linear forms with the two-variable partial
/// fraction identity until the forms are nested.
pub fn mt_to_mzv_general(exps: &[AffineExp], colors: &[Color]) -> Result<Expr> {
    if exps.len() != colors.len() || exps.len() < 2 {
        return Err(Error::invalid("exponent and color vectors must match, length ≥ 2"));
    }
    let k = exps.len() - 1;
    if k > 31 {
        return Err(Error::invalid("depth too large"));
    }
    if exps[..k].iter().any(|e| e.z || e.constant < 1) {
        return Err(Error::invalid(
            "only the total-sum slot may carry z; other exponents must be positive integers",
        ));
    }
    if exps[k].z {
        if exps[k].constant < 0 {
            return Err(Error::invalid("total-sum exponent z+c needs c ≥ 0"));
        }
    } else {
        let ints: Vec<i64> = exps.iter().map(|e| e.constant).collect();
        if ints[k] < 0 {
            return Err(Error::invalid("negative total-sum exponent"));
        }
        let f: Vec<f64> = ints.iter().map(|&e| e as f64).collect();
        if !mt_converges(&f) {
            return Err(Error::domain(format!("ζ_MT{ints:?} diverges")));
        }
    }
    let full = (1u32 << k) - 1;
    let mut start = Denominator::new();
    for (i, &e) in exps[..k].iter().enumerate() {
        start.insert(1 << i, e);
    }
    insert_form(&mut start, full, exps[k])?;

    let mut pending: BTreeMap<Denominator, Rational> = BTreeMap::from([(start, ri(1))]);
    let mut out = Expr::zero();
    while !pending.is_empty() {
        let mut next: BTreeMap<Denominator, Rational> = BTreeMap::new();
        for (d, c) in pending {
            match pick_siblings(&d, full) {
                None => {
                    out = out.add(&Expr::term(c, vec![chain_to_atom(&d, colors)?])?);
                }
                Some((x, y)) => {
                    for (m, nd) in merge(&d, x, y)? {
                        let slot = next.entry(nd).or_insert_with(Rational::zero);
                        *slot += &c * m;
                    }
                }
            }
        }
        next.retain(|_, v| !v.is_zero());
        pending = next;
    }
    Ok(out)
}

/// Plain integer version of [`mt_to_mzv_general`].
pub fn mt_to_mzv_plain(exps: &[i64]) -> Result<Expr> {
    let e: Vec<AffineExp> = exps.iter().map(|&x| AffineExp::int(x)).collect();
    mt_to_mzv_general(&e, &vec![Color::zero(); exps.len()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn plain(exps: &[i64]) -> Atom {
        Atom::mzv_plain(exps).unwrap()
    }

    #[test]
    fn partial_fraction_identity_is_exact() {
        for x in 1..=20i64 {
            for y in 1..=20i64 {
                for a in 1..=5i64 {
                    for b in 1..=5i64 {
                        let pw = |v: i64, e: i64| Rational::from(BigInt::from(v).pow(e as u32));
                        let lhs = ri(1) / (pw(x, a) * pw(y, b));
                        let mut rhs = Rational::zero();
                        for i in 0..a {
                            rhs += rbig(binomial_int((b - 1 + i) as u64, i))
                                / (pw(x, a - i) * pw(x + y, b + i));
                        }
                        for i in 0..b {
                            rhs += rbig(binomial_int((a - 1 + i) as u64, i))
                                / (pw(y, b - i) * pw(x + y, a + i));
                        }
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn per_sum_shapes() {
        let xs = [1i64, 2, 3];
        let mut seen = Vec::new();
        per_sum(&xs, |v| {
            seen.push(v.to_vec());
            Ok(Expr::zero())
        })
        .unwrap();
        assert_eq!(seen, vec![vec![2, 3, 1], vec![1, 3, 2], vec![1, 2, 3]]);
        let sym = per_sum(&[5i64, 5], |_| Ok(Expr::atom(plain(&[3, 1])))).unwrap();
        assert_eq!(sym, Expr::term(ri(2), vec![plain(&[3, 1])]).unwrap());
    }

    #[test]
    fn depth2_examples() {
        assert_eq!(mt_to_mzv_depth2(1, 1, 1).unwrap(), Expr::term(ri(2), vec![plain(&[2, 1])]).unwrap());
        let want = Expr::term(ri(2), vec![plain(&[3, 2])])
            .unwrap()
            .add(&Expr::term(ri(4), vec![plain(&[4, 1])]).unwrap());
        assert_eq!(mt_to_mzv_depth2(2, 2, 1).unwrap(), want);
        assert_eq!(mt_to_mzv_depth2(2, 3, 2).unwrap(), mt_to_mzv_depth2(3, 2, 2).unwrap());
    }

    #[test]
    fn divergence_rejected() {
        // ζ_MT(1,1;0): 0+1 > 1 fails
        assert!(mt_to_mzv_depth2(1, 1, 0).is_err());
        assert!(mt_to_mzv_plain(&[1, 1, 0]).unwrap_err().is_domain());
        assert!(mt_converges(&[1.0, 1.0, 1.0]));
        assert!(mt_converges(&[1.0, 1.0, 1.0, 0.5]));
        assert!(!mt_converges(&[1.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn general_matches_depth2_closed_form() {
        for a in 1..=3 {
            for b in 1..=3 {
                for c in 1..=3 {
                    assert_eq!(
                        mt_to_mzv_plain(&[a, b, c]).unwrap(),
                        mt_to_mzv_depth2(a, b, c).unwrap(),
                        "({a},{b},{c})"
                    );
                }
            }
        }
    }

    #[test]
    fn general_matches_depth3_closed_form() {
        for s in [[1, 1, 1, 1], [2, 2, 2, 2], [1, 2, 3, 1], [3, 1, 2, 2], [2, 3, 1, 1], [3, 3, 2, 4]] {
            assert_eq!(
                mt_to_mzv_plain(&s).unwrap(),
                mt_to_mzv_depth3(s[0], s[1], s[2], s[3]).unwrap(),
                "{s:?}"
            );
        }
    }

    #[test]
    fn weight_and_depth_conserved() {
        for s in [vec![1i64, 2, 1, 3], vec![2, 2, 2, 2, 2], vec![1, 1, 1, 1, 1]] {
            let w: i64 = s.iter().sum();
            let e = mt_to_mzv_plain(&s).unwrap();
            for atom in e.atoms() {
                let Atom::Mzv { exps, .. } = atom else { panic!("non-MZV atom {atom}") };
                assert_eq!(exps.len(), s.len() - 1);
                assert_eq!(exps.iter().map(|e| e.constant).sum::<i64>(), w);
                assert!(exps[0].constant >= 2);
            }
        }
    }

    #[test]
    fn depth_one_is_lerch() {
        let e = mt_to_mzv_general(
            &[AffineExp::int(2), AffineExp::Z],
            &[Color::new(Rational::new(1.into(), 3.into())), Color::zero()],
        )
        .unwrap();
        let want = Atom::lerch(AffineExp::z_plus(2), Color::new(Rational::new(1.into(), 3.into())));
        assert_eq!(e, Expr::atom(want));
    }

    #[test]
    fn colors_follow_the_chain() {
        // ζ_MT(1,1;1; a1,a2,a3) with one chain per partial-fraction branch.
        let third = Color::new(Rational::new(1.into(), 3.into()));
        let half = Color::new(Rational::new(1.into(), 2.into()));
        let e = mt_to_mzv_general(
            &[AffineExp::int(1), AffineExp::int(1), AffineExp::int(1)],
            &[third.clone(), Color::zero(), half.clone()],
        )
        .unwrap();
        // β1 = 1/3+1/2 = 5/6, β2 = 1/2. Chain {1}⊂{1,2}: colors (β2, β1−β2);
        // chain {2}⊂{1,2}: colors (β1, β2−β1).
        let b1 = third.add(&half);
        let b2 = half.clone();
        let t1 = Atom::mzv(vec![AffineExp::int(2), AffineExp::int(1)], vec![b2.clone(), b1.sub(&b2)]).unwrap();
        let t2 = Atom::mzv(vec![AffineExp::int(2), AffineExp::int(1)], vec![b1.clone(), b2.sub(&b1)]).unwrap();
        assert_eq!(e, Expr::atom(t1).add(&Expr::atom(t2)));
    }

    #[test]
    fn z_only_in_total_slot() {
        assert!(mt_to_mzv_general(
            &[AffineExp::Z, AffineExp::int(1), AffineExp::int(2)],
            &[Color::zero(), Color::zero(), Color::zero()]
        )
        .is_err());
        let e = mt_to_mzv_general(
            &[AffineExp::int(1), AffineExp::int(1), AffineExp::Z],
            &[Color::zero(), Color::zero(), Color::zero()],
        )
        .unwrap();
        let want = Atom::mzv(
            vec![AffineExp::z_plus(1), AffineExp::int(1)],
            vec![Color::zero(), Color::zero()],
        )
        .unwrap();
        assert_eq!(e, Expr::term(ri(2), vec![want]).unwrap());
    }
}
