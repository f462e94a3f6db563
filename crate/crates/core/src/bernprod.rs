//! Products of Bernoulli polynomials rewritten as linear combinations of
//! single Bernoulli polynomials plus a constant.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::arith::{
    bernoulli, bernoulli_poly, binomial_int, c_const, factorial, fmt_rational, multinomial,
    poly, rbig, ri, Rational,
};
use crate::error::{Error, Result};
use crate::partitions::{enumerate, index_assignments, inflate, PartitionKind};

/// `constant + Σ_m terms[m]·B_m(x)` with every stored degree `m ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BernCombo {
    pub terms: BTreeMap<usize, Rational>,
    pub constant: Rational,
}

impl BernCombo {
    pub fn add_term(&mut self, degree: usize, c: Rational) {
        if degree == 0 {
            self.constant += c;
            return;
        }
        let slot = self.terms.entry(degree).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&degree);
        }
    }

    /// Expand back into an ordinary polynomial (ascending coefficients).
    pub fn to_poly(&self) -> Vec<Rational> {
        let top = self.terms.keys().next_back().copied().unwrap_or(0);
        let mut out = vec![Rational::zero(); top + 1];
        out[0] += &self.constant;
        for (&m, c) in &self.terms {
            for (k, b) in bernoulli_poly(m).into_iter().enumerate() {
                out[k] += c * b;
            }
        }
        poly::trim(out)
    }

    pub fn to_json(&self) -> BernComboJson {
        BernComboJson {
            terms: self.terms.iter().map(|(&m, c)| (m, fmt_rational(c))).collect(),
            constant: fmt_rational(&self.constant),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct BernComboJson {
    pub terms: Vec<(usize, String)>,
    pub constant: String,
}

fn check_input(s: &[u32], min_len: usize) -> Result<()> {
    if s.len() < min_len {
        return Err(Error::invalid(format!("need at least {min_len} entries, got {}", s.len())));
    }
    if s.contains(&0) {
        return Err(Error::invalid("entries must be positive"));
    }
    Ok(())
}

/// Multiply the polynomials out and peel off Bernoulli polynomials from the
/// top degree down. This is the reference every formula is checked against.
pub fn naive_product(s: &[u32]) -> Result<BernCombo> {
    check_input(s, 1)?;
    let mut p = s
        .iter()
        .fold(vec![Rational::one()], |acc, &k| poly::mul(&acc, &bernoulli_poly(k as usize)));
    let mut out = BernCombo::default();
    for d in (1..p.len()).rev() {
        let c = p[d].clone();
        if c.is_zero() {
            continue;
        }
        for (k, b) in bernoulli_poly(d).into_iter().enumerate() {
            p[k] -= &c * b;
        }
        out.add_term(d, c);
    }
    out.constant = p[0].clone();
    Ok(out)
}

/// The classical two-factor expansion.
pub fn carlitz_expand(s1: u32, s2: u32) -> Result<BernCombo> {
    check_input(&[s1, s2], 2)?;
    let w = (s1 + s2) as usize;
    let mut out = BernCombo::default();
    for r in 0..=(s1.max(s2) / 2) as usize {
        let bracket = rbig(binomial_int(s1 as u64, 2 * r as i64) * s2)
            + rbig(binomial_int(s2 as u64, 2 * r as i64) * s1);
        out.add_term(w - 2 * r, bracket * bernoulli(2 * r) / ri((w - 2 * r) as i64));
    }
    let sign = if s2 % 2 == 0 { -1 } else { 1 };
    out.constant += ri(sign) * rbig(factorial(s1 as u64) * factorial(s2 as u64))
        / rbig(factorial(w as u64))
        * bernoulli(w);
    Ok(out)
}

/// The subset/multinomial expansion: a sum over proper subsets `i ⊊ [t]` and
/// `0 ≤ j ≤ s(i)`, with constant term `C_s`.
pub fn berprod_expand(s: &[u32]) -> Result<BernCombo> {
    check_input(s, 2)?;
    let t = s.len();
    let total: i64 = s.iter().map(|&x| x as i64).sum();
    let s_fact: BigInt = s.iter().map(|&x| factorial(x as u64)).product();
    let mut out = BernCombo { constant: c_const(s)?, ..Default::default() };
    for mask in 0u32..((1 << t) - 1) {
        let idx: Vec<usize> = (0..t).filter(|&a| mask >> a & 1 == 1).map(|a| a + 1).collect();
        let bounds: Vec<u32> = idx.iter().map(|&a| s[a - 1]).collect();
        let mut j = vec![0u32; idx.len()];
        loop {
            let jsum: i64 = j.iter().map(|&x| x as i64).sum();
            let n = total - jsum + idx.len() as i64 - t as i64;
            let bj: Rational = j.iter().map(|&x| bernoulli(x as usize)).product();
            if !bj.is_zero() {
                let inf = inflate(&j, &idx, t)?;
                let diff: Vec<i64> =
                    s.iter().zip(&inf).map(|(&a, &b)| a as i64 - b as i64).collect();
                let m = multinomial(&diff);
                if !m.is_zero() {
                    let jf: BigInt = j.iter().map(|&x| factorial(x as u64)).product();
                    let coeff = rbig(m) * bj * rbig(s_fact.clone())
                        / rbig(jf * factorial((n + 1) as u64));
                    out.add_term((n + 1) as usize, coeff);
                }
            }
            if !odometer(&mut j, &bounds) {
                break;
            }
        }
    }
    Ok(out)
}

// Advance `v` with v[0] fastest inside 0..=bounds; false once exhausted.
fn odometer(v: &mut [u32], bounds: &[u32]) -> bool {
    for (x, &b) in v.iter_mut().zip(bounds) {
        if *x < b {
            *x += 1;
            return true;
        }
        *x = 0;
    }
    false
}

/// One summand of the partition expansion. `degree` is `None` for the
/// constant part; `weight` is the sum of the Bernoulli indices involved.
#[derive(Debug, Clone)]
pub struct NiceTerm {
    pub degree: Option<usize>,
    pub coeff: Rational,
    pub weight: usize,
}

// Product of the b-factors of one block, with their Bernoulli weight.
fn block_b_product(part: &[u32], r: &[u32]) -> (Rational, usize) {
    let mut acc = Rational::one();
    let mut weight = 0usize;
    let mut sig_p = 0i64;
    let mut sig_r = 0i64;
    for (i, &ri_) in r.iter().enumerate() {
        sig_p += part[i] as i64;
        let x = sig_p - 2 * sig_r;
        let next = part[i + 1] as i64;
        let bracket = binomial_int(x as u64, 2 * ri_ as i64) * next
            + binomial_int(next as u64, 2 * ri_ as i64) * x;
        sig_r += ri_ as i64;
        let denom = sig_p + next - 2 * sig_r;
        acc *= rbig(bracket) * bernoulli(2 * ri_ as usize) / ri(denom);
        weight += 2 * ri_ as usize;
    }
    (acc, weight)
}

// Closing factor of a block that contributes a Bernoulli number.
fn block_closing(part: &[u32], rsum: u32) -> (Rational, usize) {
    let last = *part.last().expect("non-empty block") as u64;
    let size: u64 = part.iter().map(|&x| x as u64).sum::<u64>() - 2 * rsum as u64;
    let sign = if last % 2 == 0 { -1 } else { 1 };
    let c = ri(sign) * rbig(factorial(size - last) * factorial(last)) / rbig(factorial(size))
        * bernoulli(size as usize);
    (c, size as usize)
}

/// All summands of the pre-fat/fat partition expansion, in enumeration order.
pub fn bernprodnice_terms(s: &[u32]) -> Result<Vec<NiceTerm>> {
    check_input(s, 2)?;
    let mut out = Vec::new();
    for (kind, with_x) in [(PartitionKind::PreFat, true), (PartitionKind::Fat, false)] {
        for p in enumerate(s, kind)? {
            let parts = p.parts();
            let q = parts.len();
            for r in index_assignments(&p, kind) {
                let mut coeff = Rational::one();
                let mut weight = 0usize;
                let mut degree = None;
                for (j, part) in parts.iter().enumerate() {
                    let (b, w) = block_b_product(part, &r.parts[j]);
                    coeff *= b;
                    weight += w;
                    let rsum = r.part_sum(j);
                    if with_x && j + 1 == q {
                        let size: u32 = part.iter().sum::<u32>() - 2 * rsum;
                        degree = Some(size as usize);
                    } else {
                        let (c, w) = block_closing(part, rsum);
                        coeff *= c;
                        weight += w;
                    }
                }
                if !coeff.is_zero() {
                    out.push(NiceTerm { degree, coeff, weight });
                }
            }
        }
    }
    Ok(out)
}

/// The weight-homogeneous expansion over pre-fat and fat partitions.
pub fn bernprodnice_expand(s: &[u32]) -> Result<BernCombo> {
    let mut out = BernCombo::default();
    for term in bernprodnice_terms(s)? {
        match term.degree {
            Some(m) => out.add_term(m, term.coeff),
            None => out.constant += term.coeff,
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;
    use proptest::prelude::*;

    fn combo(terms: &[(usize, Rational)], constant: Rational) -> BernCombo {
        let mut c = BernCombo { constant, ..Default::default() };
        for (m, v) in terms {
            c.add_term(*m, v.clone());
        }
        c
    }

    #[test]
    fn naive_examples() {
        assert_eq!(naive_product(&[1, 1]).unwrap(), combo(&[(2, ri(1))], rat(1, 12)));
        let two = combo(&[(4, ri(1)), (2, rat(1, 3))], rat(1, 180));
        assert_eq!(naive_product(&[2, 2]).unwrap(), two);
        // value at 0: B_4 + B_2/3 + 1/180 = B_2^2
        let at0 = bernoulli(4) + bernoulli(2) * rat(1, 3) + rat(1, 180);
        assert_eq!(at0, rat(1, 36));
        for n in 1..8 {
            assert_eq!(naive_product(&[n]).unwrap(), combo(&[(n as usize, ri(1))], ri(0)));
        }
    }

    #[test]
    fn naive_roundtrips_to_polynomial() {
        let s = [3, 1, 2];
        let direct =
            s.iter().fold(vec![ri(1)], |acc, &k| poly::mul(&acc, &bernoulli_poly(k as usize)));
        assert_eq!(naive_product(&s).unwrap().to_poly(), poly::trim(direct));
    }

    #[test]
    fn carlitz_examples() {
        assert_eq!(carlitz_expand(1, 1).unwrap(), naive_product(&[1, 1]).unwrap());
        assert_eq!(carlitz_expand(2, 2).unwrap(), naive_product(&[2, 2]).unwrap());
        for a in 1..=6 {
            for b in 1..=6 {
                let c = carlitz_expand(a, b).unwrap();
                assert_eq!(c, carlitz_expand(b, a).unwrap());
                assert_eq!(c, naive_product(&[a, b]).unwrap(), "({a},{b})");
            }
        }
    }

    #[test]
    fn nice_matches_carlitz_termwise_for_pairs() {
        for a in 1..=6 {
            for b in 1..=6 {
                assert_eq!(bernprodnice_expand(&[a, b]).unwrap(), carlitz_expand(a, b).unwrap());
            }
        }
    }

    #[test]
    fn formulas_match_naive_grid_t3() {
        for a in 1..=4 {
            for b in 1..=4 {
                for c in 1..=4 {
                    let s = [a, b, c];
                    let oracle = naive_product(&s).unwrap();
                    assert_eq!(berprod_expand(&s).unwrap(), oracle, "berprod {s:?}");
                    assert_eq!(bernprodnice_expand(&s).unwrap(), oracle, "nice {s:?}");
                }
            }
        }
    }

    #[test]
    fn nice_terms_are_weight_homogeneous() {
        for s in [[1u32, 2, 3, 4], [5, 1, 1, 2], [2, 2, 2, 2]] {
            let total: usize = s.iter().map(|&x| x as usize).sum();
            for term in bernprodnice_terms(&s).unwrap() {
                assert_eq!(term.weight + term.degree.unwrap_or(0), total, "{s:?}");
            }
        }
    }

    #[test]
    fn short_inputs_rejected() {
        assert!(berprod_expand(&[3]).is_err());
        assert!(bernprodnice_expand(&[3]).is_err());
        assert!(naive_product(&[]).is_err());
    }

    proptest! {
        #[test]
        fn expansions_are_permutation_invariant(s in prop::collection::vec(1u32..5, 2..5)) {
            let mut rev = s.clone();
            rev.reverse();
            prop_assert_eq!(bernprodnice_expand(&s).unwrap(), bernprodnice_expand(&rev).unwrap());
            prop_assert_eq!(berprod_expand(&s).unwrap(), berprod_expand(&rev).unwrap());
        }
    }
}
