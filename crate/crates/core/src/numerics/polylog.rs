//! Colored multiple zeta values at integer arguments by Hölder convolution
//! of their iterated-integral representation.
//!
//! `ζ(s_1,…,s_d; c_1,…,c_d) = Σ_{m_1>…>m_d} Π e(c_i m_i)/m_i^{s_i}` equals
//! `(−1)^d I(a_1,…,a_n)` with `I(a) = ∫_{1>t_1>…>t_n>0} Π dt_i/(t_i − a_i)`
//! and the word made of blocks `0^{s_j−1} e(−(c_1+…+c_j))`. Splitting the
//! simplex at `t = 1/2` gives
//! `I(a) = Σ_j (−1)^j I(2(1−a_j),…,2(1−a_1)) · I(2a_{j+1},…,2a_n)`,
//! and both factors are nested power series converging like `ρ^n`.

use num_traits::Zero;

use super::direct::mzv_eval_direct;
use super::mp::{Cf, Mp};
use super::{round_up, EvalConfig, EvalResult};
use crate::arith::{to_f64, Rational};
use crate::error::{Error, Result};
use crate::symexpr::CRat;

/// Above this convergence ratio the series route is abandoned.
const MAX_RHO: f64 = 0.9;

/// Block structure of a word: `(zeros before the letter, y = 1/letter)`.
struct Blocks {
    blocks: Vec<(usize, Cf)>,
}

impl Blocks {
    fn parse(mp: &Mp, word: &[Option<Cf>]) -> Blocks {
        let mut blocks = Vec::new();
        let mut zeros = 0;
        for l in word {
            match l {
                None => zeros += 1,
                Some(c) => {
                    blocks.push((zeros, c.inv(mp)));
                    zeros = 0;
                }
            }
        }
        debug_assert_eq!(zeros, 0, "word must end in a non-zero letter");
        Blocks { blocks }
    }
}

/// Bound on `Σ_{n>L} ρ^n C(n−1, d)`.
fn geometric_tail(l: usize, rho: f64, d: usize) -> f64 {
    let lf = l as f64;
    let r = rho * (lf + 1.0) / (lf + 1.0 - d as f64);
    if d as f64 >= lf || r >= 1.0 {
        return f64::INFINITY;
    }
    // ln C(L, d)
    let mut lc = 0.0;
    for i in 0..d {
        lc += ((l - i) as f64).ln() - ((i + 1) as f64).ln();
    }
    ((lf + 1.0) * rho.ln() + lc).exp() / (1.0 - r)
}

fn choose_len(rho: f64, depth: usize, tol: f64, cap: usize) -> usize {
    let mut l = 16usize.max(2 * depth + 2);
    while geometric_tail(l, rho, depth) > tol && l < cap {
        l = (l + l / 4 + 1).min(cap);
    }
    l
}

/// `inv_pow[e][n] = n^{−e}` for `1 ≤ e ≤ max_e`, `1 ≤ n ≤ len`.
fn power_table(mp: &Mp, len: usize, max_e: usize) -> Vec<Vec<astro_float::BigFloat>> {
    let one = mp.int(1);
    let inv: Vec<_> = (0..=len).map(|n| if n == 0 { mp.zero() } else { mp.div(&one, &mp.int(n as i64)) }).collect();
    let mut table = vec![vec![one; len + 1]];
    for e in 1..=max_e {
        let prev = &table[e - 1];
        let row: Vec<_> = (0..=len).map(|n| mp.mul(&prev[n], &inv[n])).collect();
        table.push(row);
    }
    table
}

/// Values of `I(suffix)` for every suffix length `0..=len(word)`, each with
/// its truncation bound, from a single pass over the nested sums.
fn suffix_integrals(
    mp: &Mp,
    word: &[Option<Cf>],
    len: usize,
    rho: f64,
    pow: &[Vec<astro_float::BigFloat>],
) -> Vec<(Cf, f64)> {
    let n = word.len();
    let mut out = vec![(Cf::zero(mp), 0.0); n + 1];
    out[0] = (Cf::one(mp), 0.0);
    let Blocks { blocks } = Blocks::parse(mp, word);
    let k = blocks.len();
    if k == 0 {
        return out;
    }
    // G_k(n) = y_k^n
    let mut g: Vec<Cf> = Vec::with_capacity(len + 1);
    g.push(Cf::zero(mp));
    let yk = &blocks[k - 1].1;
    let mut p = yk.clone();
    for _ in 1..=len {
        g.push(p.clone());
        p = p.mul(mp, yk);
    }
    let mut tail_len = 0usize;
    for j in (0..k).rev() {
        let (zeros, _) = &blocks[j];
        let depth_below = k - 1 - j;
        let trunc = geometric_tail(len, rho, depth_below);
        let sign_neg = (k - j) % 2 == 1;
        for e in 0..=*zeros {
            let mut acc = Cf::zero(mp);
            for (nn, gv) in g.iter().enumerate().skip(1) {
                acc = acc.add(mp, &gv.scale(mp, &pow[e + 1][nn]));
            }
            if sign_neg {
                acc = acc.neg();
            }
            out[tail_len + e + 1] = (acc, trunc);
        }
        tail_len += zeros + 1;
        if j == 0 {
            break;
        }
        // G_{j−1}(n) = y_{j−1} (G_{j−1}(n−1) + W_j(n−1)), W_j(n) = G_j(n)/n^{s_j}
        let y = &blocks[j - 1].1;
        let s = zeros + 1;
        let mut next = Vec::with_capacity(len + 1);
        next.push(Cf::zero(mp));
        let mut prev = Cf::zero(mp);
        for nn in 1..=len {
            let cur = if nn == 1 {
                Cf::zero(mp)
            } else {
                let w = g[nn - 1].scale(mp, &pow[s][nn - 1]);
                prev.add(mp, &w).mul(mp, y)
            };
            next.push(cur.clone());
            prev = cur;
        }
        g = next;
    }
    out
}

/// Letters `e(−(c_1+…+c_j))` placed after `s_j − 1` zeros.
fn word_letters(exps: &[i64], colors: &[Rational]) -> Vec<Option<Rational>> {
    let mut word = Vec::new();
    let mut acc = Rational::zero();
    for (&s, c) in exps.iter().zip(colors) {
        acc += c;
        for _ in 1..s {
            word.push(None);
        }
        let t = -acc.clone();
        word.push(Some(&t - t.floor()));
    }
    word
}

fn convergence_ratio(word: &[Option<Rational>]) -> f64 {
    let mut rho: f64 = 0.5;
    for t in word.iter().flatten() {
        if !t.is_zero() {
            let s = (std::f64::consts::PI * to_f64(t)).sin().abs();
            rho = rho.max(1.0 / (4.0 * s));
        }
    }
    rho
}

/// `ζ(s; c)` for positive integer exponents and rational colors.
pub fn mzv_eval(exps: &[i64], colors: &[Rational], cfg: &EvalConfig) -> Result<EvalResult> {
    cfg.validate()?;
    if exps.is_empty() || exps.len() != colors.len() {
        return Err(Error::invalid("MZV needs matching non-empty exponent and color vectors"));
    }
    if exps.iter().any(|&s| s < 1) {
        return Err(Error::domain(format!("MZV exponents must be ≥ 1, got {exps:?}")));
    }
    let lead_trivial = (&colors[0] - colors[0].floor()).is_zero();
    if exps[0] == 1 && lead_trivial {
        return Err(Error::domain(format!("ζ{exps:?} diverges (leading exponent 1, trivial color)")));
    }
    let letters = word_letters(exps, colors);
    let rho = convergence_ratio(&letters);
    if rho > MAX_RHO {
        if exps[0] < 2 {
            return Err(Error::domain(
                "conditionally convergent colored MZV with a color too close to 0 is not supported",
            ));
        }
        let e: Vec<CRat> = exps.iter().map(|&s| CRat::int(s)).collect();
        return mzv_eval_direct(&e, colors, cfg);
    }

    let mp = cfg.mp();
    let n = letters.len();
    let depth = exps.len();
    // Aim well below the request: the series is geometric, so this is cheap
    // and lets cached values serve tighter later requests.
    let tol = (cfg.target_tol / (4.0 * (n as f64 + 1.0))).min(2f64.powf(-0.75 * cfg.precision_bits as f64));
    let len = choose_len(rho, depth, tol, cfg.max_terms);

    let a: Vec<Option<Cf>> = letters.iter().map(|l| l.as_ref().map(|t| mp.root_of_unity(t))).collect();
    let two = mp.int(2);
    let u: Vec<Option<Cf>> = a.iter().map(|l| l.as_ref().map(|c| c.scale(&mp, &two))).collect();
    let one = Cf::one(&mp);
    let v: Vec<Option<Cf>> = a
        .iter()
        .rev()
        .map(|l| match l {
            None => Some(Cf::real(&mp, two.clone())),
            Some(c) => {
                let d = one.sub(&mp, c);
                if d.re.is_zero() && d.im.is_zero() {
                    None
                } else {
                    Some(d.scale(&mp, &two))
                }
            }
        })
        .collect();
    let pow = power_table(&mp, len, n + 1);
    let us = suffix_integrals(&mp, &u, len, rho, &pow);
    let vs = suffix_integrals(&mp, &v, len, rho, &pow);

    let mut total = Cf::zero(&mp);
    let mut err = 0.0;
    let mut mag = 0.0;
    for j in 0..=n {
        let (pv, ev) = &vs[j];
        let (pu, eu) = &us[n - j];
        let term = pv.mul(&mp, pu);
        let (av, au) = (pv.abs_f64(), pu.abs_f64());
        err += av * eu + au * ev + ev * eu;
        mag += av * au;
        total = if j % 2 == 0 { total.add(&mp, &term) } else { total.sub(&mp, &term) };
    }
    if depth % 2 == 1 {
        total = total.neg();
    }
    let ops = (len * (n + 3 * depth + 4) + 8) as f64;
    let scale = (1.0 - rho).powi(-(depth as i32) - 1);
    let roundoff = 16.0 * ops * mp.ulp() * (mag + scale * scale);
    Ok(EvalResult::new(total, round_up(err + roundoff)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ri};
    use std::f64::consts::PI;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    fn plain(exps: &[i64]) -> EvalResult {
        mzv_eval(exps, &vec![ri(0); exps.len()], &cfg()).unwrap()
    }

    const ZETA3: f64 = 1.202_056_903_159_594_3;
    const ZETA5: f64 = 1.036_927_755_143_369_9;

    #[test]
    fn depth_one_values() {
        let z2 = plain(&[2]);
        assert!((z2.re() - PI * PI / 6.0).abs() < 1e-15);
        assert!(z2.bound < 1e-40);
        assert!((plain(&[3]).re() - ZETA3).abs() < 1e-15);
        let ln2 = mzv_eval(&[1], &[rat(1, 2)], &cfg()).unwrap();
        assert!((ln2.re() + 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn euler_identities() {
        let mp = cfg().mp();
        let z21 = plain(&[2, 1]);
        let z3 = plain(&[3]);
        assert!(z21.distance(&mp, &z3) <= z21.bound + z3.bound + 1e-60);
        // ζ(3,1) = π⁴/360, ζ(2,2) = π⁴/120
        assert!((plain(&[3, 1]).re() - PI.powi(4) / 360.0).abs() < 1e-15);
        assert!((plain(&[2, 2]).re() - PI.powi(4) / 120.0).abs() < 1e-15);
        // ζ(2,1,1) = ζ(4)
        assert!((plain(&[2, 1, 1]).re() - PI.powi(4) / 90.0).abs() < 1e-15);
        // ζ(4,1) = 2ζ(5) − ζ(2)ζ(3)
        assert!((plain(&[4, 1]).re() - (2.0 * ZETA5 - PI * PI / 6.0 * ZETA3)).abs() < 1e-15);
    }

    #[test]
    fn sum_formula_weight_six() {
        // ζ(4,2) + 2ζ(5,1) = ζ(6)/6
        let mp = cfg().mp();
        let lhs = plain(&[4, 2]).add(&mp, &plain(&[5, 1])).add(&mp, &plain(&[5, 1]));
        let z6 = super::super::even_zeta_exact(6).unwrap().eval(&cfg());
        let rhs = z6.mul(&mp, &super::super::EvalResult::exact(Cf::real(&mp, mp.div(&mp.int(1), &mp.int(6)))));
        assert!(lhs.distance(&mp, &rhs) <= lhs.bound + rhs.bound);
        assert!(lhs.bound < 1e-30);
    }

    #[test]
    fn alternating_double_sum() {
        // ζ(2,1; 1/2, 0) = Σ_{m>n} (−1)^m/(m² n), against the plain double sum
        let v = mzv_eval(&[2, 1], &[rat(1, 2), ri(0)], &cfg()).unwrap();
        let mut h = 0.0;
        let mut s = 0.0;
        let n_max = 2_000_000;
        for m in 1..=n_max {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * h / (m as f64 * m as f64);
            h += 1.0 / m as f64;
        }
        assert!((v.re() - s).abs() < 1e-10, "{} vs {}", v.re(), s);
        assert!(v.im().abs() < 1e-30);
    }

    #[test]
    fn cube_root_colors() {
        // ζ(2; 1/3) + ζ(2; 2/3) + ζ(2) = 3^{−1} ζ(2)
        let mp = cfg().mp();
        let a = mzv_eval(&[2], &[rat(1, 3)], &cfg()).unwrap();
        let b = mzv_eval(&[2], &[rat(2, 3)], &cfg()).unwrap();
        let s = a.add(&mp, &b).add(&mp, &plain(&[2]));
        assert!((s.re() - PI * PI / 18.0).abs() < 1e-15 && s.im().abs() < 1e-15);
        // colored double sum against direct truncated summation
        let v = mzv_eval(&[2, 2], &[rat(1, 3), rat(1, 4)], &cfg()).unwrap();
        let d = mzv_eval_direct(&[CRat::int(2), CRat::int(2)], &[rat(1, 3), rat(1, 4)], &cfg()).unwrap();
        assert!(v.distance(&mp, &d) <= v.bound + d.bound, "{:?} {:?}", (v.re(), v.im()), (d.re(), d.im()));
    }

    #[test]
    fn divergent_rejected() {
        assert!(mzv_eval(&[1, 2], &[ri(0), ri(0)], &cfg()).unwrap_err().is_domain());
        assert!(mzv_eval(&[0], &[ri(0)], &cfg()).unwrap_err().is_domain());
    }

    #[test]
    fn far_colors_fall_back_to_direct_summation() {
        let v = mzv_eval(&[3], &[rat(1, 20)], &cfg()).unwrap();
        let h = super::super::lerch_phi_hurwitz(&CRat::int(3), &rat(1, 20), &cfg()).unwrap();
        let mp = cfg().mp();
        assert!(v.distance(&mp, &h) <= v.bound + h.bound);
    }
}
