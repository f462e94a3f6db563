//! Evaluation of symbolic expressions: atoms are routed to a kernel, cached,
//! and combined with interval-style error propagation.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_traits::Signed;
use serde::Serialize;

use super::mp::Cf;
use super::{
    even_zeta_exact, lerch_phi, mtzv_eval_direct, mzv_eval, mzv_eval_direct, round_up, EvalConfig,
    EvalResult,
};
use crate::arith::{to_f64, Rational};
use crate::error::{Error, Result};
use crate::mzv::mt_to_mzv_general;
use crate::symexpr::{AffineExp, CRat, Color, Expr, NumAtom, NumExpr};

/// Which kernel produced an atom's value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    ClosedForm,
    Polylog,
    Hurwitz,
    Conversion,
    Direct,
}

impl std::fmt::Display for Route {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Route::ClosedForm => "closed-form",
            Route::Polylog => "polylog",
            Route::Hurwitz => "hurwitz",
            Route::Conversion => "conversion",
            Route::Direct => "direct",
        })
    }
}

type ConvKey = (Vec<AffineExp>, Vec<Color>);

fn conversion_cache() -> &'static Mutex<HashMap<ConvKey, Expr>> {
    static CACHE: OnceLock<Mutex<HashMap<ConvKey, Expr>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// MT to MZV conversion, memoized process-wide.
fn convert_cached(exps: &[AffineExp], colors: &[Color]) -> Result<Expr> {
    let key = (exps.to_vec(), colors.to_vec());
    if let Some(e) = conversion_cache().lock().expect("conversion cache").get(&key) {
        return Ok(e.clone());
    }
    let e = mt_to_mzv_general(exps, colors)?;
    conversion_cache().lock().expect("conversion cache").insert(key, e.clone());
    Ok(e)
}

/// Atom evaluator with a per-instance value cache.
pub struct Evaluator {
    cfg: EvalConfig,
    atom_cfg: EvalConfig,
    cache: HashMap<NumAtom, (EvalResult, Route)>,
}

impl Evaluator {
    pub fn new(cfg: EvalConfig) -> Result<Self> {
        cfg.validate()?;
        let atom_cfg = EvalConfig { target_tol: cfg.target_tol / 64.0, ..cfg.clone() };
        Ok(Evaluator { cfg, atom_cfg, cache: HashMap::new() })
    }

    pub fn config(&self) -> &EvalConfig {
        &self.cfg
    }

    /// Routes taken so far, one entry per distinct atom.
    pub fn trace(&self) -> Vec<(String, Route, f64)> {
        let mut v: Vec<_> = self.cache.iter().map(|(a, (r, route))| (a.to_string(), *route, r.bound)).collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub fn atom(&mut self, a: &NumAtom) -> Result<EvalResult> {
        if let Some((r, _)) = self.cache.get(a) {
            return Ok(r.clone());
        }
        let (r, route) = self.compute(a).map_err(|e| match e {
            e @ Error::Atom { .. } => e,
            e => Error::Atom { atom: a.to_string(), source: Box::new(e) },
        })?;
        self.cache.insert(a.clone(), (r.clone(), route));
        Ok(r)
    }

    fn compute(&mut self, a: &NumAtom) -> Result<(EvalResult, Route)> {
        let cfg = self.atom_cfg.clone();
        match a {
            NumAtom::EvenZeta(m) => Ok((even_zeta_exact(*m)?.eval(&cfg), Route::ClosedForm)),
            NumAtom::Lerch { exp, color } => {
                let route = match exp.as_int() {
                    Some(m) if color.is_zero() && m % 2 == 0 && m >= 0 => Route::ClosedForm,
                    Some(_) => Route::Polylog,
                    None => Route::Hurwitz,
                };
                Ok((lerch_phi(exp, color.value(), &cfg)?, route))
            }
            NumAtom::Mzv { exps, colors } => {
                let c: Vec<Rational> = colors.iter().map(|c| c.value().clone()).collect();
                match NumAtom::int_exps(exps) {
                    Some(e) => Ok((mzv_eval(&e, &c, &cfg)?, Route::Polylog)),
                    None => Ok((mzv_eval_direct(exps, &c, &cfg)?, Route::Direct)),
                }
            }
            NumAtom::Mt { exps, colors } => {
                let k = exps.len() - 1;
                if let Some(e) = NumAtom::int_exps(exps) {
                    if e.iter().any(|&x| x < 0) || e[..k].iter().any(|&x| x < 1) {
                        return self.mt_direct(exps, colors);
                    }
                    let aff: Vec<AffineExp> = e.iter().map(|&x| AffineExp::int(x)).collect();
                    let conv = convert_cached(&aff, colors)?;
                    let num = conv.substitute_z(&CRat::int(1))?;
                    return Ok((self.num_expr(&num)?, Route::Conversion));
                }
                let inner_int = exps[..k].iter().all(|x| x.as_int().is_some_and(|v| v >= 1));
                if inner_int {
                    let mut aff: Vec<AffineExp> =
                        exps[..k].iter().map(|x| AffineExp::int(x.as_int().expect("integer slot"))).collect();
                    aff.push(AffineExp::Z);
                    let conv = convert_cached(&aff, colors)?;
                    let num = conv.substitute_z(&exps[k])?;
                    return Ok((self.num_expr(&num)?, Route::Conversion));
                }
                self.mt_direct(exps, colors)
            }
        }
    }

    fn mt_direct(&self, exps: &[CRat], colors: &[Color]) -> Result<(EvalResult, Route)> {
        let c: Vec<Rational> = colors.iter().map(|c| c.value().clone()).collect();
        Ok((mtzv_eval_direct(exps, &c, &self.atom_cfg)?, Route::Direct))
    }

    pub fn num_expr(&mut self, e: &NumExpr) -> Result<EvalResult> {
        let mp = self.cfg.mp();
        let mut total = EvalResult::exact(Cf::zero(&mp));
        for (atoms, c) in e.terms() {
            let mut prod = EvalResult::exact(Cf::one(&mp));
            for a in atoms {
                let v = self.atom(a)?;
                prod = prod.mul(&mp, &v);
            }
            total = total.add(&mp, &scale(&self.cfg, &prod, c));
        }
        Ok(total)
    }

    /// Value of `e` at `z = z0`; `z0` may be omitted when `e` has no `z`.
    pub fn expr(&mut self, e: &Expr, z0: Option<&CRat>) -> Result<EvalResult> {
        let num = match z0 {
            Some(z) => e.substitute_z(z)?,
            None => {
                if e.atoms().any(|a| a.has_z()) {
                    return Err(Error::invalid("expression contains z but no evaluation point was given"));
                }
                e.substitute_z(&CRat::int(1))?
            }
        };
        self.num_expr(&num)
    }
}

fn scale(cfg: &EvalConfig, v: &EvalResult, c: &Rational) -> EvalResult {
    let mp = cfg.mp();
    let cb = mp.rational(c);
    let out = v.value.scale(&mp, &cb);
    let ca = to_f64(&c.abs()) * (1.0 + 4.0 * f64::EPSILON);
    let rounding = 4.0 * mp.ulp() * out.abs_f64();
    EvalResult::new(out, round_up(ca * v.bound + rounding))
}

/// One-shot evaluation of `e` at `z0`.
pub fn expr_eval(e: &Expr, z0: Option<&CRat>, cfg: &EvalConfig) -> Result<EvalResult> {
    Evaluator::new(cfg.clone())?.expr(e, z0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ri};
    use crate::symexpr::Atom;
    use std::f64::consts::PI;

    fn cfg() -> EvalConfig {
        EvalConfig::default()
    }

    const ZETA3: f64 = 1.202_056_903_159_594_3;

    #[test]
    fn mordell_three() {
        // ζ_MT(1,1,1;1) = 3! ζ(4)
        let a = Atom::mt_plain(&[AffineExp::int(1); 4]).unwrap();
        let v = expr_eval(&Expr::atom(a), None, &cfg()).unwrap();
        assert!((v.re() - PI.powi(4) / 15.0).abs() < 1e-14);
        assert!(v.bound < 1e-25);
    }

    #[test]
    fn z_in_total_slot_at_integer_and_fractional_points() {
        let a = Atom::mt_plain(&[AffineExp::int(1), AffineExp::int(1), AffineExp::Z]).unwrap();
        let e = Expr::atom(a);
        let v = expr_eval(&e, Some(&CRat::int(1)), &cfg()).unwrap();
        assert!((v.re() - 2.0 * ZETA3).abs() < 1e-14);
        // z = 3/2 runs through the f64 route; only the bound is promised
        let loose = EvalConfig { target_tol: 1e-6, max_terms: 1 << 16, ..cfg() };
        let mut ev = Evaluator::new(loose.clone()).unwrap();
        let w = ev.expr(&e, Some(&CRat::real(rat(3, 2)))).unwrap();
        let d = mtzv_eval_direct(
            &[CRat::int(1), CRat::int(1), CRat::real(rat(3, 2))],
            &[ri(0), ri(0), ri(0)],
            &loose,
        )
        .unwrap();
        let mp = cfg().mp();
        assert!(w.distance(&mp, &d) <= w.bound + d.bound);
        assert!(ev.trace().iter().any(|(_, r, _)| *r == Route::Direct));
    }

    #[test]
    fn missing_point_is_reported() {
        let e = Expr::atom(Atom::zeta(AffineExp::Z));
        assert!(matches!(expr_eval(&e, None, &cfg()), Err(Error::Invalid(_))));
        assert!(expr_eval(&e, Some(&CRat::real(rat(1, 2))), &cfg()).unwrap_err().is_domain());
    }

    #[test]
    fn divergent_atom_is_wrapped() {
        let e = Expr::atom(Atom::mt_plain(&[AffineExp::int(1), AffineExp::int(1), AffineExp::int(0)]).unwrap());
        match expr_eval(&e, None, &cfg()) {
            Err(err @ Error::Atom { .. }) => assert!(err.is_domain()),
            other => panic!("{other:?}"),
        }
    }
}
