use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mtz_core::arith::{parse_rational, Rational};
use mtz_core::bernprod::{berprod_expand, bernprodnice_expand, carlitz_expand, naive_product, BernCombo};
use mtz_core::dirichlet::{
    character, character_theorem_identity, enumerate_characters, l_mt_assemble, verify_character_identity,
    DirichletCharacter,
};
use mtz_core::mzv::mt_to_mzv_general;
use mtz_core::numerics::{mzv_eval, EvalConfig, EvalResult, Evaluator};
use mtz_core::partitions::{enumerate, index_assignments, PartitionKind};
use mtz_core::reduction::theorem_identity;
use mtz_core::symexpr::{AffineExp, CRat, Color, NumAtom};
use mtz_core::Error;

const SCHEMA: &str = "mtz/1";
// Largest color grid l_mt_assemble will walk.
const GRID_BUDGET: usize = 4096;

#[derive(Parser)]
#[command(name = "mtz", version, about = "Signed cyclic sums of Mordell-Tornheim zeta values: reduction, conversion, evaluation")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit the reduction identity for s (and a color or character)
    Reduce {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        out: Out,
    },
    /// Evaluate both sides of the identity at z and compare
    Verify {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        num: Num,
        #[command(flatten)]
        out: Out,
    },
    /// Evaluate ζ_MT(s, z) (kind mt) or ζ(s) (kind mzv)
    Eval {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value = "mt")]
        kind: EvalKind,
        #[command(flatten)]
        num: Num,
        #[command(flatten)]
        out: Out,
    },
    /// Rewrite ζ_MT(s, z) as multiple zeta values; z stays symbolic if omitted
    Convert {
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<u32>,
        #[arg(long, default_value = "0")]
        alpha: String,
        /// integer total exponent
        #[arg(long)]
        z: Option<i64>,
        #[command(flatten)]
        out: Out,
    },
    /// Bernoulli polynomial product as a combination of single ones
    BernExpand {
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<u32>,
        #[command(flatten)]
        out: Out,
    },
    /// Ordered partitions of s with their index sets
    Partitions {
        #[arg(long, value_delimiter = ',', required = true)]
        s: Vec<u32>,
        #[arg(long, default_value = "prefat")]
        kind: String,
        #[command(flatten)]
        out: Out,
    },
    /// Dirichlet characters of a modulus
    Characters {
        #[arg(long = "mod")]
        modulus: u32,
        #[command(flatten)]
        out: Out,
    },
}

#[derive(Args)]
struct Target {
    #[arg(long, value_delimiter = ',', required = true)]
    s: Vec<u32>,
    /// color as p/q
    #[arg(long, conflicts_with_all = ["chi_mod", "chi_index"])]
    alpha: Option<String>,
    #[arg(long, requires = "chi_index")]
    chi_mod: Option<u32>,
    #[arg(long, requires = "chi_mod")]
    chi_index: Option<usize>,
}

#[derive(Args)]
struct Num {
    /// evaluation point, "a+bi"
    #[arg(long)]
    z: Option<String>,
    #[arg(long, default_value_t = 256)]
    precision: usize,
    /// series truncation cap
    #[arg(long = "N", default_value_t = 1 << 20)]
    n: usize,
    #[arg(long, default_value_t = 1e-30)]
    tol: f64,
}

#[derive(Args)]
struct Out {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum EvalKind {
    Mt,
    Mzv,
}

enum Failure {
    Error(Error),
    Verify(Value, Format),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Error(e)
    }
}

enum Coloring {
    Alpha(Rational),
    Chi(DirichletCharacter),
}

impl Target {
    fn coloring(&self) -> Result<Coloring, Error> {
        match (self.chi_mod, self.chi_index) {
            (Some(f), Some(i)) => Ok(Coloring::Chi(character(f, i)?)),
            _ => Ok(Coloring::Alpha(parse_rational(self.alpha.as_deref().unwrap_or("0"))?)),
        }
    }
}

impl Num {
    fn config(&self) -> EvalConfig {
        EvalConfig { precision_bits: self.precision, target_tol: self.tol, max_terms: self.n }
    }

    fn point(&self) -> Result<Option<CRat>, Error> {
        self.z.as_deref().map(str::parse).transpose()
    }

    fn require_point(&self) -> Result<CRat, Error> {
        self.point()?.ok_or_else(|| Error::invalid("--z is required here"))
    }
}

// NaN anywhere fails the check.
fn verdict(residual: f64, bound: f64, tol: f64) -> bool {
    residual <= bound + tol
}

fn number(r: &EvalResult, cfg: &EvalConfig) -> Value {
    let mp = cfg.mp();
    json!({
        "value_re": r.re(),
        "value_im": r.im(),
        "digits_re": r.decimal_re(&mp),
        "digits_im": r.decimal_im(&mp),
        "bound": r.bound,
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

fn header(command: &str) -> Value {
    json!({ "schema": SCHEMA, "command": command })
}

fn combo(c: &BernCombo) -> Value {
    serde_json::to_value(c.to_json()).expect("serializable")
}

fn run(cmd: Cmd) -> Result<(Value, Format), Failure> {
    match cmd {
        Cmd::Reduce { target, out } => {
            let body = match target.coloring()? {
                Coloring::Alpha(a) => json!({ "identity": theorem_identity(&target.s, &a)? }),
                Coloring::Chi(chi) => {
                    let cfg = EvalConfig::default();
                    let family = character_theorem_identity(&target.s, &chi, &cfg)?;
                    let items: Vec<Value> = family
                        .iter()
                        .map(|(w, id)| json!({ "weight": number(w, &cfg), "identity": id }))
                        .collect();
                    json!({ "character": chi.summary(), "family": items })
                }
            };
            Ok((merge(header("reduce"), body), out.format))
        }
        Cmd::Verify { target, num, out } => {
            let cfg = num.config();
            let z = num.require_point()?;
            let body = match target.coloring()? {
                Coloring::Alpha(a) => {
                    let id = theorem_identity(&target.s, &a)?;
                    let mut ev = Evaluator::new(cfg.clone())?;
                    let v = id.verify(&mut ev, Some(&z))?;
                    json!({
                        "lhs": number(&v.lhs, &cfg),
                        "rhs": number(&v.rhs, &cfg),
                        "residual": v.residual,
                        "bound": v.bound,
                    })
                }
                Coloring::Chi(chi) => {
                    let family = character_theorem_identity(&target.s, &chi, &cfg)?;
                    let v = verify_character_identity(&family, &z, &cfg)?;
                    json!({ "character": chi.summary(), "residual": v.residual, "bound": v.bound })
                }
            };
            let residual = body["residual"].as_f64().unwrap_or(f64::INFINITY);
            let bound = body["bound"].as_f64().unwrap_or(f64::INFINITY);
            let holds = verdict(residual, bound, num.tol);
            let v = merge(header("verify"), merge(body, json!({ "z": z.to_string(), "tol": num.tol, "holds": holds })));
            if holds {
                Ok((v, out.format))
            } else {
                Err(Failure::Verify(v, out.format))
            }
        }
        Cmd::Eval { target, kind, num, out } => {
            let cfg = num.config();
            let (r, route) = match kind {
                EvalKind::Mzv => {
                    if num.z.is_some() || target.chi_mod.is_some() {
                        return Err(Error::invalid("kind mzv takes only --s and --alpha").into());
                    }
                    let a = parse_rational(target.alpha.as_deref().unwrap_or("0"))?;
                    let exps: Vec<i64> = target.s.iter().map(|&x| x as i64).collect();
                    let mut colors = vec![Rational::from_integer(0.into()); exps.len()];
                    if let Some(c) = colors.last_mut() {
                        *c = a;
                    }
                    (mzv_eval(&exps, &colors, &cfg)?, "polylog".to_string())
                }
                EvalKind::Mt => {
                    let z = num.require_point()?;
                    let mut exps: Vec<CRat> = target.s.iter().map(|&x| CRat::int(x as i64)).collect();
                    exps.push(z);
                    match target.coloring()? {
                        Coloring::Alpha(a) => {
                            let mut colors = vec![Color::zero(); exps.len()];
                            colors[exps.len() - 1] = Color::new(a);
                            let atom = NumAtom::Mt { exps, colors };
                            let mut ev = Evaluator::new(cfg.clone())?;
                            let r = ev.atom(&atom)?;
                            let name = atom.to_string();
                            let route = ev
                                .trace()
                                .into_iter()
                                .find(|(a, _, _)| *a == name)
                                .map(|(_, r, _)| r.to_string())
                                .unwrap_or_default();
                            (r, route)
                        }
                        Coloring::Chi(chi) => {
                            let one = character(1, 0)?;
                            let mut chis = vec![one; exps.len() - 1];
                            chis.push(chi);
                            (l_mt_assemble(&exps, &chis, &cfg, GRID_BUDGET)?, "character-assembly".to_string())
                        }
                    }
                }
            };
            Ok((merge(header("eval"), merge(number(&r, &cfg), json!({ "route": route }))), out.format))
        }
        Cmd::Convert { s, alpha, z, out } => {
            let a = parse_rational(&alpha)?;
            let mut exps: Vec<AffineExp> = s.iter().map(|&x| AffineExp::int(x as i64)).collect();
            exps.push(z.map_or(AffineExp::Z, AffineExp::int));
            let mut colors = vec![Color::zero(); exps.len()];
            colors[exps.len() - 1] = Color::new(a);
            let e = mt_to_mzv_general(&exps, &colors)?;
            Ok((merge(header("convert"), json!({ "expr": e })), out.format))
        }
        Cmd::BernExpand { s, out } => {
            let naive = naive_product(&s)?;
            let berprod = berprod_expand(&s)?;
            let nice = bernprodnice_expand(&s)?;
            let carlitz = if s.len() == 2 { Some(carlitz_expand(s[0], s[1])?) } else { None };
            let agree = berprod == naive && nice == naive && carlitz.as_ref().is_none_or(|c| *c == naive);
            let body = json!({
                "naive": combo(&naive),
                "carlitz": carlitz.as_ref().map(combo),
                "berprod": combo(&berprod),
                "bernprodnice": combo(&nice),
                "oracle_agrees": agree,
            });
            Ok((merge(header("bern-expand"), body), out.format))
        }
        Cmd::Partitions { s, kind, out } => {
            let kind: PartitionKind = kind.parse()?;
            let parts: Vec<Value> = enumerate(&s, kind)?
                .iter()
                .map(|p| {
                    let r: Vec<_> = index_assignments(p, kind).into_iter().map(|a| a.parts).collect();
                    json!({ "parts": p.parts(), "index_lengths": p.index_lengths(kind), "assignments": r })
                })
                .collect();
            let body = json!({ "kind": kind, "count": parts.len(), "partitions": parts });
            Ok((merge(header("partitions"), body), out.format))
        }
        Cmd::Characters { modulus, out } => {
            let chars: Vec<_> = enumerate_characters(modulus)?.iter().map(|c| c.summary()).collect();
            let body = json!({
                "modulus": modulus,
                "indexing": "index = k_1 + o_1*(k_2 + o_2*(...)), generator g_i maps to e(k_i/o_i); generators by prime, -1 then 5 for powers of 2; values[a] is the angle t with chi(a) = e(t), null off units",
                "characters": chars,
            });
            Ok((merge(header("characters"), body), out.format))
        }
    }
}

fn text(v: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match x {
                    Value::Array(_) if !has_object(x) => out.push_str(&format!("{pad}{k}: {x}\n")),
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        text(x, indent + 2, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(x))),
                }
            }
        }
        Value::Array(xs) if !xs.iter().any(has_object) => out.push_str(&format!("{pad}{v}\n")),
        Value::Array(xs) => {
            for x in xs {
                out.push_str(&format!("{pad}-\n"));
                text(x, indent + 2, out);
            }
        }
        x => out.push_str(&format!("{pad}{}\n", scalar(x))),
    }
}

fn has_object(v: &Value) -> bool {
    match v {
        Value::Object(_) => true,
        Value::Array(xs) => xs.iter().any(has_object),
        _ => false,
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        x => x.to_string(),
    }
}

fn emit(v: &Value, format: Format) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(v).expect("serializable")),
        Format::Text => {
            let mut s = String::new();
            text(v, 0, &mut s);
            print!("{s}");
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.cmd) {
        Ok((v, f)) => {
            emit(&v, f);
            ExitCode::SUCCESS
        }
        Err(Failure::Verify(v, f)) => {
            emit(&v, f);
            eprintln!("verification failed: residual exceeds bound + tol");
            ExitCode::from(3)
        }
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_domain() { 2 } else { 1 })
        }
    }
}
