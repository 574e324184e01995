//! Evaluation in the model of continuous functionals: naturals, points of
//! Baire space as lazy streams, and continuous type-2 functionals.

mod constructions;
mod formula;
mod oracle;

use std::collections::BTreeMap;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use thiserror::Error;

use crate::term::{parse_term, Name, Signature, Term, TermError, Type};

pub use constructions::{
    compose_hat, diag_real, encode_args, even_row, pair, pair_streams, prim_rec, project_arg, row_extract, unpair,
};
pub use formula::{apply_represented, holds, represent_formula, validate, Formula0, FormulaVar};
pub use oracle::{Fuel, Functional2, Oracle1};

pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("UnboundParameter: {0}")]
    UnboundParameter(String),
    #[error("NonterminationBudget: evaluation exceeded {0} steps")]
    NonterminationBudget(u64),
    #[error("TypeMismatch: {0}")]
    TypeMismatch(String),
    #[error("IllFormedFormula: {0}")]
    IllFormedFormula(String),
    #[error("EnvironmentError at line {line}: {msg}")]
    Environment { line: usize, msg: String },
}

impl From<TermError> for EvalError {
    fn from(e: TermError) -> Self {
        EvalError::TypeMismatch(e.to_string())
    }
}

/// A closure for λ-terms whose type is neither 1 nor 2.
pub struct Closure {
    var: Name,
    body: Arc<Term>,
    env: Env,
    ev: Evaluator,
}

#[derive(Clone)]
pub enum Value {
    Nat(u64),
    Stream(Oracle1),
    Functional(Functional2),
    Closure(Rc<Closure>),
}

impl Value {
    pub fn as_nat(&self) -> Result<u64, EvalError> {
        match self {
            Value::Nat(n) => Ok(*n),
            _ => Err(EvalError::TypeMismatch("expected a natural number".into())),
        }
    }

    /// Views a type-1 value as a stream.
    pub fn to_stream(&self) -> Result<Oracle1, EvalError> {
        match self {
            Value::Stream(s) => Ok(s.clone()),
            Value::Closure(c) => {
                let c = c.clone();
                Ok(Oracle1::rule(move |n| c.apply(Value::Nat(n))?.as_nat()))
            }
            _ => Err(EvalError::TypeMismatch("expected a type-1 value".into())),
        }
    }

    /// Views a type-2 value as a functional.
    pub fn to_functional(&self) -> Result<Functional2, EvalError> {
        match self {
            Value::Functional(f) => Ok(f.clone()),
            Value::Closure(c) => {
                let c = c.clone();
                Ok(Functional2::new("λ", move |s| c.apply(Value::Stream(s.clone()))?.as_nat()))
            }
            _ => Err(EvalError::TypeMismatch("expected a type-2 value".into())),
        }
    }

    fn fits(&self, ty: &Type) -> bool {
        match (self, ty.level()) {
            (Value::Nat(_), Some(0)) => true,
            (Value::Stream(_), Some(1)) => true,
            (Value::Functional(_), Some(2)) => true,
            (Value::Closure(_), _) => !matches!(ty, Type::Zero),
            _ => false,
        }
    }

    /// Renders naturals in full and streams by their first `positions` values.
    pub fn render(&self, positions: u64) -> Result<String, EvalError> {
        Ok(match self {
            Value::Nat(n) => n.to_string(),
            Value::Stream(s) => {
                let vals = s.prefix(positions)?;
                vals.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")
            }
            Value::Functional(f) => format!("<functional {}>", f.label()),
            Value::Closure(_) => "<closure>".into(),
        })
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "Nat({n})"),
            Value::Stream(s) => write!(f, "{s:?}"),
            Value::Functional(g) => write!(f, "{g:?}"),
            Value::Closure(_) => f.write_str("Closure"),
        }
    }
}

impl Closure {
    fn apply(&self, v: Value) -> Result<Value, EvalError> {
        let env = self.env.extend(self.var.clone(), v);
        self.ev.eval_in(&self.body, &env)
    }
}

#[derive(Clone, Default)]
struct Env(Option<Rc<EnvNode>>);

struct EnvNode {
    name: Name,
    val: Value,
    next: Env,
}

impl Env {
    fn extend(&self, name: Name, val: Value) -> Env {
        Env(Some(Rc::new(EnvNode { name, val, next: self.clone() })))
    }

    fn lookup(&self, x: &str) -> Option<&Value> {
        let mut cur = &self.0;
        while let Some(node) = cur {
            if &*node.name == x {
                return Some(&node.val);
            }
            cur = &node.next.0;
        }
        None
    }
}

/// Values for the parameters of a signature.
pub type ParamEnv = BTreeMap<String, Value>;

#[derive(Clone)]
pub struct Evaluator {
    params: Rc<ParamEnv>,
    fuel: Fuel,
}

impl Evaluator {
    pub fn new(params: ParamEnv, fuel: Fuel) -> Self {
        Evaluator { params: Rc::new(params), fuel }
    }

    pub fn with_default_fuel(params: ParamEnv) -> Self {
        Self::new(params, Fuel::new(DEFAULT_FUEL))
    }

    pub fn fuel(&self) -> &Fuel {
        &self.fuel
    }

    /// Evaluates a term whose only free names are parameters. Results of
    /// type 1 and 2 come back as streams and functionals.
    pub fn eval(&self, t: &Term) -> Result<Value, EvalError> {
        let sig = crate::normalize::params_sig(t);
        for (name, ty) in sig.iter() {
            match self.params.get(&**name) {
                None => return Err(EvalError::UnboundParameter(name.to_string())),
                Some(v) if !v.fits(ty) => {
                    return Err(EvalError::TypeMismatch(format!(
                        "parameter {name} is bound to a value not of type {ty}"
                    )))
                }
                Some(_) => {}
            }
        }
        let ty = crate::term::type_of(t, &sig)?;
        let v = self.eval_in(t, &Env::default())?;
        match ty.level() {
            Some(1) => v.to_stream().map(Value::Stream),
            Some(2) => v.to_functional().map(Value::Functional),
            _ => Ok(v),
        }
    }

    /// Evaluates a term with its free variables bound by `vars`.
    pub fn eval_open(&self, t: &Term, vars: &[(Name, Value)]) -> Result<Value, EvalError> {
        let env = vars.iter().fold(Env::default(), |e, (x, v)| e.extend(x.clone(), v.clone()));
        self.eval_in(t, &env)
    }

    fn nat(&self, t: &Term, env: &Env) -> Result<u64, EvalError> {
        self.eval_in(t, env)?.as_nat()
    }

    fn eval_in(&self, t: &Term, env: &Env) -> Result<Value, EvalError> {
        self.fuel.tick()?;
        match t {
            Term::Nat(n) => Ok(Value::Nat(*n)),
            Term::Var(x, _) => {
                env.lookup(x).cloned().ok_or_else(|| EvalError::TypeMismatch(format!("free variable {x}")))
            }
            Term::Param(x, _) => {
                self.params.get(&**x).cloned().ok_or_else(|| EvalError::UnboundParameter(x.to_string()))
            }
            Term::Lam(x, _, b) => Ok(Value::Closure(Rc::new(Closure {
                var: x.clone(),
                body: b.clone(),
                env: env.clone(),
                ev: self.clone(),
            }))),
            Term::App(f, a) => {
                let fv = self.eval_in(f, env)?;
                let av = self.eval_in(a, env)?;
                match fv {
                    Value::Closure(c) => c.apply(av),
                    Value::Stream(s) => s.at(av.as_nat()?).map(Value::Nat),
                    Value::Functional(g) => g.apply(&av.to_stream()?).map(Value::Nat),
                    Value::Nat(_) => Err(EvalError::TypeMismatch("a natural number was applied".into())),
                }
            }
            Term::Plus(a, b) => Ok(Value::Nat(self.nat(a, env)?.wrapping_add(self.nat(b, env)?))),
            Term::Times(a, b) => Ok(Value::Nat(self.nat(a, env)?.wrapping_mul(self.nat(b, env)?))),
            Term::Less(a, b) => Ok(Value::Nat(u64::from(self.nat(a, env)? < self.nat(b, env)?))),
            Term::Succ(a) => Ok(Value::Nat(self.nat(a, env)?.wrapping_add(1))),
            Term::Concat(k, r) => {
                let k = self.nat(k, env)?;
                let r = self.eval_in(r, env)?.to_stream()?;
                Ok(Value::Stream(Oracle1::concat(k, &r)))
            }
            Term::Star(f, r) => {
                let f = self.eval_in(f, env)?.to_functional()?;
                let r = self.eval_in(r, env)?.to_stream()?;
                Ok(Value::Stream(Oracle1::star(&f, &r)))
            }
        }
    }
}

/// Evaluates with a fresh default budget.
pub fn eval(t: &Term, env: &ParamEnv) -> Result<Value, EvalError> {
    Evaluator::with_default_fuel(env.clone()).eval(t)
}

/// Environment files bind parameters, one per line:
///
/// ```text
/// n = 4
/// r = prefix 3 1 4 default 0
/// F = term (lam (s 1) (+ (s 0) (s 1)))
/// ```
///
/// A `term` may mention parameters bound on earlier lines.
pub fn parse_env(text: &str, fuel: &Fuel) -> Result<(Signature, ParamEnv), EvalError> {
    let mut sig = Signature::new();
    let mut env = ParamEnv::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split(';').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| EvalError::Environment { line: i + 1, msg };
        let (name, rhs) = line.split_once('=').ok_or_else(|| bad("expected NAME = VALUE".into()))?;
        let name = name.trim();
        let rhs = rhs.trim();
        let (ty, val) = if let Ok(n) = rhs.parse::<u64>() {
            (Type::Zero, Value::Nat(n))
        } else if let Some(rest) = rhs.strip_prefix("prefix") {
            let (pre, default) = match rest.split_once("default") {
                Some((p, d)) => (p, d.trim().parse::<u64>().map_err(|_| bad("bad default".into()))?),
                None => (rest, 0),
            };
            let pre = pre
                .split_whitespace()
                .map(str::parse::<u64>)
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad("bad prefix entry".into()))?;
            (Type::one(), Value::Stream(Oracle1::table(pre, default)))
        } else if let Some(src) = rhs.strip_prefix("term") {
            let t = parse_term(src, &sig).map_err(|e| bad(e.to_string()))?;
            let ty = crate::term::type_of(&t, &sig).map_err(|e| bad(e.to_string()))?;
            if !ty.is_le(2) {
                return Err(bad(format!("binding of type {ty}; only 0, 1, 2 are allowed")));
            }
            let v = Evaluator::new(env.clone(), fuel.clone()).eval(&t)?;
            (ty, v)
        } else {
            return Err(bad(format!("cannot read value '{rhs}'")));
        };
        sig.declare(name, ty);
        env.insert(name.to_string(), val);
    }
    Ok((sig, env))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::parse_term;

    fn sig() -> Signature {
        Signature::new().with("F", Type::two()).with("r", Type::one()).with("n", Type::Zero)
    }

    fn env() -> ParamEnv {
        let mut e = ParamEnv::new();
        e.insert("r".into(), Value::Stream(Oracle1::from_fn(|n| n * n)));
        e.insert("n".into(), Value::Nat(4));
        e.insert("F".into(), Value::Functional(Functional2::new("s0+s3", |s| Ok(s.at(0)? + s.at(3)?))));
        e
    }

    fn run(src: &str) -> Value {
        eval(&parse_term(src, &sig()).unwrap(), &env()).unwrap()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(run("(+ 2 3)").as_nat().unwrap(), 5);
        assert_eq!(run("(< n 5)").as_nat().unwrap(), 1);
        assert_eq!(run("(r n)").as_nat().unwrap(), 16);
        assert_eq!(run("(F r)").as_nat().unwrap(), 9);
    }

    #[test]
    fn higher_order_values() {
        let s = run("(lam (x 0) (+ (r x) 1))").to_stream().unwrap();
        assert_eq!(s.prefix(4).unwrap(), vec![1, 2, 5, 10]);
        let g = run("(lam (y 1) (y 2))").to_functional().unwrap();
        assert_eq!(g.apply(&Oracle1::identity()).unwrap(), 2);
        let st = run("(star F r)").to_stream().unwrap();
        // (F*r)(k) = F(k⌢r) = k + r(2)
        assert_eq!(st.prefix(3).unwrap(), vec![4, 5, 6]);
        let nonstd = run("((lam (f (-> 0 (-> 0 0))) ((f 2) 3)) (lam (a 0) (lam (b 0) (* a b))))");
        assert_eq!(nonstd.as_nat().unwrap(), 6);
    }

    #[test]
    fn missing_parameter() {
        let t = parse_term("(+ n 1)", &sig()).unwrap();
        assert!(matches!(eval(&t, &ParamEnv::new()), Err(EvalError::UnboundParameter(_))));
    }

    #[test]
    fn composition_of_stars() {
        // F0*(F1*r) agrees with the composite of the hatted maps.
        let f0 = Functional2::new("s0*2+s1", |s| Ok(s.at(0)? * 2 + s.at(1)?));
        let f1 = Functional2::new("s2+s0", |s| Ok(s.at(2)? + s.at(0)?));
        let r = Oracle1::from_fn(|n| 3 * n + 1);
        let lhs = Oracle1::star(&f0, &Oracle1::star(&f1, &r));
        let rhs = compose_hat(&[f0, f1], &r);
        assert_eq!(lhs.prefix(20).unwrap(), rhs.prefix(20).unwrap());
    }

    #[test]
    fn environment_files() {
        let fuel = Fuel::new(DEFAULT_FUEL);
        let text = "n = 3\nr = prefix 3 1 4 default 0\nG = term (lam (s 1) (+ (s 0) (r n)))\n";
        let (sig, env) = parse_env(text, &fuel).unwrap();
        assert_eq!(sig.get("G"), Some(&Type::two()));
        let g = env["G"].to_functional().unwrap();
        assert_eq!(g.apply(&Oracle1::constant(5)).unwrap(), 5);
        assert_eq!(env["r"].to_stream().unwrap().prefix(5).unwrap(), vec![3, 1, 4, 0, 0]);
        assert!(parse_env("x = what", &fuel).is_err());
    }

    #[test]
    fn budget_error() {
        let t = parse_term("(+ (+ 1 2) (+ 3 4))", &sig()).unwrap();
        let ev = Evaluator::new(ParamEnv::new(), Fuel::new(3));
        assert_eq!(ev.eval(&t).unwrap_err(), EvalError::NonterminationBudget(3));
    }
}
