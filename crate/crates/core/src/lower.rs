//! Lowering of closed λ-terms of type ≤ 2 to type-2 codes built from
//! type-≤2 formers only, and extraction of choice functionals for
//! quantifier-free formulas.

use std::sync::Arc;

use thiserror::Error;

use crate::eval::{EvalError, Evaluator, Formula0, FormulaVar, Functional2, Oracle1, Value};
use crate::normalize::{self, fresh, is_beta_normal, NormalizeError};
use crate::term::{type_of, Name, Signature, Term, TermError, Type};

pub const DEFAULT_SEARCH_BOUND: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LowerError {
    #[error("NotNormal: {0}")]
    NotNormal(String),
    #[error("NonStandardSubterm: {0}")]
    NonStandardSubterm(String),
    #[error("TypeMismatch: {0}")]
    Type(#[from] TermError),
    #[error(transparent)]
    Normalize(#[from] NormalizeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("WitnessSearchExhausted: no witness below {0}")]
    WitnessSearchExhausted(u64),
}

/// A closed type-2 term `λu:1. e` coding `source` over `vars`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Type2Code {
    pub code: Term,
    pub source: Term,
    pub vars: Vec<Name>,
}

impl Type2Code {
    /// The code as a functional under the parameter values of `ev`.
    pub fn functional(&self, ev: &Evaluator) -> Result<Functional2, EvalError> {
        ev.eval(&self.code)?.to_functional()
    }
}

fn nat(n: u64) -> Term {
    Term::Nat(n)
}

fn plus(a: Term, n: u64) -> Term {
    match (a, n) {
        (a, 0) => a,
        (Term::Nat(m), n) => nat(m.wrapping_add(n)),
        (a, n) => Term::plus(nat(n), a),
    }
}

/// `s(e)` with the obvious simplifications on λ, ⌢ and literal positions.
fn at(s: &Term, e: Term) -> Term {
    match (s, &e) {
        (Term::Lam(i, _, body), _) => normalize::substitute(body, i, &e).expect("index variables have type 0"),
        (Term::Concat(h, _), Term::Nat(0)) => (**h).clone(),
        (Term::Concat(_, t), Term::Nat(m)) => at(t, nat(m - 1)),
        _ => Term::app(s.clone(), e),
    }
}

/// `P_n * u`, written with a type-0 binder.
fn shift(u: &Term, n: u64) -> Term {
    if n == 0 {
        return u.clone();
    }
    if let Term::Concat(_, t) = u {
        return shift(t, n - 1);
    }
    let i = fresh("i");
    let body = at(u, plus(Term::Var(i.clone(), Type::Zero), n));
    Term::Lam(i, Type::Zero, Arc::new(body))
}

struct Coder<'a> {
    vars: &'a [Name],
}

impl Coder<'_> {
    fn nonstandard<T>(t: &Term) -> Result<T, LowerError> {
        Err(LowerError::NonStandardSubterm(t.to_string()))
    }

    /// Value of a type-0 term, given the encoding `u` of `a₀⌢…⌢a_{n-1}⌢b`.
    fn val0(&self, t: &Term, vars: &[Name], u: &Term) -> Result<Term, LowerError> {
        Ok(match t {
            Term::Nat(_) | Term::Param(..) => t.clone(),
            Term::Var(x, ty) if *ty == Type::Zero => match vars.iter().position(|v| v == x) {
                Some(i) => at(u, nat(i as u64)),
                None => return Err(LowerError::Type(TermError::UnboundVariable(x.to_string()))),
            },
            Term::Plus(a, b) => Term::plus(self.val0(a, vars, u)?, self.val0(b, vars, u)?),
            Term::Times(a, b) => Term::times(self.val0(a, vars, u)?, self.val0(b, vars, u)?),
            Term::Less(a, b) => Term::less(self.val0(a, vars, u)?, self.val0(b, vars, u)?),
            Term::Succ(a) => Term::succ(self.val0(a, vars, u)?),
            Term::App(f, a) => match &**f {
                Term::Lam(..) => return Err(LowerError::NotNormal(t.to_string())),
                Term::Param(_, ty) if ty.level() == Some(2) => Term::app((**f).clone(), self.val1(a, vars, u)?),
                _ => {
                    let k = self.val0(a, vars, u)?;
                    self.val1_at(f, vars, u, k)?
                }
            },
            _ => return Self::nonstandard(t),
        })
    }

    /// Position `k` of the stream denoted by a type-1 term.
    fn val1_at(&self, t: &Term, vars: &[Name], u: &Term, k: Term) -> Result<Term, LowerError> {
        Ok(match t {
            Term::Var(_, ty) if ty.level() == Some(1) => at(&shift(u, vars.len() as u64), k),
            Term::Param(_, ty) if ty.level() == Some(1) => Term::app(t.clone(), k),
            Term::Lam(z, ty, body) if *ty == Type::Zero => {
                let mut inner = vec![z.clone()];
                inner.extend(vars.iter().cloned());
                self.val0(body, &inner, &Term::concat(k, u.clone()))?
            }
            Term::Concat(h, s) => {
                let h = self.val0(h, vars, u)?;
                let s = self.val1(s, vars, u)?;
                at(&Term::concat(h, s), k)
            }
            Term::Star(g, s) => match &**g {
                Term::Param(..) => Term::app((**g).clone(), Term::concat(k, self.val1(s, vars, u)?)),
                Term::Lam(..) => return Err(LowerError::NotNormal(t.to_string())),
                _ => return Self::nonstandard(t),
            },
            _ => return Self::nonstandard(t),
        })
    }

    /// A type-1 term denoting the same stream as `t`.
    fn val1(&self, t: &Term, vars: &[Name], u: &Term) -> Result<Term, LowerError> {
        match t {
            Term::Var(_, ty) if ty.level() == Some(1) => Ok(shift(u, vars.len() as u64)),
            Term::Param(..) => Ok(t.clone()),
            _ => {
                let j = fresh("j");
                let body = self.val1_at(t, vars, u, Term::Var(j.clone(), Type::Zero))?;
                Ok(Term::Lam(j, Type::Zero, Arc::new(body)))
            }
        }
    }
}

fn type1_vars(t: &Term) -> Vec<Name> {
    let mut out: Vec<Name> = Vec::new();
    for x in t.free_vars() {
        let mut is1 = false;
        t.visit(&mut |s| {
            if let Term::Var(y, ty) = s {
                if *y == x && *ty != Type::Zero {
                    is1 = true;
                }
            }
        });
        if is1 {
            out.push(x);
        }
    }
    out
}

/// Codes a normal term of type 0 or 1 over the type-0 variables `vars`
/// and at most one free type-1 variable. For type 0 the code `F` satisfies
/// `F(a₀⌢…⌢a_{n-1}⌢b) = t[ā, b]`; for type 1, `F*(a₀⌢…⌢b) = t[ā, b]`.
pub fn code_term(t: &Term, vars: &[Name]) -> Result<Type2Code, LowerError> {
    if !is_beta_normal(t) {
        return Err(LowerError::NotNormal(t.to_string()));
    }
    let ty = t.type_in(&normalize::params_sig(t))?;
    if type1_vars(t).len() > 1 {
        return Err(LowerError::NonStandardSubterm(format!("{t} has more than one free type-1 variable")));
    }
    for x in t.free_vars() {
        if !vars.contains(&x) && !type1_vars(t).contains(&x) {
            return Err(LowerError::Type(TermError::UnboundVariable(x.to_string())));
        }
    }
    let coder = Coder { vars };
    let u_name = fresh("u");
    let u = Term::Var(u_name.clone(), Type::one());
    let body = match ty.level() {
        Some(0) => coder.val0(t, coder.vars, &u)?,
        Some(1) => coder.val1_at(t, coder.vars, &shift(&u, 1), at(&u, nat(0)))?,
        _ => return Err(LowerError::NonStandardSubterm(format!("{t} has type {ty}"))),
    };
    Ok(Type2Code { code: Term::Lam(u_name, Type::one(), Arc::new(body)), source: t.clone(), vars: vars.to_vec() })
}

/// Result of lowering a closed term, by source type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lowered {
    /// Evaluates to `F(0̄)`.
    Type0(Type2Code),
    /// Denotes the stream `k ↦ F(k⌢0̄)`.
    Type1(Type2Code),
    Type2(Type2Code),
}

impl Lowered {
    pub fn code(&self) -> &Type2Code {
        match self {
            Lowered::Type0(c) | Lowered::Type1(c) | Lowered::Type2(c) => c,
        }
    }

    pub fn value(&self, ev: &Evaluator) -> Result<Value, EvalError> {
        let f = self.code().functional(ev)?;
        Ok(match self {
            Lowered::Type0(_) => Value::Nat(f.apply(&Oracle1::constant(0))?),
            Lowered::Type1(_) => {
                let zero = Oracle1::constant(0);
                Value::Stream(Oracle1::rule(move |k| f.apply(&Oracle1::concat(k, &zero))))
            }
            Lowered::Type2(_) => Value::Functional(f),
        })
    }
}

/// Normalizes a closed term of type ≤ 2 and codes it as a type-2 term.
pub fn lower_closed(t: &Term, sig: &Signature) -> Result<Lowered, LowerError> {
    let ty = type_of(t, sig)?;
    let y = fresh("y");
    let yv = Term::Var(y.clone(), Type::one());
    let (wrapped, level) = match ty.level() {
        Some(0) => (Term::Lam(y, Type::one(), Arc::new(t.clone())), 0),
        Some(1) => (Term::lam(&y, Type::one(), Term::app(t.clone(), Term::app(yv, nat(0)))), 1),
        Some(2) => (t.clone(), 2),
        _ => return Err(LowerError::NonStandardSubterm(format!("closed term of type {ty}"))),
    };
    let nf = normalize::normal_form(&wrapped)?;
    let code = match &nf {
        Term::Lam(_, ty, body) if ty.level() == Some(1) => {
            let mut c = code_term(body, &[])?;
            c.source = t.clone();
            c
        }
        Term::Param(..) => {
            let u = fresh("u");
            let body = Term::app(nf.clone(), Term::Var(u.clone(), Type::one()));
            Type2Code { code: Term::Lam(u, Type::one(), Arc::new(body)), source: t.clone(), vars: vec![] }
        }
        other => return Err(LowerError::NonStandardSubterm(other.to_string())),
    };
    Ok(match level {
        0 => Lowered::Type0(code),
        1 => Lowered::Type1(code),
        _ => Lowered::Type2(code),
    })
}

/// Structural purity of a code: a single type-1 binder at the root, every
/// other binder of type 0, and every subterm of standard type ≤ 2.
pub fn purity_violations(code: &Term) -> Vec<String> {
    let mut out = Vec::new();
    let body = match code {
        Term::Lam(_, ty, b) if ty.level() == Some(1) => b,
        _ => {
            out.push("root is not a type-1 abstraction".to_string());
            return out;
        }
    };
    body.visit(&mut |s| {
        if let Term::Lam(x, ty, _) = s {
            if *ty != Type::Zero {
                out.push(format!("inner binder {x} has type {ty}"));
            }
        }
    });
    let sig = normalize::params_sig(code);
    let mut check = |s: &Term| match s.type_in(&sig) {
        Ok(ty) if ty.is_standard() && ty.is_le(2) => {}
        Ok(ty) => out.push(format!("subterm {s} has type {ty}")),
        Err(e) => out.push(e.to_string()),
    };
    code.visit(&mut check);
    out
}

/// Terms and semantic versions of the helper functionals used by the
/// coding: shifts `P_n`, rearrangers `R_π` and projections `π_i`.
pub mod helpers {
    use super::*;
    use crate::eval::unpair;

    fn s_at(e: Term) -> Term {
        Term::app(Term::var("s", Type::one()), e)
    }

    fn s0() -> Term {
        s_at(nat(0))
    }

    /// `P_n = λs:1. s(s(0)+n+1)`, so `(P_n*r)(i) = r(n+i)`.
    pub fn shift_term(n: u64) -> Term {
        Term::lam("s", Type::one(), s_at(Term::plus(s0(), nat(n + 1))))
    }

    pub fn shift(n: u64) -> Functional2 {
        Functional2::new(format!("P_{n}"), move |s| s.at(s.at(0)?.wrapping_add(n + 1)))
    }

    fn eq_term(a: Term, b: u64) -> Term {
        Term::times(Term::less(a.clone(), nat(b + 1)), Term::less(nat(b), Term::succ(a)))
    }

    /// `R_π`, with `(R_π*r)(i) = r(π(i))` below `|π|` and `r(i)` above.
    pub fn permute_term(perm: &[u64]) -> Term {
        let n = perm.len() as u64;
        let mut idx = if n == 0 { s0() } else { Term::times(Term::less(nat(n - 1), s0()), s0()) };
        for (j, p) in perm.iter().enumerate() {
            idx = Term::plus(Term::times(eq_term(s0(), j as u64), nat(*p)), idx);
        }
        Term::lam("s", Type::one(), s_at(Term::succ(idx)))
    }

    pub fn permute(perm: &[u64]) -> Functional2 {
        let perm = perm.to_vec();
        Functional2::new(format!("R_{perm:?}"), move |s| {
            let i = s.at(0)?;
            let j = usize::try_from(i).ok().and_then(|i| perm.get(i)).copied().unwrap_or(i);
            s.at(j.wrapping_add(1))
        })
    }

    /// `F_i` with `F_i * ⟨w₀,…,w_{len-1}⟩ = w_i` for right-nested pairs.
    pub fn projection(i: usize, len: usize) -> Functional2 {
        assert!(i < len);
        Functional2::new(format!("pi_{i}/{len}"), move |s| {
            let mut v = s.at(s.at(0)?.wrapping_add(1))?;
            for _ in 0..i {
                v = unpair(v).1;
            }
            Ok(if i + 1 < len { unpair(v).0 } else { v })
        })
    }
}

/// A choice functional for a quantifier-free formula `Φ(y, x)`: each maximal
/// term is coded, and the least `x` below the search bound satisfying the
/// rebuilt formula is returned.
#[derive(Clone, Debug)]
pub struct Witness {
    pub formula: Formula0,
    pub codes: Vec<Type2Code>,
    pub x: Name,
    pub bound: u64,
}

fn rebuild(phi: &Formula0, vals: &mut impl Iterator<Item = u64>) -> bool {
    let mut next = || vals.next().expect("one value per maximal term");
    match phi {
        Formula0::True => true,
        Formula0::Eq(..) => next() == next(),
        Formula0::Lt(..) => next() < next(),
        Formula0::Not(a) => !rebuild(a, vals),
        Formula0::And(a, b) => {
            let l = rebuild(a, vals);
            rebuild(b, vals) && l
        }
        Formula0::Or(a, b) => {
            let l = rebuild(a, vals);
            rebuild(b, vals) || l
        }
        Formula0::Exists { .. } | Formula0::Forall { .. } => unreachable!("quantifier-free"),
    }
}

impl Witness {
    /// `Φ̂(x, b)`, reading every maximal term through its code on `x⌢b`.
    pub fn holds(&self, fs: &[Functional2], x: u64, b: &Oracle1) -> Result<bool, EvalError> {
        let arg = Oracle1::concat(x, b);
        let vals = fs.iter().map(|f| f.apply(&arg)).collect::<Result<Vec<_>, _>>()?;
        Ok(rebuild(&self.formula, &mut vals.into_iter()))
    }

    /// The least witness for `b`.
    pub fn choose(&self, fs: &[Functional2], b: &Oracle1) -> Result<u64, LowerError> {
        for x in 0..self.bound {
            if self.holds(fs, x, b)? {
                return Ok(x);
            }
        }
        Err(LowerError::WitnessSearchExhausted(self.bound))
    }

    pub fn functionals(&self, ev: &Evaluator) -> Result<Vec<Functional2>, EvalError> {
        self.codes.iter().map(|c| c.functional(ev)).collect()
    }

    /// The choice functional `G`. A failed search surfaces as an
    /// evaluation error naming the exhausted bound.
    pub fn functional(&self, ev: &Evaluator) -> Result<Functional2, EvalError> {
        let fs = self.functionals(ev)?;
        let me = self.clone();
        Ok(Functional2::new(format!("least x. {}", self.formula), move |b| match me.choose(&fs, b) {
            Ok(x) => Ok(x),
            Err(LowerError::Eval(e)) => Err(e),
            Err(e) => Err(EvalError::TypeMismatch(e.to_string())),
        }))
    }
}

/// Builds the choice functional for `Φ(y, x)` with `y:1` and `x:0`.
pub fn qf_ac_witness(phi: &Formula0, y: &str, x: &str, bound: u64) -> Result<Witness, LowerError> {
    if !phi.is_quantifier_free() {
        return Err(LowerError::Eval(EvalError::IllFormedFormula("formula has quantifiers".into())));
    }
    crate::eval::validate(phi, &[FormulaVar::Nat(x.into()), FormulaVar::Real(y.into())])?;
    let x: Name = x.into();
    let codes = phi
        .terms()
        .into_iter()
        .map(|t| code_term(&normalize::normal_form(t)?, std::slice::from_ref(&x)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Witness { formula: phi.clone(), codes, x, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::{Fuel, ParamEnv, DEFAULT_FUEL};
    use crate::term::parse_term;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ev_with(env: ParamEnv) -> Evaluator {
        Evaluator::new(env, Fuel::new(DEFAULT_FUEL))
    }

    fn random_stream(rng: &mut ChaCha8Rng) -> Oracle1 {
        let pre: Vec<u64> = (0..12).map(|_| rng.random_range(0..20)).collect();
        Oracle1::table(pre, rng.random_range(0..5))
    }

    #[test]
    fn sum_with_stream_head() {
        let t = Term::plus(Term::var("x0", Type::Zero), Term::app(Term::var("y", Type::one()), nat(0)));
        let c = code_term(&t, &["x0".into()]).unwrap();
        assert!(purity_violations(&c.code).is_empty());
        let f = c.functional(&ev_with(ParamEnv::new())).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let a = rng.random_range(0..100);
            let b = random_stream(&mut rng);
            assert_eq!(f.apply(&Oracle1::concat(a, &b)).unwrap(), a + b.at(0).unwrap());
        }
    }

    #[test]
    fn identity_stream_code() {
        let c = code_term(&Term::var("y", Type::one()), &[]).unwrap();
        let f = c.functional(&ev_with(ParamEnv::new())).unwrap();
        let b = Oracle1::from_fn(|n| n * 7 + 3);
        assert_eq!(Oracle1::star(&f, &b).prefix(10).unwrap(), b.prefix(10).unwrap());
    }

    #[test]
    fn type2_parameter_application() {
        let sig = Signature::new().with("G", Type::two());
        let t = parse_term("(lam (y 1) (G y))", &sig).unwrap();
        let low = lower_closed(&t, &sig).unwrap();
        let mut env = ParamEnv::new();
        env.insert("G".into(), Value::Functional(Functional2::new("s3*s1", |s| Ok(s.at(3)? * s.at(1)?))));
        let ev = ev_with(env);
        let f = low.value(&ev).unwrap().to_functional().unwrap();
        let b = Oracle1::from_fn(|n| n + 2);
        assert_eq!(f.apply(&b).unwrap(), 15);
        assert!(purity_violations(&low.code().code).is_empty());
    }

    #[test]
    fn closed_examples() {
        let sig = Signature::new();
        let ev = ev_with(ParamEnv::new());
        let t = parse_term("(lam (y 1) (+ (y 2) 1))", &sig).unwrap();
        let f = lower_closed(&t, &sig).unwrap().value(&ev).unwrap().to_functional().unwrap();
        for c in 0..10 {
            let g = Oracle1::from_fn(move |n| n * c);
            assert_eq!(f.apply(&g).unwrap(), 2 * c + 1);
        }
        let id = parse_term("(lam (x 0) x)", &sig).unwrap();
        let s = lower_closed(&id, &sig).unwrap().value(&ev).unwrap().to_stream().unwrap();
        assert_eq!(s.prefix(5).unwrap(), vec![0, 1, 2, 3, 4]);
        let seven = parse_term("((lam (x 0) x) 7)", &sig).unwrap();
        assert_eq!(lower_closed(&seven, &sig).unwrap().value(&ev).unwrap().as_nat().unwrap(), 7);
    }

    #[test]
    fn nested_binders_and_stars() {
        let sig = Signature::new().with("G", Type::two()).with("r", Type::one());
        let src = "(lam (y 1) (G (lam (z 0) (+ ((star G (cat z y)) (y z)) (r 1)))))";
        let t = parse_term(src, &sig).unwrap();
        let mut env = ParamEnv::new();
        env.insert("G".into(), Value::Functional(Functional2::new("s0+2s2", |s| Ok(s.at(0)? + 2 * s.at(2)?))));
        env.insert("r".into(), Value::Stream(Oracle1::from_fn(|n| 10 * n)));
        let ev = ev_with(env);
        let direct = ev.eval(&t).unwrap().to_functional().unwrap();
        let low = lower_closed(&t, &sig).unwrap();
        assert!(purity_violations(&low.code().code).is_empty(), "{:?}", low.code().code);
        let f = low.value(&ev).unwrap().to_functional().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..20 {
            let b = random_stream(&mut rng);
            assert_eq!(direct.apply(&b).unwrap(), f.apply(&b).unwrap());
        }
    }

    #[test]
    fn helper_laws() {
        let r = Oracle1::from_fn(|n| n * n + 1);
        let ev = ev_with(ParamEnv::new());
        for n in 0..6 {
            let p = ev.eval(&helpers::shift_term(n)).unwrap().to_functional().unwrap();
            let direct = Oracle1::star(&p, &r);
            let sem = Oracle1::star(&helpers::shift(n), &r);
            for i in 0..30 {
                assert_eq!(direct.at(i).unwrap(), r.at(n + i).unwrap());
                assert_eq!(sem.at(i).unwrap(), r.at(n + i).unwrap());
            }
        }
        let perm = [2, 0, 1];
        let t = ev.eval(&helpers::permute_term(&perm)).unwrap().to_functional().unwrap();
        for f in [t, helpers::permute(&perm)] {
            let s = Oracle1::star(&f, &r);
            let want: Vec<u64> = (0..8u64).map(|i| r.at(if i < 3 { perm[i as usize] } else { i }).unwrap()).collect();
            assert_eq!(s.prefix(8).unwrap(), want);
        }
        let w = crate::eval::encode_args(&[Value::Nat(4), Value::Stream(r.clone())]).unwrap();
        assert_eq!(Oracle1::star(&helpers::projection(1, 2), &w).prefix(5).unwrap(), r.prefix(5).unwrap());
        assert_eq!(Oracle1::star(&helpers::projection(0, 2), &w).prefix(3).unwrap(), vec![4, 4, 4]);
    }

    #[test]
    fn witness_examples() {
        let ev = ev_with(ParamEnv::new());
        let x = Term::var("x", Type::Zero);
        let y0 = Term::app(Term::var("y", Type::one()), nat(0));
        let eq = Formula0::Eq(x.clone(), y0.clone());
        let w = qf_ac_witness(&eq, "y", "x", DEFAULT_SEARCH_BOUND).unwrap();
        let g = w.functional(&ev).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let b = random_stream(&mut rng);
            assert_eq!(g.apply(&b).unwrap(), b.at(0).unwrap());
        }
        let sq = |t: Term| Term::times(t.clone(), t);
        let phi = Formula0::and(
            Formula0::not(Formula0::Lt(y0.clone(), sq(x.clone()))),
            Formula0::Lt(y0.clone(), sq(Term::succ(x.clone()))),
        );
        let g = qf_ac_witness(&phi, "y", "x", DEFAULT_SEARCH_BOUND).unwrap().functional(&ev).unwrap();
        for v in 0..200u64 {
            let isqrt = (0..=v).take_while(|k| k * k <= v).last().unwrap();
            assert_eq!(g.apply(&Oracle1::constant(v)).unwrap(), isqrt);
        }
        let triv = qf_ac_witness(&Formula0::Eq(nat(0), nat(0)), "y", "x", 10).unwrap();
        assert_eq!(triv.functional(&ev).unwrap().apply(&Oracle1::constant(3)).unwrap(), 0);
        let never = qf_ac_witness(&Formula0::Lt(x.clone(), nat(0)), "y", "x", 10).unwrap();
        let fs = never.functionals(&ev).unwrap();
        assert_eq!(never.choose(&fs, &Oracle1::constant(0)), Err(LowerError::WitnessSearchExhausted(10)));
    }
}
