use std::fmt;

use super::constructions::{encode_args, pair_streams, prim_rec, project_arg};
use super::{EvalError, Evaluator, Functional2, Oracle1, Value};
use crate::term::{Name, Term, Type};

/// A free variable of a Σ⁰₀ formula.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FormulaVar {
    Nat(Name),
    Real(Name),
}

impl FormulaVar {
    pub fn name(&self) -> &Name {
        match self {
            FormulaVar::Nat(n) | FormulaVar::Real(n) => n,
        }
    }

    fn ty(&self) -> Type {
        match self {
            FormulaVar::Nat(_) => Type::Zero,
            FormulaVar::Real(_) => Type::one(),
        }
    }
}

/// Bounded-quantifier formulas over type-0 terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula0 {
    True,
    Eq(Term, Term),
    Lt(Term, Term),
    Not(Box<Formula0>),
    And(Box<Formula0>, Box<Formula0>),
    Or(Box<Formula0>, Box<Formula0>),
    /// `∃ var < bound. body`
    Exists {
        var: Name,
        bound: Term,
        body: Box<Formula0>,
    },
    /// `∀ var < bound. body`
    Forall {
        var: Name,
        bound: Term,
        body: Box<Formula0>,
    },
}

impl Formula0 {
    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula0) -> Self {
        Formula0::Not(Box::new(a))
    }
    pub fn and(a: Formula0, b: Formula0) -> Self {
        Formula0::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Formula0, b: Formula0) -> Self {
        Formula0::Or(Box::new(a), Box::new(b))
    }
    pub fn exists(var: &str, bound: Term, body: Formula0) -> Self {
        Formula0::Exists { var: var.into(), bound, body: Box::new(body) }
    }
    pub fn forall(var: &str, bound: Term, body: Formula0) -> Self {
        Formula0::Forall { var: var.into(), bound, body: Box::new(body) }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula0::True | Formula0::Eq(..) | Formula0::Lt(..) => 0,
            Formula0::Not(a) => 1 + a.depth(),
            Formula0::And(a, b) | Formula0::Or(a, b) => 1 + a.depth().max(b.depth()),
            Formula0::Exists { body, .. } | Formula0::Forall { body, .. } => 1 + body.depth(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula0::True | Formula0::Eq(..) | Formula0::Lt(..) => true,
            Formula0::Not(a) => a.is_quantifier_free(),
            Formula0::And(a, b) | Formula0::Or(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            Formula0::Exists { .. } | Formula0::Forall { .. } => false,
        }
    }

    /// Maximal terms, left to right.
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Formula0::True => vec![],
            Formula0::Eq(a, b) | Formula0::Lt(a, b) => vec![a, b],
            Formula0::Not(a) => a.terms(),
            Formula0::And(a, b) | Formula0::Or(a, b) => {
                let mut v = a.terms();
                v.extend(b.terms());
                v
            }
            Formula0::Exists { bound, body, .. } | Formula0::Forall { bound, body, .. } => {
                let mut v = vec![bound];
                v.extend(body.terms());
                v
            }
        }
    }
}

impl fmt::Display for Formula0 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula0::True => f.write_str("true"),
            Formula0::Eq(a, b) => write!(f, "(= {a} {b})"),
            Formula0::Lt(a, b) => write!(f, "(< {a} {b})"),
            Formula0::Not(a) => write!(f, "(not {a})"),
            Formula0::And(a, b) => write!(f, "(and {a} {b})"),
            Formula0::Or(a, b) => write!(f, "(or {a} {b})"),
            Formula0::Exists { var, bound, body } => write!(f, "(exists ({var} {bound}) {body})"),
            Formula0::Forall { var, bound, body } => write!(f, "(forall ({var} {bound}) {body})"),
        }
    }
}

fn ill<T>(msg: String) -> Result<T, EvalError> {
    Err(EvalError::IllFormedFormula(msg))
}

fn check_term(t: &Term, scope: &[FormulaVar]) -> Result<(), EvalError> {
    for x in t.free_vars() {
        if !scope.iter().any(|v| v.name() == &x) {
            return ill(format!("variable {x} is not in scope"));
        }
    }
    let mut bad = None;
    t.visit(&mut |s| {
        if let Term::Var(x, ty) = s {
            if let Some(v) = scope.iter().find(|v| v.name() == x) {
                if &v.ty() != ty && t.has_free_var(x) {
                    bad = Some(x.clone());
                }
            }
        }
    });
    if let Some(x) = bad {
        return ill(format!("variable {x} used at the wrong type"));
    }
    let sig = crate::normalize::params_sig(t);
    match t.type_in(&sig) {
        Ok(Type::Zero) => Ok(()),
        Ok(ty) => ill(format!("term {t} has type {ty}, not 0")),
        Err(e) => ill(e.to_string()),
    }
}

fn check(phi: &Formula0, scope: &mut Vec<FormulaVar>) -> Result<(), EvalError> {
    match phi {
        Formula0::True => Ok(()),
        Formula0::Eq(a, b) | Formula0::Lt(a, b) => {
            check_term(a, scope)?;
            check_term(b, scope)
        }
        Formula0::Not(a) => check(a, scope),
        Formula0::And(a, b) | Formula0::Or(a, b) => {
            check(a, scope)?;
            check(b, scope)
        }
        Formula0::Exists { var, bound, body } | Formula0::Forall { var, bound, body } => {
            check_term(bound, scope)?;
            if scope.iter().any(|v| v.name() == var) {
                return ill(format!("quantified variable {var} shadows another variable"));
            }
            scope.insert(0, FormulaVar::Nat(var.clone()));
            let r = check(body, scope);
            scope.remove(0);
            r
        }
    }
}

/// Rejects formulas with out-of-scope or mistyped variables, or with more
/// than one type-1 variable.
pub fn validate(phi: &Formula0, vars: &[FormulaVar]) -> Result<(), EvalError> {
    if vars.iter().filter(|v| matches!(v, FormulaVar::Real(_))).count() > 1 {
        return ill("more than one type-1 variable".into());
    }
    for (i, v) in vars.iter().enumerate() {
        if vars[..i].iter().any(|w| w.name() == v.name()) {
            return ill(format!("variable {} listed twice", v.name()));
        }
    }
    check(phi, &mut vars.to_vec())
}

fn eval_term(ev: &Evaluator, t: &Term, bindings: &[(Name, Value)]) -> Result<u64, EvalError> {
    ev.eval_open(t, bindings)?.as_nat()
}

/// Direct recursive truth evaluation.
pub fn holds(phi: &Formula0, bindings: &[(Name, Value)], ev: &Evaluator) -> Result<bool, EvalError> {
    Ok(match phi {
        Formula0::True => true,
        Formula0::Eq(a, b) => eval_term(ev, a, bindings)? == eval_term(ev, b, bindings)?,
        Formula0::Lt(a, b) => eval_term(ev, a, bindings)? < eval_term(ev, b, bindings)?,
        Formula0::Not(a) => !holds(a, bindings, ev)?,
        Formula0::And(a, b) => holds(a, bindings, ev)? && holds(b, bindings, ev)?,
        Formula0::Or(a, b) => holds(a, bindings, ev)? || holds(b, bindings, ev)?,
        Formula0::Exists { var, bound, body } | Formula0::Forall { var, bound, body } => {
            let n = eval_term(ev, bound, bindings)?;
            let want = matches!(phi, Formula0::Exists { .. });
            let mut inner = bindings.to_vec();
            inner.push((var.clone(), Value::Nat(0)));
            for x in 0..n {
                ev.fuel().tick()?;
                *inner.last_mut().expect("just pushed") = (var.clone(), Value::Nat(x));
                if holds(body, &inner, ev)? == want {
                    return Ok(want);
                }
            }
            !want
        }
    })
}

fn decode(r: &Oracle1, vars: &[FormulaVar]) -> Result<Vec<(Name, Value)>, EvalError> {
    vars.iter()
        .enumerate()
        .map(|(i, v)| {
            let c = project_arg(r, i, vars.len());
            Ok(match v {
                FormulaVar::Nat(n) => (n.clone(), Value::Nat(c.at(0)?)),
                FormulaVar::Real(n) => (n.clone(), Value::Stream(c)),
            })
        })
        .collect()
}

fn term_functional(t: &Term, vars: &[FormulaVar], ev: &Evaluator) -> Functional2 {
    let (t, vars, ev) = (t.clone(), vars.to_vec(), ev.clone());
    Functional2::new(t.to_string(), move |r| eval_term(&ev, &t, &decode(r, &vars)?))
}

fn build(phi: &Formula0, vars: &[FormulaVar], ev: &Evaluator) -> Functional2 {
    let label = phi.to_string();
    match phi {
        Formula0::True => Functional2::constant(1),
        Formula0::Eq(a, b) | Formula0::Lt(a, b) => {
            let fa = term_functional(a, vars, ev);
            let fb = term_functional(b, vars, ev);
            let eq = matches!(phi, Formula0::Eq(..));
            Functional2::new(label, move |r| {
                let (x, y) = (fa.apply(r)?, fb.apply(r)?);
                Ok(u64::from(if eq { x == y } else { x < y }))
            })
        }
        Formula0::Not(a) => {
            let fa = build(a, vars, ev);
            Functional2::new(label, move |r| Ok(1 - fa.apply(r)?.min(1)))
        }
        Formula0::And(a, b) => {
            let (fa, fb) = (build(a, vars, ev), build(b, vars, ev));
            Functional2::new(label, move |r| Ok(fa.apply(r)?.min(1) * fb.apply(r)?.min(1)))
        }
        Formula0::Or(a, b) => {
            let (fa, fb) = (build(a, vars, ev), build(b, vars, ev));
            Functional2::new(label, move |r| Ok(fa.apply(r)?.max(fb.apply(r)?).min(1)))
        }
        Formula0::Exists { var, bound, body } => {
            let f = term_functional(bound, vars, ev);
            let mut inner = vec![FormulaVar::Nat(var.clone())];
            inner.extend(vars.iter().cloned());
            let g = build(body, &inner, ev);
            let empty = vars.is_empty();
            let fuel = ev.fuel().clone();
            // H(r) = R₀(0, ⟨a,k⟩ ↦ a + G(⟨k̃, r⟩))(F(r)),  I(r) = [H(r) > 0]
            Functional2::new(label, move |r| {
                let (g, r2, fuel) = (g.clone(), r.clone(), fuel.clone());
                let h = prim_rec(0, move |a, k| {
                    fuel.tick()?;
                    let kk = Oracle1::constant(k);
                    let arg = if empty { kk } else { pair_streams(&kk, &r2) };
                    Ok(a.wrapping_add(g.apply(&arg)?))
                });
                Ok(u64::from(h.at(f.apply(r)?)? > 0))
            })
        }
        Formula0::Forall { var, bound, body } => {
            let dual = Formula0::not(Formula0::Exists {
                var: var.clone(),
                bound: bound.clone(),
                body: Box::new(Formula0::not((**body).clone())),
            });
            build(&dual, vars, ev)
        }
    }
}

/// A functional `F` with `F(⟨ā⟩_ℝ) = 1` iff `φ(ā)`, and `0` otherwise.
/// Bounded existentials go through the counting functional built by
/// primitive recursion; universals through their dual.
pub fn represent_formula(phi: &Formula0, vars: &[FormulaVar], ev: &Evaluator) -> Result<Functional2, EvalError> {
    validate(phi, vars)?;
    Ok(build(phi, vars, ev))
}

/// Applies a representing functional to concrete arguments.
pub fn apply_represented(f: &Functional2, args: &[Value]) -> Result<u64, EvalError> {
    f.apply(&encode_args(args)?)
}
