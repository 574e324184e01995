//! Normalization of well-typed terms.
//!
//! Three kinds of redex are contracted:
//! - β: `(λx.b) a → b[a/x]`
//! - `*`-unfolding: `(λw¹.b) * r → λk⁰. b[(k⌢r)/w]`, the defining equation
//!   of `*` read extensionally; without it a normal term of type 2 could
//!   carry a second type-1 binder inside `*`.
//! - literal arithmetic: `(+ 2 3) → 5` and likewise for `*`, `succ`, `<`.
//!
//! The rules do not overlap, so every strategy reaches the same normal form
//! up to bound-variable names; results are returned with canonical binder
//! names.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::term::{Name, Signature, Term, Type};

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NormalizeError {
    #[error("StepBudgetExceeded: no normal form within {0} steps")]
    StepBudgetExceeded(u64),
    #[error("TypeMismatch: {0}")]
    TypeMismatch(String),
    #[error("NotNormal: {0}")]
    NotNormal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    LeftmostOutermost,
    RightmostInnermost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepKind {
    Beta,
    StarUnfold,
    Arith,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Beta => "beta",
            StepKind::StarUnfold => "star",
            StepKind::Arith => "arith",
        })
    }
}

/// Child indices from the root; a λ has its body at index 0.
pub type Path = Vec<usize>;

pub fn path_string(p: &[usize]) -> String {
    if p.is_empty() {
        return "root".into();
    }
    p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

#[derive(Debug, Clone)]
pub struct Step {
    pub path: Path,
    pub kind: StepKind,
    pub after: Term,
}

#[derive(Debug, Clone, Default)]
pub struct ReductionTrace {
    /// Recorded only when requested; `count` is always kept.
    pub steps: Vec<Step>,
    pub count: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub strategy: Strategy,
    pub budget: u64,
    pub record: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { strategy: Strategy::LeftmostOutermost, budget: DEFAULT_STEP_BUDGET, record: false }
    }
}

static FRESH: AtomicU64 = AtomicU64::new(0);

/// A name that cannot collide with any parsed identifier.
pub(crate) fn fresh(base: &str) -> Name {
    let stem = base.split('#').next().unwrap_or(base);
    let n = FRESH.fetch_add(1, Ordering::Relaxed);
    format!("{stem}#{n}").into()
}

fn free_in(t: &Term) -> BTreeSet<Name> {
    t.free_vars()
}

fn rename(t: &Arc<Term>, from: &str, to: &Name) -> Arc<Term> {
    match &**t {
        Term::Var(x, ty) if &**x == from => Arc::new(Term::Var(to.clone(), ty.clone())),
        Term::Lam(x, _, _) if &**x == from => t.clone(),
        _ if !t.has_free_var(from) => t.clone(),
        _ => {
            let kids = t.children().into_iter().map(|c| rename(c, from, to)).collect();
            Arc::new(t.with_children(kids))
        }
    }
}

fn subst_arc(t: &Arc<Term>, x: &str, s: &Arc<Term>, fv_s: &BTreeSet<Name>) -> Arc<Term> {
    match &**t {
        Term::Var(y, _) if &**y == x => s.clone(),
        _ if !t.has_free_var(x) => t.clone(),
        Term::Lam(y, ty, b) => {
            if fv_s.contains(y) {
                let y2 = fresh(y);
                let b2 = rename(b, y, &y2);
                Arc::new(Term::Lam(y2, ty.clone(), subst_arc(&b2, x, s, fv_s)))
            } else {
                Arc::new(Term::Lam(y.clone(), ty.clone(), subst_arc(b, x, s, fv_s)))
            }
        }
        _ => {
            let kids = t.children().into_iter().map(|c| subst_arc(c, x, s, fv_s)).collect();
            Arc::new(t.with_children(kids))
        }
    }
}

fn first_free_type(t: &Term, x: &str) -> Option<Type> {
    match t {
        Term::Var(y, ty) if &**y == x => Some(ty.clone()),
        Term::Lam(y, _, _) if &**y == x => None,
        _ => t.children().into_iter().find_map(|c| first_free_type(c, x)),
    }
}

/// Capture-avoiding substitution of `s` for the free occurrences of `x`.
pub fn substitute(t: &Term, x: &str, s: &Term) -> Result<Term, NormalizeError> {
    if let Some(want) = first_free_type(t, x) {
        let got = s.type_in(&params_sig(s)).map_err(|e| NormalizeError::TypeMismatch(e.to_string()))?;
        if got != want {
            return Err(NormalizeError::TypeMismatch(format!("{x} has type {want}, substituted term has type {got}")));
        }
    }
    let s = Arc::new(s.clone());
    let fv = free_in(&s);
    Ok((*subst_arc(&Arc::new(t.clone()), x, &s, &fv)).clone())
}

/// A signature declaring each parameter at the type it is used with.
pub(crate) fn params_sig(t: &Term) -> Signature {
    let mut sig = Signature::new();
    t.visit(&mut |u| {
        if let Term::Param(n, ty) = u {
            sig.declare(n, ty.clone());
        }
    });
    sig
}

fn redex_kind(t: &Term) -> Option<StepKind> {
    match t {
        Term::App(f, _) if matches!(**f, Term::Lam(..)) => Some(StepKind::Beta),
        Term::Star(f, _) if matches!(**f, Term::Lam(..)) => Some(StepKind::StarUnfold),
        Term::Plus(a, b) | Term::Times(a, b) | Term::Less(a, b)
            if matches!((&**a, &**b), (Term::Nat(_), Term::Nat(_))) =>
        {
            Some(StepKind::Arith)
        }
        Term::Succ(a) if matches!(**a, Term::Nat(_)) => Some(StepKind::Arith),
        _ => None,
    }
}

fn contract(t: &Term) -> Term {
    match t {
        Term::App(f, a) => match &**f {
            Term::Lam(x, _, b) => (*subst_arc(b, x, a, &free_in(a))).clone(),
            _ => unreachable!("not a redex"),
        },
        Term::Star(f, r) => match &**f {
            Term::Lam(w, _, b) => {
                let k = fresh("k");
                let kr = Arc::new(Term::Concat(Arc::new(Term::Var(k.clone(), Type::Zero)), r.clone()));
                Term::Lam(k, Type::Zero, subst_arc(b, w, &kr, &free_in(&kr)))
            }
            _ => unreachable!("not a redex"),
        },
        Term::Plus(a, b) | Term::Times(a, b) | Term::Less(a, b) => {
            let (Term::Nat(x), Term::Nat(y)) = (&**a, &**b) else { unreachable!("not a redex") };
            Term::Nat(match t {
                Term::Plus(..) => x.wrapping_add(*y),
                Term::Times(..) => x.wrapping_mul(*y),
                _ => u64::from(x < y),
            })
        }
        Term::Succ(a) => match &**a {
            Term::Nat(x) => Term::Nat(x.wrapping_add(1)),
            _ => unreachable!("not a redex"),
        },
        _ => unreachable!("not a redex"),
    }
}

fn find_lo(t: &Term, path: &mut Path) -> bool {
    if redex_kind(t).is_some() {
        return true;
    }
    for (i, c) in t.children().into_iter().enumerate() {
        path.push(i);
        if find_lo(c, path) {
            return true;
        }
        path.pop();
    }
    false
}

fn find_ri(t: &Term, path: &mut Path) -> bool {
    for (i, c) in t.children().into_iter().enumerate().rev() {
        path.push(i);
        if find_ri(c, path) {
            return true;
        }
        path.pop();
    }
    redex_kind(t).is_some()
}

/// The position of the next redex under `strategy`.
pub fn find_redex(t: &Term, strategy: Strategy) -> Option<Path> {
    let mut p = Vec::new();
    let found = match strategy {
        Strategy::LeftmostOutermost => find_lo(t, &mut p),
        Strategy::RightmostInnermost => find_ri(t, &mut p),
    };
    found.then_some(p)
}

fn subterm_at<'a>(t: &'a Term, path: &[usize]) -> &'a Term {
    path.iter().fold(t, |u, &i| &**u.children()[i])
}

fn replace_at(t: &Term, path: &[usize], f: &impl Fn(&Term) -> Term) -> Term {
    match path.split_first() {
        None => f(t),
        Some((&i, rest)) => {
            let mut kids: Vec<Arc<Term>> = t.children().into_iter().cloned().collect();
            kids[i] = Arc::new(replace_at(&kids[i], rest, f));
            t.with_children(kids)
        }
    }
}

/// Contracts one redex; `None` when `t` is normal.
pub fn step(t: &Term, strategy: Strategy) -> Option<(Path, StepKind, Term)> {
    let path = find_redex(t, strategy)?;
    let kind = redex_kind(subterm_at(t, &path)).expect("redex at path");
    Some((path.clone(), kind, replace_at(t, &path, &contract)))
}

pub fn normalize_with(t: &Term, opts: Options) -> Result<(Term, ReductionTrace), NormalizeError> {
    let mut cur = t.clone();
    let mut trace = ReductionTrace::default();
    while let Some((path, kind, next)) = step(&cur, opts.strategy) {
        if trace.count >= opts.budget {
            return Err(NormalizeError::StepBudgetExceeded(opts.budget));
        }
        trace.count += 1;
        if opts.record {
            trace.steps.push(Step { path, kind, after: next.clone() });
        }
        cur = next;
    }
    let out = canonicalize(&cur);
    if opts.record {
        for s in &mut trace.steps {
            s.after = canonicalize(&s.after);
        }
    }
    Ok((out, trace))
}

/// Leftmost-outermost normalization with the default budget.
pub fn normalize(t: &Term) -> Result<(Term, ReductionTrace), NormalizeError> {
    normalize_with(t, Options::default())
}

pub fn normal_form(t: &Term) -> Result<Term, NormalizeError> {
    normalize(t).map(|(n, _)| n)
}

/// No β-redex `(λx.s) u` anywhere.
pub fn is_beta_normal(t: &Term) -> bool {
    let mut ok = true;
    t.visit(&mut |u| {
        if matches!(u, Term::App(f, _) if matches!(**f, Term::Lam(..))) {
            ok = false;
        }
    });
    ok
}

/// No redex of any kind the normalizer contracts.
pub fn is_normal(t: &Term) -> bool {
    find_redex(t, Strategy::LeftmostOutermost).is_none()
}

/// Renames every binder to `v0, v1, …` in preorder, skipping names that
/// occur free or as parameters. Distinct binders get distinct names.
pub fn canonicalize(t: &Term) -> Term {
    let mut avoid: BTreeSet<Name> = t.free_vars();
    avoid.extend(t.params());
    let mut next = 0u64;
    let mut map: Vec<(Name, Name)> = Vec::new();
    canon(t, &avoid, &mut next, &mut map)
}

fn canon(t: &Term, avoid: &BTreeSet<Name>, next: &mut u64, map: &mut Vec<(Name, Name)>) -> Term {
    match t {
        Term::Var(x, ty) => match map.iter().rev().find(|(o, _)| o == x) {
            Some((_, n)) => Term::Var(n.clone(), ty.clone()),
            None => t.clone(),
        },
        Term::Lam(x, ty, b) => {
            let name: Name = loop {
                let cand: Name = format!("v{next}").into();
                *next += 1;
                if !avoid.contains(&cand) {
                    break cand;
                }
            };
            map.push((x.clone(), name.clone()));
            let b2 = canon(b, avoid, next, map);
            map.pop();
            Term::Lam(name, ty.clone(), Arc::new(b2))
        }
        _ => {
            let kids = t.children().into_iter().map(|c| Arc::new(canon(c, avoid, next, map))).collect();
            t.with_children(kids)
        }
    }
}

/// Equality up to renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, env: &mut Vec<(Name, Name)>) -> bool {
        match (a, b) {
            (Term::Var(x, tx), Term::Var(y, ty)) => {
                tx == ty
                    && match env.iter().rev().find(|(p, q)| p == x || q == y) {
                        Some((p, q)) => p == x && q == y,
                        None => x == y,
                    }
            }
            (Term::Lam(x, tx, ba), Term::Lam(y, ty, bb)) => {
                if tx != ty {
                    return false;
                }
                env.push((x.clone(), y.clone()));
                let r = go(ba, bb, env);
                env.pop();
                r
            }
            (Term::Lam(..), _) | (_, Term::Lam(..)) => false,
            _ => {
                std::mem::discriminant(a) == std::mem::discriminant(b)
                    && match (a, b) {
                        (Term::Nat(x), Term::Nat(y)) => x == y,
                        (Term::Param(x, tx), Term::Param(y, ty)) => x == y && tx == ty,
                        _ => {
                            let (ka, kb) = (a.children(), b.children());
                            ka.len() == kb.len() && ka.iter().zip(kb).all(|(p, q)| go(p, q, env))
                        }
                    }
            }
        }
    }
    go(a, b, &mut Vec::new())
}

/// One flag per structural property of normal forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureReport {
    pub subterms_normal: bool,
    pub subterms_standard_type: bool,
    pub bound_vars_type0: bool,
    pub at_most_one_type1_binder: bool,
    pub subterm_types_le_2: bool,
}

impl StructureReport {
    /// Names of the flags that are required for a term of type `ty` and fail.
    pub fn violations(&self, ty: &Type) -> Vec<&'static str> {
        let mut v = Vec::new();
        if !self.subterms_normal {
            v.push("subterms_normal");
        }
        if ty.is_standard() && !self.subterms_standard_type {
            v.push("subterms_standard_type");
        }
        if ty.is_le(1) && !self.bound_vars_type0 {
            v.push("bound_vars_type0");
        }
        if ty.level() == Some(2) && !self.at_most_one_type1_binder {
            v.push("at_most_one_type1_binder");
        }
        if ty.is_le(2) && !self.subterm_types_le_2 {
            v.push("subterm_types_le_2");
        }
        v
    }
}

fn collect_types(t: &Term, sig: &Signature, out: &mut Vec<Type>) -> Type {
    let ty = t.type_in(sig).expect("well-typed term");
    out.push(ty.clone());
    for c in t.children() {
        collect_types(c, sig, out);
    }
    ty
}

/// Checks the structural facts about a normal term. Parameters are taken at
/// the types they are used with.
pub fn check_normal_structure(t: &Term) -> Result<StructureReport, NormalizeError> {
    if !is_beta_normal(t) {
        return Err(NormalizeError::NotNormal(t.to_string()));
    }
    let sig = params_sig(t);
    let mut types = Vec::new();
    collect_types(t, &sig, &mut types);
    let mut binders = Vec::new();
    t.visit(&mut |u| {
        if let Term::Lam(_, ty, _) = u {
            binders.push(ty.clone());
        }
    });
    Ok(StructureReport {
        subterms_normal: is_normal(t),
        subterms_standard_type: types.iter().all(Type::is_standard),
        bound_vars_type0: binders.iter().all(|b| *b == Type::Zero),
        at_most_one_type1_binder: binders.iter().filter(|b| b.level() == Some(1)).count() <= 1,
        subterm_types_le_2: types.iter().all(|ty| ty.is_le(2)),
    })
}

/// `Π = λx^σ.λy^τ. y`, implementing the combinator axiom `Π X Y = Y`
/// exactly as stated (the usual K returns `X`).
pub fn pi_combinator(sigma: &Type, tau: &Type) -> Term {
    Term::lam("x", sigma.clone(), Term::lam("y", tau.clone(), Term::var("y", tau.clone())))
}

/// `Σ = λx^{ρ→σ→τ}.λy^{ρ→σ}.λz^ρ. x z (y z)`.
pub fn sigma_combinator(rho: &Type, sigma: &Type, tau: &Type) -> Term {
    let tx = Type::arrow(rho.clone(), Type::arrow(sigma.clone(), tau.clone()));
    let ty = Type::arrow(rho.clone(), sigma.clone());
    let x = Term::var("x", tx.clone());
    let y = Term::var("y", ty.clone());
    let z = Term::var("z", rho.clone());
    let body = Term::app(Term::app(x, z.clone()), Term::app(y, z));
    Term::lam("x", tx, Term::lam("y", ty, Term::lam("z", rho.clone(), body)))
}

/// Prints a trace one step per line.
pub fn format_trace(trace: &ReductionTrace) -> String {
    let mut out = String::new();
    for (i, s) in trace.steps.iter().enumerate() {
        out.push_str(&format!("{} {} {} {}\n", i + 1, s.kind, path_string(&s.path), s.after));
    }
    out
}

/// No λx occurs inside the scope of another λx.
pub fn has_unique_binders_on_paths(t: &Term) -> bool {
    fn go(t: &Term, seen: &mut HashSet<Name>) -> bool {
        if let Term::Lam(x, _, b) = t {
            if !seen.insert(x.clone()) {
                return false;
            }
            let ok = go(b, seen);
            seen.remove(x);
            return ok;
        }
        t.children().into_iter().all(|c| go(c, seen))
    }
    go(t, &mut HashSet::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse_term, type_of};

    fn zero() -> Type {
        Type::Zero
    }

    fn sig() -> Signature {
        Signature::new().with("F", Type::two()).with("r", Type::one()).with("n", zero())
    }

    fn p(s: &str) -> Term {
        parse_term(s, &sig()).unwrap()
    }

    #[test]
    fn beta_then_arith() {
        let (n, tr) = normalize(&p("((lam (x 0) (+ x 1)) 2)")).unwrap();
        assert_eq!(n, Term::nat(3));
        assert_eq!(tr.count, 2);
    }

    #[test]
    fn substitution_examples() {
        let x = Term::var("x", zero());
        let t = substitute(&Term::plus(x.clone(), Term::nat(1)), "x", &Term::nat(2)).unwrap();
        assert_eq!(t, Term::plus(Term::nat(2), Term::nat(1)));
        let lam = Term::lam("y", zero(), x.clone());
        let z = Term::var("z", zero());
        assert_eq!(substitute(&lam, "x", &z).unwrap(), Term::lam("y", zero(), z.clone()));
        let y = Term::var("y", zero());
        assert_eq!(substitute(&y, "x", &Term::nat(9)).unwrap(), y);
        assert!(matches!(substitute(&x, "x", &Term::param("r", Type::one())), Err(NormalizeError::TypeMismatch(_))));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (λy. x + y)[y/x] must not capture.
        let x = Term::var("x", zero());
        let y = Term::var("y", zero());
        let t = Term::lam("y", zero(), Term::plus(x, y.clone()));
        let s = substitute(&t, "x", &y).unwrap();
        let Term::Lam(b, _, body) = &s else { panic!() };
        assert_ne!(&**b, "y");
        assert!(body.has_free_var("y"));
    }

    #[test]
    fn normal_predicates() {
        assert!(is_normal(&p("(lam (x 0) x)")));
        assert!(!is_normal(&p("((lam (x 0) x) 0)")));
        assert!(is_normal(&p("(star F r)")));
        assert!(!is_normal(&p("(star (lam (s 1) (s 0)) r)")));
        assert!(is_beta_normal(&p("(star (lam (s 1) (s 0)) r)")));
    }

    #[test]
    fn star_unfolding() {
        let (n, _) = normalize(&p("(lam (y 1) ((star (lam (s 1) (+ (s 0) (s 1))) y) 3))")).unwrap();
        assert_eq!(n.to_string(), "(lam (v0 (-> 0 0)) (+ ((cat 3 v0) 0) ((cat 3 v0) 1)))");
        assert!(check_normal_structure(&n).unwrap().at_most_one_type1_binder);
    }

    #[test]
    fn strategies_agree() {
        let t = p("((lam (f 1) (+ (f 1) (f 2))) (lam (z 0) (* z ((lam (w 0) (succ w)) n))))");
        let lo = normalize_with(&t, Options { strategy: Strategy::LeftmostOutermost, ..Default::default() }).unwrap().0;
        let ri =
            normalize_with(&t, Options { strategy: Strategy::RightmostInnermost, ..Default::default() }).unwrap().0;
        assert_eq!(lo, ri);
        assert!(alpha_eq(&lo, &ri));
        assert_eq!(lo, p("(+ (* 1 (succ n)) (* 2 (succ n)))"));
    }

    #[test]
    fn pi_law() {
        let pi = pi_combinator(&zero(), &Type::one());
        let t = Term::app(Term::app(pi, Term::nat(4)), Term::param("r", Type::one()));
        assert_eq!(normal_form(&t).unwrap(), Term::param("r", Type::one()));
    }

    #[test]
    fn sigma_law() {
        let s = sigma_combinator(&zero(), &zero(), &zero());
        let x = p("(lam (a 0) (lam (b 0) (+ a (* b 2))))");
        let y = p("(lam (c 0) (succ c))");
        let z = Term::param("n", zero());
        let lhs = Term::apps(s, [x.clone(), y.clone(), z.clone()]);
        let rhs = Term::app(Term::app(x, z.clone()), Term::app(y, z));
        assert_eq!(normal_form(&lhs).unwrap(), normal_form(&rhs).unwrap());
    }

    #[test]
    fn structure_flags() {
        let t = p("(lam (y 1) (F y))");
        let rep = check_normal_structure(&t).unwrap();
        assert!(rep.at_most_one_type1_binder);
        assert!(rep.violations(&Type::two()).is_empty());
        let id = p("(lam (x 0) x)");
        assert!(check_normal_structure(&id).unwrap().bound_vars_type0);
        assert!(matches!(check_normal_structure(&p("((lam (x 0) x) 1)")), Err(NormalizeError::NotNormal(_))));
        let two_binders = p("(lam (y 1) (F (lam (x 0) (F (lam (z 0) (y z))))))");
        assert!(check_normal_structure(&two_binders).unwrap().violations(&Type::two()).is_empty());
    }

    #[test]
    fn canonical_names_are_fresh_and_typed() {
        let t = p("((lam (f (-> 0 (-> 0 0))) (lam (a 0) ((f a) a))) (lam (b 0) (lam (c 0) (+ b c))))");
        let n = normal_form(&t).unwrap();
        assert!(has_unique_binders_on_paths(&n));
        assert_eq!(type_of(&n, &sig()).unwrap(), Type::one());
        assert_eq!(n.to_string(), "(lam (v0 0) (+ v0 v0))");
    }

    #[test]
    fn budget_is_enforced() {
        let t = p("((lam (x 0) (+ x x)) ((lam (y 0) y) 1))");
        let opts = Options { budget: 1, ..Default::default() };
        assert_eq!(normalize_with(&t, opts).unwrap_err(), NormalizeError::StepBudgetExceeded(1));
    }

    #[test]
    fn trace_lines() {
        let opts = Options { record: true, ..Default::default() };
        let (_, tr) = normalize_with(&p("((lam (x 0) (+ x 1)) 2)"), opts).unwrap();
        assert_eq!(format_trace(&tr), "1 beta root (+ 2 1)\n2 arith root 3\n");
    }
}
