//! Finite types and the term language: numerals, variables, parameters,
//! application, λ-abstraction, arithmetic, `⌢` and `*`.

mod syntax;
mod ty;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use syntax::{parse_file, parse_term, parse_type, print_file, print_term, TermFile};
pub use ty::Type;

pub type Name = Arc<str>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("SyntaxError at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("TypeMismatch: {0}")]
    TypeMismatch(String),
    #[error("UnboundVariable: {0}")]
    UnboundVariable(String),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Nat(u64),
    Var(Name, Type),
    Param(Name, Type),
    App(Arc<Term>, Arc<Term>),
    Lam(Name, Type, Arc<Term>),
    Plus(Arc<Term>, Arc<Term>),
    Times(Arc<Term>, Arc<Term>),
    Succ(Arc<Term>),
    /// `1` if the left side is smaller, else `0`.
    Less(Arc<Term>, Arc<Term>),
    /// `k ⌢ r`
    Concat(Arc<Term>, Arc<Term>),
    /// `F * r`
    Star(Arc<Term>, Arc<Term>),
}

/// Declared parameter types.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    params: BTreeMap<Name, Type>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &str, ty: Type) -> Self {
        self.declare(name, ty);
        self
    }

    pub fn declare(&mut self, name: &str, ty: Type) {
        self.params.insert(name.into(), ty);
    }

    pub fn get(&self, name: &str) -> Option<&Type> {
        self.params.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &Type)> {
        self.params.iter()
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }
}

impl Term {
    pub fn nat(n: u64) -> Term {
        Term::Nat(n)
    }
    pub fn var(name: &str, ty: Type) -> Term {
        Term::Var(name.into(), ty)
    }
    pub fn param(name: &str, ty: Type) -> Term {
        Term::Param(name.into(), ty)
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }
    /// Left-associated application `f a1 a2 …`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }
    pub fn lam(x: &str, ty: Type, body: Term) -> Term {
        Term::Lam(x.into(), ty, Arc::new(body))
    }
    pub fn plus(a: Term, b: Term) -> Term {
        Term::Plus(Arc::new(a), Arc::new(b))
    }
    pub fn times(a: Term, b: Term) -> Term {
        Term::Times(Arc::new(a), Arc::new(b))
    }
    pub fn succ(a: Term) -> Term {
        Term::Succ(Arc::new(a))
    }
    pub fn less(a: Term, b: Term) -> Term {
        Term::Less(Arc::new(a), Arc::new(b))
    }
    pub fn concat(k: Term, r: Term) -> Term {
        Term::Concat(Arc::new(k), Arc::new(r))
    }
    pub fn star(f: Term, r: Term) -> Term {
        Term::Star(Arc::new(f), Arc::new(r))
    }

    /// Immediate subterms, left to right.
    pub fn children(&self) -> Vec<&Arc<Term>> {
        match self {
            Term::Nat(_) | Term::Var(..) | Term::Param(..) => vec![],
            Term::Lam(_, _, b) | Term::Succ(b) => vec![b],
            Term::App(a, b)
            | Term::Plus(a, b)
            | Term::Times(a, b)
            | Term::Less(a, b)
            | Term::Concat(a, b)
            | Term::Star(a, b) => vec![a, b],
        }
    }

    /// Rebuilds this node with new immediate subterms (same arity).
    pub fn with_children(&self, mut kids: Vec<Arc<Term>>) -> Term {
        let mut next = || kids.remove(0);
        match self {
            Term::Nat(_) | Term::Var(..) | Term::Param(..) => self.clone(),
            Term::Lam(x, ty, _) => Term::Lam(x.clone(), ty.clone(), next()),
            Term::Succ(_) => Term::Succ(next()),
            Term::App(..) => Term::App(next(), next()),
            Term::Plus(..) => Term::Plus(next(), next()),
            Term::Times(..) => Term::Times(next(), next()),
            Term::Less(..) => Term::Less(next(), next()),
            Term::Concat(..) => Term::Concat(next(), next()),
            Term::Star(..) => Term::Star(next(), next()),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        collect_free(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn has_free_var(&self, x: &str) -> bool {
        match self {
            Term::Var(y, _) => &**y == x,
            Term::Lam(y, _, b) => &**y != x && b.has_free_var(x),
            _ => self.children().iter().any(|c| c.has_free_var(x)),
        }
    }

    pub fn params(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.visit(&mut |t| {
            if let Term::Param(n, _) = t {
                out.insert(n.clone());
            }
        });
        out
    }

    /// Preorder traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Term)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Type of a term whose free variables carry their own annotation.
    /// Parameters are checked against `sig`.
    pub fn type_in(&self, sig: &Signature) -> Result<Type, TermError> {
        infer(self, sig, &mut Vec::new(), true)
    }
}

fn collect_free(t: &Term, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
    match t {
        Term::Var(x, _) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Lam(x, _, b) => {
            bound.push(x.clone());
            collect_free(b, bound, out);
            bound.pop();
        }
        _ => {
            for c in t.children() {
                collect_free(c, bound, out);
            }
        }
    }
}

fn mismatch<T>(msg: String) -> Result<T, TermError> {
    Err(TermError::TypeMismatch(msg))
}

fn expect(t: &Term, sig: &Signature, scope: &mut Vec<(Name, Type)>, open: bool, want: &Type) -> Result<(), TermError> {
    let got = infer(t, sig, scope, open)?;
    if &got == want {
        Ok(())
    } else {
        mismatch(format!("expected {want}, found {got} in {t}"))
    }
}

fn infer(t: &Term, sig: &Signature, scope: &mut Vec<(Name, Type)>, open: bool) -> Result<Type, TermError> {
    let zero = Type::Zero;
    match t {
        Term::Nat(_) => Ok(zero),
        Term::Var(x, ty) => match scope.iter().rev().find(|(y, _)| y == x) {
            Some((_, bty)) if bty == ty => Ok(ty.clone()),
            Some((_, bty)) => mismatch(format!("variable {x} annotated {ty} but bound at {bty}")),
            None if open => Ok(ty.clone()),
            None => Err(TermError::UnboundVariable(x.to_string())),
        },
        Term::Param(x, ty) => match sig.get(x) {
            Some(d) if d == ty => Ok(ty.clone()),
            Some(d) => mismatch(format!("parameter {x} declared {d} but used at {ty}")),
            None => Err(TermError::UnboundVariable(x.to_string())),
        },
        Term::App(f, a) => {
            let ft = infer(f, sig, scope, open)?;
            let Some((dom, cod)) = ft.split() else {
                return mismatch(format!("{f} has type 0 and cannot be applied"));
            };
            let (dom, cod) = (dom.clone(), cod.clone());
            expect(a, sig, scope, open, &dom)?;
            Ok(cod)
        }
        Term::Lam(x, ty, b) => {
            scope.push((x.clone(), ty.clone()));
            let bt = infer(b, sig, scope, open);
            scope.pop();
            Ok(Type::arrow(ty.clone(), bt?))
        }
        Term::Plus(a, b) | Term::Times(a, b) | Term::Less(a, b) => {
            expect(a, sig, scope, open, &zero)?;
            expect(b, sig, scope, open, &zero)?;
            Ok(zero)
        }
        Term::Succ(a) => {
            expect(a, sig, scope, open, &zero)?;
            Ok(zero)
        }
        Term::Concat(k, r) => {
            expect(k, sig, scope, open, &zero)?;
            expect(r, sig, scope, open, &Type::one())?;
            Ok(Type::one())
        }
        Term::Star(f, r) => {
            expect(f, sig, scope, open, &Type::two())?;
            expect(r, sig, scope, open, &Type::one())?;
            Ok(Type::one())
        }
    }
}

/// The type of `t`; every variable must be bound and every parameter
/// declared.
pub fn type_of(t: &Term, sig: &Signature) -> Result<Type, TermError> {
    infer(t, sig, &mut Vec::new(), false)
}

pub fn is_standard(ty: &Type) -> bool {
    ty.is_standard()
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}
