//! Random well-typed terms for property tests. Redexes are produced at
//! nonstandard intermediate types so normalization has real work to do.

use rand::seq::IndexedRandom;
use rand::Rng;

use crate::term::{Name, Signature, Term, Type};

/// Generator over a fixed parameter signature.
#[derive(Clone, Debug)]
pub struct TermGen {
    params: Vec<(Name, Type)>,
    counter: usize,
    /// Largest numeral produced.
    pub max_literal: u64,
}

/// Parameters `n:0`, `m:0`, `r:1`, `G:2`, `H:2`.
pub fn default_signature() -> Signature {
    Signature::new()
        .with("n", Type::Zero)
        .with("m", Type::Zero)
        .with("r", Type::one())
        .with("G", Type::two())
        .with("H", Type::two())
}

fn min_size(ty: &Type) -> usize {
    match ty {
        Type::Zero => 1,
        Type::Arrow(_, c) => 1 + min_size(c),
    }
}

/// Argument types tried for application nodes.
fn arg_types() -> Vec<Type> {
    let nonstd = Type::arrow(Type::Zero, Type::one());
    vec![Type::Zero, Type::Zero, Type::one(), Type::one(), Type::two(), nonstd]
}

impl TermGen {
    pub fn new(sig: &Signature) -> Self {
        TermGen { params: sig.iter().map(|(n, t)| (n.clone(), t.clone())).collect(), counter: 0, max_literal: 5 }
    }

    fn fresh(&mut self) -> Name {
        self.counter += 1;
        format!("x{}", self.counter - 1).into()
    }

    /// A closed term of type `ty` with at most `size` nodes (at least the
    /// minimal size for `ty`).
    pub fn term<R: Rng>(&mut self, rng: &mut R, ty: &Type, size: usize) -> Term {
        self.counter = 0;
        let size = size.max(min_size(ty));
        self.gen(rng, ty, size, &mut Vec::new())
    }

    /// A random type among 0, 1, 2, 3 and two nonstandard ones.
    pub fn random_type<R: Rng>(rng: &mut R) -> Type {
        let three = Type::standard(3);
        let choices = [
            Type::Zero,
            Type::one(),
            Type::two(),
            three,
            Type::arrow(Type::Zero, Type::one()),
            Type::arrow(Type::one(), Type::one()),
        ];
        choices.choose(rng).expect("nonempty").clone()
    }

    fn bound_leaves(ty: &Type, ctx: &[(Name, Type)]) -> Vec<Term> {
        ctx.iter().filter(|(_, t)| t == ty).map(|(n, t)| Term::Var(n.clone(), t.clone())).collect()
    }

    fn param_leaves(&self, ty: &Type) -> Vec<Term> {
        self.params.iter().filter(|(_, t)| t == ty).map(|(n, t)| Term::Param(n.clone(), t.clone())).collect()
    }

    /// A bound variable, a parameter or a numeral of type `ty`, preferring
    /// the innermost binders.
    fn leaf<R: Rng>(&self, rng: &mut R, ty: &Type, ctx: &[(Name, Type)]) -> Option<Term> {
        let bound = Self::bound_leaves(ty, ctx);
        if !bound.is_empty() && rng.random_bool(0.75) {
            let i = bound.len() - 1 - rng.random_range(0..bound.len()).min(rng.random_range(0..bound.len()));
            return Some(bound[i].clone());
        }
        let params = self.param_leaves(ty);
        if !params.is_empty() && rng.random_bool(0.5) {
            return params.choose(rng).cloned();
        }
        if *ty == Type::Zero {
            return Some(Term::Nat(rng.random_range(0..=self.max_literal)));
        }
        bound.choose(rng).or_else(|| params.choose(rng)).cloned()
    }

    fn minimal<R: Rng>(&mut self, rng: &mut R, ty: &Type, ctx: &mut Vec<(Name, Type)>) -> Term {
        match ty {
            Type::Zero => self.leaf(rng, ty, ctx).expect("numerals exist"),
            Type::Arrow(d, c) => {
                if rng.random_bool(0.5) {
                    if let Some(t) = self.leaf(rng, ty, ctx) {
                        return t;
                    }
                }
                let x = self.fresh();
                ctx.push((x.clone(), (**d).clone()));
                let body = self.minimal(rng, c, ctx);
                ctx.pop();
                Term::Lam(x, (**d).clone(), body.into())
            }
        }
    }

    fn split<R: Rng>(rng: &mut R, budget: usize, a: usize, b: usize) -> Option<(usize, usize)> {
        let room = budget.checked_sub(1 + a + b)?;
        let extra = rng.random_range(0..=room);
        Some((a + extra, budget - 1 - a - extra))
    }

    fn gen<R: Rng>(&mut self, rng: &mut R, ty: &Type, budget: usize, ctx: &mut Vec<(Name, Type)>) -> Term {
        if budget <= min_size(ty) || rng.random_bool(0.12) {
            return self.minimal(rng, ty, ctx);
        }
        let zero = Type::Zero;
        let one = Type::one();
        // 0: application, 1: abstraction, 2-5: formers specific to `ty`
        for _ in 0..8 {
            match rng.random_range(0..6) {
                0 => {
                    let rho = arg_types().choose(rng).expect("nonempty").clone();
                    let fty = Type::arrow(rho.clone(), ty.clone());
                    if fty.height() > 4 {
                        continue;
                    }
                    let Some((bf, ba)) = Self::split(rng, budget, min_size(&fty), min_size(&rho)) else {
                        continue;
                    };
                    let f = if rng.random_bool(0.7) {
                        self.lambda(rng, &fty, bf, ctx)
                    } else {
                        self.gen(rng, &fty, bf, ctx)
                    };
                    let a = self.gen(rng, &rho, ba, ctx);
                    return Term::app(f, a);
                }
                1 if matches!(ty, Type::Arrow(..)) => return self.lambda(rng, ty, budget, ctx),
                2 | 3 if *ty == zero => {
                    let Some((ba, bb)) = Self::split(rng, budget, 1, 1) else { continue };
                    let a = self.gen(rng, &zero, ba, ctx);
                    let b = self.gen(rng, &zero, bb, ctx);
                    return match rng.random_range(0..3) {
                        0 => Term::plus(a, b),
                        1 => Term::times(a, b),
                        _ => Term::less(a, b),
                    };
                }
                4 if *ty == zero => return Term::succ(self.gen(rng, &zero, budget - 1, ctx)),
                5 if *ty == zero => {
                    let Some((bs, bk)) = Self::split(rng, budget, min_size(&one), 1) else { continue };
                    let s = self.gen(rng, &one, bs, ctx);
                    let k = self.gen(rng, &zero, bk, ctx);
                    return Term::app(s, k);
                }
                2 | 3 if *ty == one => {
                    let Some((bk, br)) = Self::split(rng, budget, 1, min_size(&one)) else { continue };
                    let k = self.gen(rng, &zero, bk, ctx);
                    let r = self.gen(rng, &one, br, ctx);
                    return Term::concat(k, r);
                }
                4 | 5 if *ty == one => {
                    let two = Type::two();
                    let Some((bf, br)) = Self::split(rng, budget, min_size(&two), min_size(&one)) else {
                        continue;
                    };
                    let f = self.gen(rng, &two, bf, ctx);
                    let r = self.gen(rng, &one, br, ctx);
                    return Term::star(f, r);
                }
                _ => {}
            }
        }
        self.minimal(rng, ty, ctx)
    }

    fn lambda<R: Rng>(&mut self, rng: &mut R, ty: &Type, budget: usize, ctx: &mut Vec<(Name, Type)>) -> Term {
        let Type::Arrow(d, c) = ty else { unreachable!("arrow type") };
        let x = self.fresh();
        ctx.push((x.clone(), (**d).clone()));
        let body = self.gen(rng, c, budget.saturating_sub(1).max(min_size(c)), ctx);
        ctx.pop();
        Term::Lam(x, (**d).clone(), body.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::normalize::has_unique_binders_on_paths;
    use crate::term::type_of;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_terms_are_well_typed_and_bounded() {
        let sig = default_signature();
        let mut g = TermGen::new(&sig);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut redexes = 0;
        for _ in 0..500 {
            let ty = TermGen::random_type(&mut rng);
            let size = rng.random_range(1..=60);
            let t = g.term(&mut rng, &ty, size);
            assert_eq!(type_of(&t, &sig).unwrap(), ty, "{t}");
            assert!(t.size() <= size.max(min_size(&ty)), "{t}");
            assert!(has_unique_binders_on_paths(&t));
            if !crate::normalize::is_beta_normal(&t) {
                redexes += 1;
            }
        }
        assert!(redexes > 100);
    }
}
