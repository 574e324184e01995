use std::cell::{Cell, RefCell};
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use super::EvalError;

/// A shared step counter. Clones draw from the same budget.
#[derive(Clone, Debug)]
pub struct Fuel {
    left: Rc<Cell<u64>>,
    limit: u64,
}

impl Fuel {
    pub fn new(limit: u64) -> Self {
        Fuel { left: Rc::new(Cell::new(limit)), limit }
    }

    pub fn tick(&self) -> Result<(), EvalError> {
        match self.left.get() {
            0 => Err(EvalError::NonterminationBudget(self.limit)),
            n => {
                self.left.set(n - 1);
                Ok(())
            }
        }
    }

    pub fn reset(&self) {
        self.left.set(self.limit);
    }

    pub fn used(&self) -> u64 {
        self.limit - self.left.get()
    }
}

type RuleFn = dyn Fn(u64) -> Result<u64, EvalError>;

enum Source {
    Table { prefix: Vec<u64>, default: u64 },
    Rule(Box<RuleFn>),
}

struct OracleInner {
    source: Source,
    memo: RefCell<HashMap<u64, u64>>,
    queried: RefCell<BTreeSet<u64>>,
}

/// A point of Baire space, materialized on demand. Every query is recorded
/// and every computed position is memoized.
#[derive(Clone)]
pub struct Oracle1(Rc<OracleInner>);

impl Oracle1 {
    fn with_source(source: Source) -> Self {
        Oracle1(Rc::new(OracleInner {
            source,
            memo: RefCell::new(HashMap::new()),
            queried: RefCell::new(BTreeSet::new()),
        }))
    }

    /// Explicit prefix, then `default` forever.
    pub fn table(prefix: Vec<u64>, default: u64) -> Self {
        Self::with_source(Source::Table { prefix, default })
    }

    pub fn constant(c: u64) -> Self {
        Self::table(Vec::new(), c)
    }

    pub fn rule(f: impl Fn(u64) -> Result<u64, EvalError> + 'static) -> Self {
        Self::with_source(Source::Rule(Box::new(f)))
    }

    pub fn from_fn(f: impl Fn(u64) -> u64 + 'static) -> Self {
        Self::rule(move |n| Ok(f(n)))
    }

    pub fn identity() -> Self {
        Self::from_fn(|n| n)
    }

    pub fn at(&self, n: u64) -> Result<u64, EvalError> {
        self.0.queried.borrow_mut().insert(n);
        if let Some(v) = self.0.memo.borrow().get(&n) {
            return Ok(*v);
        }
        let v = match &self.0.source {
            Source::Table { prefix, default } => {
                *usize::try_from(n).ok().and_then(|i| prefix.get(i)).unwrap_or(default)
            }
            Source::Rule(f) => f(n)?,
        };
        self.0.memo.borrow_mut().insert(n, v);
        Ok(v)
    }

    pub fn prefix(&self, len: u64) -> Result<Vec<u64>, EvalError> {
        (0..len).map(|i| self.at(i)).collect()
    }

    pub fn queried(&self) -> BTreeSet<u64> {
        self.0.queried.borrow().clone()
    }

    /// A fresh handle onto the same values whose query log starts empty.
    pub fn view(&self) -> Oracle1 {
        let base = self.clone();
        Oracle1::rule(move |n| base.at(n))
    }

    /// `k ⌢ r`: `k` at position 0, then `r` shifted right by one.
    pub fn concat(k: u64, r: &Oracle1) -> Oracle1 {
        let r = r.clone();
        Oracle1::rule(move |n| if n == 0 { Ok(k) } else { r.at(n - 1) })
    }

    /// `F * r`: position `k` is `F(k ⌢ r)`.
    pub fn star(f: &Functional2, r: &Oracle1) -> Oracle1 {
        let (f, r) = (f.clone(), r.clone());
        Oracle1::rule(move |k| f.apply(&Oracle1::concat(k, &r)))
    }

    /// Agrees with `self` on `keep` and differs from it everywhere else.
    pub fn perturbed_outside(&self, keep: &BTreeSet<u64>) -> Oracle1 {
        let (base, keep) = (self.clone(), keep.clone());
        Oracle1::rule(move |n| {
            let v = base.at(n)?;
            Ok(if keep.contains(&n) { v } else { v.wrapping_add(1 + n % 7) })
        })
    }
}

impl fmt::Debug for Oracle1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let memo = self.0.memo.borrow();
        let mut known: Vec<_> = memo.iter().collect();
        known.sort();
        write!(f, "Oracle1{known:?}")
    }
}

type FunFn = dyn Fn(&Oracle1) -> Result<u64, EvalError>;

struct FunInner {
    rule: Box<FunFn>,
    label: String,
    modulus: RefCell<Option<BTreeSet<u64>>>,
}

/// A continuous type-2 functional. Each application runs on a fresh view of
/// the argument, so the positions it read are known afterwards.
#[derive(Clone)]
pub struct Functional2(Rc<FunInner>);

impl Functional2 {
    pub fn new(label: impl Into<String>, f: impl Fn(&Oracle1) -> Result<u64, EvalError> + 'static) -> Self {
        Functional2(Rc::new(FunInner { rule: Box::new(f), label: label.into(), modulus: RefCell::new(None) }))
    }

    pub fn constant(c: u64) -> Self {
        Self::new(format!("const {c}"), move |_| Ok(c))
    }

    pub fn label(&self) -> &str {
        &self.0.label
    }

    pub fn apply(&self, r: &Oracle1) -> Result<u64, EvalError> {
        self.apply_tracked(r).map(|(v, _)| v)
    }

    /// The value and the set of argument positions it depended on.
    pub fn apply_tracked(&self, r: &Oracle1) -> Result<(u64, BTreeSet<u64>), EvalError> {
        let view = r.view();
        let v = (self.0.rule)(&view)?;
        let q = view.queried();
        *self.0.modulus.borrow_mut() = Some(q.clone());
        Ok((v, q))
    }

    /// Positions read by the most recent application.
    pub fn last_modulus(&self) -> Option<BTreeSet<u64>> {
        self.0.modulus.borrow().clone()
    }
}

impl fmt::Debug for Functional2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functional2({})", self.0.label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn concat_examples() {
        let c = Oracle1::concat(5, &Oracle1::constant(0));
        assert_eq!(c.prefix(4).unwrap(), vec![5, 0, 0, 0]);
        assert_eq!(Oracle1::concat(0, &Oracle1::identity()).at(3).unwrap(), 2);
        let r = Oracle1::from_fn(|n| 100 + n);
        assert_eq!(Oracle1::concat(7, &Oracle1::concat(9, &r)).at(1).unwrap(), 9);
    }

    #[test]
    fn star_examples() {
        let r = Oracle1::from_fn(|n| 3 * n + 4);
        let second = Functional2::new("s(1)", |s| s.at(1));
        let s = Oracle1::star(&second, &r);
        for k in 0..10 {
            assert_eq!(s.at(k).unwrap(), r.at(0).unwrap());
        }
        let head = Functional2::new("s(0)+1", |s| Ok(s.at(0)? + 1));
        assert_eq!(Oracle1::star(&head, &r).prefix(5).unwrap(), vec![1, 2, 3, 4, 5]);
        assert_eq!(Oracle1::star(&Functional2::constant(7), &r).prefix(3).unwrap(), vec![7, 7, 7]);
    }

    #[test]
    fn modulus_is_recorded() {
        let f = Functional2::new("s(2)+s(5)", |s| Ok(s.at(2)? + s.at(5)?));
        let r = Oracle1::identity();
        let (v, m) = f.apply_tracked(&r).unwrap();
        assert_eq!(v, 7);
        assert_eq!(m.into_iter().collect::<Vec<_>>(), vec![2, 5]);
        let keep = f.last_modulus().unwrap();
        assert_eq!(f.apply(&r.perturbed_outside(&keep)).unwrap(), 7);
    }

    #[test]
    fn fuel_runs_out() {
        let fuel = Fuel::new(2);
        assert!(fuel.tick().is_ok() && fuel.tick().is_ok());
        assert_eq!(fuel.tick(), Err(EvalError::NonterminationBudget(2)));
        fuel.reset();
        assert_eq!(fuel.used(), 0);
    }
}
