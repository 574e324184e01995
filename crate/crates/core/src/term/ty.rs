use std::fmt;
use std::sync::Arc;

/// A finite type: `0`, or `σ → τ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Zero,
    Arrow(Arc<Type>, Arc<Type>),
}

impl Type {
    pub fn arrow(dom: Type, cod: Type) -> Type {
        Type::Arrow(Arc::new(dom), Arc::new(cod))
    }

    /// The standard type `n`: `0`, and `n+1 = n → 0`.
    pub fn standard(n: u32) -> Type {
        (0..n).fold(Type::Zero, |t, _| Type::arrow(t, Type::Zero))
    }

    pub fn one() -> Type {
        Type::standard(1)
    }

    pub fn two() -> Type {
        Type::standard(2)
    }

    pub fn is_standard(&self) -> bool {
        self.level().is_some()
    }

    /// `Some(n)` when this is the standard type `n`.
    pub fn level(&self) -> Option<u32> {
        match self {
            Type::Zero => Some(0),
            Type::Arrow(d, c) if **c == Type::Zero => d.level().map(|n| n + 1),
            Type::Arrow(..) => None,
        }
    }

    /// Standard of level at most `n`.
    pub fn is_le(&self, n: u32) -> bool {
        matches!(self.level(), Some(k) if k <= n)
    }

    pub fn height(&self) -> u32 {
        match self {
            Type::Zero => 0,
            Type::Arrow(d, c) => 1 + d.height().max(c.height()),
        }
    }

    pub fn split(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::Arrow(d, c) => Some((d, c)),
            Type::Zero => None,
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Zero => f.write_str("0"),
            Type::Arrow(d, c) => write!(f, "(-> {d} {c})"),
        }
    }
}

impl fmt::Debug for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_by_recursion(t: &Type) -> bool {
        match t {
            Type::Zero => true,
            Type::Arrow(d, c) => matches!(**c, Type::Zero) && standard_by_recursion(d),
        }
    }

    fn all_types(h: u32) -> Vec<Type> {
        if h == 0 {
            return vec![Type::Zero];
        }
        let smaller = all_types(h - 1);
        let mut out = vec![Type::Zero];
        for d in &smaller {
            for c in &smaller {
                out.push(Type::arrow(d.clone(), c.clone()));
            }
        }
        out
    }

    #[test]
    fn standard_examples() {
        assert!(Type::Zero.is_standard());
        assert!(Type::arrow(Type::one(), Type::Zero).is_standard());
        assert_eq!(Type::arrow(Type::one(), Type::Zero).level(), Some(2));
        assert!(!Type::arrow(Type::Zero, Type::one()).is_standard());
    }

    #[test]
    fn standard_agrees_with_recursion() {
        let types = all_types(5);
        assert_eq!(types.len(), 458_330);
        for t in &types {
            assert_eq!(t.is_standard(), standard_by_recursion(t), "{t}");
        }
        assert_eq!(types.iter().filter(|t| t.is_standard()).count(), 6);
    }
}
