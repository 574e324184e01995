use std::cell::RefCell;

use super::{EvalError, Functional2, Oracle1, Value};

/// Cantor pairing `(a+b)(a+b+1)/2 + b`, wrapping on overflow.
pub fn pair(a: u64, b: u64) -> u64 {
    let s = a.wrapping_add(b);
    let tri = if s.is_multiple_of(2) {
        (s / 2).wrapping_mul(s.wrapping_add(1))
    } else {
        s.wrapping_mul(s.wrapping_add(1) / 2)
    };
    tri.wrapping_add(b)
}

/// Inverse of [`pair`] on its non-overflowing range.
pub fn unpair(n: u64) -> (u64, u64) {
    // largest w with w(w+1)/2 <= n
    let mut w = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    let tri = |w: u64| (w as u128 * (w as u128 + 1) / 2) as u64;
    while tri(w) > n {
        w -= 1;
    }
    while tri(w + 1) <= n {
        w += 1;
    }
    let b = n - tri(w);
    (w - b, b)
}

/// Pointwise pairing of two streams.
pub fn pair_streams(x: &Oracle1, y: &Oracle1) -> Oracle1 {
    let (x, y) = (x.clone(), y.clone());
    Oracle1::rule(move |n| Ok(pair(x.at(n)?, y.at(n)?)))
}

fn lift(v: &Value) -> Result<Oracle1, EvalError> {
    match v {
        Value::Nat(n) => Ok(Oracle1::constant(*n)),
        other => other.to_stream(),
    }
}

/// `⟨c̄⟩_ℝ`: naturals become constant streams, then everything is paired
/// pointwise, associating to the right. One argument encodes as itself;
/// no arguments encode as the zero stream.
pub fn encode_args(args: &[Value]) -> Result<Oracle1, EvalError> {
    let Some((last, init)) = args.split_last() else {
        return Ok(Oracle1::constant(0));
    };
    let mut acc = lift(last)?;
    for v in init.iter().rev() {
        acc = pair_streams(&lift(v)?, &acc);
    }
    Ok(acc)
}

/// Component `i` of a stream produced by [`encode_args`] on `len` arguments.
pub fn project_arg(s: &Oracle1, i: usize, len: usize) -> Oracle1 {
    assert!(i < len, "projection index out of range");
    let s = s.clone();
    Oracle1::rule(move |n| {
        let mut v = s.at(n)?;
        for _ in 0..i {
            v = unpair(v).1;
        }
        Ok(if i + 1 < len { unpair(v).0 } else { v })
    })
}

/// The stream `x, g(x,0), g(g(x,0),1), …`.
pub fn prim_rec(x: u64, g: impl Fn(u64, u64) -> Result<u64, EvalError> + 'static) -> Oracle1 {
    let table = RefCell::new(vec![x]);
    Oracle1::rule(move |k| {
        let mut t = table.borrow_mut();
        while (t.len() as u64) <= k {
            let i = t.len() as u64 - 1;
            let next = g(t[i as usize], i)?;
            t.push(next);
        }
        Ok(t[k as usize])
    })
}

/// `r(k) = F(I*(k⌢0̄))` with `I: s ↦ s(1)`, so `r(n) = F(n̄)`.
pub fn diag_real(f: &Functional2) -> Oracle1 {
    let i = Functional2::new("s(1)", |s| s.at(1));
    let f = f.clone();
    let zero = Oracle1::constant(0);
    Oracle1::rule(move |k| f.apply(&Oracle1::star(&i, &Oracle1::concat(k, &zero))))
}

/// `G(r) = F(H*r)` with `H: s ↦ s(2s(0)+1)`; `H*r` is the even row of `r`.
pub fn even_row(f: &Functional2) -> Functional2 {
    let h = Functional2::new("s(2s(0)+1)", |s| s.at(s.at(0)?.wrapping_mul(2).wrapping_add(1)));
    let f = f.clone();
    Functional2::new(format!("even({})", f.label()), move |r| f.apply(&Oracle1::star(&h, r)))
}

/// Row `k` of `r`, built literally as `F*(k⌢r)` with
/// `F: s ↦ s(2+⟨s(0),s(1)⟩)`. Position `i` of the result is `r(⟨i,k⟩)`.
pub fn row_extract(r: &Oracle1, k: u64) -> Oracle1 {
    let f = Functional2::new("s(2+<s(0),s(1)>)", |s| s.at(2u64.wrapping_add(pair(s.at(0)?, s.at(1)?))));
    Oracle1::star(&f, &Oracle1::concat(k, r))
}

/// `(F̂₀ ∘ … ∘ F̂ₙ)(r)` where `F̂(r) = ⟨F(0⌢r), F(1⌢r), …⟩`.
pub fn compose_hat(fs: &[Functional2], r: &Oracle1) -> Oracle1 {
    fs.iter().rev().fold(r.clone(), |acc, f| {
        let f = f.clone();
        Oracle1::rule(move |k| {
            let inner = acc.clone();
            f.apply(&Oracle1::rule(move |n| if n == 0 { Ok(k) } else { inner.at(n - 1) }))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pairing_table() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 0), 1);
        assert_eq!(pair(0, 1), 2);
        assert_eq!(pair(2, 0), 3);
        assert_eq!(pair(1, 1), 4);
        for n in 0..5000 {
            let (a, b) = unpair(n);
            assert_eq!(pair(a, b), n);
        }
    }

    proptest! {
        #[test]
        fn unpair_inverts_pair(a in 0u64..1 << 30, b in 0u64..1 << 30) {
            prop_assert_eq!(unpair(pair(a, b)), (a, b));
        }
    }

    #[test]
    fn prim_rec_examples() {
        assert_eq!(prim_rec(1, |a, _| Ok(2 * a)).prefix(6).unwrap(), vec![1, 2, 4, 8, 16, 32]);
        // hand unrolling: 0, 0+0+1, 1+1+1, 3+2+1
        assert_eq!(prim_rec(0, |a, b| Ok(a + b + 1)).prefix(4).unwrap(), vec![0, 1, 3, 6]);
        assert_eq!(prim_rec(9, |a, _| Ok(a)).prefix(3).unwrap(), vec![9, 9, 9]);
    }

    #[test]
    fn diagonal_examples() {
        let sum = Functional2::new("s0+s1", |s| Ok(s.at(0)? + s.at(1)?));
        let r = diag_real(&sum);
        for n in 0..20 {
            assert_eq!(r.at(n).unwrap(), sum.apply(&Oracle1::constant(n)).unwrap());
        }
        assert_eq!(diag_real(&Functional2::constant(3)).prefix(4).unwrap(), vec![3; 4]);
        let fifth = Functional2::new("s5", |s| s.at(5));
        assert_eq!(diag_real(&fifth).prefix(5).unwrap(), vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn even_row_example() {
        let f = Functional2::new("s0*100+s1*10+s2", |s| Ok(s.at(0)? * 100 + s.at(1)? * 10 + s.at(2)?));
        let g = even_row(&f);
        let a = Oracle1::table(vec![1, 7, 2, 7, 3, 7], 0);
        assert_eq!(g.apply(&a).unwrap(), 123);
    }

    #[test]
    fn rows() {
        assert_eq!(row_extract(&Oracle1::constant(0), 4).prefix(5).unwrap(), vec![0; 5]);
        // r(⟨0,1⟩) = r(2) = 9, so row 1 starts with 9
        let r = Oracle1::table(vec![0, 0, 9], 0);
        assert_eq!(row_extract(&r, 1).at(0).unwrap(), 9);
        let base = Oracle1::from_fn(|n| n * 3 + 1);
        let row: Vec<u64> = (0..10).map(|i| pair(i, 2)).collect();
        let moved = base.perturbed_outside(&row.iter().copied().collect());
        assert_eq!(row_extract(&base, 2).prefix(10).unwrap(), row_extract(&moved, 2).prefix(10).unwrap());
    }

    #[test]
    fn encoding_round_trip() {
        let args = vec![Value::Nat(3), Value::Stream(Oracle1::identity()), Value::Nat(8)];
        let s = encode_args(&args).unwrap();
        assert_eq!(project_arg(&s, 0, 3).prefix(3).unwrap(), vec![3, 3, 3]);
        assert_eq!(project_arg(&s, 1, 3).prefix(3).unwrap(), vec![0, 1, 2]);
        assert_eq!(project_arg(&s, 2, 3).prefix(3).unwrap(), vec![8, 8, 8]);
        let one = encode_args(&[Value::Nat(5)]).unwrap();
        assert_eq!(one.prefix(2).unwrap(), vec![5, 5]);
    }
}
