//! Ordinals below epsilon_0 in Cantor normal form, and the tag alphabet
//! `Ordinal ∪ {∞}` whose order has `∞ > ∞`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrdinalError {
    #[error("SyntaxError at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// `ω^e1·c1 + ω^e2·c2 + …` with `e1 > e2 > …` and every `ci ≥ 1`.
/// The empty sum is 0.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Ordinal {
    terms: Vec<(Ordinal, u64)>,
}

impl Ordinal {
    pub fn zero() -> Self {
        Ordinal { terms: Vec::new() }
    }

    pub fn nat(n: u64) -> Self {
        if n == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(Self::zero(), n)] }
        }
    }

    pub fn omega() -> Self {
        Self::omega_pow(Self::nat(1))
    }

    /// `ω^e`.
    pub fn omega_pow(e: Ordinal) -> Self {
        Ordinal { terms: vec![(e, 1)] }
    }

    /// `ω^e · c`; `c = 0` gives 0.
    pub fn monomial(e: Ordinal, c: u64) -> Self {
        if c == 0 {
            Self::zero()
        } else {
            Ordinal { terms: vec![(e, c)] }
        }
    }

    /// Builds from CNF terms, checking the invariants.
    pub fn from_terms(terms: Vec<(Ordinal, u64)>) -> Option<Self> {
        let ok = terms.iter().all(|(_, c)| *c > 0) && terms.windows(2).all(|w| w[0].0 > w[1].0);
        ok.then_some(Ordinal { terms })
    }

    pub fn terms(&self) -> &[(Ordinal, u64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(e, c)] if e.is_zero() => Some(*c),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.as_nat().is_some()
    }

    pub fn is_successor(&self) -> bool {
        matches!(self.terms.last(), Some((e, _)) if e.is_zero())
    }

    pub fn is_limit(&self) -> bool {
        !self.is_zero() && !self.is_successor()
    }

    /// Number of CNF terms, counted recursively through exponents.
    pub fn size(&self) -> usize {
        self.terms.iter().map(|(e, _)| 1 + e.size()).sum()
    }

    pub fn add(&self, other: &Ordinal) -> Ordinal {
        let Some((lead, _)) = other.terms.first() else {
            return self.clone();
        };
        let mut terms: Vec<(Ordinal, u64)> = self.terms.iter().take_while(|(e, _)| e > lead).cloned().collect();
        let mut rest = other.terms.iter().cloned();
        if let Some((e, c)) = self.terms.iter().find(|(e, _)| e == lead) {
            let (_, oc) = rest.next().expect("leading term");
            terms.push((e.clone(), c.saturating_add(oc)));
        }
        terms.extend(rest);
        Ordinal { terms }
    }

    pub fn succ(&self) -> Ordinal {
        self.add(&Ordinal::nat(1))
    }

    /// Immediate predecessor of a successor ordinal.
    pub fn pred(&self) -> Option<Ordinal> {
        if !self.is_successor() {
            return None;
        }
        let mut terms = self.terms.clone();
        let last = terms.last_mut().expect("successor has terms");
        if last.1 == 1 {
            terms.pop();
        } else {
            last.1 -= 1;
        }
        Some(Ordinal { terms })
    }

    /// Least ordinal strictly above every element; 0 for the empty set.
    pub fn max_plus_one<'a, I: IntoIterator<Item = &'a Ordinal>>(set: I) -> Ordinal {
        set.into_iter().max().map(Ordinal::succ).unwrap_or_else(Ordinal::zero)
    }

    /// A uniformly-ish random ordinal strictly below `self`. Tails use
    /// coefficients and finite exponents at most `spread`, which keeps
    /// random descending chains short.
    pub fn random_below<R: Rng + ?Sized>(&self, rng: &mut R, spread: u64) -> Option<Ordinal> {
        if self.is_zero() {
            return None;
        }
        let i = rng.random_range(0..self.terms.len());
        let mut terms: Vec<(Ordinal, u64)> = self.terms[..i].to_vec();
        let (e, c) = &self.terms[i];
        if *c > 1 {
            terms.push((e.clone(), rng.random_range(1..*c)));
        }
        if !e.is_zero() && rng.random_bool(0.6) {
            let f = e.random_below(rng, spread).expect("nonzero exponent");
            let f = match f.as_nat() {
                Some(n) => Ordinal::nat(n.min(spread)),
                None => f,
            };
            terms.push((f, rng.random_range(1..=spread.max(1))));
        }
        Some(Ordinal { terms })
    }

    /// Random ordinal with at most `max_terms` top-level terms and
    /// exponent nesting at most `depth`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, depth: u32, max_terms: usize, max_coef: u64) -> Ordinal {
        let n = rng.random_range(0..=max_terms);
        let mut exps: Vec<Ordinal> = (0..n)
            .map(|_| {
                if depth == 0 || rng.random_bool(0.5) {
                    Ordinal::nat(rng.random_range(0..4))
                } else {
                    Ordinal::random(rng, depth - 1, 2, max_coef)
                }
            })
            .collect();
        exps.sort();
        exps.dedup();
        exps.reverse();
        let terms = exps.into_iter().map(|e| (e, rng.random_range(1..=max_coef.max(1)))).collect();
        Ordinal { terms }
    }
}

impl Ord for Ordinal {
    /// Lexicographic on CNF terms: compare exponents, then coefficients,
    /// and a proper prefix is smaller.
    fn cmp(&self, other: &Self) -> Ordering {
        for ((e1, c1), (e2, c2)) in self.terms.iter().zip(&other.terms) {
            match e1.cmp(e2).then(c1.cmp(c2)) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Ordinal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl From<u64> for Ordinal {
    fn from(n: u64) -> Self {
        Ordinal::nat(n)
    }
}

fn write_exponent(f: &mut fmt::Formatter<'_>, e: &Ordinal) -> fmt::Result {
    let bare = e.is_finite() || matches!(e.terms.as_slice(), [(_, 1)]);
    if bare {
        write!(f, "{e}")
    } else {
        write!(f, "({e})")
    }
}

impl fmt::Display for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str("+")?;
            }
            if e.is_zero() {
                write!(f, "{c}")?;
                continue;
            }
            f.write_str("w")?;
            if e.as_nat() != Some(1) {
                f.write_str("^")?;
                write_exponent(f, e)?;
            }
            if *c != 1 {
                write!(f, "*{c}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Ordinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

struct OrdParser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> OrdParser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, OrdinalError> {
        Err(OrdinalError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn nat(&mut self) -> Result<u64, OrdinalError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a natural number");
        }
        self.src[start..self.pos].parse().or_else(|_| self.err("number out of range"))
    }

    fn expr(&mut self) -> Result<Ordinal, OrdinalError> {
        let mut acc = self.term()?;
        while self.eat('+') {
            let t = self.term()?;
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Ordinal, OrdinalError> {
        let base = self.atom()?;
        if self.eat('*') {
            let c = self.nat()?;
            return Ok(scale(&base, c));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ordinal, OrdinalError> {
        self.skip_ws();
        match self.peek() {
            Some('w') | Some('ω') => {
                self.pos += self.peek().map(char::len_utf8).unwrap_or(1);
                if self.eat('^') {
                    let e = self.atom()?;
                    Ok(Ordinal::omega_pow(e))
                } else {
                    Ok(Ordinal::omega())
                }
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Ordinal::nat(self.nat()?)),
            _ => self.err("expected an ordinal term"),
        }
    }
}

/// `a · c` for natural `c`: scales the leading coefficient.
fn scale(a: &Ordinal, c: u64) -> Ordinal {
    if c == 0 || a.is_zero() {
        return Ordinal::zero();
    }
    let mut terms = a.terms.clone();
    terms[0].1 = terms[0].1.saturating_mul(c);
    Ordinal { terms }
}

pub fn parse_ordinal(text: &str) -> Result<Ordinal, OrdinalError> {
    let mut p = OrdParser { src: text, pos: 0 };
    let o = p.expr()?;
    p.skip_ws();
    if p.pos != text.len() {
        return p.err("trailing input");
    }
    Ok(o)
}

pub fn print_ordinal(a: &Ordinal) -> String {
    a.to_string()
}

impl FromStr for Ordinal {
    type Err = OrdinalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_ordinal(s)
    }
}

/// An ordinal tag or `∞`. There is deliberately no `PartialOrd`: the order
/// has `∞ > ∞`, so only [`tag_gt`] is offered.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Tag {
    Fin(Ordinal),
    Inf,
}

/// `a > b` in the tag order: ordinals compare as usual, `∞` is above
/// every ordinal, and `∞ > ∞` holds.
pub fn tag_gt(a: &Tag, b: &Tag) -> bool {
    match (a, b) {
        (Tag::Inf, _) => true,
        (Tag::Fin(_), Tag::Inf) => false,
        (Tag::Fin(x), Tag::Fin(y)) => x > y,
    }
}

impl Tag {
    pub fn nat(n: u64) -> Tag {
        Tag::Fin(Ordinal::nat(n))
    }

    pub fn is_inf(&self) -> bool {
        matches!(self, Tag::Inf)
    }

    pub fn ordinal(&self) -> Option<&Ordinal> {
        match self {
            Tag::Fin(o) => Some(o),
            Tag::Inf => None,
        }
    }

    /// Finite and strictly below `alpha`.
    pub fn below(&self, alpha: &Ordinal) -> bool {
        matches!(self, Tag::Fin(x) if x < alpha)
    }

    /// `∞`, or an ordinal `≥ alpha`.
    pub fn at_least(&self, alpha: &Ordinal) -> bool {
        !self.below(alpha)
    }
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tag::Fin(o) => write!(f, "{o}"),
            Tag::Inf => f.write_str("inf"),
        }
    }
}

impl fmt::Debug for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl From<Ordinal> for Tag {
    fn from(o: Ordinal) -> Self {
        Tag::Fin(o)
    }
}

impl FromStr for Tag {
    type Err = OrdinalError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "∞" => Ok(Tag::Inf),
            t => parse_ordinal(t).map(Tag::Fin),
        }
    }
}
