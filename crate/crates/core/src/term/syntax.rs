//! Parenthesized prefix syntax.
//!
//! ```text
//! term := NAT | IDENT | (lam (IDENT type) term) | (+ term term) | (* term term)
//!       | (succ term) | (< term term) | (cat term term) | (star term term)
//!       | (term term term*)            ; application, left-associated
//! type := 0 | NAT | (-> type type)     ; a numeral n stands for standard type n
//! ```
//!
//! Term files start with header lines `param NAME TYPE`, followed by terms.
//! `;` comments run to end of line.

use std::sync::Arc;

use super::{type_of, Name, Signature, Term, TermError, Type};

const KEYWORDS: &[&str] = &["lam", "succ", "cat", "star", "param", "->", "+", "*", "<"];

#[derive(Debug, Clone)]
enum Sexp {
    Atom(String, usize),
    List(Vec<Sexp>, usize),
}

impl Sexp {
    fn pos(&self) -> usize {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

fn line_col(src: &str, pos: usize) -> (usize, usize) {
    let before = &src[..pos.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rfind('\n').map(|i| pos - i).unwrap_or(pos + 1);
    (line, col)
}

fn syntax_err<T>(src: &str, pos: usize, msg: impl Into<String>) -> Result<T, TermError> {
    let (line, col) = line_col(src, pos);
    Err(TermError::Syntax { line, col, msg: msg.into() })
}

impl<'a> Reader<'a> {
    fn skip(&mut self) {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() {
            match bytes[self.pos] {
                b';' => {
                    while self.pos < bytes.len() && bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip();
        self.pos >= self.src.len()
    }

    fn read(&mut self) -> Result<Sexp, TermError> {
        self.skip();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        match bytes.get(self.pos) {
            None => syntax_err(self.src, start, "unexpected end of input"),
            Some(b')') => syntax_err(self.src, start, "unexpected ')'"),
            Some(b'(') => {
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip();
                    match bytes.get(self.pos) {
                        None => return syntax_err(self.src, start, "unclosed '('"),
                        Some(b')') => {
                            self.pos += 1;
                            return Ok(Sexp::List(items, start));
                        }
                        _ => items.push(self.read()?),
                    }
                }
            }
            Some(_) => {
                while let Some(&c) = bytes.get(self.pos) {
                    if c == b'(' || c == b')' || c == b';' || c.is_ascii_whitespace() {
                        break;
                    }
                    self.pos += 1;
                }
                Ok(Sexp::Atom(self.src[start..self.pos].to_string(), start))
            }
        }
    }
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        && !KEYWORDS.contains(&s)
}

fn to_type(src: &str, s: &Sexp) -> Result<Type, TermError> {
    match s {
        Sexp::Atom(a, p) => match a.parse::<u32>() {
            Ok(n) if n <= 16 => Ok(Type::standard(n)),
            _ => syntax_err(src, *p, format!("bad type '{a}'")),
        },
        Sexp::List(items, p) => match items.as_slice() {
            [Sexp::Atom(arrow, _), rest @ ..] if arrow == "->" && rest.len() >= 2 => {
                let mut tys = rest.iter().map(|t| to_type(src, t)).collect::<Result<Vec<_>, _>>()?;
                let mut acc = tys.pop().expect("two or more");
                while let Some(d) = tys.pop() {
                    acc = Type::arrow(d, acc);
                }
                Ok(acc)
            }
            _ => syntax_err(src, *p, "expected a type: 0 or (-> σ τ)"),
        },
    }
}

struct Builder<'a> {
    src: &'a str,
    sig: &'a Signature,
    scope: Vec<(Name, Type)>,
}

impl<'a> Builder<'a> {
    fn arity(&self, items: &[Sexp], n: usize, pos: usize, form: &str) -> Result<(), TermError> {
        if items.len() != n + 1 {
            return syntax_err(self.src, pos, format!("'{form}' takes {n} argument(s)"));
        }
        Ok(())
    }

    fn sub(&mut self, s: &Sexp) -> Result<Arc<Term>, TermError> {
        self.term(s).map(Arc::new)
    }

    fn term(&mut self, s: &Sexp) -> Result<Term, TermError> {
        match s {
            Sexp::Atom(a, p) => {
                if a.bytes().all(|c| c.is_ascii_digit()) {
                    return a.parse().map(Term::Nat).or_else(|_| syntax_err(self.src, *p, "numeral out of range"));
                }
                if !is_ident(a) {
                    return syntax_err(self.src, *p, format!("unexpected token '{a}'"));
                }
                if let Some((x, ty)) = self.scope.iter().rev().find(|(x, _)| &**x == a) {
                    return Ok(Term::Var(x.clone(), ty.clone()));
                }
                match self.sig.get(a) {
                    Some(ty) => Ok(Term::Param(a.as_str().into(), ty.clone())),
                    None => Err(TermError::UnboundVariable(a.clone())),
                }
            }
            Sexp::List(items, p) => {
                let head = match items.first() {
                    Some(Sexp::Atom(h, _)) => h.as_str(),
                    Some(_) => "",
                    None => return syntax_err(self.src, *p, "empty list"),
                };
                match head {
                    "lam" => self.lambda(items, *p),
                    "+" | "*" | "<" | "cat" | "star" => {
                        self.arity(items, 2, *p, head)?;
                        let a = self.sub(&items[1])?;
                        let b = self.sub(&items[2])?;
                        Ok(match head {
                            "+" => Term::Plus(a, b),
                            "*" => Term::Times(a, b),
                            "<" => Term::Less(a, b),
                            "cat" => Term::Concat(a, b),
                            _ => Term::Star(a, b),
                        })
                    }
                    "succ" => {
                        self.arity(items, 1, *p, head)?;
                        Ok(Term::Succ(self.sub(&items[1])?))
                    }
                    "->" | "param" => syntax_err(self.src, *p, format!("'{head}' is not a term former")),
                    _ => {
                        if items.len() < 2 {
                            return syntax_err(self.src, *p, "application needs an argument");
                        }
                        let mut acc = self.term(&items[0])?;
                        for a in &items[1..] {
                            acc = Term::App(Arc::new(acc), self.sub(a)?);
                        }
                        Ok(acc)
                    }
                }
            }
        }
    }

    fn lambda(&mut self, items: &[Sexp], pos: usize) -> Result<Term, TermError> {
        self.arity(items, 2, pos, "lam")?;
        let Sexp::List(binder, bpos) = &items[1] else {
            return syntax_err(self.src, items[1].pos(), "expected binder (x TYPE)");
        };
        let [Sexp::Atom(x, xpos), ty] = binder.as_slice() else {
            return syntax_err(self.src, *bpos, "expected binder (x TYPE)");
        };
        if !is_ident(x) {
            return syntax_err(self.src, *xpos, format!("bad variable name '{x}'"));
        }
        if self.scope.iter().any(|(y, _)| &**y == x) {
            return syntax_err(self.src, *xpos, format!("λ{x} occurs inside the scope of λ{x}"));
        }
        if self.sig.get(x).is_some() {
            return syntax_err(self.src, *xpos, format!("λ{x} shadows parameter {x}"));
        }
        let ty = to_type(self.src, ty)?;
        let name: Name = x.as_str().into();
        self.scope.push((name.clone(), ty.clone()));
        let body = self.sub(&items[2]);
        self.scope.pop();
        Ok(Term::Lam(name, ty, body?))
    }
}

fn build(src: &str, s: &Sexp, sig: &Signature) -> Result<Term, TermError> {
    let mut b = Builder { src, sig, scope: Vec::new() };
    let t = b.term(s)?;
    type_of(&t, sig)?;
    Ok(t)
}

/// Parses a single closed-over-`sig` term and typechecks it.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term, TermError> {
    let mut r = Reader { src: text, pos: 0 };
    let s = r.read()?;
    if !r.at_end() {
        return syntax_err(text, r.pos, "trailing input after term");
    }
    build(text, &s, sig)
}

pub fn parse_type(text: &str) -> Result<Type, TermError> {
    let mut r = Reader { src: text, pos: 0 };
    let s = r.read()?;
    if !r.at_end() {
        return syntax_err(text, r.pos, "trailing input after type");
    }
    to_type(text, &s)
}

fn push_term(out: &mut String, t: &Term) {
    match t {
        Term::Nat(n) => out.push_str(&n.to_string()),
        Term::Var(x, _) | Term::Param(x, _) => out.push_str(x),
        Term::App(f, a) => {
            out.push('(');
            push_term(out, f);
            out.push(' ');
            push_term(out, a);
            out.push(')');
        }
        Term::Lam(x, ty, b) => {
            out.push_str(&format!("(lam ({x} {ty}) "));
            push_term(out, b);
            out.push(')');
        }
        Term::Succ(a) => {
            out.push_str("(succ ");
            push_term(out, a);
            out.push(')');
        }
        Term::Plus(a, b) | Term::Times(a, b) | Term::Less(a, b) | Term::Concat(a, b) | Term::Star(a, b) => {
            let op = match t {
                Term::Plus(..) => "+",
                Term::Times(..) => "*",
                Term::Less(..) => "<",
                Term::Concat(..) => "cat",
                _ => "star",
            };
            out.push('(');
            out.push_str(op);
            out.push(' ');
            push_term(out, a);
            out.push(' ');
            push_term(out, b);
            out.push(')');
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut s = String::new();
    push_term(&mut s, t);
    s
}

/// A signature together with the terms typed over it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermFile {
    pub sig: Signature,
    pub terms: Vec<Term>,
}

pub fn parse_file(text: &str) -> Result<TermFile, TermError> {
    let mut sig = Signature::new();
    let mut offset = 0;
    for line in text.split_inclusive('\n') {
        let code = line.split(';').next().unwrap_or("").trim();
        if code.is_empty() {
            offset += line.len();
            continue;
        }
        let Some(rest) = code.strip_prefix("param ") else { break };
        let rest = rest.trim_start();
        let (name, ty) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
        if !is_ident(name) {
            return syntax_err(text, offset, format!("bad parameter name '{name}'"));
        }
        let ty = parse_type(ty).map_err(|e| match e {
            TermError::Syntax { msg, .. } => {
                let (line, col) = line_col(text, offset);
                TermError::Syntax { line, col, msg: format!("in parameter type: {msg}") }
            }
            e => e,
        })?;
        if !ty.is_le(2) {
            return syntax_err(text, offset, format!("parameter {name} has type {ty}; only 0, 1, 2 are allowed"));
        }
        if sig.get(name).is_some() {
            return syntax_err(text, offset, format!("parameter {name} declared twice"));
        }
        sig.declare(name, ty);
        offset += line.len();
    }
    let mut r = Reader { src: text, pos: offset };
    let mut terms = Vec::new();
    while !r.at_end() {
        let s = r.read()?;
        terms.push(build(text, &s, &sig)?);
    }
    Ok(TermFile { sig, terms })
}

pub fn print_file(file: &TermFile) -> String {
    let mut out = String::new();
    for (name, ty) in file.sig.iter() {
        out.push_str(&format!("param {name} {ty}\n"));
    }
    for t in &file.terms {
        out.push_str(&print_term(t));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        Signature::new().with("F", Type::two()).with("r", Type::one()).with("n", Type::Zero)
    }

    #[test]
    fn lambda_plus() {
        let t = parse_term("(lam (x 0) (+ x 1))", &sig()).unwrap();
        let x = Term::var("x", Type::Zero);
        assert_eq!(t, Term::lam("x", Type::Zero, Term::plus(x, Term::nat(1))));
    }

    #[test]
    fn star_of_params() {
        let t = parse_term("(star F r)", &sig()).unwrap();
        assert_eq!(t, Term::star(Term::param("F", Type::two()), Term::param("r", Type::one())));
        assert_eq!(print_term(&t), "(star F r)");
    }

    #[test]
    fn rebinding_is_rejected() {
        let e = parse_term("(lam (x 0) (lam (x 0) x))", &sig()).unwrap_err();
        assert!(matches!(e, TermError::Syntax { .. }), "{e}");
        assert!(parse_term("(lam (F 0) F)", &sig()).is_err());
        // Sibling scopes may reuse a name.
        assert!(parse_term("(+ ((lam (x 0) x) 1) ((lam (x 0) x) 2))", &sig()).is_ok());
    }

    #[test]
    fn printing() {
        assert_eq!(print_term(&Term::nat(0)), "0");
        let s = Signature::new().with("G", Type::two()).with("x", Type::Zero);
        let g = Term::param("G", Type::two());
        let t = Term::apps(
            Term::lam("a", Type::Zero, Term::lam("b", Type::Zero, Term::var("a", Type::Zero))),
            [Term::nat(1), Term::nat(2)],
        );
        assert_eq!(print_term(&t), "(((lam (a 0) (lam (b 0) a)) 1) 2)");
        assert!(parse_term(&print_term(&g), &s).is_ok());
    }

    #[test]
    fn application_sugar() {
        let a = parse_term("((lam (a 0) (lam (b 0) a)) 1 2)", &sig()).unwrap();
        let b = parse_term("(((lam (a 0) (lam (b 0) a)) 1) 2)", &sig()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn errors_have_positions() {
        match parse_term("(+ 1\n  (succ))", &sig()).unwrap_err() {
            TermError::Syntax { line, col, .. } => assert_eq!((line, col), (2, 3)),
            e => panic!("{e}"),
        }
        assert!(matches!(parse_term("(3 4)", &sig()), Err(TermError::TypeMismatch(_))));
        assert!(matches!(parse_term("(+ y 1)", &sig()), Err(TermError::UnboundVariable(_))));
        assert!(parse_term("(+ 1 2", &sig()).is_err());
    }

    #[test]
    fn types() {
        assert_eq!(parse_type("(-> (-> 0 0) 0)").unwrap(), Type::two());
        assert_eq!(parse_type("2").unwrap(), Type::two());
        assert_eq!(parse_type("(-> 0 0 0)").unwrap(), Type::arrow(Type::Zero, Type::one()));
    }

    #[test]
    fn files() {
        let text = "; demo\nparam F (-> (-> 0 0) 0)\nparam r (-> 0 0)\n(F r)\n(star F\n  r) ; tail\n";
        let f = parse_file(text).unwrap();
        assert_eq!(f.sig.len(), 2);
        assert_eq!(f.terms.len(), 2);
        let again = parse_file(&print_file(&f)).unwrap();
        assert_eq!(again, f);
        assert!(parse_file("param H (-> 0 (-> 0 0))\n0\n").is_err());
    }
}
