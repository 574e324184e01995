//! Forcing conditions as finite tagged trees: validity, extension,
//! α-retagging, α-projection and the retagging construction.
//!
//! Node `σ` carries `(Open's tag, Closed's tag)`. Odd-length nodes are
//! Open's moves and change the first coordinate; even-length nodes are
//! Closed's moves and change the second.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::games::{rank, ExplicitTree, DEFAULT_NODE_BUDGET};
use crate::ordinal::{tag_gt, Ordinal, Tag};

pub type Node = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaggedError {
    #[error("InsufficientHeadroom: gamma~ + {rank} = {needed} is not below alpha = {alpha}")]
    InsufficientHeadroom { needed: Ordinal, rank: u64, alpha: Ordinal },
    #[error("InvalidInstance: {0}")]
    InvalidInstance(String),
    #[error("RestartPatternMismatch: {0}")]
    RestartPatternMismatch(String),
    #[error("SyntaxError at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Why a tagged tree fails to be a condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingRoot,
    RootNotInfinite,
    NotPrefixClosed(Node),
    /// The coordinate that should be inherited from the parent changed.
    Alternation(Node),
    /// Open descended from the grandparent but Closed did not.
    Descent(Node),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingRoot => f.write_str("root missing"),
            Violation::RootNotInfinite => f.write_str("root is not (inf, inf)"),
            Violation::NotPrefixClosed(n) => write!(f, "{} has no parent", fmt_path(n)),
            Violation::Alternation(n) => write!(f, "alternation broken at {}", fmt_path(n)),
            Violation::Descent(n) => write!(f, "descent broken at {}", fmt_path(n)),
        }
    }
}

/// A finite tree of natural-number sequences labeled by tag pairs.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Condition {
    labels: BTreeMap<Node, (Tag, Tag)>,
}

fn min_tag(a: &Tag, b: &Tag) -> Tag {
    match (a, b) {
        (Tag::Inf, x) | (x, Tag::Inf) => x.clone(),
        (Tag::Fin(x), Tag::Fin(y)) => Tag::Fin(x.min(y).clone()),
    }
}

impl Condition {
    /// The root alone, tagged `(∞, ∞)`.
    pub fn root() -> Self {
        let mut labels = BTreeMap::new();
        labels.insert(Vec::new(), (Tag::Inf, Tag::Inf));
        Condition { labels }
    }

    /// Wraps a labeling without checking it.
    pub fn from_labels(labels: BTreeMap<Node, (Tag, Tag)>) -> Self {
        Condition { labels }
    }

    pub fn labels(&self) -> &BTreeMap<Node, (Tag, Tag)> {
        &self.labels
    }

    pub fn get(&self, node: &[u64]) -> Option<&(Tag, Tag)> {
        self.labels.get(node)
    }

    pub fn contains(&self, node: &[u64]) -> bool {
        self.labels.contains_key(node)
    }

    pub fn insert(&mut self, node: Node, tags: (Tag, Tag)) {
        self.labels.insert(node, tags);
    }

    pub fn remove(&mut self, node: &[u64]) {
        self.labels.remove(node);
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn domain(&self) -> impl Iterator<Item = &Node> {
        self.labels.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Node, &(Tag, Tag))> {
        self.labels.iter()
    }

    /// Nodes without children.
    pub fn leaves(&self) -> Vec<Node> {
        self.labels
            .keys()
            .filter(|n| !self.labels.range((*n).clone()..).nth(1).is_some_and(|(c, _)| c.starts_with(n)))
            .cloned()
            .collect()
    }

    /// Every tag in the condition.
    pub fn tags(&self) -> impl Iterator<Item = &Tag> {
        self.labels.values().flat_map(|(a, b)| [a, b])
    }

    /// Odd `σ` where Open's move descends from a finite tag, which obliges
    /// Closed to descend on the following move.
    pub fn is_descent(&self, node: &[u64]) -> bool {
        let Some((_, parent)) = node.split_last() else { return false };
        if node.len().is_multiple_of(2) {
            return false;
        }
        match (self.get(parent), self.get(node)) {
            (Some((a, _)), Some((b, _))) => !a.is_inf() && tag_gt(a, b),
            _ => false,
        }
    }
}

/// All ways `p` fails to be a condition.
pub fn violations(p: &Condition) -> Vec<Violation> {
    let mut out = Vec::new();
    match p.get(&[]) {
        None => out.push(Violation::MissingRoot),
        Some((a, b)) if !(a.is_inf() && b.is_inf()) => out.push(Violation::RootNotInfinite),
        _ => {}
    }
    for (node, (t0, t1)) in p.iter() {
        let Some((_, parent)) = node.split_last() else { continue };
        let Some((u0, u1)) = p.get(parent) else {
            out.push(Violation::NotPrefixClosed(node.clone()));
            continue;
        };
        let kept = if node.len() % 2 == 1 { t1 == u1 } else { t0 == u0 };
        if !kept {
            out.push(Violation::Alternation(node.clone()));
        }
        if node.len() % 2 == 0 && p.is_descent(parent) {
            let grand = &parent[..parent.len() - 1];
            if let Some((_, g1)) = p.get(grand) {
                if !tag_gt(g1, t1) {
                    out.push(Violation::Descent(node.clone()));
                }
            }
        }
    }
    out
}

pub fn is_condition(p: &Condition) -> bool {
    violations(p).is_empty()
}

/// `q ≤ p`: `q` keeps every node of `p` with the same tags.
pub fn extends(q: &Condition, p: &Condition) -> bool {
    p.iter().all(|(n, t)| q.get(n) == Some(t))
}

/// `p ≈_α q`: same domain, tags below α equal, tags at or above α stay so.
pub fn retag_equiv(p: &Condition, q: &Condition, alpha: &Ordinal) -> bool {
    p.len() == q.len()
        && p.iter().all(|(n, (a0, a1))| {
            let Some((b0, b1)) = q.get(n) else { return false };
            [(a0, b0), (a1, b1)].into_iter().all(|(a, b)| if a.below(alpha) { a == b } else { b.at_least(alpha) })
        })
}

/// The α-projection: tags below α kept, all others replaced by `∞`.
pub fn project(p: &Condition, alpha: &Ordinal) -> Condition {
    let cut = |t: &Tag| if t.below(alpha) { t.clone() } else { Tag::Inf };
    Condition { labels: p.iter().map(|(n, (a, b))| (n.clone(), (cut(a), cut(b)))).collect() }
}

/// Inputs of the retagging construction: `p ≈_α q`, `r ≤ q`, `γ < α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetagInstance {
    pub p: Condition,
    pub q: Condition,
    pub r: Condition,
    pub alpha: Ordinal,
    pub gamma: Ordinal,
}

/// Output of [`retag`] with the intermediate data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Retagged {
    pub r_hat: Condition,
    pub gamma_tilde: Ordinal,
    /// New nodes not below a new restart by Open.
    pub n: BTreeSet<Node>,
    /// Rank of `T_σ` for each `σ` in `n`.
    pub ranks: BTreeMap<Node, u64>,
}

impl RetagInstance {
    /// Strict upper bound of γ and of every tag below α in `r` and `p`.
    pub fn gamma_tilde(&self) -> Ordinal {
        let small: Vec<&Ordinal> = self
            .r
            .tags()
            .chain(self.p.tags())
            .filter(|t| t.below(&self.alpha))
            .filter_map(Tag::ordinal)
            .chain([&self.gamma])
            .collect();
        Ordinal::max_plus_one(small)
    }

    fn is_new(&self, node: &[u64]) -> bool {
        self.r.contains(node) && !self.p.contains(node)
    }

    /// New nodes every new odd prefix of which is a descent in `r`.
    pub fn unrestarted(&self) -> BTreeSet<Node> {
        self.r
            .domain()
            .filter(|s| self.is_new(s))
            .filter(|s| (1..=s.len()).step_by(2).all(|k| !self.is_new(&s[..k]) || self.r.is_descent(&s[..k])))
            .cloned()
            .collect()
    }

    /// Extensions `τ` of `σ` inside `dom(r)` with no restart by Open after
    /// `σ`.
    pub fn t_sigma(&self, sigma: &[u64]) -> ExplicitTree {
        let nodes = self
            .r
            .domain()
            .filter(|x| x.starts_with(sigma))
            .filter(|x| (sigma.len() + 1..=x.len()).filter(|k| k % 2 == 1).all(|k| self.r.is_descent(&x[..k])));
        ExplicitTree::from_nodes(nodes.map(|x| x[sigma.len()..].to_vec())).expect("extensions are prefix closed")
    }

    /// Checks the stated invariants plus the restart agreement the
    /// construction relies on.
    pub fn validate(&self) -> Result<(), TaggedError> {
        for (name, c) in [("p", &self.p), ("q", &self.q), ("r", &self.r)] {
            if let Some(v) = violations(c).first() {
                return Err(TaggedError::InvalidInstance(format!("{name} is not a condition: {v}")));
            }
        }
        if !retag_equiv(&self.p, &self.q, &self.alpha) {
            return Err(TaggedError::InvalidInstance("p is not an alpha-retagging of q".into()));
        }
        if !extends(&self.r, &self.q) {
            return Err(TaggedError::InvalidInstance("r does not extend q".into()));
        }
        if self.gamma >= self.alpha {
            return Err(TaggedError::InvalidInstance("gamma must be below alpha".into()));
        }
        for (node, (p0, _)) in self.p.iter() {
            if self.p.is_descent(node) && !self.q.is_descent(node) {
                return Err(TaggedError::RestartPatternMismatch(format!(
                    "{} is a descent in p but a restart in q",
                    fmt_path(node)
                )));
            }
            if self.q.get(node).is_some_and(|(q0, _)| q0.is_inf()) && !p0.is_inf() {
                return Err(TaggedError::RestartPatternMismatch(format!(
                    "{} has Open tag inf in q but not in p",
                    fmt_path(node)
                )));
            }
        }
        Ok(())
    }
}

/// Builds `r̂ ≤ p` with `r̂ ≈_γ̃ r`.
pub fn retag(inst: &RetagInstance) -> Result<Retagged, TaggedError> {
    inst.validate()?;
    let gamma_tilde = inst.gamma_tilde();
    let n = inst.unrestarted();
    let mut ranks = BTreeMap::new();
    for s in &n {
        let rk = rank(&inst.t_sigma(s), &[], DEFAULT_NODE_BUDGET)
            .map_err(|e| TaggedError::InvalidInstance(e.to_string()))?
            .as_nat()
            .expect("finite trees have finite rank");
        ranks.insert(s.clone(), rk);
    }
    if let Some(&rk) = ranks.values().max() {
        let needed = gamma_tilde.add(&Ordinal::nat(rk));
        if needed >= inst.alpha {
            return Err(TaggedError::InsufficientHeadroom { needed, rank: rk, alpha: inst.alpha.clone() });
        }
    } else if gamma_tilde >= inst.alpha {
        return Err(TaggedError::InsufficientHeadroom { needed: gamma_tilde, rank: 0, alpha: inst.alpha.clone() });
    }

    // BTreeMap order visits parents first.
    let mut hat = Condition::default();
    for (s, (r0, r1)) in inst.r.iter() {
        if let Some(t) = inst.p.get(s) {
            hat.insert(s.clone(), t.clone());
            continue;
        }
        let (h0, h1) = hat.get(&s[..s.len() - 1]).expect("parent tagged").clone();
        let odd = s.len() % 2 == 1;
        let tags = if let Some(&rk) = ranks.get(s) {
            let cap = Tag::Fin(gamma_tilde.add(&Ordinal::nat(rk)));
            if odd {
                (min_tag(&cap, r0), h1)
            } else {
                (h0, min_tag(&cap, r1))
            }
        } else if odd {
            // Open's restart, or a move below one; a restart must not look
            // like a descent from the retagged parent
            let restart = !inst.r.is_descent(s);
            let t0 = if restart && !h0.is_inf() && tag_gt(&h0, r0) { Tag::Inf } else { r0.clone() };
            (t0, h1)
        } else {
            (h0, r1.clone())
        };
        hat.insert(s.clone(), tags);
    }
    Ok(Retagged { r_hat: hat, gamma_tilde, n, ranks })
}

/// Dot-separated moves, `.` for the root.
pub fn fmt_path(node: &[u64]) -> String {
    if node.is_empty() {
        ".".into()
    } else {
        node.iter().map(u64::to_string).collect::<Vec<_>>().join(".")
    }
}

/// Condition files: `PATH TAG0 TAG1` per line, `#` comments.
pub fn parse_condition(text: &str) -> Result<Condition, TaggedError> {
    let mut c = Condition::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| TaggedError::Syntax { line: i + 1, msg };
        let words: Vec<&str> = line.split_whitespace().collect();
        let [path, a, b] = words[..] else {
            return Err(err(format!("expected PATH TAG0 TAG1, got '{line}'")));
        };
        let node: Node = if path == "." {
            Vec::new()
        } else {
            path.split('.')
                .map(|w| w.parse::<u64>().map_err(|_| err(format!("bad path '{path}'"))))
                .collect::<Result<_, _>>()?
        };
        let a: Tag = a.parse().map_err(|e| err(format!("{e}")))?;
        let b: Tag = b.parse().map_err(|e| err(format!("{e}")))?;
        if c.contains(&node) {
            return Err(err(format!("duplicate node {path}")));
        }
        c.insert(node, (a, b));
    }
    Ok(c)
}

pub fn print_condition(c: &Condition) -> String {
    c.iter().map(|(n, (a, b))| format!("{} {a} {b}\n", fmt_path(n))).collect()
}

fn random_tag<R: Rng + ?Sized>(rng: &mut R, ceiling: &Ordinal) -> Tag {
    if rng.random_bool(0.15) {
        return Tag::Inf;
    }
    match ceiling.random_below(rng, 6) {
        Some(o) => Tag::Fin(o),
        None => Tag::Inf,
    }
}

fn random_tag_below<R: Rng + ?Sized>(rng: &mut R, bound: &Tag, ceiling: &Ordinal) -> Option<Tag> {
    match bound {
        Tag::Inf => Some(random_tag(rng, ceiling)),
        Tag::Fin(b) => b.random_below(rng, 6).map(Tag::Fin),
    }
}

/// Adds up to `extra` random nodes to `base`, keeping it a condition.
/// Finite tags are drawn below `ceiling`.
pub fn extend_randomly<R: Rng + ?Sized>(rng: &mut R, base: &Condition, extra: usize, ceiling: &Ordinal) -> Condition {
    let mut c = base.clone();
    let mut nodes: Vec<Node> = c.domain().cloned().collect();
    let mut added = 0;
    let mut attempts = 0;
    while added < extra && attempts < 20 * extra + 20 {
        attempts += 1;
        let hi = nodes.len();
        let parent =
            if rng.random_bool(0.6) { rng.random_range(hi.saturating_sub(6)..hi) } else { rng.random_range(0..hi) };
        let mut child = nodes[parent].clone();
        child.push(rng.random_range(0..3));
        if c.contains(&child) {
            continue;
        }
        let (u0, u1) = c.get(&nodes[parent]).expect("listed").clone();
        let tags = if child.len() % 2 == 1 {
            (random_tag(rng, ceiling), u1)
        } else {
            let t1 = if c.is_descent(&nodes[parent]) {
                let grand = &child[..child.len() - 2];
                let g1 = c.get(grand).expect("grandparent").1.clone();
                match random_tag_below(rng, &g1, ceiling) {
                    Some(t) => t,
                    None => continue,
                }
            } else {
                random_tag(rng, ceiling)
            };
            (u0, t1)
        };
        c.insert(child.clone(), tags);
        nodes.push(child);
        added += 1;
    }
    c
}

/// A random condition with at most `size` nodes.
pub fn random_condition<R: Rng + ?Sized>(rng: &mut R, size: usize, ceiling: &Ordinal) -> Condition {
    extend_randomly(rng, &Condition::root(), size.saturating_sub(1), ceiling)
}

/// Removes leaves while `fails` keeps holding, giving a minimal failing
/// subtree. Removing a leaf never breaks a condition.
pub fn shrink_condition(c: &Condition, fails: impl Fn(&Condition) -> bool) -> Condition {
    let mut cur = c.clone();
    'outer: loop {
        for leaf in cur.leaves() {
            if leaf.is_empty() {
                continue;
            }
            let mut smaller = cur.clone();
            smaller.remove(&leaf);
            if fails(&smaller) {
                cur = smaller;
                continue 'outer;
            }
        }
        return cur;
    }
}

const LIMITS: [&str; 5] = ["w", "w*2", "w*3", "w^2", "w^2*2+w"];

/// A random instance with a limit α, which always leaves headroom.
pub fn random_instance<R: Rng + ?Sized>(rng: &mut R, size: usize) -> RetagInstance {
    let alpha: Ordinal = LIMITS[rng.random_range(0..LIMITS.len())].parse().expect("literal");
    let ceiling = alpha.add(&alpha);
    let q = random_condition(rng, size, &ceiling);
    let projected = project(&q, &alpha);
    let p = if rng.random_bool(0.5) {
        projected
    } else {
        // shift tags at or above α up by α, or project some of them
        let mut shifted = q.clone();
        for (n, (a, b)) in q.iter() {
            let mv = |t: &Tag, rng: &mut R| match t {
                Tag::Fin(x) if x >= &alpha => {
                    if rng.random_bool(0.2) {
                        Tag::Inf
                    } else {
                        Tag::Fin(alpha.add(x))
                    }
                }
                _ => t.clone(),
            };
            let t = (mv(a, rng), mv(b, rng));
            shifted.insert(n.clone(), t);
        }
        let candidate =
            RetagInstance { p: shifted, q: q.clone(), r: q.clone(), alpha: alpha.clone(), gamma: Ordinal::zero() };
        if candidate.validate().is_ok() {
            candidate.p
        } else {
            projected
        }
    };
    let extra = rng.random_range(0..=size);
    let r = extend_randomly(rng, &q, extra, &ceiling);
    let gamma = alpha.random_below(rng, 6).expect("alpha positive");
    RetagInstance { p, q, r, alpha, gamma }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn o(s: &str) -> Ordinal {
        s.parse().unwrap()
    }

    fn cond(text: &str) -> Condition {
        parse_condition(text).unwrap()
    }

    #[test]
    fn validity_examples() {
        assert!(is_condition(&Condition::root()));
        let alt = cond(". inf inf\n0 3 2\n");
        assert_eq!(violations(&alt), vec![Violation::Alternation(vec![0])]);
        let descent = cond(". inf inf\n0 5 inf\n0.0 5 4\n0.0.0 3 4\n0.0.0.0 3 6\n");
        assert_eq!(violations(&descent), vec![Violation::Descent(vec![0, 0, 0, 0])]);
        let ok = cond(". inf inf\n0 5 inf\n0.0 5 4\n0.0.0 3 4\n0.0.0.0 3 1\n");
        assert!(is_condition(&ok));
        // a restart to a larger tag frees Closed
        let restart = cond(". inf inf\n0 5 inf\n0.0 5 4\n0.0.0 7 4\n0.0.0.0 7 9\n");
        assert!(is_condition(&restart));
        assert_eq!(violations(&cond("0 inf inf\n")), vec![Violation::MissingRoot, Violation::NotPrefixClosed(vec![0])]);
    }

    #[test]
    fn relations() {
        let p = cond(". inf inf\n0 w*2 inf\n0.0 w*2 1\n");
        assert!(extends(&p, &p));
        let mut q = p.clone();
        q.insert(vec![0, 0, 0], (Tag::nat(3), Tag::nat(1)));
        assert!(extends(&q, &p) && !extends(&p, &q));
        let mut diff = p.clone();
        diff.insert(vec![0, 0], (o("w*2").into(), Tag::nat(2)));
        assert!(!extends(&diff, &p));
        assert!(retag_equiv(&p, &p, &o("w")));
        let higher = cond(". inf inf\n0 w*3 inf\n0.0 w*3 1\n");
        assert!(retag_equiv(&p, &higher, &o("w")));
        assert!(!retag_equiv(&p, &diff, &o("w")));
        let single = cond(". inf inf\n0 5 inf\n");
        assert_eq!(project(&single, &o("3")), cond(". inf inf\n0 inf inf\n"));
        assert_eq!(project(&single, &o("w")), single);
    }

    #[test]
    fn file_round_trip() {
        let c = cond("# c\n. inf inf\n0 w^2+1 inf\n0.2 w^2+1 0\n");
        assert_eq!(print_condition(&c), ". inf inf\n0 w^2+1 inf\n0.2 w^2+1 0\n");
        assert_eq!(cond(&print_condition(&c)), c);
        assert!(matches!(parse_condition(". inf\n"), Err(TaggedError::Syntax { line: 1, .. })));
        assert!(matches!(parse_condition(". inf x\n"), Err(TaggedError::Syntax { .. })));
    }

    #[test]
    fn generated_conditions_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(random_condition(&mut rng, 1, &o("w")), Condition::root());
        for _ in 0..2000 {
            let c = random_condition(&mut rng, 20, &o("w*2"));
            assert!(is_condition(&c), "{}", print_condition(&c));
        }
    }

    #[test]
    fn shrinking_finds_minimal_subtree() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_condition(&mut rng, 30, &o("w"));
        let deep = |c: &Condition| c.domain().any(|n| n.len() >= 2);
        if deep(&c) {
            let s = shrink_condition(&c, deep);
            assert_eq!(s.len(), 3);
            assert!(is_condition(&s));
        }
    }

    #[test]
    fn no_new_nodes_gives_p() {
        let q = cond(". inf inf\n0 w+1 inf\n0.0 w+1 3\n");
        let p = project(&q, &o("w"));
        let inst = RetagInstance { p: p.clone(), q: q.clone(), r: q, alpha: o("w"), gamma: o("2") };
        assert_eq!(retag(&inst).unwrap().r_hat, p);
    }

    #[test]
    fn new_descent_node_is_clipped() {
        let q = cond(". inf inf\n0 w+5 inf\n0.0 w+5 w+9\n");
        let p = project(&q, &o("w"));
        let mut r = q.clone();
        r.insert(vec![0, 0, 0], (o("w+2").into(), o("w+9").into()));
        let inst = RetagInstance { p, q, r, alpha: o("w"), gamma: o("3") };
        let out = retag(&inst).unwrap();
        // the new node is a descent; nothing lies below it
        assert_eq!(out.ranks[&vec![0, 0, 0]], 0);
        assert_eq!(out.gamma_tilde, o("4"));
        assert_eq!(out.r_hat.get(&[0, 0, 0]).unwrap().0, Tag::nat(4));
        assert!(is_condition(&out.r_hat));
    }

    #[test]
    fn after_restart_tags_are_copied() {
        let q = cond(". inf inf\n0 3 inf\n0.0 3 2\n");
        let mut r = q.clone();
        r.insert(vec![0, 0, 0], (Tag::nat(5), Tag::nat(2)));
        r.insert(vec![0, 0, 0, 0], (Tag::nat(5), Tag::nat(9)));
        let inst = RetagInstance { p: q.clone(), q, r: r.clone(), alpha: o("w"), gamma: o("1") };
        let out = retag(&inst).unwrap();
        assert!(out.n.is_empty());
        assert_eq!(out.r_hat, r);
    }

    #[test]
    fn headroom_and_patterns() {
        let q = cond(". inf inf\n0 3 inf\n");
        let inst = RetagInstance { p: q.clone(), q: q.clone(), r: q.clone(), alpha: o("4"), gamma: o("3") };
        assert!(matches!(retag(&inst), Err(TaggedError::InsufficientHeadroom { .. })));
        // p descends where q restarts: Closed is bound in p but free in r
        let p = cond(". inf inf\n0 w+5 inf\n0.0 w+5 2\n0.0.0 w+3 2\n");
        let q = cond(". inf inf\n0 w+1 inf\n0.0 w+1 2\n0.0.0 w+4 2\n");
        let mut r = q.clone();
        r.insert(vec![0, 0, 0, 0], (o("w+4").into(), Tag::nat(7)));
        let inst = RetagInstance { p, q, r, alpha: o("w"), gamma: o("8") };
        assert!(matches!(retag(&inst), Err(TaggedError::RestartPatternMismatch(_))));
        let p = cond(". inf inf\n0 w+5 inf\n0.0 w+5 2\n");
        let q = cond(". inf inf\n0 inf inf\n0.0 inf 2\n");
        let mut r = q.clone();
        r.insert(vec![0, 0, 0], (Tag::nat(3), Tag::nat(2)));
        r.insert(vec![0, 0, 0, 0], (Tag::nat(3), Tag::nat(7)));
        let inst = RetagInstance { p, q, r, alpha: o("w"), gamma: o("1") };
        assert!(matches!(retag(&inst), Err(TaggedError::RestartPatternMismatch(_))));
    }

    #[test]
    fn random_instances_satisfy_the_conclusions() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..1500 {
            let inst = random_instance(&mut rng, 14);
            let out = retag(&inst).unwrap_or_else(|e| panic!("{e}\n{inst:?}"));
            let r_hat = &out.r_hat;
            assert!(is_condition(r_hat), "{:?}\n{}", violations(r_hat), print_condition(r_hat));
            assert!(extends(r_hat, &inst.p));
            assert!(retag_equiv(r_hat, &inst.r, &out.gamma_tilde));
            assert!(retag_equiv(r_hat, &inst.r, &inst.gamma));
        }
    }

    #[test]
    fn projection_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let alpha = Ordinal::random(&mut rng, 2, 2, 4);
            let p = random_condition(&mut rng, 12, &o("w^3"));
            let q = extend_randomly(&mut rng, &p, 6, &o("w^3"));
            let pa = project(&p, &alpha);
            assert!(is_condition(&pa));
            assert!(pa.tags().all(|t| t.is_inf() || t.below(&alpha)));
            assert!(retag_equiv(&pa, &p, &alpha));
            assert!(extends(&project(&q, &alpha), &pa));
        }
    }
}
