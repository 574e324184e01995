//! Clopen and open games on trees of move sequences.
//!
//! Player I moves at positions of even length. A player whose move leaves
//! the tree (or who has no legal move) loses.

mod ordinal_games;
mod solve;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use ordinal_games::{simulate_copy, CopyReport, CopyStrategy, OrdinalGame, RuleKind, Slice};
pub use solve::{
    bar_recursion, kb_cmp, kleene_brouwer, play, rank, safety_table, solve, strategy_from_labels, synthesize_strategy,
    verify_winning, Labeling, NodeInfo, Play, Policy, SafetyTable, Strategy, Verdict,
};

pub const DEFAULT_NODE_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("BudgetExceeded: more than {0} nodes explored")]
    BudgetExceeded(u64),
    #[error("NotPrefixClosed: {0} is missing its parent")]
    NotPrefixClosed(String),
    #[error("SyntaxError at line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("IllegalMove: {0}")]
    IllegalMove(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Player {
    I,
    II,
}

impl Player {
    pub fn to_move(len: usize) -> Player {
        if len.is_multiple_of(2) {
            Player::I
        } else {
            Player::II
        }
    }

    pub fn other(self) -> Player {
        match self {
            Player::I => Player::II,
            Player::II => Player::I,
        }
    }
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::I => "I",
            Player::II => "II",
        })
    }
}

/// A game given by its legal moves. For rule games with infinitely many
/// legal moves, `moves` lists a finite slice while `is_legal` applies the
/// full rule.
pub trait Game {
    type Move: Clone + Ord + Default + fmt::Display + fmt::Debug;

    fn moves(&self, pos: &[Self::Move]) -> Vec<Self::Move>;

    fn is_legal(&self, pos: &[Self::Move], mv: &Self::Move) -> bool;
}

/// A finite prefix-closed set of natural-number sequences, stored in
/// preorder with child indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExplicitTree {
    nodes: Vec<Vec<u64>>,
    children: Vec<Vec<usize>>,
    index: BTreeMap<Vec<u64>, usize>,
}

/// Tree shape with children numbered `0..k`, used for enumeration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shape(pub Vec<Shape>);

impl Shape {
    pub fn size(&self) -> usize {
        1 + self.0.iter().map(Shape::size).sum::<usize>()
    }

    /// Every shape with at most `depth` levels of moves and at most
    /// `branching` children per node.
    pub fn all(depth: usize, branching: usize) -> Vec<Shape> {
        if depth == 0 {
            return vec![Shape(vec![])];
        }
        let sub = Shape::all(depth - 1, branching);
        let mut out = Vec::new();
        let mut stack: Vec<Vec<Shape>> = vec![vec![]];
        while let Some(kids) = stack.pop() {
            if kids.len() < branching {
                for s in &sub {
                    let mut k = kids.clone();
                    k.push(s.clone());
                    stack.push(k);
                }
            }
            out.push(Shape(kids));
        }
        out
    }

    /// Calls `f` on every shape [`Shape::all`] would return, materializing
    /// only the shapes one level down.
    pub fn for_each(depth: usize, branching: usize, mut f: impl FnMut(&Shape)) {
        if depth == 0 {
            f(&Shape(vec![]));
            return;
        }
        let sub = Shape::all(depth - 1, branching);
        for k in 0..=branching {
            let mut idx = vec![0usize; k];
            loop {
                f(&Shape(idx.iter().map(|&i| sub[i].clone()).collect()));
                let Some(pos) = (0..k).rev().find(|&j| idx[j] + 1 < sub.len()) else { break };
                idx[pos] += 1;
                for v in &mut idx[pos + 1..] {
                    *v = 0;
                }
            }
        }
    }

    /// Number of shapes [`Shape::all`] returns.
    pub fn count(depth: usize, branching: usize) -> u64 {
        (0..depth).fold(1u64, |t, _| (0..=branching as u32).map(|k| t.pow(k)).sum())
    }
}

impl ExplicitTree {
    /// Builds the tree from any list of nodes; the root is added implicitly.
    pub fn from_nodes<I: IntoIterator<Item = Vec<u64>>>(nodes: I) -> Result<Self, GameError> {
        let mut set: BTreeSet<Vec<u64>> = nodes.into_iter().collect();
        set.insert(Vec::new());
        for n in &set {
            if let Some((_, init)) = n.split_last() {
                if !set.contains(init) {
                    return Err(GameError::NotPrefixClosed(fmt_node(n)));
                }
            }
        }
        // BTreeSet order on sequences is a preorder with siblings ascending.
        let nodes: Vec<Vec<u64>> = set.into_iter().collect();
        let index: BTreeMap<Vec<u64>, usize> = nodes.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        let mut children = vec![Vec::new(); nodes.len()];
        for (i, n) in nodes.iter().enumerate().skip(1) {
            children[index[&n[..n.len() - 1]]].push(i);
        }
        Ok(ExplicitTree { nodes, children, index })
    }

    pub fn from_shape(shape: &Shape) -> Self {
        let mut nodes = Vec::new();
        let mut stack = vec![(Vec::new(), shape)];
        while let Some((path, s)) = stack.pop() {
            for (i, c) in s.0.iter().enumerate().rev() {
                let mut p = path.clone();
                p.push(i as u64);
                stack.push((p, c));
            }
            nodes.push(path);
        }
        Self::from_nodes(nodes).expect("shapes are prefix closed")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nodes(&self) -> &[Vec<u64>] {
        &self.nodes
    }

    pub fn contains(&self, node: &[u64]) -> bool {
        self.index.contains_key(node)
    }

    pub fn index_of(&self, node: &[u64]) -> Option<usize> {
        self.index.get(node).copied()
    }

    pub fn children_of(&self, i: usize) -> &[usize] {
        &self.children[i]
    }

    pub fn depth(&self) -> usize {
        self.nodes.iter().map(Vec::len).max().unwrap_or(0)
    }
}

impl Game for ExplicitTree {
    type Move = u64;

    fn moves(&self, pos: &[u64]) -> Vec<u64> {
        match self.index.get(pos) {
            Some(&i) => self.children[i].iter().map(|&c| *self.nodes[c].last().expect("child")).collect(),
            None => vec![],
        }
    }

    fn is_legal(&self, pos: &[u64], mv: &u64) -> bool {
        let mut p = pos.to_vec();
        p.push(*mv);
        self.index.contains_key(&p)
    }
}

/// `"."` for the root, else moves separated by spaces.
pub fn fmt_node<M: fmt::Display>(node: &[M]) -> String {
    if node.is_empty() {
        ".".to_string()
    } else {
        node.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(" ")
    }
}

/// Game files: one node per line as space-separated moves, `.` for the
/// root, `#` starting a comment.
pub fn parse_game(text: &str) -> Result<ExplicitTree, GameError> {
    let mut nodes = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line == "." {
            continue;
        }
        let node = line
            .split_whitespace()
            .map(|w| w.parse::<u64>().map_err(|_| GameError::Syntax { line: i + 1, msg: format!("bad move '{w}'") }))
            .collect::<Result<Vec<_>, _>>()?;
        nodes.push(node);
    }
    ExplicitTree::from_nodes(nodes)
}

pub fn print_game(t: &ExplicitTree) -> String {
    t.nodes.iter().map(|n| fmt_node(n) + "\n").collect()
}

/// A random tree with at most `max_nodes` nodes; sibling moves are
/// distinct but not necessarily consecutive.
pub fn random_tree<R: rand::Rng>(rng: &mut R, max_nodes: usize, max_move: u64) -> ExplicitTree {
    let target = rng.random_range(1..=max_nodes.max(1));
    let mut nodes: Vec<Vec<u64>> = vec![vec![]];
    let mut set: BTreeSet<Vec<u64>> = nodes.iter().cloned().collect();
    let mut attempts = 0;
    while nodes.len() < target && attempts < 20 * max_nodes {
        attempts += 1;
        // favour recent nodes to get some depth
        let hi = nodes.len();
        let lo = hi.saturating_sub(8);
        let parent = if rng.random_bool(0.6) { rng.random_range(lo..hi) } else { rng.random_range(0..hi) };
        let mut child = nodes[parent].clone();
        child.push(rng.random_range(0..=max_move));
        if set.insert(child.clone()) {
            nodes.push(child);
        }
    }
    ExplicitTree::from_nodes(nodes).expect("built prefix closed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_counts() {
        assert_eq!(Shape::count(3, 3), 621_436);
        assert_eq!(Shape::count(4, 2), 33_673);
        assert_eq!(Shape::all(2, 2).len() as u64, Shape::count(2, 2));
        assert_eq!(Shape::all(2, 3).len() as u64, Shape::count(2, 3));
        let mut n = 0u64;
        Shape::for_each(3, 2, |_| n += 1);
        assert_eq!(n, Shape::count(3, 2));
    }

    #[test]
    fn parse_and_print() {
        let t = parse_game("# a tree\n.\n0\n1\n1 0\n").unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(print_game(&t), ".\n0\n1\n1 0\n");
        assert_eq!(parse_game(&print_game(&t)).unwrap(), t);
        assert!(matches!(parse_game("0 1\n"), Err(GameError::NotPrefixClosed(_))));
        assert!(matches!(parse_game("x\n"), Err(GameError::Syntax { .. })));
    }

    #[test]
    fn moves_are_sorted_children() {
        let t = ExplicitTree::from_nodes(vec![vec![5], vec![2], vec![2, 9]]).unwrap();
        assert_eq!(t.moves(&[]), vec![2, 5]);
        assert!(t.is_legal(&[2], &9) && !t.is_legal(&[5], &0));
    }
}
