use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{ExplicitTree, Game, GameError, Player};
use crate::ordinal::Ordinal;

/// Nodes reachable from a root in preorder; every child index is larger
/// than its parent's.
struct Arena<M> {
    nodes: Vec<Vec<M>>,
    children: Vec<Vec<usize>>,
}

fn explore<G: Game + ?Sized>(g: &G, root: &[G::Move], budget: u64) -> Result<Arena<G::Move>, GameError> {
    let mut nodes = vec![root.to_vec()];
    let mut children = vec![Vec::new()];
    let mut stack = vec![0usize];
    while let Some(i) = stack.pop() {
        for m in g.moves(&nodes[i]) {
            if nodes.len() as u64 >= budget {
                return Err(GameError::BudgetExceeded(budget));
            }
            let mut c = nodes[i].clone();
            c.push(m);
            nodes.push(c);
            children.push(Vec::new());
            let j = nodes.len() - 1;
            children[i].push(j);
            stack.push(j);
        }
    }
    Ok(Arena { nodes, children })
}

/// Rank, bar-recursion label and safety of one node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NodeInfo {
    /// 0 at leaves, else one more than the largest child rank.
    pub rank: u64,
    /// 1 iff the player to move here wins.
    pub h: u8,
    /// 1 iff player I wins from here; for odd-length nodes this is the
    /// residual game with a padding move in front.
    pub safe: u8,
}

/// The solved tree below some root.
#[derive(Clone, Debug)]
pub struct Labeling<M> {
    nodes: Vec<Vec<M>>,
    children: Vec<Vec<usize>>,
    info: Vec<NodeInfo>,
}

impl<M: Clone + Ord> Labeling<M> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &[M] {
        &self.nodes[0]
    }

    pub fn root_info(&self) -> NodeInfo {
        self.info[0]
    }

    /// The player with a winning strategy from the root.
    pub fn winner(&self) -> Player {
        let mover = Player::to_move(self.nodes[0].len());
        if self.info[0].h == 1 {
            mover
        } else {
            mover.other()
        }
    }

    fn find(&self, node: &[M]) -> Option<usize> {
        let root = &self.nodes[0];
        let rest = node.strip_prefix(root.as_slice())?;
        let mut i = 0;
        for m in rest {
            i = *self.children[i].iter().find(|&&c| self.nodes[c].last() == Some(m))?;
        }
        Some(i)
    }

    pub fn get(&self, node: &[M]) -> Option<NodeInfo> {
        self.find(node).map(|i| self.info[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vec<M>, &NodeInfo)> {
        self.nodes.iter().zip(&self.info)
    }

    /// Moves from `node` to children whose mover loses, ascending.
    pub fn winning_moves(&self, node: &[M]) -> Vec<M> {
        let Some(i) = self.find(node) else { return vec![] };
        let mut out: Vec<M> = self.children[i]
            .iter()
            .filter(|&&c| self.info[c].h == 0)
            .map(|&c| self.nodes[c].last().expect("child").clone())
            .collect();
        out.sort();
        out
    }
}

fn label<M: Clone>(arena: Arena<M>) -> Labeling<M> {
    let n = arena.nodes.len();
    let mut info = vec![NodeInfo { rank: 0, h: 0, safe: 0 }; n];
    for i in (0..n).rev() {
        let kids = &arena.children[i];
        let h = u8::from(kids.iter().any(|&c| info[c].h == 0));
        let rank = kids.iter().map(|&c| info[c].rank + 1).max().unwrap_or(0);
        let safe = if arena.nodes[i].len().is_multiple_of(2) { h } else { 1 - h };
        info[i] = NodeInfo { rank, h, safe };
    }
    Labeling { nodes: arena.nodes, children: arena.children, info }
}

/// Solves the whole game tree, exploring at most `budget` nodes.
pub fn solve<G: Game + ?Sized>(g: &G, budget: u64) -> Result<Labeling<G::Move>, GameError> {
    Ok(label(explore(g, &[], budget)?))
}

/// Solves an explicit tree without re-deriving its structure.
impl ExplicitTree {
    pub fn solve(&self) -> Labeling<u64> {
        label(Arena {
            nodes: self.nodes().to_vec(),
            children: (0..self.len()).map(|i| self.children_of(i).to_vec()).collect(),
        })
    }
}

/// Rank of the subtree below `node`.
pub fn rank<G: Game + ?Sized>(g: &G, node: &[G::Move], budget: u64) -> Result<Ordinal, GameError> {
    if let Some((last, init)) = node.split_last() {
        if !g.is_legal(init, last) {
            return Err(GameError::IllegalMove(super::fmt_node(node)));
        }
    }
    Ok(Ordinal::nat(label(explore(g, node, budget)?).root_info().rank))
}

/// The 0/1 labeling `h` with `h(σ) = 0` iff every child has `h = 1`.
pub fn bar_recursion<G: Game + ?Sized>(g: &G, budget: u64) -> Result<BTreeMap<Vec<G::Move>, u8>, GameError> {
    Ok(solve(g, budget)?.iter().map(|(n, i)| (n.clone(), i.h)).collect())
}

/// Rank and safety per node.
pub type SafetyTable<M> = BTreeMap<Vec<M>, (Ordinal, u8)>;

/// Rank and safety of every node.
pub fn safety_table<G: Game + ?Sized>(g: &G, budget: u64) -> Result<SafetyTable<G::Move>, GameError> {
    Ok(solve(g, budget)?.iter().map(|(n, i)| (n.clone(), (Ordinal::nat(i.rank), i.safe))).collect())
}

/// Anything that picks a move at a position; `None` means no move.
pub trait Policy<M> {
    fn choose(&self, pos: &[M]) -> Option<M>;
}

impl<M, F: Fn(&[M]) -> Option<M>> Policy<M> for F {
    fn choose(&self, pos: &[M]) -> Option<M> {
        self(pos)
    }
}

/// A table of moves with a fallback for positions it does not mention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy<M> {
    pub table: BTreeMap<Vec<M>, M>,
    pub default: Option<M>,
}

impl<M: Clone + Ord> Policy<M> for Strategy<M> {
    fn choose(&self, pos: &[M]) -> Option<M> {
        self.table.get(pos).cloned().or_else(|| self.default.clone())
    }
}

/// At each of `player`'s nodes, the least move to a node whose mover loses;
/// the default move where there is none.
pub fn strategy_from_labels<M: Clone + Ord + Default>(lab: &Labeling<M>, player: Player) -> Strategy<M> {
    let mut table = BTreeMap::new();
    for (i, node) in lab.nodes.iter().enumerate() {
        if Player::to_move(node.len()) != player {
            continue;
        }
        let best = lab.children[i]
            .iter()
            .filter(|&&c| lab.info[c].h == 0)
            .map(|&c| lab.nodes[c].last().expect("child").clone())
            .min();
        table.insert(node.clone(), best.unwrap_or_default());
    }
    Strategy { table, default: Some(M::default()) }
}

/// The winner at the root and the least-winning-move strategy for them.
pub fn synthesize_strategy<G: Game + ?Sized>(g: &G, budget: u64) -> Result<(Player, Strategy<G::Move>), GameError> {
    let lab = solve(g, budget)?;
    let w = lab.winner();
    Ok((w, strategy_from_labels(&lab, w)))
}

/// Whether `policy` wins for `player` against every opponent move
/// sequence (over the listed moves) from the root.
pub fn verify_winning<G: Game + ?Sized>(
    g: &G,
    player: Player,
    policy: &dyn Policy<G::Move>,
    budget: u64,
) -> Result<bool, GameError> {
    let mut stack = vec![Vec::new()];
    let mut seen = 0u64;
    while let Some(pos) = stack.pop() {
        seen += 1;
        if seen > budget {
            return Err(GameError::BudgetExceeded(budget));
        }
        if Player::to_move(pos.len()) == player {
            match policy.choose(&pos) {
                Some(m) if g.is_legal(&pos, &m) => {
                    let mut c = pos;
                    c.push(m);
                    stack.push(c);
                }
                _ => return Ok(false),
            }
        } else {
            for m in g.moves(&pos) {
                let mut c = pos.clone();
                c.push(m);
                stack.push(c);
            }
        }
    }
    Ok(true)
}

/// How a simulated play ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Closed (player II) left the tree.
    OpenWins,
    /// Open (player I) left the tree.
    ClosedWins,
    /// Nobody left the tree before the horizon; only a verdict so far.
    ClosedWinsSoFar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play<M> {
    pub moves: Vec<M>,
    /// Length of the first prefix outside the tree, if any.
    pub exit: Option<usize>,
    pub winner: Option<Player>,
    pub horizon_limited: bool,
}

impl<M> Play<M> {
    pub fn verdict(&self) -> Verdict {
        match self.winner {
            Some(Player::I) => Verdict::OpenWins,
            Some(Player::II) => Verdict::ClosedWins,
            None => Verdict::ClosedWinsSoFar,
        }
    }
}

/// Interleaves `sigma` (player I) and `pi` (player II) for at most
/// `horizon` moves.
pub fn play<G: Game + ?Sized>(
    g: &G,
    sigma: &dyn Policy<G::Move>,
    pi: &dyn Policy<G::Move>,
    horizon: usize,
) -> Play<G::Move> {
    let mut moves: Vec<G::Move> = Vec::new();
    while moves.len() < horizon {
        let mover = Player::to_move(moves.len());
        let choice = match mover {
            Player::I => sigma.choose(&moves),
            Player::II => pi.choose(&moves),
        };
        let legal = choice.as_ref().is_some_and(|m| g.is_legal(&moves, m));
        let exit = moves.len() + 1;
        if let Some(m) = choice {
            moves.push(m);
        }
        if !legal {
            return Play { moves, exit: Some(exit), winner: Some(mover.other()), horizon_limited: false };
        }
    }
    Play { moves, exit: None, winner: None, horizon_limited: true }
}

/// Kleene–Brouwer order: proper extensions come first, otherwise the
/// first differing move decides.
pub fn kb_cmp<M: Ord>(a: &[M], b: &[M]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x.cmp(y);
        }
    }
    b.len().cmp(&a.len())
}

/// The nodes of `t` in Kleene–Brouwer order.
pub fn kleene_brouwer(t: &ExplicitTree) -> Vec<Vec<u64>> {
    let mut v = t.nodes().to_vec();
    v.sort_by(|a, b| kb_cmp(a, b));
    v
}
