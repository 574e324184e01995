//! The descending-ordinal games `G_α` and `O_α`.
//!
//! In `G_α` both players build strictly decreasing sequences of ordinals
//! below α, each on their own sequence. `O_α` lets player I start over at
//! any time with an ordinal below α; a move of I that is not below her
//! previous move is such a restart, and II's reply to it is unconstrained.

use std::fmt;

use super::solve::Policy;
use super::{Game, GameError, Player};
use crate::ordinal::Ordinal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleKind {
    G,
    O,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleKind::G => "G",
            RuleKind::O => "O",
        })
    }
}

/// Which legal moves `moves` lists at a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Slice {
    /// The predecessor of the bound, 0 and the probes below the bound,
    /// largest first, at most `max_branching` of them.
    Probes { probes: Vec<Ordinal>, max_branching: usize },
    /// Every ordinal below the bound; needs a finite α.
    Full,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrdinalGame {
    pub kind: RuleKind,
    pub alpha: Ordinal,
    pub slice: Slice,
}

impl OrdinalGame {
    pub fn new(kind: RuleKind, alpha: Ordinal, slice: Slice) -> Result<Self, GameError> {
        if alpha.is_zero() {
            return Err(GameError::IllegalMove("alpha must be positive".into()));
        }
        if slice == Slice::Full && !alpha.is_finite() {
            return Err(GameError::IllegalMove(format!("full slice needs a finite alpha, got {alpha}")));
        }
        Ok(OrdinalGame { kind, alpha, slice })
    }

    /// Whether I's move at index `i` (even) of `pos` is a restart in `O_α`.
    /// The opening move counts as one.
    pub fn is_restart(&self, pos: &[Ordinal], i: usize) -> bool {
        self.kind == RuleKind::O && (i < 2 || pos[i] >= pos[i - 2])
    }

    /// Strict upper bound for the next move under the descent rule, which
    /// for I in `O_α` ignores restarts.
    fn bound(&self, pos: &[Ordinal]) -> Ordinal {
        let n = pos.len();
        match Player::to_move(n) {
            Player::I if n >= 2 => pos[n - 2].clone(),
            Player::II if n >= 3 && !self.is_restart(pos, n - 1) => pos[n - 2].clone(),
            _ => self.alpha.clone(),
        }
    }

    fn below(&self, bound: &Ordinal) -> Vec<Ordinal> {
        match &self.slice {
            Slice::Full => (0..bound.as_nat().expect("finite bound")).map(Ordinal::nat).collect(),
            Slice::Probes { probes, max_branching } => {
                let mut c: Vec<Ordinal> = bound.pred().into_iter().collect();
                if !bound.is_zero() {
                    c.push(Ordinal::zero());
                }
                let mut ps: Vec<&Ordinal> = probes.iter().filter(|p| *p < bound).collect();
                ps.sort_by(|a, b| b.cmp(a));
                for p in ps {
                    if !c.contains(p) {
                        c.push(p.clone());
                    }
                }
                c.truncate(*max_branching);
                c
            }
        }
    }
}

impl Game for OrdinalGame {
    type Move = Ordinal;

    fn moves(&self, pos: &[Ordinal]) -> Vec<Ordinal> {
        let bound = self.bound(pos);
        let mut out = self.below(&bound);
        if self.kind == RuleKind::O && Player::to_move(pos.len()) == Player::I && pos.len() >= 2 {
            // one restart: the largest slice candidate below α not below the bound
            if let Some(r) = self.below(&self.alpha).into_iter().filter(|m| *m >= bound).max() {
                if let Slice::Probes { max_branching, .. } = self.slice {
                    out.truncate(max_branching.saturating_sub(1));
                }
                out.push(r);
            } else if self.slice == Slice::Full {
                out = self.below(&self.alpha);
            }
        }
        out.sort();
        out.dedup();
        out
    }

    fn is_legal(&self, pos: &[Ordinal], mv: &Ordinal) -> bool {
        if *mv >= self.alpha {
            return false;
        }
        let restarts = self.kind == RuleKind::O && Player::to_move(pos.len()) == Player::I;
        restarts || *mv < self.bound(pos)
    }
}

/// Player II repeats I's last move.
#[derive(Clone, Copy, Debug, Default)]
pub struct CopyStrategy;

impl Policy<Ordinal> for CopyStrategy {
    fn choose(&self, pos: &[Ordinal]) -> Option<Ordinal> {
        pos.last().cloned()
    }
}

/// Outcome counts of the copy strategy against every sliced I-sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CopyReport {
    /// Plays where I ran out of moves.
    pub i_stuck: u64,
    /// Plays that reached the horizon.
    pub survived: u64,
    /// Positions where the copied move was illegal for II.
    pub failures: Vec<Vec<Ordinal>>,
}

impl CopyReport {
    pub fn plays(&self) -> u64 {
        self.i_stuck + self.survived + self.failures.len() as u64
    }

    pub fn copy_wins(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Plays the copy strategy against all of I's sliced move sequences up to
/// `horizon` moves in total.
pub fn simulate_copy(game: &OrdinalGame, horizon: usize) -> CopyReport {
    let mut report = CopyReport::default();
    let mut stack: Vec<Vec<Ordinal>> = vec![Vec::new()];
    while let Some(pos) = stack.pop() {
        if pos.len() >= horizon {
            report.survived += 1;
            continue;
        }
        match Player::to_move(pos.len()) {
            Player::I => {
                let ms = game.moves(&pos);
                if ms.is_empty() {
                    report.i_stuck += 1;
                }
                for m in ms {
                    let mut c = pos.clone();
                    c.push(m);
                    stack.push(c);
                }
            }
            Player::II => match CopyStrategy.choose(&pos) {
                Some(m) if game.is_legal(&pos, &m) => {
                    let mut c = pos;
                    c.push(m);
                    stack.push(c);
                }
                _ => report.failures.push(pos),
            },
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{play, solve, verify_winning, Verdict, DEFAULT_NODE_BUDGET};
    use crate::ordinal::parse_ordinal;

    fn ord(s: &str) -> Ordinal {
        parse_ordinal(s).unwrap()
    }

    fn probes(list: &[&str]) -> Slice {
        Slice::Probes { probes: list.iter().map(|s| ord(s)).collect(), max_branching: 4 }
    }

    #[test]
    fn g_one_is_won_by_ii() {
        let g = OrdinalGame::new(RuleKind::G, Ordinal::nat(1), Slice::Full).unwrap();
        assert_eq!(g.moves(&[]), vec![Ordinal::zero()]);
        assert_eq!(g.moves(&[Ordinal::zero()]), vec![Ordinal::zero()]);
        assert!(g.moves(&[Ordinal::zero(), Ordinal::zero()]).is_empty());
        assert_eq!(solve(&g, DEFAULT_NODE_BUDGET).unwrap().winner(), Player::II);
    }

    #[test]
    fn moves_stay_below_alpha() {
        let g = OrdinalGame::new(RuleKind::G, Ordinal::omega(), probes(&["3", "w"])).unwrap();
        assert!(!g.is_legal(&[], &Ordinal::omega()));
        assert!(g.is_legal(&[], &Ordinal::nat(1000)));
        assert!(g.moves(&[]).iter().all(|m| *m < Ordinal::omega()));
        assert!(OrdinalGame::new(RuleKind::G, Ordinal::omega(), Slice::Full).is_err());
    }

    #[test]
    fn restart_frees_ii() {
        let o = OrdinalGame::new(RuleKind::O, Ordinal::omega(), probes(&["5"])).unwrap();
        let g = OrdinalGame::new(RuleKind::G, Ordinal::omega(), probes(&["5"])).unwrap();
        let pos: Vec<Ordinal> = [2, 2, 1, 1].into_iter().map(Ordinal::nat).collect();
        assert!(o.is_legal(&pos, &Ordinal::nat(5)) && !g.is_legal(&pos, &Ordinal::nat(5)));
        let mut after = pos.clone();
        after.push(Ordinal::nat(5));
        assert!(o.is_restart(&after, 4));
        assert!(o.is_legal(&after, &Ordinal::nat(5)));
        assert!(o.is_legal(&after, &Ordinal::nat(9)));
        assert!(o.moves(&pos).contains(&Ordinal::nat(5)));
    }

    #[test]
    fn copy_in_g5() {
        let g = OrdinalGame::new(RuleKind::G, Ordinal::nat(5), Slice::Full).unwrap();
        let script: Vec<Ordinal> = [3, 1, 0].into_iter().map(Ordinal::nat).collect();
        let i = |pos: &[Ordinal]| script.get(pos.len() / 2).cloned();
        let p = play(&g, &i, &CopyStrategy, 16);
        assert_eq!(p.moves, [3, 3, 1, 1, 0, 0].into_iter().map(Ordinal::nat).collect::<Vec<_>>());
        assert_eq!(p.winner, Some(Player::II));
        assert!(verify_winning(&g, Player::II, &CopyStrategy, DEFAULT_NODE_BUDGET).unwrap());
        assert_eq!(solve(&g, DEFAULT_NODE_BUDGET).unwrap().winner(), Player::II);
    }

    #[test]
    fn copy_survives_restarts() {
        let o = OrdinalGame::new(RuleKind::O, Ordinal::omega(), probes(&["0", "1", "4"])).unwrap();
        // restart to 4 every other turn, else step down
        let i = |pos: &[Ordinal]| {
            let k = pos.len() / 2;
            Some(if k.is_multiple_of(2) { Ordinal::nat(4) } else { Ordinal::nat(2) })
        };
        let p = play(&o, &i, &CopyStrategy, 20);
        assert_eq!(p.verdict(), Verdict::ClosedWinsSoFar);
        for alpha in ["5", "w", "w*2+3", "w^2"] {
            for kind in [RuleKind::G, RuleKind::O] {
                let game = OrdinalGame::new(kind, ord(alpha), probes(&["0", "1", "w", "w+1", "w*2+1"])).unwrap();
                let r = simulate_copy(&game, 12);
                assert!(r.copy_wins(), "{kind}_{alpha}: {:?}", r.failures.first());
                assert!(r.plays() > 0);
            }
        }
    }

    #[test]
    fn sliced_g_is_won_by_ii() {
        for alpha in ["3", "w", "w*2+3"] {
            let g = OrdinalGame::new(RuleKind::G, ord(alpha), probes(&["1", "w", "w+2"])).unwrap();
            assert_eq!(solve(&g, DEFAULT_NODE_BUDGET).unwrap().winner(), Player::II);
        }
    }
}
