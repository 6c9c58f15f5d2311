use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::hex::{Board, Cell, Outcome, Player, CELLS};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    ToMoveWins,
    ToMoveLoses,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub outcome: SolveOutcome,
    /// Every move after which the opponent is lost, in row-major order.
    pub winning_moves: Vec<Cell>,
}

const KEYS: usize = 19_683; // 3^9

/// `true` when the side to move wins with perfect play, for every stone
/// placement and both sides to move. Terminal boards count as won for the
/// player holding the chain.
fn table() -> &'static [bool] {
    static TABLE: OnceLock<Vec<bool>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut memo: Vec<Option<bool>> = vec![None; 2 * KEYS];
        for key in 0..KEYS {
            for p in [Player::Red, Player::Blue] {
                negamax(Board::from_grid_key(key, p), &mut memo);
            }
        }
        memo.into_iter().map(|v| v.expect("every slot solved")).collect()
    })
}

fn slot(b: &Board) -> usize {
    2 * b.grid_key() + (b.to_move() == Player::Blue) as usize
}

fn negamax(b: Board, memo: &mut [Option<bool>]) -> bool {
    if let Some(v) = memo[slot(&b)] {
        return v;
    }
    let v = match b.winner() {
        Outcome::Ongoing => b
            .legal_moves()
            .into_iter()
            .any(|c| !negamax(b.play(c).expect("legal move"), memo)),
        done => done.winner() == Some(b.to_move()),
    };
    memo[slot(&b)] = Some(v);
    v
}

/// Whether the side to move wins under perfect play (terminal boards included).
pub fn to_move_wins(b: &Board) -> bool {
    table()[slot(b)]
}

/// Exact game-theoretic value of a non-terminal position.
pub fn solve(b: &Board) -> Result<SolveResult> {
    if b.winner() != Outcome::Ongoing {
        return Err(Error::usage("cannot solve a finished game"));
    }
    let winning_moves: Vec<Cell> = b
        .legal_moves()
        .into_iter()
        .filter(|&c| !to_move_wins(&b.play(c).expect("legal move")))
        .collect();
    let outcome = if winning_moves.is_empty() {
        SolveOutcome::ToMoveLoses
    } else {
        SolveOutcome::ToMoveWins
    };
    Ok(SolveResult { outcome, winning_moves })
}

/// `+1` for winning moves, `−1` for losing moves, `None` for occupied cells.
pub fn score_position(b: &Board) -> Result<[Option<f64>; CELLS]> {
    let wins = solve(b)?.winning_moves;
    let mut out = [None; CELLS];
    for c in b.legal_moves() {
        out[c.index()] = Some(if wins.contains(&c) { 1.0 } else { -1.0 });
    }
    Ok(out)
}

/// Row-major cell string such as `..R.B....`.
pub fn grid_string(b: &Board) -> String {
    Cell::all()
        .map(|c| b.get(c).map_or('.', Player::symbol))
        .collect()
}

/// CSV `board,to_move,outcome,winning_moves` over every non-terminal position
/// reachable with Red moving first; winning moves are space-separated cell indices.
pub fn solved_dump() -> String {
    let mut out = String::from("board,to_move,outcome,winning_moves\n");
    for b in Board::reachable(Player::Red) {
        if let Ok(r) = solve(&b) {
            let moves: Vec<String> = r.winning_moves.iter().map(|c| c.index().to_string()).collect();
            let outcome = match r.outcome {
                SolveOutcome::ToMoveWins => "to_move_wins",
                SolveOutcome::ToMoveLoses => "to_move_loses",
            };
            writeln!(out, "{},{},{outcome},{}", grid_string(&b), b.to_move().symbol(), moves.join(" ")).unwrap();
        }
    }
    out
}

/// Optimal after-state values from the Bellman optimality recursion.
///
/// An after-state is valued from the perspective of the player who just
/// moved: `+1` if that move completed a chain, otherwise the negation of the
/// opponent's best after-state value. Values are computed by synchronous
/// sweeps from zero until nothing changes.
#[derive(Clone, Debug)]
pub struct ValueIteration {
    pub values: HashMap<Board, f64>,
    pub sweeps: usize,
}

impl ValueIteration {
    pub fn value(&self, after_state: &Board) -> Option<f64> {
        self.values.get(after_state).copied()
    }

    /// Best after-state value available to the side to move.
    pub fn best_move_value(&self, b: &Board) -> Option<f64> {
        b.legal_moves()
            .into_iter()
            .filter_map(|c| self.value(&b.play(c).ok()?))
            .reduce(f64::max)
    }
}

pub fn tabular_value_iteration() -> ValueIteration {
    let mut states: Vec<Board> = Vec::new();
    for first in [Player::Red, Player::Blue] {
        states.extend(Board::reachable(first).into_iter().filter(|b| b.stone_count(Player::Red) + b.stone_count(Player::Blue) > 0));
    }
    let mut values: HashMap<Board, f64> = states.iter().map(|&b| (b, 0.0)).collect();
    let mut sweeps = 0;
    loop {
        sweeps += 1;
        let mut next = HashMap::with_capacity(values.len());
        for &b in &states {
            let v = if b.winner() != Outcome::Ongoing {
                1.0
            } else {
                let best = b
                    .legal_moves()
                    .into_iter()
                    .map(|c| values[&b.play(c).expect("legal move")])
                    .fold(f64::NEG_INFINITY, f64::max);
                -best
            };
            next.insert(b, v);
        }
        let changed = next.iter().any(|(b, v)| values[b] != *v);
        values = next;
        if !changed {
            break;
        }
    }
    ValueIteration { values, sweeps }
}
