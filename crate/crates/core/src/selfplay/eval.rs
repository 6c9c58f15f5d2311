//! Oracle comparisons of trained evaluators.

use crate::algorithms::{greedy, NeuralValues, RnnValues, SeqState, TabularValues, ValueFunction};
use crate::hex::{Board, Player};
use crate::neural::{RNN_DEPTH, OUTPUTS};
use crate::oracle::{solve, to_move_wins};

/// Action values for the latest board of a decision history.
pub trait Evaluator {
    /// `history` holds the boards faced so far this episode, each with Red to
    /// move, the current decision last.
    fn decision_values(&self, history: &[Board]) -> [f64; OUTPUTS];
}

impl Evaluator for NeuralValues<f64> {
    fn decision_values(&self, history: &[Board]) -> [f64; OUTPUTS] {
        self.values(history.last().expect("nonempty history"))
    }
}

impl Evaluator for TabularValues<f64> {
    fn decision_values(&self, history: &[Board]) -> [f64; OUTPUTS] {
        self.values(history.last().expect("nonempty history"))
    }
}

impl Evaluator for RnnValues<f64> {
    fn decision_values(&self, history: &[Board]) -> [f64; OUTPUTS] {
        let window = &history[history.len().saturating_sub(RNN_DEPTH)..];
        let seq = SeqState::padded(window).expect("window fits the depth");
        self.values(&SeqState { seq, t: window.len() - 1 })
    }
}

/// Every non-terminal board a self-play learner can face: Red to move, from
/// games opened by either color, deduplicated and sorted.
pub fn reachable_decisions() -> Vec<Board> {
    let mut out: Vec<Board> = [Player::Red, Player::Blue]
        .into_iter()
        .flat_map(Board::reachable)
        .filter(|b| b.to_move() == Player::Red && !b.legal_moves().is_empty())
        .collect();
    out.sort_by_key(Board::grid_key);
    out.dedup();
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Agreement {
    pub agree: usize,
    pub total: usize,
}

impl Agreement {
    pub fn fraction(&self) -> f64 {
        self.agree as f64 / self.total.max(1) as f64
    }
}

/// Share of winnable decision boards on which the greedy move wins.
/// Each board is evaluated on its own, as the start of a history.
pub fn greedy_agreement<E: Evaluator + ?Sized>(eval: &E) -> Agreement {
    let mut a = Agreement { agree: 0, total: 0 };
    for b in reachable_decisions() {
        if !to_move_wins(&b) {
            continue;
        }
        let m = greedy(&eval.decision_values(&[b]), b.legal_mask()).expect("legal moves");
        let winning = solve(&b).expect("non-terminal").winning_moves;
        a.total += 1;
        a.agree += winning.iter().any(|c| c.index() == m) as usize;
    }
    a
}

/// Share of (decision board, legal move) pairs whose after-state value has the
/// sign of the oracle result for the mover (+1 win, −1 loss). Zero values
/// agree with neither.
pub fn sign_agreement<E: Evaluator + ?Sized>(eval: &E) -> Agreement {
    let mut a = Agreement { agree: 0, total: 0 };
    for b in reachable_decisions() {
        let values = eval.decision_values(&[b]);
        for m in b.legal_mask().iter() {
            let after = b.play_index(m).expect("legal");
            let mover_wins = after.has_chain(Player::Red) || !to_move_wins(&after);
            a.total += 1;
            a.agree += if mover_wins { values[m] > 0.0 } else { values[m] < 0.0 } as usize;
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_tabular_values_agree_perfectly() {
        let mut t = TabularValues::<f64>::new();
        for b in reachable_decisions() {
            for m in b.legal_mask().iter() {
                let after = b.play_index(m).unwrap();
                let win = after.has_chain(Player::Red) || !to_move_wins(&after);
                t.params_mut()[TabularValues::<f64>::index(&b, m)] = if win { 1.0 } else { -1.0 };
            }
        }
        assert_eq!(sign_agreement(&t).fraction(), 1.0);
        assert_eq!(greedy_agreement(&t).fraction(), 1.0);
        assert_eq!(sign_agreement(&TabularValues::<f64>::new()).agree, 0);
    }

    #[test]
    fn decision_boards_have_red_to_move() {
        let ds = reachable_decisions();
        assert!(ds.iter().all(|b| b.to_move() == Player::Red && b.winner() == crate::hex::Outcome::Ongoing));
        assert!(ds.contains(&Board::new()));
    }
}
