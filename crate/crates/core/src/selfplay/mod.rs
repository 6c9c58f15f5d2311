//! Mirrored self-play.
//!
//! Two copies of the board are kept, one the color-swapped transpose of the
//! other. The copy with Red to move is active: the single network always plays
//! Red there, then the move is mirrored onto the other copy, which becomes
//! active. Every decision is therefore seen from the mover's side as Red.

mod eval;
mod train;

pub use eval::Agreement;

pub use eval::{greedy_agreement, reachable_decisions, sign_agreement, Evaluator};
pub use train::{
    run_training, run_training_from, LossRow, MetricRow, RunMetrics, TrainedModel, LOSS_HEADER, METRICS_HEADER, REPLAY_CAPACITY,
};

use rand::Rng;

use crate::action::ActionMask;
use crate::algorithms::{epsilon_greedy, Transition};
use crate::error::{Error, Result};
use crate::hex::{Board, Cell, Outcome, Player};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoardCopy {
    A,
    B,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MirrorGame {
    board_a: Board,
    board_b: Board,
    active: BoardCopy,
    move_count: usize,
    discount: f64,
    /// Boards faced at each decision so far, the current one last.
    history: Vec<Board>,
}

impl MirrorGame {
    /// Empty boards with `first` to move. Transitions use `discount` for the
    /// hand-over to the opponent (−1 for zero-sum values).
    pub fn new(first: BoardCopy, discount: f64) -> MirrorGame {
        let red = Board::empty(Player::Red);
        let (board_a, board_b) = match first {
            BoardCopy::A => (red, red.mirror_transpose()),
            BoardCopy::B => (red.mirror_transpose(), red),
        };
        MirrorGame {
            board_a,
            board_b,
            active: first,
            move_count: 0,
            discount,
            history: vec![red],
        }
    }

    pub fn board_a(&self) -> &Board {
        &self.board_a
    }

    pub fn board_b(&self) -> &Board {
        &self.board_b
    }

    pub fn active(&self) -> BoardCopy {
        self.active
    }

    pub fn move_count(&self) -> usize {
        self.move_count
    }

    pub fn history(&self) -> &[Board] {
        &self.history
    }

    /// The active copy; Red is always to move on it.
    pub fn active_board(&self) -> &Board {
        match self.active {
            BoardCopy::A => &self.board_a,
            BoardCopy::B => &self.board_b,
        }
    }

    pub fn outcome(&self) -> Outcome {
        self.board_a.winner()
    }

    pub fn is_over(&self) -> bool {
        self.outcome() != Outcome::Ongoing
    }

    pub fn mirror_consistent(&self) -> bool {
        self.board_b == self.board_a.mirror_transpose() && self.active_board().to_move() == Player::Red
    }

    /// Plays cell index `a` on the active copy and its transpose on the other.
    /// The returned transition has no next action yet.
    pub fn play(&mut self, a: usize) -> Result<Transition<Board, f64>> {
        if self.is_over() {
            return Err(Error::usage("game is over"));
        }
        if a >= crate::hex::CELLS {
            return Err(Error::usage(format!("action {a} out of range")));
        }
        let s = *self.active_board();
        let cell = Cell::from_index(a);
        let after = s.play(cell)?;
        let mirrored = self.inactive().play(cell.transpose())?;
        let (next_active, s_next) = match self.active {
            BoardCopy::A => {
                self.board_a = after;
                self.board_b = mirrored;
                (BoardCopy::B, mirrored)
            }
            BoardCopy::B => {
                self.board_b = after;
                self.board_a = mirrored;
                (BoardCopy::A, mirrored)
            }
        };
        self.active = next_active;
        self.move_count += 1;
        debug_assert!(self.mirror_consistent());
        let terminal = after.has_chain(Player::Red);
        if !terminal {
            self.history.push(s_next);
        }
        Ok(Transition {
            s,
            a,
            r: if terminal { 1.0 } else { 0.0 },
            s_next,
            legal_next: if terminal { ActionMask::EMPTY } else { s_next.legal_mask() },
            a_next: None,
            terminal,
            discount: self.discount,
        })
    }

    fn inactive(&self) -> &Board {
        match self.active {
            BoardCopy::A => &self.board_b,
            BoardCopy::B => &self.board_a,
        }
    }
}

/// Maximum number of random opening plies for a random start.
pub const RANDOM_START_MAX_PLIES: usize = 4;

/// Picks the first copy uniformly; with `random_start`, plays `k ~ U{0..4}`
/// uniformly random moves, redrawing any prefix that ends the game.
pub fn start_episode<R: Rng + ?Sized>(rng: &mut R, random_start: bool, discount: f64) -> MirrorGame {
    let first = if rng.gen::<bool>() { BoardCopy::A } else { BoardCopy::B };
    if !random_start {
        return MirrorGame::new(first, discount);
    }
    let k = rng.gen_range(0..=RANDOM_START_MAX_PLIES);
    loop {
        let mut g = MirrorGame::new(first, discount);
        let mut ended = false;
        for _ in 0..k {
            let legal = g.active_board().legal_mask();
            let a = legal.nth(rng.gen_range(0..legal.len())).expect("ongoing game has moves");
            if g.play(a).expect("legal move").terminal {
                ended = true;
                break;
            }
        }
        if !ended {
            // The opening is not part of the learner's trajectory.
            g.history = vec![*g.active_board()];
            return g;
        }
    }
}

/// One ε-greedy decision with the evaluator's values. Returns the transition
/// (without next action) and the value of the chosen after-state.
pub fn step_episode<E: Evaluator + ?Sized, R: Rng + ?Sized>(
    g: &mut MirrorGame,
    eval: &E,
    epsilon: f64,
    rng: &mut R,
) -> Result<(Transition<Board, f64>, f64)> {
    if g.is_over() {
        return Err(Error::usage("game is over"));
    }
    let values = eval.decision_values(g.history());
    let a = epsilon_greedy(&values, g.active_board().legal_mask(), epsilon, rng)?;
    Ok((g.play(a)?, values[a]))
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpisodeRecord {
    /// Next actions are filled in; the last transition is terminal.
    pub transitions: Vec<Transition<Board, f64>>,
    /// Decision boards in order (the `s` of every transition).
    pub boards: Vec<Board>,
    pub outcome: Outcome,
    pub after_state_values: Vec<f64>,
}

impl EpisodeRecord {
    pub fn len(&self) -> usize {
        self.transitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transitions.is_empty()
    }

    pub fn mean_after_state_value(&self) -> f64 {
        self.after_state_values.iter().sum::<f64>() / self.after_state_values.len().max(1) as f64
    }
}

/// Plays a whole episode with a fixed evaluator.
pub fn play_episode<E: Evaluator + ?Sized, R: Rng + ?Sized>(
    mut g: MirrorGame,
    eval: &E,
    epsilon: f64,
    rng: &mut R,
) -> Result<EpisodeRecord> {
    let mut transitions: Vec<Transition<Board, f64>> = Vec::new();
    let mut values = Vec::new();
    while !g.is_over() {
        let (t, v) = step_episode(&mut g, eval, epsilon, rng)?;
        if let Some(prev) = transitions.last_mut() {
            prev.a_next = Some(t.a);
        }
        transitions.push(t);
        values.push(v);
    }
    Ok(EpisodeRecord {
        boards: transitions.iter().map(|t| t.s).collect(),
        transitions,
        outcome: g.outcome(),
        after_state_values: values,
    })
}
