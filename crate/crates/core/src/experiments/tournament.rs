//! Round-robin tournaments between four trained agents.
//!
//! A season is ten tournaments. In a tournament every ordered pair of distinct
//! agents plays one game, the first-named agent moving first (12 games).
//! Agents play greedily. Both games of a pair start from the same random
//! opening of one move per side, drawn afresh for every pair and tournament,
//! so repeated pairings are not identical.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algorithms::greedy;
use crate::error::{Error, Result};
use crate::hex::{Board, Cell, Outcome, Player};
use crate::neural::read_checkpoint;
use crate::selfplay::{Evaluator, TrainedModel};

use super::config::entries;

pub const AGENTS: usize = 4;
pub const TOURNAMENTS_PER_SEASON: usize = 10;
pub const GAMES_PER_TOURNAMENT: usize = AGENTS * (AGENTS - 1);

/// Published total wins, for display next to reproduced tallies.
pub const REFERENCE_TOTAL_WINS: [(&str, usize); AGENTS] =
    [("CNN-MSE", 58), ("CNN-PBE", 73), ("RNN-MSE", 54), ("RNN-PBE", 56)];

pub struct Agent {
    pub name: String,
    pub evaluator: Box<dyn Evaluator + Send + Sync>,
}

impl Agent {
    pub fn new(name: impl Into<String>, model: &TrainedModel) -> Agent {
        Agent {
            name: name.into(),
            evaluator: model.evaluator(),
        }
    }

    pub fn load(name: impl Into<String>, path: &Path) -> Result<Agent> {
        Ok(Agent::new(name, &TrainedModel::from_checkpoint(read_checkpoint(path)?)?))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Tally {
    pub first_games: usize,
    pub first_wins: usize,
    pub second_games: usize,
    pub second_wins: usize,
}

impl Tally {
    pub fn wins(&self) -> usize {
        self.first_wins + self.second_wins
    }

    fn add(&mut self, o: &Tally) {
        self.first_games += o.first_games;
        self.first_wins += o.first_wins;
        self.second_games += o.second_games;
        self.second_wins += o.second_wins;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameRecord {
    pub season: usize,
    pub tournament: usize,
    pub first: usize,
    pub second: usize,
    pub first_won: bool,
    pub moves: Vec<Cell>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TournamentResult {
    pub names: Vec<String>,
    /// `seasons[s][agent]`.
    pub seasons: Vec<[Tally; AGENTS]>,
    pub games: Vec<GameRecord>,
}

impl TournamentResult {
    pub fn totals(&self) -> [Tally; AGENTS] {
        let mut t = [Tally::default(); AGENTS];
        for season in &self.seasons {
            for (acc, s) in t.iter_mut().zip(season) {
                acc.add(s);
            }
        }
        t
    }

    pub fn games_in(&self, season: usize, tournament: usize) -> usize {
        self.games.iter().filter(|g| g.season == season && g.tournament == tournament).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("season,agent,first_games,first_wins,second_games,second_wins\n");
        let totals = self.totals();
        let rows = self.seasons.iter().enumerate().map(|(s, t)| ((s + 1).to_string(), t)).chain([("total".to_string(), &totals)]);
        for (season, tallies) in rows {
            for (name, t) in self.names.iter().zip(tallies) {
                writeln!(out, "{season},{name},{},{},{},{}", t.first_games, t.first_wins, t.second_games, t.second_wins).unwrap();
            }
        }
        out
    }

    /// Text table of total wins beside the published reference totals.
    pub fn summary(&self) -> String {
        let mut out = String::from("agent        wins  (first/second)  reference\n");
        for (i, (name, t)) in self.names.iter().zip(self.totals()).enumerate() {
            let (rname, rwins) = REFERENCE_TOTAL_WINS[i];
            writeln!(out, "{name:<12} {:>4}  ({:>3}/{:<3})       {rname} {rwins}", t.wins(), t.first_wins, t.second_wins).unwrap();
        }
        out
    }
}

/// Plays one greedy game from `opening`; returns whether the first player won
/// and the full move list. Each agent sees the board from its own side, Blue
/// through the mirror.
pub fn play_game(first: &dyn Evaluator, second: &dyn Evaluator, opening: &[Cell]) -> Result<(bool, Vec<Cell>)> {
    let mut b = Board::new();
    let mut moves = Vec::new();
    for &c in opening {
        b = b.play(c)?;
        moves.push(c);
    }
    let mut histories: [Vec<Board>; 2] = [Vec::new(), Vec::new()];
    while b.winner() == Outcome::Ongoing {
        let side = (b.to_move() == Player::Blue) as usize;
        let view = if side == 1 { b.mirror_transpose() } else { b };
        histories[side].push(view);
        let agent = if side == 0 { first } else { second };
        let m = Cell::from_index(greedy(&agent.decision_values(&histories[side]), view.legal_mask())?);
        let c = if side == 1 { m.transpose() } else { m };
        b = b.play(c)?;
        moves.push(c);
    }
    Ok((b.winner() == Outcome::RedWins, moves))
}

pub fn tournament(agents: &[Agent], seasons: usize, seed: u64) -> Result<TournamentResult> {
    if agents.len() != AGENTS {
        return Err(Error::usage(format!("a tournament needs exactly {AGENTS} agents, got {}", agents.len())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut result = TournamentResult {
        names: agents.iter().map(|a| a.name.clone()).collect(),
        seasons: Vec::with_capacity(seasons),
        games: Vec::new(),
    };
    for season in 0..seasons {
        let mut tallies = [Tally::default(); AGENTS];
        for tn in 0..TOURNAMENTS_PER_SEASON {
            for i in 0..AGENTS {
                for j in i + 1..AGENTS {
                    let a = Cell::from_index(rng.gen_range(0..9));
                    let mut b = Cell::from_index(rng.gen_range(0..8));
                    if b.index() >= a.index() {
                        b = Cell::from_index(b.index() + 1);
                    }
                    for (f, s) in [(i, j), (j, i)] {
                        let (first_won, moves) = play_game(&*agents[f].evaluator, &*agents[s].evaluator, &[a, b])?;
                        tallies[f].first_games += 1;
                        tallies[s].second_games += 1;
                        if first_won {
                            tallies[f].first_wins += 1;
                        } else {
                            tallies[s].second_wins += 1;
                        }
                        result.games.push(GameRecord {
                            season,
                            tournament: tn,
                            first: f,
                            second: s,
                            first_won,
                            moves,
                        });
                    }
                }
            }
        }
        result.seasons.push(tallies);
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TournamentConfig {
    /// `(name, checkpoint path)` in file order.
    pub agents: Vec<(String, PathBuf)>,
    pub seasons: usize,
    pub seed: u64,
}

impl TournamentConfig {
    /// ```text
    /// seasons = 2
    /// seed = 0
    /// agent.CNN-MSE = runs/cnn_mse/checkpoint.bin
    /// ```
    /// Relative agent paths are resolved against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<TournamentConfig> {
        let mut cfg = TournamentConfig {
            agents: Vec::new(),
            seasons: 2,
            seed: 0,
        };
        for (k, v) in entries(text)? {
            match k.as_str() {
                "seasons" => cfg.seasons = v.parse().map_err(|_| Error::config("seasons", format!("not a count: {v:?}")))?,
                "seed" => cfg.seed = v.parse().map_err(|_| Error::config("seed", format!("not an integer: {v:?}")))?,
                other => {
                    let name = other.strip_prefix("agent.").ok_or_else(|| Error::config(other, "unknown key"))?;
                    cfg.agents.push((name.to_string(), base.join(v)));
                }
            }
        }
        if cfg.agents.len() != AGENTS {
            return Err(Error::config("agent", format!("expected {AGENTS} agents, got {}", cfg.agents.len())));
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::TabularValues;

    fn agents() -> Vec<Agent> {
        (0..4)
            .map(|i| {
                let mut t = TabularValues::<f64>::new();
                for (k, v) in t.params_mut().iter_mut().enumerate() {
                    *v = ((k * (i + 3)) % 7) as f64;
                }
                Agent::new(format!("a{i}"), &TrainedModel::Tabular(t))
            })
            .collect()
    }

    #[test]
    fn bookkeeping_identities() {
        let r = tournament(&agents(), 2, 1).unwrap();
        assert_eq!(r.games.len(), 2 * TOURNAMENTS_PER_SEASON * GAMES_PER_TOURNAMENT);
        for season in &r.seasons {
            for t in season {
                assert_eq!((t.first_games, t.second_games), (30, 30));
            }
            let wins: usize = season.iter().map(Tally::wins).sum();
            assert_eq!(wins, TOURNAMENTS_PER_SEASON * GAMES_PER_TOURNAMENT);
        }
        assert_eq!(r.games_in(1, 3), 12);
        assert_eq!(r, tournament(&agents(), 2, 1).unwrap());
    }

    #[test]
    fn wrong_agent_count_is_rejected() {
        let mut a = agents();
        a.pop();
        assert!(matches!(tournament(&a, 1, 0), Err(Error::Usage(_))));
    }
}
