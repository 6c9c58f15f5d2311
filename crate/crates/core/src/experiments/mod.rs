//! Experiment descriptions, sweeps, pretraining, tournaments and plots.

mod config;
pub mod manifest;
mod plot;
mod pretrain;
mod run;
mod sweep;
mod tournament;

pub use config::{Algorithm, Approximator, RunConfig, ValueTarget, KEYS};
pub use plot::{plot, read_series, render_svg, Series, SeriesKind, MAX_POINTS};
pub use pretrain::{
    pretrain, pretrain_mse, random_position, PRETRAIN_LR, PRETRAIN_MAX_EPOCHS, PRETRAIN_MINIBATCH, PRETRAIN_MSE_GOAL,
    PRETRAIN_TARGET,
};
pub use run::{output_dir, run, run_file, OUT_DIR_ENV};
pub use sweep::{sweep, Axis, Grid, SweepPoint, BETA_RATIO};
pub use tournament::{
    play_game, tournament, Agent, GameRecord, Tally, TournamentConfig, TournamentResult, AGENTS, GAMES_PER_TOURNAMENT,
    REFERENCE_TOTAL_WINS, TOURNAMENTS_PER_SEASON,
};
