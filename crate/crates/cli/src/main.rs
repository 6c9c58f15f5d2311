use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use hexrl::experiments::manifest::{manifest_text, write_grids};
use hexrl::experiments::{output_dir, plot, run_file, sweep, tournament, Agent, Grid, RunConfig, TournamentConfig};
use hexrl::oracle::{run_baird, solve, BairdAlgorithm, SolveOutcome};
use hexrl::Board;

/// Reinforcement learning experiments on 3×3 Hex.
///
/// Outputs go under `$HEXRL_OUT_DIR` (default `out`).
#[derive(Parser)]
#[command(name = "hexrl", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Train one config; writes `<out>/<config stem>/`.
    Run { cfg: PathBuf },
    /// Train every point of a grid; writes `<out>/<grid stem>/run_NNN/`.
    Sweep { grid: PathBuf },
    /// Like `run` with pretraining forced on.
    Pretrain { cfg: PathBuf },
    /// Play the four-agent tournament described by a tournament file.
    Tournament { cfg: PathBuf },
    /// Render metrics, batch-loss or projection CSVs as an SVG chart.
    Plot {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Solve the board in a text file and list the winning moves.
    Solve { board: PathBuf },
    /// Run the star counterexample and print norm and PBE per step as CSV.
    Baird {
        /// semi_td0, gtd2, tdc or greedy_gq
        alg: String,
        steps: usize,
        #[arg(long, default_value_t = 0.005)]
        alpha: f64,
        #[arg(long, default_value_t = 0.05)]
        beta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the figure manifest: which sweep and plot produce each figure.
    Manifest {
        #[arg(long, default_value_t = 100)]
        episodes: usize,
    },
    /// Write one grid file per figure panel into a directory.
    Grids {
        dir: PathBuf,
        #[arg(long, default_value_t = 100)]
        episodes: usize,
    },
}

fn stem(p: &Path) -> String {
    p.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned())
}

fn main() -> Result<()> {
    let out = output_dir();
    match Cli::parse().cmd {
        Cmd::Run { cfg } => {
            let (dir, m) = run_file(&cfg, &out)?;
            println!("{} episodes -> {}", m.rows.len(), dir.display());
        }
        Cmd::Pretrain { cfg } => {
            let text = fs::read_to_string(&cfg).with_context(|| format!("reading {}", cfg.display()))?;
            let mut c = RunConfig::parse(&text)?;
            c.pretrain = true;
            c.validate()?;
            let dir = out.join(stem(&cfg));
            let m = hexrl::experiments::run(&c, &dir)?;
            println!("{} episodes -> {}", m.rows.len(), dir.display());
        }
        Cmd::Sweep { grid } => {
            let text = fs::read_to_string(&grid).with_context(|| format!("reading {}", grid.display()))?;
            let dir = out.join(stem(&grid));
            let runs = sweep(&Grid::parse(&text)?, &dir)?;
            for (pt, _) in &runs {
                println!("{}  {}", pt.dir_name(), pt.label());
            }
            println!("{} runs -> {}", runs.len(), dir.display());
        }
        Cmd::Tournament { cfg } => {
            let text = fs::read_to_string(&cfg).with_context(|| format!("reading {}", cfg.display()))?;
            let base = cfg.parent().unwrap_or(Path::new("."));
            let t = TournamentConfig::parse(&text, base)?;
            let agents = t
                .agents
                .iter()
                .map(|(name, path)| Agent::load(name.clone(), path).with_context(|| format!("loading {}", path.display())))
                .collect::<Result<Vec<_>>>()?;
            let r = tournament(&agents, t.seasons, t.seed)?;
            fs::create_dir_all(&out)?;
            let csv = out.join(format!("{}.csv", stem(&cfg)));
            fs::write(&csv, r.to_csv())?;
            print!("{}", r.summary());
            println!("games -> {}", csv.display());
        }
        Cmd::Plot { files, out: target } => {
            for written in plot(&files, &target)? {
                println!("{}", written.display());
            }
        }
        Cmd::Solve { board } => {
            let text = fs::read_to_string(&board).with_context(|| format!("reading {}", board.display()))?;
            let b: Board = text.trim().parse()?;
            let r = solve(&b)?;
            let who = match r.outcome {
                SolveOutcome::ToMoveWins => "wins",
                SolveOutcome::ToMoveLoses => "loses",
            };
            println!("{:?} to move {who}", b.to_move());
            let moves: Vec<String> = r.winning_moves.iter().map(ToString::to_string).collect();
            println!("winning moves: {}", if moves.is_empty() { "none".into() } else { moves.join(" ") });
        }
        Cmd::Baird {
            alg,
            steps,
            alpha,
            beta,
            seed,
        } => {
            let a: BairdAlgorithm = alg.parse()?;
            if steps == 0 {
                bail!("steps must be positive");
            }
            println!("step,norm,pbe");
            for (i, p) in run_baird(a, steps, alpha, beta, seed)?.iter().enumerate() {
                println!("{},{:e},{:e}", i + 1, p.norm, p.pbe);
            }
        }
        Cmd::Manifest { episodes } => print!("{}", manifest_text(episodes)),
        Cmd::Grids { dir, episodes } => {
            for p in write_grids(episodes, &dir)? {
                println!("{}", p.display());
            }
        }
    }
    Ok(())
}
