//! Which sweep and plot reproduce each figure family of the after-state
//! value, batch-loss and projection-error results.

use super::sweep::Grid;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlotInput {
    /// `run_*/metrics.csv` of the panel's sweep.
    Metrics,
    /// `run_*/batch_loss.csv` and `run_*/projection.csv`.
    BatchLoss,
    /// `run_*/projection.csv` only.
    Projection,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub id: String,
    pub grid: String,
    pub runs: usize,
    pub plot: PlotInput,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Figure {
    pub number: u32,
    pub title: &'static str,
    pub panels: Vec<Panel>,
}

const ALPHAS: &str = "0.0001, 0.001, 0.01, 0.1";
const RATIOS: &str = "0.01, 0.1, 1, 10, 100";
const EPSILONS: &str = "0.0001, 0.01, 0.1, 0.5, 0.99";
const LAMBDAS: &str = "0, 0.01, 0.1, 0.5, 1";
const POLICY_ALPHAS: &str = "0.001, 0.01, 0.1, 1, 10";
const POLICY_LAMBDAS: &str = "0, 0.1, 0.5, 1";
const BATCH_ALPHAS: &str = "0.001, 0.01, 0.1, 1, 10";

fn base(episodes: usize, body: &str) -> String {
    let sets = |key: &str| {
        body.lines()
            .filter_map(|l| l.split('=').next())
            .any(|k| k.trim() == key || k.trim() == format!("axis.{key}"))
    };
    let episodes = episodes.to_string();
    let mut s = String::new();
    for (key, default) in [
        ("architecture", "cnn"),
        ("episodes", episodes.as_str()),
        ("seed", "0"),
        ("beta", "0.01"),
        ("epsilon", "0.1"),
        ("alpha", "0.001"),
    ] {
        let skip = sets(key) || (key == "beta" && sets("beta_ratio"));
        if !skip {
            s.push_str(&format!("{key} = {default}\n"));
        }
    }
    for line in body.lines() {
        s.push_str(line.trim());
        s.push('\n');
    }
    s
}

fn panel(id: &str, episodes: usize, body: &str, runs: usize, plot: PlotInput) -> Panel {
    Panel {
        id: id.to_string(),
        grid: base(episodes, body),
        runs,
        plot,
    }
}

/// The figure manifest at a given per-run episode budget.
pub fn figures(episodes: usize) -> Vec<Figure> {
    use PlotInput::*;
    let e = episodes;
    let two_timescale = |n: u32, alg: &str, title: &'static str| Figure {
        number: n,
        title,
        panels: vec![panel(
            &format!("fig{n:02}"),
            e,
            &format!("algorithm = {alg}\naxis.alpha = {ALPHAS}\naxis.beta_ratio = {RATIOS}"),
            20,
            Metrics,
        )],
    };
    // (panel suffix, algorithm, critic)
    let policy_critics = [
        ("a", "actor_critic_sg", "tdc"),
        ("b", "actor_critic_ng", "tdc"),
        ("c", "actor_critic_sg", "gtd2"),
        ("d", "actor_critic_sg", "greedy_gq"),
        ("e", "actor_critic_sg", "qlearn"),
    ];
    let pretrain_algs = [
        ("a", "algorithm = tdc"),
        ("b", "algorithm = actor_critic_ng\ncritic = tdc"),
        ("c", "algorithm = gtd2"),
        ("d", "algorithm = greedy_gq"),
        ("e", "algorithm = qlearn"),
        ("f", "algorithm = sarsa"),
    ];
    vec![
        two_timescale(5, "gtd2", "GTD2 over step sizes and timescale ratios"),
        two_timescale(6, "tdc", "TDC over step sizes and timescale ratios"),
        two_timescale(7, "greedy_gq", "Greedy GQ over step sizes and timescale ratios"),
        Figure {
            number: 8,
            title: "SARSA and Q-learning over step sizes",
            panels: ["sarsa", "qlearn"]
                .iter()
                .zip(["a", "b"])
                .map(|(alg, p)| panel(&format!("fig08{p}"), e, &format!("algorithm = {alg}\naxis.alpha = {ALPHAS}"), 4, Metrics))
                .collect(),
        },
        Figure {
            number: 9,
            title: "Exploration rates",
            panels: ["greedy_gq", "tdc", "gtd2", "qlearn", "sarsa"]
                .iter()
                .zip(["a", "b", "c", "d", "e"])
                .map(|(alg, p)| panel(&format!("fig09{p}"), e, &format!("algorithm = {alg}\naxis.epsilon = {EPSILONS}"), 5, Metrics))
                .collect(),
        },
        Figure {
            number: 10,
            title: "Eligibility trace parameters",
            panels: ["greedy_gq", "tdc", "gtd2", "sarsa"]
                .iter()
                .zip(["a", "b", "c", "d"])
                .map(|(alg, p)| panel(&format!("fig10{p}"), e, &format!("algorithm = {alg}\naxis.lambda = {LAMBDAS}"), 5, Metrics))
                .collect(),
        },
        Figure {
            number: 11,
            title: "TDC with natural-gradient value steps",
            panels: vec![panel(
                "fig11",
                e,
                &format!("algorithm = tdc\nnatural_gradient = true\naxis.alpha = {ALPHAS}\naxis.beta_ratio = {RATIOS}"),
                20,
                Metrics,
            )],
        },
        Figure {
            number: 12,
            title: "Policy network step sizes",
            panels: policy_critics
                .iter()
                .map(|(p, alg, critic)| {
                    panel(
                        &format!("fig12{p}"),
                        e,
                        &format!("algorithm = {alg}\ncritic = {critic}\naxis.actor_alpha = {POLICY_ALPHAS}"),
                        5,
                        Metrics,
                    )
                })
                .collect(),
        },
        Figure {
            number: 13,
            title: "Policy network eligibility traces",
            panels: policy_critics[..4]
                .iter()
                .map(|(p, alg, critic)| {
                    panel(
                        &format!("fig13{p}"),
                        e,
                        &format!("algorithm = {alg}\ncritic = {critic}\nactor_alpha = 0.01\naxis.lambda = {POLICY_LAMBDAS}"),
                        4,
                        Metrics,
                    )
                })
                .collect(),
        },
        Figure {
            number: 14,
            title: "With and without pretraining",
            panels: pretrain_algs
                .iter()
                .map(|(p, alg)| panel(&format!("fig14{p}"), e, &format!("{alg}\naxis.pretrain = false, true"), 2, Metrics))
                .collect(),
        },
        Figure {
            number: 15,
            title: "CNN and RNN with Q-learning batches",
            panels: ["cnn", "rnn"]
                .iter()
                .zip(["a", "b"])
                .map(|(arch, p)| {
                    panel(
                        &format!("fig15{p}"),
                        e,
                        &format!("algorithm = qlearn\nbatch_mode = true\narchitecture = {arch}\naxis.alpha = {BATCH_ALPHAS}"),
                        5,
                        Metrics,
                    )
                })
                .collect(),
        },
        Figure {
            number: 16,
            title: "CNN and RNN with SARSA batches",
            panels: ["cnn", "rnn"]
                .iter()
                .zip(["a", "b"])
                .map(|(arch, p)| {
                    panel(
                        &format!("fig16{p}"),
                        e,
                        &format!("algorithm = sarsa\nbatch_mode = true\narchitecture = {arch}\naxis.alpha = {BATCH_ALPHAS}"),
                        5,
                        Metrics,
                    )
                })
                .collect(),
        },
        objective_figure(17, "After-state values under the two objectives", e, Metrics),
        objective_figure(18, "Training error under the two objectives", e, BatchLoss),
        Figure {
            number: 19,
            title: "Projection error of the CNN and RNN",
            panels: vec![panel(
                "fig19",
                e,
                "algorithm = pbe_dual\nbatch_mode = true\nbeta = 0.1\naxis.architecture = cnn, rnn",
                2,
                Projection,
            )],
        },
    ]
}

fn objective_figure(n: u32, title: &'static str, e: usize, plot: PlotInput) -> Figure {
    Figure {
        number: n,
        title,
        panels: ["cnn", "rnn"]
            .iter()
            .zip(["a", "b"])
            .map(|(arch, p)| {
                panel(
                    &format!("fig{n}{p}"),
                    e,
                    &format!("batch_mode = true\narchitecture = {arch}\nbeta = 0.1\naxis.algorithm = qlearn, pbe_dual"),
                    2,
                    plot,
                )
            })
            .collect(),
    }
}

impl Panel {
    pub fn parse(&self) -> Result<Grid> {
        Grid::parse(&self.grid)
    }

    /// Shell commands that sweep and plot this panel under `out`.
    pub fn commands(&self, out: &str) -> Vec<String> {
        let files = match self.plot {
            PlotInput::Metrics => "metrics.csv",
            PlotInput::BatchLoss => "{batch_loss,projection}.csv",
            PlotInput::Projection => "projection.csv",
        };
        vec![
            format!("HEXRL_OUT_DIR={out} hexrl sweep grids/{}.grid", self.id),
            format!("hexrl plot {out}/{}/run_*/{files} -o {out}/{}.svg", self.id, self.id),
        ]
    }
}

/// Text listing of every figure with its panel grids and commands.
pub fn manifest_text(episodes: usize) -> String {
    let mut out = String::new();
    for f in figures(episodes) {
        out.push_str(&format!("# Figure {}: {}\n", f.number, f.title));
        for p in &f.panels {
            out.push_str(&format!("## {} ({} runs)\n", p.id, p.runs));
            for line in p.commands("out") {
                out.push_str(&format!("$ {line}\n"));
            }
        }
    }
    out
}

/// Writes every panel grid as `<dir>/<panel>.grid`.
pub fn write_grids(episodes: usize, dir: &std::path::Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in figures(episodes) {
        for p in f.panels {
            let path = dir.join(format!("{}.grid", p.id));
            std::fs::write(&path, &p.grid)?;
            written.push(path);
        }
    }
    Ok(written)
}
