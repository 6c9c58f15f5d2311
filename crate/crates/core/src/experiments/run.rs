use std::fs;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::neural::{write_checkpoint, Checkpoint};
use crate::selfplay::{run_training, RunMetrics, TrainedModel};

use super::RunConfig;

pub const OUT_DIR_ENV: &str = "HEXRL_OUT_DIR";

/// `$HEXRL_OUT_DIR`, or `out` when unset.
pub fn output_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_ENV).map_or_else(|| PathBuf::from("out"), PathBuf::from)
}

/// Trains `cfg` and writes into `dir`: `config.txt`, `metrics.csv`,
/// `checkpoint.bin` (the value model), plus `actor.bin` for actor-critic runs
/// and the per-batch losses of batch runs: `projection.csv` for dual-network
/// runs, `batch_loss.csv` otherwise.
pub fn run(cfg: &RunConfig, dir: &Path) -> Result<RunMetrics> {
    let metrics = run_training(cfg)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("config.txt"), cfg.serialize())?;
    fs::write(dir.join("metrics.csv"), metrics.to_csv())?;
    write_checkpoint(&dir.join("checkpoint.bin"), &metrics.model.checkpoint())?;
    if let TrainedModel::ActorCritic { actor, .. } = &metrics.model {
        write_checkpoint(&dir.join("actor.bin"), &Checkpoint::from_params(actor))?;
    }
    if cfg.batch_mode {
        let name = if cfg.algorithm == super::Algorithm::PbeDual { "projection.csv" } else { "batch_loss.csv" };
        fs::write(dir.join(name), metrics.loss_csv())?;
    }
    Ok(metrics)
}

/// Parses the config at `path` and runs it into `out/<file stem>`.
pub fn run_file(path: &Path, out: &Path) -> Result<(PathBuf, RunMetrics)> {
    let cfg = RunConfig::parse(&fs::read_to_string(path)?)?;
    let stem = path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    let dir = out.join(stem);
    let m = run(&cfg, &dir)?;
    Ok((dir, m))
}
