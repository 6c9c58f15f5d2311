//! Cartesian hyperparameter grids.
//!
//! A grid file is a run config whose swept keys are written as
//! `axis.<key> = v1, v2, …`. The pseudo-key `beta_ratio` sets `β = ratio·α`.
//! Points are enumerated with the last axis varying fastest, and point `i`
//! runs with seed `seed + i`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::selfplay::RunMetrics;

use super::config::{entries, KEYS};
use super::{run, RunConfig};

pub const BETA_RATIO: &str = "beta_ratio";

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub key: String,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    /// `(key, value)` for every axis at this point.
    pub coords: Vec<(String, String)>,
    pub config: RunConfig,
}

impl SweepPoint {
    pub fn label(&self) -> String {
        self.coords.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    }

    pub fn dir_name(&self) -> String {
        format!("run_{:03}", self.index)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub base: Vec<(String, String)>,
    pub axes: Vec<Axis>,
}

impl Grid {
    pub fn parse(text: &str) -> Result<Grid> {
        let mut base = Vec::new();
        let mut axes: Vec<Axis> = Vec::new();
        for (k, v) in entries(text)? {
            let Some(key) = k.strip_prefix("axis.") else {
                base.push((k, v));
                continue;
            };
            if !KEYS.contains(&key) && key != BETA_RATIO {
                return Err(Error::config(k.as_str(), "unknown axis key"));
            }
            if axes.iter().any(|a| a.key == key) {
                return Err(Error::config(k.as_str(), "axis given twice"));
            }
            let values: Vec<String> = v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            if values.is_empty() {
                return Err(Error::config(k.as_str(), "empty axis"));
            }
            axes.push(Axis {
                key: key.to_string(),
                values,
            });
        }
        if axes.iter().any(|a| a.key == BETA_RATIO) && (axes.iter().any(|a| a.key == "beta") || base.iter().any(|(k, _)| k == "beta")) {
            return Err(Error::config(BETA_RATIO, "conflicts with an explicit beta"));
        }
        Ok(Grid { base, axes })
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every grid point as a validated config.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let n = self.len();
        let mut out = Vec::with_capacity(n);
        for index in 0..n {
            let mut rem = index;
            let mut coords = vec![(String::new(), String::new()); self.axes.len()];
            for (slot, axis) in coords.iter_mut().zip(&self.axes).rev() {
                let m = axis.values.len();
                *slot = (axis.key.clone(), axis.values[rem % m].clone());
                rem /= m;
            }
            let mut kv: Vec<(String, String)> = self.base.clone();
            let mut ratio = None;
            for (k, v) in &coords {
                if k == BETA_RATIO {
                    ratio = Some(v.parse::<f64>().map_err(|_| Error::config(BETA_RATIO, format!("not a number: {v:?}")))?);
                } else if let Some(slot) = kv.iter_mut().find(|(bk, _)| bk == k) {
                    slot.1 = v.clone();
                } else {
                    kv.push((k.clone(), v.clone()));
                }
            }
            let mut config = RunConfig::parse_unchecked(&kv)?;
            if let Some(r) = ratio {
                config.beta = config.alpha * r;
            }
            config.seed = config.seed.wrapping_add(index as u64);
            config.validate()?;
            out.push(SweepPoint { index, coords, config });
        }
        Ok(out)
    }
}

/// Runs every point concurrently into `dir/run_XXX/` and writes `dir/sweep.csv`
/// mapping run directories to axis values.
pub fn sweep(grid: &Grid, dir: &Path) -> Result<Vec<(SweepPoint, RunMetrics)>> {
    let points = grid.points()?;
    let results: Vec<RunMetrics> = points
        .par_iter()
        .map(|p| run(&p.config, &dir.join(p.dir_name())))
        .collect::<Result<_>>()?;
    let mut index = String::from("run,seed");
    for a in &grid.axes {
        write!(index, ",{}", a.key).unwrap();
    }
    index.push('\n');
    for p in &points {
        write!(index, "{},{}", p.dir_name(), p.config.seed).unwrap();
        for (_, v) in &p.coords {
            write!(index, ",{v}").unwrap();
        }
        index.push('\n');
    }
    fs::write(dir.join("sweep.csv"), index)?;
    Ok(points.into_iter().zip(results).collect())
}
