use anyhow::{Context, Result};
use mimojam_core::learning::{run_episode, Episode, Exploration};
use rayon::prelude::*;

use crate::config::ExperimentConfig;

/// Enhanced and semi-uniform runs sharing one seed.
#[derive(Debug, Clone)]
pub struct PairedRun {
    pub seed: u64,
    pub enhanced: Episode,
    pub semi_uniform: Episode,
}

pub fn run_pair(cfg: &ExperimentConfig, seed: u64) -> Result<PairedRun> {
    let l = cfg.learning.as_ref().context("missing [learning] table")?;
    let run = |exploration| {
        run_episode(&l.env, &l.agent.with_exploration(exploration), l.steps, seed)
            .with_context(|| format!("learning run with seed {seed}"))
    };
    Ok(PairedRun {
        seed,
        enhanced: run(Exploration::Enhanced)?,
        semi_uniform: run(Exploration::SemiUniform)?,
    })
}

/// Runs seeds `seed .. seed + seeds` in parallel; the output is in seed
/// order.
pub fn run_learning(cfg: &ExperimentConfig) -> Result<Vec<PairedRun>> {
    let l = cfg.learning.as_ref().context("missing [learning] table")?;
    (0..l.seeds)
        .into_par_iter()
        .map(|i| run_pair(cfg, cfg.seed.wrapping_add(i)))
        .collect()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    match n {
        0 => f64::NAN,
        _ if n % 2 == 1 => values[n / 2],
        _ => 0.5 * (values[n / 2 - 1] + values[n / 2]),
    }
}
