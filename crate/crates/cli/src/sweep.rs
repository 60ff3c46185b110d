use anyhow::{Context, Result};
use mimojam_core::jamming::JammingAction;
use mimojam_core::linkmetrics::{estimate_ber, BerEstimate};
use mimojam_core::rng::derive_seed;
use mimojam_core::Scheme;

use crate::config::ExperimentConfig;

/// One grid point of a BER sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub k: usize,
    pub scheme: Scheme,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub point: SweepPoint,
    pub seed: u64,
    pub data: BerEstimate,
    pub ack: BerEstimate,
    pub frames: u64,
    pub flagged_frames: u64,
}

/// Grid in output order: pilot length, then scheme, then energy.
pub fn sweep_points(cfg: &ExperimentConfig) -> Vec<SweepPoint> {
    let Some(s) = &cfg.sweep else {
        return Vec::new();
    };
    let mut points = Vec::new();
    for &k in &s.pilot_lengths {
        for &scheme in &s.schemes {
            for &energy in &s.energies {
                points.push(SweepPoint {
                    index: points.len(),
                    k,
                    scheme,
                    energy,
                });
            }
        }
    }
    points
}

/// Seed of a grid point: shared under common random numbers, otherwise
/// derived from the master seed and the point index.
pub fn point_seed(cfg: &ExperimentConfig, point: &SweepPoint) -> u64 {
    let crn = cfg.sweep.as_ref().is_some_and(|s| s.common_random_numbers);
    if crn {
        cfg.seed
    } else {
        derive_seed(cfg.seed, point.index as u64)
    }
}

fn action_for(point: &SweepPoint, pilot_jam_len: Option<usize>) -> JammingAction {
    match point.scheme {
        Scheme::None => JammingAction::none(),
        Scheme::Barrage => JammingAction::barrage(point.energy),
        Scheme::Pilot => JammingAction::pilot(point.energy, pilot_jam_len.unwrap_or(point.k)),
        Scheme::Ack => JammingAction::ack(point.energy),
    }
}

pub fn run_point(cfg: &ExperimentConfig, point: &SweepPoint) -> Result<SweepRow> {
    let s = cfg.sweep.as_ref().context("missing [sweep] table")?;
    let plan = s.frame.plan(&cfg.link, point.k)?;
    let action = action_for(point, s.pilot_jam_len);
    let seed = point_seed(cfg, point);
    let report = estimate_ber(&cfg.link, &plan, &action, s.frames, seed)
        .with_context(|| format!("sweep point {}", point.index))?;
    Ok(SweepRow {
        point: *point,
        seed,
        data: report.data,
        ack: report.ack,
        frames: report.frames,
        flagged_frames: report.flagged_frames,
    })
}

/// Runs every grid point in order. Frames within a point run on the current
/// rayon pool, so the result does not depend on the thread count.
pub fn run_ber_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    sweep_points(cfg).iter().map(|p| run_point(cfg, p)).collect()
}
