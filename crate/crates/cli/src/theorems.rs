use anyhow::{Context, Result};
use mimojam_core::channel::estimate_expected_lambda_max;
use mimojam_core::jamming::JammingAction;
use mimojam_core::linkmetrics::{estimate_ber, BerReport};
use mimojam_core::rng::stream_rng;
use mimojam_core::theorems::{
    cond_ack_over_pilot_combined, thm1_crossover, thm1_pilot_beats_barrage,
    thm2_pilot_beats_ack_on_ack, thm3_ack_beats_barrage, thm3_ack_beats_pilot, ScenarioParams,
};

use crate::config::{ExperimentConfig, TheoremConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Predicate {
    Thm1,
    Thm2,
    Thm3Barrage,
    Thm3Pilot,
    Combined,
}

impl Predicate {
    pub const ALL: [Predicate; 5] = [
        Predicate::Thm1,
        Predicate::Thm2,
        Predicate::Thm3Barrage,
        Predicate::Thm3Pilot,
        Predicate::Combined,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Predicate::Thm1 => "pilot_beats_barrage",
            Predicate::Thm2 => "pilot_beats_ack_on_ack",
            Predicate::Thm3Barrage => "ack_beats_barrage",
            Predicate::Thm3Pilot => "ack_beats_pilot",
            Predicate::Combined => "ack_over_pilot_combined",
        }
    }

    /// Verdict and the two sides of the inequality it compares.
    pub fn evaluate(self, p: &ScenarioParams) -> (bool, f64, f64) {
        match self {
            Predicate::Thm1 => (
                thm1_pilot_beats_barrage(p.k, p.d, p.m),
                p.k,
                thm1_crossover(p.d, p.m),
            ),
            Predicate::Thm2 => (
                thm2_pilot_beats_ack_on_ack(p.a, p.k, p.theta_g, p.theta_f, p.l, p.n),
                p.ack_pilot_ratio(),
                p.thm2_rhs(),
            ),
            Predicate::Thm3Barrage => (
                thm3_ack_beats_barrage(p),
                p.a * p.theta_g / (p.d * p.theta_f),
                p.l * p.gamma_th_a / (p.lambda_max_mean * p.n * p.gamma_th_d),
            ),
            Predicate::Thm3Pilot => (
                thm3_ack_beats_pilot(p),
                p.ack_pilot_ratio(),
                p.thm3_pilot_rhs(),
            ),
            Predicate::Combined => (
                cond_ack_over_pilot_combined(p),
                p.ack_pilot_ratio(),
                p.thm2_rhs().min(p.thm3_pilot_rhs()),
            ),
        }
    }

    /// Simulated metrics `(a, b)` such that the predicate predicts `a > b`
    /// (`a >= b` for the ACK comparison under pilot jamming), with labels.
    fn metrics(self, sim: &SimTriple) -> (f64, f64, &'static str, &'static str) {
        let loss = |r: &BerReport| 1.0 - (1.0 - r.data.per) * (1.0 - r.ack.per);
        match self {
            Predicate::Thm1 => (sim.pilot.data.ber, sim.barrage.data.ber, "pilot", "barrage"),
            Predicate::Thm2 => (sim.pilot.ack.ber, sim.ack.ack.ber, "pilot", "ack"),
            Predicate::Thm3Barrage => (sim.ack.ack.per, sim.barrage.data.per, "ack", "barrage"),
            Predicate::Thm3Pilot => (sim.ack.ack.per, sim.pilot.data.per, "ack", "pilot"),
            Predicate::Combined => (loss(&sim.ack), loss(&sim.pilot), "ack", "pilot"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimCheck {
    pub metric_a: f64,
    pub metric_b: f64,
    pub ordering: String,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TheoremRow {
    pub predicate: Predicate,
    pub params: ScenarioParams,
    pub verdict: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub sim: Option<SimCheck>,
}

struct SimTriple {
    barrage: BerReport,
    pilot: BerReport,
    ack: BerReport,
}

pub fn lambda_max_mean(cfg: &ExperimentConfig, t: &TheoremConfig) -> Result<f64> {
    match t.lambda_max_mean {
        Some(l) => Ok(l),
        None => {
            let mut rng = stream_rng(cfg.seed, u64::MAX, 0);
            Ok(estimate_expected_lambda_max(&cfg.link, t.lambda_trials, &mut rng)?)
        }
    }
}

pub fn scenario(cfg: &ExperimentConfig, t: &TheoremConfig, k: usize, lambda: f64) -> Result<ScenarioParams> {
    let plan = t.frame.plan(&cfg.link, k)?;
    let l = &cfg.link;
    let p = ScenarioParams {
        k: k as f64,
        d: plan.d as f64,
        a: plan.a as f64,
        m: l.m as f64,
        n: l.n as f64,
        l: l.l as f64,
        theta_g: l.theta_g,
        theta_f: l.theta_f,
        gamma_th_d: plan.data_mcs.gamma_th,
        gamma_th_a: plan.ack_mcs.gamma_th,
        lambda_max_mean: lambda,
    };
    p.validate()?;
    Ok(p)
}

fn simulate(cfg: &ExperimentConfig, t: &TheoremConfig, k: usize, index: u64) -> Result<SimTriple> {
    let plan = t.frame.plan(&cfg.link, k)?;
    // One seed per pilot length, shared by the three schemes.
    let seed = mimojam_core::rng::derive_seed(cfg.seed, index);
    let e = t.check_energy;
    let run = |a: JammingAction| estimate_ber(&cfg.link, &plan, &a, t.check_frames, seed);
    Ok(SimTriple {
        barrage: run(JammingAction::barrage(e))?,
        pilot: run(JammingAction::pilot(e, k))?,
        ack: run(JammingAction::ack(e))?,
    })
}

/// Evaluates every predicate at every configured pilot length and, when
/// `check_frames > 0`, compares each verdict with a simulated ordering.
pub fn run_theorem_check(cfg: &ExperimentConfig) -> Result<Vec<TheoremRow>> {
    let t = cfg.theorems.as_ref().context("missing [theorems] table")?;
    let lambda = lambda_max_mean(cfg, t)?;
    let mut rows = Vec::new();
    for (i, &k) in t.pilot_lengths.iter().enumerate() {
        let params = scenario(cfg, t, k, lambda)?;
        let sim = if t.check_frames > 0 {
            Some(simulate(cfg, t, k, i as u64)?)
        } else {
            None
        };
        for pred in Predicate::ALL {
            let (verdict, lhs, rhs) = pred.evaluate(&params);
            let check = sim.as_ref().map(|s| {
                let (a, b, na, nb) = pred.metrics(s);
                let (holds, yes, no) = if pred == Predicate::Thm2 {
                    (a >= b, ">=", "<")
                } else {
                    (a > b, ">", "<=")
                };
                SimCheck {
                    metric_a: a,
                    metric_b: b,
                    ordering: format!("{na}{}{nb}", if holds { yes } else { no }),
                    agree: holds == verdict,
                }
            });
            rows.push(TheoremRow {
                predicate: pred,
                params,
                verdict,
                lhs,
                rhs,
                sim: check,
            });
        }
    }
    Ok(rows)
}
