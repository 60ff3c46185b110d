//! CSV writers. Every row starts with the config hash; reals use 17
//! significant digits.

use std::io::Write;

use anyhow::Result;
use mimojam_core::learning::PILOT_LENGTHS;

use crate::learn::PairedRun;
use crate::sweep::SweepRow;
use crate::theorems::TheoremRow;

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

pub const SWEEP_HEADER: [&str; 16] = [
    "config_hash",
    "seed",
    "point",
    "scheme",
    "energy",
    "k",
    "target",
    "ber",
    "ci95",
    "per",
    "bit_errors",
    "bits",
    "packet_errors",
    "packets",
    "frames",
    "flagged_frames",
];

pub fn write_sweep<W: Write>(w: W, hash: &str, rows: &[SweepRow]) -> Result<()> {
    let mut out = writer(w, &SWEEP_HEADER)?;
    for r in rows {
        for (target, est) in [("data", &r.data), ("ack", &r.ack)] {
            out.write_record([
                hash.to_string(),
                r.seed.to_string(),
                r.point.index.to_string(),
                r.point.scheme.to_string(),
                num(r.point.energy),
                r.point.k.to_string(),
                target.to_string(),
                num(est.ber),
                num(est.ci95),
                num(est.per),
                est.bit_errors.to_string(),
                est.bits.to_string(),
                est.packet_errors.to_string(),
                est.packets.to_string(),
                r.frames.to_string(),
                r.flagged_frames.to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub const THEOREM_HEADER: [&str; 14] = [
    "config_hash",
    "seed",
    "predicate",
    "k",
    "d",
    "a",
    "lambda_max_mean",
    "lhs",
    "rhs",
    "verdict",
    "metric_a",
    "metric_b",
    "simulated_ordering",
    "agree",
];

pub fn write_theorems<W: Write>(w: W, hash: &str, seed: u64, rows: &[TheoremRow]) -> Result<()> {
    let mut out = writer(w, &THEOREM_HEADER)?;
    for r in rows {
        let (a, b, ordering, agree) = match &r.sim {
            Some(s) => (num(s.metric_a), num(s.metric_b), s.ordering.clone(), s.agree.to_string()),
            None => (String::new(), String::new(), "skipped".into(), "na".into()),
        };
        out.write_record([
            hash.to_string(),
            seed.to_string(),
            r.predicate.name().to_string(),
            num(r.params.k),
            num(r.params.d),
            num(r.params.a),
            num(r.params.lambda_max_mean),
            num(r.lhs),
            num(r.rhs),
            r.verdict.to_string(),
            a,
            b,
            ordering,
            agree,
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub const TRACE_HEADER: [&str; 11] = [
    "config_hash",
    "seed",
    "step",
    "state_enhanced",
    "action_enhanced",
    "reward_enhanced",
    "cum_reward_enhanced",
    "state_semi_uniform",
    "action_semi_uniform",
    "reward_semi_uniform",
    "cum_reward_semi_uniform",
];

/// Per-step paired trace. States and actions are the one-based labels of
/// the state and action tables.
pub fn write_trace<W: Write>(w: W, hash: &str, runs: &[PairedRun]) -> Result<()> {
    let mut out = writer(w, &TRACE_HEADER)?;
    for run in runs {
        for (e, s) in run.enhanced.trace.iter().zip(&run.semi_uniform.trace) {
            out.write_record([
                hash.to_string(),
                run.seed.to_string(),
                e.step.to_string(),
                e.state.label().to_string(),
                e.action.label().to_string(),
                num(e.reward),
                num(e.cum_reward),
                s.state.label().to_string(),
                s.action.label().to_string(),
                num(s.reward),
                num(s.cum_reward),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub const BEST_HEADER: [&str; 5] = [
    "config_hash",
    "seed",
    "step",
    "best_enhanced",
    "best_semi_uniform",
];

pub fn write_best_actions<W: Write>(w: W, hash: &str, runs: &[PairedRun]) -> Result<()> {
    let mut out = writer(w, &BEST_HEADER)?;
    for run in runs {
        for (e, s) in run.enhanced.trace.iter().zip(&run.semi_uniform.trace) {
            out.write_record([
                hash.to_string(),
                run.seed.to_string(),
                e.step.to_string(),
                e.best_action.label().to_string(),
                s.best_action.label().to_string(),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn summary_header() -> Vec<String> {
    let mut h: Vec<String> = [
        "config_hash",
        "seed",
        "cum_reward_enhanced",
        "cum_reward_semi_uniform",
        "best_changes_enhanced",
        "best_changes_semi_uniform",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    h.extend(PILOT_LENGTHS.iter().map(|k| format!("belief_k{k}")));
    h
}

pub fn write_summary<W: Write>(w: W, hash: &str, window: usize, runs: &[PairedRun]) -> Result<()> {
    let header = summary_header();
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut out = writer(w, &refs)?;
    for run in runs {
        let mut rec = vec![
            hash.to_string(),
            run.seed.to_string(),
            num(run.enhanced.cumulative_reward()),
            num(run.semi_uniform.cumulative_reward()),
            run.enhanced.best_action_changes(window).to_string(),
            run.semi_uniform.best_action_changes(window).to_string(),
        ];
        rec.extend(PILOT_LENGTHS.iter().map(|&k| num(run.enhanced.k_belief.prob(k))));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}
