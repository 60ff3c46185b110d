//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails. Arguments that do not start with `-` select
//! criteria by id prefix, e.g. `cargo test --test acceptance -- ac04`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use mimojam_cli::config::ExperimentConfig;
use mimojam_cli::learn::{median, run_learning, PairedRun};
use mimojam_cli::sweep::run_ber_sweep;
use mimojam_cli::execute;
use mimojam_core::jamming::{allocate_energy, sjr_db, JammingAction};
use mimojam_core::linkmetrics::{
    estimate_ber, estimation_error_moment, frobenius_relative_error, max_relative_error,
    paired_difference, post_noise_autocorr, post_noise_autocorr_full, run_frames,
    sample_estimation_error_moment, sample_post_noise_autocorr, FrameSimulator,
};
use mimojam_core::numerics::{sample_complex_gaussian, CMatrix};
use mimojam_core::phy::build_pilot;
use mimojam_core::rng::stream_rng;
use mimojam_core::theorems::{thm1_crossover, thm1_pilot_beats_barrage, thm2_boundary, thm2_pilot_beats_ack_on_ack};
use mimojam_core::{FramePlan, LinkConfig, Mcs, Scheme};

type Check = fn() -> Result<String, String>;

fn config(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{e:#}"))
}

fn verdict(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn full_plan(k: usize) -> FramePlan {
    FramePlan::new(2, k, 512, Mcs::bpsk(), Mcs::bpsk(), 240, 1024).unwrap()
}

fn ac01() -> Result<String, String> {
    let cfg = LinkConfig::default();
    let plan = full_plan(4);
    let alloc = allocate_energy(&JammingAction::barrage(20.0), &cfg, &plan).map_err(|e| e.to_string())?;
    let sjr = sjr_db(cfg.es, &alloc);
    verdict(
        plan.d == 122_880 && (sjr - 37.9).abs() <= 0.05,
        format!("D = {}, SJR = {sjr:.4} dB", plan.d),
    )
}

fn ac02() -> Result<String, String> {
    let verdicts: Vec<bool> = [4.0, 16.0, 128.0, 512.0]
        .iter()
        .map(|&k| thm1_pilot_beats_barrage(k, 122_880.0, 2.0))
        .collect();
    let c = thm1_crossover(122_880.0, 2.0);
    verdict(
        verdicts == [true, true, true, false] && (c - 495.74).abs() <= 0.01,
        format!("verdicts {verdicts:?}, crossover {c:.4}"),
    )
}

fn ac03() -> Result<String, String> {
    let b = thm2_boundary(512.0, 1.0, 1.0, 2.0, 2.0);
    let at = thm2_pilot_beats_ack_on_ack(512.0, 32.0, 1.0, 1.0, 2.0, 2.0);
    let above = thm2_pilot_beats_ack_on_ack(512.0, 33.0, 1.0, 1.0, 2.0, 2.0);
    verdict(
        b == 32.0 && at && !above,
        format!("boundary K = {b}, holds at 32: {at}, at 33: {above}"),
    )
}

fn ac04() -> Result<String, String> {
    let cfg = config("fig4_sweep.toml");
    let rows = run_ber_sweep(&cfg).map_err(|e| format!("{e:#}"))?;
    let s = cfg.sweep.as_ref().unwrap();
    let d = s.frame.plan(&cfg.link, 4).unwrap().d as f64;
    let crossover = thm1_crossover(d, cfg.link.m as f64);
    // (k, energy bits) -> (barrage, pilot) data estimates
    let mut grid: BTreeMap<(usize, u64), [Option<(f64, f64)>; 2]> = BTreeMap::new();
    for r in &rows {
        let slot = match r.point.scheme {
            Scheme::Barrage => 0,
            Scheme::Pilot => 1,
            _ => continue,
        };
        grid.entry((r.point.k, r.point.energy.to_bits())).or_default()[slot] =
            Some((r.data.ber, r.data.ci95));
    }
    let mut separated = Vec::new();
    let mut failures = Vec::new();
    for (&(k, eb), v) in &grid {
        let e = f64::from_bits(eb);
        let ((bb, bc), (pb, pc)) = (v[0].unwrap(), v[1].unwrap());
        let apart = pb - pc > bb + bc;
        let overlap = (pb - bb).abs() <= pc + bc;
        if k == 4 && e >= 5.0 {
            if !apart {
                failures.push(format!("K=4 E={e}: pilot {pb:.4e}+-{pc:.1e} vs barrage {bb:.4e}+-{bc:.1e}"));
            }
            separated.push(e);
        }
        if k == 512 && !overlap {
            failures.push(format!("K=512 E={e}: pilot {pb:.4e}+-{pc:.1e} vs barrage {bb:.4e}+-{bc:.1e}"));
        }
    }
    let verdicts = (
        thm1_pilot_beats_barrage(4.0, d, 2.0),
        thm1_pilot_beats_barrage(512.0, d, 2.0),
    );
    let ok = failures.is_empty() && verdicts == (true, false) && (crossover - 156.77).abs() < 0.01;
    let worst = grid
        .iter()
        .filter(|((k, eb), _)| *k == 4 && f64::from_bits(*eb) >= 5.0)
        .map(|(_, v)| {
            let ((bb, bc), (pb, pc)) = (v[0].unwrap(), v[1].unwrap());
            (pb - pc) - (bb + bc)
        })
        .fold(f64::INFINITY, f64::min);
    verdict(
        ok,
        format!(
            "D = {d}, crossover {crossover:.2}, K=4 separated at {} energies (min gap {worst:.2e}), {}",
            separated.len(),
            if failures.is_empty() { "K=512 overlaps everywhere".into() } else { failures.join("; ") }
        ),
    )
}

fn ac05() -> Result<String, String> {
    let cfg = config("ack_sweep.toml");
    let s = cfg.sweep.as_ref().unwrap();
    let energy = 20.0;
    let frames = s.frames;
    let mut parts = Vec::new();
    let mut signs = Vec::new();
    for k in [4usize, 128] {
        let plan = s.frame.plan(&cfg.link, k).map_err(|e| e.to_string())?;
        let run = |a: JammingAction| {
            let sim = FrameSimulator::new(&cfg.link, &plan, &a).unwrap();
            run_frames(&sim, frames, cfg.seed).unwrap()
        };
        let pilot = run(JammingAction::pilot(energy, k));
        let ack = run(JammingAction::ack(energy));
        let pa: Vec<_> = pilot.iter().map(|o| o.ack).collect();
        let aa: Vec<_> = ack.iter().map(|o| o.ack).collect();
        let (mean, ci) = paired_difference(&pa, &aa);
        let sign = if mean - ci > 0.0 {
            1
        } else if mean + ci < 0.0 {
            -1
        } else {
            0
        };
        signs.push(sign);
        parts.push(format!("K={k}: ACK BER pilot - ack = {mean:.3e} +- {ci:.1e}"));
    }
    verdict(signs == [1, -1], parts.join(", "))
}

fn ac06() -> Result<String, String> {
    let (k, es, e_j, n0, trials) = (8, 1.0, 0.5, 0.1, 100_000);
    let mut worst: f64 = 0.0;
    for fixture in 0..3u64 {
        let mut rng = stream_rng(600 + fixture, 0, 0);
        let h = sample_complex_gaussian(2, 2, 1.0, &mut rng).unwrap();
        let g = sample_complex_gaussian(2, 2, 1.0, &mut rng).unwrap();
        let b = sample_complex_gaussian(2, 2, 1.0, &mut rng).unwrap();
        let a = &b * &b.adjoint();
        let mc = sample_estimation_error_moment(&h, &g, &a, k, es, e_j, n0, trials, &mut rng).unwrap();
        let cf = estimation_error_moment(&g, &a, k, es, e_j, n0).unwrap();
        worst = worst.max(max_relative_error(&mc, &cf));
    }
    verdict(worst < 0.05, format!("worst entrywise relative error {worst:.4} over 3 fixtures"))
}

fn ac07() -> Result<String, String> {
    // Es / N0 = 20 dB.
    let (k, es, e_j, n0, symbols) = (16, 1.0, 0.05, 0.01, 100_000);
    let mut rng = stream_rng(700, 0, 0);
    let h = sample_complex_gaussian(2, 2, 1.0, &mut rng).unwrap();
    let g = sample_complex_gaussian(2, 2, 1.0, &mut rng).unwrap();
    let mc = sample_post_noise_autocorr(&h, &g, k, es, e_j, n0, symbols, &mut rng).unwrap();
    let approx = post_noise_autocorr(&h, &g, k, e_j, n0).unwrap();
    let full = post_noise_autocorr_full(&h, &g, k, es, e_j, n0).unwrap();
    let err = frobenius_relative_error(&mc, &approx);
    let err_full = frobenius_relative_error(&mc, &full);
    verdict(
        err < 0.10,
        format!("Frobenius relative error {err:.4} (all first-order terms kept: {err_full:.4})"),
    )
}

fn ac08() -> Result<String, String> {
    let mut worst_pilot: f64 = 0.0;
    for (m, k) in [(1, 1), (2, 4), (2, 16), (2, 128), (2, 512), (4, 64)] {
        let x = build_pilot(m, k, 1.0).unwrap().matrix;
        let r = &(&x * &x.adjoint()) - &CMatrix::identity(m).scale(k as f64);
        let max = r.as_slice().iter().map(|v| v.norm()).fold(0.0, f64::max);
        worst_pilot = worst_pilot.max(max);
    }
    let cfg = LinkConfig {
        n0: 0.0,
        ..LinkConfig::default()
    };
    let mut errors = 0;
    let mut bits = 0;
    for mcs in Mcs::standard_set() {
        let plan = FramePlan::new(2, 4, 64, mcs, Mcs::bpsk(), 2, 1536).unwrap();
        let r = estimate_ber(&cfg, &plan, &JammingAction::none(), 20, 8).unwrap();
        errors += r.data.bit_errors + r.ack.bit_errors;
        bits += r.data.bits + r.ack.bits;
    }
    verdict(
        errors == 0 && worst_pilot < 1e-10,
        format!("{errors} errors in {bits} bits over four MCS, pilot residual {worst_pilot:.2e}"),
    )
}

fn learning_runs() -> &'static Vec<PairedRun> {
    static RUNS: OnceLock<Vec<PairedRun>> = OnceLock::new();
    RUNS.get_or_init(|| run_learning(&config("learning.toml")).unwrap())
}

fn ac09() -> Result<String, String> {
    let runs = learning_runs();
    let pilot128 = 60..80;
    let ack = 100..120;
    let mut hits = [0usize; 3];
    let mut all = 0;
    for r in runs {
        let t = &r.enhanced.trace;
        let first = t[999].state.route == 1 && t[999].state.mcs == 4 && pilot128.contains(&t[999].best_action.0);
        let second = t[1999].state.route == 2 && ack.contains(&t[1999].best_action.0);
        let last = t[3999].state.route == 2 && ack.contains(&t[3999].best_action.0);
        for (h, ok) in hits.iter_mut().zip([first, second, last]) {
            *h += ok as usize;
        }
        all += (first && second && last) as usize;
    }
    let n = runs.len();
    verdict(
        n >= 20 && 2 * all > n,
        format!(
            "{all}/{n} seeds converge as expected (pilot-128 in R1M4: {}, ACK after first route-2 switch: {}, ACK at step 4000: {})",
            hits[0], hits[1], hits[2]
        ),
    )
}

fn ac10() -> Result<String, String> {
    let runs = learning_runs();
    let mut re: Vec<f64> = runs.iter().map(|r| r.enhanced.reward_at(4000)).collect();
    let mut rs: Vec<f64> = runs.iter().map(|r| r.semi_uniform.reward_at(4000)).collect();
    let mut ce: Vec<f64> = runs.iter().map(|r| r.enhanced.best_action_changes(2000) as f64).collect();
    let mut cs: Vec<f64> = runs.iter().map(|r| r.semi_uniform.best_action_changes(2000) as f64).collect();
    let wins = re.iter().zip(&rs).filter(|(a, b)| a > b).count();
    let (mre, mrs, mce, mcs) = (median(&mut re), median(&mut rs), median(&mut ce), median(&mut cs));
    verdict(
        runs.len() >= 20 && mre > mrs && mce < mcs,
        format!(
            "median reward {mre:.0} vs {mrs:.0} ({wins}/{} paired wins), median best-action changes {mce} vs {mcs}",
            runs.len()
        ),
    )
}

fn ac11() -> Result<String, String> {
    let mut sweep = config("fig4_sweep.toml");
    {
        let s = sweep.sweep.as_mut().unwrap();
        s.frames = 40;
        s.energies = vec![0.0, 10.0];
        s.schemes = vec![Scheme::Barrage, Scheme::Pilot, Scheme::Ack];
        s.common_random_numbers = false;
    }
    let mut theorems = config("theorems_sim.toml");
    {
        let t = theorems.theorems.as_mut().unwrap();
        t.check_frames = 20;
        t.lambda_trials = 2000;
    }
    let mut learning = config("learning.toml");
    {
        let l = learning.learning.as_mut().unwrap();
        l.steps = 1500;
        l.seeds = 3;
    }
    let mut checked = 0;
    for cfg in [sweep, theorems, learning] {
        let mut outputs = Vec::new();
        for threads in [1, 3, 1] {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let files = execute(&cfg, dir.path(), Some(threads)).map_err(|e| format!("{e:#}"))?;
            let contents: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();
            let hash = cfg.hash();
            for c in &contents {
                let text = String::from_utf8_lossy(c);
                if !text.lines().skip(1).all(|l| l.starts_with(&hash)) {
                    return Err(format!("{} row without config hash", cfg.mode.name()));
                }
            }
            outputs.push(contents);
        }
        if outputs.windows(2).any(|w| w[0] != w[1]) {
            return Err(format!("{} output differs between runs", cfg.mode.name()));
        }
        checked += outputs[0].len();
    }
    Ok(format!("{checked} files byte-identical across 3 runs at 1 and 3 threads"))
}

fn main() {
    let criteria: [(&str, &str, Check); 11] = [
        ("ac01", "barrage energy normalization", ac01),
        ("ac02", "pilot-vs-barrage crossover", ac02),
        ("ac03", "pilot-vs-ACK boundary", ac03),
        ("ac04", "data BER ordering", ac04),
        ("ac05", "pilot corrupts ACK ordering", ac05),
        ("ac06", "estimation error moment oracle", ac06),
        ("ac07", "post-processing noise oracle", ac07),
        ("ac08", "noiseless ZF/MRC exactness", ac08),
        ("ac09", "learning convergence", ac09),
        ("ac10", "enhanced vs semi-uniform exploration", ac10),
        ("ac11", "determinism", ac11),
    ];
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, check) in criteria {
        if !filters.is_empty() && !filters.iter().any(|f| id.starts_with(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(d) => println!("{id} {name}: PASS ({d}) [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("{id} {name}: FAIL ({d}) [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
