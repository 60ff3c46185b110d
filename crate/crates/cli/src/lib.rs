//! Config-driven experiment runner: BER sweeps, theorem checks and learning
//! runs, each written as CSV tables.

pub mod config;
pub mod learn;
pub mod output;
pub mod sweep;
pub mod theorems;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};

pub use config::{ExperimentConfig, Mode};

/// Runs `cfg` on a pool of `threads` workers (rayon's default when `None`)
/// and writes its tables into `out_dir`. Returns the files written.
pub fn execute(cfg: &ExperimentConfig, out_dir: &Path, threads: Option<usize>) -> Result<Vec<PathBuf>> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            bail!("--threads must be at least 1");
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().context("building thread pool")?;
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    pool.install(|| write_outputs(cfg, out_dir))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_outputs(cfg: &ExperimentConfig, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let hash = cfg.hash();
    let mut files = Vec::new();
    let mut emit = |name: &str, f: &dyn Fn(BufWriter<File>) -> Result<()>| -> Result<()> {
        let path = out_dir.join(name);
        f(create(&path)?).with_context(|| format!("writing {}", path.display()))?;
        files.push(path);
        Ok(())
    };
    match cfg.mode {
        Mode::BerSweep => {
            let rows = sweep::run_ber_sweep(cfg)?;
            emit("ber_sweep.csv", &|w| output::write_sweep(w, &hash, &rows))?;
        }
        Mode::TheoremCheck => {
            let rows = theorems::run_theorem_check(cfg)?;
            emit("theorem_check.csv", &|w| {
                output::write_theorems(w, &hash, cfg.seed, &rows)
            })?;
        }
        Mode::Learning => {
            let runs = learn::run_learning(cfg)?;
            let window = cfg.learning.as_ref().map_or(0, |l| l.fluctuation_window);
            emit("learning_trace.csv", &|w| output::write_trace(w, &hash, &runs))?;
            emit("best_actions.csv", &|w| output::write_best_actions(w, &hash, &runs))?;
            emit("learning_summary.csv", &|w| {
                output::write_summary(w, &hash, window, &runs)
            })?;
        }
    }
    Ok(files)
}
