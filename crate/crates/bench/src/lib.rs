//! Criterion benchmarks for the hot paths of `mimojam-core`.
//!
//! Run with `cargo bench -p mimojam-bench`.

use mimojam_core::numerics::sample_complex_gaussian;
use mimojam_core::rng::stream_rng;
use mimojam_core::CMatrix;

/// Deterministic `rows x cols` Rayleigh matrix for benchmark inputs.
pub fn fixture_matrix(rows: usize, cols: usize, seed: u64) -> CMatrix {
    let mut rng = stream_rng(seed, 0, 0);
    sample_complex_gaussian(rows, cols, 1.0, &mut rng).expect("valid shape")
}
