//! SINR analytics, the PER model and Monte Carlo BER/PER estimation.

pub mod estimation;
pub mod sim;
pub mod sinr;

pub use estimation::{
    estimation_error_moment, frobenius_relative_error, max_relative_error, post_noise_autocorr,
    post_noise_autocorr_full, sample_estimation_error_moment, sample_post_noise_autocorr,
};
pub use sim::{
    estimate_ber, paired_difference, report, run_frames, simulate_frame, summarize, BerEstimate,
    BerReport, FrameOutcome, FrameSimulator, TrialOutcome,
};
pub use sinr::{
    expected_ack_sinr, expected_data_sinr, expected_sinr, per_lower_bound, per_model, sinr_ack,
    sinr_barrage, sinr_pilot, AckJamming, JamEnergies, SinrReport, SINR_CEILING,
};
