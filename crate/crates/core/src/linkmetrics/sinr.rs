//! Closed-form post-processing SINRs and the PER model.

use serde::{Deserialize, Serialize};

use crate::channel::LinkConfig;
use crate::error::{Error, Result};
use crate::jamming::Scheme;
use crate::numerics::{left_pinv, CMatrix};
use crate::phy::{FramePlan, Mcs};

/// Reported SINRs never exceed this value, so noise-free runs stay finite.
pub const SINR_CEILING: f64 = 1e12;

#[inline]
fn capped_ratio(num: f64, den: f64) -> f64 {
    if den <= 0.0 {
        SINR_CEILING
    } else {
        (num / den).min(SINR_CEILING)
    }
}

/// Linear SINR per spatial stream (one entry for the ACK).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrReport {
    pub per_stream: Vec<f64>,
    pub mean: f64,
}

impl SinrReport {
    pub fn new(per_stream: Vec<f64>) -> Self {
        let mean = if per_stream.is_empty() {
            0.0
        } else {
            per_stream.iter().sum::<f64>() / per_stream.len() as f64
        };
        Self { per_stream, mean }
    }
}

/// Diagonals of `H^+ G G^H (H^+)^H` and `(H^H H)^{-1}`.
fn zf_diagonals(h: &CMatrix, g: &CMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    if h.rows() != g.rows() {
        return Err(Error::DimensionMismatch(format!(
            "H has {} rows, G has {}",
            h.rows(),
            g.rows()
        )));
    }
    let hp = left_pinv(h)?;
    let hg = &hp * g;
    let m = h.cols();
    let mut interf = vec![0.0; m];
    let mut noise = vec![0.0; m];
    for i in 0..m {
        interf[i] = (0..hg.cols()).map(|j| hg[(i, j)].norm_sqr()).sum();
        // (H^H H)^{-1} = H^+ (H^+)^H
        noise[i] = (0..hp.cols()).map(|j| hp[(i, j)].norm_sqr()).sum();
    }
    Ok((interf, noise))
}

/// Per-stream SINR after zero forcing with perfect CSI and barrage jamming.
pub fn sinr_barrage(h: &CMatrix, g: &CMatrix, es: f64, e_j: f64, n0: f64) -> Result<SinrReport> {
    let (interf, noise) = zf_diagonals(h, g)?;
    Ok(SinrReport::new(
        interf
            .iter()
            .zip(&noise)
            .map(|(i, n)| capped_ratio(es, e_j * i + n0 * n))
            .collect(),
    ))
}

/// Effective per-stream SINR when the channel estimate comes from a pilot of
/// length `k` jammed with per-symbol energy `e_j`.
pub fn sinr_pilot(
    h: &CMatrix,
    g: &CMatrix,
    es: f64,
    e_j: f64,
    n0: f64,
    k: usize,
) -> Result<SinrReport> {
    if k == 0 {
        return Err(Error::InvalidConfig("pilot length must be positive".into()));
    }
    let (interf, noise) = zf_diagonals(h, g)?;
    let m = h.cols() as f64;
    let kf = k as f64;
    Ok(SinrReport::new(
        interf
            .iter()
            .zip(&noise)
            .map(|(i, n)| capped_ratio(es, e_j * (m / kf) * i + (1.0 + 1.0 / kf) * n0 * n))
            .collect(),
    ))
}

/// Energies and pilot length entering the ACK SINR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AckJamming {
    pub es: f64,
    /// Per-symbol jamming energy on the pilot that produced `H_hat`.
    pub e_jp: f64,
    /// Per-symbol jamming energy on the ACK itself.
    pub e_ja: f64,
    pub n0: f64,
    pub k: usize,
}

/// ACK SINR after beamforming with `u` and combining with `H_hat`.
///
/// With `c = u^H (H_hat^T)^H H_hat^T u` and the estimation error drawn from
/// the LS error model of a length-`K` pilot, the residual after combining
/// has power `(s_est * c + s_dir) / c^2` where
/// `s_est = (E_jp |G^T u|^2 + N0 |u|^2) / K` and
/// `s_dir = u^H (H_hat^T)^H (E_ja F F^H + N0 I) H_hat^T u`.
pub fn sinr_ack(
    h_hat: &CMatrix,
    u: &CMatrix,
    g: &CMatrix,
    f: &CMatrix,
    p: &AckJamming,
) -> Result<SinrReport> {
    let (n, m) = h_hat.shape();
    if u.shape() != (n, 1) || g.rows() != n || f.rows() != m {
        return Err(Error::DimensionMismatch(format!(
            "ACK SINR needs u {n}x1, G {n}xL and F {m}xL; got u {:?}, G {:?}, F {:?}",
            u.shape(),
            g.shape(),
            f.shape()
        )));
    }
    if p.k == 0 {
        return Err(Error::InvalidConfig("pilot length must be positive".into()));
    }
    let v = &h_hat.transpose() * u;
    let c = v.norm_sqr();
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Singular);
    }
    let gu = (&g.transpose() * u).norm_sqr();
    let fv = (&f.adjoint() * &v).norm_sqr();
    let s_est = (p.e_jp * gu + p.n0 * u.norm_sqr()) / p.k as f64;
    let s_dir = p.e_ja * fv + p.n0 * c;
    Ok(SinrReport::new(vec![capped_ratio(
        c * c * p.es,
        s_est * c + s_dir,
    )]))
}

/// Per-symbol jamming energies on each target.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct JamEnergies {
    pub barrage: f64,
    pub pilot: f64,
    pub ack: f64,
}

/// Expected SINR of the target hit by `scheme`, averaged over the fading.
///
/// `Barrage` and `None` give the data SINR with perfect CSI, `Pilot` the data
/// SINR behind a jammed estimate, `Ack` the beamformed ACK SINR including the
/// residual pilot-jamming term.
pub fn expected_sinr(
    scheme: Scheme,
    cfg: &LinkConfig,
    plan: &FramePlan,
    e: &JamEnergies,
    lambda_max_mean: f64,
) -> f64 {
    let num = cfg.es * cfg.theta_h;
    let k = plan.k as f64;
    match scheme {
        Scheme::None => capped_ratio(num, cfg.n0),
        Scheme::Barrage => capped_ratio(num, e.barrage * cfg.theta_g + cfg.n0),
        Scheme::Pilot => capped_ratio(
            num,
            (cfg.m as f64 / k) * e.pilot * cfg.theta_g + (1.0 + 1.0 / k) * cfg.n0,
        ),
        Scheme::Ack => expected_ack_sinr(cfg, plan.k, e, lambda_max_mean),
    }
}

/// `lambda N Es theta_H / ((N^2/K)(E_jp theta_G + N0) + L E_ja theta_F + N0)`.
pub fn expected_ack_sinr(cfg: &LinkConfig, k: usize, e: &JamEnergies, lambda_max_mean: f64) -> f64 {
    let n = cfg.n as f64;
    let num = lambda_max_mean * n * cfg.es * cfg.theta_h;
    let den = (n * n / k as f64) * (e.pilot * cfg.theta_g + cfg.n0)
        + cfg.l as f64 * e.ack * cfg.theta_f
        + cfg.n0;
    capped_ratio(num, den)
}

/// Expected data SINR with barrage and pilot jamming active together.
pub fn expected_data_sinr(cfg: &LinkConfig, k: usize, e: &JamEnergies) -> f64 {
    let kf = k as f64;
    capped_ratio(
        cfg.es * cfg.theta_h,
        e.barrage * cfg.theta_g
            + (cfg.m as f64 / kf) * e.pilot * cfg.theta_g
            + (1.0 + 1.0 / kf) * cfg.n0,
    )
}

/// Packet error rate of `mcs` at linear SINR `gamma`.
pub fn per_model(gamma: f64, mcs: &Mcs) -> f64 {
    if gamma.is_nan() || gamma <= mcs.gamma_th {
        1.0
    } else {
        (mcs.a * (-mcs.b * gamma).exp()).min(1.0)
    }
}

/// Markov-inequality lower bound `max(0, 1 - gamma_bar / gamma_th)`.
pub fn per_lower_bound(gamma_bar: f64, gamma_th: f64) -> f64 {
    debug_assert!(gamma_th > 0.0);
    (1.0 - gamma_bar / gamma_th).clamp(0.0, 1.0)
}
