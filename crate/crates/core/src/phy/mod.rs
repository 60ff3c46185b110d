//! Physical layer: MCS table, frame layout, orthogonal pilots, least-squares
//! channel estimation, zero-forcing detection on the forward link and
//! beamforming / maximal-ratio recovery on the ACK link.

pub mod modulation;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::channel::{ack_gram, LinkConfig};
use crate::error::{Error, Result};
use crate::numerics::{left_pinv, max_eigenpair, right_pinv, CMatrix, C64};

pub use modulation::{demodulate, modulate, Constellation};

/// Modulation and coding scheme with its PER-vs-SINR fit
/// `PER = 1` for `SINR <= gamma_th`, `a * exp(-b * SINR)` above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Mcs {
    pub id: u8,
    pub bits_per_symbol: u32,
    pub a: f64,
    pub b: f64,
    /// Linear SINR threshold.
    pub gamma_th: f64,
}

impl Mcs {
    pub fn new(id: u8, bits_per_symbol: u32, a: f64, b: f64, gamma_th: f64) -> Result<Self> {
        let mcs = Self {
            id,
            bits_per_symbol,
            a,
            b,
            gamma_th,
        };
        mcs.validate()?;
        Ok(mcs)
    }

    /// PER-fit parameters with the threshold placed where the exponential
    /// reaches 1, so the model is continuous.
    pub fn with_continuous_threshold(id: u8, bits_per_symbol: u32, a: f64, b: f64) -> Self {
        Self {
            id,
            bits_per_symbol,
            a,
            b,
            gamma_th: a.ln().max(0.0) / b,
        }
    }

    pub fn validate(&self) -> Result<()> {
        Constellation::new(self.bits_per_symbol, 1.0)?;
        if !(self.a > 0.0 && self.b > 0.0 && self.gamma_th > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "MCS {}: a, b and gamma_th must be positive",
                self.id
            )));
        }
        let edge = self.a * (-self.b * self.gamma_th).exp();
        if edge > 1.0 + 1e-9 {
            return Err(Error::InvalidConfig(format!(
                "MCS {}: a*exp(-b*gamma_th) = {edge} exceeds 1",
                self.id
            )));
        }
        Ok(())
    }

    // Fits for 1080-bit packets from the AMC rate-adaptation literature
    // (BPSK 1/2, QPSK 1/2, 16QAM 3/4, 64QAM 3/4).
    pub fn bpsk() -> Self {
        Self::with_continuous_threshold(1, 1, 274.7229, 7.9932)
    }

    pub fn qpsk() -> Self {
        Self::with_continuous_threshold(2, 2, 90.2514, 3.4998)
    }

    pub fn qam16() -> Self {
        Self::with_continuous_threshold(3, 4, 35.3508, 0.2050)
    }

    pub fn qam64() -> Self {
        Self::with_continuous_threshold(4, 6, 39.0496, 0.0442)
    }

    /// MCS 1..=4 in increasing rate.
    pub fn standard_set() -> [Mcs; 4] {
        [Self::bpsk(), Self::qpsk(), Self::qam16(), Self::qam64()]
    }

    pub fn by_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "bpsk" => Some(Self::bpsk()),
            "qpsk" => Some(Self::qpsk()),
            "16qam" | "qam16" => Some(Self::qam16()),
            "64qam" | "qam64" => Some(Self::qam64()),
            _ => None,
        }
    }
}

/// Frame layout in symbol slots: `K` pilot vectors, `D` data vectors,
/// then `A` scalar ACK symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FramePlan {
    pub k: usize,
    pub d: usize,
    pub a: usize,
    pub data_mcs: Mcs,
    pub ack_mcs: Mcs,
    pub packets_per_frame: usize,
    pub packet_bits: usize,
}

impl FramePlan {
    /// Derives `D` from the payload so that the packets exactly fill the
    /// data block across `m` spatial streams.
    pub fn new(
        m: usize,
        k: usize,
        a: usize,
        data_mcs: Mcs,
        ack_mcs: Mcs,
        packets_per_frame: usize,
        packet_bits: usize,
    ) -> Result<Self> {
        let per_slot = data_mcs.bits_per_symbol as usize * m;
        let payload = packets_per_frame * packet_bits;
        if per_slot == 0 || payload % per_slot != 0 {
            return Err(Error::InvalidConfig(format!(
                "{packets_per_frame} packets of {packet_bits} bits do not fill whole \
                 {m}-stream slots of {} bits per symbol",
                data_mcs.bits_per_symbol
            )));
        }
        let plan = Self {
            k,
            d: payload / per_slot,
            a,
            data_mcs,
            ack_mcs,
            packets_per_frame,
            packet_bits,
        };
        plan.validate(m)?;
        Ok(plan)
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if self.k < m {
            return Err(Error::InvalidConfig(format!(
                "pilot length {} is shorter than the {m} transmit antennas",
                self.k
            )));
        }
        if self.a == 0 || self.packets_per_frame == 0 || self.packet_bits == 0 {
            return Err(Error::InvalidConfig(
                "ACK length and packet sizes must be positive".into(),
            ));
        }
        if self.d * m * self.data_mcs.bits_per_symbol as usize
            != self.packets_per_frame * self.packet_bits
        {
            return Err(Error::InvalidConfig(format!(
                "data block of {} slots does not match {} packets of {} bits",
                self.d, self.packets_per_frame, self.packet_bits
            )));
        }
        self.data_mcs.validate()?;
        self.ack_mcs.validate()?;
        Ok(())
    }

    pub fn pilot_slots(&self) -> Range<usize> {
        0..self.k
    }

    pub fn data_slots(&self) -> Range<usize> {
        self.k..self.k + self.d
    }

    pub fn ack_slots(&self) -> Range<usize> {
        self.k + self.d..self.k + self.d + self.a
    }

    pub fn frame_len(&self) -> usize {
        self.k + self.d + self.a
    }

    pub fn data_bits(&self) -> usize {
        self.packets_per_frame * self.packet_bits
    }

    pub fn ack_bits(&self) -> usize {
        self.a * self.ack_mcs.bits_per_symbol as usize
    }

    /// Same frame with a different pilot length.
    pub fn with_pilot_len(mut self, k: usize) -> Self {
        self.k = k;
        self
    }
}

/// A streams x slots block of symbols with a nominal per-symbol energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolBlock {
    pub matrix: CMatrix,
    pub energy_per_symbol: f64,
}

impl SymbolBlock {
    /// Empirical mean `|s|^2` over the block.
    pub fn mean_energy(&self) -> f64 {
        let (r, c) = self.matrix.shape();
        self.matrix.norm_sqr() / (r * c) as f64
    }
}

/// Scaled rows of the K-point DFT, so that `X X^H = K Es I_M`.
pub fn build_pilot(m: usize, k: usize, es: f64) -> Result<SymbolBlock> {
    if m == 0 {
        return Err(Error::EmptyDimension { rows: m, cols: k });
    }
    if k < m {
        return Err(Error::InvalidConfig(format!(
            "pilot length {k} cannot train {m} antennas"
        )));
    }
    let amp = es.sqrt();
    let mut x = CMatrix::zeros(m, k);
    for row in 0..m {
        for col in 0..k {
            // Reduce the exponent mod K first to keep the angle small.
            let e = (row * col) % k;
            let angle = -2.0 * std::f64::consts::PI * e as f64 / k as f64;
            x[(row, col)] = C64::from_polar(amp, angle);
        }
    }
    Ok(SymbolBlock {
        matrix: x,
        energy_per_symbol: es,
    })
}

/// Least-squares estimate `Y X^+` of the channel from a received pilot block.
pub fn ls_estimate(y: &CMatrix, pilot: &SymbolBlock) -> Result<CMatrix> {
    if y.cols() != pilot.matrix.cols() {
        return Err(Error::DimensionMismatch(format!(
            "received block has {} slots, pilot has {}",
            y.cols(),
            pilot.matrix.cols()
        )));
    }
    y.try_mul(&right_pinv(&pilot.matrix)?)
}

/// Zero-forcing equalizer with the pseudo-inverse computed once.
#[derive(Debug, Clone)]
pub struct ZfDetector {
    pinv: CMatrix,
}

impl ZfDetector {
    pub fn new(h_hat: &CMatrix) -> Result<Self> {
        Ok(Self {
            pinv: left_pinv(h_hat)?,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.pinv
    }

    pub fn detect(&self, y: &CMatrix) -> Result<CMatrix> {
        self.pinv.try_mul(y)
    }

    /// Allocation-free variant for the simulation inner loop.
    #[inline]
    pub fn detect_into(&self, y: &[C64], out: &mut [C64]) {
        let n = self.pinv.cols();
        let p = self.pinv.as_slice();
        for (m, o) in out.iter_mut().enumerate() {
            let row = &p[m * n..(m + 1) * n];
            *o = row.iter().zip(y).map(|(a, b)| a * b).sum();
        }
    }
}

/// `x_hat = H_hat^+ y`.
pub fn zf_detect(y: &CMatrix, h_hat: &CMatrix) -> Result<CMatrix> {
    ZfDetector::new(h_hat)?.detect(y)
}

/// Beamformer `u = sqrt(N) v` with `v` the dominant unit eigenvector of
/// `(H_hat^T)^H H_hat^T`, so `||u||^2 = N`.
pub fn beamform_vector(h_hat: &CMatrix) -> Result<CMatrix> {
    if h_hat.norm_sqr() == 0.0 {
        return Err(Error::Singular);
    }
    let n = h_hat.rows();
    let (_, v) = max_eigenpair(&ack_gram(h_hat))?;
    Ok(v.scale((n as f64).sqrt()))
}

/// Maximal-ratio combiner for the ACK: `x_hat = w^H y / c` with
/// `w^H = u^H (H_hat^T)^H` and `c = u^H (H_hat^T)^H H_hat^T u`.
#[derive(Debug, Clone)]
pub struct AckCombiner {
    weights: Vec<C64>,
    normalizer: f64,
}

impl AckCombiner {
    pub fn new(h_hat: &CMatrix, u: &CMatrix) -> Result<Self> {
        let (n, m) = h_hat.shape();
        if u.shape() != (n, 1) {
            return Err(Error::DimensionMismatch(format!(
                "beamformer is {}x{}, expected {n}x1",
                u.rows(),
                u.cols()
            )));
        }
        // Effective transmit vector H_hat^T u (M x 1); weights are its conjugate.
        let eff: Vec<C64> = (0..m)
            .map(|mi| (0..n).map(|ni| h_hat[(ni, mi)] * u[(ni, 0)]).sum())
            .collect();
        let normalizer: f64 = eff.iter().map(|z| z.norm_sqr()).sum();
        if !(normalizer > 0.0) || !normalizer.is_finite() {
            return Err(Error::Singular);
        }
        Ok(Self {
            weights: eff.iter().map(|z| z.conj()).collect(),
            normalizer,
        })
    }

    /// `u^H (H_hat^T)^H H_hat^T u`.
    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    #[inline]
    pub fn combine(&self, y: &[C64]) -> C64 {
        self.weights.iter().zip(y).map(|(w, y)| w * y).sum::<C64>() / self.normalizer
    }
}

/// Recovers one ACK symbol from the M-antenna receive vector `y`.
pub fn ack_recover(y: &CMatrix, h_hat: &CMatrix, u: &CMatrix) -> Result<C64> {
    if y.shape() != (h_hat.cols(), 1) {
        return Err(Error::DimensionMismatch(format!(
            "ACK receive vector is {}x{}, expected {}x1",
            y.rows(),
            y.cols(),
            h_hat.cols()
        )));
    }
    Ok(AckCombiner::new(h_hat, u)?.combine(y.as_slice()))
}

/// Convenience: the pilot for a link/frame pair.
pub fn pilot_for(cfg: &LinkConfig, plan: &FramePlan) -> Result<SymbolBlock> {
    build_pilot(cfg.m, plan.k, cfg.es)
}
