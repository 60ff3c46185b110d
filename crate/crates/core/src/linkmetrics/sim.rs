//! Monte Carlo frame simulation over the full pilot / data / ACK pipeline.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{draw_channels, LinkConfig};
use crate::error::Result;
use crate::jamming::{allocate_energy, EnergyAllocation, JammingAction, Scheme};
use crate::numerics::{complex_gaussian, CMatrix, C64};
use crate::phy::{
    beamform_vector, build_pilot, ls_estimate, AckCombiner, Constellation, FramePlan,
    SymbolBlock, ZfDetector,
};
use crate::rng::{FrameStreams, SimRng};

use super::sinr::{sinr_barrage, sinr_pilot, SinrReport};

/// Error counts for one target in one frame.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub bit_errors: u64,
    pub bits: u64,
    pub packet_errors: u64,
    pub packets: u64,
    /// The receiver could not invert its channel estimate.
    pub flagged: bool,
}

impl TrialOutcome {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }

    /// Outcome of a frame the receiver had to give up on: half the bits and
    /// every packet count as errors.
    fn failed(bits: u64, packets: u64) -> Self {
        Self {
            bit_errors: bits / 2,
            bits,
            packet_errors: packets,
            packets,
            flagged: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOutcome {
    pub data: TrialOutcome,
    pub ack: TrialOutcome,
    /// Closed-form data SINR for this channel draw under the frame's scheme.
    pub sinr: Option<SinrReport>,
}

impl FrameOutcome {
    pub fn flagged(&self) -> bool {
        self.data.flagged || self.ack.flagged
    }
}

/// Hands out uniform bits from a generator, 64 at a time.
struct BitSource {
    word: u64,
    left: u32,
}

impl BitSource {
    fn new() -> Self {
        Self { word: 0, left: 0 }
    }

    #[inline]
    fn take<R: Rng>(&mut self, n: u32, rng: &mut R) -> u32 {
        debug_assert!(n <= 32);
        if self.left < n {
            self.word = rng.random();
            self.left = 64;
        }
        let v = (self.word & ((1u64 << n) - 1)) as u32;
        self.word >>= n;
        self.left -= n;
        v
    }
}

#[inline]
fn unit_cn(rng: &mut SimRng) -> C64 {
    complex_gaussian(1.0, rng)
}

/// Reusable simulator for one (link, frame plan, action) point.
///
/// Every frame draws its randomness from [`FrameStreams`] keyed by
/// `(seed, frame)`. Jamming and noise are unit draws scaled afterwards, so
/// two points that differ only in jamming energy see identical channels,
/// bits, noise and jamming waveforms.
#[derive(Debug, Clone)]
pub struct FrameSimulator {
    cfg: LinkConfig,
    plan: FramePlan,
    action: JammingAction,
    alloc: EnergyAllocation,
    pilot: SymbolBlock,
    data_const: Constellation,
    ack_const: Constellation,
}

impl FrameSimulator {
    pub fn new(cfg: &LinkConfig, plan: &FramePlan, action: &JammingAction) -> Result<Self> {
        cfg.validate()?;
        plan.validate(cfg.m)?;
        let alloc = allocate_energy(action, cfg, plan)?;
        Ok(Self {
            cfg: *cfg,
            plan: *plan,
            action: *action,
            alloc,
            pilot: build_pilot(cfg.m, plan.k, cfg.es)?,
            data_const: Constellation::new(plan.data_mcs.bits_per_symbol, cfg.es)?,
            ack_const: Constellation::new(plan.ack_mcs.bits_per_symbol, cfg.es)?,
        })
    }

    pub fn allocation(&self) -> &EnergyAllocation {
        &self.alloc
    }

    /// Adds `sqrt(E_j) * J z` for a fresh unit jamming vector `z`, if the
    /// slot is jammed.
    #[inline]
    fn add_jamming(&self, slot: usize, path: &CMatrix, y: &mut [C64], z: &mut [C64], rng: &mut SimRng) {
        let e = self.alloc.energy_at(slot);
        if e == 0.0 {
            return;
        }
        let amp = e.sqrt();
        for zi in z.iter_mut() {
            *zi = unit_cn(rng) * amp;
        }
        let p = path.as_slice();
        let l = path.cols();
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &p[i * l..(i + 1) * l];
            *yi += row.iter().zip(z.iter()).map(|(a, b)| a * b).sum::<C64>();
        }
    }

    #[inline]
    fn add_noise(&self, y: &mut [C64], rng: &mut SimRng) {
        if self.cfg.n0 == 0.0 {
            return;
        }
        let amp = self.cfg.n0.sqrt();
        for yi in y.iter_mut() {
            *yi += unit_cn(rng) * amp;
        }
    }

    pub fn simulate(&self, seed: u64, frame: u64) -> Result<FrameOutcome> {
        let cfg = &self.cfg;
        let plan = &self.plan;
        let (n, l) = (cfg.n, cfg.l);
        let mut st = FrameStreams::new(seed, frame);
        let ch = draw_channels(cfg, &mut st.channel)?;

        let mut z = vec![C64::new(0.0, 0.0); l];

        // Pilot phase.
        let mut y_pilot = &ch.h * &self.pilot.matrix;
        let mut col = vec![C64::new(0.0, 0.0); n];
        for s in 0..plan.k {
            for i in 0..n {
                col[i] = y_pilot[(i, s)];
            }
            self.add_jamming(s, &ch.g, &mut col, &mut z, &mut st.jam);
            self.add_noise(&mut col, &mut st.pilot);
            for i in 0..n {
                y_pilot[(i, s)] = col[i];
            }
        }
        let h_hat = ls_estimate(&y_pilot, &self.pilot)?;

        let data = match ZfDetector::new(&h_hat) {
            Ok(zf) => self.data_phase(&ch.h, &ch.g, &zf, &mut z, &mut st),
            Err(_) => TrialOutcome::failed(
                plan.data_bits() as u64,
                plan.packets_per_frame as u64,
            ),
        };

        let ack = match beamform_vector(&h_hat)
            .and_then(|u| AckCombiner::new(&h_hat, &u).map(|c| (u, c)))
        {
            Ok((u, comb)) => self.ack_phase(&ch.h, &ch.f, &u, &comb, &mut z, &mut st),
            Err(_) => TrialOutcome::failed(plan.ack_bits() as u64, 1),
        };

        Ok(FrameOutcome {
            data,
            ack,
            sinr: self.closed_form_sinr(&ch.h, &ch.g),
        })
    }

    fn data_phase(
        &self,
        h: &CMatrix,
        g: &CMatrix,
        zf: &ZfDetector,
        z: &mut [C64],
        st: &mut FrameStreams,
    ) -> TrialOutcome {
        let plan = &self.plan;
        let (m, n) = (self.cfg.m, self.cfg.n);
        let bps = self.data_const.bits_per_symbol();
        let packet_bits = plan.packet_bits as u64;
        let mut packet_err = vec![false; plan.packets_per_frame];
        let mut bit_errors = 0u64;
        let mut bits = BitSource::new();
        let mut labels = vec![0u32; m];
        let mut x = vec![C64::new(0.0, 0.0); m];
        let mut y = vec![C64::new(0.0, 0.0); n];
        let mut x_hat = vec![C64::new(0.0, 0.0); m];
        let hs = h.as_slice();

        for (s, slot) in plan.data_slots().enumerate() {
            for j in 0..m {
                labels[j] = bits.take(bps, &mut st.data);
                x[j] = self.data_const.map(labels[j]);
            }
            for i in 0..n {
                let row = &hs[i * m..(i + 1) * m];
                y[i] = row.iter().zip(&x).map(|(a, b)| a * b).sum();
            }
            self.add_jamming(slot, g, &mut y, z, &mut st.jam);
            self.add_noise(&mut y, &mut st.data);
            zf.detect_into(&y, &mut x_hat);
            for j in 0..m {
                let diff = self.data_const.demap(x_hat[j]) ^ labels[j];
                if diff != 0 {
                    bit_errors += u64::from(diff.count_ones());
                    // Label bits are MSB first; a symbol may straddle packets.
                    let base = ((s * m + j) as u64) * u64::from(bps);
                    for b in 0..bps {
                        if diff >> (bps - 1 - b) & 1 == 1 {
                            packet_err[((base + u64::from(b)) / packet_bits) as usize] = true;
                        }
                    }
                }
            }
        }

        TrialOutcome {
            bit_errors,
            bits: plan.data_bits() as u64,
            packet_errors: packet_err.iter().filter(|&&e| e).count() as u64,
            packets: plan.packets_per_frame as u64,
            flagged: false,
        }
    }

    fn ack_phase(
        &self,
        h: &CMatrix,
        f: &CMatrix,
        u: &CMatrix,
        comb: &AckCombiner,
        z: &mut [C64],
        st: &mut FrameStreams,
    ) -> TrialOutcome {
        let m = self.cfg.m;
        let bps = self.ack_const.bits_per_symbol();
        // True effective channel H^T u seen by the transmitter.
        let t = &h.transpose() * u;
        let mut bits = BitSource::new();
        let mut y = vec![C64::new(0.0, 0.0); m];
        let mut bit_errors = 0u64;
        for slot in self.plan.ack_slots() {
            let label = bits.take(bps, &mut st.ack);
            let x = self.ack_const.map(label);
            for i in 0..m {
                y[i] = t[(i, 0)] * x;
            }
            self.add_jamming(slot, f, &mut y, z, &mut st.jam);
            self.add_noise(&mut y, &mut st.ack);
            let diff = self.ack_const.demap(comb.combine(&y)) ^ label;
            bit_errors += u64::from(diff.count_ones());
        }
        TrialOutcome {
            bit_errors,
            bits: self.plan.ack_bits() as u64,
            packet_errors: u64::from(bit_errors > 0),
            packets: 1,
            flagged: false,
        }
    }

    fn closed_form_sinr(&self, h: &CMatrix, g: &CMatrix) -> Option<SinrReport> {
        let cfg = &self.cfg;
        let plan = &self.plan;
        let l = cfg.l as f64;
        match self.action.scheme {
            Scheme::Pilot => {
                // Energy that actually lands on the pilot, spread over K slots.
                let e_jp = self.alloc.energy_in(&plan.pilot_slots()) / (l * plan.k as f64);
                sinr_pilot(h, g, cfg.es, e_jp, cfg.n0, plan.k).ok()
            }
            Scheme::Barrage => sinr_barrage(h, g, cfg.es, self.alloc.per_symbol, cfg.n0).ok(),
            Scheme::None | Scheme::Ack => sinr_barrage(h, g, cfg.es, 0.0, cfg.n0).ok(),
        }
    }
}

/// One frame with the streams of `(seed, frame)`.
pub fn simulate_frame(
    cfg: &LinkConfig,
    plan: &FramePlan,
    action: &JammingAction,
    seed: u64,
    frame: u64,
) -> Result<FrameOutcome> {
    FrameSimulator::new(cfg, plan, action)?.simulate(seed, frame)
}

/// BER estimate for one target with a 95% confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerEstimate {
    pub ber: f64,
    pub ci95: f64,
    pub per: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub packet_errors: u64,
    pub packets: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BerReport {
    pub data: BerEstimate,
    pub ack: BerEstimate,
    pub frames: u64,
    pub flagged_frames: u64,
}

/// Pooled BER with a CI from the spread of per-frame BERs.
///
/// Frames are block-faded, so bits within a frame are strongly correlated and
/// a binomial CI on the pooled bits would be far too narrow.
pub fn summarize<'a, I>(outcomes: I) -> BerEstimate
where
    I: IntoIterator<Item = &'a TrialOutcome>,
{
    let mut bit_errors = 0u64;
    let mut bits = 0u64;
    let mut packet_errors = 0u64;
    let mut packets = 0u64;
    let mut per_frame = Vec::new();
    for o in outcomes {
        bit_errors += o.bit_errors;
        bits += o.bits;
        packet_errors += o.packet_errors;
        packets += o.packets;
        per_frame.push(o.ber());
    }
    let frames = per_frame.len();
    let ber = if bits == 0 {
        0.0
    } else {
        bit_errors as f64 / bits as f64
    };
    let ci95 = if frames < 2 {
        0.0
    } else {
        let mean = per_frame.iter().sum::<f64>() / frames as f64;
        let var = per_frame.iter().map(|b| (b - mean).powi(2)).sum::<f64>() / (frames - 1) as f64;
        1.96 * (var / frames as f64).sqrt()
    };
    BerEstimate {
        ber,
        ci95,
        per: if packets == 0 {
            0.0
        } else {
            packet_errors as f64 / packets as f64
        },
        bit_errors,
        bits,
        packet_errors,
        packets,
    }
}

/// Runs frames `0..frames` in parallel; the result is in frame order.
pub fn run_frames(sim: &FrameSimulator, frames: u64, seed: u64) -> Result<Vec<FrameOutcome>> {
    (0..frames)
        .into_par_iter()
        .map(|f| sim.simulate(seed, f))
        .collect()
}

pub fn report(outcomes: &[FrameOutcome]) -> BerReport {
    BerReport {
        data: summarize(outcomes.iter().map(|o| &o.data)),
        ack: summarize(outcomes.iter().map(|o| &o.ack)),
        frames: outcomes.len() as u64,
        flagged_frames: outcomes.iter().filter(|o| o.flagged()).count() as u64,
    }
}

/// Data and ACK BER over `frames` frames, deterministic in `seed`.
pub fn estimate_ber(
    cfg: &LinkConfig,
    plan: &FramePlan,
    action: &JammingAction,
    frames: u64,
    seed: u64,
) -> Result<BerReport> {
    if frames == 0 {
        return Err(crate::error::Error::InvalidConfig(
            "at least one frame is required".into(),
        ));
    }
    let sim = FrameSimulator::new(cfg, plan, action)?;
    Ok(report(&run_frames(&sim, frames, seed)?))
}

/// Mean of the per-frame BER differences `a - b` with its 95% half-width.
///
/// Both runs must share a seed so that frame `i` sees the same channel in
/// each; the pairing then cancels most of the fading variance.
pub fn paired_difference(a: &[TrialOutcome], b: &[TrialOutcome]) -> (f64, f64) {
    assert_eq!(a.len(), b.len(), "paired runs need equal frame counts");
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x.ber() - y.ber()).collect();
    let n = d.len() as f64;
    let mean = d.iter().sum::<f64>() / n;
    if d.len() < 2 {
        return (mean, 0.0);
    }
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, 1.96 * (var / n).sqrt())
}
