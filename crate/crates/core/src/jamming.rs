//! Jamming actions, unit-energy budgeting and Gaussian jamming waveforms.
//!
//! Allocations live in frame coordinates: pilot slots `0..K`, data slots
//! `K..K+D`, ACK slots `K+D..K+D+A` (see [`FramePlan`]).

use std::fmt;
use std::ops::Range;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::LinkConfig;
use crate::error::{Error, Result};
use crate::numerics::{complex_gaussian, CMatrix};
use crate::phy::{FramePlan, SymbolBlock};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    None,
    Barrage,
    Pilot,
    Ack,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::None => "none",
            Scheme::Barrage => "barrage",
            Scheme::Pilot => "pilot",
            Scheme::Ack => "ack",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Total jamming energy is in units of the transmitted symbol energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JammingAction {
    pub scheme: Scheme,
    pub total_energy: f64,
    /// Assumed pilot length; only meaningful for [`Scheme::Pilot`].
    pub pilot_jam_len: usize,
}

impl JammingAction {
    pub fn none() -> Self {
        Self {
            scheme: Scheme::None,
            total_energy: 0.0,
            pilot_jam_len: 0,
        }
    }

    pub fn barrage(total_energy: f64) -> Self {
        Self {
            scheme: Scheme::Barrage,
            total_energy,
            pilot_jam_len: 0,
        }
    }

    pub fn pilot(total_energy: f64, pilot_jam_len: usize) -> Self {
        Self {
            scheme: Scheme::Pilot,
            total_energy,
            pilot_jam_len,
        }
    }

    pub fn ack(total_energy: f64) -> Self {
        Self {
            scheme: Scheme::Ack,
            total_energy,
            pilot_jam_len: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.total_energy >= 0.0) || !self.total_energy.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "jamming energy must be finite and non-negative, got {}",
                self.total_energy
            )));
        }
        if self.scheme == Scheme::Pilot && self.pilot_jam_len == 0 {
            return Err(Error::InvalidConfig(
                "pilot jamming needs a pilot length of at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Per-symbol, per-antenna jamming energy over a contiguous slot range.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyAllocation {
    pub per_symbol: f64,
    pub slots: Range<usize>,
    pub antennas: usize,
}

impl EnergyAllocation {
    pub fn silent(antennas: usize) -> Self {
        Self {
            per_symbol: 0.0,
            slots: 0..0,
            antennas,
        }
    }

    pub fn is_silent(&self) -> bool {
        self.per_symbol == 0.0 || self.slots.is_empty()
    }

    /// `L * E_j * |slots|`.
    pub fn total_energy(&self) -> f64 {
        self.antennas as f64 * self.per_symbol * self.slots.len() as f64
    }

    /// Number of jammed slots inside `range`.
    pub fn overlap(&self, range: &Range<usize>) -> usize {
        let lo = self.slots.start.max(range.start);
        let hi = self.slots.end.min(range.end);
        hi.saturating_sub(lo)
    }

    /// Jamming energy that lands inside `range`.
    pub fn energy_in(&self, range: &Range<usize>) -> f64 {
        self.antennas as f64 * self.per_symbol * self.overlap(range) as f64
    }

    #[inline]
    pub fn energy_at(&self, slot: usize) -> f64 {
        if self.slots.contains(&slot) {
            self.per_symbol
        } else {
            0.0
        }
    }
}

/// Spreads the action's energy evenly over its target.
///
/// A pilot burst always starts at the frame head and lasts `T_p` slots; when
/// `T_p > K` the tail falls on the data block.
pub fn allocate_energy(
    action: &JammingAction,
    cfg: &LinkConfig,
    plan: &FramePlan,
) -> Result<EnergyAllocation> {
    action.validate()?;
    let l = cfg.l;
    let slots = match action.scheme {
        Scheme::None => return Ok(EnergyAllocation::silent(l)),
        Scheme::Barrage => plan.data_slots(),
        Scheme::Pilot => 0..action.pilot_jam_len,
        Scheme::Ack => plan.ack_slots(),
    };
    if action.total_energy == 0.0 {
        return Ok(EnergyAllocation::silent(l));
    }
    let per_symbol = action.total_energy / (l * slots.len()) as f64;
    Ok(EnergyAllocation {
        per_symbol,
        slots,
        antennas: l,
    })
}

/// `L x slots` block of i.i.d. CN(0, E_j) jamming symbols.
pub fn gen_jamming_block<R: Rng + ?Sized>(
    l: usize,
    e_j: f64,
    slots: usize,
    rng: &mut R,
) -> Result<SymbolBlock> {
    if !(e_j >= 0.0) || !e_j.is_finite() {
        return Err(Error::InvalidConfig(format!(
            "jamming energy per symbol must be finite and non-negative, got {e_j}"
        )));
    }
    if l == 0 || slots == 0 {
        return Err(Error::EmptyDimension {
            rows: l,
            cols: slots,
        });
    }
    // Column-major draw order so that each slot's vector is contiguous in
    // the stream, matching the per-slot draws of the frame simulator.
    let mut m = CMatrix::zeros(l, slots);
    for s in 0..slots {
        for a in 0..l {
            m[(a, s)] = complex_gaussian(e_j, rng);
        }
    }
    Ok(SymbolBlock {
        matrix: m,
        energy_per_symbol: e_j,
    })
}

/// Signal-to-jamming ratio in dB for a per-symbol jamming energy spread over
/// `L` antennas.
pub fn sjr_db(es: f64, alloc: &EnergyAllocation) -> f64 {
    10.0 * (es / (alloc.antennas as f64 * alloc.per_symbol)).log10()
}
