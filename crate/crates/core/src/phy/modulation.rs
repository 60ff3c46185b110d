//! Gray-mapped square constellations (BPSK, QPSK, 16QAM, 64QAM, ...).
//!
//! A label of `b` bits is split MSB-first into an in-phase half and a
//! quadrature half (BPSK has no quadrature bits). Each half is a Gray-coded
//! PAM index ordered from the most positive level downwards, so bit 0 maps
//! to the positive side: BPSK sends `0 -> +sqrt(Es)` and `1 -> -sqrt(Es)`.

use crate::error::{Error, Result};
use crate::numerics::C64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Constellation {
    bits_per_symbol: u32,
    i_bits: u32,
    q_bits: u32,
    /// Amplitude of one PAM step.
    step: f64,
}

#[inline]
fn gray(i: u32) -> u32 {
    i ^ (i >> 1)
}

#[inline]
fn gray_inverse(mut g: u32) -> u32 {
    let mut i = g;
    while g > 1 {
        g >>= 1;
        i ^= g;
    }
    i
}

impl Constellation {
    pub fn new(bits_per_symbol: u32, es: f64) -> Result<Self> {
        let (i_bits, q_bits) = match bits_per_symbol {
            1 => (1, 0),
            b if b % 2 == 0 && b <= 16 => (b / 2, b / 2),
            b => return Err(Error::UnsupportedConstellation(b)),
        };
        // Mean of (2^k - 1 - 2i)^2 over i is (4^k - 1) / 3.
        let axis_energy = |k: u32| {
            if k == 0 {
                0.0
            } else {
                ((1u64 << (2 * k)) - 1) as f64 / 3.0
            }
        };
        let unit_energy = axis_energy(i_bits) + axis_energy(q_bits);
        Ok(Self {
            bits_per_symbol,
            i_bits,
            q_bits,
            step: (es / unit_energy).sqrt(),
        })
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn size(&self) -> u32 {
        1 << self.bits_per_symbol
    }

    #[inline]
    fn level(&self, index: u32, bits: u32) -> f64 {
        (((1u32 << bits) - 1) as f64 - 2.0 * index as f64) * self.step
    }

    /// Maps a label (`bits_per_symbol` bits, MSB first) to a symbol.
    #[inline]
    pub fn map(&self, label: u32) -> C64 {
        let q_mask = (1u32 << self.q_bits) - 1;
        let i_label = label >> self.q_bits;
        let re = self.level(gray_inverse(i_label), self.i_bits);
        let im = if self.q_bits == 0 {
            0.0
        } else {
            self.level(gray_inverse(label & q_mask), self.q_bits)
        };
        C64::new(re, im)
    }

    /// Nearest-point hard decision. A sample exactly on a decision boundary
    /// resolves to the lower of the two neighbouring Gray labels.
    #[inline]
    pub fn demap(&self, symbol: C64) -> u32 {
        let i_label = self.axis_decision(symbol.re, self.i_bits);
        if self.q_bits == 0 {
            i_label
        } else {
            (i_label << self.q_bits) | self.axis_decision(symbol.im, self.q_bits)
        }
    }

    #[inline]
    fn axis_decision(&self, x: f64, bits: u32) -> u32 {
        let max_index = (1u32 << bits) - 1;
        let t = (max_index as f64 - x / self.step) * 0.5;
        if !t.is_finite() {
            return if x > 0.0 { gray(0) } else { gray(max_index) };
        }
        let lo = t.floor();
        let frac = t - lo;
        let clamp = |v: f64| v.max(0.0).min(max_index as f64) as u32;
        let index = if frac < 0.5 {
            clamp(lo)
        } else if frac > 0.5 {
            clamp(lo + 1.0)
        } else {
            let a = gray(clamp(lo));
            let b = gray(clamp(lo + 1.0));
            return a.min(b);
        };
        gray(index)
    }
}

fn pack(bits: &[u8]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1))
}

/// Maps a bit sequence to symbols of average energy `es`.
pub fn modulate(bits: &[u8], bits_per_symbol: u32, es: f64) -> Result<Vec<C64>> {
    let c = Constellation::new(bits_per_symbol, es)?;
    let b = bits_per_symbol as usize;
    if bits.len() % b != 0 {
        return Err(Error::BitLength {
            len: bits.len(),
            bits_per_symbol,
        });
    }
    Ok(bits.chunks_exact(b).map(|chunk| c.map(pack(chunk))).collect())
}

/// Hard-decision inverse of [`modulate`].
pub fn demodulate(symbols: &[C64], bits_per_symbol: u32, es: f64) -> Result<Vec<u8>> {
    let c = Constellation::new(bits_per_symbol, es)?;
    let b = bits_per_symbol;
    let mut out = Vec::with_capacity(symbols.len() * b as usize);
    for &s in symbols {
        let label = c.demap(s);
        out.extend((0..b).rev().map(|k| ((label >> k) & 1) as u8));
    }
    Ok(out)
}
