//! Seed derivation. Every frame owns a set of independent ChaCha streams
//! keyed by (master seed, frame index), one per signal component, so that
//! grid points sharing a master seed see the same channels and noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// SplitMix64 finalizer over `master` and `index`.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A generator for `stream` of the (master, index) key.
pub fn stream_rng(master: u64, index: u64, stream: u64) -> SimRng {
    let mut rng = SimRng::seed_from_u64(derive_seed(master, index));
    rng.set_stream(stream);
    rng
}

/// Per-frame random streams.
pub struct FrameStreams {
    pub channel: SimRng,
    pub pilot: SimRng,
    pub data: SimRng,
    pub jam: SimRng,
    pub ack: SimRng,
}

impl FrameStreams {
    pub fn new(master: u64, frame: u64) -> Self {
        Self {
            channel: stream_rng(master, frame, 0),
            pilot: stream_rng(master, frame, 1),
            data: stream_rng(master, frame, 2),
            jam: stream_rng(master, frame, 3),
            ack: stream_rng(master, frame, 4),
        }
    }
}
