//! Deterministic per-task random streams.
//!
//! Every unit of work draws from its own ChaCha8 stream whose seed is a hash of
//! the master seed and the task coordinates, so results never depend on the
//! order in which tasks run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Distinct tags give independent streams for the
/// same task coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    StatePreparation = 1,
    Canonicalization = 2,
    Sampling = 3,
    Distribution = 4,
    Ghz = 5,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub state_id: u64,
    pub t: u64,
    pub repetition: u64,
    pub purpose: Purpose,
}

impl StreamKey {
    pub fn new(master_seed: u64, purpose: Purpose) -> Self {
        StreamKey {
            master_seed,
            state_id: 0,
            t: 0,
            repetition: 0,
            purpose,
        }
    }

    pub fn state(mut self, state_id: u64) -> Self {
        self.state_id = state_id;
        self
    }

    pub fn noise_level(mut self, t: u64) -> Self {
        self.t = t;
        self
    }

    pub fn repetition(mut self, repetition: u64) -> Self {
        self.repetition = repetition;
        self
    }

    /// 64-bit digest of the key; also reported as the row seed in outputs.
    pub fn seed(&self) -> u64 {
        let mut h = splitmix64(self.master_seed ^ 0x7461_6e67_6c65_3321);
        for word in [
            self.state_id,
            self.t,
            self.repetition,
            self.purpose as u64,
        ] {
            h = splitmix64(h ^ word);
        }
        h
    }

    pub fn rng(&self) -> StreamRng {
        seeded_rng(self.seed())
    }
}

/// ChaCha8 stream expanded from a 64-bit seed.
pub fn seeded_rng(seed: u64) -> StreamRng {
    let mut bytes = [0u8; 32];
    let mut s = seed;
    for chunk in bytes.chunks_exact_mut(8) {
        s = splitmix64(s);
        chunk.copy_from_slice(&s.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
