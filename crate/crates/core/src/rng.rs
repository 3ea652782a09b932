//! Counter-based random substreams.
//!
//! Every random draw in a run is taken from a stream addressed by
//! `(seed, purpose, t, n)`. The address is hashed into the state of a
//! xoshiro256++ generator, so a stream costs a few nanoseconds to open and
//! draws do not depend on the order in which particles are processed:
//! parallel and sequential runs agree bit for bit.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// The generator handed to samplers and models.
pub type StreamRng = Xoshiro256PlusPlus;

/// What a stream is used for. Distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Prior,
    Step,
    Resample,
    Simulate,
    Other(u64),
}

impl Purpose {
    fn code(self) -> u64 {
        match self {
            Purpose::Prior => 1,
            Purpose::Step => 2,
            Purpose::Resample => 3,
            Purpose::Simulate => 4,
            Purpose::Other(k) => 0x1000 + k,
        }
    }
}

fn splitmix(x: &mut u64) -> u64 {
    *x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Factory for substreams under one master seed.
#[derive(Debug, Clone, Copy)]
pub struct Streams {
    seed: u64,
}

impl Streams {
    pub fn new(seed: u64) -> Self {
        Streams { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Stream for `purpose` at time `t`, particle `n`.
    pub fn stream(&self, purpose: Purpose, t: u64, n: u64) -> StreamRng {
        let mut s = self.seed ^ purpose.code().wrapping_mul(0xD6E8_FEB8_6659_FD93);
        let mut h = splitmix(&mut s);
        s = h ^ t.wrapping_mul(0xA076_1D64_78BD_642F);
        h = splitmix(&mut s);
        s = h ^ n.wrapping_mul(0xE703_7ED1_A0B4_28DB);
        let mut seed = [0u8; 32];
        for chunk in seed.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix(&mut s).to_le_bytes());
        }
        Xoshiro256PlusPlus::from_seed(seed)
    }

    /// Derived factory, e.g. one per replicate of an experiment.
    pub fn child(&self, index: u64) -> Streams {
        let mut state = self.seed ^ index.wrapping_mul(0xA076_1D64_78BD_642F);
        splitmix(&mut state);
        Streams { seed: splitmix(&mut state) }
    }
}
