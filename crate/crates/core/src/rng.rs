//! Deterministic random substreams.
//!
//! Every stream is a ChaCha8 generator keyed by the master seed and
//! positioned on its own 64-bit stream id, so trial `t` always draws the same
//! numbers no matter how many workers run the experiment.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type Substream = ChaCha8Rng;

/// What a stream is used for. Encoded in the top byte of the stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum StreamPurpose {
    Channel = 0,
    Codebook = 1,
    FixedCodebook = 2,
    Auxiliary = 3,
}

const PURPOSE_SHIFT: u32 = 56;
const INDEX_MASK: u64 = (1 << PURPOSE_SHIFT) - 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Stream for `index` (usually a trial number) tagged with `purpose`.
    ///
    /// Indices are limited to 56 bits so the purpose tag never collides.
    pub fn tagged(master_seed: u64, purpose: StreamPurpose, index: u64) -> Self {
        assert!(index <= INDEX_MASK, "stream index {index} exceeds 56 bits");
        Self {
            master_seed,
            stream_id: ((purpose as u64) << PURPOSE_SHIFT) | index,
        }
    }
}

pub fn make_substream(seed: SeedSpec) -> Substream {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.master_seed.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(seed.stream_id);
    rng
}
