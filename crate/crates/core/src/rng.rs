//! Counter-based random streams.
//!
//! Every Gaussian variate in the crate is addressed by
//! `(master_seed, stream, path_index, tag, unit)`. Units are grouped into
//! blocks of [`BLOCK_UNITS`]; each block is an independent ChaCha8 stream whose
//! 256-bit key is the little-endian concatenation
//!
//! ```text
//! master_seed ‖ stream ‖ path_index ‖ (tag << 40 | block)
//! ```
//!
//! Inside a block, units are drawn in order, `unit_size` standard normals each.
//! The variates of a unit therefore depend only on its address, never on how
//! many workers run, in what order paths are produced, or how a horizon was
//! reached by successive extensions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

pub const BLOCK_UNITS: u64 = 256;

/// Identifies the random stream of one path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub master_seed: u64,
    /// Separates independent families of paths drawn under one master seed.
    pub stream: u64,
    pub path_index: u64,
}

impl StreamKey {
    pub fn new(master_seed: u64, stream: u64, path_index: u64) -> Self {
        Self {
            master_seed,
            stream,
            path_index,
        }
    }

    pub fn block_rng(&self, tag: u64, block: u64) -> ChaCha8Rng {
        debug_assert!(block < 1 << 40 && tag < 1 << 24);
        let mut seed = [0u8; 32];
        seed[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        seed[8..16].copy_from_slice(&self.stream.to_le_bytes());
        seed[16..24].copy_from_slice(&self.path_index.to_le_bytes());
        seed[24..32].copy_from_slice(&(tag << 40 | block).to_le_bytes());
        ChaCha8Rng::from_seed(seed)
    }

    /// Appends the normals of units `first..first + count` to `out`.
    pub fn unit_normals(
        &self,
        tag: u64,
        first: u64,
        count: u64,
        unit_size: usize,
        out: &mut Vec<f64>,
    ) {
        out.reserve(count as usize * unit_size);
        let end = first + count;
        let mut unit = first;
        while unit < end {
            let block = unit / BLOCK_UNITS;
            let block_start = block * BLOCK_UNITS;
            let block_end = (block_start + BLOCK_UNITS).min(end);
            let mut rng = self.block_rng(tag, block);
            for _ in 0..(unit - block_start) as usize * unit_size {
                let _: f64 = StandardNormal.sample(&mut rng);
            }
            for _ in 0..(block_end - unit) as usize * unit_size {
                out.push(StandardNormal.sample(&mut rng));
            }
            unit = block_end;
        }
    }

    /// Sequential generator for auxiliary draws whose count is data dependent.
    pub fn sequential(&self, tag: u64) -> ChaCha8Rng {
        self.block_rng(tag, (1 << 40) - 1)
    }
}
