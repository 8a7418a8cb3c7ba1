//! Counter-derived random streams.
//!
//! Every simulated block draws from its own ChaCha stream keyed by the master
//! seed and selected by `(grid index, block index)`, so results never depend on
//! how blocks are scheduled across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Block indices occupy the low 40 bits of the stream id.
const BLOCK_BITS: u32 = 40;

pub fn block_rng(master_seed: u64, grid_index: usize, block_index: u64) -> ChaCha8Rng {
    debug_assert!(block_index < 1 << BLOCK_BITS);
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(((grid_index as u64) << BLOCK_BITS) | block_index);
    rng
}
