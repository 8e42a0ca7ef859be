//! Reproducible random streams.
//!
//! Every draw in the crate comes from a ChaCha8 generator keyed by a
//! `(seed, stream)` pair. Parallel work is split into fixed-size chunks, each
//! reading a disjoint window of the same keystream, so results do not depend
//! on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The generator handed to samplers.
pub type StreamRng = ChaCha8Rng;

/// Keystream words reserved for each substream.
const SUBSTREAM_SHIFT: u32 = 44;

/// Draws per parallel chunk in [`draw_batch`].
pub const CHUNK: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// A fresh generator at the start of this stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// A generator positioned at the start of window `index` of this stream.
    /// Windows never overlap each other or the window used by [`Self::rng`].
    pub fn substream(&self, index: u64) -> StreamRng {
        let mut rng = self.rng();
        rng.set_word_pos(((index as u128) + 1) << SUBSTREAM_SHIFT);
        rng
    }

    /// The same seed with another stream id.
    pub fn with_stream(&self, stream: u64) -> Self {
        Self { seed: self.seed, stream }
    }
}

/// Produces `n` values, calling `draw` once per value. Work is split into
/// chunks of [`CHUNK`] draws, chunk `j` using `stream.substream(j)`, and the
/// results are returned in chunk order.
pub fn draw_batch<T, F>(stream: &RngStream, n: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    draw_chunks(stream, 0, n, draw)
}

/// As [`draw_batch`], starting at chunk `first_chunk`. Consecutive calls
/// whose sizes are multiples of [`CHUNK`] reproduce one large batch, which
/// lets callers stream big samples in bounded memory.
pub fn draw_chunks<T, F>(stream: &RngStream, first_chunk: u64, n: usize, draw: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let per_chunk: Vec<Vec<T>> = (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = stream.substream(first_chunk + j as u64);
            let len = CHUNK.min(n - j * CHUNK);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    per_chunk.into_iter().flatten().collect()
}
