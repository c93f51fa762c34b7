//! Named pseudorandom substreams derived from one master seed.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Keys = 1,
    Messages = 2,
    Kernels = 3,
    Coefficients = 4,
    Points = 5,
    Instances = 6,
}

/// Independent ChaCha20 stream for `stream` under `seed`.
pub fn substream(seed: u64, stream: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
