use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seedable, splittable random stream.
///
/// A stream is addressed by `(key, stream)`; [`RngStream::substream`] derives
/// a child whose output depends only on the parent's address and the index,
/// never on how much of the parent has been consumed.
#[derive(Debug, Clone)]
pub struct RngStream {
    key: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::at(seed, 0)
    }

    fn at(key: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(key);
        inner.set_stream(stream);
        Self { key, stream, inner }
    }

    pub fn substream(&self, index: u64) -> Self {
        let key = splitmix64(self.key ^ splitmix64(self.stream));
        Self::at(key, index)
    }

    pub fn seed(&self) -> u64 {
        self.key
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        // 53 random mantissa bits.
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Draws an index from a probability vector with a single uniform variate.
///
/// Entries are assumed non-negative; a tiny shortfall from rounding falls
/// back to the last index with positive weight.
pub fn sample_index(probabilities: &[f64], rng: &mut RngStream) -> usize {
    let total: f64 = probabilities.iter().sum();
    let target = rng.uniform() * total;
    let mut acc = 0.0;
    for (i, &p) in probabilities.iter().enumerate() {
        acc += p;
        if target < acc {
            return i;
        }
    }
    probabilities.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}
