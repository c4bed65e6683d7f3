use std::f64::consts::LN_2;

/// Bloom filter over vertex codes. Probe `i` is the `i`-th output of a
/// splitmix64 stream seeded with the key, reduced modulo the bit count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BloomFilter {
    words: Vec<u64>,
    bit_count: u64,
    hash_count: u32,
}

#[inline]
fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

impl BloomFilter {
    /// Sized for `distinct` keys at false-positive rate `p`:
    /// `m = ⌈-n ln p / (ln 2)²⌉` rounded up to whole 64-bit words,
    /// `k = round(m / n · ln 2)` on the unrounded `m`.
    pub fn with_rate(distinct: usize, p: f64) -> Self {
        let n = distinct.max(1) as f64;
        let sized = ((-n * p.ln()) / (LN_2 * LN_2)).ceil().max(1.0) as u64;
        let hash_count = ((sized as f64 / n) * LN_2).round().max(1.0) as u32;
        // The array is stored in whole words anyway; probing all of them
        // keeps tiny filters near their target rate.
        let words = sized.div_ceil(64) as usize;
        Self {
            words: vec![0; words],
            bit_count: words as u64 * 64,
            hash_count,
        }
    }

    pub fn from_keys<I: IntoIterator<Item = u32>>(keys: I, distinct: usize, p: f64) -> Self {
        let mut filter = Self::with_rate(distinct, p);
        for key in keys {
            filter.insert(key);
        }
        filter
    }

    #[inline]
    fn probes(&self, key: u32) -> impl Iterator<Item = u64> {
        // Double hashing degenerates when the step shares a factor with a
        // small bit count, so every probe gets its own mix.
        let seed = splitmix64(u64::from(key));
        let m = self.bit_count;
        (0..u64::from(self.hash_count)).map(move |i| splitmix64(seed.wrapping_add(i.wrapping_mul(0x9e37_79b9_7f4a_7c15))) % m)
    }

    pub fn insert(&mut self, key: u32) {
        let bits: Vec<u64> = self.probes(key).collect();
        for b in bits {
            self.words[(b / 64) as usize] |= 1 << (b % 64);
        }
    }

    #[inline]
    pub fn contains(&self, key: u32) -> bool {
        self.probes(key).all(|b| self.words[(b / 64) as usize] >> (b % 64) & 1 == 1)
    }

    pub fn bit_count(&self) -> u64 {
        self.bit_count
    }

    pub fn hash_count(&self) -> u32 {
        self.hash_count
    }

    /// Storage of the bit array in whole 64-bit words.
    pub fn byte_size(&self) -> usize {
        self.words.len() * 8
    }
}
