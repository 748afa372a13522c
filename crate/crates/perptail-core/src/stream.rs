//! Deterministic random streams and the block-execution contract.
//!
//! Every estimator derives its randomness from `(seed, label, lane, block)`
//! through [`substream`], so results depend only on the configuration, never
//! on scheduling. The path space of an estimator is partitioned into
//! `workers` contiguous blocks; an [`Executor`] decides how block closures
//! actually run (the companion crate provides a threaded one), and merging is
//! done in block-index order.

use alloc::vec::Vec;
use rand_chacha::rand_core::SeedableRng;

/// The stream type used throughout: deterministic, cheap, seedable from 32 bytes.
pub type Stream = rand_chacha::ChaCha8Rng;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01B3);
    }
    h
}

/// Derive an independent stream for `(seed, label, lane, block)`.
///
/// Identical inputs always produce an identical stream state; distinct labels
/// or indices produce statistically independent streams.
pub fn substream(seed: u64, label: &str, lane: u64, block: u64) -> Stream {
    let mut state = seed
        ^ fnv1a(label.as_bytes()).rotate_left(1)
        ^ lane.wrapping_mul(0xA24B_AED4_963E_E407)
        ^ block.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    // one warmup scramble so nearby (seed, lane, block) tuples decorrelate
    let _ = splitmix64(&mut state);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    Stream::from_seed(key)
}

/// Split `n_paths` into `workers` contiguous blocks (first blocks get the
/// remainder). Zero-size blocks are kept so block indices stay stable.
pub fn split_paths(n_paths: u64, workers: u32) -> Vec<u64> {
    let w = workers.max(1) as u64;
    let base = n_paths / w;
    let rem = n_paths % w;
    (0..w).map(|i| base + u64::from(i < rem)).collect()
}

/// Runs independent block closures and returns results in block order.
///
/// Implementations must not change results relative to [`Serial`]: the
/// closure for block `i` must receive exactly `i`, and outputs must be
/// collected by index.
pub trait Executor: Sync {
    fn run_blocks<T: Send>(&self, n_blocks: u32, f: &(dyn Fn(u32) -> T + Sync)) -> Vec<T>;
}

/// Runs blocks one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn run_blocks<T: Send>(&self, n_blocks: u32, f: &(dyn Fn(u32) -> T + Sync)) -> Vec<T> {
        (0..n_blocks).map(f).collect()
    }
}

/// Merged mean/variance accumulator for block results.
#[derive(Debug, Clone, Copy, Default)]
pub struct MeanAcc {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl MeanAcc {
    #[inline]
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(mut self, other: MeanAcc) -> MeanAcc {
        self.n += other.n;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.sum / self.n as f64
        }
    }

    /// Standard error of the mean (sample variance over n).
    pub fn std_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let var = (self.sum_sq - self.sum * self.sum / n) / (n - 1.0);
        #[cfg(not(feature = "std"))]
        use crate::math::FloatExt;
        (var.max(0.0) / n).sqrt()
    }
}
