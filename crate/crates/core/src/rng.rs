//! Seeded, block-structured sampling.
//!
//! Every sample stream is addressed by `(seed, tag, level, block)`; each block of
//! [`BLOCK`] draws gets its own ChaCha8 stream keyed by a SplitMix64 hash of that
//! address. Serial and blocked-parallel consumers therefore see identical draws.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::point::{Bbox, Point};

/// Draws per independently seeded block.
pub const BLOCK: usize = 4096;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a stream address into a 64-bit sub-seed.
pub fn sub_seed(seed: u64, tag: u64, level: u64, block: u64) -> u64 {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ tag);
    h = splitmix64(h ^ level);
    splitmix64(h ^ block)
}

/// FNV-1a over a label, used to name independent streams.
pub fn tag(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn point_in_box(&mut self, b: &Bbox) -> Point {
        let mut p = Point::zeros(b.dim());
        for i in 0..b.dim() {
            p.as_mut_slice()[i] = self.uniform_in(b.lo[i], b.hi[i]);
        }
        p
    }

    /// Uniform in the open Euclidean ball `B_r` by rejection from the cube.
    pub fn point_in_ball(&mut self, dim: usize, r: f64) -> Point {
        let cube = Bbox::centered(dim, r);
        loop {
            let p = self.point_in_box(&cube);
            if p.norm() < r {
                return p;
            }
        }
    }
}

/// Visit `n` draws from the stream `(seed, tag, level)`, block by block.
pub fn for_each_draw<F, V>(n: usize, seed: u64, tag: u64, level: u64, mut draw: F, mut visit: V)
where
    F: FnMut(&mut Sampler) -> Point,
    V: FnMut(Point),
{
    let blocks = n.div_ceil(BLOCK);
    for b in 0..blocks {
        let mut s = Sampler::new(sub_seed(seed, tag, level, b as u64));
        let count = BLOCK.min(n - b * BLOCK);
        for _ in 0..count {
            visit(draw(&mut s));
        }
    }
}
