//! Sobol points in base 2 with Joe–Kuo direction numbers, optionally
//! randomised by a digital shift (XOR with a per-dimension random word).
//!
//! Points are addressed by index, so any block of the sequence can be
//! generated independently and bit-identically; within a block successive
//! points follow the Gray-code recurrence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

/// `(degree s, coefficient a, m_1..m_s)` for dimensions 2.. (new-joe-kuo-6.21201).
const JOE_KUO: [(u32, u32, &[u32]); 23] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
    (5, 11, &[1, 1, 5, 1, 1]),
    (5, 13, &[1, 1, 1, 3, 11]),
    (5, 14, &[1, 3, 5, 5, 31]),
    (6, 1, &[1, 3, 3, 9, 7, 49]),
    (6, 13, &[1, 1, 1, 15, 21, 21]),
    (6, 16, &[1, 3, 1, 13, 27, 49]),
    (6, 19, &[1, 1, 1, 15, 7, 5]),
    (6, 22, &[1, 3, 1, 15, 13, 25]),
    (6, 25, &[1, 1, 5, 5, 19, 61]),
    (7, 1, &[1, 3, 7, 11, 23, 15, 103]),
    (7, 4, &[1, 3, 7, 13, 13, 15, 69]),
    (7, 7, &[1, 1, 3, 13, 7, 35, 63]),
    (7, 8, &[1, 3, 5, 9, 1, 25, 53]),
    (7, 14, &[1, 3, 1, 13, 9, 35, 107]),
];

/// Highest supported dimension.
pub const MAX_DIM: usize = JOE_KUO.len() + 1;
const BITS: usize = 32;

fn directions(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = 1 << (31 - k);
        }
        return v;
    }
    let (s, a, m) = JOE_KUO[dim - 1];
    let s = s as usize;
    for k in 0..BITS {
        v[k] = if k < s {
            m[k] << (31 - k)
        } else {
            let mut x = v[k - s] ^ (v[k - s] >> s);
            for i in 1..s {
                if (a >> (s - 1 - i)) & 1 == 1 {
                    x ^= v[k - i];
                }
            }
            x
        };
    }
    v
}

/// A `dim`-dimensional Sobol generator with a cursor.
#[derive(Debug, Clone)]
pub struct LowDiscrepancySequence {
    dim: usize,
    dirs: Vec<[u32; BITS]>,
    shift: Vec<u32>,
    index: u64,
    seed: Option<u64>,
}

impl LowDiscrepancySequence {
    /// Unscrambled sequence; the first point is the origin.
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::DimensionOverflow { requested: dim, max: MAX_DIM });
        }
        Ok(LowDiscrepancySequence { dim, dirs: (0..dim).map(directions).collect(), shift: vec![0; dim], index: 0, seed: None })
    }

    /// Sequence with a random digital shift drawn from `seed`.
    pub fn scrambled(dim: usize, seed: u64) -> Result<Self> {
        let mut seq = Self::new(dim)?;
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        seq.shift = (0..dim).map(|_| rng.random()).collect();
        seq.seed = Some(seed);
        Ok(seq)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Index of the next point `next_points` will return.
    pub fn position(&self) -> u64 {
        self.index
    }

    /// Move the cursor to point `index`.
    pub fn skip_to(&mut self, index: u64) {
        self.index = index;
    }

    /// Largest index plus one; the sequence has 2^32 points.
    pub const fn capacity() -> u64 {
        1 << BITS
    }

    /// Raw 32-bit digits of point `index` (including the shift).
    pub fn point_bits(&self, index: u64, out: &mut [u32]) {
        let gray = index ^ (index >> 1);
        for (d, o) in out.iter_mut().enumerate().take(self.dim) {
            let mut x = self.shift[d];
            let mut g = gray;
            let mut k = 0;
            while g != 0 {
                if g & 1 == 1 {
                    x ^= self.dirs[d][k];
                }
                g >>= 1;
                k += 1;
            }
            *o = x;
        }
    }

    /// Fill `out` (row-major, `count × dim`) with the digits of points
    /// `start..start + count`, using the Gray-code recurrence after the first.
    pub fn fill_bits(&self, start: u64, count: usize, out: &mut [u32]) {
        let d = self.dim;
        assert!(out.len() >= count * d, "output buffer too small");
        assert!(start + count as u64 <= Self::capacity(), "sequence exhausted");
        if count == 0 {
            return;
        }
        self.point_bits(start, &mut out[..d]);
        for i in 1..count {
            // point i of the block differs from point i-1 in the direction of
            // the lowest zero bit of its predecessor's index
            let prev = start + i as u64 - 1;
            let c = (!prev).trailing_zeros() as usize;
            let (before, after) = out.split_at_mut(i * d);
            for j in 0..d {
                after[j] = before[(i - 1) * d + j] ^ self.dirs[j][c];
            }
        }
    }

    /// The next `count` points in `[0, 1)^dim`, as `digits / 2^32`.
    pub fn next_points(&mut self, count: usize) -> Vec<Vec<f64>> {
        let mut bits = vec![0u32; count * self.dim];
        self.fill_bits(self.index, count, &mut bits);
        self.index += count as u64;
        bits.chunks(self.dim).map(|row| row.iter().map(|&b| b as f64 / 4_294_967_296.0).collect()).collect()
    }
}

/// Midpoint map of 32-bit digits into the open interval (0, 1).
#[inline]
pub fn to_unit_open(bits: u32) -> f64 {
    (bits as f64 + 0.5) * (1.0 / 4_294_967_296.0)
}
