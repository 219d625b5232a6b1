//! Seeded family of `d` hash functions onto `m` slots.

use crate::{Error, Result};

/// A family `h_1, ..., h_d` of hash functions mapping element ids to slots.
///
/// Evaluation is a pure, counter-based mix of `(seed, element, k)` so the
/// family behaves identically on every platform and every run with the same
/// seed. The 64-bit mix output is reduced to `0..m` by rejection sampling,
/// which avoids modulo bias for every slot count.
///
/// The `d` functions are independent draws in the usual empirical sense; two
/// of them may well map the same element to the same slot. Callers that need
/// the candidate *set* must dedup themselves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashFamily {
    m: usize,
    d: u32,
    seed: u64,
    /// Largest multiple of `m` representable in 64 bits; mix outputs at or
    /// above this are rejected and redrawn.
    zone: u64,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer. Bijective on u64, good avalanche.
#[inline]
pub(crate) fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl HashFamily {
    /// Creates a family of `d >= 2` functions onto `m >= 1` slots.
    pub fn new(m: usize, d: u32, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::EmptyTable);
        }
        if d < 2 {
            return Err(Error::ArityTooSmall(d));
        }
        let m128 = m as u128;
        let zone = ((1u128 << 64) / m128) * m128;
        // zone == 2^64 means every draw is accepted; store 0 and rely on the
        // wrapping comparison below.
        let zone = if zone == 1 << 64 { 0 } else { zone as u64 };
        Ok(HashFamily { m, d, seed, zone })
    }

    pub fn slot_count(&self) -> usize {
        self.m
    }

    pub fn arity(&self) -> u32 {
        self.d
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Evaluates `h_k(x)`. `k` is 1-based; panics if `k` is out of range.
    pub fn eval(&self, x: u64, k: u32) -> usize {
        assert!(
            k >= 1 && k <= self.d,
            "hash index {k} out of range 1..={}",
            self.d
        );
        let key = mix64(self.seed ^ mix64(x ^ GOLDEN.wrapping_mul(k as u64)));
        let mut attempt = 0u64;
        loop {
            let draw = mix64(key.wrapping_add(attempt));
            // self.zone == 0 encodes "accept everything" (m divides 2^64).
            if self.zone == 0 || draw < self.zone {
                return (draw % self.m as u64) as usize;
            }
            attempt += 1;
        }
    }

    /// All `d` candidate slots of `x`, in hash-index order. May repeat.
    pub fn slots(&self, x: u64) -> impl Iterator<Item = usize> + '_ {
        (1..=self.d).map(move |k| self.eval(x, k))
    }
}
