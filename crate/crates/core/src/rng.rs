//! Deterministic counter-based random streams.
//!
//! Every random decision is keyed by `(seed, generation, attempt, cell)` and
//! a within-stream counter, so sampling is order-independent: the same key
//! always yields the same stream no matter how work is scheduled across
//! threads. Not cryptographic.

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use crate::rational::Rational;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A keyed stream of u64 words addressed by an incrementing counter.
#[derive(Clone, Debug)]
pub struct KeyedStream {
    base: u64,
    counter: u64,
}

impl KeyedStream {
    /// Derive a stream from a seed and key words (generation, attempt, cell
    /// index, ...). Equal keys give equal streams.
    pub fn new(seed: u64, words: &[u64]) -> Self {
        let mut h = splitmix64(seed ^ GOLDEN);
        for (i, w) in words.iter().enumerate() {
            h = splitmix64(h ^ w.wrapping_add((i as u64 + 1).wrapping_mul(GOLDEN)));
        }
        KeyedStream { base: h, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let out = splitmix64(self.base ^ self.counter.wrapping_mul(GOLDEN));
        self.counter += 1;
        out
    }

    /// Uniform integer in `[0, bound)` by rejection; exact for any bound.
    pub fn below_u64(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        if bound == 1 {
            return 0;
        }
        // accept only the largest multiple of bound to avoid modulo bias
        let zone = u64::MAX - (u64::MAX % bound + 1) % bound;
        loop {
            let x = self.next_u64();
            if x <= zone {
                return x % bound;
            }
        }
    }

    /// Uniform integer in `[0, bound)` for arbitrary-precision bounds.
    pub fn below_big(&mut self, bound: &BigUint) -> BigUint {
        if let Some(b) = bound.to_u64() {
            return BigUint::from(self.below_u64(b));
        }
        let bits = bound.bits();
        let words = bits.div_ceil(64) as usize;
        let top_mask: u64 = if bits % 64 == 0 {
            u64::MAX
        } else {
            (1u64 << (bits % 64)) - 1
        };
        loop {
            let mut raw: Vec<u64> = (0..words).map(|_| self.next_u64()).collect();
            if let Some(last) = raw.last_mut() {
                *last &= top_mask;
            }
            let cand = BigUint::from_slice(
                &raw.iter()
                    .flat_map(|w| [(*w & 0xFFFF_FFFF) as u32, (*w >> 32) as u32])
                    .collect::<Vec<_>>(),
            );
            if &cand < bound {
                return cand;
            }
        }
    }

    /// Exact Bernoulli with rational probability `q` clamped to `[0, 1]`:
    /// draws uniform below the denominator and compares with the numerator.
    pub fn bernoulli(&mut self, q: &Rational) -> bool {
        if !q.is_positive() {
            return false;
        }
        if q >= &Rational::one() {
            return true;
        }
        let num = q.numer().to_biguint().expect("positive");
        let den = q.denom().to_biguint().expect("positive");
        self.below_big(&den) < num
    }

    /// Uniform dyadic rational in `[0, 1)` with 63-bit resolution.
    pub fn dyadic_unit(&mut self) -> Rational {
        let k = self.next_u64() >> 1;
        Rational::new(k as i64, 1) / Rational::new(1i64 << 62, 1) / Rational::new(2, 1)
    }
}
