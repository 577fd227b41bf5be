//! Deterministic sampling helpers shared by the law checkers.
//!
//! Every sampled check in the crate draws from a `ChaCha8Rng` seeded from a
//! single suite seed, so reruns with the same seed replay bit-for-bit.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalars::Rational;

/// Default seed used when the caller (or the environment) does not pick one.
pub const DEFAULT_SEED: u64 = 0x5EED_CAB1;

/// Environment variable consulted by the CLI for the suite seed.
pub const SEED_ENV_VAR: &str = "CONVEXLAB_SEED";

pub fn rng_for(seed: u64, suite: &str) -> ChaCha8Rng {
    // Mix the suite name in so each suite has its own stream but is still a
    // pure function of the seed.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in suite.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

pub fn seed_from_env() -> u64 {
    std::env::var(SEED_ENV_VAR)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}

/// A uniform-ish draw from `0..n`. The tiny modulo bias is irrelevant for
/// law-check sampling.
pub fn below(rng: &mut dyn RngCore, n: u64) -> u64 {
    assert!(n > 0);
    rng.next_u64() % n
}

pub fn pick<'a, T>(rng: &mut dyn RngCore, items: &'a [T]) -> &'a T {
    &items[below(rng, items.len() as u64) as usize]
}

/// A nonnegative rational `p/q` with `p < max_num` and `1 <= q <= max_den`.
pub fn nonneg_rational(rng: &mut dyn RngCore, max_num: u64, max_den: u64) -> Rational {
    let q = 1 + below(rng, max_den);
    let p = below(rng, max_num * q);
    Rational::new(p as i64, q as i64)
}

/// A rational in the closed unit interval with denominator at most `max_den`.
pub fn unit_rational(rng: &mut dyn RngCore, max_den: u64) -> Rational {
    let q = 1 + below(rng, max_den);
    let p = below(rng, q + 1);
    Rational::new(p as i64, q as i64)
}

/// A list of positive rationals of the given length summing to one: a random
/// convex-weight vector with bounded denominators.
pub fn convex_weights(rng: &mut dyn RngCore, len: usize, max_den: u64) -> Vec<Rational> {
    assert!(len > 0);
    loop {
        let q = 1 + below(rng, max_den.saturating_sub(1)).max(len as u64 - 1);
        // Split the integer q into len positive parts.
        if (q as usize) < len {
            continue;
        }
        let mut parts = vec![1u64; len];
        let mut rest = q - len as u64;
        for p in parts.iter_mut().take(len - 1) {
            let take = below(rng, rest + 1);
            *p += take;
            rest -= take;
        }
        parts[len - 1] += rest;
        return parts.into_iter().map(|p| Rational::new(p as i64, q as i64)).collect();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convex_weights_sum_to_one() {
        let mut rng = rng_for(1, "weights");
        for len in 1..6 {
            for _ in 0..50 {
                let w = convex_weights(&mut rng, len, 16);
                assert_eq!(w.len(), len);
                assert!(w.iter().all(|r| !r.is_zero() && !r.is_negative()));
                let total: Rational = w.into_iter().sum();
                assert!(total.is_one());
            }
        }
    }

    #[test]
    fn same_seed_same_stream() {
        let mut a = rng_for(7, "suite");
        let mut b = rng_for(7, "suite");
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }
}
