//! Deterministic pseudo-random test instances. Every generator is a pure
//! function of its seed and index, so instances are random-access (no state
//! to replay) and every reported counterexample is reproducible.

use num_bigint::BigInt;

use crate::numeric::{pow2, Rational};
use crate::sequences::{CauchyReal, Modulus, Sequence};

/// SplitMix64 output function: a well-distributed 64-bit hash of the input.
pub fn mix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A dyadic dither value in `[0, 1)` with denominator `2^32`, derived from
/// the seed and index.
fn dither(seed: u64, index: u64) -> Rational {
    let bits = mix64(seed ^ index.wrapping_mul(0xA076_1D64_78BD_642F)) >> 32;
    Rational::new(BigInt::from(bits), BigInt::from(1u64 << 32))
}

/// A strictly increasing unbounded sequence with irregular increments:
/// `a_j = base + slope * j + (slope / 4) * dither(j)`. Consecutive gaps lie
/// in `[3 * slope / 4, 5 * slope / 4]`, so the sequence rises without ever
/// stalling — the shape the compression operators are exercised on.
pub fn dithered_ramp(seed: u64) -> Sequence {
    let h = mix64(seed);
    let slope = Rational::new(BigInt::from(2 + (h % 7)), BigInt::from(4));
    let base = Rational::new(BigInt::from((h >> 8) % 11), BigInt::from(3)) - Rational::from(BigInt::from(1));
    let amp = &slope / Rational::from(BigInt::from(4));
    Sequence::from_fn(move |j| {
        &base + &slope * Rational::from(BigInt::from(j)) + &amp * dither(seed, j)
    })
}

/// A modulus-carrying real equal to `value`, approximated with signed
/// dyadic noise: `x_m = value + s_m * 2^-(m+1)` with `s_m` a seeded sign.
/// The identity modulus is valid — for `l, m >= n` the pair differs by at
/// most `2^-(l+1) + 2^-(m+1) <= 2^-n` — and tight enough that shaving one
/// level off it is falsified.
pub fn noisy_real(value: Rational, seed: u64) -> CauchyReal {
    let approx = Sequence::from_fn(move |m| {
        let noise = pow2(-(m as i64) - 1);
        if mix64(seed ^ m) % 2 == 0 {
            &value + noise
        } else {
            &value - noise
        }
    });
    CauchyReal::new(approx, Modulus::identity())
}
