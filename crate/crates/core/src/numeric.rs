//! Naturals-to-rationals bookkeeping: the diagonal pairing of naturals, the
//! canonical surjection onto the rationals, rational ball codes, and dyadic
//! helpers.
//!
//! Everything is exact. The module never touches floating point; inverting
//! the pairing function uses an integer square root.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// Arbitrary-precision rational, always reduced, denominator always
/// positive. `num`'s big ratio already enforces both invariants at every
/// construction, and its text form is `p/q` with `/q` omitted when the
/// denominator is 1, which is the format used by all interfaces here.
pub type Rational = num_rational::BigRational;

/// A natural number encoding a rational ball; see [`ball`].
pub type BallCode = u64;

/// A rational ball: the closed interval `[center - radius, center + radius]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: Rational,
    pub radius: Rational,
}

/// Checked rational construction; rejects a zero denominator instead of
/// panicking.
pub fn rational(p: i64, q: i64) -> Result<Rational> {
    if q == 0 {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(BigInt::from(p), BigInt::from(q)))
}

/// Parses the `p/q` text form (`/q` optional). Signs normalize onto the
/// numerator; the result is reduced.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::InvalidRational(s.to_string());
    let mut parts = s.split('/');
    let numer: BigInt = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let denom: BigInt = match parts.next() {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if parts.next().is_some() {
        return Err(bad());
    }
    if denom.is_zero() {
        return Err(Error::ZeroDenominator);
    }
    Ok(Rational::new(numer, denom))
}

/// `2^k` as an exact rational, for any integer `k`.
pub fn pow2(k: i64) -> Rational {
    if k >= 0 {
        Rational::from_integer(BigInt::one() << k as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-k) as usize)
    }
}

/// Diagonal pairing `<i, j> = (i + j)(i + j + 1)/2 + i`, a bijection from
/// pairs of naturals onto the naturals.
pub fn pair(i: u64, j: u64) -> u64 {
    let w = i as u128 + j as u128;
    let code = w * (w + 1) / 2 + i as u128;
    u64::try_from(code).expect("pair code exceeds u64")
}

/// Inverse of [`pair`]. Uses an exact integer square root.
pub fn unpair(n: u64) -> (u64, u64) {
    let w = (isqrt_u128(8 * n as u128 + 1) - 1) / 2;
    let t = (w * (w + 1) / 2) as u64;
    let i = n - t;
    let j = w as u64 - i;
    (i, j)
}

/// First projection of [`pair`].
pub fn proj1(n: u64) -> u64 {
    unpair(n).0
}

/// Second projection of [`pair`].
pub fn proj2(n: u64) -> u64 {
    unpair(n).1
}

/// Floor of the square root, exact on all of `u128`.
fn isqrt_u128(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    // Newton iteration on integers converges from any over-estimate.
    let mut x = 1u128 << (v.ilog2() / 2 + 1);
    loop {
        let next = (x + v / x) / 2;
        if next >= x {
            return x;
        }
        x = next;
    }
}

/// The canonical surjection from the naturals onto the rationals. With
/// `(a, b) = unpair(n)`: even `a` yields `-(a/2) / (b+1)`, odd `a` yields
/// `((a+1)/2) / (b+1)`. Not injective; every rational has infinitely many
/// codes.
pub fn nu_q(n: u64) -> Rational {
    let (a, b) = unpair(n);
    let denom = BigInt::from(b + 1);
    if a % 2 == 0 {
        Rational::new(-BigInt::from(a / 2), denom)
    } else {
        Rational::new(BigInt::from((a + 1) / 2), denom)
    }
}

/// The canonical code of a rational: the unique `n` built from the reduced
/// form so that `nu_q(n) == q` holds exactly.
pub fn nu_q_code(q: &Rational) -> u64 {
    let p = q.numer();
    let d = u64::try_from(q.denom()).expect("denominator exceeds u64");
    let a = if p.is_positive() {
        2 * u64::try_from(p).expect("numerator exceeds u64") - 1
    } else {
        2 * u64::try_from(&-p).expect("numerator exceeds u64")
    };
    pair(a, d - 1)
}

/// Decodes a ball code: center `nu_q(proj1(n))`, radius `2^-proj2(n)`.
pub fn ball(code: BallCode) -> Ball {
    let (c, r) = unpair(code);
    Ball {
        center: nu_q(c),
        radius: pow2(-(r as i64)),
    }
}

/// Canonical ball code with the given center and radius `2^-radius_exp`.
pub fn ball_code(center: &Rational, radius_exp: u64) -> BallCode {
    pair(nu_q_code(center), radius_exp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn rat(p: i64, q: i64) -> Rational {
        rational(p, q).unwrap()
    }

    #[test]
    fn pairing_enumerates_the_diagonals() {
        let first: Vec<(u64, u64)> = (0..6).map(unpair).collect();
        assert_eq!(first, vec![(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]);
        assert_eq!(pair(2, 1), 8);
        assert_eq!(unpair(5), (2, 0));
    }

    #[test]
    fn nu_q_hits_the_announced_values() {
        assert_eq!(nu_q(0), rat(0, 1));
        assert_eq!(nu_q(2), rat(1, 1));
        assert_eq!(nu_q(4), rat(1, 2));
    }

    #[test]
    fn nu_q_covers_every_small_rational() {
        // All reduced p/q with |p| <= 50, 1 <= q <= 50 have a canonical code
        // at most pair(100, 49) = 11275; a forward sweep must find them all.
        let seen: BTreeSet<Rational> = (0..=11275).map(nu_q).collect();
        for p in -50i64..=50 {
            for q in 1i64..=50 {
                assert!(seen.contains(&rat(p, q)), "missing {p}/{q}");
            }
        }
    }

    #[test]
    fn ball_decodes_center_and_radius() {
        let b = ball(0);
        assert_eq!(b.center, rat(0, 1));
        assert_eq!(b.radius, rat(1, 1));
        let b = ball(pair(2, 1));
        assert_eq!(b.center, rat(1, 1));
        assert_eq!(b.radius, rat(1, 2));
    }

    #[test]
    fn ball_code_inverts_ball() {
        let code = ball_code(&rat(-3, 4), 5);
        let b = ball(code);
        assert_eq!(b.center, rat(-3, 4));
        assert_eq!(b.radius, pow2(-5));
    }

    #[test]
    fn parse_accepts_the_text_format_and_rejects_junk() {
        assert_eq!(parse_rational("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert_eq!(parse_rational("7").unwrap(), rat(7, 1));
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert!(matches!(parse_rational("1/0"), Err(Error::ZeroDenominator)));
        assert!(matches!(parse_rational("x"), Err(Error::InvalidRational(_))));
        assert!(matches!(parse_rational("1/2/3"), Err(Error::InvalidRational(_))));
        assert!(matches!(rational(1, 0), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn display_omits_unit_denominators() {
        assert_eq!(rat(3, 4).to_string(), "3/4");
        assert_eq!(rat(-6, 8).to_string(), "-3/4");
        assert_eq!(rat(14, 2).to_string(), "7");
        assert_eq!(rat(0, 5).to_string(), "0");
    }

    #[test]
    fn pow2_is_exact_in_both_directions() {
        assert_eq!(pow2(0), rat(1, 1));
        assert_eq!(pow2(4), rat(16, 1));
        assert_eq!(pow2(-3), rat(1, 8));
        for k in -80i64..=80 {
            assert_eq!(pow2(k) * pow2(-k), rat(1, 1));
        }
    }

    proptest! {
        #[test]
        fn pair_round_trips(i in 0u64..1_000_000, j in 0u64..1_000_000) {
            prop_assert_eq!(unpair(pair(i, j)), (i, j));
        }

        #[test]
        fn unpair_round_trips(n in 0u64..10_000_000) {
            let (i, j) = unpair(n);
            prop_assert_eq!(pair(i, j), n);
        }

        #[test]
        fn isqrt_is_the_floor_root(v in 0u128..u64::MAX as u128) {
            let r = isqrt_u128(v);
            prop_assert!(r * r <= v);
            prop_assert!((r + 1) * (r + 1) > v);
        }

        #[test]
        fn nu_q_code_is_a_right_inverse(p in -10_000i64..10_000, q in 1i64..10_000) {
            let r = rational(p, q).unwrap();
            prop_assert_eq!(nu_q(nu_q_code(&r)), r);
        }

        #[test]
        fn arithmetic_is_exact(
            ap in -1000i64..1000, aq in 1i64..1000,
            bp in -1000i64..1000, bq in 1i64..1000,
        ) {
            let a = rational(ap, aq).unwrap();
            let b = rational(bp, bq).unwrap();
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if bp != 0 {
                prop_assert_eq!(&(&a * &b) / &b, a);
            }
        }
    }
}
