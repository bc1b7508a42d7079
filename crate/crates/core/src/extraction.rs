//! Digit extraction and ball-based location. Values of the form
//! `sum of 4^-i over a finite set` (quaternary supports) are far enough
//! apart that a sufficiently close approximation pins the set down
//! exactly; this module reads digits off such approximations, embeds an
//! arbitrary modulus-carrying real as the quaternary value of its rational
//! left cut, and brackets a real using labeled balls it avoids.

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::error::Error;
use crate::numeric::{ball, nu_q, pow2, proj2, BallCode, Rational};
use crate::sequences::{strict_monotonize, CauchyReal, Modulus, Probe, Sequence};
use crate::Result;

/// A finite set of quaternary digit positions together with its value
/// `sum of 4^-p over the set`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuaternarySupport {
    pub elements: BTreeSet<u64>,
    pub value: Rational,
}

/// `4^-p` as an exact rational.
fn quart(p: u64) -> Rational {
    pow2(-2 * p as i64)
}

/// The value of a finite set of digit positions.
pub fn quaternary_value(elements: &BTreeSet<u64>) -> Rational {
    elements.iter().map(|&p| quart(p)).sum()
}

/// Recovers the unique support `B` within `{0..level}` whose value lies
/// strictly within `4^-level / 2` of `q`, if any.
///
/// Digits are read most-significant first: position `p` is included
/// exactly when the running remainder exceeds `4^-p - 4^-level / 2`,
/// which separates the include and exclude cases because the maximal
/// excluded tail below position `p` is under `4^-p / 3`. Supports within
/// the level are at least `3/4 * 4^-level` apart in value (neighbouring
/// values differ by one digit swap at worst), so the half-window decision
/// regions are disjoint and the answer is unique.
pub fn nearest_support(q: &Rational, level: u64) -> Option<QuaternarySupport> {
    let half_window = quart(level) / Rational::from_integer(2.into());
    let mut remainder = q.clone();
    let mut elements = BTreeSet::new();
    for p in 0..=level {
        if remainder > quart(p) - &half_window {
            remainder -= quart(p);
            elements.insert(p);
        }
    }
    if remainder.abs() < half_window {
        let value = quaternary_value(&elements);
        Some(QuaternarySupport { elements, value })
    } else {
        None
    }
}

/// The stage probe of support proximity: `r(n)` is the least index past
/// `r(n-1)` whose value lies within the level-`n` decoding window of some
/// support in `{0..n}`. Each search scans at most `search_horizon` indices
/// past its starting point before reporting failure.
pub fn support_probe(a: &Sequence, search_horizon: u64) -> Probe {
    let a = a.clone();
    Probe::from_step(Some("support-proximity"), move |n, prev| {
        let start = prev.map_or(0, |p| p + 1);
        for k in start..start.saturating_add(search_horizon + 1) {
            if nearest_support(&a.eval(k)?, n).is_some() {
                return Ok(k);
            }
        }
        Err(Error::HorizonExceeded {
            horizon: search_horizon,
            context: format!("no level-{n} support proximity found from index {start}"),
        })
    })
}

/// Reads digit `bit` of the limit of `a`, a sequence promised to converge
/// with Cauchy modulus `g` to a value `sum of 4^-i over A` for some set
/// `A`. The supplied modulus is first falsified against a finite sample
/// window (a detected violation aborts the decode); it is then made
/// strictly monotone and the digit is read from the approximation at stage
/// `g'(2 * bit + 3)`, whose error `2^-(2*bit+3) = 4^-bit / 8` plus the
/// truncated tail `4^-bit / 3` stays inside the half-window `4^-bit / 2`.
pub fn decode_quaternary(
    a: &Sequence,
    g: &Modulus,
    bit: u64,
    validation_horizon: u64,
) -> Result<bool> {
    if let Some(v) = crate::harness::check_cauchy_modulus(a, g, validation_horizon)?.first() {
        return Err(Error::ModulusFalsified { m: v.m, n: v.n });
    }
    let strict = strict_monotonize(g);
    let m = strict.eval(2 * bit + 3)?;
    let sample = a.eval(m)?;
    match nearest_support(&sample, bit) {
        Some(support) => Ok(support.elements.contains(&bit)),
        None => Err(Error::SupportNotFound {
            index: m,
            level: bit,
        }),
    }
}

/// Embeds a modulus-carrying real as the quaternary value of its left
/// cut: position `n` is included exactly when the `n`-th rational (under
/// the standard enumeration) lies strictly below `x`. Positions are
/// decided up to the least `T` with `4^-T / 3 <= 2^-(precision+1)`, so
/// the returned value is within `2^-(precision+1)` of the full cut's
/// value. A rational `x` equal to an enumerated rational at or below `T`
/// is reported as an undecidable tie carrying that rational's code.
pub fn embed_left_cut(x: &CauchyReal, precision: u64, budget: u64) -> Result<QuaternarySupport> {
    let bound = pow2(-(precision as i64) - 1) * Rational::from_integer(3.into());
    let mut top = 0;
    while quart(top) > bound {
        top += 1;
    }
    let mut elements = BTreeSet::new();
    for n in 0..=top {
        let q = nu_q(n);
        // a settled "not below" is exactly "strictly above": ties error out
        if !x.lt_rational(&q, budget, Error::TieUndecidable { code: n })? {
            elements.insert(n);
        }
    }
    let value = quaternary_value(&elements);
    Ok(QuaternarySupport { elements, value })
}

/// Which side of a labeled ball the real lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// The ball sits below the real, so `center + radius` bounds the real
    /// from below.
    Below,
    /// The ball sits above the real, so `center - radius` bounds the real
    /// from above.
    Above,
}

/// A ball from an avoided-ball enumeration, labeled with the side of the
/// real it sits on and the witness stage that decided it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledBall {
    pub code: BallCode,
    pub side: Side,
    pub witness_index: u64,
}

/// Labels the `n`-th enumerated ball with the side of `x` it lies on.
///
/// The witness is the approximation of `x` at stage
/// `max(n + 1, g(radius_exponent))`, which is within one radius of `x`;
/// when `x` keeps the promised distance of more than two radii from the
/// center, the witness lands strictly outside the closed ball and its
/// side of the center is the real's side. A witness inside the closed
/// ball falsifies the promise and is reported as such.
pub fn label_ball<F>(balls: F, x: &CauchyReal, n: u64) -> Result<LabeledBall>
where
    F: Fn(u64) -> Result<BallCode>,
{
    let code = balls(n)?;
    let b = ball(code);
    let radius_exp = proj2(code);
    let witness_index = (n + 1).max(x.modulus().eval(radius_exp)?);
    let witness = x.approximant().eval(witness_index)?;
    let offset = &witness - &b.center;
    if offset.abs() <= b.radius {
        return Err(Error::WitnessInsideBall {
            witness_index,
            code,
        });
    }
    let side = if offset > Rational::zero() {
        Side::Below
    } else {
        Side::Above
    };
    Ok(LabeledBall {
        code,
        side,
        witness_index,
    })
}

/// Brackets `x` between labeled avoided balls until the bracket width is
/// at most `2^-precision`, then returns the bracket midpoint. Balls below
/// the real raise the lower bound to `center + radius`; balls above lower
/// the upper bound to `center - radius` (sound under the same
/// more-than-two-radii promise that labeling relies on). Fails if the
/// first `ball_budget` balls do not produce a narrow enough bracket.
pub fn locate<F>(balls: F, x: &CauchyReal, precision: u64, ball_budget: u64) -> Result<Rational>
where
    F: Fn(u64) -> Result<BallCode>,
{
    let target = pow2(-(precision as i64));
    let mut lower: Option<Rational> = None;
    let mut upper: Option<Rational> = None;
    for n in 0..ball_budget {
        let labeled = label_ball(&balls, x, n)?;
        let b = ball(labeled.code);
        match labeled.side {
            Side::Below => {
                let candidate = &b.center + &b.radius;
                if lower.as_ref().is_none_or(|l| *l < candidate) {
                    lower = Some(candidate);
                }
            }
            Side::Above => {
                let candidate = &b.center - &b.radius;
                if upper.as_ref().is_none_or(|u| *u > candidate) {
                    upper = Some(candidate);
                }
            }
        }
        if let (Some(l), Some(u)) = (&lower, &upper) {
            if u - l <= target {
                return Ok((l + u) / Rational::from_integer(2.into()));
            }
        }
    }
    Err(Error::HorizonExceeded {
        horizon: ball_budget,
        context: "ball enumeration exhausted before the bracket narrowed".to_string(),
    })
}
