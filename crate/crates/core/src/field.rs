//! Field operations on modulus-carrying reals. Every operation returns
//! both a new approximant and an explicit modulus derived from the input
//! moduli, with any numeric bound the derivation needs (a magnitude bound
//! for products, a separation-from-zero witness for inverses) computed
//! from finitely many approximant values and exposed for inspection.
//! Polynomial sign brackets and root refinement sit on top, with every
//! undecidable sign comparison surfacing as an explicit error instead of
//! an unbounded search.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::numeric::{pow2, Rational};
use crate::sequences::{
    monotonize, scale_modulus, sum_modulus, CauchyReal, Modulus, Sequence,
};
use crate::Result;

/// Negation: the approximant flips sign, the modulus is unchanged.
pub fn creal_neg(x: &CauchyReal) -> CauchyReal {
    let a = x.approximant().clone();
    CauchyReal::new(
        Sequence::try_from_fn(move |m| Ok(-a.eval(m)?)),
        x.modulus().clone(),
    )
}

/// Addition: termwise sum with the combined modulus
/// `n -> max(gx(n+1), gy(n+1))`.
pub fn creal_add(x: &CauchyReal, y: &CauchyReal) -> CauchyReal {
    let (ax, ay) = (x.approximant().clone(), y.approximant().clone());
    CauchyReal::new(
        Sequence::try_from_fn(move |m| Ok(ax.eval(m)? + ay.eval(m)?)),
        sum_modulus(x.modulus(), y.modulus()),
    )
}

/// Subtraction, composed from negation and addition.
pub fn creal_sub(x: &CauchyReal, y: &CauchyReal) -> CauchyReal {
    creal_add(x, &creal_neg(y))
}

/// Scaling by an exact rational: termwise product with the modulus shifted
/// by the scalar's magnitude exponent.
pub fn creal_scale(lambda: &Rational, x: &CauchyReal) -> CauchyReal {
    let a = x.approximant().clone();
    let l = lambda.clone();
    CauchyReal::new(
        Sequence::try_from_fn(move |m| Ok(&l * a.eval(m)?)),
        scale_modulus(x.modulus(), lambda),
    )
}

/// The least `k` with `2^k > |x at stage g(1)| + 3/2`. Every approximant
/// value from stage `g(1)` on is within `1/2` of the stage-`g(1)` value,
/// hence strictly below `2^k - 1` in magnitude — the bound the product
/// modulus consumes.
pub fn mul_bound_exponent(x: &CauchyReal) -> Result<u64> {
    let anchor = x.refine(1)?.abs() + Rational::new(BigInt::from(3), BigInt::from(2));
    let mut k = 0;
    while pow2(k as i64) <= anchor {
        k += 1;
    }
    Ok(k)
}

/// Multiplication: termwise product. With `k` covering both factors'
/// magnitudes, stages at or past `max(gx(n+k+1), gy(n+k+1))` (on the
/// monotonized moduli) keep each factor's drift below `2^-(n+k+1)`, so the
/// product drifts below `2 * 2^k * 2^-(n+k+1) = 2^-n`.
pub fn creal_mul(x: &CauchyReal, y: &CauchyReal) -> Result<CauchyReal> {
    let k = mul_bound_exponent(x)?.max(mul_bound_exponent(y)?);
    let (gx, gy) = (monotonize(x.modulus()), monotonize(y.modulus()));
    let modulus = Modulus::from_step(
        gx.is_declared_monotone() && gy.is_declared_monotone(),
        move |n, _| Ok(gx.eval(n + k + 1)?.max(gy.eval(n + k + 1)?)),
    );
    let (ax, ay) = (x.approximant().clone(), y.approximant().clone());
    Ok(CauchyReal::new(
        Sequence::try_from_fn(move |m| Ok(ax.eval(m)? * ay.eval(m)?)),
        modulus,
    ))
}

/// The least `k` whose stage-`g(k)` approximant value exceeds `2 * 2^-k`
/// in magnitude, certifying `|x| > 2^-k`. Fails with
/// [`Error::ZeroWitnessNotFound`] after `budget` levels: a real that is
/// zero — or merely never proves itself away from zero within the budget —
/// cannot be inverted.
pub fn inversion_witness(x: &CauchyReal, budget: u64) -> Result<u64> {
    for k in 0..=budget {
        if x.refine(k)?.abs() > pow2(-(k as i64) + 1) {
            return Ok(k);
        }
    }
    Err(Error::ZeroWitnessNotFound { budget })
}

/// Inversion. With `K = witness + 1`, every stage at or past `g(K)` (on
/// the monotonized modulus) has magnitude above `2^-K`, so the clamped
/// termwise reciprocal `m -> 1 / x[max(m, g(K))]` is total and
/// `n -> g(n + 2K)` is a modulus for it:
/// `|1/u - 1/v| = |u - v| / |uv| < 2^(2K) * 2^-(n+2K) = 2^-n`.
pub fn creal_inv(x: &CauchyReal, budget: u64) -> Result<CauchyReal> {
    let witness = inversion_witness(x, budget)?;
    let cap = witness + 1;
    let g = monotonize(x.modulus());
    let floor_stage = g.eval(cap)?;
    let a = x.approximant().clone();
    let approximant = Sequence::try_from_fn(move |m| {
        let v = a.eval(m.max(floor_stage))?;
        Ok(Rational::one() / v)
    });
    let modulus = Modulus::from_step(g.is_declared_monotone(), move |n, _| g.eval(n + 2 * cap));
    Ok(CauchyReal::new(approximant, modulus))
}

/// Division, composed from inversion and multiplication.
pub fn creal_div(x: &CauchyReal, y: &CauchyReal, budget: u64) -> Result<CauchyReal> {
    creal_mul(x, &creal_inv(y, budget)?)
}

/// Rounds a positive rational up to the grid of multiples of
/// `2^-precision`.
fn ceil_dyadic(q: &Rational, precision: u64) -> Rational {
    let scaled = q * pow2(precision as i64);
    let up = scaled.numer().div_ceil(scaled.denom());
    Rational::new(up, BigInt::one()) * pow2(-(precision as i64))
}

/// The square root of a nonnegative rational as a modulus-carrying real.
///
/// Stage `m` runs Newton's iteration from above, rounding every iterate up
/// to the `2^-(m+4)` grid (which preserves "at or above the root" and keeps
/// denominators from compounding), and stops once `y^2 - c <= 2^-(m+1) * y`
/// — a certificate that `y` is within `2^-(m+1)` of the root. Stages `l, m
/// >= n + 1` then differ by at most `2^-(n+2) + 2^-(n+2) = 2^-(n+1)`, so
/// `n -> n + 1` is a modulus.
pub fn sqrt(c: &Rational) -> Result<CauchyReal> {
    if c < &Rational::zero() {
        return Err(Error::NegativeRadicand);
    }
    let c = c.clone();
    let approximant = Sequence::from_fn(move |m| {
        if c.is_zero() {
            return Rational::zero();
        }
        let grid = m + 4;
        let tolerance = pow2(-(m as i64) - 1);
        let mut y = if c >= Rational::one() {
            c.clone()
        } else {
            Rational::one()
        };
        while &y * &y - &c > &tolerance * &y {
            let next = (&y + &c / &y) / Rational::from_integer(2.into());
            y = ceil_dyadic(&next, grid);
        }
        y
    });
    Ok(CauchyReal::new(approximant, Modulus::shift(1)))
}

/// The side of zero a value lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn opposite(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Positive => Sign::Negative,
        }
    }
}

/// A polynomial with modulus-carrying real coefficients, lowest degree
/// first.
#[derive(Clone)]
pub struct Polynomial {
    coefficients: Vec<CauchyReal>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<CauchyReal>) -> Self {
        Polynomial { coefficients }
    }

    pub fn from_rationals(coefficients: &[Rational]) -> Self {
        Polynomial {
            coefficients: coefficients
                .iter()
                .map(|q| CauchyReal::from_rational(q.clone()))
                .collect(),
        }
    }

    pub fn coefficients(&self) -> &[CauchyReal] {
        &self.coefficients
    }

    /// Horner evaluation; the result carries a modulus composed from the
    /// coefficient and argument moduli.
    pub fn eval(&self, x: &CauchyReal) -> Result<CauchyReal> {
        let zero = CauchyReal::from_rational(Rational::zero());
        let mut acc = match self.coefficients.last() {
            None => return Ok(zero),
            Some(c) => c.clone(),
        };
        for c in self.coefficients.iter().rev().skip(1) {
            acc = creal_add(&creal_mul(&acc, x)?, c);
        }
        Ok(acc)
    }

    /// The termwise derivative.
    pub fn derivative(&self) -> Polynomial {
        let coefficients = self
            .coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| creal_scale(&Rational::from_integer(BigInt::from(i)), c))
            .collect();
        Polynomial { coefficients }
    }
}

/// The sign of `p(q)`, decided by refining the evaluated real until it
/// separates from zero; an exact or budget-resistant zero propagates as
/// [`Error::ZeroWitnessNotFound`].
pub fn sign_at(p: &Polynomial, q: &Rational, budget: u64) -> Result<Sign> {
    let value = p.eval(&CauchyReal::from_rational(q.clone()))?;
    let (_, positive) = value.sign_witness(budget)?;
    Ok(if positive { Sign::Positive } else { Sign::Negative })
}

/// An interval whose endpoints carry witnessed opposite signs of some
/// function, ordered `low < high`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedInterval {
    low: Rational,
    high: Rational,
    low_sign: Sign,
}

impl SignedInterval {
    pub fn new(low: Rational, low_sign: Sign, high: Rational, high_sign: Sign) -> Result<Self> {
        if low >= high {
            return Err(Error::InvalidBracket(format!(
                "low endpoint {low} is not below high endpoint {high}"
            )));
        }
        if low_sign == high_sign {
            return Err(Error::InvalidBracket(
                "endpoints carry the same sign".to_string(),
            ));
        }
        Ok(SignedInterval {
            low,
            high,
            low_sign,
        })
    }

    /// Builds the bracket by deciding both endpoint signs of `p`.
    pub fn bracket(p: &Polynomial, low: Rational, high: Rational, budget: u64) -> Result<Self> {
        let ls = sign_at(p, &low, budget)?;
        let hs = sign_at(p, &high, budget)?;
        SignedInterval::new(low, ls, high, hs)
    }

    pub fn low(&self) -> &Rational {
        &self.low
    }

    pub fn high(&self) -> &Rational {
        &self.high
    }

    pub fn low_sign(&self) -> Sign {
        self.low_sign
    }

    pub fn width(&self) -> Rational {
        &self.high - &self.low
    }

    pub fn midpoint(&self) -> Rational {
        (&self.low + &self.high) / Rational::from_integer(2.into())
    }
}

/// Shrinks a sign bracket of `p` until it is at most `2^-precision` wide.
///
/// Each round tries the midpoint; if its sign resists the budget (for
/// instance because the midpoint is the root itself), the two trisection
/// points are tried instead, and only if all three resist does the
/// refinement fail with [`Error::SignUndecidable`]. Every accepted round
/// shrinks the bracket to at most `2/3` of its width, so the loop
/// terminates.
pub fn refine_root(
    p: &Polynomial,
    start: SignedInterval,
    precision: u64,
    budget: u64,
) -> Result<SignedInterval> {
    let target = pow2(-(precision as i64));
    let mut bracket = start;
    while bracket.width() > target {
        let w = bracket.width();
        let third = &w / Rational::from_integer(3.into());
        let candidates = [
            bracket.midpoint(),
            bracket.low() + &third,
            bracket.low() + &third * Rational::from_integer(2.into()),
        ];
        let mut advanced = false;
        for point in candidates {
            match sign_at(p, &point, budget) {
                Ok(sign) => {
                    bracket = if sign == bracket.low_sign() {
                        SignedInterval::new(
                            point,
                            sign,
                            bracket.high().clone(),
                            sign.opposite(),
                        )?
                    } else {
                        SignedInterval::new(
                            bracket.low().clone(),
                            sign.opposite(),
                            point,
                            sign,
                        )?
                    };
                    advanced = true;
                    break;
                }
                Err(Error::ZeroWitnessNotFound { .. }) => continue,
                Err(other) => return Err(other),
            }
        }
        if !advanced {
            return Err(Error::SignUndecidable { budget });
        }
    }
    Ok(bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{check_cauchy_modulus, instances};
    use crate::numeric::rational;

    fn rat(p: i64, q: i64) -> Rational {
        rational(p, q).unwrap()
    }

    /// Both reals denote the same point: their stage-`n` refinements can
    /// differ by at most the two stage errors.
    fn assert_same_real(x: &CauchyReal, y: &CauchyReal, level: u64) {
        let diff = (x.refine(level).unwrap() - y.refine(level).unwrap()).abs();
        assert!(
            diff <= pow2(-(level as i64) + 1),
            "reals differ by {diff} at level {level}"
        );
    }

    #[test]
    fn ring_laws_hold_at_depth_forty() {
        let x = instances::noisy_real(rat(2, 3), 1);
        let y = instances::noisy_real(rat(-5, 7), 2);
        let z = instances::noisy_real(rat(9, 4), 3);
        let level = 41;

        assert_same_real(&creal_add(&x, &y), &creal_add(&y, &x), level);
        assert_same_real(
            &creal_add(&creal_add(&x, &y), &z),
            &creal_add(&x, &creal_add(&y, &z)),
            level,
        );
        assert_same_real(
            &creal_mul(&x, &y).unwrap(),
            &creal_mul(&y, &x).unwrap(),
            level,
        );
        assert_same_real(
            &creal_mul(&creal_mul(&x, &y).unwrap(), &z).unwrap(),
            &creal_mul(&x, &creal_mul(&y, &z).unwrap()).unwrap(),
            level,
        );
        assert_same_real(
            &creal_mul(&creal_add(&x, &y), &z).unwrap(),
            &creal_add(
                &creal_mul(&x, &z).unwrap(),
                &creal_mul(&y, &z).unwrap(),
            ),
            level,
        );
        let zero = CauchyReal::from_rational(rat(0, 1));
        assert_same_real(&creal_add(&x, &creal_neg(&x)), &zero, level);
        let one = CauchyReal::from_rational(rat(1, 1));
        assert_same_real(
            &creal_mul(&x, &creal_inv(&x, 64).unwrap()).unwrap(),
            &one,
            level,
        );
    }

    #[test]
    fn derived_moduli_survive_falsification() {
        let x = instances::noisy_real(rat(2, 3), 4);
        let y = instances::noisy_real(rat(-5, 7), 5);
        let results = vec![
            creal_neg(&x),
            creal_add(&x, &y),
            creal_scale(&rat(-7, 3), &x),
            creal_mul(&x, &y).unwrap(),
            creal_inv(&y, 64).unwrap(),
            sqrt(&rat(2, 1)).unwrap(),
        ];
        for (i, r) in results.iter().enumerate() {
            let violations = check_cauchy_modulus(r.approximant(), r.modulus(), 48).unwrap();
            assert!(violations.is_empty(), "operation {i}: {violations:?}");
        }
    }

    #[test]
    fn magnitude_and_inversion_witnesses_frozen() {
        assert_eq!(
            mul_bound_exponent(&CauchyReal::from_rational(rat(2, 3))).unwrap(),
            2
        );
        assert_eq!(
            mul_bound_exponent(&CauchyReal::from_rational(rat(0, 1))).unwrap(),
            1
        );
        assert_eq!(
            mul_bound_exponent(&CauchyReal::from_rational(rat(10, 1))).unwrap(),
            4
        );
        assert_eq!(
            inversion_witness(&CauchyReal::from_rational(rat(1, 8)), 64).unwrap(),
            5
        );
        assert_eq!(
            inversion_witness(&CauchyReal::from_rational(rat(0, 1)), 16),
            Err(Error::ZeroWitnessNotFound { budget: 16 })
        );
    }

    #[test]
    fn inverse_of_an_eighth_is_eight() {
        let x = CauchyReal::from_rational(rat(1, 8));
        let inv = creal_inv(&x, 64).unwrap();
        assert_same_real(&inv, &CauchyReal::from_rational(rat(8, 1)), 40);
    }

    #[test]
    fn square_root_squares_back() {
        let r = sqrt(&rat(2, 1)).unwrap();
        for n in [4u64, 10, 20, 30] {
            let v = r.refine(n).unwrap();
            // |v^2 - 2| = |v - sqrt(2)| * |v + sqrt(2)| <= 2^-n * 3
            assert!(
                (&v * &v - rat(2, 1)).abs() <= pow2(-(n as i64)) * rat(3, 1),
                "level {n}"
            );
        }
        assert_same_real(
            &sqrt(&rat(9, 16)).unwrap(),
            &CauchyReal::from_rational(rat(3, 4)),
            40,
        );
        assert_same_real(
            &sqrt(&rat(0, 1)).unwrap(),
            &CauchyReal::from_rational(rat(0, 1)),
            40,
        );
        assert!(matches!(sqrt(&rat(-1, 4)), Err(Error::NegativeRadicand)));
    }

    #[test]
    fn root_refinement_pins_the_square_root_of_two() {
        let p = Polynomial::from_rationals(&[rat(-2, 1), rat(0, 1), rat(1, 1)]);
        let bracket = SignedInterval::bracket(&p, rat(1, 1), rat(2, 1), 64).unwrap();
        assert_eq!(bracket.low_sign(), Sign::Negative);
        let refined = refine_root(&p, bracket, 20, 64).unwrap();
        assert!(refined.width() <= pow2(-20));
        let mid = refined.midpoint();
        assert!((&mid * &mid - rat(2, 1)).abs() <= pow2(-17));
    }

    #[test]
    fn trisection_steps_around_a_rational_root() {
        // root exactly at the first midpoint probe
        let p = Polynomial::from_rationals(&[rat(-1, 2), rat(1, 1)]);
        let bracket = SignedInterval::bracket(&p, rat(0, 1), rat(1, 1), 32).unwrap();
        let refined = refine_root(&p, bracket, 8, 32).unwrap();
        assert!((refined.midpoint() - rat(1, 2)).abs() <= pow2(-8));
    }

    #[test]
    fn triple_roots_defeat_the_fallback_honestly() {
        // roots at 1/2, 1/3, 2/3: the midpoint and both trisection points
        // of [0, 1] are all roots
        let p = Polynomial::from_rationals(&[
            rat(-1, 9),
            rat(13, 18),
            rat(-3, 2),
            rat(1, 1),
        ]);
        let bracket = SignedInterval::bracket(&p, rat(0, 1), rat(1, 1), 32).unwrap();
        assert_eq!(
            refine_root(&p, bracket, 8, 12),
            Err(Error::SignUndecidable { budget: 12 })
        );
    }

    #[test]
    fn brackets_validate_their_shape() {
        assert!(matches!(
            SignedInterval::new(rat(1, 1), Sign::Negative, rat(0, 1), Sign::Positive),
            Err(Error::InvalidBracket(_))
        ));
        assert!(matches!(
            SignedInterval::new(rat(0, 1), Sign::Positive, rat(1, 1), Sign::Positive),
            Err(Error::InvalidBracket(_))
        ));
        let p = Polynomial::from_rationals(&[rat(1, 1), rat(0, 1), rat(1, 1)]);
        // x^2 + 1 is positive at both endpoints
        assert!(matches!(
            SignedInterval::bracket(&p, rat(-1, 1), rat(1, 1), 32),
            Err(Error::InvalidBracket(_))
        ));
    }

    #[test]
    fn evaluation_matches_direct_arithmetic() {
        let p = Polynomial::from_rationals(&[rat(1, 1), rat(-3, 1), rat(2, 1)]);
        let at = CauchyReal::from_rational(rat(5, 2));
        // 1 - 3*(5/2) + 2*(25/4) = 6
        assert_same_real(
            &p.eval(&at).unwrap(),
            &CauchyReal::from_rational(rat(6, 1)),
            40,
        );
        let d = p.derivative();
        // -3 + 4x at 5/2 = 7
        assert_same_real(
            &d.eval(&at).unwrap(),
            &CauchyReal::from_rational(rat(7, 1)),
            40,
        );
        let empty = Polynomial::new(Vec::new());
        assert_same_real(
            &empty.eval(&at).unwrap(),
            &CauchyReal::from_rational(rat(0, 1)),
            40,
        );
    }
}
