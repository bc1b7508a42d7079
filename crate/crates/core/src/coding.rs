//! Prefix-free code assignment. Codewords are handed out online, one
//! requested length at a time, by always carving the leftmost adequate
//! block out of the remaining free space; a request is refused exactly
//! when it would push the total dyadic mass past 1. Weight streams are
//! turned into admissible length streams whose dyadic mass tracks the
//! weight mass from below, and finite decision procedures answer
//! membership queries against bounded enumerations.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};

use crate::error::Error;
use crate::numeric::{pow2, Rational};
use crate::sequences::{Modulus, Sequence};
use crate::Result;

/// A finite binary word. Ordering is lexicographic, which on a prefix-free
/// family coincides with left-to-right position on the unit interval.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn empty() -> Self {
        BitString(Vec::new())
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString(bits)
    }

    pub fn len(&self) -> u64 {
        self.0.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    /// This word extended by one bit.
    pub fn child(&self, bit: bool) -> Self {
        let mut bits = self.0.clone();
        bits.push(bit);
        BitString(bits)
    }

    pub fn is_prefix_of(&self, other: &Self) -> bool {
        other.0.len() >= self.0.len() && other.0[..self.0.len()] == self.0[..]
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut bits = Vec::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                _ => return Err(Error::InvalidBitString(s.to_string())),
            }
        }
        Ok(BitString(bits))
    }
}

/// Online prefix-free codeword assigner.
///
/// The free space is kept as the set of maximal unassigned dyadic blocks.
/// It always consists of blocks of pairwise distinct sizes, increasing
/// from left to right, which yields the completeness guarantee: whenever
/// the remaining mass is at least `2^-L`, a block of length at most `L`
/// exists, so a request fails only on genuine mass exhaustion.
pub struct PrefixCode {
    free: BTreeSet<BitString>,
    assigned: Vec<BitString>,
    mass: Rational,
}

impl Default for PrefixCode {
    fn default() -> Self {
        Self::new()
    }
}

impl PrefixCode {
    pub fn new() -> Self {
        let mut free = BTreeSet::new();
        free.insert(BitString::empty());
        PrefixCode {
            free,
            assigned: Vec::new(),
            mass: Rational::zero(),
        }
    }

    /// Assigns the leftmost available codeword of the requested length.
    /// The chosen free block is split: the codeword is its all-zeros
    /// extension and the flipped-bit siblings along the way return to the
    /// free set, where they sit in strictly size-increasing position order.
    pub fn push(&mut self, length: u64) -> Result<BitString> {
        let exponent = i64::try_from(length).expect("codeword length exceeds i64");
        let grown = &self.mass + pow2(-exponent);
        if grown > Rational::one() {
            return Err(Error::KraftOverflow {
                index: self.assigned.len() as u64,
                mass: grown,
            });
        }
        let block = self
            .free
            .iter()
            .find(|b| b.len() <= length)
            .cloned()
            .expect("free space lost a block despite available mass");
        self.free.remove(&block);
        let mut word = block;
        while word.len() < length {
            self.free.insert(word.child(true));
            word = word.child(false);
        }
        self.mass = grown;
        self.assigned.push(word.clone());
        Ok(word)
    }

    /// Total dyadic mass of all assigned codewords.
    pub fn kraft_mass(&self) -> &Rational {
        &self.mass
    }

    /// Codewords in request order.
    pub fn assigned(&self) -> &[BitString] {
        &self.assigned
    }
}

/// Assigns one codeword per requested length, failing at the first index
/// whose request would push the total mass past 1.
pub fn kc_assign(lengths: &[u64]) -> Result<Vec<BitString>> {
    let mut code = PrefixCode::new();
    let mut out = Vec::with_capacity(lengths.len());
    for &len in lengths {
        out.push(code.push(len)?);
    }
    Ok(out)
}

/// Converts a stream of positive weights into codeword lengths: `f(n)` is
/// the least `k` such that the dyadic mass assigned so far plus `2^-k`
/// stays strictly below the weight mass through index `n`. The dyadic mass
/// therefore tracks the weight mass from below forever, which gives both
/// admissibility (the lengths always fit in a prefix-free code while the
/// weights sum to at most 1) and the per-term bound `2^-f(n) >= w_n / 2`.
///
/// Evaluation is in index order; a non-positive weight or a weight mass
/// exceeding 1 surfaces as an error at the offending index.
pub fn lengths_from_weights(weights: &Sequence) -> Modulus {
    let weights = weights.clone();
    let sums = Arc::new(Mutex::new((Rational::zero(), Rational::zero())));
    Modulus::from_step(false, move |n, _| {
        let mut st = sums.lock().expect("weight accumulator poisoned");
        let (dyadic, weight) = &mut *st;
        let w = weights.eval(n)?;
        if w <= Rational::zero() {
            return Err(Error::WeightNotPositive { index: n });
        }
        let grown = &*weight + &w;
        if grown > Rational::one() {
            return Err(Error::MassExceeded {
                index: n,
                mass: grown,
            });
        }
        let slack = &grown - &*dyadic;
        let mut k = 0u64;
        while pow2(-(k as i64)) >= slack {
            k += 1;
        }
        *dyadic += pow2(-(k as i64));
        *weight = grown;
        Ok(k)
    })
}

/// Decides membership of `word` in the set enumerated by `enumeration`,
/// given a bound `g` with the property that every enumerated word shorter
/// than `n` appears among the first `g(n)` entries: `word` is a member if
/// and only if it occurs before stage `g(len + 1)`.
pub fn decide_prefix_member<F>(word: &BitString, enumeration: F, bound: &Modulus) -> Result<bool>
where
    F: Fn(u64) -> Result<BitString>,
{
    let stop = bound.eval(word.len() + 1)?;
    for i in 0..stop {
        if enumeration(i)? == *word {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Decides membership of `n` in the set enumerated by `enumeration`,
/// given a bound `g` such that every enumerated value below `m` appears
/// among the first `g(m)` entries.
pub fn decide_enumerated_member<F>(n: u64, enumeration: F, bound: &Modulus) -> Result<bool>
where
    F: Fn(u64) -> Result<u64>,
{
    let stop = bound.eval(n + 1)?;
    for i in 0..stop {
        if enumeration(i)? == n {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;
    use proptest::prelude::*;

    fn words(lengths: &[u64]) -> Vec<String> {
        kc_assign(lengths).unwrap().iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn frozen_assignments() {
        assert_eq!(words(&[1, 2, 2]), vec!["0", "10", "11"]);
        assert_eq!(words(&[2, 1]), vec!["00", "1"]);
        assert_eq!(words(&[1, 1]), vec!["0", "1"]);
        assert_eq!(words(&[3, 3, 2, 2]), vec!["000", "001", "01", "10"]);
        assert_eq!(words(&[2, 2, 1]), vec!["00", "01", "1"]);
        assert_eq!(words(&[1, 3]), vec!["0", "100"]);
        assert_eq!(words(&[1, 2, 3, 3]), vec!["0", "10", "110", "111"]);
    }

    #[test]
    fn refuses_exactly_on_mass_exhaustion() {
        let err = kc_assign(&[1, 1, 1]).unwrap_err();
        match err {
            Error::KraftOverflow { index, mass } => {
                assert_eq!(index, 2);
                assert_eq!(mass, rational(3, 2).unwrap());
            }
            other => panic!("unexpected error {other:?}"),
        }
        // exact fill is fine, the next request is not
        let mut code = PrefixCode::new();
        for len in [1, 2, 3, 3] {
            code.push(len).unwrap();
        }
        assert_eq!(code.kraft_mass(), &Rational::one());
        assert!(matches!(
            code.push(10),
            Err(Error::KraftOverflow { index: 4, .. })
        ));
    }

    #[test]
    fn empty_word_takes_everything() {
        let mut code = PrefixCode::new();
        assert_eq!(code.push(0).unwrap(), BitString::empty());
        assert!(matches!(code.push(5), Err(Error::KraftOverflow { .. })));
    }

    #[test]
    fn bitstring_round_trip_and_order() {
        let w: BitString = "0110".parse().unwrap();
        assert_eq!(w.to_string(), "0110");
        assert_eq!(w.len(), 4);
        assert!(matches!(
            "01x".parse::<BitString>(),
            Err(Error::InvalidBitString(_))
        ));
        let a: BitString = "01".parse().unwrap();
        let b: BitString = "10".parse().unwrap();
        assert!(a < b);
        assert!(a.is_prefix_of(&"011".parse().unwrap()));
        assert!(!a.is_prefix_of(&b));
    }

    #[test]
    fn weights_to_lengths_frozen() {
        let halving = Sequence::from_fn(|n| pow2(-(n as i64) - 1));
        let f = lengths_from_weights(&halving);
        let got: Vec<u64> = (0..8).map(|n| f.eval(n).unwrap()).collect();
        assert_eq!(got, vec![2, 2, 2, 3, 4, 5, 6, 7]);
    }

    #[test]
    fn weights_to_lengths_rejections() {
        let with_zero = Sequence::from_fn(|n| {
            if n == 1 {
                Rational::zero()
            } else {
                rational(1, 4).unwrap()
            }
        });
        let f = lengths_from_weights(&with_zero);
        f.eval(0).unwrap();
        assert_eq!(f.eval(1), Err(Error::WeightNotPositive { index: 1 }));

        let heavy = Sequence::from_fn(|_| rational(3, 4).unwrap());
        let f = lengths_from_weights(&heavy);
        f.eval(0).unwrap();
        assert!(matches!(f.eval(1), Err(Error::MassExceeded { index: 1, .. })));
    }

    #[test]
    fn lengths_cover_half_the_weight_and_fit_a_code() {
        // geometric-thirds weights: sum is 1/2, never dyadic
        let weights = Sequence::from_fn(|n| {
            rational(1, 6).unwrap() * rational(2, 3).unwrap().pow(n as i32)
        });
        let f = lengths_from_weights(&weights);
        let mut code = PrefixCode::new();
        for n in 0..24 {
            let len = f.eval(n).unwrap();
            assert!(pow2(-(len as i64)) >= weights.eval(n).unwrap() / rational(2, 1).unwrap());
            code.push(len).unwrap();
        }
        assert!(code.kraft_mass() < &Rational::one());
    }

    #[test]
    fn decision_procedures_scan_exactly_the_bounded_prefix() {
        let assigned = kc_assign(&[2, 2, 2, 3]).unwrap();
        let listing = assigned.clone();
        let enumerate = move |i: u64| {
            listing
                .get(i as usize)
                .cloned()
                .ok_or(Error::TableExhausted { index: i, len: 4 })
        };
        let bound = Modulus::constant(4);
        for w in &assigned {
            assert!(decide_prefix_member(w, &enumerate, &bound).unwrap());
        }
        let absent: BitString = "111".parse().unwrap();
        assert!(!decide_prefix_member(&absent, &enumerate, &bound).unwrap());

        let evens = |i: u64| Ok(2 * i);
        let bound = Modulus::identity();
        assert!(decide_enumerated_member(4, evens, &bound).unwrap());
        assert!(!decide_enumerated_member(5, evens, &bound).unwrap());
    }

    proptest! {
        /// Completeness and soundness in one: a request stream is accepted
        /// exactly as long as its running mass stays within 1, and accepted
        /// words have the exact requested lengths and are prefix-free.
        #[test]
        fn assignment_is_complete_and_prefix_free(
            lengths in prop::collection::vec(0u64..=10, 0..12)
        ) {
            let mut code = PrefixCode::new();
            let mut mass = Rational::zero();
            let mut accepted = Rational::zero();
            for (i, &len) in lengths.iter().enumerate() {
                mass += pow2(-(len as i64));
                let outcome = code.push(len);
                if mass <= Rational::one() {
                    let word = outcome.unwrap();
                    prop_assert_eq!(word.len(), len);
                    accepted = mass.clone();
                } else {
                    let refused_here = matches!(
                        outcome,
                        Err(Error::KraftOverflow { index, .. }) if index == i as u64
                    );
                    prop_assert!(refused_here);
                    break;
                }
            }
            let words = code.assigned();
            for (i, w) in words.iter().enumerate() {
                for v in &words[i + 1..] {
                    prop_assert!(!w.is_prefix_of(v) && !v.is_prefix_of(w));
                }
            }
            prop_assert_eq!(code.kraft_mass(), &accepted);
        }
    }
}
