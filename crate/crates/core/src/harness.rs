//! Falsification tools. Nothing here certifies a modulus; a passing check
//! only reports that no counterexample exists below the stated horizon,
//! and every report names the window it searched.

use num_traits::Signed;

use crate::numeric::{pow2, Rational};
use crate::sequences::{Modulus, Probe, Sequence};
use crate::Result;

pub mod instances;

/// A falsified bound: the increment observed at index `m` exceeded the
/// level-`n` tolerance. For pairwise Cauchy checks `m` is the later index
/// of the offending pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub m: u64,
    pub n: u64,
    pub observed: Rational,
    pub bound: Rational,
}

/// Minimal moduli extracted by brute force from a finite window.
///
/// `entry(n)` is the least `M` such that every sampled increment at
/// `M <= m <= horizon` is at most `2^-n`; an entry of `horizon + 1` means
/// even the last sampled increment was too large. Entries are nondecreasing
/// in `n` because the tolerance shrinks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModulusTable {
    horizon: u64,
    entries: Vec<u64>,
}

impl ModulusTable {
    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// The minimal admissible value at level `n`; `n` must be at most the
    /// horizon.
    pub fn entry(&self, n: u64) -> u64 {
        self.entries[usize::try_from(n).expect("table level exceeds usize")]
    }

    /// `(n, entry(n))` rows in level order.
    pub fn rows(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.entries.iter().copied().enumerate().map(|(n, e)| (n as u64, e))
    }
}

/// Absolute increments of `x` along the probe `r`: index `m` holds
/// `|x[r(m+1)] - x[r(m)]|` for `m <= horizon`.
fn probe_increments(x: &Sequence, r: &Probe, horizon: u64) -> Result<Vec<Rational>> {
    let mut out = Vec::with_capacity(horizon as usize + 1);
    let mut prev = x.eval(r.eval(0)?)?;
    for m in 0..=horizon {
        let next = x.eval(r.eval(m + 1)?)?;
        out.push((&next - &prev).abs());
        prev = next;
    }
    Ok(out)
}

/// Exhaustively falsifies `g` as a modulus for the increments of `x` along
/// `r`: every pair `(m, n)` with `n <= horizon` and `g(n) <= m <= horizon`
/// is tested against `|x[r(m+1)] - x[r(m)]| <= 2^-n`. Levels whose `g(n)`
/// lies beyond the window contribute no testable cells; once a
/// declared-monotone `g` leaves the window the remaining levels are skipped
/// without being evaluated.
pub fn check_modulus(
    x: &Sequence,
    r: &Probe,
    g: &Modulus,
    horizon: u64,
) -> Result<Vec<Violation>> {
    let increments = probe_increments(x, r, horizon)?;
    let mut violations = Vec::new();
    for n in 0..=horizon {
        let gn = g.eval(n)?;
        if gn > horizon {
            if g.is_declared_monotone() {
                break;
            }
            continue;
        }
        let bound = pow2(-(n as i64));
        for m in gn..=horizon {
            let observed = &increments[m as usize];
            if *observed > bound {
                violations.push(Violation {
                    m,
                    n,
                    observed: observed.clone(),
                    bound: bound.clone(),
                });
            }
        }
    }
    Ok(violations)
}

/// Falsifies `g` as a modulus of convergence of `x` to `limit`: tests
/// `|x_m - limit| <= 2^-n` for every `(m, n)` in the window, with the same
/// skipping rules as [`check_modulus`].
pub fn check_limit_modulus(
    x: &Sequence,
    limit: &Rational,
    g: &Modulus,
    horizon: u64,
) -> Result<Vec<Violation>> {
    let mut distances = Vec::with_capacity(horizon as usize + 1);
    for m in 0..=horizon {
        distances.push((&x.eval(m)? - limit).abs());
    }
    let mut violations = Vec::new();
    for n in 0..=horizon {
        let gn = g.eval(n)?;
        if gn > horizon {
            if g.is_declared_monotone() {
                break;
            }
            continue;
        }
        let bound = pow2(-(n as i64));
        for m in gn..=horizon {
            let observed = &distances[m as usize];
            if *observed > bound {
                violations.push(Violation {
                    m,
                    n,
                    observed: observed.clone(),
                    bound: bound.clone(),
                });
            }
        }
    }
    Ok(violations)
}

/// Falsifies `g` as a Cauchy modulus of `x`: for each level `n` the spread
/// of `x` over the window `[g(n), horizon]` must stay within `2^-n`. At
/// most one violation per level is reported, anchored at the later index of
/// the widest pair.
pub fn check_cauchy_modulus(
    x: &Sequence,
    g: &Modulus,
    horizon: u64,
) -> Result<Vec<Violation>> {
    let mut values = Vec::with_capacity(horizon as usize + 1);
    for m in 0..=horizon {
        values.push(x.eval(m)?);
    }
    // suffix extrema with witness indices
    let len = values.len();
    let mut suffix_max: Vec<(Rational, u64)> = vec![(values[len - 1].clone(), len as u64 - 1); len];
    let mut suffix_min = suffix_max.clone();
    for m in (0..len - 1).rev() {
        suffix_max[m] = if values[m] > suffix_max[m + 1].0 {
            (values[m].clone(), m as u64)
        } else {
            suffix_max[m + 1].clone()
        };
        suffix_min[m] = if values[m] < suffix_min[m + 1].0 {
            (values[m].clone(), m as u64)
        } else {
            suffix_min[m + 1].clone()
        };
    }
    let mut violations = Vec::new();
    for n in 0..=horizon {
        let gn = g.eval(n)?;
        if gn > horizon {
            if g.is_declared_monotone() {
                break;
            }
            continue;
        }
        let (hi, hi_at) = &suffix_max[gn as usize];
        let (lo, lo_at) = &suffix_min[gn as usize];
        let spread = hi - lo;
        let bound = pow2(-(n as i64));
        if spread > bound {
            violations.push(Violation {
                m: *hi_at.max(lo_at),
                n,
                observed: spread,
                bound,
            });
        }
    }
    Ok(violations)
}

/// The brute-force minimal modulus for the increments of `x` along `r`
/// within the window; the completeness oracle for [`check_modulus`]: a
/// modulus passes the check if and only if it dominates this table wherever
/// it lands inside the window.
pub fn brute_min_modulus(x: &Sequence, r: &Probe, horizon: u64) -> Result<ModulusTable> {
    let increments = probe_increments(x, r, horizon)?;
    let mut entries = Vec::with_capacity(horizon as usize + 1);
    for n in 0..=horizon {
        let bound = pow2(-(n as i64));
        let mut entry = 0;
        for m in (0..=horizon).rev() {
            if increments[m as usize] > bound {
                entry = m + 1;
                break;
            }
        }
        entries.push(entry);
    }
    Ok(ModulusTable { horizon, entries })
}

/// The deterministic probe collection used by the test suites: identity,
/// doubling, squares, and triangular numbers.
pub fn probe_suite() -> Vec<Probe> {
    vec![
        Probe::identity(),
        Probe::doubling(),
        Probe::squares(),
        Probe::triangular(),
    ]
}

/// Searches the window for a pair witnessing that `x` is not Cauchy at
/// tolerance `2^-epsilon_exponent`: returns the first `(k, l)` with
/// `k < l <= horizon` and `|x_k - x_l| > 2^-epsilon_exponent`, scanning `l`
/// upward and comparing against the running extrema.
pub fn falsify_cauchy(
    x: &Sequence,
    epsilon_exponent: u64,
    horizon: u64,
) -> Result<Option<(u64, u64)>> {
    let eps = pow2(-(epsilon_exponent as i64));
    let first = x.eval(0)?;
    let mut min = (first.clone(), 0u64);
    let mut max = (first, 0u64);
    for l in 1..=horizon {
        let v = x.eval(l)?;
        if &v - &min.0 > eps {
            return Ok(Some((min.1, l)));
        }
        if &max.0 - &v > eps {
            return Ok(Some((max.1, l)));
        }
        if v < min.0 {
            min = (v.clone(), l);
        }
        if v > max.0 {
            max = (v, l);
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rational;

    fn rat(p: i64, q: i64) -> Rational {
        rational(p, q).unwrap()
    }

    fn halving() -> Sequence {
        Sequence::from_fn(|n| pow2(-(n as i64)))
    }

    #[test]
    fn oracle_on_the_halving_sequence() {
        let table = brute_min_modulus(&halving(), &Probe::identity(), 64).unwrap();
        assert_eq!(table.entry(0), 0);
        for n in 1..=64 {
            assert_eq!(table.entry(n), n - 1);
        }
    }

    #[test]
    fn oracle_entries_are_nondecreasing() {
        let x = instances::dithered_ramp(42);
        let scaled = Sequence::try_from_fn(move |n| Ok(pow2(-(n as i64)) * x.eval(n)?));
        let table = brute_min_modulus(&scaled, &Probe::doubling(), 48).unwrap();
        for n in 1..=48 {
            assert!(table.entry(n) >= table.entry(n - 1));
        }
    }

    #[test]
    fn check_accepts_the_identity_modulus_on_halving() {
        let v = check_modulus(&halving(), &Probe::identity(), &Modulus::identity(), 64).unwrap();
        assert!(v.is_empty());
    }

    #[test]
    fn check_reports_the_first_failing_cell() {
        // g(n) = n - 2 is one below the minimal modulus n - 1
        let g = Modulus::from_fn(|n| n.saturating_sub(2));
        let v = check_modulus(&halving(), &Probe::identity(), &g, 64).unwrap();
        assert!(!v.is_empty());
        assert_eq!((v[0].m, v[0].n), (0, 2));
        assert_eq!(v[0].observed, rat(1, 2));
        assert_eq!(v[0].bound, rat(1, 4));
    }

    #[test]
    fn check_agrees_with_the_oracle() {
        let probes = probe_suite();
        let xs = vec![
            halving(),
            Sequence::from_fn(|n| pow2(-(n as i64 / 3))),
            instances::noisy_real(rat(2, 3), 7).approximant().clone(),
        ];
        let gs: Vec<Modulus> = vec![
            Modulus::identity(),
            Modulus::from_fn(|n| n.saturating_sub(1)),
            Modulus::from_fn(|n| n / 2),
            Modulus::shift(3),
            Modulus::from_fn(|n| 3 * n + 1),
        ];
        let horizon = 32;
        for x in &xs {
            for r in &probes {
                let table = brute_min_modulus(x, r, horizon).unwrap();
                for g in &gs {
                    let clean = check_modulus(x, r, g, horizon).unwrap().is_empty();
                    let dominates = (0..=horizon).all(|n| {
                        let gn = g.eval(n).unwrap();
                        gn > horizon || gn >= table.entry(n)
                    });
                    assert_eq!(clean, dominates);
                }
            }
        }
    }

    #[test]
    fn limit_check_matches_the_convergence_contract() {
        let x = halving();
        let zero = rat(0, 1);
        assert!(check_limit_modulus(&x, &zero, &Modulus::identity(), 64)
            .unwrap()
            .is_empty());
        let slack = Modulus::from_fn(|n| n.saturating_sub(1));
        let v = check_limit_modulus(&x, &zero, &slack, 64).unwrap();
        assert_eq!((v[0].m, v[0].n), (0, 1));
    }

    #[test]
    fn cauchy_check_needs_the_pairwise_margin() {
        // alternating decay: distance to 0 is 2^-m, but neighboring terms
        // are 3 * 2^-(m+1) apart, so the to-zero modulus fails pairwise
        let x = Sequence::from_fn(|n| {
            let v = pow2(-(n as i64));
            if n % 2 == 0 {
                v
            } else {
                -v
            }
        });
        let v = check_cauchy_modulus(&x, &Modulus::identity(), 64).unwrap();
        assert!(!v.is_empty());
        assert!(check_cauchy_modulus(&x, &Modulus::shift(1), 64).unwrap().is_empty());
    }

    #[test]
    fn falsifier_finds_spreads_and_respects_tolerance() {
        assert_eq!(
            falsify_cauchy(&Sequence::naturals(), 1, 64).unwrap(),
            Some((0, 1))
        );
        assert_eq!(
            falsify_cauchy(&Sequence::naturals(), 0, 64).unwrap(),
            Some((0, 2))
        );
        assert_eq!(falsify_cauchy(&halving(), 0, 64).unwrap(), None);
    }

    #[test]
    fn probe_suite_is_strict_and_named() {
        let suite = probe_suite();
        assert_eq!(suite.len(), 4);
        let names: Vec<&str> = suite.iter().map(|p| p.name().unwrap()).collect();
        assert_eq!(names, vec!["identity", "doubling", "squares", "triangular"]);
        for p in &suite {
            for n in 0..32 {
                assert!(p.eval(n + 1).unwrap() > p.eval(n).unwrap());
            }
        }
        let first: Vec<u64> = (0..4).map(|n| suite[3].eval(n).unwrap()).collect();
        assert_eq!(first, vec![0, 1, 3, 6]);
    }
}
