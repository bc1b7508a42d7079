//! The modulus algebra: operations that transfer moduli of convergence
//! across standard sequence constructions, and the bounded searches that
//! recover probes and moduli from raw sequence data.
//!
//! Every formula here carries its soundness margin in a comment, stated as
//! the inequality chain that the harness's finite checks sample. The
//! searches are all horizon-bounded and report
//! [`Error::HorizonExceeded`](crate::Error::HorizonExceeded) when they
//! stall; no loop in this module is unbounded.

use std::sync::{Arc, Mutex};

use num_traits::Signed;

use crate::numeric::{pow2, Rational};
use crate::sequences::{Modulus, Probe, RealGrid, Sequence};
use crate::{Error, Result};

/// Converts a modulus of convergence into a Cauchy modulus for the same
/// sequence: `h(n) = g(n+1)`.
///
/// Soundness: for `l, m >= g(n+1)` both terms are within `2^-(n+1)` of the
/// limit, so they are within `2^-n` of each other.
pub fn cauchy_from_convergence(g: &Modulus) -> Modulus {
    let g = g.clone();
    let monotone = g.is_declared_monotone();
    Modulus::from_step(monotone, move |n, _| g.eval(n + 1))
}

/// Nondecreasing envelope `h(n) = max(g(0), ..., g(n))`; a valid modulus
/// stays valid under the envelope because moduli only need to be large
/// enough.
pub fn monotonize(g: &Modulus) -> Modulus {
    let g = g.clone();
    Modulus::from_step(true, move |n, prev| {
        let v = g.eval(n)?;
        Ok(prev.map_or(v, |p| p.max(v)))
    })
}

/// Strictly increasing envelope: `h(0) = g(0)`,
/// `h(n+1) = max(h(n) + 1, g(n+1))`.
pub fn strict_monotonize(g: &Modulus) -> Modulus {
    let g = g.clone();
    Modulus::from_step(true, move |n, prev| {
        let v = g.eval(n)?;
        Ok(prev.map_or(v, |p| (p + 1).max(v)))
    })
}

/// Modulus for a pointwise sum: `h(n) = max(gx(n+1), gy(n+1))`.
///
/// Soundness: past `h(n)` each summand moved below `2^-(n+1)`, and the two
/// halves add to at most `2^-n`.
pub fn sum_modulus(gx: &Modulus, gy: &Modulus) -> Modulus {
    let (gx, gy) = (gx.clone(), gy.clone());
    let monotone = gx.is_declared_monotone() && gy.is_declared_monotone();
    Modulus::from_step(monotone, move |n, _| Ok(gx.eval(n + 1)?.max(gy.eval(n + 1)?)))
}

/// Modulus for a scaled sequence: `h(n) = g(n + k)` with `k` the least
/// exponent satisfying `2^k > |lambda|`.
///
/// Soundness: `|lambda| * 2^-(n+k) < 2^k * 2^-(n+k) = 2^-n`.
pub fn scale_modulus(g: &Modulus, lambda: &Rational) -> Modulus {
    let k = scale_exponent(lambda);
    let g = g.clone();
    let monotone = g.is_declared_monotone();
    Modulus::from_step(monotone, move |n, _| g.eval(n + k))
}

/// Least `k` with `2^k > |lambda|`.
pub fn scale_exponent(lambda: &Rational) -> u64 {
    let target = lambda.abs();
    let mut k = 0u64;
    while pow2(k as i64) <= target {
        k += 1;
    }
    k
}

/// Given `f`, a modulus for the distance between two sequences tending to
/// 0, and `g`, a modulus for the first sequence's increments, returns a
/// modulus for the second sequence's increments:
/// `h(n) = max(f(n+2), g(n+2))`.
///
/// Soundness: the second sequence's increment at `m` is at most the
/// distance at `m`, plus the first's increment at `m`, plus the distance at
/// `m+1`; three terms of at most `2^-(n+2)` stay below `2^-n`.
pub fn close_transfer_modulus(f: &Modulus, g: &Modulus) -> Modulus {
    let (f, g) = (f.clone(), g.clone());
    let monotone = f.is_declared_monotone() && g.is_declared_monotone();
    Modulus::from_step(monotone, move |n, _| Ok(f.eval(n + 2)?.max(g.eval(n + 2)?)))
}

/// For a nondecreasing sequence whose increments along the index map `s`
/// have modulus `g`, returns the composed modulus `h(n) = s(g(n))` for the
/// plain consecutive increments.
///
/// `s` must tend to infinity; as desk-scale evidence the map is required to
/// reach `validation_horizon` somewhere on `0..=validation_horizon`, else
/// [`Error::UnboundednessUnverified`] is reported.
///
/// Soundness: past `s(g(n))` every consecutive increment sits inside some
/// `s`-block whose total increment is already below `2^-n`, and increments
/// of a nondecreasing sequence are nonnegative.
pub fn monotone_step_modulus(
    s: &Modulus,
    g: &Modulus,
    validation_horizon: u64,
) -> Result<Modulus> {
    let mut reached = false;
    for n in 0..=validation_horizon {
        if s.eval(n)? >= validation_horizon {
            reached = true;
            break;
        }
    }
    if !reached {
        return Err(Error::UnboundednessUnverified {
            horizon: validation_horizon,
        });
    }
    let (s, g) = (s.clone(), g.clone());
    let monotone = s.is_declared_monotone() && g.is_declared_monotone();
    Ok(Modulus::from_step(monotone, move |n, _| s.eval(g.eval(n)?)))
}

/// Recovers a strictly increasing convergence modulus for a nondecreasing
/// real sequence presented as a grid, given a rational sequence `b` with
/// `|b_n - limit| <= 2^-(n+2)`.
///
/// Writing `d_m` for the grid entry at `(m, m+2)`, the modulus is the
/// minimal strictly increasing search
/// `g(n) = least m > g(n-1) with |d_m - b_m| <= 2^-(n+2)`.
///
/// Soundness: at `m = g(n)` the row value is within `2^-(m+2)` of `d_m`,
/// `d_m` is within `2^-(n+2)` of `b_m`, and `b_m` is within `2^-(m+2)` of
/// the limit; `m >= n` makes the sum at most `3 * 2^-(n+2) < 2^-n`, and for
/// a nondecreasing sequence later terms stay at least as close.
pub fn modulus_from_limit(a: &RealGrid, b: &Sequence, search_horizon: u64) -> Modulus {
    let (a, b) = (a.clone(), b.clone());
    Modulus::from_step(true, move |n, prev| {
        let start = prev.map_or(0, |p| p + 1);
        let tol = pow2(-(n as i64 + 2));
        for m in start..start.saturating_add(search_horizon) {
            let d = a.entry(m, m + 2)?;
            if (&d - &b.eval(m)?).abs() <= tol {
                return Ok(m);
            }
        }
        Err(Error::HorizonExceeded {
            horizon: search_horizon,
            context: format!("limit-modulus search at level {n}"),
        })
    })
}

/// Strictly increasing minorant of a nondecreasing real sequence presented
/// as a grid: `a_n = entry(n, n+3) - 5 * 2^-(n+3)`.
///
/// The offset keeps `a_n` strictly below row `n`'s value (by at least
/// `2^-(n+1)` and at most `3 * 2^-(n+2)`), and successive offsets shrink
/// fast enough that the minorant increases strictly even where the rows
/// plateau.
pub fn strictify(x: &RealGrid) -> Sequence {
    let x = x.clone();
    Sequence::try_from_fn(move |n| {
        let five = Rational::from_integer(5.into());
        Ok(x.entry(n, n + 3)? - five * pow2(-(n as i64 + 3)))
    })
}

struct OvertakeState {
    s: Vec<u64>,
    t: Vec<u64>,
}

/// Interleaves two strictly increasing rational sequences: returns probes
/// `(s, t)` with `a[s(n)] < c[t(n)] < a[s(n+1)]` for every sampled `n`,
/// built by the minimal alternating search
/// `s(0) = 0`, `t(n) = least k > t(n-1) with c_k > a[s(n)]`,
/// `s(n+1) = least k > s(n) with a_k > c[t(n)]`.
///
/// Searches are lazy; a stalled one reports
/// [`Error::HorizonExceeded`](crate::Error::HorizonExceeded) at evaluation
/// time.
pub fn overtake(a: &Sequence, c: &Sequence, search_horizon: u64) -> (Probe, Probe) {
    let state = Arc::new(Mutex::new(OvertakeState {
        s: vec![],
        t: vec![],
    }));
    let (a, c) = (a.clone(), c.clone());

    // Targets are fill lengths. The alternating order s(0), t(0), s(1),
    // t(1), ... satisfies each entry's dependency on the previous one of the
    // other probe.
    let ensure = move |state: &Mutex<OvertakeState>, s_len: u64, t_len: u64| -> Result<()> {
        let mut st = state.lock().unwrap();
        while (st.s.len() as u64) < s_len || (st.t.len() as u64) < t_len {
            if st.s.len() == st.t.len() {
                // next s entry
                let n = st.s.len();
                if n == 0 {
                    st.s.push(0);
                    continue;
                }
                let bar = c.eval(st.t[n - 1])?;
                let from = st.s[n - 1] + 1;
                let found = search_above(&a, &bar, from, search_horizon, "overtake s")?;
                st.s.push(found);
            } else {
                // next t entry
                let n = st.t.len();
                let bar = a.eval(st.s[n])?;
                let from = if n == 0 { 0 } else { st.t[n - 1] + 1 };
                let found = search_above(&c, &bar, from, search_horizon, "overtake t")?;
                st.t.push(found);
            }
        }
        Ok(())
    };

    let ensure = Arc::new(ensure);
    let (st1, en1) = (state.clone(), ensure.clone());
    let s_probe = Probe::from_step(Some("overtake-s"), move |n, _| {
        en1(&st1, n + 1, 0)?;
        Ok(st1.lock().unwrap().s[n as usize])
    });
    let t_probe = Probe::from_step(Some("overtake-t"), move |n, _| {
        ensure(&state, 0, n + 1)?;
        Ok(state.lock().unwrap().t[n as usize])
    });
    (s_probe, t_probe)
}

fn search_above(
    x: &Sequence,
    bar: &Rational,
    from: u64,
    horizon: u64,
    context: &str,
) -> Result<u64> {
    for k in from..from.saturating_add(horizon) {
        if x.eval(k)? > *bar {
            return Ok(k);
        }
    }
    Err(Error::HorizonExceeded {
        horizon,
        context: context.to_string(),
    })
}

/// Minimal strictly increasing probe along which two sequences agree to
/// `2^-n`: `s(n) = least k > s(n-1) with |a_k - b_k| <= 2^-n` (the search
/// at level 0 starts at `k = 0`).
pub fn synchronize(a: &Sequence, b: &Sequence, search_horizon: u64) -> Probe {
    let (a, b) = (a.clone(), b.clone());
    Probe::from_step(Some("synchronize"), move |n, prev| {
        let start = prev.map_or(0, |p| p + 1);
        let tol = pow2(-(n as i64));
        for k in start..start.saturating_add(search_horizon) {
            if (&a.eval(k)? - &b.eval(k)?).abs() <= tol {
                return Ok(k);
            }
        }
        Err(Error::HorizonExceeded {
            horizon: search_horizon,
            context: format!("synchronize at level {n}"),
        })
    })
}

/// Composition `n -> s(r(n))`; strictly increasing because both factors
/// are.
pub fn probe_compose(s: &Probe, r: &Probe) -> Probe {
    let (s, r) = (s.clone(), r.clone());
    Probe::try_from_fn(move |n| s.eval(r.eval(n)?))
}
