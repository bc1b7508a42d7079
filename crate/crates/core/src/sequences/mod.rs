//! Lazy, memoized evaluators for rational sequences, moduli, and strictly
//! increasing index probes, plus the derived views built from them.
//!
//! All evaluators are immutable after construction and safe to evaluate
//! concurrently: sequence memo updates are idempotent inserts performed
//! outside the lock, while modulus and probe tables fill strictly in index
//! order under their lock. The in-order fill is a deliberate contract —
//! stateful generators (bounded searches that resume where the previous
//! index left off) receive the previously computed value and are invoked at
//! most once per index.
//!
//! Finite checks never certify a modulus; every claim verified through the
//! harness is "no counterexample below the horizon". The evaluators here
//! only guarantee the structural invariants that are checkable pointwise:
//! probes are strictly increasing on every sampled window, and a modulus
//! declared monotone is verified nondecreasing as it fills.

mod ops;

pub use ops::{
    cauchy_from_convergence, close_transfer_modulus, modulus_from_limit, monotone_step_modulus,
    monotonize, overtake, probe_compose, scale_modulus, strict_monotonize, strictify, sum_modulus,
    synchronize,
};

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::Signed;

use crate::numeric::{pair, pow2, Rational};
use crate::{Error, Result};

type SeqGen = dyn Fn(u64) -> Result<Rational> + Send + Sync;
type StepGen = dyn Fn(u64, Option<u64>) -> Result<u64> + Send + Sync;

/// A total map from naturals to rationals, evaluated lazily and memoized.
///
/// Generators must be pure: re-evaluation at the same index must produce
/// the same value (the memo makes this observable).
#[derive(Clone)]
pub struct Sequence {
    inner: Arc<SeqInner>,
}

struct SeqInner {
    gen: Box<SeqGen>,
    memo: Mutex<HashMap<u64, Rational>>,
}

impl Sequence {
    /// Wraps a fallible generator. Errors are not memoized; a failed index
    /// is recomputed on the next request.
    pub fn try_from_fn(
        gen: impl Fn(u64) -> Result<Rational> + Send + Sync + 'static,
    ) -> Self {
        Sequence {
            inner: Arc::new(SeqInner {
                gen: Box::new(gen),
                memo: Mutex::new(HashMap::new()),
            }),
        }
    }

    /// Wraps an infallible generator.
    pub fn from_fn(gen: impl Fn(u64) -> Rational + Send + Sync + 'static) -> Self {
        Self::try_from_fn(move |n| Ok(gen(n)))
    }

    /// `x_n = n`.
    pub fn naturals() -> Self {
        Self::from_fn(|n| Rational::from_integer(n.into()))
    }

    /// The constant sequence.
    pub fn constant(value: Rational) -> Self {
        Self::from_fn(move |_| value.clone())
    }

    /// `x_n = ratio^n`.
    pub fn geometric(ratio: Rational) -> Self {
        Self::from_fn(move |n| {
            let e = i32::try_from(n).expect("geometric exponent exceeds i32");
            ratio.pow(e)
        })
    }

    /// `x_n = 1 - ratio^n`, nondecreasing toward 1 for `0 < ratio < 1`.
    pub fn one_minus_geometric(ratio: Rational) -> Self {
        let g = Self::geometric(ratio);
        Self::try_from_fn(move |n| Ok(Rational::from_integer(1.into()) - g.eval(n)?))
    }

    /// `x_n = offset + slope * n`.
    pub fn affine(offset: Rational, slope: Rational) -> Self {
        Self::from_fn(move |n| &offset + &slope * Rational::from_integer(n.into()))
    }

    /// A finite table; evaluation past the end reports
    /// [`Error::TableExhausted`].
    pub fn from_table(values: Vec<Rational>) -> Self {
        let len = values.len() as u64;
        Self::try_from_fn(move |n| {
            values
                .get(usize::try_from(n).unwrap_or(usize::MAX))
                .cloned()
                .ok_or(Error::TableExhausted { index: n, len })
        })
    }

    /// Evaluates the sequence at `n`, memoizing the result. The generator
    /// runs outside the memo lock, so generators may evaluate other
    /// sequences (including this one, recursively) without deadlocking.
    pub fn eval(&self, n: u64) -> Result<Rational> {
        if let Some(v) = self.inner.memo.lock().unwrap().get(&n) {
            return Ok(v.clone());
        }
        let v = (self.inner.gen)(n)?;
        self.inner
            .memo
            .lock()
            .unwrap()
            .entry(n)
            .or_insert_with(|| v.clone());
        Ok(v)
    }
}

/// A total map from naturals to naturals, evaluated lazily in index order.
///
/// Used both for moduli of convergence (`m >= g(n)` forces the quantity at
/// `m` below `2^-n`) and for plain index maps. The `declared_monotone` flag
/// is a promise checked as the table fills: a declared-monotone modulus
/// that decreases panics, since that is a construction bug rather than a
/// runtime condition.
#[derive(Clone)]
pub struct Modulus {
    inner: Arc<ModInner>,
}

struct ModInner {
    gen: Box<StepGen>,
    declared_monotone: bool,
    memo: Mutex<Vec<u64>>,
}

impl Modulus {
    /// Wraps a stateful step generator. The generator is invoked at most
    /// once per index, strictly in index order, and receives the value at
    /// the previous index. It runs under the table lock, so it must not
    /// evaluate this same modulus recursively (other evaluators are fine).
    pub fn from_step(
        declared_monotone: bool,
        gen: impl Fn(u64, Option<u64>) -> Result<u64> + Send + Sync + 'static,
    ) -> Self {
        Modulus {
            inner: Arc::new(ModInner {
                gen: Box::new(gen),
                declared_monotone,
                memo: Mutex::new(Vec::new()),
            }),
        }
    }

    /// Wraps a pure formula, not declared monotone.
    pub fn from_fn(gen: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Self::from_step(false, move |n, _| Ok(gen(n)))
    }

    /// Wraps a pure formula the caller promises is nondecreasing.
    pub fn from_fn_monotone(gen: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Self::from_step(true, move |n, _| Ok(gen(n)))
    }

    /// `g(n) = n`.
    pub fn identity() -> Self {
        Self::from_fn_monotone(|n| n)
    }

    /// `g(n) = k`.
    pub fn constant(k: u64) -> Self {
        Self::from_fn_monotone(move |_| k)
    }

    /// `g(n) = n + k`.
    pub fn shift(k: u64) -> Self {
        Self::from_fn_monotone(move |n| n + k)
    }

    /// `g(n) = offset + slope * n`.
    pub fn affine(offset: u64, slope: u64) -> Self {
        Self::from_fn_monotone(move |n| offset + slope * n)
    }

    pub fn is_declared_monotone(&self) -> bool {
        self.inner.declared_monotone
    }

    /// Evaluates at `n`, filling the table up to `n` in order.
    pub fn eval(&self, n: u64) -> Result<u64> {
        let mut memo = self.inner.memo.lock().unwrap();
        while (memo.len() as u64) <= n {
            let k = memo.len() as u64;
            let prev = memo.last().copied();
            let v = (self.inner.gen)(k, prev)?;
            if self.inner.declared_monotone {
                if let Some(p) = prev {
                    assert!(
                        v >= p,
                        "modulus declared monotone decreased: g({}) = {} < g({}) = {}",
                        k,
                        v,
                        k - 1,
                        p
                    );
                }
            }
            memo.push(v);
        }
        Ok(memo[n as usize])
    }
}

/// A strictly increasing map from naturals to naturals, used to pick
/// subsequences. Strictness is enforced on every sampled window as the
/// table fills; a violating generator panics.
#[derive(Clone)]
pub struct Probe {
    inner: Arc<ProbeInner>,
}

struct ProbeInner {
    gen: Box<StepGen>,
    name: Option<String>,
    memo: Mutex<Vec<u64>>,
}

impl Probe {
    /// Wraps a stateful step generator; same in-order, once-per-index
    /// contract as [`Modulus::from_step`].
    pub fn from_step(
        name: Option<&str>,
        gen: impl Fn(u64, Option<u64>) -> Result<u64> + Send + Sync + 'static,
    ) -> Self {
        Probe {
            inner: Arc::new(ProbeInner {
                gen: Box::new(gen),
                name: name.map(str::to_string),
                memo: Mutex::new(Vec::new()),
            }),
        }
    }

    /// Wraps a fallible pure map.
    pub fn try_from_fn(gen: impl Fn(u64) -> Result<u64> + Send + Sync + 'static) -> Self {
        Self::from_step(None, move |n, _| gen(n))
    }

    /// Wraps an infallible pure map.
    pub fn from_fn(gen: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Self::from_step(None, move |n, _| Ok(gen(n)))
    }

    /// Like [`Probe::from_fn`], carrying a display name.
    pub fn from_fn_named(name: &str, gen: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Self::from_step(Some(name), move |n, _| Ok(gen(n)))
    }

    /// `r(n) = n`.
    pub fn identity() -> Self {
        Self::from_fn_named("identity", |n| n)
    }

    /// `r(n) = 2n`.
    pub fn doubling() -> Self {
        Self::from_fn_named("doubling", |n| 2 * n)
    }

    /// `r(n) = n^2` (strictly increasing from 0, since consecutive squares
    /// differ).
    pub fn squares() -> Self {
        Self::from_fn_named("squares", |n| n * n)
    }

    /// `r(n) = n(n+1)/2`.
    pub fn triangular() -> Self {
        Self::from_fn_named("triangular", |n| n * (n + 1) / 2)
    }

    /// `r(n) = offset + slope * n`; requires `slope >= 1`.
    pub fn affine(offset: u64, slope: u64) -> Self {
        assert!(slope >= 1, "affine probe needs slope >= 1 to increase strictly");
        Self::from_fn(move |n| offset + slope * n)
    }

    /// `r(n) = n + k`.
    pub fn shift(k: u64) -> Self {
        Self::from_fn(move |n| n + k)
    }

    pub fn name(&self) -> Option<&str> {
        self.inner.name.as_deref()
    }

    /// Evaluates at `n`, filling the table in order and checking strict
    /// increase along the way.
    pub fn eval(&self, n: u64) -> Result<u64> {
        let mut memo = self.inner.memo.lock().unwrap();
        while (memo.len() as u64) <= n {
            let k = memo.len() as u64;
            let prev = memo.last().copied();
            let v = (self.inner.gen)(k, prev)?;
            if let Some(p) = prev {
                assert!(
                    v > p,
                    "probe{} is not strictly increasing: r({}) = {} <= r({}) = {}",
                    self.inner.name.as_deref().map(|s| format!(" {s:?}")).unwrap_or_default(),
                    k,
                    v,
                    k - 1,
                    p
                );
            }
            memo.push(v);
        }
        Ok(memo[n as usize])
    }
}

/// A rational grid over paired indices: `entry(n, k)` approximates the
/// `n`-th term of an underlying real sequence within `2^-k`.
#[derive(Clone)]
pub struct RealGrid {
    grid: Sequence,
}

impl RealGrid {
    /// Wraps a sequence over paired indices; `grid.eval(pair(n, k))` is the
    /// `(n, k)` entry.
    pub fn new(grid: Sequence) -> Self {
        RealGrid { grid }
    }

    /// Grid from an entry function of both coordinates.
    pub fn from_entry_fn(f: impl Fn(u64, u64) -> Rational + Send + Sync + 'static) -> Self {
        Self::new(Sequence::from_fn(move |code| {
            let (n, k) = crate::numeric::unpair(code);
            f(n, k)
        }))
    }

    /// Exact grid: every approximation column equals the row value itself.
    pub fn exact(f: impl Fn(u64) -> Rational + Send + Sync + 'static) -> Self {
        Self::from_entry_fn(move |n, _| f(n))
    }

    /// The `(n, k)` entry, within `2^-k` of row `n`'s value.
    pub fn entry(&self, n: u64, k: u64) -> Result<Rational> {
        self.grid.eval(pair(n, k))
    }

    /// The underlying paired-index sequence.
    pub fn as_sequence(&self) -> &Sequence {
        &self.grid
    }
}

/// A real number carried constructively: an approximating sequence plus a
/// Cauchy modulus. For all `l, m >= modulus(n)` the approximants at `l` and
/// `m` are within `2^-n` of each other, so the approximant at `modulus(n)`
/// is within `2^-n` of the limit.
#[derive(Clone)]
pub struct CauchyReal {
    approximant: Sequence,
    modulus: Modulus,
}

impl CauchyReal {
    pub fn new(approximant: Sequence, modulus: Modulus) -> Self {
        CauchyReal { approximant, modulus }
    }

    /// A rational as a constant sequence with the zero modulus.
    pub fn from_rational(q: Rational) -> Self {
        CauchyReal {
            approximant: Sequence::constant(q),
            modulus: Modulus::constant(0),
        }
    }

    pub fn approximant(&self) -> &Sequence {
        &self.approximant
    }

    pub fn modulus(&self) -> &Modulus {
        &self.modulus
    }

    /// A rational within `2^-n` of the value.
    pub fn refine(&self, n: u64) -> Result<Rational> {
        self.approximant.eval(self.modulus.eval(n)?)
    }

    /// Decides the order between this value and a rational by refining until
    /// the interval around the approximant excludes `q`. Returns `true` when
    /// the value is strictly below `q`, `false` when strictly above. If no
    /// refinement up to `budget` separates them, the tie is reported through
    /// `on_tie`.
    pub fn lt_rational(&self, q: &Rational, budget: u64, on_tie: Error) -> Result<bool> {
        for k in 0..=budget {
            let approx = self.refine(k)?;
            let tol = pow2(-(k as i64));
            let diff = &approx - q;
            if diff.abs() > tol {
                return Ok(diff.is_negative());
            }
        }
        Err(on_tie)
    }

    /// Refines until the interval excludes zero; returns the exponent `k`
    /// of the first window `[approx - 2^-k, approx + 2^-k]` lying entirely
    /// on one side of zero together with the approximant's sign.
    pub fn sign_witness(&self, budget: u64) -> Result<(u64, bool)> {
        for k in 0..=budget {
            let approx = self.refine(k)?;
            if approx.abs() > pow2(-(k as i64)) {
                return Ok((k, approx.is_positive()));
            }
        }
        Err(Error::ZeroWitnessNotFound { budget })
    }
}
