//! Increment compression. The operator reshapes an increasing unbounded
//! sequence so that, sampled along a chosen probe, its increments decay
//! like `2^-n` — witnessed by an explicit modulus — while the reshaped
//! sequence still eventually clears `threshold + n` for every level `n`,
//! so it remains unbounded. Stacking the operator over several probes
//! yields a single strictly increasing, unbounded (hence non-Cauchy)
//! sequence that nevertheless carries a valid decay modulus along every
//! probe in the stack.
//!
//! Levels are exponentially long (level `n` spans about `2^n` blocks), so
//! the engine stores state only at probe points and answers pointwise
//! queries by interpolating inside the bracketing block; nothing the size
//! of the probe's range is ever materialized.

use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::One;

use crate::error::Error;
use crate::numeric::{pow2, Rational};
use crate::sequences::{Modulus, Probe, Sequence};
use crate::Result;

/// Shared lazy state: everything discovered so far about one compression.
struct Engine {
    a: Sequence,
    probe: Probe,
    threshold: u64,
    search_horizon: u64,
    state: Mutex<State>,
}

struct State {
    /// Level boundaries discovered so far; `boundaries[n]` is the block
    /// index at which level `n` begins. Strictly increasing.
    boundaries: Vec<u64>,
    /// Output values at probe points: `at_probe[i]` is the compressed
    /// value at index `probe(i)`. Filled in block order.
    at_probe: Vec<Rational>,
    /// Mass accumulated inside the currently open level.
    mass: Rational,
    /// Input sample at the last filled probe point — the next block's left
    /// endpoint, carried over so each sample is pulled from the input once.
    prev_sample: Option<Rational>,
    /// The increment cap `2^-level` of the currently open level.
    cap: Rational,
}

impl Engine {
    fn a_at_probe(&self, i: u64) -> Result<Rational> {
        self.a.eval(self.probe.eval(i)?)
    }

    /// Locates the first level boundary: the least probe index whose
    /// sampled value reaches the threshold. Values up to that point pass
    /// through unchanged, so their outputs are recorded as-is.
    fn ensure_init(&self, st: &mut State) -> Result<()> {
        if !st.boundaries.is_empty() {
            return Ok(());
        }
        let goal = Rational::from(BigInt::from(self.threshold));
        // resume after a failed scan instead of re-pushing sampled values
        let start = st.at_probe.len() as u64;
        for k in start..=self.search_horizon {
            let v = self.a_at_probe(k)?;
            if v >= goal {
                st.prev_sample = Some(v.clone());
                st.at_probe.push(v);
                st.boundaries.push(k);
                return Ok(());
            }
            st.at_probe.push(v);
        }
        Err(Error::HorizonExceeded {
            horizon: self.search_horizon,
            context: format!("no probed value reached threshold {}", self.threshold),
        })
    }

    /// Processes the next block: extends the output by the capped
    /// increment and closes the current level once its mass reaches 1.
    fn advance_block(&self, st: &mut State) -> Result<()> {
        self.ensure_init(st)?;
        let i = st.at_probe.len() as u64 - 1;
        let level = st.boundaries.len() as u64 - 1;
        if i - st.boundaries[level as usize] > self.search_horizon {
            return Err(Error::HorizonExceeded {
                horizon: self.search_horizon,
                context: format!("level {level} accumulated mass below 1"),
            });
        }
        let left = match st.prev_sample.take() {
            Some(v) => v,
            None => self.a_at_probe(i)?,
        };
        let right = self.a_at_probe(i + 1)?;
        let gap = &right - &left;
        st.prev_sample = Some(right);
        // a tie takes the plain increment, exactly like the capped-minimum
        // formulation
        let term = if gap > st.cap { &st.cap } else { &gap };
        let next = &st.at_probe[i as usize] + term;
        st.mass += term;
        st.at_probe.push(next);
        // mass >= 1 exactly when the numerator covers the denominator
        if st.mass.numer() >= st.mass.denom() {
            st.boundaries.push(i + 1);
            st.mass = Rational::from(BigInt::from(0));
            st.cap = pow2(1 - st.boundaries.len() as i64);
        }
        Ok(())
    }

    fn boundary(&self, n: u64) -> Result<u64> {
        let mut st = self.state.lock().expect("compression state poisoned");
        self.ensure_init(&mut st)?;
        while (st.boundaries.len() as u64) <= n {
            self.advance_block(&mut st)?;
        }
        Ok(st.boundaries[n as usize])
    }

    fn value_at_probe(&self, i: u64) -> Result<Rational> {
        let mut st = self.state.lock().expect("compression state poisoned");
        self.ensure_init(&mut st)?;
        while (st.at_probe.len() as u64) <= i {
            self.advance_block(&mut st)?;
        }
        Ok(st.at_probe[i as usize].clone())
    }

    /// The compressed value at an arbitrary index: below the first
    /// boundary's probe point the input passes through; inside a block the
    /// input's local increment is rescaled by the block's factor.
    fn value(&self, j: u64) -> Result<Rational> {
        let mut st = self.state.lock().expect("compression state poisoned");
        self.ensure_init(&mut st)?;
        if j <= self.probe.eval(st.boundaries[0])? {
            return self.a.eval(j);
        }
        // extend until the last filled probe point is at or beyond j
        while self.probe.eval(st.at_probe.len() as u64 - 1)? < j {
            self.advance_block(&mut st)?;
        }
        // bracketing block: the largest i with probe(i) < j
        let mut lo = st.boundaries[0];
        let mut hi = st.at_probe.len() as u64 - 1;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.probe.eval(mid)? < j {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let i = lo;
        // every processed block has its level settled, because a boundary
        // is appended the moment the block closing it is processed
        let level = st.boundaries.partition_point(|&b| b <= i) as u64 - 1;
        let cap = pow2(-(level as i64));
        let left = self.a_at_probe(i)?;
        let gap = self.a_at_probe(i + 1)? - &left;
        let local = self.a.eval(j)? - left;
        let scaled = if gap <= cap { local } else { local * cap / gap };
        Ok(&st.at_probe[i as usize] + scaled)
    }
}

/// One application of the compression operator, evaluated lazily. The
/// compressed sequence and its modulus share the engine, so forcing either
/// one advances both.
pub struct Compression {
    engine: Arc<Engine>,
}

impl Compression {
    /// Sets up the operator; no search happens until a value or boundary
    /// is requested. `search_horizon` bounds every internal search (the
    /// threshold scan and each level's mass accumulation), turning a
    /// stalled input into [`Error::HorizonExceeded`] instead of a hang.
    pub fn new(a: Sequence, threshold: u64, probe: Probe, search_horizon: u64) -> Self {
        Compression {
            engine: Arc::new(Engine {
                a,
                probe,
                threshold,
                search_horizon,
                state: Mutex::new(State {
                    boundaries: Vec::new(),
                    at_probe: Vec::new(),
                    mass: Rational::from(BigInt::from(0)),
                    prev_sample: None,
                    cap: Rational::one(),
                }),
            }),
        }
    }

    /// The reshaped sequence.
    pub fn compressed(&self) -> Sequence {
        let engine = Arc::clone(&self.engine);
        Sequence::try_from_fn(move |j| engine.value(j))
    }

    /// The decay modulus: from block `boundary(n)` onward, probe-sampled
    /// increments of the compressed sequence are at most `2^-n`.
    pub fn modulus(&self) -> Modulus {
        let engine = Arc::clone(&self.engine);
        Modulus::from_step(true, move |n, _| engine.boundary(n))
    }

    /// The block index at which level `n` begins; identical to evaluating
    /// the modulus.
    pub fn boundary(&self, n: u64) -> Result<u64> {
        self.engine.boundary(n)
    }

    /// The compressed value at probe point `i`, without materializing any
    /// of the (possibly astronomically many) indices below `probe(i)`.
    pub fn value_at_probe(&self, i: u64) -> Result<Rational> {
        self.engine.value_at_probe(i)
    }

    pub fn probe(&self) -> &Probe {
        &self.engine.probe
    }

    pub fn threshold(&self) -> u64 {
        self.engine.threshold
    }
}

/// The staged diagonal: compressions applied in sequence, one per probe.
pub struct Diagonal {
    stages: Vec<Compression>,
    q: Sequence,
}

impl Diagonal {
    /// The final sequence: strictly increasing and unbounded, yet carrying
    /// a valid decay modulus along every probe in the stack.
    pub fn q(&self) -> &Sequence {
        &self.q
    }

    /// One compression per probe, in application order.
    pub fn stages(&self) -> &[Compression] {
        &self.stages
    }

    /// The modulus contributed by stage `i`. It is valid not only for that
    /// stage's output but for every later stage as well: subsequent
    /// compressions rescale increments by factors in `(0, 1]`, so they
    /// never widen a probe-sampled increment.
    pub fn modulus(&self, i: usize) -> Modulus {
        self.stages[i].modulus()
    }
}

/// Builds the diagonal over the natural numbers: stage `i` compresses the
/// previous stage's output along `probes[i]` with threshold `i + 1`, so
/// the final sequence still clears every natural number while defeating
/// Cauchy-ness (it is unbounded) and yet passing every per-probe modulus
/// check.
pub fn anti_cauchy(probes: Vec<Probe>, search_horizon: u64) -> Diagonal {
    let mut current = Sequence::naturals();
    let mut stages = Vec::with_capacity(probes.len());
    for (idx, probe) in probes.into_iter().enumerate() {
        let stage = Compression::new(current, idx as u64 + 1, probe, search_horizon);
        current = stage.compressed();
        stages.push(stage);
    }
    Diagonal { stages, q: current }
}
