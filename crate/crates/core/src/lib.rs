//! Exact rational machinery for sequences that converge without ever
//! revealing how fast.
//!
//! Everything here runs on arbitrary-precision rationals; no floating point
//! is used anywhere, so every comparison in the library and its test suite
//! is exact. The crate is organized around a small set of lazy, memoized
//! evaluators ([`Sequence`], [`Modulus`], [`Probe`]) and the operations that
//! combine them:
//!
//! * [`numeric`] — pairing of naturals, the canonical enumeration of the
//!   rationals, and rational ball codes.
//! * [`sequences`] — the evaluator types plus the modulus algebra: converting
//!   convergence moduli to Cauchy moduli, transferring moduli across sums,
//!   scalings, close pairs, and subsequences, and recovering moduli by
//!   bounded search.
//! * [`compression`] — the slope compressor: rescales a strictly increasing
//!   unbounded sequence so that designated subsequence increments shrink
//!   below any threshold while the sequence stays strictly increasing and
//!   unbounded, and the staged diagonal built on top of it.
//! * [`coding`] — online Kraft–Chaitin assignment of prefix-free code words
//!   with exact dyadic bookkeeping, weight-to-length conversion, and the
//!   windowed membership deciders.
//! * [`extraction`] — supports of quaternary digit expansions: recovering a
//!   finite support set from approximations of its digit sum, the indicator
//!   embedding, and the ball-labeling locator.
//! * [`field`] — arithmetic on modulus-carrying reals, polynomial
//!   evaluation, and sign-based root refinement.
//! * [`harness`] — the falsification side: exhaustive finite-window modulus
//!   checks, the brute-force minimal modulus oracle, and a Cauchy falsifier.
//!
//! A passing finite check never proves a modulus correct; it proves the
//! absence of a counterexample below the horizon. The harness is therefore
//! phrased entirely in terms of falsification, and all search loops take an
//! explicit horizon and fail loudly with [`Error::HorizonExceeded`] instead
//! of spinning.

pub mod coding;
pub mod compression;
mod error;
pub mod extraction;
pub mod field;
pub mod harness;
pub mod numeric;
pub mod sequences;

pub use error::Error;
pub use numeric::{ball, nu_q, nu_q_code, pair, pow2, unpair, BallCode, Rational};
pub use sequences::{CauchyReal, Modulus, Probe, RealGrid, Sequence};

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Default window for exhaustive modulus falsification.
pub const DEFAULT_CHECK_HORIZON: u64 = 128;

/// Default bound on index searches (overtaking, synchronization, block
/// scans). Searches that run past this bound report
/// [`Error::HorizonExceeded`] rather than looping.
pub const DEFAULT_SEARCH_HORIZON: u64 = 100_000;
