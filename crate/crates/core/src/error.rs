use std::fmt;

use crate::numeric::Rational;

/// Domain errors shared by every module in the crate.
///
/// Display output always starts with the variant name so that callers (and
/// the command-line frontend) can name the failing condition verbatim.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A bounded search ran past its horizon without finding a witness.
    HorizonExceeded { horizon: u64, context: String },
    /// An index map declared to tend to infinity never exceeded the
    /// validation bound, so a modulus built from it would be unsound.
    UnboundednessUnverified { horizon: u64 },
    /// Assigning one more code word of the requested length would push the
    /// Kraft mass over 1. Reports the offending request index and the exact
    /// mass that would result.
    KraftOverflow { index: u64, mass: Rational },
    /// Weight streams must be strictly positive.
    WeightNotPositive { index: u64 },
    /// A weight stream's partial sums exceeded 1, so no prefix-free code can
    /// carry it.
    MassExceeded { index: u64, mass: Rational },
    /// A comparison against the rational with this code could not be decided
    /// within the refinement budget; the two sides are plausibly equal.
    TieUndecidable { code: u64 },
    /// No refinement step witnessed the value away from zero within the
    /// budget, so no reciprocal modulus can be derived.
    ZeroWitnessNotFound { budget: u64 },
    /// Sign determination failed at the midpoint and at both trisection
    /// points of the current bracket.
    SignUndecidable { budget: u64 },
    /// The witness supplied for labeling a ball landed inside the closed
    /// ball, so no side can be assigned.
    WitnessInsideBall { witness_index: u64, code: u64 },
    /// A caller-supplied modulus was falsified on the validation window:
    /// the sampled increment at index `m` exceeded the bound for level `n`.
    ModulusFalsified { m: u64, n: u64 },
    /// The sampled value is not within the decoding window of any
    /// level-bounded quaternary support, so no digit can be read off.
    SupportNotFound { index: u64, level: u64 },
    /// Rationals cannot carry a zero denominator.
    ZeroDenominator,
    /// Text that does not denote a rational.
    InvalidRational(String),
    /// Text that does not denote a bit string (characters other than 0/1).
    InvalidBitString(String),
    /// A bracket for root refinement must have endpoints of opposite sign.
    InvalidBracket(String),
    /// Square roots are only taken of nonnegative rationals.
    NegativeRadicand,
    /// A table-backed sequence was evaluated past its final entry.
    TableExhausted { index: u64, len: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::HorizonExceeded { horizon, context } => {
                write!(f, "HorizonExceeded: {context} passed index bound {horizon}")
            }
            Error::UnboundednessUnverified { horizon } => write!(
                f,
                "UnboundednessUnverified: index map stayed below {horizon} on the validation window"
            ),
            Error::KraftOverflow { index, mass } => write!(
                f,
                "KraftOverflow: request {index} would raise the Kraft mass to {mass}"
            ),
            Error::WeightNotPositive { index } => {
                write!(f, "WeightNotPositive: weight {index} is not strictly positive")
            }
            Error::MassExceeded { index, mass } => write!(
                f,
                "MassExceeded: weights through index {index} sum to {mass}, which exceeds 1"
            ),
            Error::TieUndecidable { code } => write!(
                f,
                "TieUndecidable({code}): comparison against the rational with code {code} \
                 did not separate within the refinement budget"
            ),
            Error::ZeroWitnessNotFound { budget } => write!(
                f,
                "ZeroWitnessNotFound: no refinement within budget {budget} excluded zero"
            ),
            Error::SignUndecidable { budget } => write!(
                f,
                "SignUndecidable: no sign decision at the midpoint or trisection points \
                 within budget {budget}"
            ),
            Error::WitnessInsideBall { witness_index, code } => write!(
                f,
                "WitnessInsideBall: witness at index {witness_index} lies inside closed ball {code}"
            ),
            Error::ModulusFalsified { m, n } => write!(
                f,
                "ModulusFalsified: sampled increment at index {m} exceeds the level-{n} bound"
            ),
            Error::SupportNotFound { index, level } => write!(
                f,
                "SupportNotFound: value at index {index} is not within the level-{level} window of any quaternary support"
            ),
            Error::ZeroDenominator => write!(f, "ZeroDenominator: rational with denominator 0"),
            Error::InvalidRational(s) => write!(f, "InvalidRational: {s:?}"),
            Error::InvalidBitString(s) => write!(f, "InvalidBitString: {s:?}"),
            Error::InvalidBracket(s) => write!(f, "InvalidBracket: {s}"),
            Error::NegativeRadicand => {
                write!(f, "NegativeRadicand: square root of a negative rational")
            }
            Error::TableExhausted { index, len } => write!(
                f,
                "TableExhausted: index {index} is past the end of a {len}-entry table"
            ),
        }
    }
}

impl std::error::Error for Error {}
