use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::Violation;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Errors produced by the core library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// `beta` or `green` outside their domains (`beta >= 0`, `0 <= green <= 1`).
    InvalidCostParams { beta: f64, green: f64 },
    /// A bin level outside `[0, 1]`.
    InvalidLevel(f64),
    /// Negative total size passed to the optimum lower bound.
    NegativeTotalSize(f64),
    /// An item size outside `(0, 1]`.
    InvalidItemSize { index: usize, size: f64 },
    /// Threshold outside `[0, 1 - green]`.
    InvalidTau { tau: f64, green: f64 },
    /// A bound evaluator was called outside its `beta * green` regime.
    WrongRegime { expected: &'static str, beta: f64, green: f64 },
    /// A packing failed validation.
    InvalidPacking(Vec<Violation>),
    /// Harmonic class count below 2, or a size above the class capacity.
    InvalidHarmonic { what: &'static str },
    /// The exact solver refuses instances above its item cap.
    InstanceTooLarge { len: usize, cap: usize },
    /// The approximation scheme would enumerate too many bin types.
    EnumerationTooLarge { count: usize, cap: usize },
    /// An adversarial family rejected its parameters.
    InvalidFamily(String),
    /// The rejection sampler failed to produce a value in `(0, 1]`.
    SamplerStuck,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidCostParams { beta, green } => {
                write!(f, "invalid cost parameters: beta={beta}, green={green}")
            }
            Error::InvalidLevel(level) => write!(f, "bin level {level} outside [0, 1]"),
            Error::NegativeTotalSize(s) => write!(f, "negative total size {s}"),
            Error::InvalidItemSize { index, size } => {
                write!(f, "item {index} has size {size} outside (0, 1]")
            }
            Error::InvalidTau { tau, green } => {
                write!(f, "threshold {tau} outside [0, {}]", 1.0 - green)
            }
            Error::WrongRegime { expected, beta, green } => {
                write!(
                    f,
                    "formula requires {expected} but beta*green = {}",
                    beta * green
                )
            }
            Error::InvalidPacking(violations) => {
                write!(f, "invalid packing ({} violations)", violations.len())
            }
            Error::InvalidHarmonic { what } => write!(f, "invalid harmonic input: {what}"),
            Error::InstanceTooLarge { len, cap } => {
                write!(f, "instance has {len} items, exact solver cap is {cap}")
            }
            Error::EnumerationTooLarge { count, cap } => {
                write!(
                    f,
                    "bin-type enumeration needs {count} types, cap is {cap}; increase epsilon"
                )
            }
            Error::InvalidFamily(reason) => write!(f, "invalid adversary family: {reason}"),
            Error::SamplerStuck => write!(f, "rejection sampler exceeded its attempt budget"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
