//! Core library for the green bin packing problem (GBP).
//!
//! GBP is online bin packing with a two-tier cost model: every bin has unit
//! capacity, of which the first `G` units (the *green* region) are free once
//! the bin is open, while usage above `G` (the *black* region) is charged at a
//! linear rate `beta`. The cost of a packing with bin levels `L_j` is
//!
//! ```text
//! N + sum_j beta * max(0, L_j - G)
//! ```
//!
//! where `N` is the number of opened bins.
//!
//! The crate provides:
//!
//! - the cost model and an offline-optimum lower bound ([`cost`]),
//! - packing representation and validation ([`instance`]),
//! - online packing engines with a capacity threshold ([`algorithms`]),
//! - closed-form competitive-ratio bound evaluators ([`bounds`]),
//! - worst-case input generators with known offline costs ([`adversary`]),
//! - an exact small-instance solver and an approximation scheme ([`offline`]),
//! - seeded random instance sources ([`sample`]).
//!
//! Everything here is pure computation over `f64`; file formats, CSV/SVG
//! output, and the command-line interface live in the companion `gbp-cli`
//! crate. The library is `no_std`-compatible (with `alloc`) when built
//! without the default `std` feature.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod adversary;
pub mod algorithms;
pub mod bounds;
pub mod cost;
pub mod instance;
pub mod offline;
pub mod sample;

mod error;
mod math;

pub use error::{Error, Result};

pub use algorithms::{harmonic_class, pack, AlgorithmKind, ThresholdPolicy};
pub use cost::{bin_cost, opt_lower_bound, CostParams, Regime, EPS_FIT};
pub use instance::{packing_cost, validate, Bin, Instance, Packing};
