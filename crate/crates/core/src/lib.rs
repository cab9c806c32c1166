//! High-precision evaluation and verification of Kummer-type hypergeometric
//! series identities.
//!
//! The crate is organized in five layers, each usable on its own:
//!
//! * [`scalar`] — complex arithmetic at a configurable decimal precision,
//!   plus the [`scalar::PrecisionContext`] that carries truncation and
//!   tolerance policy through every evaluation.
//! * [`gamma`] — gamma, reciprocal gamma, Pochhammer symbols, binomial
//!   coefficients and pole-safe gamma-ratio limits.
//! * [`series`] — generic truncated pFq summation with tail control and
//!   terminating-series detection.
//! * [`theorems`] — closed forms for the classical Kummer summation theorem
//!   and its contiguous generalizations, in as-printed and corrected modes.
//! * [`engine`] — the double-series identity families T21–T24, their
//!   corollaries and the Bailey product checks, with verification reports.
//!
//! The core is `no_std`-compatible (with `alloc`); everything IO-related
//! lives in the companion CLI crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod engine;
pub mod error;
pub mod gamma;
pub mod scalar;
pub mod series;
pub mod theorems;

pub use error::Error;
pub use scalar::{PrecisionContext, Scalar, Workspace};

// The scalar backend's number type appears in public signatures
// (tail estimates, rendered constants); re-export it so downstream code
// names the same version.
pub use astro_float_num::{BigFloat, RoundingMode};

/// Result alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;
