// SPDX-License-Identifier: Apache-2.0

//! Exact census of imaginary multiquadratic number fields whose class number
//! divides a power of two.
//!
//! The crate is organised bottom-up:
//!
//! - [`radicand`]: squarefree radicands, complete radicand lists and field records.
//! - [`quadratic`]: class numbers of quadratic fields (reduced-form sieve for the
//!   imaginary census, cycle counting for real fields) and fundamental units.
//! - [`biquadratic`]: the two-stage candidate filter and Kuroda's formula for
//!   imaginary biquadratic fields.
//! - [`multiquad`]: vetting and segment execution for degree `2^n`, `n >= 3`.
//! - [`degree_bound`]: the lower bound on the class-number exponent by degree.
//! - [`oracle`]: pluggable class-number providers for fields of degree 8 and up.
//! - [`fixtures`] and [`verify`]: published tables and entry-level diffs.
//!
//! Data-parallel loops go through [`par::Exec`]; with the `parallel` feature
//! disabled every loop runs sequentially.

pub mod arith;
pub mod biquadratic;
pub mod degree_bound;
mod error;
pub mod fieldio;
pub mod fixtures;
pub mod multiquad;
pub mod oracle;
pub mod par;
pub mod quadratic;
pub mod radicand;
pub mod verify;

pub use error::{Error, Result};
pub use radicand::{FieldKey, FieldRec, Radicand, RadicandList};
