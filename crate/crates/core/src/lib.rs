//! Exact computation of the generalized FKG functionals `E_n` on discretized
//! monotone functions, with the tools to check their identities and
//! inequalities by exhaustive and randomized search.
//!
//! * [`lattice`]: staircase sequences, cell sets, grid functions, rectangles.
//! * [`engine`]: `E_n` backends over subset-moment oracles, `κ_3`, closed forms.
//! * [`series`]: integer partitions, `z_λ`, truncated log/exp series and the
//!   prime-exponent extraction of `E_n` from a geometric mean.
//! * [`verify`]: positivity scans and proposition checkers with
//!   reproducible JSON/CSV reports.

pub mod engine;
mod error;
pub mod lattice;
pub mod rational;
pub mod series;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;
