//! Pathwise quadratic variation analytics for càdlàg step paths.
//!
//! Everything operates on finitely sampled right-continuous step paths, so all
//! quantities — discrete quadratic variation along stopping-time partitions,
//! exact truncated variation, regularized companion paths, Riemann-sum and
//! Lebesgue–Stieltjes integrals — are finite sums computed exactly (up to
//! compensated floating-point accumulation). Limits along refining partition
//! ladders are reported as Cauchy diagnostics rather than quadrature guesses.
//!
//! See the `examples/` directory for one runnable walkthrough per capability.

pub mod cli;
pub mod error;
pub mod integrals;
pub mod numeric;
pub mod partitions;
pub mod paths;
pub mod quadvar;
pub mod truncvar;

pub use error::{PathError, Result};
pub use paths::SampledPath;
