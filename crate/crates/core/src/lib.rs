//! Natural densities of integers whose prime exponents obey a pattern.
//!
//! The densities are Euler products over primes. [`euler`] evaluates them
//! with rigorous truncation brackets, [`series`] computes the full
//! distribution of an additive exponent statistic, and [`empirical`] counts
//! the same sets directly with a segmented sieve so that every product can
//! be checked against an independent brute-force route.

pub mod cli;
pub mod empirical;
pub mod euler;
pub mod numeric;
pub mod pattern;
pub mod primes;
pub mod series;

mod error;

pub use error::Error;
pub use euler::{density, DensityEstimate, EulerConfig};
pub use pattern::{parse_pattern, ExponentInterval, ExponentPattern, PrimeAwarePattern};
