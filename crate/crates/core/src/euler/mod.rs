//! Euler products for pattern densities, with rigorous truncation brackets.
//!
//! For a pattern `I` of allowed exponents the density is `∏_p F(p)` with
//!
//! ```text
//! F(p) = Σ_{i=0}^{n} (p^{-a_i} - p^{-(b_i+1)}),   a_0 = b_0 = 0,
//!      = 1 - (1 - 1/p) Σ_{i ∉ I} p^{-i}.
//! ```
//!
//! The product is truncated at a prime `P`; the neglected factors are
//! bracketed through two-sided bounds on `Σ_{p>P} -ln F(p)` (see [`tail`]).

mod catalog;
mod constants;
pub mod tail;

pub use catalog::{closed_form, CatalogId};
pub use constants::{prime_sum, zeta_int};

use serde::{Deserialize, Serialize};

use crate::numeric::{inv_pow, CompensatedSum};
use crate::pattern::{ExponentPattern, PrimeAwarePattern};
use crate::primes::for_each_prime_in;
use crate::Error;

/// Density value with a rigorous bracket.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// Largest prime whose factor entered the product.
    pub truncation_prime: u64,
    /// Upper bound on the neglected `Σ -ln F(p)`, roundoff allowance included.
    pub tail_logbound: f64,
    /// Lower bound on the neglected `Σ -ln F(p)`, roundoff allowance removed.
    pub tail_logfloor: f64,
    pub diverges_to_zero: bool,
}

impl DensityEstimate {
    pub fn exact(value: f64, truncation_prime: u64) -> Self {
        Self {
            value,
            lower: value,
            upper: value,
            truncation_prime,
            tail_logbound: 0.0,
            tail_logfloor: 0.0,
            diverges_to_zero: false,
        }
    }

    pub fn divergent() -> Self {
        Self {
            diverges_to_zero: true,
            ..Self::exact(0.0, 2)
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// True when the two brackets intersect.
    pub fn overlaps(&self, other: &DensityEstimate) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

/// Limits for the truncation-prime search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerConfig {
    /// First truncation prime tried by the doubling search.
    pub start_truncation: u64,
    /// Largest truncation prime the search may reach.
    pub max_truncation: u64,
}

impl Default for EulerConfig {
    fn default() -> Self {
        Self {
            start_truncation: 1000,
            max_truncation: 100_000_000,
        }
    }
}

/// Per-prime term of the product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFactor {
    pub p: u64,
    pub value: f64,
    /// `1 - value`, computed without cancellation.
    pub deficit: f64,
}

/// Local factor from the allowed intervals, including the implicit
/// exponent-0 term `1 - 1/p`.
pub fn local_factor_interval(p: u64, pattern: &ExponentPattern) -> LocalFactor {
    let mut sum = CompensatedSum::default();
    sum += 1.0 - 1.0 / p as f64;
    for iv in pattern.intervals() {
        sum += inv_pow(p, iv.lo() as u64);
        if let Some(hi) = iv.hi() {
            sum += -inv_pow(p, hi as u64 + 1);
        }
    }
    let value = sum.value();
    LocalFactor {
        p,
        value,
        deficit: local_deficit(p, pattern),
    }
}

/// Local factor `1 - (1 - 1/p) Σ_{forbidden i} p^{-i}`, with the forbidden
/// sum taken in closed geometric form over the complement intervals.
pub fn local_factor_general(p: u64, pattern: &ExponentPattern) -> LocalFactor {
    let q = 1.0 / p as f64;
    let forbidden: CompensatedSum = pattern
        .complement()
        .intervals()
        .iter()
        .map(|iv| {
            let head = inv_pow(p, iv.lo() as u64);
            match iv.hi() {
                None => head / (1.0 - q),
                Some(hi) => head * (1.0 - inv_pow(p, (hi - iv.lo()) as u64 + 1)) / (1.0 - q),
            }
        })
        .collect();
    let deficit = (1.0 - q) * forbidden.value();
    LocalFactor {
        p,
        value: 1.0 - deficit,
        deficit,
    }
}

/// `1 - F(p)` summed directly over the forbidden intervals:
/// each `[a, b]` contributes `p^{-a} - p^{-(b+1)}`.
pub fn local_deficit(p: u64, pattern: &ExponentPattern) -> f64 {
    pattern
        .complement()
        .intervals()
        .iter()
        .map(|iv| {
            let head = inv_pow(p, iv.lo() as u64);
            match iv.hi() {
                None => head,
                Some(hi) => head - inv_pow(p, hi as u64 + 1),
            }
        })
        .collect::<CompensatedSum>()
        .value()
}

/// Shape of the deficits beyond the truncation prime: for every prime
/// `p > P`, `scale·p^{-m} - slack·p^{-m-1} <= 1 - F(p) <= scale·p^{-m}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TailModel {
    pub scale: f64,
    pub m: u32,
    pub slack: f64,
}

impl TailModel {
    pub(crate) fn leading(m: u32) -> Self {
        Self {
            scale: 1.0,
            m,
            slack: 1.0,
        }
    }

    /// Bounds `[lo, hi]` on `Σ_{p>P} -ln F(p)`.
    fn log_bounds(&self, p: u64, pi_p: u64) -> (f64, f64) {
        let (s_lo, s_hi) = tail::prime_power_tail(p, pi_p, self.m);
        let (_, s1_hi) = tail::prime_power_tail(p, pi_p, self.m + 1);
        // -ln(1-ε) lies in [ε, ε/(1-ε)] and ε <= scale·P^{-m} here.
        let eps_max = self.scale * (p as f64).powi(-(self.m as i32));
        let lo = (self.scale * s_lo - self.slack * s1_hi).max(0.0);
        let hi = self.scale * s_hi / (1.0 - eps_max);
        (lo, hi)
    }
}

/// Relative roundoff allowance on each accumulated `ln F(p)`: a few ulps
/// for the deficit, `ln_1p` and the compensated addition.
const ROUNDOFF_PER_TERM: f64 = 8.0 * f64::EPSILON;

/// Running truncated product `Σ_{p<=P} ln F(p)`.
struct Accumulator<'a> {
    deficit: &'a (dyn Fn(u64) -> f64 + Sync),
    log_sum: CompensatedSum,
    /// Σ |ln F(p)|, which scales the roundoff allowance.
    log_mass: f64,
    factors: u64,
    covered: u64,
}

impl<'a> Accumulator<'a> {
    fn new(deficit: &'a (dyn Fn(u64) -> f64 + Sync)) -> Self {
        Self {
            deficit,
            log_sum: CompensatedSum::default(),
            log_mass: 0.0,
            factors: 0,
            covered: 1,
        }
    }

    fn extend_to(&mut self, p_max: u64) {
        if p_max <= self.covered {
            return;
        }
        let deficit = self.deficit;
        let (log_sum, log_mass, factors) = (&mut self.log_sum, &mut self.log_mass, &mut self.factors);
        for_each_prime_in(self.covered + 1, p_max, |p| {
            let term = (-deficit(p)).ln_1p();
            *log_sum += term;
            *log_mass -= term;
            *factors += 1;
        });
        self.covered = p_max;
    }

    fn estimate(&self, tail: Option<TailModel>) -> DensityEstimate {
        let (lo, hi) = match tail {
            Some(t) => t.log_bounds(self.covered, self.factors),
            None => (0.0, 0.0),
        };
        let s = self.log_sum.value();
        // Per-term roundoff plus a few ulps for the final exp.
        let r = ROUNDOFF_PER_TERM * self.log_mass + 4.0 * f64::EPSILON;
        let upper = (s - lo + r).exp().min(1.0);
        let lower = (s - hi - r).exp();
        let value = (s - 0.5 * (lo + hi)).exp().clamp(lower, upper);
        DensityEstimate {
            value,
            lower,
            upper,
            truncation_prime: self.covered,
            tail_logbound: hi + r,
            tail_logfloor: (lo - r).max(0.0),
            diverges_to_zero: false,
        }
    }
}

/// Doubling search for a truncation prime whose bracket is narrower than
/// `target_error`. `deficit(p)` is `1 - F(p)`; `tail` describes all primes
/// above `min_truncation` (or `None` if those factors are exactly 1).
pub(crate) fn evaluate_product(
    deficit: &(dyn Fn(u64) -> f64 + Sync),
    tail: Option<TailModel>,
    min_truncation: u64,
    target_error: f64,
    cfg: &EulerConfig,
) -> Result<DensityEstimate, Error> {
    if !(target_error > 0.0) {
        return Err(Error::InvalidParams(format!(
            "target error must be positive, got {target_error}"
        )));
    }
    let cap = cfg.max_truncation.max(min_truncation);
    let mut p = cfg.start_truncation.max(min_truncation).max(2).min(cap);
    let mut acc = Accumulator::new(deficit);
    loop {
        acc.extend_to(p);
        let est = acc.estimate(tail);
        if est.width() <= target_error {
            return Ok(est);
        }
        if p >= cap {
            return Err(Error::TargetUnreachable {
                target: target_error,
                best: Box::new(est),
            });
        }
        p = p.saturating_mul(2).min(cap);
    }
}

/// Evaluates the product at a fixed truncation prime.
pub(crate) fn evaluate_product_at(
    deficit: &(dyn Fn(u64) -> f64 + Sync),
    tail: Option<TailModel>,
    truncation: u64,
) -> DensityEstimate {
    let mut acc = Accumulator::new(deficit);
    acc.extend_to(truncation.max(2));
    acc.estimate(tail)
}

enum Plan {
    Exact(DensityEstimate),
    Product {
        tail: Option<TailModel>,
        min_truncation: u64,
    },
}

fn plan(pap: &PrimeAwarePattern) -> Plan {
    let largest = pap.largest_exception().unwrap_or(2);
    match pap.default_pattern().min_forbidden() {
        Some(1) => Plan::Exact(DensityEstimate::divergent()),
        None if pap.exceptions().values().all(ExponentPattern::is_all) => {
            Plan::Exact(DensityEstimate::exact(1.0, largest))
        }
        None => Plan::Product {
            tail: None,
            min_truncation: largest,
        },
        Some(m) => Plan::Product {
            tail: Some(TailModel::leading(m)),
            min_truncation: largest,
        },
    }
}

/// Natural density of the integers whose every exponent is allowed by the
/// pattern governing its prime.
///
/// A default pattern that forbids exponent 1 gives a product diverging to
/// zero; that case is reported as `diverges_to_zero` without evaluation.
pub fn density(
    pap: &PrimeAwarePattern,
    target_error: f64,
    cfg: &EulerConfig,
) -> Result<DensityEstimate, Error> {
    match plan(pap) {
        Plan::Exact(e) => Ok(e),
        Plan::Product {
            tail,
            min_truncation,
        } => {
            let deficit = |p: u64| local_deficit(p, pap.pattern_for_prime(p));
            evaluate_product(&deficit, tail, min_truncation, target_error, cfg)
        }
    }
}

/// Density with the product truncated at `truncation` (raised to the
/// largest exceptional prime if needed). No width target applies.
pub fn density_truncated(pap: &PrimeAwarePattern, truncation: u64) -> DensityEstimate {
    match plan(pap) {
        Plan::Exact(e) => e,
        Plan::Product {
            tail,
            min_truncation,
        } => {
            let deficit = |p: u64| local_deficit(p, pap.pattern_for_prime(p));
            evaluate_product_at(&deficit, tail, truncation.max(min_truncation))
        }
    }
}
