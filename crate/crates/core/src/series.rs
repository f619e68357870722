//! Densities `d_k` of `{n : g(n) = k}` for an additive exponent statistic
//! `g(n) = Σ w(α_i)`.
//!
//! The generating function `Σ d_k z^k` is the product over primes of
//! `(1 - 1/p)(1 + Σ_{i>=1} z^{w(i)} p^{-i})`. Each factor is expanded as a
//! polynomial in `z`, truncated at degree `K`, and multiplied in prime order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::euler::{density_truncated, DensityEstimate};
use crate::numeric::inv_pow;
use crate::pattern::{Exponent, ExponentPattern, PrimeAwarePattern};
use crate::primes::for_each_prime_in;
use crate::Error;

/// Prime-independent weight `w(i) >= 0` for exponents `i >= 1`.
///
/// Below `tail_start` the weight is read from `exceptions` (absent keys
/// weigh 0); from `tail_start` on it is `tail_slope·i + tail_offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentWeight {
    exceptions: BTreeMap<Exponent, u32>,
    tail_start: Exponent,
    tail_slope: u32,
    tail_offset: i64,
}

impl ExponentWeight {
    pub fn new(
        exceptions: BTreeMap<Exponent, u32>,
        tail_start: Exponent,
        tail_slope: u32,
        tail_offset: i64,
    ) -> Result<Self, Error> {
        if tail_start == 0 {
            return Err(Error::InvalidWeight("tail must start at exponent >= 1".into()));
        }
        if tail_slope > 1 {
            return Err(Error::InvalidWeight(format!("tail slope must be 0 or 1, got {tail_slope}")));
        }
        if let Some(&k) = exceptions.keys().find(|&&k| k == 0 || k >= tail_start) {
            return Err(Error::InvalidWeight(format!(
                "exception at exponent {k} outside [1, {tail_start})"
            )));
        }
        if tail_slope as i64 * tail_start as i64 + tail_offset < 0 {
            return Err(Error::InvalidWeight(format!(
                "tail weight at exponent {tail_start} is negative"
            )));
        }
        Ok(Self {
            exceptions,
            tail_start,
            tail_slope,
            tail_offset,
        })
    }

    /// `w ≡ 0`.
    pub fn zero() -> Self {
        Self::new(BTreeMap::new(), 1, 0, 0).expect("valid")
    }

    /// `w(i) = i - 1`, the excess of the exponent over 1.
    pub fn excess() -> Self {
        Self::new(BTreeMap::new(), 1, 1, -1).expect("valid")
    }

    /// `w(i) = 1` exactly when `i` is not allowed by `pattern`.
    pub fn indicator(pattern: &ExponentPattern) -> Self {
        let (tail_start, tail_offset) = match pattern.intervals().last() {
            Some(last) if last.hi().is_none() => (last.lo(), 0),
            Some(last) => (last.hi().unwrap_or(0) + 1, 1),
            None => (1, 1),
        };
        let exceptions = (1..tail_start)
            .filter(|&i| !pattern.contains(i))
            .map(|i| (i, 1))
            .collect();
        Self::new(exceptions, tail_start, 0, tail_offset).expect("indicator weights are valid")
    }

    pub fn weight(&self, i: Exponent) -> u64 {
        if i < self.tail_start {
            self.exceptions.get(&i).copied().unwrap_or(0) as u64
        } else {
            (self.tail_slope as i64 * i as i64 + self.tail_offset) as u64
        }
    }

    /// `{i : w(i) = 0}`.
    pub fn zero_set(&self) -> ExponentPattern {
        let mut raw: Vec<(Exponent, Option<Exponent>)> = (1..self.tail_start)
            .filter(|&i| self.weight(i) == 0)
            .map(|i| (i, Some(i)))
            .collect();
        match self.tail_slope {
            0 if self.tail_offset == 0 => raw.push((self.tail_start, None)),
            1 if -self.tail_offset >= self.tail_start as i64 => {
                let i = (-self.tail_offset) as Exponent;
                raw.push((i, Some(i)));
            }
            _ => {}
        }
        ExponentPattern::normalize(raw).expect("exponents are positive")
    }
}

/// Coefficients `c_0..c_K` of one prime's factor, plus the mass of terms
/// whose weight exceeds `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalPoly {
    pub coeffs: Vec<f64>,
    pub dropped: f64,
}

pub fn local_poly(p: u64, w: &ExponentWeight, degree: usize) -> LocalPoly {
    let q = 1.0 / p as f64;
    let norm = 1.0 - q;
    let mut coeffs = vec![0.0; degree + 1];
    let mut dropped = 0.0;
    let mut put = |k: u64, mass: f64| {
        if k <= degree as u64 {
            coeffs[k as usize] += mass;
        } else {
            dropped += mass;
        }
    };
    put(0, norm);
    for i in 1..w.tail_start {
        put(w.weight(i), norm * inv_pow(p, i as u64));
    }
    let start = w.tail_start as u64;
    if w.tail_slope == 0 {
        // (1 - q) Σ_{i>=start} q^i = q^start
        put(w.tail_offset as u64, inv_pow(p, start));
    } else {
        // w(i) = i + offset, so degree k comes from exponent k - offset.
        let mut first_dropped = start;
        for k in 0..=degree as i64 {
            let i = k - w.tail_offset;
            if i >= start as i64 {
                put(k as u64, norm * inv_pow(p, i as u64));
            }
            first_dropped = first_dropped.max((i + 1).max(0) as u64);
        }
        dropped += inv_pow(p, first_dropped);
    }
    LocalPoly { coeffs, dropped }
}

/// Degree-`K` truncated product of two coefficient vectors, in place.
fn mul_truncated(acc: &mut [f64], factor: &[f64]) {
    let k = acc.len();
    for d in (0..k).rev() {
        let mut s = 0.0;
        for j in 0..=d {
            s += acc[d - j] * factor[j];
        }
        acc[d] = s;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySeries {
    pub coeffs: Vec<f64>,
    pub truncation_prime: u64,
    /// `1 - Σ coeffs`: mass pushed beyond the degree cutoff.
    pub mass_deficit: f64,
    /// `|d_k(P) - d_k(P/2)|` per coefficient.
    pub stability: Vec<f64>,
    /// Euler-product density of `{i : w(i) = 0}` at the same truncation.
    pub d0_reference: DensityEstimate,
}

impl DensitySeries {
    /// Whether `d_0` lies within the reference bracket widened by `slack`.
    pub fn d0_consistent(&self, slack: f64) -> bool {
        let r = &self.d0_reference;
        (self.coeffs[0] - r.value).abs() <= r.width() + slack
    }
}

fn truncated_series(w: &ExponentWeight, degree: usize, truncation: u64) -> Vec<f64> {
    let mut acc = vec![0.0; degree + 1];
    acc[0] = 1.0;
    for_each_prime_in(2, truncation, |p| {
        let f = local_poly(p, w, degree);
        mul_truncated(&mut acc, &f.coeffs);
    });
    acc
}

/// `d_0..d_K` from the product over primes `p <= truncation`.
pub fn density_series(
    w: &ExponentWeight,
    degree: usize,
    truncation: u64,
) -> Result<DensitySeries, Error> {
    let zero_set = w.zero_set();
    if zero_set.min_forbidden() == Some(1) {
        return Err(Error::DivergentWeight);
    }
    if truncation < 2 {
        return Err(Error::InvalidParams(format!(
            "truncation prime must be >= 2, got {truncation}"
        )));
    }
    let coeffs = truncated_series(w, degree, truncation);
    let half = truncated_series(w, degree, (truncation / 2).max(2));
    let stability = coeffs.iter().zip(&half).map(|(a, b)| (a - b).abs()).collect();
    let mass_deficit = 1.0 - coeffs.iter().sum::<f64>();
    let d0_reference = density_truncated(&PrimeAwarePattern::uniform(zero_set), truncation);
    Ok(DensitySeries {
        coeffs,
        truncation_prime: truncation,
        mass_deficit,
        stability,
        d0_reference,
    })
}
