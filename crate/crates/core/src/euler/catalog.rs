//! Closed-form densities for a handful of classical exponent conditions.
//!
//! Products over all primes are evaluated from their own rational local
//! factors with the same truncation machinery as [`super::density`]; the
//! ζ-based forms use [`zeta_int`] so that they share no code path with the
//! prime products they are compared against.

use std::fmt;

use crate::numeric::{inv_pow, Bounded};
use crate::primes::is_prime;
use crate::Error;

use super::constants::{prime_sum, zeta_int};
use super::{evaluate_product, DensityEstimate, EulerConfig, TailModel};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CatalogId {
    /// Exponents in `[1, k]`: `1/ζ(k+1)`.
    PowerFree { k: u32 },
    /// Exponents in `{1} ∪ [k, ∞)`: `∏ (1 - p^-2 + p^-k)`.
    SquarefreeOrHigh { k: u32 },
    /// Every exponent except `k`: `∏ (1 - p^-k + p^-(k+1))`.
    SkipOne { k: u32 },
    /// Odd exponents only: `∏ (1 - 1/(p(p+1)))`.
    ExpOdd,
    /// Exponents `≡ 1 (mod l)`: `∏ (1 - (p^(l-1) - 1)/(p(p^l - 1)))`.
    ModPeriodic { l: u32 },
    /// k-free and coprime to every prime `<= q`.
    Ex1 { q: u64, k: u32 },
    /// k-free and coprime to every prime in `primes`.
    Ex2 { primes: Vec<u64>, k: u32 },
    /// Exponents `< k` except at `p`, where anything goes.
    Ex3Single { p: u64, k: u32 },
    /// Exponents `< k` except at most one prime, where anything goes.
    Ex3 { k: u32 },
}

impl fmt::Display for CatalogId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CatalogId::PowerFree { k } => write!(f, "powerfree({k})"),
            CatalogId::SquarefreeOrHigh { k } => write!(f, "squarefree_or_high({k})"),
            CatalogId::SkipOne { k } => write!(f, "skip_one({k})"),
            CatalogId::ExpOdd => write!(f, "exp_odd"),
            CatalogId::ModPeriodic { l } => write!(f, "mod_periodic({l})"),
            CatalogId::Ex1 { q, k } => write!(f, "ex1({q},{k})"),
            CatalogId::Ex2 { primes, k } => {
                let list: Vec<String> = primes.iter().map(u64::to_string).collect();
                write!(f, "ex2({{{}}},{k})", list.join(","))
            }
            CatalogId::Ex3Single { p, k } => write!(f, "ex3_single({p},{k})"),
            CatalogId::Ex3 { k } => write!(f, "ex3({k})"),
        }
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidParams(msg)
}

fn need_k(k: u32, min: u32, id: &str) -> Result<(), Error> {
    if k < min {
        Err(invalid(format!("{id} needs k >= {min}, got {k}")))
    } else {
        Ok(())
    }
}

fn need_prime(p: u64, id: &str) -> Result<(), Error> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(invalid(format!("{id}: {p} is not prime")))
    }
}

fn from_bounded(b: Bounded, truncation_prime: u64) -> DensityEstimate {
    DensityEstimate {
        value: b.value,
        lower: b.lower(),
        upper: b.upper(),
        truncation_prime,
        tail_logbound: 0.0,
        tail_logfloor: 0.0,
        diverges_to_zero: false,
    }
}

fn inv_zeta(k: u32) -> Result<Bounded, Error> {
    Ok(zeta_int(k)?.recip())
}

fn product(
    deficit: &(dyn Fn(u64) -> f64 + Sync),
    m: u32,
    target_error: f64,
    cfg: &EulerConfig,
) -> Result<DensityEstimate, Error> {
    evaluate_product(deficit, Some(TailModel::leading(m)), 2, target_error, cfg)
}

/// Evaluates a catalog entry to within `target_error` where a truncation is
/// involved.
pub fn closed_form(
    id: &CatalogId,
    target_error: f64,
    cfg: &EulerConfig,
) -> Result<DensityEstimate, Error> {
    match *id {
        CatalogId::PowerFree { k } => {
            need_k(k, 1, "powerfree")?;
            Ok(from_bounded(inv_zeta(k + 1)?, 0))
        }
        CatalogId::SquarefreeOrHigh { k } => {
            need_k(k, 2, "squarefree_or_high")?;
            if k == 2 {
                return Ok(DensityEstimate::exact(1.0, 2));
            }
            let eps = move |p: u64| inv_pow(p, 2) - inv_pow(p, k as u64);
            product(&eps, 2, target_error, cfg)
        }
        CatalogId::SkipOne { k } => {
            need_k(k, 2, "skip_one")?;
            let eps = move |p: u64| inv_pow(p, k as u64) - inv_pow(p, k as u64 + 1);
            product(&eps, k, target_error, cfg)
        }
        CatalogId::ExpOdd => {
            let eps = |p: u64| {
                let pf = p as f64;
                1.0 / (pf * (pf + 1.0))
            };
            product(&eps, 2, target_error, cfg)
        }
        CatalogId::ModPeriodic { l } => {
            if l == 0 {
                return Err(invalid("mod_periodic needs l >= 1".into()));
            }
            if l == 1 {
                return Ok(DensityEstimate::exact(1.0, 2));
            }
            // (p^(l-1) - 1)/(p(p^l - 1)) rescaled by p^-(l+1) so that large
            // p and l cannot overflow.
            let eps = move |p: u64| {
                let a = 1.0 - inv_pow(p, l as u64 - 1);
                let b = 1.0 - inv_pow(p, l as u64);
                inv_pow(p, 2) * a / b
            };
            product(&eps, 2, target_error, cfg)
        }
        CatalogId::Ex1 { q, k } => {
            need_k(k, 2, "ex1")?;
            need_prime(q, "ex1")?;
            let mut num = Bounded::exact(1.0);
            let mut den = Bounded::exact(1.0);
            crate::primes::for_each_prime_in(2, q, |p| {
                num = num.mul(Bounded::exact(1.0 - 1.0 / p as f64));
                den = den.mul(Bounded::exact(1.0 - inv_pow(p, k as u64)));
            });
            let v = num.mul(inv_zeta(k)?).mul(den.recip());
            Ok(from_bounded(v, q))
        }
        CatalogId::Ex2 { ref primes, k } => {
            need_k(k, 2, "ex2")?;
            let mut seen = primes.clone();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != primes.len() {
                return Err(invalid("ex2: primes must be distinct".into()));
            }
            let mut v = inv_zeta(k)?;
            for &q in primes {
                need_prime(q, "ex2")?;
                // (q^k - q^(k-1))/(q^k - 1), divided through by q^k.
                let r = (1.0 - 1.0 / q as f64) / (1.0 - inv_pow(q, k as u64));
                v = v.mul(Bounded::exact(r));
            }
            Ok(from_bounded(v, seen.last().copied().unwrap_or(0)))
        }
        CatalogId::Ex3Single { p, k } => {
            need_k(k, 2, "ex3_single")?;
            need_prime(p, "ex3_single")?;
            let r = 1.0 / (1.0 - inv_pow(p, k as u64));
            Ok(from_bounded(inv_zeta(k)?.mul(Bounded::exact(r)), p))
        }
        CatalogId::Ex3 { k } => {
            need_k(k, 2, "ex3")?;
            let (s, truncation) = prime_sum(k, target_error / 4.0, cfg.max_truncation)?;
            let v = inv_zeta(k)?.mul(Bounded::exact(1.0).add(s));
            Ok(from_bounded(v, truncation))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(id: CatalogId) -> DensityEstimate {
        closed_form(&id, 1e-10, &EulerConfig::default()).unwrap()
    }

    #[test]
    fn powerfree_one_is_squarefree() {
        let d = eval(CatalogId::PowerFree { k: 1 });
        assert!((d.value - 0.607_927_101_9).abs() < 1e-10);
        let truth = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!(d.lower <= truth && truth <= d.upper);
    }

    #[test]
    fn ex2_odd_squarefree_is_four_over_pi_squared() {
        let d = eval(CatalogId::Ex2 { primes: vec![2], k: 2 });
        let truth = 4.0 / (std::f64::consts::PI * std::f64::consts::PI);
        assert!((d.value - truth).abs() < 1e-12);
        assert!((d.value - 0.405_284_734_6).abs() < 1e-10);
    }

    #[test]
    fn exp_odd_constant() {
        let d = eval(CatalogId::ExpOdd);
        assert!(d.width() <= 1e-10);
        assert!((d.value - 0.704_442_201_0).abs() < 2e-10, "{d:?}");
    }

    #[test]
    fn mod_periodic_two_is_exp_odd() {
        let a = eval(CatalogId::ExpOdd);
        let b = eval(CatalogId::ModPeriodic { l: 2 });
        assert!((a.value - b.value).abs() <= 1e-12);
        assert_eq!(eval(CatalogId::ModPeriodic { l: 1 }).value, 1.0);
    }

    #[test]
    fn eq10_and_eq11_coincide_on_one_or_at_least_three() {
        let a = eval(CatalogId::SquarefreeOrHigh { k: 3 });
        let b = eval(CatalogId::SkipOne { k: 2 });
        assert!((a.value - b.value).abs() <= 1e-12);
    }

    #[test]
    fn ex1_with_q3_k2_is_half_of_squarefree_density() {
        // ∏_{p<=3}(1-1/p)/∏_{p<=3}(1-1/p^2) = (1/3)/(2/3) = 1/2.
        let d = eval(CatalogId::Ex1 { q: 3, k: 2 });
        let sf = eval(CatalogId::PowerFree { k: 1 });
        assert!((d.value - 0.5 * sf.value).abs() < 1e-14);
    }

    #[test]
    fn params_are_validated() {
        let cfg = EulerConfig::default();
        for id in [
            CatalogId::PowerFree { k: 0 },
            CatalogId::SkipOne { k: 1 },
            CatalogId::ModPeriodic { l: 0 },
            CatalogId::Ex1 { q: 4, k: 2 },
            CatalogId::Ex2 { primes: vec![2, 2], k: 2 },
            CatalogId::Ex2 { primes: vec![9], k: 2 },
            CatalogId::Ex3Single { p: 6, k: 2 },
            CatalogId::Ex3 { k: 1 },
        ] {
            assert!(matches!(closed_form(&id, 1e-9, &cfg), Err(Error::InvalidParams(_))), "{id}");
        }
    }
}
