//! Brute-force counts: factor every `n <= x` and test its exponents.
//!
//! These counts share nothing with the Euler-product code beyond the
//! pattern types, so they serve as the independent check on every density.

use serde::{Deserialize, Serialize};

use crate::euler::DensityEstimate;
use crate::pattern::PrimeAwarePattern;
use crate::primes::{fold_factorizations, FactorFold, SieveBudget};
use crate::series::ExponentWeight;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub x: u64,
    pub count: u64,
    pub ratio: f64,
}

impl CountReport {
    fn new(x: u64, count: u64) -> Self {
        Self {
            x,
            count,
            ratio: count as f64 / x as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GHistogram {
    pub x: u64,
    /// `buckets[k]` counts `n <= x` with `g(n) = k`.
    pub buckets: Vec<u64>,
    /// Count of `n <= x` with `g(n) > K`.
    pub overflow: u64,
}

impl GHistogram {
    pub fn frequency(&self, k: usize) -> f64 {
        self.buckets[k] as f64 / self.x as f64
    }
}

fn check_x(x: u64) -> Result<(), Error> {
    if x == 0 {
        Err(Error::InvalidParams("x must be at least 1".into()))
    } else {
        Ok(())
    }
}

fn count_where<F>(x: u64, fold: &F, budget: &SieveBudget, keep: impl Fn(F::State) -> bool + Sync) -> Result<u64, Error>
where
    F: FactorFold,
{
    fold_factorizations(
        x,
        fold,
        budget,
        |acc: &mut u64, _, st| {
            if keep(st) {
                *acc += 1;
            }
        },
        |a, b| a + b,
    )
}

struct PatternFold<'a> {
    pap: &'a PrimeAwarePattern,
}

impl FactorFold for PatternFold<'_> {
    type State = bool;

    fn start(&self) -> bool {
        true
    }

    fn visit(&self, ok: bool, p: u64, alpha: u32) -> bool {
        ok && self.pap.pattern_for_prime(p).contains(alpha)
    }
}

/// Number of `n <= x` whose every exponent is allowed at its prime.
pub fn count_pattern(x: u64, pap: &PrimeAwarePattern, budget: &SieveBudget) -> Result<CountReport, Error> {
    check_x(x)?;
    let count = count_where(x, &PatternFold { pap }, budget, |ok| ok)?;
    Ok(CountReport::new(x, count))
}

struct PeriodicFold {
    modulus: u32,
}

impl FactorFold for PeriodicFold {
    type State = bool;

    fn start(&self) -> bool {
        true
    }

    fn visit(&self, ok: bool, _p: u64, alpha: u32) -> bool {
        ok && alpha % self.modulus == 1 % self.modulus
    }
}

/// Number of `n <= x` whose every exponent is `≡ 1 (mod l)`.
pub fn count_periodic(x: u64, l: u32, budget: &SieveBudget) -> Result<CountReport, Error> {
    check_x(x)?;
    if l == 0 {
        return Err(Error::InvalidParams("modulus must be at least 1".into()));
    }
    let count = count_where(x, &PeriodicFold { modulus: l }, budget, |ok| ok)?;
    Ok(CountReport::new(x, count))
}

struct WeightFold<'a> {
    weight: &'a ExponentWeight,
}

impl FactorFold for WeightFold<'_> {
    type State = u64;

    fn start(&self) -> u64 {
        0
    }

    fn visit(&self, g: u64, _p: u64, alpha: u32) -> u64 {
        g.saturating_add(self.weight.weight(alpha))
    }
}

/// Histogram of `g(n) = Σ w(α_i)` over `n <= x`, with buckets `0..=K`.
pub fn g_histogram(x: u64, w: &ExponentWeight, degree: usize, budget: &SieveBudget) -> Result<GHistogram, Error> {
    check_x(x)?;
    let buckets = degree + 2;
    let counts = fold_factorizations(
        x,
        &WeightFold { weight: w },
        budget,
        |acc: &mut Vec<u64>, _, g| {
            if acc.is_empty() {
                acc.resize(buckets, 0);
            }
            acc[(g as usize).min(buckets - 1)] += 1;
        },
        |mut a, b| {
            if a.is_empty() {
                return b;
            }
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
            a
        },
    )?;
    let mut counts = counts;
    counts.resize(buckets, 0);
    let overflow = counts.pop().unwrap_or(0);
    Ok(GHistogram {
        x,
        buckets: counts,
        overflow,
    })
}

/// Empirical ratio versus density estimate. The limit carries no rate, so
/// the tolerance is policy rather than a proven bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviation {
    pub x: u64,
    pub ratio: f64,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    /// `ratio - value`.
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn compare(est: &DensityEstimate, rep: &CountReport, tolerance: f64) -> Deviation {
    let deviation = rep.ratio - est.value;
    Deviation {
        x: rep.x,
        ratio: rep.ratio,
        value: est.value,
        lower: est.lower,
        upper: est.upper,
        deviation,
        tolerance,
        pass: deviation.abs() <= tolerance,
    }
}

/// Number of `n <= x` with at most one prime exponent `>= k`.
pub fn count_at_most_one_high(x: u64, k: u32, budget: &SieveBudget) -> Result<CountReport, Error> {
    check_x(x)?;
    let w = ExponentWeight::indicator(&crate::pattern::ExponentPattern::power_free(k));
    let h = g_histogram(x, &w, 1, budget)?;
    Ok(CountReport::new(x, h.buckets[0] + h.buckets[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pattern::{parse_pattern, ExponentPattern};

    fn budget() -> SieveBudget {
        SieveBudget::default()
    }

    fn uniform(s: &str) -> PrimeAwarePattern {
        PrimeAwarePattern::uniform(parse_pattern(s).unwrap())
    }

    /// Trial-division exponent vector, independent of the sieve code.
    fn exponents(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut d = 2;
        while d * d <= n {
            let mut a = 0;
            while n.is_multiple_of(d) {
                n /= d;
                a += 1;
            }
            if a > 0 {
                out.push((d, a));
            }
            d += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    fn brute(x: u64, keep: impl Fn(&[(u64, u32)]) -> bool) -> u64 {
        (1..=x).filter(|&n| keep(&exponents(n))).count() as u64
    }

    #[test]
    fn squarefree_to_100() {
        let want = brute(100, |f| f.iter().all(|&(_, a)| a == 1));
        assert_eq!(want, 61);
        assert_eq!(count_pattern(100, &uniform("1"), &budget()).unwrap().count, 61);
    }

    #[test]
    fn small_examples() {
        assert_eq!(count_pattern(10, &uniform("1..inf"), &budget()).unwrap().count, 10);
        let powerful = brute(10, |f| f.iter().all(|&(_, a)| a >= 2));
        assert_eq!(powerful, 4);
        let r = count_pattern(10, &uniform("2..inf"), &budget()).unwrap();
        assert_eq!(r.count, 4);
        assert_eq!(r.ratio, 0.4);
    }

    #[test]
    fn periodic_examples() {
        let want = brute(20, |f| f.iter().all(|&(_, a)| a % 2 == 1));
        assert_eq!(count_periodic(20, 2, &budget()).unwrap().count, want);
        assert_eq!(want, 14);
        for l in 1..5 {
            assert_eq!(count_periodic(1, l, &budget()).unwrap().count, 1);
        }
        assert_eq!(count_periodic(10, 1, &budget()).unwrap().count, 10);
        let want3 = brute(5000, |f| f.iter().all(|&(_, a)| a % 3 == 1));
        assert_eq!(count_periodic(5000, 3, &budget()).unwrap().count, want3);
        assert!(count_periodic(10, 0, &budget()).is_err());
    }

    #[test]
    fn histogram_examples() {
        let h = g_histogram(10, &ExponentWeight::excess(), 3, &budget()).unwrap();
        assert_eq!(h.buckets, vec![7, 2, 1, 0]);
        assert_eq!(h.overflow, 0);
        let h = g_histogram(10, &ExponentWeight::zero(), 2, &budget()).unwrap();
        assert_eq!(h.buckets, vec![10, 0, 0]);
        let sf = ExponentWeight::indicator(&parse_pattern("1").unwrap());
        assert_eq!(g_histogram(100, &sf, 2, &budget()).unwrap().buckets[0], 61);
    }

    #[test]
    fn histogram_matches_brute_force() {
        let w = ExponentWeight::excess();
        let x = 20_000;
        let h = g_histogram(x, &w, 3, &budget()).unwrap();
        for k in 0..=3u64 {
            let want = brute(x, |f| f.iter().map(|&(_, a)| a as u64 - 1).sum::<u64>() == k);
            assert_eq!(h.buckets[k as usize], want, "k={k}");
        }
        assert_eq!(h.buckets.iter().sum::<u64>() + h.overflow, x);
    }

    #[test]
    fn prime_aware_matches_brute_force() {
        let pap = PrimeAwarePattern::uniform(parse_pattern("1,3").unwrap())
            .with_exception(2, ExponentPattern::empty())
            .unwrap()
            .with_exception(5, parse_pattern("2..inf").unwrap())
            .unwrap();
        let x = 30_000;
        let want = brute(x, |f| f.iter().all(|&(p, a)| pap.pattern_for_prime(p).contains(a)));
        assert_eq!(count_pattern(x, &pap, &budget()).unwrap().count, want);
    }

    #[test]
    fn monotone_and_full_counts() {
        let sf = uniform("1..2,4");
        let mut prev = 0;
        for x in 1..=500 {
            let c = count_pattern(x, &sf, &budget()).unwrap().count;
            assert!(c >= prev && c <= prev + 1);
            prev = c;
            if x % 97 == 0 {
                assert_eq!(count_pattern(x, &uniform("1..inf"), &budget()).unwrap().count, x);
            }
        }
    }

    #[test]
    fn at_most_one_high_matches_brute_force() {
        let want = brute(10_000, |f| f.iter().filter(|&&(_, a)| a >= 2).count() <= 1);
        assert_eq!(count_at_most_one_high(10_000, 2, &budget()).unwrap().count, want);
    }

    #[test]
    fn compare_exact_case() {
        let est = DensityEstimate::exact(1.0, 2);
        let rep = count_pattern(1234, &uniform("1..inf"), &budget()).unwrap();
        let d = compare(&est, &rep, 0.0);
        assert_eq!(d.deviation, 0.0);
        assert!(d.pass);
    }

    #[test]
    fn budget_and_argument_errors() {
        let small = SieveBudget { max_limit: 100 };
        assert!(matches!(count_pattern(101, &uniform("1"), &small), Err(Error::Resource { .. })));
        assert!(count_pattern(0, &uniform("1"), &budget()).is_err());
    }
}
