//! Zeta values at integers and the prime sum `Σ_p 1/(p^k - 1)`.

use crate::numeric::{Bounded, CompensatedSum};
use crate::primes::for_each_prime_in;
use crate::Error;

use super::tail::prime_power_tail;

/// Direct-summation cutoff for the Euler–Maclaurin evaluation of ζ(s).
const ZETA_CUTOFF: u64 = 64;

/// B_2, B_4, ..., B_12.
const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// ζ(s) for integer `s >= 2`.
///
/// `Σ_{n<N} n^{-s}` plus the Euler–Maclaurin tail at `N = 64`:
/// `N^{1-s}/(s-1) + N^{-s}/2 + Σ_j B_{2j}/(2j)! · s(s+1)…(s+2j-2) N^{-s-2j+1}`.
/// For `x^{-s}` the remainder after the last correction is bounded by the
/// first omitted term, which goes into the error together with a
/// summation allowance.
pub fn zeta_int(s: u32) -> Result<Bounded, Error> {
    if s < 2 {
        return Err(Error::InvalidParams(format!("zeta_int needs s >= 2, got {s}")));
    }
    let n = ZETA_CUTOFF as f64;
    let sf = s as f64;
    let mut sum: CompensatedSum = (1..ZETA_CUTOFF).rev().map(|k| (k as f64).powf(-sf)).collect();
    sum += n.powf(1.0 - sf) / (sf - 1.0);
    sum += 0.5 * n.powf(-sf);

    // term_j = B_{2j}/(2j)! · (s)_{2j-1} · N^{-s-2j+1}
    let mut rising = sf; // (s)_{2j-1}
    let mut fact = 2.0; // (2j)!
    let mut power = n.powf(-sf - 1.0);
    let used = BERNOULLI.len() - 1;
    for (j, b) in BERNOULLI.iter().take(used).enumerate() {
        sum += b / fact * rising * power;
        let jj = (j + 1) as f64;
        rising *= (sf + 2.0 * jj - 1.0) * (sf + 2.0 * jj);
        fact *= (2.0 * jj + 1.0) * (2.0 * jj + 2.0);
        power /= n * n;
    }
    let omitted = (BERNOULLI[used] / fact * rising * power).abs();
    let value = sum.value();
    Ok(Bounded {
        value,
        error: omitted + 4.0 * value * f64::EPSILON,
    })
}

/// `Σ_p 1/(p^k - 1)` for `k >= 2`, to within `target_error`.
///
/// Primes up to a truncation `P` are summed directly; the rest lies in
/// `[S_lo, S_hi/(1 - P^{-k})]` where `S` brackets `Σ_{p>P} p^{-k}`.
/// The value returned is the bracket midpoint.
pub fn prime_sum(k: u32, target_error: f64, max_truncation: u64) -> Result<(Bounded, u64), Error> {
    if k < 2 {
        return Err(Error::InvalidParams(format!("prime_sum needs k >= 2, got {k}")));
    }
    let mut sum = CompensatedSum::default();
    let mut count = 0u64;
    let mut covered = 1u64;
    let mut p_max = 1000u64.min(max_truncation.max(2));
    loop {
        for_each_prime_in(covered + 1, p_max, |p| {
            let q = (p as f64).powi(-(k as i32));
            sum += q / (1.0 - q);
            count += 1;
        });
        covered = p_max;
        let (lo, hi) = prime_power_tail(covered, count, k);
        let hi = hi / (1.0 - (covered as f64).powi(-(k as i32)));
        // Positive terms, each with a few ulps of relative error.
        let round = 8.0 * f64::EPSILON * sum.value();
        let est = Bounded {
            value: sum.value() + 0.5 * (lo + hi),
            error: 0.5 * (hi - lo) + round,
        };
        if 2.0 * est.error <= target_error {
            return Ok((est, covered));
        }
        if covered >= max_truncation {
            return Err(Error::InvalidParams(format!(
                "prime_sum({k}) cannot reach error {target_error:e} below truncation {max_truncation}"
            )));
        }
        p_max = (covered * 2).min(max_truncation);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zeta_two_matches_pi_squared_over_six() {
        let z = zeta_int(2).unwrap();
        let truth = PI * PI / 6.0;
        assert!(z.error <= 1e-12);
        assert!((z.value - truth).abs() <= z.error + 1e-15);
        assert!((z.value - 1.644_934_066_8).abs() < 1e-10);
    }

    #[test]
    fn zeta_three_matches_direct_summation() {
        // Oracle: Σ_{n<=N} n^{-3} plus the integral bracket
        // [(N+1)^{-2}/2, N^{-2}/2] for the remainder, N = 10^6.
        let n_max = 1_000_000u64;
        let direct: CompensatedSum = (1..=n_max).rev().map(|n| (n as f64).powi(-3)).collect();
        let lo = direct.value() + 0.5 / ((n_max + 1) as f64).powi(2);
        let hi = direct.value() + 0.5 / (n_max as f64).powi(2);
        let z = zeta_int(3).unwrap();
        assert!(z.upper() >= lo - 1e-15 && z.lower() <= hi + 1e-15);
        assert!((z.value - 1.202_056_903_2).abs() < 1e-10);
    }

    #[test]
    fn zeta_even_values_match_bernoulli_closed_forms() {
        let z4 = zeta_int(4).unwrap();
        assert!((z4.value - PI.powi(4) / 90.0).abs() <= z4.error + 1e-15);
        let z6 = zeta_int(6).unwrap();
        assert!((z6.value - PI.powi(6) / 945.0).abs() <= z6.error + 1e-15);
    }

    #[test]
    fn zeta_large_s_is_dominated_by_first_terms() {
        for s in [50u32, 64, 100] {
            let z = zeta_int(s).unwrap();
            let head = 1.0 + 2f64.powi(-(s as i32)) + 3f64.powi(-(s as i32));
            assert!((z.value - head).abs() <= 2.0 * f64::EPSILON, "s={s}");
        }
    }

    #[test]
    fn zeta_rejects_small_s() {
        assert!(zeta_int(1).is_err());
        assert!(zeta_int(0).is_err());
    }

    #[test]
    fn prime_sum_first_terms() {
        let head = 1.0 / 3.0 + 1.0 / 8.0 + 1.0 / 24.0;
        assert_eq!(head, 0.5);
        let (v, _) = prime_sum(2, 1e-10, 100_000_000).unwrap();
        assert!(v.value > 0.5 + 1.0 / 48.0);
    }

    #[test]
    fn prime_sum_k2_against_direct_summation() {
        // Oracle: direct sum over p <= 10^7 plus a Rosser–Schoenfeld style
        // remainder envelope: Σ_{p>X} 1/(p^2-1) <= 2·1.26/(X ln X).
        let x = 10_000_000u64;
        let mut direct = CompensatedSum::default();
        for_each_prime_in(2, x, |p| direct += 1.0 / ((p as f64).powi(2) - 1.0));
        let envelope = 2.0 * 1.26 / (x as f64 * (x as f64).ln());
        let (v, _) = prime_sum(2, 1e-10, 100_000_000).unwrap();
        assert!(v.error <= 0.5e-10);
        assert!(v.upper() >= direct.value());
        assert!(v.lower() <= direct.value() + envelope);
        assert!((v.value - 0.551_693_8).abs() < 1e-6, "{}", v.value);
    }

    #[test]
    fn prime_sum_k10_is_dominated_by_first_terms() {
        let (v, _) = prime_sum(10, 1e-10, 100_000_000).unwrap();
        let head = 1.0 / 1023.0 + 1.0 / 59048.0;
        assert!(v.value > head);
        assert!(v.value - head < 5f64.powi(-10) * 1.1);
    }

    #[test]
    fn prime_sum_budget_error() {
        assert!(prime_sum(2, 1e-14, 10_000).is_err());
    }
}
