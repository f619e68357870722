//! Rigorous two-sided bounds for prime tails `Σ_{p>P} p^{-s}`.
//!
//! With `π(P)` known exactly from the sieve, partial summation gives
//!
//! ```text
//! Σ_{p>P} p^{-s} = -π(P) P^{-s} + s ∫_P^∞ π(t) t^{-s-1} dt
//! ```
//!
//! and the integral is bracketed with explicit prime-counting inequalities
//! of the form `π(t) ⋛ t/ln t · Σ_j c_j / ln^j t`, valid for all `t ≥ P`.
//! Each resulting integral `∫_P^∞ t^{-s} ln^{-k} t dt` is bracketed by a
//! truncated alternating expansion whose remainder has a known sign.

/// `π(x) <= x/ln x · Σ c_j/ln^j x` for all `x >= threshold`; the tightest
/// applicable entry is used.
const PI_UPPER: &[(f64, &[f64])] = &[
    // Dusart (1999).
    (355_991.0, &[1.0, 1.0, 2.51]),
    // Dusart (1999), valid for x > 1.
    (2.0, &[1.0, 1.2762]),
];

/// `π(x) >= x/ln x · Σ c_j/ln^j x` for all `x >= threshold`.
const PI_LOWER: &[(f64, &[f64])] = &[
    // Dusart (2010).
    (88_789.0, &[1.0, 1.0, 2.0]),
    // Dusart (1999).
    (599.0, &[1.0, 1.0]),
    // Rosser and Schoenfeld (1962).
    (17.0, &[1.0]),
];

fn coefficients(table: &'static [(f64, &'static [f64])], p: f64) -> Option<&'static [f64]> {
    table.iter().find(|(t, _)| p >= *t).map(|(_, c)| *c)
}

/// Upper bound for `π(x)` at a single point, from the table above.
pub fn pi_upper(x: f64) -> Option<f64> {
    coefficients(PI_UPPER, x).map(|c| {
        let l = x.ln();
        x / l * c.iter().enumerate().map(|(j, cj)| cj / l.powi(j as i32)).sum::<f64>()
    })
}

/// Lower bound for `π(x)` at a single point.
pub fn pi_lower(x: f64) -> Option<f64> {
    coefficients(PI_LOWER, x).map(|c| {
        let l = x.ln();
        x / l * c.iter().enumerate().map(|(j, cj)| cj / l.powi(j as i32)).sum::<f64>()
    })
}

const MAX_EXPANSION_TERMS: u32 = 40;
const REL_SLACK: f64 = 1e-12;

/// Bounds on `∫_P^∞ t^{-s} ln^{-k} t dt` for `s > 1`, `k >= 1`, `P >= 3`.
///
/// Substituting `t = e^y` gives `∫_{y0}^∞ e^{-λy} y^{-k} dy` with
/// `λ = s - 1`, `y0 = ln P`. Integrating by parts `N` times leaves a
/// remainder `(-1)^N (k)_N / λ^N ∫ e^{-λy} y^{-k-N} dy`, so an even `N`
/// gives a lower bound and adding the magnitude of the next term an upper
/// bound. Every even `N` up to the smallest term is tried and the tightest
/// pair kept.
fn log_power_integral(p: f64, s: u32, k: u32) -> (f64, f64) {
    let lambda = (s - 1) as f64;
    let y0 = p.ln();
    let lead = p.powi(1 - s as i32);
    let mut term = lead / (lambda * y0.powi(k as i32));
    let mut partial = 0.0;
    let (mut best_lo, mut best_hi) = (0.0f64, f64::INFINITY);
    for i in 0..MAX_EXPANSION_TERMS {
        if i % 2 == 0 {
            partial += term;
        } else {
            partial -= term;
        }
        let ratio = (k + i) as f64 / (lambda * y0);
        term *= ratio;
        if i % 2 == 1 {
            best_lo = best_lo.max(partial);
            best_hi = best_hi.min(partial + term);
            if ratio >= 1.0 {
                break;
            }
        }
    }
    let lo = best_lo * (1.0 - REL_SLACK);
    let hi = best_hi * (1.0 + REL_SLACK);
    (lo.max(0.0), hi)
}

/// Two-sided bound on `Σ_{p>P} p^{-s}` given `pi_p = π(P)` exactly.
pub fn prime_power_tail(p: u64, pi_p: u64, s: u32) -> (f64, f64) {
    assert!(s >= 2, "tail exponent must be at least 2");
    let pf = p as f64;
    // Integer comparison bound, valid for any P >= 1.
    let trivial = pf.powi(1 - s as i32) / (s - 1) as f64;
    if p < 3 {
        return (0.0, trivial);
    }
    let boundary = pi_p as f64 * pf.powi(-(s as i32));
    let sf = s as f64;

    let integral = |coeffs: &[f64], upper: bool| -> f64 {
        coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let (lo, hi) = log_power_integral(pf, s, j as u32 + 1);
                c * if upper { hi } else { lo }
            })
            .sum::<f64>()
    };

    let hi = match coefficients(PI_UPPER, pf) {
        Some(c) => (sf * integral(c, true) - boundary) * (1.0 + REL_SLACK),
        None => trivial,
    };
    let lo = match coefficients(PI_LOWER, pf) {
        Some(c) => (sf * integral(c, false) - boundary) * (1.0 - REL_SLACK),
        None => 0.0,
    };
    (lo.max(0.0), hi.min(trivial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::{for_each_prime_in, sieve_primes, SieveBudget};

    #[test]
    fn prime_counting_bounds_hold_on_samples() {
        let table = sieve_primes(5_000_000, &SieveBudget::default()).unwrap();
        let mut x = 17u64;
        while x <= 5_000_000 {
            let pi = table.count_up_to(x) as f64;
            assert!(pi_lower(x as f64).unwrap() <= pi, "lower fails at {x}");
            assert!(pi_upper(x as f64).unwrap() >= pi, "upper fails at {x}");
            x = x * 11 / 10 + 1;
        }
    }

    #[test]
    fn integral_bounds_bracket_quadrature() {
        // Oracle: composite Simpson on y in [ln P, ln P + 40/λ] after
        // substituting t = e^y; the neglected piece is below e^{-40}.
        let cases = [(1000.0, 2u32, 1u32, 2e-2), (1e6, 2, 2, 5e-4), (5e5, 3, 3, 5e-4), (2e4, 2, 4, 0.1)];
        for &(p, s, k, rel) in &cases {
            let lambda = (s - 1) as f64;
            let y0 = f64::ln(p);
            let y1 = y0 + 40.0 / lambda;
            let n = 200_000;
            let h = (y1 - y0) / n as f64;
            let f = |y: f64| (-lambda * y).exp() * y.powi(-(k as i32));
            let mut acc = f(y0) + f(y1);
            for i in 1..n {
                let w = if i % 2 == 1 { 4.0 } else { 2.0 };
                acc += w * f(y0 + i as f64 * h);
            }
            let quad = acc * h / 3.0;
            let (lo, hi) = log_power_integral(p, s, k);
            assert!(lo <= quad * (1.0 + 1e-9) && quad <= hi * (1.0 + 1e-9), "{p} {s} {k}: {lo} {quad} {hi}");
            assert!((hi - lo) / quad < rel, "{p} {s} {k}: gap {}", (hi - lo) / quad);
        }
    }

    #[test]
    fn tail_brackets_direct_summation() {
        // Direct sum over primes in (P, 10^7] plus the trivial remainder
        // bound beyond 10^7 brackets the true tail.
        let far = 10_000_000u64;
        for &(p, s) in &[(1000u64, 2u32), (100_000, 2), (400_000, 2), (1000, 3), (5000, 4)] {
            let mut pi = 0u64;
            for_each_prime_in(2, p, |_| pi += 1);
            let mut direct = crate::numeric::CompensatedSum::default();
            for_each_prime_in(p + 1, far, |q| direct += (q as f64).powi(-(s as i32)));
            let beyond = (far as f64).powi(1 - s as i32) / (s - 1) as f64;
            let (lo, hi) = prime_power_tail(p, pi, s);
            let d = direct.value();
            assert!(lo <= d + beyond, "p={p} s={s}: lo {lo} > {}", d + beyond);
            assert!(hi >= d, "p={p} s={s}: hi {hi} < {d}");
            assert!(lo > 0.0 && hi < (p as f64).powi(1 - s as i32) / (s - 1) as f64);
        }
    }

    #[test]
    fn tail_gap_shrinks_past_dusart_threshold() {
        let mut pi = 0u64;
        for_each_prime_in(2, 512_000, |_| pi += 1);
        let (lo, hi) = prime_power_tail(512_000, pi, 2);
        let rel = (hi - lo) / hi;
        assert!(rel < 0.02, "relative gap {rel}");
    }
}
