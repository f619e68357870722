//! Prime tables, smallest-prime-factor tables and segmented factorization
//! of every integer in a range.

use rayon::prelude::*;

use crate::Error;

/// Segment length used by the segmented sieves.
pub const SEGMENT_LEN: u64 = 1 << 22;

/// Largest limit an SPF table may have; entries are stored as `u32`.
pub const SPF_HARD_CAP: u64 = u32::MAX as u64;

/// Upper bound on sieve limits, checked before any allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveBudget {
    pub max_limit: u64,
}

impl Default for SieveBudget {
    fn default() -> Self {
        Self {
            max_limit: 100_000_000,
        }
    }
}

impl SieveBudget {
    pub fn check(&self, limit: u64) -> Result<(), Error> {
        if limit > self.max_limit {
            Err(Error::Resource {
                requested: limit,
                budget: self.max_limit,
            })
        } else {
            Ok(())
        }
    }
}

/// Trial-division primality; intended for validating small inputs such as
/// exceptional primes.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Integer square root.
pub fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.saturating_mul(r) > n {
        r -= 1;
    }
    while (r + 1).saturating_mul(r + 1) <= n {
        r += 1;
    }
    r
}

/// Plain sieve of Eratosthenes, used for base primes of the segmented sieves.
fn small_primes(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Calls `f` on every prime in `[lo, hi]`, in increasing order.
pub fn for_each_prime_in<F: FnMut(u64)>(lo: u64, hi: u64, mut f: F) {
    let lo = lo.max(2);
    if hi < lo {
        return;
    }
    let base = small_primes(isqrt(hi));
    let mut seg_lo = lo;
    let mut composite = Vec::new();
    while seg_lo <= hi {
        let seg_hi = hi.min(seg_lo.saturating_add(SEGMENT_LEN - 1));
        let len = (seg_hi - seg_lo + 1) as usize;
        composite.clear();
        composite.resize(len, false);
        for &p in &base {
            if p * p > seg_hi {
                break;
            }
            let mut m = (p * p).max(seg_lo.div_ceil(p) * p);
            while m <= seg_hi {
                composite[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        for (i, &c) in composite.iter().enumerate() {
            if !c {
                f(seg_lo + i as u64);
            }
        }
        if seg_hi == hi {
            break;
        }
        seg_lo = seg_hi + 1;
    }
}

/// All primes up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes `<= x` for `x <= limit`.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }
}

pub fn sieve_primes(limit: u64, budget: &SieveBudget) -> Result<PrimeTable, Error> {
    budget.check(limit)?;
    let mut primes = Vec::new();
    for_each_prime_in(2, limit, |p| primes.push(p));
    Ok(PrimeTable { limit, primes })
}

/// Smallest prime factor of every `2 <= n <= limit`.
#[derive(Debug, Clone)]
pub struct SpfTable {
    limit: u64,
    spf: Vec<u32>,
}

impl SpfTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Smallest prime factor of `n`, for `2 <= n <= limit`.
    pub fn spf(&self, n: u64) -> Option<u64> {
        if n < 2 || n > self.limit {
            None
        } else {
            Some(self.spf[n as usize] as u64)
        }
    }

    /// Prime factorization `[(p, alpha)]` with increasing primes; empty for 1.
    pub fn factorize(&self, n: u64) -> Result<Vec<(u64, u32)>, Error> {
        if n == 0 || n > self.limit {
            return Err(Error::OutOfRange {
                n,
                limit: self.limit,
            });
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        let mut m = n;
        while m > 1 {
            let p = self.spf[m as usize] as u64;
            match out.last_mut() {
                Some((q, a)) if *q == p => *a += 1,
                _ => out.push((p, 1)),
            }
            m /= p;
        }
        Ok(out)
    }
}

/// Linear sieve: each composite is written exactly once, by its smallest
/// prime factor.
pub fn spf_sieve(limit: u64, budget: &SieveBudget) -> Result<SpfTable, Error> {
    budget.check(limit)?;
    if limit > SPF_HARD_CAP {
        return Err(Error::Resource {
            requested: limit,
            budget: SPF_HARD_CAP,
        });
    }
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let m = i * p as usize;
            if p > si || m > n {
                break;
            }
            spf[m] = p;
        }
    }
    Ok(SpfTable { limit, spf })
}

/// A per-integer fold over the prime factorization. `visit` is called once
/// per prime factor, in no particular order.
pub trait FactorFold: Sync {
    type State: Copy + Send;

    fn start(&self) -> Self::State;

    fn visit(&self, state: Self::State, p: u64, alpha: u32) -> Self::State;
}

/// Factors every `n` in `[1, x]` segment by segment and hands the folded
/// state of each `n` to `tally`. Segments run in parallel; per-segment
/// tallies are merged with `merge` in segment order.
pub fn fold_factorizations<F, A>(
    x: u64,
    fold: &F,
    budget: &SieveBudget,
    tally: impl Fn(&mut A, u64, F::State) + Sync,
    merge: impl Fn(A, A) -> A + Sync,
) -> Result<A, Error>
where
    F: FactorFold,
    A: Default + Send,
{
    budget.check(x)?;
    let base = small_primes(isqrt(x));
    let segments = x.div_ceil(SEGMENT_LEN);
    let result = (0..segments)
        .into_par_iter()
        .map(|s| {
            let lo = 1 + s * SEGMENT_LEN;
            let hi = x.min(lo + SEGMENT_LEN - 1);
            let mut acc = A::default();
            fold_segment(lo, hi, &base, fold, |n, st| tally(&mut acc, n, st));
            acc
        })
        .collect::<Vec<A>>()
        .into_iter()
        .fold(A::default(), &merge);
    Ok(result)
}

fn fold_segment<F: FactorFold>(
    lo: u64,
    hi: u64,
    base: &[u64],
    fold: &F,
    mut emit: impl FnMut(u64, F::State),
) {
    let len = (hi - lo + 1) as usize;
    let mut rem: Vec<u64> = (lo..=hi).collect();
    let mut state = vec![fold.start(); len];
    for &p in base {
        if p * p > hi {
            break;
        }
        let mut m = lo.div_ceil(p) * p;
        while m <= hi {
            let i = (m - lo) as usize;
            let mut r = rem[i] / p;
            let mut alpha = 1u32;
            while r.is_multiple_of(p) {
                r /= p;
                alpha += 1;
            }
            rem[i] = r;
            state[i] = fold.visit(state[i], p, alpha);
            m += p;
        }
    }
    for i in 0..len {
        // Whatever survives division by all primes <= sqrt(hi) is one prime.
        let st = if rem[i] > 1 {
            fold.visit(state[i], rem[i], 1)
        } else {
            state[i]
        };
        emit(lo + i as u64, st);
    }
}
