use exponent_density::empirical::{count_pattern, g_histogram};
use exponent_density::primes::{spf_sieve, SieveBudget, SEGMENT_LEN};
use exponent_density::series::ExponentWeight;
use exponent_density::{parse_pattern, PrimeAwarePattern};

// Counts that straddle a segment boundary, checked against the SPF table.
#[test]
fn counts_across_segment_boundary() {
    let x = SEGMENT_LEN + 20_000;
    let budget = SieveBudget::default();
    let spf = spf_sieve(x, &budget).unwrap();
    let pap = PrimeAwarePattern::uniform(parse_pattern("1,3").unwrap());
    let mut want_pattern = 0u64;
    let mut want_excess = [0u64; 4];
    for n in 1..=x {
        let f = spf.factorize(n).unwrap();
        if f.iter().all(|&(p, a)| pap.pattern_for_prime(p).contains(a)) {
            want_pattern += 1;
        }
        let g: u32 = f.iter().map(|&(_, a)| a - 1).sum();
        if (g as usize) < want_excess.len() {
            want_excess[g as usize] += 1;
        }
    }
    assert_eq!(count_pattern(x, &pap, &budget).unwrap().count, want_pattern);
    let h = g_histogram(x, &ExponentWeight::excess(), 3, &budget).unwrap();
    assert_eq!(h.buckets, want_excess);
}
