//! Exponent patterns: which prime exponents an integer is allowed to carry.
//!
//! An [`ExponentPattern`] is a normalized union of closed exponent intervals
//! over `1..`. Exponent 0 (the prime does not divide `n`) is always allowed
//! and is never stored. A [`PrimeAwarePattern`] assigns a pattern to every
//! prime: finitely many exceptional primes get their own pattern and all
//! others share a default.

use std::collections::BTreeMap;
use std::fmt;

/// Exponent value used throughout; 32 bits is far beyond anything a 64-bit
/// integer can carry.
pub type Exponent = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("exponent interval starts at 0; exponent 0 is always allowed and cannot be written")]
    ZeroExponent,
    #[error("exponent interval [{lo}, {hi}] has upper end below lower end")]
    Reversed { lo: Exponent, hi: Exponent },
    #[error("at offset {offset} in {text:?}: {reason}")]
    Syntax {
        text: String,
        offset: usize,
        reason: String,
    },
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// One closed interval of allowed exponents. `hi == None` means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExponentInterval {
    lo: Exponent,
    hi: Option<Exponent>,
}

impl ExponentInterval {
    pub fn new(lo: Exponent, hi: Option<Exponent>) -> Result<Self, PatternError> {
        if lo == 0 {
            return Err(PatternError::ZeroExponent);
        }
        if let Some(hi) = hi {
            if hi < lo {
                return Err(PatternError::Reversed { lo, hi });
            }
        }
        // u32::MAX is beyond any exponent a 64-bit integer has; treat as open.
        let hi = hi.filter(|&h| h != Exponent::MAX);
        Ok(Self { lo, hi })
    }

    pub fn bounded(lo: Exponent, hi: Exponent) -> Result<Self, PatternError> {
        Self::new(lo, Some(hi))
    }

    pub fn from(lo: Exponent) -> Result<Self, PatternError> {
        Self::new(lo, None)
    }

    pub fn lo(&self) -> Exponent {
        self.lo
    }

    pub fn hi(&self) -> Option<Exponent> {
        self.hi
    }

    pub fn contains(&self, alpha: Exponent) -> bool {
        alpha >= self.lo && self.hi.is_none_or(|hi| alpha <= hi)
    }
}

impl fmt::Display for ExponentInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.hi {
            Some(hi) if hi == self.lo => write!(f, "{}", self.lo),
            Some(hi) => write!(f, "{}..{}", self.lo, hi),
            None => write!(f, "{}..inf", self.lo),
        }
    }
}

/// Normalized set of allowed exponents `>= 1`.
///
/// Intervals are sorted, pairwise separated by at least one forbidden
/// exponent, and only the last one may be unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ExponentPattern {
    intervals: Vec<ExponentInterval>,
}

/// The forbidden exponents of some pattern, as a sorted list of intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForbiddenDecomposition {
    intervals: Vec<ExponentInterval>,
}

impl ForbiddenDecomposition {
    pub fn intervals(&self) -> &[ExponentInterval] {
        &self.intervals
    }

    pub fn contains(&self, alpha: Exponent) -> bool {
        self.intervals.iter().any(|iv| iv.contains(alpha))
    }
}

impl ExponentPattern {
    /// The pattern with no positive exponent allowed; only `n = 1` qualifies.
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every exponent allowed.
    pub fn all() -> Self {
        Self {
            intervals: vec![ExponentInterval { lo: 1, hi: None }],
        }
    }

    /// Exponents `1..=k-1`, i.e. the k-th-power-free integers.
    pub fn power_free(k: Exponent) -> Self {
        if k <= 1 {
            Self::empty()
        } else {
            Self {
                intervals: vec![ExponentInterval { lo: 1, hi: Some(k - 1) }],
            }
        }
    }

    /// Builds a pattern from raw `(lo, hi)` pairs, sorting and merging
    /// overlapping or adjacent intervals.
    pub fn normalize<I>(raw: I) -> Result<Self, PatternError>
    where
        I: IntoIterator<Item = (Exponent, Option<Exponent>)>,
    {
        let mut ivs = raw
            .into_iter()
            .map(|(lo, hi)| ExponentInterval::new(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_intervals(&mut ivs))
    }

    fn from_intervals(ivs: &mut [ExponentInterval]) -> Self {
        ivs.sort_by_key(|iv| iv.lo);
        let mut out: Vec<ExponentInterval> = Vec::with_capacity(ivs.len());
        for &iv in ivs.iter() {
            match out.last_mut() {
                Some(last) => match last.hi {
                    None => {}
                    Some(hi) if iv.lo as u64 <= hi as u64 + 1 => {
                        last.hi = iv.hi.map(|h| h.max(hi));
                    }
                    Some(_) => out.push(iv),
                },
                None => out.push(iv),
            }
        }
        Self { intervals: out }
    }

    pub fn intervals(&self) -> &[ExponentInterval] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// True when every exponent `>= 1` is allowed.
    pub fn is_all(&self) -> bool {
        self.intervals.len() == 1 && self.intervals[0].lo == 1 && self.intervals[0].hi.is_none()
    }

    pub fn contains(&self, alpha: Exponent) -> bool {
        if alpha == 0 {
            return true;
        }
        // Last interval with lo <= alpha.
        let idx = self.intervals.partition_point(|iv| iv.lo <= alpha);
        idx > 0 && self.intervals[idx - 1].contains(alpha)
    }

    /// Smallest forbidden exponent, or `None` if every exponent is allowed.
    pub fn min_forbidden(&self) -> Option<Exponent> {
        match self.intervals.first() {
            None => Some(1),
            Some(first) if first.lo > 1 => Some(1),
            Some(first) => first.hi.map(|hi| hi + 1),
        }
    }

    pub fn complement(&self) -> ForbiddenDecomposition {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut next: Option<Exponent> = Some(1);
        for iv in &self.intervals {
            let Some(start) = next else { break };
            if iv.lo > start {
                out.push(ExponentInterval {
                    lo: start,
                    hi: Some(iv.lo - 1),
                });
            }
            next = iv.hi.map(|hi| hi + 1);
        }
        if let Some(start) = next {
            out.push(ExponentInterval { lo: start, hi: None });
        }
        ForbiddenDecomposition { intervals: out }
    }

    /// Allowed-set inclusion: every exponent allowed by `self` is allowed by
    /// `other`.
    pub fn is_subset_of(&self, other: &ExponentPattern) -> bool {
        let theirs = other.complement();
        // self ∩ complement(other) must be empty.
        self.intervals.iter().all(|a| {
            theirs.intervals.iter().all(|b| {
                let lo = a.lo.max(b.lo);
                match (a.hi, b.hi) {
                    (Some(x), Some(y)) => lo > x.min(y),
                    (Some(x), None) | (None, Some(x)) => lo > x,
                    (None, None) => false,
                }
            })
        })
    }
}

impl fmt::Display for ExponentPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.intervals.is_empty() {
            return f.write_str("none");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for ExponentPattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pattern(s)
    }
}

/// Parses the pattern DSL: comma-separated terms `a`, `a..b` or `a..inf`.
/// The text `none` (or an empty string) is the empty pattern.
pub fn parse_pattern(text: &str) -> Result<ExponentPattern, PatternError> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "none" {
        return Ok(ExponentPattern::empty());
    }

    let syntax = |offset: usize, reason: String| PatternError::Syntax {
        text: text.to_string(),
        offset,
        reason,
    };

    let mut raw = Vec::new();
    let mut offset = 0;
    for term in text.split(',') {
        let lead = term.len() - term.trim_start().len();
        let pos = offset + lead;
        let t = term.trim();
        offset += term.len() + 1;
        if t.is_empty() {
            return Err(syntax(pos, "empty term".into()));
        }
        let number = |s: &str, at: usize| -> Result<Exponent, PatternError> {
            s.trim()
                .parse::<Exponent>()
                .map_err(|_| syntax(at, format!("expected an exponent, found {:?}", s.trim())))
        };
        let (lo, hi) = match t.split_once("..") {
            None => {
                let v = number(t, pos)?;
                (v, Some(v))
            }
            Some((a, b)) => {
                let lo = number(a, pos)?;
                let b_pos = pos + a.len() + 2;
                let hi = match b.trim() {
                    "inf" | "∞" => None,
                    other => Some(number(other, b_pos)?),
                };
                (lo, hi)
            }
        };
        let iv = ExponentInterval::new(lo, hi).map_err(|e| syntax(pos, e.to_string()))?;
        raw.push(iv);
    }
    Ok(ExponentPattern::from_intervals(&mut raw))
}

/// Pattern per prime: finitely many exceptions plus a default.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimeAwarePattern {
    exceptions: BTreeMap<u64, ExponentPattern>,
    default: ExponentPattern,
}

impl PrimeAwarePattern {
    pub fn uniform(default: ExponentPattern) -> Self {
        Self {
            exceptions: BTreeMap::new(),
            default,
        }
    }

    pub fn new(
        default: ExponentPattern,
        exceptions: impl IntoIterator<Item = (u64, ExponentPattern)>,
    ) -> Result<Self, PatternError> {
        let mut map = BTreeMap::new();
        for (p, pat) in exceptions {
            if !crate::primes::is_prime(p) {
                return Err(PatternError::NotPrime(p));
            }
            map.insert(p, pat);
        }
        Ok(Self {
            exceptions: map,
            default,
        })
    }

    pub fn with_exception(mut self, p: u64, pattern: ExponentPattern) -> Result<Self, PatternError> {
        if !crate::primes::is_prime(p) {
            return Err(PatternError::NotPrime(p));
        }
        self.exceptions.insert(p, pattern);
        Ok(self)
    }

    pub fn default_pattern(&self) -> &ExponentPattern {
        &self.default
    }

    pub fn exceptions(&self) -> &BTreeMap<u64, ExponentPattern> {
        &self.exceptions
    }

    pub fn largest_exception(&self) -> Option<u64> {
        self.exceptions.keys().next_back().copied()
    }

    pub fn pattern_for_prime(&self, p: u64) -> &ExponentPattern {
        self.exceptions.get(&p).unwrap_or(&self.default)
    }
}
