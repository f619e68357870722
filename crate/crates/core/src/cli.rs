//! Command-line front end.
//!
//! Subcommands: `density`, `series`, `count`, `verify`, `examples`.
//!
//! A pattern comes either inline (`--pattern "1..1,3..inf"`) or from a JSON
//! spec file (`--spec file.json`):
//!
//! ```json
//! {
//!   "default": "1",
//!   "exceptions": { "2": "none", "p<=7": "none", "p in [11, 13]": "1..inf" }
//! }
//! ```
//!
//! Exception keys are a prime, `p<=q` (every prime up to `q`) or
//! `p in [q1, q2, ...]`. Later keys override earlier ones for the same prime.
//!
//! With `--output machine` every result is one JSON object per line, tagged
//! with a `kind` field.
//!
//! Exit codes: 0 ok, 1 usage, 2 target error unreachable, 3 resource cap,
//! 4 verification failure.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::empirical::{compare, count_pattern, count_periodic, CountReport};
use crate::euler::{closed_form, density, density_truncated, CatalogId, DensityEstimate, EulerConfig};
use crate::pattern::{parse_pattern, PrimeAwarePattern};
use crate::primes::{for_each_prime_in, is_prime, SieveBudget};
use crate::series::{density_series, DensitySeries, ExponentWeight};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNREACHABLE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_VERIFY_FAILED: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "expdensity", version, about = "Densities of integers with constrained prime exponents")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[arg(long, value_enum, default_value_t = OutputMode::Human, global = true)]
    pub output: OutputMode,

    /// Largest sieve limit the counting commands may use.
    #[arg(long, default_value_t = 100_000_000, global = true)]
    pub max_sieve: u64,

    /// Largest truncation prime the product search may reach.
    #[arg(long, default_value_t = 100_000_000, global = true)]
    pub max_truncation: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputMode {
    Human,
    Machine,
}

#[derive(Debug, Args)]
pub struct PatternSource {
    /// Exponent pattern in the DSL, e.g. "1..1,3..inf".
    #[arg(long, conflicts_with = "spec")]
    pub pattern: Option<String>,

    /// JSON spec file with a default pattern and per-prime exceptions.
    #[arg(long)]
    pub spec: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Euler-product density with a rigorous bracket.
    Density {
        #[command(flatten)]
        source: PatternSource,
        #[arg(long, default_value_t = 1e-9)]
        error: f64,
        /// Fixed truncation prime instead of the error-driven search.
        #[arg(long)]
        truncation: Option<u64>,
    },
    /// Coefficients d_0..d_K of the density generating function.
    Series {
        /// Pattern whose forbidden exponents weigh 1.
        #[arg(long, conflicts_with = "weight")]
        pattern: Option<String>,
        /// Named weight: "excess" for w(i) = i - 1, "zero" for w = 0.
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, default_value_t = 8)]
        degree: usize,
        #[arg(long, default_value_t = 100_000)]
        truncation: u64,
    },
    /// Sieve count of n <= x satisfying the pattern.
    Count {
        #[command(flatten)]
        source: PatternSource,
        /// Count n whose exponents are all ≡ 1 (mod L) instead.
        #[arg(long)]
        periodic: Option<u32>,
        #[arg(long)]
        x: u64,
    },
    /// Compare the product density with the sieve ratio at x.
    Verify {
        #[command(flatten)]
        source: PatternSource,
        #[arg(long)]
        periodic: Option<u32>,
        #[arg(long, default_value_t = 1_000_000)]
        x: u64,
        /// Defaults to 2e-3 for x >= 10^7 and 5e-3 otherwise.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 1e-9)]
        error: f64,
    },
    /// Table of the closed-form catalog constants.
    Examples {
        #[arg(long, default_value_t = 1e-9)]
        error: f64,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("verification failed")]
    Verification,
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Verification => EXIT_VERIFY_FAILED,
            CliError::Core(Error::TargetUnreachable { .. }) => EXIT_UNREACHABLE,
            CliError::Core(Error::Resource { .. }) => EXIT_RESOURCE,
            CliError::Core(_) => EXIT_USAGE,
        }
    }
}

#[derive(Serialize)]
struct Record<'a, T: Serialize> {
    kind: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<&'a str>,
    #[serde(flatten)]
    body: &'a T,
}

/// Machine-readable density series: the coefficient fields plus the d_0
/// reference bracket flattened to scalars.
#[derive(Serialize)]
struct SeriesRecord<'a> {
    coeffs: &'a [f64],
    truncation_prime: u64,
    mass_deficit: f64,
    stability: &'a [f64],
    d0_reference_value: f64,
    d0_reference_lower: f64,
    d0_reference_upper: f64,
}

struct Printer<'w> {
    mode: OutputMode,
    out: &'w mut dyn Write,
}

impl Printer<'_> {
    fn record<T: Serialize>(&mut self, kind: &str, label: Option<&str>, body: &T) -> std::io::Result<()> {
        let line = serde_json::to_string(&Record { kind, label, body }).expect("records serialize");
        writeln!(self.out, "{line}")
    }

    fn density(&mut self, label: Option<&str>, d: &DensityEstimate) -> std::io::Result<()> {
        match self.mode {
            OutputMode::Machine => self.record("density", label, d),
            OutputMode::Human => {
                if let Some(l) = label {
                    write!(self.out, "{l}: ")?;
                }
                if d.diverges_to_zero {
                    return writeln!(self.out, "density 0 (product diverges to zero)");
                }
                writeln!(
                    self.out,
                    "density {:.12}  bracket [{:.12}, {:.12}]  width {:.2e}  truncation prime {}",
                    d.value,
                    d.lower,
                    d.upper,
                    d.width(),
                    d.truncation_prime
                )
            }
        }
    }

    fn count(&mut self, r: &CountReport) -> std::io::Result<()> {
        match self.mode {
            OutputMode::Machine => self.record("count", None, r),
            OutputMode::Human => writeln!(self.out, "x {}  count {}  ratio {:.9}", r.x, r.count, r.ratio),
        }
    }

    fn series(&mut self, s: &DensitySeries) -> std::io::Result<()> {
        match self.mode {
            OutputMode::Machine => {
                let body = SeriesRecord {
                    coeffs: &s.coeffs,
                    truncation_prime: s.truncation_prime,
                    mass_deficit: s.mass_deficit,
                    stability: &s.stability,
                    d0_reference_value: s.d0_reference.value,
                    d0_reference_lower: s.d0_reference.lower,
                    d0_reference_upper: s.d0_reference.upper,
                };
                self.record("series", None, &body)
            }
            OutputMode::Human => {
                writeln!(self.out, "truncation prime {}", s.truncation_prime)?;
                for (k, (c, d)) in s.coeffs.iter().zip(&s.stability).enumerate() {
                    writeln!(self.out, "d_{k:<3} {c:.12}  (P vs P/2: {d:.1e})")?;
                }
                writeln!(self.out, "mass beyond degree {}: {:.3e}", s.coeffs.len() - 1, s.mass_deficit)?;
                writeln!(
                    self.out,
                    "d_0 reference [{:.12}, {:.12}]",
                    s.d0_reference.lower, s.d0_reference.upper
                )
            }
        }
    }
}

/// Parses an exception key into the primes it names.
fn expand_prime_key(key: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("bad exception key {key:?}; expected a prime, \"p<=q\" or \"p in [..]\""));
    let compact: String = key.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(rest) = compact.strip_prefix("p<=") {
        let q: u64 = rest.parse().map_err(|_| bad())?;
        let mut out = Vec::new();
        for_each_prime_in(2, q, |p| out.push(p));
        return Ok(out);
    }
    if let Some(rest) = compact.strip_prefix("pin") {
        let inner = rest
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .or_else(|| rest.strip_prefix('{').and_then(|r| r.strip_suffix('}')))
            .ok_or_else(bad)?;
        let primes = inner
            .split(',')
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<u64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(&q) = primes.iter().find(|&&q| !is_prime(q)) {
            return Err(CliError::Usage(format!("{q} in key {key:?} is not prime")));
        }
        return Ok(primes);
    }
    let p: u64 = compact.parse().map_err(|_| bad())?;
    if !is_prime(p) {
        return Err(CliError::Usage(format!("exception key {p} is not prime")));
    }
    Ok(vec![p])
}

/// Loads a spec document: `{"default": DSL, "exceptions": {key: DSL}}`.
pub fn parse_spec_document(text: &str) -> Result<PrimeAwarePattern, String> {
    #[derive(serde::Deserialize)]
    #[serde(deny_unknown_fields)]
    struct SpecDoc {
        default: String,
        #[serde(default)]
        exceptions: indexmap_like::OrderedMap,
    }

    let doc: SpecDoc = serde_json::from_str(text).map_err(|e| format!("spec file: {e}"))?;
    let default = parse_pattern(&doc.default).map_err(|e| format!("default pattern: {e}"))?;
    let mut exceptions = BTreeMap::new();
    for (key, dsl) in doc.exceptions.0 {
        let pat = parse_pattern(&dsl).map_err(|e| format!("exception {key:?}: {e}"))?;
        for p in expand_prime_key(&key).map_err(|e| e.to_string())? {
            exceptions.insert(p, pat.clone());
        }
    }
    PrimeAwarePattern::new(default, exceptions).map_err(|e| e.to_string())
}

mod indexmap_like {
    use serde::de::{Deserialize, Deserializer, MapAccess, Visitor};
    use std::fmt;

    /// JSON object kept in document order.
    #[derive(Debug, Default)]
    pub struct OrderedMap(pub Vec<(String, String)>);

    impl<'de> Deserialize<'de> for OrderedMap {
        fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
            struct V;
            impl<'de> Visitor<'de> for V {
                type Value = OrderedMap;
                fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                    f.write_str("an object of pattern strings")
                }
                fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> Result<OrderedMap, A::Error> {
                    let mut out = Vec::new();
                    while let Some((k, v)) = m.next_entry::<String, String>()? {
                        out.push((k, v));
                    }
                    Ok(OrderedMap(out))
                }
            }
            d.deserialize_map(V)
        }
    }
}

fn load_source(src: &PatternSource) -> Result<PrimeAwarePattern, CliError> {
    match (&src.pattern, &src.spec) {
        (Some(text), None) => Ok(PrimeAwarePattern::uniform(
            parse_pattern(text).map_err(|e| CliError::Usage(e.to_string()))?,
        )),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            parse_spec_document(&text).map_err(CliError::Usage)
        }
        (None, None) => Err(CliError::Usage("one of --pattern or --spec is required".into())),
        (Some(_), Some(_)) => Err(CliError::Usage("--pattern and --spec are exclusive".into())),
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Usage(format!("--{name} must be positive, got {v}")))
    }
}

fn default_tolerance(x: u64) -> f64 {
    if x >= 10_000_000 {
        2e-3
    } else {
        5e-3
    }
}

/// The table printed by `examples`.
pub fn catalog_table() -> Vec<CatalogId> {
    vec![
        CatalogId::PowerFree { k: 1 },
        CatalogId::PowerFree { k: 2 },
        CatalogId::PowerFree { k: 3 },
        CatalogId::SquarefreeOrHigh { k: 3 },
        CatalogId::SkipOne { k: 2 },
        CatalogId::SkipOne { k: 3 },
        CatalogId::ExpOdd,
        CatalogId::ModPeriodic { l: 2 },
        CatalogId::ModPeriodic { l: 3 },
        CatalogId::Ex1 { q: 3, k: 2 },
        CatalogId::Ex2 { primes: vec![2], k: 2 },
        CatalogId::Ex2 { primes: vec![2, 3], k: 3 },
        CatalogId::Ex3Single { p: 2, k: 2 },
        CatalogId::Ex3 { k: 2 },
        CatalogId::Ex3 { k: 3 },
    ]
}

fn dispatch(cli: &Cli, printer: &mut Printer<'_>) -> Result<(), CliError> {
    let budget = SieveBudget {
        max_limit: cli.max_sieve,
    };
    let cfg = EulerConfig {
        max_truncation: cli.max_truncation,
        ..EulerConfig::default()
    };
    let io = |e: std::io::Error| CliError::Usage(format!("output: {e}"));

    match &cli.command {
        Command::Density {
            source,
            error,
            truncation,
        } => {
            let pap = load_source(source)?;
            let d = match truncation {
                Some(p) => density_truncated(&pap, *p),
                None => {
                    positive("error", *error)?;
                    density(&pap, *error, &cfg)?
                }
            };
            printer.density(None, &d).map_err(io)?;
        }
        Command::Series {
            pattern,
            weight,
            degree,
            truncation,
        } => {
            let w = match (pattern, weight.as_deref()) {
                (Some(text), None) => {
                    ExponentWeight::indicator(&parse_pattern(text).map_err(|e| CliError::Usage(e.to_string()))?)
                }
                (None, Some("excess")) => ExponentWeight::excess(),
                (None, Some("zero")) => ExponentWeight::zero(),
                (None, Some(other)) => return Err(CliError::Usage(format!("unknown weight {other:?}"))),
                _ => return Err(CliError::Usage("one of --pattern or --weight is required".into())),
            };
            let s = density_series(&w, *degree, *truncation)?;
            printer.series(&s).map_err(io)?;
        }
        Command::Count { source, periodic, x } => {
            let r = match periodic {
                Some(l) => count_periodic(*x, *l, &budget)?,
                None => count_pattern(*x, &load_source(source)?, &budget)?,
            };
            printer.count(&r).map_err(io)?;
        }
        Command::Verify {
            source,
            periodic,
            x,
            tol,
            error,
        } => {
            positive("error", *error)?;
            let tol = tol.unwrap_or_else(|| default_tolerance(*x));
            if !(tol >= 0.0) {
                return Err(CliError::Usage(format!("--tol must be nonnegative, got {tol}")));
            }
            let (est, rep) = match periodic {
                Some(l) => (
                    closed_form(&CatalogId::ModPeriodic { l: *l }, *error, &cfg)?,
                    count_periodic(*x, *l, &budget)?,
                ),
                None => {
                    let pap = load_source(source)?;
                    (density(&pap, *error, &cfg)?, count_pattern(*x, &pap, &budget)?)
                }
            };
            let dev = compare(&est, &rep, tol);
            match printer.mode {
                OutputMode::Machine => {
                    printer.density(None, &est).map_err(io)?;
                    printer.count(&rep).map_err(io)?;
                    printer.record("verify", None, &dev).map_err(io)?;
                }
                OutputMode::Human => {
                    printer.density(Some("euler product"), &est).map_err(io)?;
                    write!(printer.out, "sieve: ").map_err(io)?;
                    printer.count(&rep).map_err(io)?;
                    writeln!(
                        printer.out,
                        "deviation {:+.3e}  tolerance {:.1e}  {}",
                        dev.deviation,
                        dev.tolerance,
                        if dev.pass { "PASS" } else { "FAIL" }
                    )
                    .map_err(io)?;
                }
            }
            if !dev.pass {
                return Err(CliError::Verification);
            }
        }
        Command::Examples { error } => {
            positive("error", *error)?;
            for id in catalog_table() {
                let d = closed_form(&id, *error, &cfg)?;
                let label = id.to_string();
                printer.density(Some(&label), &d).map_err(io)?;
            }
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let mut printer = Printer {
        mode: cli.output,
        out,
    };
    match dispatch(&cli, &mut printer) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_keys() {
        assert_eq!(expand_prime_key("7").unwrap(), vec![7]);
        assert_eq!(expand_prime_key("p<=7").unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(expand_prime_key("p <= 10").unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(expand_prime_key("p in [2, 11]").unwrap(), vec![2, 11]);
        assert_eq!(expand_prime_key("p in {3,5}").unwrap(), vec![3, 5]);
        assert!(expand_prime_key("8").is_err());
        assert!(expand_prime_key("p in [4]").is_err());
        assert!(expand_prime_key("q<=3").is_err());
    }

    #[test]
    fn spec_document() {
        let pap = parse_spec_document(
            r#"{"default": "1", "exceptions": {"p<=5": "none", "3": "1..inf"}}"#,
        )
        .unwrap();
        assert!(pap.pattern_for_prime(2).is_empty());
        assert!(pap.pattern_for_prime(3).is_all());
        assert!(pap.pattern_for_prime(5).is_empty());
        assert_eq!(pap.pattern_for_prime(7), &parse_pattern("1").unwrap());

        let plain = parse_spec_document(r#"{"default": "1..2"}"#).unwrap();
        assert!(plain.exceptions().is_empty());

        assert!(parse_spec_document(r#"{"default": "0..2"}"#).is_err());
        assert!(parse_spec_document(r#"{"default": "1", "extra": 1}"#).is_err());
        assert!(parse_spec_document(r#"{"default": "1", "exceptions": {"9": "1"}}"#).is_err());
    }

    #[test]
    fn tolerance_defaults() {
        assert_eq!(default_tolerance(10_000_000), 2e-3);
        assert_eq!(default_tolerance(1_000_000), 5e-3);
    }
}
