//! Trim specifications and order-statistic windows over sorted samples.
//!
//! A trim specification names which order statistics of a sample survive:
//! fractional trimming removes `floor(tau * n)` observations from one or
//! both tails, and explicit trimming names the retained rank window
//! directly. Applying a specification to data yields a [`TrimmedView`] —
//! the sorted retained block plus the window bookkeeping every estimator
//! and interval in this crate is built on.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Which tail(s) a fractional trim removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrimMode {
    Symmetric,
    Upper,
    Lower,
}

impl TrimMode {
    /// Build the trim specification for fraction `tau` in this mode.
    pub fn spec(self, tau: f64) -> Result<TrimSpec> {
        match self {
            TrimMode::Symmetric => TrimSpec::symmetric(tau),
            TrimMode::Upper => TrimSpec::upper(tau),
            TrimMode::Lower => TrimSpec::lower(tau),
        }
    }
}

impl FromStr for TrimMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "symmetric" => Ok(TrimMode::Symmetric),
            "upper" => Ok(TrimMode::Upper),
            "lower" => Ok(TrimMode::Lower),
            other => Err(Error::Parse(format!(
                "unknown trim mode `{other}`; expected symmetric, upper, or lower"
            ))),
        }
    }
}

impl fmt::Display for TrimMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrimMode::Symmetric => "symmetric",
            TrimMode::Upper => "upper",
            TrimMode::Lower => "lower",
        })
    }
}

/// How to trim a sample of size n down to an order-statistic window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrimSpec {
    /// Remove `floor(tau n)` observations from each tail.
    Symmetric { tau: f64 },
    /// Remove `floor(tau n)` observations from the lower tail only.
    Lower { tau: f64 },
    /// Remove `floor(tau n)` observations from the upper tail only.
    Upper { tau: f64 },
    /// Keep the order statistics of rank k+1 through l inclusive.
    Explicit { k: usize, l: usize },
}

impl TrimSpec {
    pub fn symmetric(tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(TrimSpec::Symmetric { tau })
    }

    pub fn lower(tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(TrimSpec::Lower { tau })
    }

    pub fn upper(tau: f64) -> Result<Self> {
        check_tau(tau)?;
        Ok(TrimSpec::Upper { tau })
    }

    pub fn explicit(k: usize, l: usize) -> Result<Self> {
        if k >= l {
            return Err(Error::Parameter(format!(
                "explicit trim window requires k < l; got k={k}, l={l}"
            )));
        }
        Ok(TrimSpec::Explicit { k, l })
    }

    /// The trim fraction, when this is a fraction-based trim.
    pub fn tau(&self) -> Option<f64> {
        match *self {
            TrimSpec::Symmetric { tau } | TrimSpec::Lower { tau } | TrimSpec::Upper { tau } => {
                Some(tau)
            }
            TrimSpec::Explicit { .. } => None,
        }
    }

    /// The retained rank window `(k, l]` for a sample of size `n`.
    pub fn indices(&self, n: usize) -> Result<(usize, usize)> {
        let (k, l) = match *self {
            TrimSpec::Symmetric { tau } => {
                let k = floor_count(tau, n);
                (k, n - k)
            }
            TrimSpec::Lower { tau } => (floor_count(tau, n), n),
            TrimSpec::Upper { tau } => (0, n - floor_count(tau, n)),
            TrimSpec::Explicit { k, l } => {
                if l > n {
                    return Err(Error::Parameter(format!(
                        "explicit trim window (k={k}, l={l}] exceeds the sample size {n}"
                    )));
                }
                (k, l)
            }
        };
        if l < k + 2 {
            return Err(Error::Degenerate(format!(
                "trim {self} leaves {} of {n} observations; at least 2 must be retained",
                l.saturating_sub(k)
            )));
        }
        Ok((k, l))
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !tau.is_finite() || !(0.0..0.5).contains(&tau) {
        return Err(Error::Parameter(format!(
            "trim fraction must lie in [0, 0.5); got {tau}"
        )));
    }
    Ok(())
}

/// `floor(tau * n)` with a guard against floating-point products that land
/// one ulp below an integer (e.g. 0.29 * 100 = 28.999999999999996).
fn floor_count(tau: f64, n: usize) -> usize {
    let prod = tau * n as f64;
    let nearest = prod.round();
    if (prod - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        prod.floor() as usize
    }
}

impl fmt::Display for TrimSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TrimSpec::Symmetric { tau } => write!(f, "{tau}"),
            TrimSpec::Lower { tau } => write!(f, "lower:{tau}"),
            TrimSpec::Upper { tau } => write!(f, "upper:{tau}"),
            TrimSpec::Explicit { k, l } => write!(f, "k={k},l={l}"),
        }
    }
}

/// A sorted sample restricted to its retained order-statistic window.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimmedView {
    retained: Vec<f64>,
    k: usize,
    l: usize,
    n: usize,
}

impl TrimmedView {
    /// The retained observations, sorted ascending.
    pub fn retained(&self) -> &[f64] {
        &self.retained
    }

    /// Original sample size.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of observations removed from the lower tail.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Rank (1-based) of the last retained observation.
    pub fn l(&self) -> usize {
        self.l
    }

    /// Retained count l - k.
    pub fn n_tau(&self) -> usize {
        self.l - self.k
    }

    /// True when the window covers the whole sample, i.e. no trimming
    /// actually happened and classical statistics apply verbatim.
    pub fn is_untrimmed(&self) -> bool {
        self.k == 0 && self.l == self.n
    }
}

/// Validate, sort, and trim a sample.
///
/// Rejects samples with fewer than two observations or any non-finite
/// value (naming the first offending position in the original order).
pub fn sort_and_trim(values: &[f64], spec: TrimSpec) -> Result<TrimmedView> {
    let n = values.len();
    if n < 2 {
        return Err(Error::Data(format!(
            "need at least 2 observations to trim; got {n}"
        )));
    }
    if let Some((i, v)) = values
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite())
    {
        return Err(Error::Data(format!(
            "observation {i} is not finite ({v}); clean the input before trimming"
        )));
    }
    let (k, l) = spec.indices(n)?;
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    sorted.drain(l..);
    sorted.drain(..k);
    Ok(TrimmedView {
        retained: sorted,
        k,
        l,
        n,
    })
}

/// Parse the `--trim` flag grammar.
///
/// * `0.1` or `0,0.05,0.1,0.2` — fractional trim(s) in `default_mode`;
/// * `upper:0.1` / `lower:0.05` — one-sided fractional trim(s), overriding
///   the mode (a comma grid is accepted after the prefix);
/// * `k=3,l=97` — an explicit rank window.
pub fn parse_trim_flag(text: &str, default_mode: TrimMode) -> Result<Vec<TrimSpec>> {
    let t = text.trim();
    if t.is_empty() {
        return Err(Error::Parse(
            "empty trim flag; expected e.g. `0.1`, `0,0.05,0.1`, `upper:0.1`, or `k=3,l=97`"
                .into(),
        ));
    }
    if t.starts_with("k=") {
        return parse_explicit(t).map(|spec| vec![spec]);
    }
    let (mode, rest) = if let Some(rest) = t.strip_prefix("upper:") {
        (TrimMode::Upper, rest)
    } else if let Some(rest) = t.strip_prefix("lower:") {
        (TrimMode::Lower, rest)
    } else {
        (default_mode, t)
    };
    rest.split(',')
        .map(|tok| {
            let tau = tok.trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!(
                    "cannot parse trim fraction `{}` in `{text}`",
                    tok.trim()
                ))
            })?;
            mode.spec(tau)
        })
        .collect()
}

fn parse_explicit(t: &str) -> Result<TrimSpec> {
    let bad = || {
        Error::Parse(format!(
            "invalid explicit trim `{t}`; expected `k=K,l=L` with integers K < L"
        ))
    };
    let (k_part, l_part) = t.split_once(',').ok_or_else(bad)?;
    let k = k_part
        .trim()
        .strip_prefix("k=")
        .ok_or_else(bad)?
        .trim()
        .parse::<usize>()
        .map_err(|_| bad())?;
    let l = l_part
        .trim()
        .strip_prefix("l=")
        .ok_or_else(bad)?
        .trim()
        .parse::<usize>()
        .map_err(|_| bad())?;
    TrimSpec::explicit(k, l)
}
