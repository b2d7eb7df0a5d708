//! Trimmed moment estimators and sample-shape diagnostics.
//!
//! All moment quantities funnel through one compensated (Neumaier)
//! summation pass over the retained window, so a value reported by
//! [`moment_summary`] is bit-identical to the one computed by the
//! corresponding standalone estimator, and an untrimmed window reproduces
//! the classical statistics exactly.
//!
//! Conventions: the variance estimator divides by `n_tau - 1`; the central
//! moments divide by `n_tau`. The variance-of-variance plug-in
//! `T^2 = m4 - (S^2)^2` is reported as computed — a non-positive value is
//! flagged, never clamped, because hiding it would silently produce
//! zero-width intervals downstream.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::trimming::TrimmedView;

/// Neumaier-compensated accumulator: exact enough that sums of values with
/// wildly different magnitudes do not lose the small terms.
#[derive(Default)]
struct Accumulator {
    sum: f64,
    comp: f64,
}

impl Accumulator {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

pub(crate) fn compensated_sum(values: &[f64]) -> f64 {
    let mut acc = Accumulator::default();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

/// Mean and the centered power sums of a slice, in one shared pass.
struct CenteredSums {
    mean: f64,
    /// Sums of (x - mean)^k for k = 2, 3, 4.
    p2: f64,
    p3: f64,
    p4: f64,
}

fn centered_sums(values: &[f64]) -> CenteredSums {
    let n = values.len() as f64;
    let mean = compensated_sum(values) / n;
    let mut a2 = Accumulator::default();
    let mut a3 = Accumulator::default();
    let mut a4 = Accumulator::default();
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        a2.add(d2);
        a3.add(d2 * d);
        a4.add(d2 * d2);
    }
    CenteredSums {
        mean,
        p2: a2.total(),
        p3: a3.total(),
        p4: a4.total(),
    }
}

/// Mean of the retained window.
pub fn trimmed_mean(view: &TrimmedView) -> f64 {
    compensated_sum(view.retained()) / view.n_tau() as f64
}

/// Variance of the retained window, divisor `n_tau - 1`.
pub fn trimmed_variance(view: &TrimmedView) -> f64 {
    let sums = centered_sums(view.retained());
    sums.p2 / (view.n_tau() - 1) as f64
}

/// Central moment of order 2, 3, or 4 over the retained window,
/// divisor `n_tau`.
pub fn central_moment(view: &TrimmedView, order: u32) -> Result<f64> {
    let sums = centered_sums(view.retained());
    let n = view.n_tau() as f64;
    match order {
        2 => Ok(sums.p2 / n),
        3 => Ok(sums.p3 / n),
        4 => Ok(sums.p4 / n),
        other => Err(Error::Parameter(format!(
            "central moments are available for orders 2, 3, and 4; got {other}"
        ))),
    }
}

/// The variance-of-variance plug-in `T^2 = m4 - (S^2)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TSquared {
    /// The plug-in value as computed; may be non-positive in small or
    /// nearly two-valued samples.
    pub value: f64,
    /// True when `value <= 0`, in which case no variance interval exists.
    pub degenerate: bool,
}

/// Compute `T^2` over the retained window. Requires at least 3 retained
/// observations — with 2 the plug-in is always degenerate by construction.
pub fn t_squared(view: &TrimmedView) -> Result<TSquared> {
    if view.n_tau() < 3 {
        return Err(Error::Degenerate(format!(
            "the variance-of-variance plug-in needs at least 3 retained \
             observations; got {}",
            view.n_tau()
        )));
    }
    let sums = centered_sums(view.retained());
    let n = view.n_tau() as f64;
    let variance = sums.p2 / (n - 1.0);
    let m4 = sums.p4 / n;
    let value = m4 - variance * variance;
    Ok(TSquared {
        value,
        degenerate: value <= 0.0,
    })
}

/// Every trimmed moment of a window, from a single summation pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentSummary {
    pub mean: f64,
    /// Divisor `n_tau - 1`.
    pub variance: f64,
    /// Central moments, divisor `n_tau`.
    pub m2: f64,
    pub m3: f64,
    pub m4: f64,
    /// `m4 - variance^2`; see [`TSquared`].
    pub t_squared: f64,
    pub n_tau: usize,
}

impl MomentSummary {
    /// True when the variance-of-variance plug-in admits no interval.
    pub fn t_degenerate(&self) -> bool {
        self.t_squared <= 0.0
    }
}

pub fn moment_summary(view: &TrimmedView) -> MomentSummary {
    let sums = centered_sums(view.retained());
    let n = view.n_tau() as f64;
    let variance = sums.p2 / (n - 1.0);
    let m4 = sums.p4 / n;
    MomentSummary {
        mean: sums.mean,
        variance,
        m2: sums.p2 / n,
        m3: sums.p3 / n,
        m4,
        t_squared: m4 - variance * variance,
        n_tau: view.n_tau(),
    }
}

/// Untrimmed sample-shape diagnostics: location, spread, skewness, raw
/// kurtosis (normal = 3), and the Jarque-Bera normality test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    /// Standard deviation, divisor n - 1.
    pub sd: f64,
    pub skewness: f64,
    /// Raw kurtosis m4 / m2^2 (3 for a normal), not excess kurtosis.
    pub kurtosis: f64,
    pub jb_statistic: f64,
    /// Survival of chi-squared(2) at the JB statistic: exp(-JB/2), exact.
    pub jb_p_value: f64,
}

/// Compute diagnostics for a raw (untrimmed) sample.
pub fn diagnostics(values: &[f64]) -> Result<DiagnosticsReport> {
    let n = values.len();
    if n < 8 {
        return Err(Error::Data(format!(
            "shape diagnostics need at least 8 observations; got {n}"
        )));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::Data(format!(
            "observation {i} is not finite ({v}); clean the input first"
        )));
    }
    let sums = centered_sums(values);
    let nf = n as f64;
    let m2 = sums.p2 / nf;
    if m2 <= 0.0 {
        return Err(Error::Degenerate(
            "sample variance is zero; shape diagnostics are undefined".into(),
        ));
    }
    let m3 = sums.p3 / nf;
    let m4 = sums.p4 / nf;
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    let jb = nf / 6.0 * (skewness * skewness + (kurtosis - 3.0).powi(2) / 4.0);
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.total_cmp(b));
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    };
    Ok(DiagnosticsReport {
        n,
        mean: sums.mean,
        median,
        sd: (sums.p2 / (nf - 1.0)).sqrt(),
        skewness,
        kurtosis,
        jb_statistic: jb,
        jb_p_value: (-jb / 2.0).exp(),
    })
}
