//! Asymptotic confidence intervals for trimmed means, variances, and their
//! two-sample contrasts.
//!
//! All intervals are normal-limit intervals: estimate ± z·(scale), with z
//! the standard normal quantile at 1 - alpha/2. The one-sample scales are
//! the plug-ins S/sqrt(n_tau) (mean) and T/sqrt(n_tau) (variance, with
//! T^2 = m4 - S^4). The two-sample statistics are standardized by the
//! combined factors b-hat (mean difference) and a-hat (variance ratio), so
//! their intervals have half-width z / b-hat and z / a-hat.
//!
//! Intervals for nonnegative targets are never clamped at zero; a lower
//! bound below zero is reported as-is with a warning attached, because the
//! bound's position is diagnostic information about the normal
//! approximation's quality at the given sample size.

use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::moment_summary;
use crate::special;
use crate::trimming::TrimmedView;

/// Which asymptotic regime produced an interval: the classical untrimmed
/// empirical process (`fep`) or its trimmed counterpart (`tfep`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fep,
    Tfep,
}

fn method_for(views: &[&TrimmedView]) -> Method {
    if views.iter().all(|v| v.is_untrimmed()) {
        Method::Fep
    } else {
        Method::Tfep
    }
}

/// The population quantity an interval estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Target {
    #[serde(rename = "mean")]
    Mean,
    #[serde(rename = "variance")]
    Variance,
    #[serde(rename = "mean-difference")]
    MeanDifference,
    #[serde(rename = "variance-ratio")]
    VarianceRatio,
}

impl Target {
    pub fn is_two_sample(self) -> bool {
        matches!(self, Target::MeanDifference | Target::VarianceRatio)
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Mean => "mean",
            Target::Variance => "variance",
            Target::MeanDifference => "mean-difference",
            Target::VarianceRatio => "variance-ratio",
        })
    }
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mean" => Ok(Target::Mean),
            "variance" => Ok(Target::Variance),
            "mean-diff" | "mean-difference" => Ok(Target::MeanDifference),
            "var-ratio" | "variance-ratio" => Ok(Target::VarianceRatio),
            other => Err(Error::Parse(format!(
                "unknown target `{other}`; expected mean, variance, mean-diff, or var-ratio"
            ))),
        }
    }
}

/// How the two-sample plug-in variances entering a-hat are scaled.
///
/// `DeltaCorrected` (the default) normalizes both plug-ins by powers of the
/// second sample's variance, which is the form the delta method produces
/// for the ratio statistic and makes the standardized ratio invariant
/// under a common rescaling of both samples. `PaperLiteral` uses the raw
/// unnormalized plug-ins; it is retained for comparison with the classical
/// unnormalized convention, but it is not scale-consistent — rescaling the
/// data rescales its standardized statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScalingMode {
    #[serde(rename = "delta-corrected")]
    DeltaCorrected,
    #[serde(rename = "paper-literal")]
    PaperLiteral,
}

impl Default for ScalingMode {
    fn default() -> Self {
        ScalingMode::DeltaCorrected
    }
}

impl fmt::Display for ScalingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScalingMode::DeltaCorrected => "delta-corrected",
            ScalingMode::PaperLiteral => "paper-literal",
        })
    }
}

impl FromStr for ScalingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "delta" | "delta-corrected" => Ok(ScalingMode::DeltaCorrected),
            "paper" | "paper-literal" => Ok(ScalingMode::PaperLiteral),
            other => Err(Error::Parse(format!(
                "unknown scaling mode `{other}`; expected delta or paper"
            ))),
        }
    }
}

/// Retained-count bookkeeping: one- and two-sample intervals carry
/// different size fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Sizes {
    One { n_tau: usize },
    Two { n1_tau: usize, n2_tau: usize },
}

/// A two-sided confidence interval with its full provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub target: Target,
    pub method: Method,
    pub scaling_mode: ScalingMode,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    /// Confidence level, 1 - alpha.
    pub level: f64,
    #[serde(flatten)]
    pub sizes: Sizes,
    pub warnings: Vec<String>,
}

impl ConfidenceInterval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Standard normal quantile at probability `p` (two-sided critical values
/// use p = 1 - alpha/2). Accurate to well below 1e-9.
pub fn standard_normal_quantile(p: f64) -> Result<f64> {
    special::normal_quantile(p)
}

fn critical_z(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::Parameter(format!(
            "alpha must lie strictly inside (0, 1); got {alpha}"
        )));
    }
    special::normal_quantile(1.0 - alpha / 2.0)
}

const NONNEGATIVE_WARNING: &str =
    "lower bound is below zero for a nonnegative target; the normal \
     approximation is strained at this sample size";

/// Interval for the trimmed population mean: estimate ± z S / sqrt(n_tau).
pub fn one_sample_mean_ci(view: &TrimmedView, alpha: f64) -> Result<ConfidenceInterval> {
    let z = critical_z(alpha)?;
    let s = moment_summary(view);
    if s.variance <= 0.0 {
        return Err(Error::Degenerate(
            "retained window has zero variance; the mean interval is undefined".into(),
        ));
    }
    let half = z * s.variance.sqrt() / (s.n_tau as f64).sqrt();
    Ok(ConfidenceInterval {
        target: Target::Mean,
        method: method_for(&[view]),
        scaling_mode: ScalingMode::default(),
        estimate: s.mean,
        lower: s.mean - half,
        upper: s.mean + half,
        level: 1.0 - alpha,
        sizes: Sizes::One { n_tau: s.n_tau },
        warnings: Vec::new(),
    })
}

/// Interval for the trimmed population variance:
/// estimate ± z T / sqrt(n_tau), with T^2 = m4 - (S^2)^2.
pub fn one_sample_variance_ci(view: &TrimmedView, alpha: f64) -> Result<ConfidenceInterval> {
    let z = critical_z(alpha)?;
    let s = moment_summary(view);
    if s.n_tau < 3 {
        return Err(Error::Degenerate(format!(
            "the variance interval needs at least 3 retained observations; got {}",
            s.n_tau
        )));
    }
    if s.t_squared <= 0.0 {
        return Err(Error::Degenerate(format!(
            "variance-of-variance plug-in is not positive (T^2 = {:.6e}) for \
             n_tau = {}; the variance interval is undefined — a larger \
             retained sample is required",
            s.t_squared, s.n_tau
        )));
    }
    let half = z * s.t_squared.sqrt() / (s.n_tau as f64).sqrt();
    let lower = s.variance - half;
    let mut warnings = Vec::new();
    if lower < 0.0 {
        warnings.push(NONNEGATIVE_WARNING.to_string());
    }
    Ok(ConfidenceInterval {
        target: Target::Variance,
        method: method_for(&[view]),
        scaling_mode: ScalingMode::default(),
        estimate: s.variance,
        lower,
        upper: s.variance + half,
        level: 1.0 - alpha,
        sizes: Sizes::One { n_tau: s.n_tau },
        warnings,
    })
}

/// The combined two-sample standardization factors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoSampleScaling {
    /// Variance-ratio standardization; the ratio CI half-width is z / a_hat.
    pub a_hat: f64,
    /// Mean-difference standardization; the difference CI half-width is
    /// z / b_hat. Independent of the scaling mode.
    pub b_hat: f64,
    /// Per-sample plug-in variances entering a_hat.
    pub t1_sq: f64,
    pub t2_sq: f64,
}

/// Compute a-hat and b-hat for a pair of trimmed samples.
///
/// In delta-corrected mode the plug-ins are
/// `t1^2 = (m4_1 - S1^4) / S2^4` and `t2^2 = S1^4 (m4_2 - S2^4) / S2^8`;
/// in paper-literal mode they are the unnormalized `m4_i - Si^4`. The
/// mean-difference factor `b_hat = sqrt(n1 n2 / (n1 S2^2 + n2 S1^2))` does
/// not depend on the mode.
pub fn two_sample_scalings(
    view1: &TrimmedView,
    view2: &TrimmedView,
    mode: ScalingMode,
) -> Result<TwoSampleScaling> {
    let s1 = moment_summary(view1);
    let s2 = moment_summary(view2);
    if s2.variance <= 0.0 {
        return Err(Error::Degenerate(
            "second sample has zero trimmed variance; the combined scalings \
             are undefined"
                .into(),
        ));
    }
    let (n1, n2) = (s1.n_tau as f64, s2.n_tau as f64);
    let v1sq = s1.variance * s1.variance;
    let v2sq = s2.variance * s2.variance;
    let (t1_sq, t2_sq) = match mode {
        ScalingMode::DeltaCorrected => (
            (s1.m4 - v1sq) / v2sq,
            v1sq * (s2.m4 - v2sq) / (v2sq * v2sq),
        ),
        ScalingMode::PaperLiteral => (s1.m4 - v1sq, s2.m4 - v2sq),
    };
    if t1_sq <= 0.0 || t2_sq <= 0.0 {
        return Err(Error::Degenerate(format!(
            "non-positive plug-in variance (t1^2 = {t1_sq:.6e}, t2^2 = {t2_sq:.6e}); \
             the variance-ratio scaling is undefined for this sample"
        )));
    }
    let a_hat = (n1 * n2 / (n1 * t2_sq + n2 * t1_sq)).sqrt();
    let b_hat = (n1 * n2 / (n1 * s2.variance + n2 * s1.variance)).sqrt();
    Ok(TwoSampleScaling {
        a_hat,
        b_hat,
        t1_sq,
        t2_sq,
    })
}

/// Interval for the difference of trimmed means:
/// (mean1 - mean2) ± z / b_hat.
///
/// b_hat is computed directly from the trimmed variances, so a degenerate
/// fourth-moment plug-in (which only affects the ratio scaling) does not
/// block the mean-difference interval.
pub fn two_sample_mean_diff_ci(
    view1: &TrimmedView,
    view2: &TrimmedView,
    alpha: f64,
) -> Result<ConfidenceInterval> {
    let z = critical_z(alpha)?;
    let s1 = moment_summary(view1);
    let s2 = moment_summary(view2);
    if s1.variance <= 0.0 || s2.variance <= 0.0 {
        return Err(Error::Degenerate(
            "both samples need positive trimmed variance for the \
             mean-difference interval"
                .into(),
        ));
    }
    let (n1, n2) = (s1.n_tau as f64, s2.n_tau as f64);
    let b_hat = (n1 * n2 / (n1 * s2.variance + n2 * s1.variance)).sqrt();
    let estimate = s1.mean - s2.mean;
    let half = z / b_hat;
    Ok(ConfidenceInterval {
        target: Target::MeanDifference,
        method: method_for(&[view1, view2]),
        scaling_mode: ScalingMode::default(),
        estimate,
        lower: estimate - half,
        upper: estimate + half,
        level: 1.0 - alpha,
        sizes: Sizes::Two {
            n1_tau: s1.n_tau,
            n2_tau: s2.n_tau,
        },
        warnings: Vec::new(),
    })
}

/// Interval for the ratio of trimmed variances:
/// (S1^2 / S2^2) ± z / a_hat.
pub fn two_sample_variance_ratio_ci(
    view1: &TrimmedView,
    view2: &TrimmedView,
    alpha: f64,
    mode: ScalingMode,
) -> Result<ConfidenceInterval> {
    let z = critical_z(alpha)?;
    let scaling = two_sample_scalings(view1, view2, mode)?;
    let s1 = moment_summary(view1);
    let s2 = moment_summary(view2);
    let estimate = s1.variance / s2.variance;
    let half = z / scaling.a_hat;
    let lower = estimate - half;
    let mut warnings = Vec::new();
    if lower < 0.0 {
        warnings.push(NONNEGATIVE_WARNING.to_string());
    }
    Ok(ConfidenceInterval {
        target: Target::VarianceRatio,
        method: method_for(&[view1, view2]),
        scaling_mode: mode,
        estimate,
        lower,
        upper: estimate + half,
        level: 1.0 - alpha,
        sizes: Sizes::Two {
            n1_tau: s1.n_tau,
            n2_tau: s2.n_tau,
        },
        warnings,
    })
}
