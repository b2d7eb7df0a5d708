//! Reproducible simulation studies: single-run estimate tables over a trim
//! grid, and replicated coverage experiments that measure how often each
//! interval captures the population trimmed parameter it targets.
//!
//! Determinism contract: every random draw traces to `master_seed` through
//! fixed stream offsets — table studies use streams 0 (first sample) and 1
//! (second sample); coverage replication `r` uses stream `r`, or streams
//! `2r` / `2r + 1` when two samples are needed. Replications run in
//! parallel, are collected in index order, and are aggregated with
//! order-independent reductions (counts and compensated sums), so results
//! are identical for any worker count.

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::estimators::compensated_sum;
use crate::inference::{
    one_sample_mean_ci, one_sample_variance_ci, two_sample_mean_diff_ci,
    two_sample_variance_ratio_ci, ConfidenceInterval, ScalingMode, Target,
};
use crate::seed::Seed;
use crate::trimming::{sort_and_trim, TrimMode, TrimSpec, TrimmedView};

/// Which experiment a [`StudyConfig`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StudyKind {
    #[serde(rename = "one-sample")]
    OneSample,
    #[serde(rename = "two-sample")]
    TwoSample,
    #[serde(rename = "coverage")]
    Coverage,
}

/// Full description of a simulation study. Serialized alongside results so
/// every report is self-describing and reproducible.
#[derive(Debug, Clone, Serialize)]
pub struct StudyConfig {
    pub kind: StudyKind,
    pub dist1: DistributionSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dist2: Option<DistributionSpec>,
    pub n1: usize,
    pub n2: usize,
    /// Trim fractions, strictly increasing, each in [0, 0.5).
    pub tau_grid: Vec<f64>,
    pub alpha: f64,
    pub replications: usize,
    pub master_seed: u64,
    pub scaling_mode: ScalingMode,
    pub trim_mode: TrimMode,
    /// Coverage experiments tally these targets; table studies ignore it.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<Target>,
}

impl StudyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.tau_grid.is_empty() {
            return Err(Error::Parameter("tau grid must not be empty".into()));
        }
        for &tau in &self.tau_grid {
            if !tau.is_finite() || !(0.0..0.5).contains(&tau) {
                return Err(Error::Parameter(format!(
                    "trim fraction must lie in [0, 0.5); got {tau}"
                )));
            }
        }
        if self.tau_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter(
                "tau grid must be strictly increasing".into(),
            ));
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::Parameter(format!(
                "alpha must lie strictly inside (0, 1); got {}",
                self.alpha
            )));
        }
        if self.replications == 0 {
            return Err(Error::Parameter(
                "at least one replication is required".into(),
            ));
        }
        if self.n1 < 2 {
            return Err(Error::Parameter(format!(
                "sample size n1 must be at least 2; got {}",
                self.n1
            )));
        }
        let needs_second = match self.kind {
            StudyKind::TwoSample => true,
            StudyKind::Coverage => self.targets.iter().any(|t| t.is_two_sample()),
            StudyKind::OneSample => false,
        };
        if needs_second {
            if self.dist2.is_none() {
                return Err(Error::Parameter(
                    "this study needs a second distribution (dist2)".into(),
                ));
            }
            if self.n2 < 2 {
                return Err(Error::Parameter(format!(
                    "sample size n2 must be at least 2; got {}",
                    self.n2
                )));
            }
        }
        if self.kind == StudyKind::Coverage && self.targets.is_empty() {
            return Err(Error::Parameter(
                "a coverage experiment needs at least one target".into(),
            ));
        }
        Ok(())
    }
}

/// One interval slot in a study row: either a computed interval or the
/// error that prevented it. Failed cells never abort the table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci: Option<ConfidenceInterval>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl Cell {
    fn err(message: String) -> Self {
        Cell {
            ci: None,
            error: Some(message),
        }
    }
}

impl From<Result<ConfidenceInterval>> for Cell {
    fn from(result: Result<ConfidenceInterval>) -> Self {
        match result {
            Ok(ci) => Cell {
                ci: Some(ci),
                error: None,
            },
            Err(e) => Cell::err(e.to_string()),
        }
    }
}

/// One trim level of a one-sample study: mean and variance intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneSampleRow {
    /// Human-readable trim level (e.g. "0.1", "upper:0.1", "k=30,l=9970").
    pub level: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub mean: Cell,
    pub variance: Cell,
}

/// One trim level of a two-sample study: variance-ratio and
/// mean-difference intervals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoSampleRow {
    pub level: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub variance_ratio: Cell,
    pub mean_difference: Cell,
}

#[derive(Debug, Clone, Serialize)]
pub struct OneSampleTable {
    pub config: StudyConfig,
    pub rows: Vec<OneSampleRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TwoSampleTable {
    pub config: StudyConfig,
    pub rows: Vec<TwoSampleRow>,
}

/// Empirical coverage of one (target, tau) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageResult {
    pub target: Target,
    pub tau: f64,
    /// Nominal confidence level, 1 - alpha.
    pub nominal: f64,
    /// Fraction of replications whose interval contained `true_value`.
    pub empirical_coverage: f64,
    /// Average interval width over replications that produced an interval.
    pub mean_width: f64,
    pub replications: usize,
    /// Population trimmed parameter from the quadrature oracle. Infinite
    /// for an untrimmed-tail variance target with no second moment — the
    /// breakdown case every interval must fail to cover.
    #[serde(serialize_with = "serialize_extended_real")]
    pub true_value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageTable {
    pub config: StudyConfig,
    pub rows: Vec<CoverageResult>,
}

/// JSON has no lexical form for non-finite numbers; emit them as the
/// strings "inf" / "-inf" / "nan" rather than serde_json's default null.
fn serialize_extended_real<S: Serializer>(value: &f64, serializer: S) -> std::result::Result<S::Ok, S::Error> {
    if value.is_finite() {
        serializer.serialize_f64(*value)
    } else if value.is_nan() {
        serializer.serialize_str("nan")
    } else if *value > 0.0 {
        serializer.serialize_str("inf")
    } else {
        serializer.serialize_str("-inf")
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::Parameter(format!(
            "alpha must lie strictly inside (0, 1); got {alpha}"
        )));
    }
    Ok(())
}

/// Build one-sample rows for an already-held dataset, one row per trim
/// spec. This is the shared core of the simulation study and the
/// CSV-ingestion front end.
pub fn one_sample_rows(data: &[f64], specs: &[TrimSpec], alpha: f64) -> Result<Vec<OneSampleRow>> {
    check_alpha(alpha)?;
    let mut rows = Vec::with_capacity(specs.len());
    for &spec in specs {
        let level = spec.to_string();
        let row = match sort_and_trim(data, spec) {
            Ok(view) => OneSampleRow {
                level,
                tau: spec.tau(),
                mean: Cell::from(one_sample_mean_ci(&view, alpha)),
                variance: Cell::from(one_sample_variance_ci(&view, alpha)),
            },
            Err(e) => {
                let message = e.to_string();
                OneSampleRow {
                    level,
                    tau: spec.tau(),
                    mean: Cell::err(message.clone()),
                    variance: Cell::err(message),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Build two-sample rows for a pair of already-held datasets.
pub fn two_sample_rows(
    data1: &[f64],
    data2: &[f64],
    specs: &[TrimSpec],
    alpha: f64,
    mode: ScalingMode,
) -> Result<Vec<TwoSampleRow>> {
    check_alpha(alpha)?;
    let mut rows = Vec::with_capacity(specs.len());
    for &spec in specs {
        let level = spec.to_string();
        let views: Result<(TrimmedView, TrimmedView)> = (|| {
            Ok((sort_and_trim(data1, spec)?, sort_and_trim(data2, spec)?))
        })();
        let row = match views {
            Ok((v1, v2)) => TwoSampleRow {
                level,
                tau: spec.tau(),
                variance_ratio: Cell::from(two_sample_variance_ratio_ci(&v1, &v2, alpha, mode)),
                mean_difference: Cell::from(two_sample_mean_diff_ci(&v1, &v2, alpha)),
            },
            Err(e) => {
                let message = e.to_string();
                TwoSampleRow {
                    level,
                    tau: spec.tau(),
                    variance_ratio: Cell::err(message.clone()),
                    mean_difference: Cell::err(message),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn grid_specs(config: &StudyConfig) -> Result<Vec<TrimSpec>> {
    config
        .tau_grid
        .iter()
        .map(|&tau| config.trim_mode.spec(tau))
        .collect()
}

/// Sample one dataset and emit mean/variance intervals at every trim level.
pub fn run_one_sample_study(config: &StudyConfig) -> Result<OneSampleTable> {
    config.validate()?;
    if config.kind != StudyKind::OneSample {
        return Err(Error::Parameter(
            "run_one_sample_study requires kind = one-sample".into(),
        ));
    }
    let data = config
        .dist1
        .sample(config.n1, Seed::new(config.master_seed, 0))?;
    let rows = one_sample_rows(&data, &grid_specs(config)?, config.alpha)?;
    Ok(OneSampleTable {
        config: config.clone(),
        rows,
    })
}

/// Sample two datasets and emit variance-ratio/mean-difference intervals
/// at every trim level.
pub fn run_two_sample_study(config: &StudyConfig) -> Result<TwoSampleTable> {
    config.validate()?;
    if config.kind != StudyKind::TwoSample {
        return Err(Error::Parameter(
            "run_two_sample_study requires kind = two-sample".into(),
        ));
    }
    let dist2 = config.dist2.as_ref().expect("validated above");
    let data1 = config
        .dist1
        .sample(config.n1, Seed::new(config.master_seed, 0))?;
    let data2 = dist2.sample(config.n2, Seed::new(config.master_seed, 1))?;
    let rows = two_sample_rows(
        &data1,
        &data2,
        &grid_specs(config)?,
        config.alpha,
        config.scaling_mode,
    )?;
    Ok(TwoSampleTable {
        config: config.clone(),
        rows,
    })
}

/// The population quantile window retained by a trim mode at fraction tau.
fn window_for(mode: TrimMode, tau: f64) -> (f64, f64) {
    match mode {
        TrimMode::Symmetric => (tau, 1.0 - tau),
        TrimMode::Lower => (tau, 1.0),
        TrimMode::Upper => (0.0, 1.0 - tau),
    }
}

fn population_window_mean(dist: &DistributionSpec, lo: f64, hi: f64) -> Result<f64> {
    let lower_ok = lo > 0.0 || dist.tail_moment_finite(false, 1);
    let upper_ok = hi < 1.0 || dist.tail_moment_finite(true, 1);
    if !(lower_ok && upper_ok) {
        return Err(Error::Parameter(format!(
            "the trimmed mean of {dist} is undefined over the quantile window \
             ({lo}, {hi}]: an untrimmed tail has an infinite first moment, so \
             the coverage experiment has no true value"
        )));
    }
    dist.window_mean(lo, hi)
}

/// The population trimmed variance, `+inf` when an untrimmed tail has no
/// second moment (the documented breakdown regime for untrimmed intervals
/// on heavy-tailed data).
fn population_window_variance(dist: &DistributionSpec, lo: f64, hi: f64) -> Result<f64> {
    let lower_ok = lo > 0.0 || dist.tail_moment_finite(false, 2);
    let upper_ok = hi < 1.0 || dist.tail_moment_finite(true, 2);
    if !(lower_ok && upper_ok) {
        return Ok(f64::INFINITY);
    }
    dist.window_mean_variance(lo, hi).map(|(_, var)| var)
}

fn resolve_true_value(
    target: Target,
    dist1: &DistributionSpec,
    dist2: Option<&DistributionSpec>,
    mode: TrimMode,
    tau: f64,
) -> Result<f64> {
    let (lo, hi) = window_for(mode, tau);
    match target {
        Target::Mean => population_window_mean(dist1, lo, hi),
        Target::Variance => population_window_variance(dist1, lo, hi),
        Target::MeanDifference => {
            let d2 = dist2.expect("validated: two-sample target has dist2");
            Ok(population_window_mean(dist1, lo, hi)? - population_window_mean(d2, lo, hi)?)
        }
        Target::VarianceRatio => {
            let d2 = dist2.expect("validated: two-sample target has dist2");
            let v1 = population_window_variance(dist1, lo, hi)?;
            let v2 = population_window_variance(d2, lo, hi)?;
            if !v1.is_finite() || !v2.is_finite() {
                return Err(Error::Parameter(format!(
                    "the trimmed variance ratio of {dist1} to {d2} has no finite \
                     true value over the quantile window ({lo}, {hi}]: a trimmed \
                     variance is infinite, so the coverage experiment cannot run"
                )));
            }
            Ok(v1 / v2)
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct CellPlan {
    target: Target,
    tau: f64,
    true_value: f64,
}

#[derive(Debug, Clone, Copy)]
struct RepOutcome {
    produced: bool,
    hit: bool,
    width: f64,
}

const FAILED_REP: RepOutcome = RepOutcome {
    produced: false,
    hit: false,
    width: 0.0,
};

fn rep_outcomes(config: &StudyConfig, plans: &[CellPlan], rep: u64) -> Vec<RepOutcome> {
    let needs_second = config.targets.iter().any(|t| t.is_two_sample());
    let (stream1, stream2) = if needs_second {
        (2 * rep, 2 * rep + 1)
    } else {
        (rep, 0)
    };
    let data1 = match config
        .dist1
        .sample(config.n1, Seed::new(config.master_seed, stream1))
    {
        Ok(d) => d,
        Err(_) => return vec![FAILED_REP; plans.len()],
    };
    let data2 = if needs_second {
        match config
            .dist2
            .as_ref()
            .expect("validated")
            .sample(config.n2, Seed::new(config.master_seed, stream2))
        {
            Ok(d) => Some(d),
            Err(_) => return vec![FAILED_REP; plans.len()],
        }
    } else {
        None
    };

    // One trimmed view per (dataset, tau); shared across targets.
    let views: Vec<(f64, Option<TrimmedView>, Option<TrimmedView>)> = config
        .tau_grid
        .iter()
        .map(|&tau| {
            let spec = match config.trim_mode.spec(tau) {
                Ok(s) => s,
                Err(_) => return (tau, None, None),
            };
            let v1 = sort_and_trim(&data1, spec).ok();
            let v2 = data2
                .as_ref()
                .and_then(|d| sort_and_trim(d, spec).ok());
            (tau, v1, v2)
        })
        .collect();

    plans
        .iter()
        .map(|plan| {
            let entry = views
                .iter()
                .find(|(tau, _, _)| *tau == plan.tau)
                .expect("plan tau comes from the grid");
            let ci = match plan.target {
                Target::Mean => entry
                    .1
                    .as_ref()
                    .ok_or(())
                    .and_then(|v| one_sample_mean_ci(v, config.alpha).map_err(|_| ())),
                Target::Variance => entry
                    .1
                    .as_ref()
                    .ok_or(())
                    .and_then(|v| one_sample_variance_ci(v, config.alpha).map_err(|_| ())),
                Target::MeanDifference => match (&entry.1, &entry.2) {
                    (Some(v1), Some(v2)) => {
                        two_sample_mean_diff_ci(v1, v2, config.alpha).map_err(|_| ())
                    }
                    _ => Err(()),
                },
                Target::VarianceRatio => match (&entry.1, &entry.2) {
                    (Some(v1), Some(v2)) => {
                        two_sample_variance_ratio_ci(v1, v2, config.alpha, config.scaling_mode)
                            .map_err(|_| ())
                    }
                    _ => Err(()),
                },
            };
            match ci {
                Ok(ci) => RepOutcome {
                    produced: true,
                    hit: ci.contains(plan.true_value),
                    width: ci.width(),
                },
                Err(()) => FAILED_REP,
            }
        })
        .collect()
}

/// Replicated coverage experiment: for every (target, tau) cell, tally how
/// often the interval contains the population trimmed parameter.
///
/// All true values are resolved from the population oracle before any
/// sampling; a target with no defined true value is a configuration error.
pub fn coverage_experiment(config: &StudyConfig) -> Result<CoverageTable> {
    config.validate()?;
    if config.kind != StudyKind::Coverage {
        return Err(Error::Parameter(
            "coverage_experiment requires kind = coverage".into(),
        ));
    }

    let mut plans = Vec::with_capacity(config.targets.len() * config.tau_grid.len());
    for &target in &config.targets {
        for &tau in &config.tau_grid {
            let true_value = resolve_true_value(
                target,
                &config.dist1,
                config.dist2.as_ref(),
                config.trim_mode,
                tau,
            )?;
            plans.push(CellPlan {
                target,
                tau,
                true_value,
            });
        }
    }

    let outcomes: Vec<Vec<RepOutcome>> = (0..config.replications as u64)
        .into_par_iter()
        .map(|rep| rep_outcomes(config, &plans, rep))
        .collect();

    let rows = plans
        .iter()
        .enumerate()
        .map(|(idx, plan)| {
            let mut hits = 0usize;
            let mut widths = Vec::with_capacity(config.replications);
            for rep in &outcomes {
                let o = rep[idx];
                if o.produced {
                    widths.push(o.width);
                    if o.hit {
                        hits += 1;
                    }
                }
            }
            let mean_width = if widths.is_empty() {
                f64::NAN
            } else {
                compensated_sum(&widths) / widths.len() as f64
            };
            CoverageResult {
                target: plan.target,
                tau: plan.tau,
                nominal: 1.0 - config.alpha,
                empirical_coverage: hits as f64 / config.replications as f64,
                mean_width,
                replications: config.replications,
                true_value: plan.true_value,
            }
        })
        .collect();

    Ok(CoverageTable {
        config: config.clone(),
        rows,
    })
}
