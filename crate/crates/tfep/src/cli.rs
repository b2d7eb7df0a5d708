//! Command-line front end: dataset ingestion, simulation studies,
//! coverage experiments, diagnostics, and report emission.
//!
//! Seed precedence: an explicit `--seed` wins; otherwise the `TFEP_SEED`
//! environment variable; otherwise 42. Every seeded report echoes the
//! master seed it used. Exit codes are a stable contract: 0 success,
//! 2 usage error, 3 data error, 4 numerical/degeneracy error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::dataset::{ingest_csv, ColumnSelector, DatasetRef, IngestResult};
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::estimators::diagnostics;
use crate::inference::{ScalingMode, Target};
use crate::montecarlo::{
    coverage_experiment, one_sample_rows, run_one_sample_study, run_two_sample_study,
    two_sample_rows, Cell, StudyConfig, StudyKind,
};
use crate::report::{render, Format, RenderOptions, Report};
use crate::seed::Seed;
use crate::trimming::{parse_trim_flag, TrimMode, TrimSpec};

const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "tfep",
    version,
    about = "Trimmed-moment estimation and heavy-tail-robust confidence intervals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format: csv, json, or markdown.
    #[arg(long, global = true, default_value = "csv")]
    format: String,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Default trimming mode for fraction-based trim levels.
    #[arg(long = "trim-mode", global = true, default_value = "symmetric")]
    trim_mode: String,

    /// Decimal places in CSV and Markdown output (JSON is always full
    /// precision).
    #[arg(long, global = true, default_value_t = 3)]
    precision: usize,

    /// Field delimiter for dataset files.
    #[arg(long, global = true, default_value_t = ',')]
    delimiter: char,

    /// Treat dataset files as headerless (columns addressed by index).
    #[arg(long = "no-header", global = true)]
    no_header: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summary statistics and a Jarque–Bera normality check for a dataset
    /// column.
    Diagnose {
        /// Dataset reference: PATH or PATH:COLUMN (name or 0-based index).
        #[arg(long)]
        data: String,
        /// Diagnose a seeded random subsample of this many rows instead
        /// of the full column.
        #[arg(long)]
        subsample: Option<usize>,
        /// Master seed for --subsample.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Trimmed mean and variance intervals over a grid of trim levels.
    OneSample {
        /// Dataset reference (mutually exclusive with --dist).
        #[arg(long)]
        data: Option<String>,
        /// Distribution to sample, e.g. "normal:3,2" or "pareto:1,1.5".
        #[arg(long)]
        dist: Option<String>,
        /// Sample size for --dist runs.
        #[arg(long)]
        n: Option<usize>,
        /// Trim levels: comma-separated fractions ("0,0.05,0.1"), optionally
        /// prefixed "upper:"/"lower:", or an explicit window "k=K,l=L".
        #[arg(long)]
        trim: String,
        /// Two-sided miscoverage level (intervals have level 1 - alpha).
        #[arg(long)]
        alpha: f64,
        /// Master seed for --dist sampling.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Variance-ratio and mean-difference intervals for two samples.
    TwoSample {
        #[arg(long)]
        data1: Option<String>,
        #[arg(long)]
        data2: Option<String>,
        #[arg(long)]
        dist1: Option<String>,
        #[arg(long)]
        dist2: Option<String>,
        #[arg(long)]
        n1: Option<usize>,
        #[arg(long)]
        n2: Option<usize>,
        #[arg(long)]
        trim: String,
        #[arg(long)]
        alpha: f64,
        /// Variance-ratio scaling: "delta" (scale-invariant, default) or
        /// "paper" (unnormalized plug-ins).
        #[arg(long, default_value = "delta")]
        scaling: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Empirical coverage of the intervals against the population trimmed
    /// parameters, over replicated sampling.
    Coverage {
        #[arg(long)]
        dist: String,
        /// Second distribution, required for mean-diff / var-ratio targets.
        #[arg(long)]
        dist2: Option<String>,
        /// Target parameter: mean, variance, mean-diff, or var-ratio.
        #[arg(long)]
        target: String,
        #[arg(long)]
        trim: String,
        #[arg(long)]
        n: usize,
        /// Second sample size (defaults to --n).
        #[arg(long)]
        n2: Option<usize>,
        /// Number of replications.
        #[arg(long)]
        reps: usize,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        seed: Option<u64>,
        /// Variance-ratio scaling for var-ratio targets.
        #[arg(long, default_value = "delta")]
        scaling: String,
    },
}

/// Entry point used by the binary; returns the process exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// `--seed` flag beats the TFEP_SEED environment variable beats the
/// default. The environment value must parse if it is consulted.
fn resolve_seed(flag: Option<u64>, env: Option<String>) -> Result<u64> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match env {
        Some(text) => text.trim().parse().map_err(|_| {
            Error::Parse(format!(
                "TFEP_SEED must be a 64-bit unsigned integer; got `{text}`"
            ))
        }),
        None => Ok(DEFAULT_SEED),
    }
}

fn seed_from_env(flag: Option<u64>) -> Result<u64> {
    resolve_seed(flag, std::env::var("TFEP_SEED").ok())
}

/// "PATH" or "PATH:COLUMN"; the column is a header name or 0-based index
/// (default: index 0).
fn parse_data_ref(text: &str, delimiter: char, has_header: bool) -> Result<DatasetRef> {
    let (path, column) = match text.rsplit_once(':') {
        Some((path, column)) if !path.is_empty() && !column.is_empty() => {
            (path, column.parse::<ColumnSelector>()?)
        }
        _ => (text, ColumnSelector::Index(0)),
    };
    DatasetRef::new(path, column, delimiter, has_header)
}

fn ingest_with_warning(dataset: &DatasetRef) -> Result<IngestResult> {
    let result = ingest_csv(dataset)?;
    if result.skipped_blank_rows > 0 {
        eprintln!(
            "warning: skipped {} blank row(s) in {}",
            result.skipped_blank_rows,
            dataset.path.display()
        );
    }
    Ok(result)
}

/// When every trim spec is fraction-based in a single mode, the run can be
/// expressed as a simulation-study config (whose JSON echoes itself).
fn uniform_tau_grid(specs: &[TrimSpec]) -> Option<(TrimMode, Vec<f64>)> {
    let mode = match specs.first()? {
        TrimSpec::Symmetric { .. } => TrimMode::Symmetric,
        TrimSpec::Lower { .. } => TrimMode::Lower,
        TrimSpec::Upper { .. } => TrimMode::Upper,
        TrimSpec::Explicit { .. } => return None,
    };
    let mut taus = Vec::with_capacity(specs.len());
    for spec in specs {
        let matches_mode = matches!(
            (mode, spec),
            (TrimMode::Symmetric, TrimSpec::Symmetric { .. })
                | (TrimMode::Lower, TrimSpec::Lower { .. })
                | (TrimMode::Upper, TrimSpec::Upper { .. })
        );
        if !matches_mode {
            return None;
        }
        taus.push(spec.tau()?);
    }
    Some((mode, taus))
}

fn print_cell_warnings(label: &str, level: &str, cell: &Cell) {
    if let Some(ci) = &cell.ci {
        for warning in &ci.warnings {
            eprintln!("warning: {label} at level {level}: {warning}");
        }
    }
}

fn emit(report: Report, cli: &Cli) -> Result<()> {
    // Interval warnings are embedded in JSON; surface them on stderr for
    // the table-oriented formats.
    match &report {
        Report::OneSampleStudy(t) => {
            for row in &t.rows {
                print_cell_warnings("mean", &row.level, &row.mean);
                print_cell_warnings("variance", &row.level, &row.variance);
            }
        }
        Report::OneSampleData { rows, .. } => {
            for row in rows {
                print_cell_warnings("mean", &row.level, &row.mean);
                print_cell_warnings("variance", &row.level, &row.variance);
            }
        }
        Report::TwoSampleStudy(t) => {
            for row in &t.rows {
                print_cell_warnings("variance-ratio", &row.level, &row.variance_ratio);
                print_cell_warnings("mean-difference", &row.level, &row.mean_difference);
            }
        }
        Report::TwoSampleData { rows, .. } => {
            for row in rows {
                print_cell_warnings("variance-ratio", &row.level, &row.variance_ratio);
                print_cell_warnings("mean-difference", &row.level, &row.mean_difference);
            }
        }
        _ => {}
    }

    let options = RenderOptions {
        format: cli.format.parse::<Format>()?,
        precision: cli.precision,
    };
    let text = render(&report, &options)?;
    match &cli.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::Data(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let trim_mode: TrimMode = cli.trim_mode.parse()?;
    let has_header = !cli.no_header;

    match &cli.command {
        Command::Diagnose {
            data,
            subsample,
            seed,
        } => {
            if seed.is_some() && subsample.is_none() {
                return Err(Error::Parameter(
                    "--seed only applies with --subsample; diagnosing the full \
                     column involves no randomness"
                        .into(),
                ));
            }
            let dataset = parse_data_ref(data, cli.delimiter, has_header)?;
            let ingested = ingest_with_warning(&dataset)?;
            let (values, used_seed) = match subsample {
                Some(t) => {
                    let master = seed_from_env(*seed)?;
                    let drawn = crate::dataset::subsample(&ingested.values, *t, Seed::new(master, 0))?;
                    (drawn, Some(master))
                }
                None => (ingested.values, None),
            };
            let report = diagnostics(&values)?;
            emit(
                Report::Diagnostics {
                    report,
                    seed: used_seed,
                },
                &cli,
            )
        }

        Command::OneSample {
            data,
            dist,
            n,
            trim,
            alpha,
            seed,
        } => {
            let specs = parse_trim_flag(trim, trim_mode)?;
            match (data, dist) {
                (Some(_), Some(_)) => Err(Error::Parameter(
                    "give either --data or --dist, not both".into(),
                )),
                (None, None) => Err(Error::Parameter(
                    "one-sample needs a data source: --data <ref> or --dist <spec> --n <N>".into(),
                )),
                (Some(data), None) => {
                    if seed.is_some() {
                        return Err(Error::Parameter(
                            "--seed has no effect on a --data run; remove it".into(),
                        ));
                    }
                    let dataset = parse_data_ref(data, cli.delimiter, has_header)?;
                    let ingested = ingest_with_warning(&dataset)?;
                    let rows = one_sample_rows(&ingested.values, &specs, *alpha)?;
                    emit(
                        Report::OneSampleData {
                            source: data.clone(),
                            seed: None,
                            rows,
                        },
                        &cli,
                    )
                }
                (None, Some(dist)) => {
                    let dist: DistributionSpec = dist.parse()?;
                    let n = n.ok_or_else(|| {
                        Error::Parameter("--dist runs need a sample size: --n <N>".into())
                    })?;
                    let master_seed = seed_from_env(*seed)?;
                    if let Some((mode, tau_grid)) = uniform_tau_grid(&specs) {
                        let config = StudyConfig {
                            kind: StudyKind::OneSample,
                            dist1: dist,
                            dist2: None,
                            n1: n,
                            n2: 0,
                            tau_grid,
                            alpha: *alpha,
                            replications: 1,
                            master_seed,
                            scaling_mode: ScalingMode::default(),
                            trim_mode: mode,
                            targets: Vec::new(),
                        };
                        emit(Report::OneSampleStudy(run_one_sample_study(&config)?), &cli)
                    } else {
                        let values = dist.sample(n, Seed::new(master_seed, 0))?;
                        let rows = one_sample_rows(&values, &specs, *alpha)?;
                        emit(
                            Report::OneSampleData {
                                source: dist.to_string(),
                                seed: Some(master_seed),
                                rows,
                            },
                            &cli,
                        )
                    }
                }
            }
        }

        Command::TwoSample {
            data1,
            data2,
            dist1,
            dist2,
            n1,
            n2,
            trim,
            alpha,
            scaling,
            seed,
        } => {
            let specs = parse_trim_flag(trim, trim_mode)?;
            let scaling_mode: ScalingMode = scaling.parse()?;
            let from_data = data1.is_some() || data2.is_some();
            let from_dist = dist1.is_some() || dist2.is_some();
            if from_data && from_dist {
                return Err(Error::Parameter(
                    "give either --data1/--data2 or --dist1/--dist2, not a mixture".into(),
                ));
            }
            if from_data {
                let (Some(data1), Some(data2)) = (data1, data2) else {
                    return Err(Error::Parameter(
                        "two-sample data runs need both --data1 and --data2".into(),
                    ));
                };
                if seed.is_some() {
                    return Err(Error::Parameter(
                        "--seed has no effect on a --data run; remove it".into(),
                    ));
                }
                let ref1 = parse_data_ref(data1, cli.delimiter, has_header)?;
                let ref2 = parse_data_ref(data2, cli.delimiter, has_header)?;
                let values1 = ingest_with_warning(&ref1)?;
                let values2 = ingest_with_warning(&ref2)?;
                let rows =
                    two_sample_rows(&values1.values, &values2.values, &specs, *alpha, scaling_mode)?;
                emit(
                    Report::TwoSampleData {
                        source: format!("{data1} vs {data2}"),
                        seed: None,
                        rows,
                    },
                    &cli,
                )
            } else if from_dist {
                let (Some(dist1), Some(dist2)) = (dist1, dist2) else {
                    return Err(Error::Parameter(
                        "two-sample distribution runs need both --dist1 and --dist2".into(),
                    ));
                };
                let dist1: DistributionSpec = dist1.parse()?;
                let dist2: DistributionSpec = dist2.parse()?;
                let n1 = n1.ok_or_else(|| {
                    Error::Parameter("--dist runs need sample sizes: --n1 and --n2".into())
                })?;
                let n2 = n2.unwrap_or(n1);
                let master_seed = seed_from_env(*seed)?;
                if let Some((mode, tau_grid)) = uniform_tau_grid(&specs) {
                    let config = StudyConfig {
                        kind: StudyKind::TwoSample,
                        dist1,
                        dist2: Some(dist2),
                        n1,
                        n2,
                        tau_grid,
                        alpha: *alpha,
                        replications: 1,
                        master_seed,
                        scaling_mode,
                        trim_mode: mode,
                        targets: Vec::new(),
                    };
                    emit(Report::TwoSampleStudy(run_two_sample_study(&config)?), &cli)
                } else {
                    let values1 = dist1.sample(n1, Seed::new(master_seed, 0))?;
                    let values2 = dist2.sample(n2, Seed::new(master_seed, 1))?;
                    let rows = two_sample_rows(&values1, &values2, &specs, *alpha, scaling_mode)?;
                    emit(
                        Report::TwoSampleData {
                            source: format!("{dist1} vs {dist2}"),
                            seed: Some(master_seed),
                            rows,
                        },
                        &cli,
                    )
                }
            } else {
                Err(Error::Parameter(
                    "two-sample needs data sources: --data1/--data2 or --dist1/--dist2".into(),
                ))
            }
        }

        Command::Coverage {
            dist,
            dist2,
            target,
            trim,
            n,
            n2,
            reps,
            alpha,
            seed,
            scaling,
        } => {
            let dist1: DistributionSpec = dist.parse()?;
            let dist2 = dist2
                .as_ref()
                .map(|d| d.parse::<DistributionSpec>())
                .transpose()?;
            let target: Target = target.parse()?;
            let scaling_mode: ScalingMode = scaling.parse()?;
            let specs = parse_trim_flag(trim, trim_mode)?;
            let Some((mode, tau_grid)) = uniform_tau_grid(&specs) else {
                return Err(Error::Parameter(
                    "coverage experiments need fraction-based trim levels in a \
                     single mode (explicit k/l windows are not supported here)"
                        .into(),
                ));
            };
            let master_seed = seed_from_env(*seed)?;
            let config = StudyConfig {
                kind: StudyKind::Coverage,
                dist1,
                dist2,
                n1: *n,
                n2: n2.unwrap_or(*n),
                tau_grid,
                alpha: *alpha,
                replications: *reps,
                master_seed,
                scaling_mode,
                trim_mode: mode,
                targets: vec![target],
            };
            emit(Report::Coverage(coverage_experiment(&config)?), &cli)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence_flag_env_default() {
        assert_eq!(resolve_seed(Some(7), Some("99".into())).unwrap(), 7);
        assert_eq!(resolve_seed(None, Some("99".into())).unwrap(), 99);
        assert_eq!(resolve_seed(None, None).unwrap(), DEFAULT_SEED);
        assert!(resolve_seed(None, Some("not-a-number".into())).is_err());
    }

    #[test]
    fn data_ref_grammar() {
        let r = parse_data_ref("incomes.csv:income", ',', true).unwrap();
        assert_eq!(r.column, ColumnSelector::Name("income".into()));
        assert_eq!(r.path, PathBuf::from("incomes.csv"));

        let r = parse_data_ref("incomes.csv:2", ',', true).unwrap();
        assert_eq!(r.column, ColumnSelector::Index(2));

        let r = parse_data_ref("plain.csv", ';', false).unwrap();
        assert_eq!(r.column, ColumnSelector::Index(0));
        assert_eq!(r.delimiter, b';');
        assert!(!r.has_header);
    }

    #[test]
    fn uniform_grid_detection() {
        let specs = parse_trim_flag("0,0.05,0.1", TrimMode::Symmetric).unwrap();
        let (mode, taus) = uniform_tau_grid(&specs).unwrap();
        assert_eq!(mode, TrimMode::Symmetric);
        assert_eq!(taus, vec![0.0, 0.05, 0.1]);

        let specs = parse_trim_flag("upper:0.1,0.2", TrimMode::Symmetric).unwrap();
        let (mode, taus) = uniform_tau_grid(&specs).unwrap();
        assert_eq!(mode, TrimMode::Upper);
        assert_eq!(taus, vec![0.1, 0.2]);

        let specs = parse_trim_flag("k=2,l=9", TrimMode::Symmetric).unwrap();
        assert!(uniform_tau_grid(&specs).is_none());
    }

    #[test]
    fn cli_parses_the_documented_surface() {
        let cli = Cli::try_parse_from([
            "tfep",
            "one-sample",
            "--dist",
            "normal:3,2",
            "--n",
            "1000",
            "--trim",
            "0,0.05,0.1,0.2",
            "--alpha",
            "0.05",
            "--seed",
            "7",
            "--format",
            "json",
        ])
        .unwrap();
        match cli.command {
            Command::OneSample { seed, .. } => assert_eq!(seed, Some(7)),
            other => panic!("wrong command {other:?}"),
        }

        assert!(Cli::try_parse_from(["tfep", "one-sample"]).is_err());
        assert!(Cli::try_parse_from(["tfep", "bogus"]).is_err());
    }
}
