//! `seplines`: compute, validate and recover from separating matrices, and
//! run hull-recovery censuses over order-type databases.
//!
//! Exit codes: 0 success, 1 semantic failure (a check failed, the input is
//! not a separating matrix, census anomalies), 2 input error, 3 the hull
//! search ran out of sizes.

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use seplines::census::{random_records, run_census, CensusOptions, CensusReport};
use seplines::otdb::read_database;
use seplines::recovery::{
    detect_hull_size3, general_hull_search, min_cycle, CandidateStatus, HullCandidate,
};
use seplines::{
    compute_matrix, validate, Configuration, RecoveryError, RecoveryResult, SearchOptions,
    SeparatingMatrix, SquareMatrix,
};

#[derive(Parser)]
#[command(
    name = "seplines",
    version,
    about = "Separating matrices of planar point sets and convex hull recovery"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    /// One JSON document on standard output.
    Structured,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Print the separating matrix of a point file (`-` reads standard input).
    Matrix { points: PathBuf },
    /// Check a matrix against the necessary conditions for separating matrices.
    Validate { matrix: PathBuf },
    /// Recover the convex hull from a separating matrix.
    Recover {
        matrix: PathBuf,
        /// Apply the row-sum filters to the candidates.
        #[arg(long, value_enum, default_value_t = Switch::On)]
        filters: Switch,
        /// Also list candidates rejected by the filters.
        #[arg(long)]
        all_candidates: bool,
    },
    /// Run hull recovery over a database file or a random sample.
    Census {
        /// Database file, e.g. `otypes07.b08`.
        #[arg(required_unless_present = "random", conflicts_with = "random")]
        database: Option<PathBuf>,
        /// Points per configuration; taken from the file name when omitted.
        #[arg(long)]
        n: Option<usize>,
        /// Random configurations instead of a database.
        #[arg(long, num_args = 3, value_names = ["N", "COUNT", "SEED"])]
        random: Option<Vec<u64>>,
        /// Coordinate range for random configurations.
        #[arg(long, default_value_t = 1 << 16)]
        bound: i64,
        #[arg(long, value_enum, default_value_t = Switch::On)]
        filters: Switch,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

enum Failure {
    Input(String),
    Semantic(String),
    Exhausted(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Semantic(_) => 1,
            Failure::Input(_) => 2,
            Failure::Exhausted(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Semantic(m) | Failure::Exhausted(m) => m,
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| Failure::Input(format!("standard input: {e}")))?;
    } else {
        text = fs::read_to_string(path)
            .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) {
    match format {
        Format::Text => print!("{}", text()),
        Format::Structured => {
            println!(
                "{}",
                serde_json::to_string_pretty(value).expect("report types serialize")
            )
        }
    }
}

fn cmd_matrix(format: Format, path: &Path) -> Outcome {
    let config = Configuration::parse(&read_input(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let matrix = compute_matrix(&config);
    #[derive(Serialize)]
    struct Out {
        n: usize,
        rows: Vec<Vec<u64>>,
    }
    let out = Out {
        n: matrix.n(),
        rows: (0..matrix.n()).map(|i| matrix.row(i).to_vec()).collect(),
    };
    emit(format, &out, || matrix.to_text());
    Ok(0)
}

fn parse_matrix(path: &Path) -> Result<SquareMatrix, Failure> {
    SquareMatrix::parse(&read_input(path)?)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn cmd_validate(format: Format, path: &Path) -> Outcome {
    let report = validate(&parse_matrix(path)?);
    emit(format, &report, || report.to_text());
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_recover(format: Format, path: &Path, filters: bool, all_candidates: bool) -> Outcome {
    let raw = parse_matrix(path)?;
    let report = validate(&raw);
    if !report.passed() {
        eprint!("{}", report.to_text());
        return Err(Failure::Semantic(
            "not a separating matrix; refusing to recover".into(),
        ));
    }
    let matrix = SeparatingMatrix::try_from(raw).map_err(|e| Failure::Semantic(e.to_string()))?;
    let n = matrix.n();

    let triangle = if n >= 4 {
        detect_hull_size3(&matrix).map_err(|e| Failure::Semantic(e.to_string()))?
    } else {
        None
    };
    let mut result = match triangle {
        Some(t) => {
            let cycle = min_cycle(&matrix, &t).expect("detected triple is valid");
            RecoveryResult {
                n,
                k: 3,
                candidates: vec![HullCandidate {
                    cycle,
                    k: 3,
                    status: CandidateStatus::ConfirmedSize3,
                    filters: None,
                }],
            }
        }
        None => general_hull_search(
            &matrix,
            SearchOptions {
                max_k: None,
                filters,
            },
        )
        .map_err(|e| match e {
            RecoveryError::Exhausted { .. } => Failure::Exhausted(e.to_string()),
            other => Failure::Semantic(other.to_string()),
        })?,
    };
    if !all_candidates {
        result
            .candidates
            .retain(|c| c.status != CandidateStatus::FilteredOut);
    }
    emit(format, &result, || result.to_text());
    Ok(0)
}

/// Reads `n` from names like `otypes07.b08`.
fn n_from_file_name(path: &Path) -> Option<usize> {
    let name = path.file_name()?.to_str()?;
    let digits: String = name
        .strip_prefix("otypes")?
        .chars()
        .take_while(char::is_ascii_digit)
        .collect();
    digits.parse().ok()
}

#[derive(Serialize)]
struct CensusOut<'a> {
    source: String,
    #[serde(flatten)]
    report: &'a CensusReport,
}

fn cmd_census(
    format: Format,
    database: Option<&Path>,
    n: Option<usize>,
    random: Option<&[u64]>,
    bound: i64,
    options: CensusOptions,
) -> Outcome {
    let census_err = |e: seplines::census::CensusError| Failure::Input(e.to_string());
    let (source, report) = match (database, random) {
        (_, Some(&[rn, count, seed])) => {
            let rn =
                usize::try_from(rn).map_err(|_| Failure::Input("point count too large".into()))?;
            if rn < 3 || bound < 2 {
                return Err(Failure::Input(
                    "random census needs N >= 3 and --bound >= 2".into(),
                ));
            }
            let report =
                run_census(random_records(rn, count, seed, bound), options).map_err(census_err)?;
            (
                format!("random n={rn} count={count} seed={seed} bound={bound}"),
                report,
            )
        }
        (Some(path), _) => {
            let n = n.or_else(|| n_from_file_name(path)).ok_or_else(|| {
                Failure::Input(format!(
                    "cannot tell the point count from {}; pass --n",
                    path.display()
                ))
            })?;
            let reader = read_database(path, n).map_err(|e| Failure::Input(e.to_string()))?;
            let records = reader.info().records;
            let report = run_census(reader, options).map_err(census_err)?;
            if report.total != records {
                return Err(Failure::Input(format!(
                    "read {} of {records} records",
                    report.total
                )));
            }
            (path.display().to_string(), report)
        }
        _ => {
            return Err(Failure::Input(
                "give a database file or --random N COUNT SEED".into(),
            ))
        }
    };
    let out = CensusOut {
        source,
        report: &report,
    };
    emit(format, &out, || {
        format!("source {}\n{}", out.source, report.to_text())
    });
    Ok(if report.failures.is_empty() { 0 } else { 1 })
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Matrix { points } => cmd_matrix(cli.format, points),
        Command::Validate { matrix } => cmd_validate(cli.format, matrix),
        Command::Recover {
            matrix,
            filters,
            all_candidates,
        } => cmd_recover(cli.format, matrix, *filters == Switch::On, *all_candidates),
        Command::Census {
            database,
            n,
            random,
            bound,
            filters,
            jobs,
        } => cmd_census(
            cli.format,
            database.as_deref(),
            *n,
            random.as_deref(),
            *bound,
            CensusOptions {
                filters: *filters == Switch::On,
                jobs: *jobs,
            },
        ),
    }
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
