//! The `dx` commands.
//!
//! Each `cmd_*` function writes its report to `out`, diagnostics and
//! warnings to `err`, and returns the process exit status. Status depends on
//! the verdict only: 0 Diagonalizable, 2 Defective, 3 Indeterminate, 1 for
//! I/O, parse and numerical errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dx_core::fixtures::{generate, profile_table, FixtureKind, FixtureRequest, GroundTruth};
use dx_core::ionet::{
    expenditure_share_with, parse_io_table, prune_disconnected, simulate_direct, simulate_shock, table_report_with,
    Normalization, ShockReport, ShockScenario, TableOptions,
};
use dx_core::{classify_full, classify_two_step, Error, Matrix, Outcome, Threshold, TolerancePolicy, Verdict};

pub mod render;
pub mod report;

use report::{InputDigest, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_DEFECTIVE: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;

pub fn exit_code(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Diagonalizable => EXIT_OK,
        Outcome::Defective => EXIT_DEFECTIVE,
        Outcome::Indeterminate => EXIT_INDETERMINATE,
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: Error },

    #[error(transparent)]
    Core(#[from] Error),

    #[error("{0}")]
    Usage(String),

    #[error("cannot write output: {0}")]
    Output(#[from] io::Error),

    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "dx", version, about = "Diagonalizability diagnostics for matrices and input-output tables")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a bare-matrix CSV as diagonalizable, defective or indeterminate.
    Classify(ClassifyArgs),
    /// Diagnose the expenditure-share matrix of an input-output table.
    Table(TableArgs),
    /// Propagate a shock through an input-output table.
    Simulate(SimulateArgs),
    /// Write a matrix or table fixture with known Jordan structure.
    Generate(GenerateArgs),
}

/// Thresholds are `abs:<v>`, `rel:<c>` or a bare absolute value.
#[derive(Clone, Debug, Default, Args)]
pub struct ToleranceArgs {
    /// Zero-eigenvalue threshold.
    #[arg(long, value_name = "T")]
    pub tol_zero: Option<Threshold>,
    /// Eigenvalue clustering threshold.
    #[arg(long, value_name = "T")]
    pub tol_cluster: Option<Threshold>,
    /// Singular-value threshold for numerical rank.
    #[arg(long, value_name = "T")]
    pub tol_rank: Option<Threshold>,
}

impl ToleranceArgs {
    pub fn policy(&self) -> CliResult<TolerancePolicy> {
        let mut p = TolerancePolicy::default();
        if let Some(t) = self.tol_zero {
            p = p.with_zero(t);
        }
        if let Some(t) = self.tol_cluster {
            p = p.with_cluster(t);
        }
        if let Some(t) = self.tol_rank {
            p = p.with_rank(t);
        }
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// Bare-matrix CSV: one row per line, no header.
    pub matrix: PathBuf,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    /// Stop after the rank and distinct-eigenvalue checks; never compute
    /// geometric multiplicities.
    #[arg(long)]
    pub two_step_only: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// Input-output table CSV.
    pub table: PathBuf,
    /// Drop sectors with no flows in or out before normalizing.
    #[arg(long)]
    pub prune: bool,
    #[arg(long, default_value_t = Normalization::Column)]
    pub normalization: Normalization,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Input-output table CSV.
    pub table: PathBuf,
    /// Initial deviation of one sector; repeatable.
    #[arg(long = "shock", value_name = "SECTOR=MAGNITUDE", required = true)]
    pub shocks: Vec<String>,
    /// Number of propagation steps.
    #[arg(long, default_value_t = 20)]
    pub horizon: usize,
    /// Simulate a matrix without a certified eigenbasis by direct iteration.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub prune: bool,
    #[arg(long, default_value_t = Normalization::Column)]
    pub normalization: Normalization,
    #[command(flatten)]
    pub tolerances: ToleranceArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// `jordan`, `diagonalizable` or `rank-profile`.
    #[arg(long)]
    pub kind: FixtureKind,
    #[arg(long)]
    pub n: usize,
    /// Rank of the matrix; `rank-profile` only.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Number of nonzero eigenvalues; `rank-profile` only.
    #[arg(long)]
    pub nonzero: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV. Ground truth goes to `<out>.truth.json`.
    #[arg(long)]
    pub out: PathBuf,
    /// Write an input-output table whose share matrix has the requested
    /// profile instead of a bare matrix.
    #[arg(long)]
    pub table: bool,
    #[arg(long)]
    pub json: bool,
}

/// Runs a parsed command line. Errors are reported on `err` with status 1.
///
/// The report is buffered and a closed `out` is ignored, so the status
/// stays a function of the verdict when output is piped into `head`.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let mut buf = Vec::new();
    let result = match cli.command {
        Command::Classify(a) => cmd_classify(&a, &mut buf, err),
        Command::Table(a) => cmd_table(&a, &mut buf, err),
        Command::Simulate(a) => cmd_simulate(&a, &mut buf, err),
        Command::Generate(a) => cmd_generate(&a, &mut buf, err),
    };
    if let Err(e) = out.write_all(&buf).and_then(|()| out.flush()) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            let _ = writeln!(err, "dx: error: cannot write output: {e}");
            return EXIT_ERROR;
        }
    }
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "dx: error: {e}");
            EXIT_ERROR
        }
    }
}

fn read_input(path: &Path) -> CliResult<(Vec<u8>, InputDigest)> {
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let digest = InputDigest::of(path, &bytes);
    Ok((bytes, digest))
}

fn input_error(path: &Path) -> impl FnOnce(Error) -> CliError + '_ {
    move |source| CliError::Input {
        path: path.to_path_buf(),
        source,
    }
}

fn write_warnings(err: &mut dyn Write, warnings: &[String]) -> io::Result<()> {
    for w in warnings {
        writeln!(err, "warning: {w}")?;
    }
    Ok(())
}

pub fn cmd_classify(args: &ClassifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let policy = args.tolerances.policy()?;
    let (bytes, digest) = read_input(&args.matrix)?;
    let text = String::from_utf8(bytes)
        .map_err(|e| CliError::Usage(format!("{}: not UTF-8: {e}", args.matrix.display())))?;
    let a = Matrix::parse_csv(&text).map_err(input_error(&args.matrix))?;
    let verdict = if args.two_step_only {
        classify_two_step(&a, &policy)?
    } else {
        classify_full(&a, &policy)?
    };
    let code = exit_code(verdict.outcome);
    if args.json {
        let warnings = verdict.warnings.clone();
        let tolerances = verdict.tolerances;
        Report::new("classify", vec![digest], policy, Some(tolerances), verdict, warnings, code).write(out)?;
    } else {
        render::verdict(out, &verdict)?;
        write_warnings(err, &verdict.warnings)?;
    }
    Ok(code)
}

pub fn cmd_table(args: &TableArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let policy = args.tolerances.policy()?;
    let (bytes, digest) = read_input(&args.table)?;
    let table = parse_io_table(&bytes).map_err(input_error(&args.table))?;
    let options = TableOptions {
        prune: args.prune,
        normalization: args.normalization,
    };
    let r = table_report_with(&table, &policy, options)?;
    let code = exit_code(r.verdict.outcome);
    if args.json {
        let warnings = r.warnings.clone();
        let tolerances = r.verdict.tolerances;
        Report::new("table", vec![digest], policy, Some(tolerances), r, warnings, code).write(out)?;
    } else {
        render::table(out, &r, args.prune)?;
        write_warnings(err, &r.warnings)?;
    }
    Ok(code)
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationPayload {
    pub verdict: Verdict,
    /// Direct iteration was run on a matrix without a certified eigenbasis.
    pub forced: bool,
    /// Absent when the simulation was refused.
    pub simulation: Option<ShockReport>,
    pub refusal: Option<String>,
}

pub fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult<i32> {
    let policy = args.tolerances.policy()?;
    let (bytes, digest) = read_input(&args.table)?;
    let mut table = parse_io_table(&bytes).map_err(input_error(&args.table))?;
    if args.prune {
        table = prune_disconnected(&table)?.0;
    }
    let shocks = args
        .shocks
        .iter()
        .map(|s| ShockScenario::parse_shock(s))
        .collect::<dx_core::Result<Vec<_>>>()?;
    let scenario = ShockScenario::new(shocks, args.horizon)?;
    let share = expenditure_share_with(&table, args.normalization)?;
    let verdict = classify_full(&share.a, &policy)?;

    let (simulation, forced, refusal, code) = match (verdict.outcome, args.force) {
        (Outcome::Diagonalizable, _) => match simulate_shock(&share, &scenario, &policy) {
            Ok(r) => (Some(r), false, None, EXIT_OK),
            Err(Error::Conditioning(c)) if args.force => {
                let mut r = simulate_direct(&share, &scenario, &policy)?;
                r.warnings
                    .push(format!("eigenvector condition number {c:.3e} is too large for modal analysis"));
                (Some(r), true, None, EXIT_OK)
            }
            Err(e) => return Err(e.into()),
        },
        (_, true) => (Some(simulate_direct(&share, &scenario, &policy)?), true, None, EXIT_OK),
        (outcome, false) => {
            let why = match outcome {
                Outcome::Defective => "the share matrix is defective, so no eigenbasis exists",
                _ => "diagonalizability of the share matrix could not be decided, so no eigenbasis is certified",
            };
            let msg = format!(
                "refusing eigendecomposition-based analysis: {why}; rerun with --force for direct iteration only"
            );
            (None, false, Some(msg), exit_code(outcome))
        }
    };

    if args.json {
        let mut warnings = verdict.warnings.clone();
        if let Some(r) = &simulation {
            warnings.extend(r.warnings.iter().filter(|w| !warnings.contains(w)).cloned().collect::<Vec<_>>());
        }
        let tolerances = verdict.tolerances;
        let payload = SimulationPayload {
            verdict,
            forced,
            simulation,
            refusal,
        };
        Report::new("simulate", vec![digest], policy, Some(tolerances), payload, warnings, code).write(out)?;
        return Ok(code);
    }

    match (&simulation, &refusal) {
        (Some(r), _) => {
            writeln!(out, "{}", verdict.summary())?;
            render::simulation(out, r)?;
            let mut warnings = verdict.warnings.clone();
            warnings.extend(r.warnings.iter().filter(|w| !verdict.warnings.contains(w)).cloned());
            write_warnings(err, &warnings)?;
        }
        (None, Some(msg)) => {
            writeln!(err, "dx: {}: {msg}", args.table.display())?;
            writeln!(err, "diagnosability report:")?;
            render::verdict(err, &verdict)?;
        }
        (None, None) => unreachable!("a simulation is either run or refused"),
    }
    Ok(code)
}

/// Sidecar written next to a generated fixture.
#[derive(Clone, Debug, Serialize)]
pub struct GeneratedFixture {
    /// `matrix` or `io-table`.
    pub format: &'static str,
    pub path: PathBuf,
    pub truth_path: PathBuf,
    pub kind: FixtureKind,
    pub n: usize,
    pub rank: usize,
    pub nonzero: usize,
    pub seed: u64,
    pub expected: Outcome,
    /// Block structure and multiplicities; bare matrices only.
    pub truth: Option<GroundTruth>,
}

fn truth_path(out: &Path) -> PathBuf {
    let mut s = OsString::from(out.as_os_str());
    s.push(".truth.json");
    PathBuf::from(s)
}

pub fn cmd_generate(args: &GenerateArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult<i32> {
    let truth_path = truth_path(&args.out);
    let (csv, fixture) = if args.table {
        let (rank, nonzero) = match args.kind {
            FixtureKind::Diagonalizable => (args.n, args.n),
            FixtureKind::RankProfile => (
                args.rank.ok_or_else(|| CliError::Usage("--kind rank-profile needs --rank".into()))?,
                args.nonzero.ok_or_else(|| CliError::Usage("--kind rank-profile needs --nonzero".into()))?,
            ),
            FixtureKind::Jordan => {
                return Err(CliError::Usage(
                    "--table supports the diagonalizable and rank-profile kinds only".into(),
                ))
            }
        };
        let t = profile_table(args.n, rank, nonzero, 0, args.seed)?;
        // Zeros beyond the zero blocks' count form nontrivial nilpotent blocks.
        let expected = if nonzero < rank {
            Outcome::Defective
        } else {
            Outcome::Diagonalizable
        };
        let g = GeneratedFixture {
            format: "io-table",
            path: args.out.clone(),
            truth_path: truth_path.clone(),
            kind: args.kind,
            n: args.n,
            rank,
            nonzero,
            seed: args.seed,
            expected,
            truth: None,
        };
        (t.to_csv(), g)
    } else {
        let f = generate(&FixtureRequest {
            kind: args.kind,
            n: args.n,
            rank: args.rank,
            nonzero: args.nonzero,
            seed: args.seed,
        })?;
        let g = GeneratedFixture {
            format: "matrix",
            path: args.out.clone(),
            truth_path: truth_path.clone(),
            kind: args.kind,
            n: f.truth.n,
            rank: f.truth.rank,
            nonzero: f.truth.nonzero_count,
            seed: args.seed,
            expected: f.truth.expected,
            truth: Some(f.truth),
        };
        (f.matrix.to_csv(), g)
    };

    let write = |path: &Path, contents: &[u8]| {
        fs::write(path, contents).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    };
    write(&args.out, csv.as_bytes())?;
    write(&truth_path, serde_json::to_string_pretty(&fixture)?.as_bytes())?;

    if args.json {
        let digest = InputDigest::of(&args.out, csv.as_bytes());
        Report::new("generate", vec![digest], TolerancePolicy::default(), None, fixture, Vec::new(), EXIT_OK)
            .write(out)?;
    } else {
        writeln!(
            out,
            "wrote {} ({} {}x{}, rank {}, {} nonzero eigenvalues, expected {})",
            args.out.display(),
            fixture.format,
            fixture.n,
            fixture.n,
            fixture.rank,
            fixture.nonzero,
            fixture.expected
        )?;
        writeln!(out, "wrote {}", truth_path.display())?;
    }
    Ok(EXIT_OK)
}
