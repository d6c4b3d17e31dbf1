//! Command-line front end.
//!
//! Matrix files hold `n` on the first line followed by `n` rows of `n`
//! complex entries written `a+bj`, `a-bj`, `a`, or `bj` (whitespace around
//! the sign is allowed). Blank lines and lines starting with `#` are ignored.
//! Basis files store a unitary whose columns are the basis vectors.
//!
//! Exit codes: 0 success, 1 experiment failed, 2 usage, parse or I/O error,
//! 3 validation error. Every failure writes one `[E_...]` line to stderr
//! before any further detail.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use clap::{Parser, Subcommand, ValueEnum};
use regex::Regex;
use serde::Serialize;

use crate::coherence::{measure_value, rewrite_in_basis, MeasureId};
use crate::distance::{basis_distance, is_mutually_unbiased};
use crate::experiments::{
    format_number, run_proposition31_suite, run_purity_sweep, run_srel_demo, run_theorem42_suite, ExperimentReport,
    Proposition31Config, PuritySweepConfig, StateFamily, Theorem42Config, DEFAULT_N_LIST, DEFAULT_SEED,
};
use crate::linalg::{CMatrix, Complex64, DensityMatrix, OrthonormalBasis, Tolerances};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// Tolerance for the mutual-unbiasedness report of `distance`.
pub const MUB_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

const NUM: &str = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?";

static ENTRY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(&format!(
        r"^(?:(?P<ionly>[+-]?(?:{NUM})?)j|(?P<re>[+-]?{NUM})(?:\s*(?P<sign>[+-])\s*(?P<im>{NUM})?\s*j)?)"
    ))
    .expect("valid regex")
});

/// Parses one complex entry, e.g. `0.5-1e-3j`, `2`, `-j`.
pub fn parse_complex(token: &str) -> Option<Complex64> {
    let t = token.trim();
    let m = ENTRY.captures(t)?;
    if m.get(0)?.end() != t.len() {
        return None;
    }
    parse_captures(&m)
}

fn parse_captures(m: &regex::Captures) -> Option<Complex64> {
    if let Some(re) = m.name("re") {
        let re: f64 = re.as_str().parse().ok()?;
        let im = match m.name("sign") {
            None => 0.0,
            Some(sign) => {
                let mag: f64 = m.name("im").map_or(Ok(1.0), |v| v.as_str().parse()).ok()?;
                if sign.as_str() == "-" {
                    -mag
                } else {
                    mag
                }
            }
        };
        Some(Complex64::new(re, im))
    } else {
        let im = match m.name("ionly").map(|v| v.as_str()) {
            None | Some("") | Some("+") => 1.0,
            Some("-") => -1.0,
            Some(v) => v.parse().ok()?,
        };
        Some(Complex64::new(0.0, im))
    }
}

fn parse_row(text: &str, line: usize) -> Result<Vec<Complex64>, ParseError> {
    let mut out = Vec::new();
    let mut rest = text.trim_start();
    while !rest.is_empty() {
        let m = ENTRY.captures(rest).ok_or_else(|| ParseError {
            line,
            message: format!(
                "invalid complex entry near '{}'",
                rest.split_whitespace().next().unwrap_or(rest)
            ),
        })?;
        let end = m.get(0).expect("whole match").end();
        let tail = &rest[end..];
        if !(tail.is_empty() || tail.starts_with(char::is_whitespace)) {
            return Err(ParseError {
                line,
                message: format!(
                    "invalid complex entry near '{}'",
                    rest.split_whitespace().next().unwrap_or(rest)
                ),
            });
        }
        out.push(parse_captures(&m).ok_or_else(|| ParseError {
            line,
            message: "number out of range".to_string(),
        })?);
        rest = tail.trim_start();
    }
    Ok(out)
}

/// Parses the matrix-file text format.
pub fn parse_matrix(text: &str) -> Result<CMatrix, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (first, header) = lines.next().ok_or(ParseError {
        line: 1,
        message: "empty file, expected the dimension n".to_string(),
    })?;
    let n: usize = header.parse().map_err(|_| ParseError {
        line: first,
        message: format!("expected the dimension n, found '{header}'"),
    })?;
    if n == 0 {
        return Err(ParseError {
            line: first,
            message: "dimension must be positive".to_string(),
        });
    }
    let mut entries = Vec::with_capacity(n * n);
    let mut last = first;
    for row in 0..n {
        let (line, text) = lines.next().ok_or(ParseError {
            line: last + 1,
            message: format!("expected {n} rows, found {row}"),
        })?;
        let values = parse_row(text, line)?;
        if values.len() != n {
            return Err(ParseError {
                line,
                message: format!("expected {n} entries, found {}", values.len()),
            });
        }
        entries.extend(values);
        last = line;
    }
    if let Some((line, _)) = lines.next() {
        return Err(ParseError {
            line,
            message: format!("unexpected content after {n} rows"),
        });
    }
    Ok(CMatrix::from_row_slice(n, n, &entries))
}

/// Serialises `m` in the matrix-file format; round-trips through
/// [`parse_matrix`] exactly.
pub fn format_matrix(m: &CMatrix) -> String {
    let mut out = format!("{}\n", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| {
                let z = m[(i, j)];
                format!(
                    "{:?}{}{:?}j",
                    z.re,
                    if z.im.is_sign_negative() { "-" } else { "+" },
                    z.im.abs()
                )
            })
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

#[derive(Parser, Debug)]
#[command(
    name = "basis-coherence",
    version,
    about = "Basis-dependent coherence measures and experiment suites"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Coherence measures of a state in a basis.
    Measure {
        /// Density matrix file.
        state: PathBuf,
        /// Basis file (columns are the basis vectors); standard basis if omitted.
        #[arg(long)]
        basis: Option<PathBuf>,
        /// Comma-separated measures: eta1, eta2, eta_inf, delta, srel.
        #[arg(short, long, value_delimiter = ',', default_value = "eta1,eta2,eta_inf,delta")]
        measures: Vec<String>,
        /// Constant for srel.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Distance between two bases and whether they are mutually unbiased.
    Distance { a: PathBuf, b: PathBuf },
    /// Run an experiment suite and write `<out>/<suite>.csv`.
    Experiment {
        suite: Suite,
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',')]
        n: Option<Vec<usize>>,
        /// Random trials per dimension (theorem42, prop31).
        #[arg(long)]
        trials: Option<usize>,
        /// Haar samples per state (purity).
        #[arg(long)]
        samples: Option<usize>,
        /// Unitary paths per dimension (theorem42).
        #[arg(long)]
        paths: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Comma-separated constants (srel).
        #[arg(long, value_delimiter = ',')]
        c: Option<Vec<f64>>,
        /// Rank of the mixed family (purity).
        #[arg(long, default_value_t = 2)]
        rank: usize,
        /// Measures checked by theorem42 (see `measure`); srel uses the first --c.
        #[arg(short, long, value_delimiter = ',')]
        measures: Option<Vec<String>>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Suite {
    Theorem42,
    Prop31,
    Purity,
    Srel,
}

/// A failure with its exit code and one-line error code.
#[derive(Debug)]
struct Failure {
    exit: i32,
    code: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            exit: EXIT_USAGE,
            code: "E_USAGE",
            message: message.into(),
        }
    }
}

fn error_code(e: &Error) -> &'static str {
    match e {
        Error::NotSquare { .. } => "E_NOT_SQUARE",
        Error::DimensionMismatch { .. } => "E_DIMENSION_MISMATCH",
        Error::NotHermitian { .. } => "E_NOT_HERMITIAN",
        Error::TraceNotOne { .. } => "E_TRACE_NOT_ONE",
        Error::NotPsd { .. } => "E_NOT_PSD",
        Error::NotOrthonormal { .. } => "E_NOT_ORTHONORMAL",
        Error::ConvergenceFailure => "E_CONVERGENCE",
        Error::DegenerateSpectrum { .. } => "E_DEGENERATE_SPECTRUM",
        Error::WeightsNotNormalized { .. } => "E_WEIGHTS",
        Error::PointsNotDistinct { .. } => "E_POINTS",
        Error::NotFound { .. } => "E_NOT_FOUND",
        Error::InvalidArgument(_) => "E_INVALID_ARGUMENT",
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::InvalidArgument(_) => EXIT_USAGE,
            _ => EXIT_VALIDATION,
        };
        Self {
            exit,
            code: error_code(&e),
            message: e.to_string(),
        }
    }
}

fn read_matrix(path: &Path) -> Result<CMatrix, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        exit: EXIT_USAGE,
        code: "E_IO",
        message: format!("{}: {e}", path.display()),
    })?;
    parse_matrix(&text).map_err(|e| Failure {
        exit: EXIT_USAGE,
        code: "E_PARSE",
        message: format!("{}: {e}", path.display()),
    })
}

fn read_basis(path: &Path) -> Result<OrthonormalBasis, Failure> {
    Ok(OrthonormalBasis::from_columns(
        read_matrix(path)?,
        &Tolerances::default(),
    )?)
}

#[derive(Serialize)]
struct MeasureEntry {
    measure: &'static str,
    value: f64,
}

#[derive(Serialize)]
struct MeasureOutput {
    dim: usize,
    measures: Vec<MeasureEntry>,
}

fn cmd_measure(
    state: &Path,
    basis: Option<&Path>,
    names: &[String],
    c: f64,
    json: bool,
    csv: bool,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let ids = names
        .iter()
        .map(|name| MeasureId::parse(name.trim(), c))
        .collect::<crate::Result<Vec<_>>>()?;
    let rho = DensityMatrix::new(&read_matrix(state)?, &Tolerances::default())?;
    let basis = match basis {
        Some(p) => read_basis(p)?,
        None => OrthonormalBasis::standard(rho.dim()),
    };
    let s = rewrite_in_basis(&rho, &basis)?;
    let entries: Vec<MeasureEntry> = ids
        .iter()
        .map(|&id| MeasureEntry {
            measure: id.name(),
            value: measure_value(&s, id),
        })
        .collect();
    let text = if json {
        let body = MeasureOutput {
            dim: rho.dim(),
            measures: entries,
        };
        serde_json::to_string_pretty(&body).map_err(|e| Failure::usage(e.to_string()))? + "\n"
    } else {
        let sep = if csv { "," } else { "\t" };
        let mut t = if csv {
            "measure,value\n".to_string()
        } else {
            String::new()
        };
        for e in &entries {
            let _ = writeln!(t, "{}{sep}{}", e.measure, format_number(e.value));
        }
        t
    };
    write_out(out, &text)?;
    Ok(EXIT_OK)
}

fn cmd_distance(a: &Path, b: &Path, out: &mut dyn Write) -> Result<i32, Failure> {
    let (a, b) = (read_basis(a)?, read_basis(b)?);
    let d = basis_distance(&a, &b)?;
    let mub = is_mutually_unbiased(&a, &b, MUB_TOLERANCE)?;
    write_out(out, &format!("d\t{}\nmub\t{mub}\n", format_number(d)))?;
    Ok(EXIT_OK)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure {
        exit: EXIT_USAGE,
        code: "E_IO",
        message: e.to_string(),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_experiment(
    suite: Suite,
    n: Option<Vec<usize>>,
    trials: Option<usize>,
    samples: Option<usize>,
    paths: Option<usize>,
    seed: u64,
    dir: &Path,
    c: Option<Vec<f64>>,
    rank: usize,
    measures: Option<Vec<String>>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let n_list = n.unwrap_or_else(|| DEFAULT_N_LIST.to_vec());
    if n_list.is_empty() || n_list.contains(&0) {
        return Err(Failure::usage("--n needs positive dimensions"));
    }
    let report: ExperimentReport = match suite {
        Suite::Theorem42 => {
            let defaults = Theorem42Config::default();
            let srel_c = c.as_ref().and_then(|v| v.first().copied()).unwrap_or(1.0);
            let measures = match measures {
                Some(names) => names
                    .iter()
                    .map(|m| MeasureId::parse(m.trim(), srel_c))
                    .collect::<crate::Result<Vec<_>>>()?,
                None => defaults.measures,
            };
            run_theorem42_suite(&Theorem42Config {
                n_list,
                trials: trials.unwrap_or(defaults.trials),
                paths_per_n: paths.unwrap_or(defaults.paths_per_n),
                seed,
                measures,
            })?
        }
        Suite::Prop31 => run_proposition31_suite(&Proposition31Config {
            n_list,
            trials: trials.unwrap_or(Proposition31Config::default().trials),
            seed,
        })?,
        Suite::Purity => {
            let samples = samples.unwrap_or(PuritySweepConfig::default().samples);
            if samples < 2 || rank == 0 {
                return Err(Failure::usage("--samples must be at least 2 and --rank positive"));
            }
            run_purity_sweep(&PuritySweepConfig {
                n_list,
                samples,
                seed,
                families: vec![
                    StateFamily::Pure,
                    StateFamily::Mixed { rank },
                    StateFamily::MaximallyMixed,
                ],
            })?
        }
        Suite::Srel => {
            let c_list = c.unwrap_or_else(|| vec![0.1, 1.0, 10.0, 100.0]);
            for &ci in &c_list {
                MeasureId::srel(ci)?;
            }
            run_srel_demo(&c_list)?
        }
    };
    std::fs::create_dir_all(dir)
        .and_then(|_| report.write_csv(dir))
        .and_then(|path| {
            let verdict = if report.verdict() { "pass" } else { "fail" };
            writeln!(out, "wrote {}\nverdict {verdict}", path.display())
        })
        .map_err(|e| Failure {
            exit: EXIT_USAGE,
            code: "E_IO",
            message: format!("{}: {e}", dir.display()),
        })?;
    if report.verdict() {
        Ok(EXIT_OK)
    } else {
        Err(Failure {
            exit: EXIT_FAIL,
            code: "E_EXPERIMENT_FAILED",
            message: format!("experiment {} did not pass", report.id),
        })
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let first = e.kind().as_str().unwrap_or("invalid arguments");
            let _ = writeln!(err, "[E_USAGE] {first}");
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    let result = match cli.command {
        Command::Measure {
            state,
            basis,
            measures,
            c,
            json,
            csv,
        } => cmd_measure(&state, basis.as_deref(), &measures, c, json, csv, out),
        Command::Distance { a, b } => cmd_distance(&a, &b, out),
        Command::Experiment {
            suite,
            n,
            trials,
            samples,
            paths,
            seed,
            out: dir,
            c,
            rank,
            measures,
        } => cmd_experiment(suite, n, trials, samples, paths, seed, &dir, c, rank, measures, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "[{}] {}", f.code, f.message);
            f.exit
        }
    }
}
