//! The `hazard-risk` command line.
//!
//! Exit codes: 0 ok, 2 output I/O failure, 64 usage or invalid
//! configuration, 65 bad input data, 66 input missing or unreadable.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{resolve_catalog, TableSource};
use crate::error::Error;
use crate::hazard::{EnvironmentReading, DEFAULT_DESIGN_SPEED_MPH, DEFAULT_GRADE};
use crate::report::{self, ASSESSMENT_HEADER};
use crate::risk::{risk_matrix, RiskEngine};
use crate::sampler::{
    run_case_study, RoadParams, SamplerConfig, DEFAULT_SAMPLES_PER_SCENARIO, DEFAULT_SEED,
    DEFAULT_SIGMA_DIVISOR,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;

#[derive(Debug, Parser)]
#[command(
    name = "hazard-risk",
    version,
    about = "Compound roadway-hazard risk scoring from friction and visibility"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate, score and summarize the 16-scenario synthetic dataset.
    Simulate(SimulateArgs),
    /// Score a single reading.
    Assess(AssessArgs),
    /// Score every reading in a CSV log.
    Replay(ReplayArgs),
    /// Print the 5x5 probability-by-severity risk matrix.
    Matrix(MatrixArgs),
}

#[derive(Debug, clap::Args)]
struct TableArgs {
    /// Crash-rate table (CSV). Falls back to $HAZARD_RISK_CONFIG, then the
    /// built-in tables.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
struct RoadArgs {
    /// Road grade as a decimal (0.03 = 3% uphill).
    #[arg(long, default_value_t = DEFAULT_GRADE, allow_negative_numbers = true)]
    grade: f64,
    /// Design (posted) speed in mph.
    #[arg(long, default_value_t = DEFAULT_DESIGN_SPEED_MPH, allow_negative_numbers = true)]
    design_speed: f64,
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Samples per scenario.
    #[arg(long, default_value_t = DEFAULT_SAMPLES_PER_SCENARIO)]
    samples: usize,
    /// sigma = band width / this divisor.
    #[arg(long, default_value_t = DEFAULT_SIGMA_DIVISOR, allow_negative_numbers = true)]
    sigma_divisor: f64,
    #[command(flatten)]
    road: RoadArgs,
    /// Output directory.
    #[arg(long, default_value = "hazard-risk-out")]
    out: PathBuf,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RecordFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MatrixFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, clap::Args)]
struct AssessArgs {
    /// Friction coefficient, (0, 1].
    #[arg(long, allow_negative_numbers = true)]
    mu: f64,
    /// Sight distance in feet.
    #[arg(long, allow_negative_numbers = true)]
    sight_ft: f64,
    #[command(flatten)]
    road: RoadArgs,
    #[arg(long, value_enum, default_value_t = RecordFormat::Json)]
    format: RecordFormat,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Debug, clap::Args)]
struct ReplayArgs {
    /// Readings log with header `timestamp,mu,sight_ft[,grade][,design_speed]`.
    #[arg(long)]
    input: PathBuf,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults for rows without grade / design_speed.
    #[command(flatten)]
    road: RoadArgs,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Debug, clap::Args)]
struct MatrixArgs {
    #[arg(long, value_enum, default_value_t = MatrixFormat::Text)]
    format: MatrixFormat,
}

/// Parses `args` (program name first) and runs the command, returning the
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
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if code == EXIT_OK { out } else { err };
            let _ = write!(sink, "{rendered}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a, out),
        Command::Assess(a) => assess(a, out),
        Command::Replay(a) => replay(a, out, err),
        Command::Matrix(a) => matrix(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure { code, message }) => {
            let _ = writeln!(err, "hazard-risk: {message}");
            code
        }
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl ToString) -> Self {
        Failure {
            code,
            message: message.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn write_out(out: &mut dyn Write, text: &str) -> CmdResult {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_IO, format!("writing output: {e}")))
}

fn load_engine(table: &TableArgs) -> Result<(RiskEngine, TableSource), Failure> {
    let (catalog, source) = resolve_catalog(table.config.as_deref()).map_err(|e| match e {
        Error::Io { .. } => Failure::new(EXIT_NO_INPUT, e),
        other => Failure::new(EXIT_USAGE, other),
    })?;
    let engine = RiskEngine::new(catalog).map_err(|e| Failure::new(EXIT_USAGE, e))?;
    Ok((engine, source))
}

fn simulate(args: SimulateArgs, out: &mut dyn Write) -> CmdResult {
    let sampler = SamplerConfig {
        seed: args.seed,
        samples_per_scenario: args.samples,
        sigma_divisor: args.sigma_divisor,
    };
    sampler
        .validate()
        .map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let road = RoadParams {
        grade: args.road.grade,
        design_speed_mph: args.road.design_speed,
    };
    let (engine, source) = load_engine(&args.table)?;
    // Every sampled friction must stay usable once the grade is added.
    let lowest_mu = engine
        .catalog()
        .friction_bands()
        .iter()
        .map(|b| b.lower())
        .fold(f64::INFINITY, f64::min);
    if !(road.grade.is_finite() && lowest_mu + road.grade > 0.0) {
        return Err(Failure::new(
            EXIT_USAGE,
            format!(
                "invalid grade: mu + grade must stay > 0 for every band; lowest mu is {lowest_mu}, grade is {}",
                road.grade
            ),
        ));
    }
    if !(road.design_speed_mph.is_finite() && road.design_speed_mph > 0.0) {
        return Err(Failure::new(
            EXIT_USAGE,
            format!(
                "invalid design_speed: must be > 0 mph, got {}",
                road.design_speed_mph
            ),
        ));
    }

    let case = run_case_study(&sampler, &road, &engine).map_err(|e| Failure::new(EXIT_DATA, e))?;
    let manifest = report::write_simulation(&args.out, &case, &engine, &sampler, &road, &source)
        .map_err(|e| Failure::new(EXIT_IO, e))?;

    let mut summary = format!(
        "wrote {} files to {}\n{:>4}  {:<28} {:>7} {:>7}\n",
        manifest.outputs.len() + 1,
        args.out.display(),
        "rank",
        "scenario",
        "mean",
        "std"
    );
    for (i, s) in case.stats.iter().enumerate() {
        summary.push_str(&format!(
            "{:>4}  {:<28} {:>7.2} {:>7.2}\n",
            i + 1,
            format!("{} x {}", s.friction_label, s.visibility_label),
            s.mean,
            s.std
        ));
    }
    write_out(out, &summary)
}

fn assess(args: AssessArgs, out: &mut dyn Write) -> CmdResult {
    let reading = EnvironmentReading::with_road(
        args.mu,
        args.sight_ft,
        args.road.grade,
        args.road.design_speed,
    )
    .map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let (engine, _) = load_engine(&args.table)?;
    let a = engine
        .assess(&reading)
        .map_err(|e| Failure::new(EXIT_USAGE, e))?;
    let text = match args.format {
        RecordFormat::Json => {
            let mut s = report::assessment_json(&a).map_err(|e| Failure::new(EXIT_IO, e))?;
            s.push('\n');
            s
        }
        RecordFormat::Csv => report::csv_string(&ASSESSMENT_HEADER, [report::assessment_row(&a)])
            .map_err(|e| Failure::new(EXIT_IO, e))?,
    };
    write_out(out, &text)
}

fn matrix(args: MatrixArgs, out: &mut dyn Write) -> CmdResult {
    let m = risk_matrix();
    let text = match args.format {
        MatrixFormat::Text => report::matrix_text(&m),
        MatrixFormat::Csv => report::heatmap_csv(&m).map_err(|e| Failure::new(EXIT_IO, e))?,
        MatrixFormat::Json => {
            let mut s = serde_json::to_string_pretty(&m).map_err(|e| Failure::new(EXIT_IO, e))?;
            s.push('\n');
            s
        }
    };
    write_out(out, &text)
}

/// Header for replay output.
pub fn replay_header() -> Vec<&'static str> {
    std::iter::once("timestamp")
        .chain(ASSESSMENT_HEADER)
        .collect()
}

fn replay(args: ReplayArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let file = std::fs::File::open(&args.input)
        .map_err(|e| Failure::new(EXIT_NO_INPUT, format!("{}: {e}", args.input.display())))?;
    let (engine, _) = load_engine(&args.table)?;
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| Failure::new(EXIT_NO_INPUT, format!("{}: {e}", args.input.display())))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ts_col), Some(mu_col), Some(sight_col)) =
        (column("timestamp"), column("mu"), column("sight_ft"))
    else {
        return Err(Failure::new(
            EXIT_DATA,
            format!(
                "{}: header must contain timestamp,mu,sight_ft (found '{}')",
                args.input.display(),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    };
    let grade_col = column("grade");
    let speed_col = column("design_speed");

    let mut rows = Vec::new();
    let mut skipped = 0usize;
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map(|p| p.line()).unwrap_or(0);
                let _ = writeln!(err, "warning: line {line}: {e}; skipped");
                skipped += 1;
                continue;
            }
        };
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        match replay_row(
            &record, ts_col, mu_col, sight_col, grade_col, speed_col, &args.road,
        )
        .and_then(|(ts, reading)| {
            engine
                .assess(&reading)
                .map(|a| (ts, a))
                .map_err(|e| e.to_string())
        }) {
            Ok((ts, a)) => {
                let mut row = vec![ts];
                row.extend(report::assessment_row(&a));
                rows.push(row);
            }
            Err(reason) => {
                let _ = writeln!(err, "warning: line {line}: {reason}; skipped");
                skipped += 1;
            }
        }
    }

    if rows.is_empty() {
        return Err(Failure::new(
            EXIT_DATA,
            format!(
                "{}: no valid readings ({skipped} skipped)",
                args.input.display()
            ),
        ));
    }
    let text = report::csv_string(&replay_header(), rows).map_err(|e| Failure::new(EXIT_IO, e))?;
    match &args.out {
        Some(path) => write_file(path, &text),
        None => write_out(out, &text),
    }
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    std::fs::write(path, text)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn replay_row(
    record: &csv::StringRecord,
    ts_col: usize,
    mu_col: usize,
    sight_col: usize,
    grade_col: Option<usize>,
    speed_col: Option<usize>,
    defaults: &RoadArgs,
) -> Result<(String, EnvironmentReading), String> {
    let required = |col: usize, name: &str| -> Result<f64, String> {
        let raw = record
            .get(col)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| format!("missing {name}"))?;
        raw.parse::<f64>()
            .map_err(|_| format!("{name} '{raw}' is not a number"))
    };
    let optional = |col: Option<usize>, name: &str, default: f64| -> Result<f64, String> {
        match col.and_then(|c| record.get(c)).filter(|s| !s.is_empty()) {
            None => Ok(default),
            Some(raw) => raw
                .parse::<f64>()
                .map_err(|_| format!("{name} '{raw}' is not a number")),
        }
    };
    let ts = record
        .get(ts_col)
        .ok_or_else(|| "missing timestamp".to_string())?
        .to_string();
    let mu = required(mu_col, "mu")?;
    let sight = required(sight_col, "sight_ft")?;
    let grade = optional(grade_col, "grade", defaults.grade)?;
    let speed = optional(speed_col, "design_speed", defaults.design_speed)?;
    let reading =
        EnvironmentReading::with_road(mu, sight, grade, speed).map_err(|e| e.to_string())?;
    Ok((ts, reading))
}
