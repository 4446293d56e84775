use clap::{Args, Parser, Subcommand, ValueEnum};
use dlcurves::enumerate::Strategy;
use dlcurves::report::{self, Report};
use dlcurves::suites::{self, Config, Mode};
use dlcurves::{Error, Family, Params};
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_FAIL: u8 = 1;
const EXIT_BUDGET: u8 = 2;
const EXIT_CONFIG: u8 = 3;

/// Point counts and identity checks for the Deligne–Lusztig curves of
/// type ²A₂, ²B₂ and ²G₂.
#[derive(Parser)]
#[command(name = "dlcurves", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact-degree point counts over F_{q^n}.
    Count {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the family's verification suite.
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Write the F_{q^n}-points as CSV.
    DumpPoints {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "auto")]
        strategy: Strategy,
        #[command(flatten)]
        run: RunArgs,
        /// Output file (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-verify a CSV point dump against the model.
    Ingest {
        #[command(flatten)]
        model: ModelArgs,
        /// CSV file written by dump-points.
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    m: u32,
    /// Characteristic; only su3 offers a choice (2 or 3).
    #[arg(long)]
    p: Option<u32>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "ci")]
    mode: Mode,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (all cores if omitted).
    #[arg(long)]
    threads: Option<usize>,
    /// Record elapsed_ms per check (makes reports run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct OutputArgs {
    /// Report file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("dlcurves: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => EXIT_BUDGET,
        Error::Config(_)
        | Error::Unsupported(_)
        | Error::InvalidModel(_)
        | Error::UnsupportedField { .. }
        | Error::NoEmbedding { .. }
        | Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_) => EXIT_CONFIG,
        _ => EXIT_FAIL,
    }
}

fn setup(model: &ModelArgs, run: &RunArgs) -> Result<(Params, Config), Error> {
    if let Some(t) = run.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }
    let params = suites::params_for(model.family, model.p, model.m)?;
    let mut cfg = Config::new(run.mode, run.seed);
    cfg.timings = run.timings;
    Ok((params, cfg))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Count { model, n, strategy, run, output } => {
            let (params, cfg) = setup(&model, &run)?;
            emit(&suites::count(&params, n, strategy, &cfg)?, &output)
        }
        Command::Verify { model, run, output } => {
            let (params, cfg) = setup(&model, &run)?;
            emit(&suites::verify(&params, &cfg)?, &output)
        }
        Command::DumpPoints { model, n, strategy, run, out } => {
            let (params, cfg) = setup(&model, &run)?;
            let (basis, set) = suites::dump_points(&params, n, strategy, &cfg)?;
            match out {
                Some(path) => report::write_points(File::create(path)?, &basis, &set)?,
                None => report::write_points(io::stdout().lock(), &basis, &set)?,
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Ingest { model, input, run, output } => {
            let (params, cfg) = setup(&model, &run)?;
            let dump = report::read_points(BufReader::new(File::open(input)?))?;
            emit(&suites::ingest(&params, &dump, &cfg)?, &output)
        }
    }
}

fn emit(report: &Report, output: &OutputArgs) -> Result<ExitCode, Error> {
    let mut sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    match output.format {
        Format::Json => sink.write_all(report.to_json()?.as_bytes())?,
        Format::Csv => report.write_csv(&mut sink)?,
    }
    sink.flush()?;
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAIL) })
}
