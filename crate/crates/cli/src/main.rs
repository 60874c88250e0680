use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use homothet::bench::{grid_ladder, run_ladder, write_csv, BenchEngine};
use homothet::copies::execution;
use homothet::io::{read_pattern, read_points, write_points};
use homothet::squares::enumerate_squares_with;
use homothet::testkit::{generate, oracle_copies, oracle_hypercubes, oracle_squares, InstanceSpec};
use homothet::{
    compile_pattern, enumerate_copies_with, enumerate_hypercubes_with, CompileConfig, EngineOptions, Error, Mode,
    Occurrence, PointSet, Reporter,
};

#[derive(Parser)]
#[command(name = "homothet", version, about = "Enumerate squares, hypercubes and homothetic pattern copies in point sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All axis-parallel squares of a planar point set.
    Squares(EnumArgs),
    /// All axis-parallel hypercubes of a point set in any dimension 2..=6.
    Hypercubes(EnumArgs),
    /// All copies s*Q + t of a pattern Q.
    Copies {
        #[command(flatten)]
        args: EnumArgs,
        #[command(flatten)]
        pattern: PatternArgs,
    },
    /// Write a generated instance as a point file.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        #[arg(long, global = true)]
        output: Option<PathBuf>,
    },
    /// Run an engine and its brute-force oracle and compare the results.
    Verify {
        engine: VerifyEngine,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CliMode::Auto)]
        mode: CliMode,
        #[arg(long)]
        negative_scale: bool,
        #[arg(long)]
        threshold_override: Option<usize>,
    },
    /// Time an engine on a ladder of grids and fit the log-log slope.
    Bench {
        engine: BenchKind,
        /// Grid sides, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = [100usize, 200, 400])]
        sizes: Vec<usize>,
        /// Grid dimension (default 2, or 3 for hypercubes, or the pattern's).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 3)]
        repetitions: usize,
        #[arg(long)]
        pattern: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CliMode::Auto)]
        mode: CliMode,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EnumArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Jsonl)]
    format: Format,
    /// Replace the short-line threshold (testing only).
    #[arg(long)]
    threshold_override: Option<usize>,
}

#[derive(Args)]
struct PatternArgs {
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long, value_enum, default_value_t = CliMode::Auto)]
    mode: CliMode,
    /// Also report copies with negative scale.
    #[arg(long)]
    negative_scale: bool,
}

#[derive(Subcommand)]
enum GenKind {
    /// The integer grid {0..side-1}^dim.
    Grid {
        #[arg(long)]
        side: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
    /// Uniform integer points in [0, range)^dim, duplicates removed.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        range: i64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Planar columns of consecutive points.
    Tall {
        #[arg(long)]
        columns: usize,
        #[arg(long)]
        height: usize,
        #[arg(long, default_value_t = 1)]
        spacing: i64,
    },
    /// A grid whose lines all extend into long arms.
    Padded {
        #[arg(long)]
        side: usize,
        #[arg(long)]
        pad: usize,
        #[arg(long, default_value_t = 2)]
        dim: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Jsonl,
    Csv,
    Count,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliMode {
    Auto,
    Paper,
    Safe,
}

impl From<CliMode> for Mode {
    fn from(m: CliMode) -> Mode {
        match m {
            CliMode::Auto => Mode::Auto,
            CliMode::Paper => Mode::Paper,
            CliMode::Safe => Mode::Safe,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyEngine {
    Squares,
    Hypercubes,
    Copies,
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchKind {
    Squares,
    Baseline,
    Hypercubes,
    Copies,
}

/// One JSONL output record.
#[derive(Serialize)]
struct Record {
    vertices: Vec<usize>,
    scale: String,
    shift: Vec<String>,
}

enum Failure {
    Engine(Error),
    Usage(String),
    Mismatch,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Engine(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } | Error::Arity { .. } | Error::EmptyInput | Error::InvalidInstance(_) => 2,
        Error::InvalidPattern(_) => 3,
        Error::UnsupportedDimension { .. } | Error::DimensionMismatch { .. } => 4,
        Error::Io(_) => 5,
    }
}

fn threads() -> usize {
    std::env::var("HOMOTHET_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

fn options(threshold: Option<usize>) -> EngineOptions {
    EngineOptions {
        threshold,
        threads: threads(),
        ..EngineOptions::default()
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Failure::Engine(Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display())))))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Streams reports in the chosen format; remembers the first write error.
struct Emitter {
    out: Box<dyn Write>,
    format: Format,
    count: u64,
    error: Option<io::Error>,
}

impl Emitter {
    fn write(&mut self, occ: &Occurrence<'_>) -> io::Result<()> {
        match self.format {
            Format::Count => Ok(()),
            Format::Csv => {
                let ids: Vec<String> = occ.vertex_indices().iter().map(usize::to_string).collect();
                writeln!(self.out, "{}", ids.join(","))
            }
            Format::Jsonl => {
                let report = occ.to_report();
                let record = Record {
                    vertices: report.vertices,
                    scale: report.scale.to_string(),
                    shift: report.translation.iter().map(|x| x.to_string()).collect(),
                };
                serde_json::to_writer(&mut self.out, &record).map_err(io::Error::from)?;
                writeln!(self.out)
            }
        }
    }

    fn finish(mut self) -> Result<(), Failure> {
        if let Some(e) = self.error.take() {
            return Err(e.into());
        }
        if let Format::Count = self.format {
            writeln!(self.out, "{}", self.count)?;
        }
        self.out.flush()?;
        Ok(())
    }
}

impl Reporter for Emitter {
    fn report(&mut self, occ: &Occurrence<'_>) {
        self.count += 1;
        if self.error.is_none() {
            if let Err(e) = self.write(occ) {
                self.error = Some(e);
            }
        }
    }
}

fn enumerate(args: &EnumArgs, run: impl FnOnce(&PointSet, &EngineOptions, &mut Emitter) -> Result<(), Failure>, header: Option<String>) -> Result<(), Failure> {
    let points = read_points(open(&args.input)?)?;
    let mut out = sink(args.output.as_deref())?;
    if let Some(h) = header {
        match args.format {
            Format::Count => eprintln!("{h}"),
            _ => writeln!(out, "{h}")?,
        }
    }
    let mut emitter = Emitter {
        out,
        format: args.format,
        count: 0,
        error: None,
    };
    run(&points, &options(args.threshold_override), &mut emitter)?;
    emitter.finish()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Squares(args) => enumerate(
            &args,
            |p, o, e| {
                enumerate_squares_with(p, o, e)?;
                Ok(())
            },
            None,
        ),
        Command::Hypercubes(args) => enumerate(
            &args,
            |p, o, e| {
                enumerate_hypercubes_with(p, o, e)?;
                Ok(())
            },
            None,
        ),
        Command::Copies { args, pattern } => {
            let q = read_pattern(open(&pattern.pattern)?)?;
            let compiled = compile_pattern(
                &q,
                CompileConfig {
                    allow_negative_scale: pattern.negative_scale,
                },
            )?;
            let mode = Mode::from(pattern.mode);
            let header = format!("# mode: {}", execution(&compiled, mode));
            enumerate(
                &args,
                |p, o, e| {
                    enumerate_copies_with(p, &compiled, mode, o, e)?;
                    Ok(())
                },
                Some(header),
            )
        }
        Command::Gen { kind, output } => {
            let spec = match kind {
                GenKind::Grid { side, dim } => InstanceSpec::Grid { side, dim },
                GenKind::Random { n, range, dim, seed } => InstanceSpec::Random {
                    n,
                    ranges: vec![range; dim],
                    seed,
                },
                GenKind::Tall {
                    columns,
                    height,
                    spacing,
                } => InstanceSpec::TallColumns {
                    columns,
                    height,
                    spacing,
                },
                GenKind::Padded { side, pad, dim } => InstanceSpec::PaddedGrid { side, pad, dim },
            };
            let points = generate(&spec)?;
            let mut out = sink(output.as_deref())?;
            writeln!(out, "# {spec}")?;
            write_points(&mut out, &points)?;
            out.flush()?;
            Ok(())
        }
        Command::Verify {
            engine,
            input,
            pattern,
            mode,
            negative_scale,
            threshold_override,
        } => verify(engine, &input, pattern.as_deref(), mode.into(), negative_scale, threshold_override),
        Command::Bench {
            engine,
            sizes,
            dim,
            repetitions,
            pattern,
            mode,
            output,
        } => {
            let (bench_engine, default_dim) = match engine {
                BenchKind::Squares => (BenchEngine::Squares, 2),
                BenchKind::Baseline => (BenchEngine::SquaresBaseline, 2),
                BenchKind::Hypercubes => (BenchEngine::Hypercubes, 3),
                BenchKind::Copies => {
                    let path = pattern.ok_or_else(|| Failure::Usage("bench copies needs --pattern".into()))?;
                    let q = read_pattern(open(&path)?)?;
                    let d = q.dim();
                    let compiled = compile_pattern(&q, CompileConfig::default())?;
                    (BenchEngine::Copies(Box::new(compiled), mode.into()), d)
                }
            };
            let (rows, slope) = run_ladder(&bench_engine, &grid_ladder(&sizes, dim.unwrap_or(default_dim)), repetitions)?;
            let mut out = sink(output.as_deref())?;
            write_csv(&mut out, &rows, slope)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn verify(
    engine: VerifyEngine,
    input: &Path,
    pattern: Option<&Path>,
    mode: Mode,
    negative_scale: bool,
    threshold: Option<usize>,
) -> Result<(), Failure> {
    let points = read_points(open(input)?)?;
    let options = options(threshold);
    let mut found: Vec<Vec<usize>> = Vec::new();
    let mut collect = |o: &Occurrence<'_>| found.push(o.vertex_indices());
    let (want, noun) = match engine {
        VerifyEngine::Squares => {
            enumerate_squares_with(&points, &options, &mut collect)?;
            (oracle_squares(&points)?, "squares")
        }
        VerifyEngine::Hypercubes => {
            enumerate_hypercubes_with(&points, &options, &mut collect)?;
            (oracle_hypercubes(&points)?, "hypercubes")
        }
        VerifyEngine::Copies => {
            let path = pattern.ok_or_else(|| Failure::Usage("verify copies needs --pattern".into()))?;
            let q = read_pattern(open(path)?)?;
            let compiled = compile_pattern(
                &q,
                CompileConfig {
                    allow_negative_scale: negative_scale,
                },
            )?;
            enumerate_copies_with(&points, &compiled, mode, &options, &mut collect)?;
            (oracle_copies(&points, &q, negative_scale)?, "copies")
        }
    };
    let mut problems: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    for v in &found {
        if !seen.insert(v.clone()) {
            problems.push(format!("duplicate: {v:?}"));
        }
    }
    problems.extend(seen.difference(&want).map(|v| format!("unexpected: {v:?}")));
    problems.extend(want.difference(&seen).map(|v| format!("missing: {v:?}")));
    if problems.is_empty() {
        println!("OK: {} {noun}", want.len());
        return Ok(());
    }
    println!("MISMATCH: engine reported {}, oracle found {}", found.len(), want.len());
    for p in problems.iter().take(10) {
        println!("{p}");
    }
    if problems.len() > 10 {
        println!("... and {} more", problems.len() - 10);
    }
    Err(Failure::Mismatch)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Engine(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
