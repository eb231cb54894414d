use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ballneedlets::acceptance::{self, Criterion};
use ballneedlets::artifacts::{read_coefficients, threads_from_env, write_coefficients, write_csv, Envelope, Polynomial};
use ballneedlets::commands;
use ballneedlets::config::RunConfig;
use ballneedlets::cubature::{build_cubature_with, CubatureOptions, SolverKind};
use ballneedlets::cutoff::Cutoff;
use ballneedlets::kernels::BallWeightParams;
use ballneedlets::needlets::{build_frame, CoefficientSet};
use ballneedlets::Error;

#[derive(Parser)]
#[command(name = "ballneedlets", version, about = "Localized kernels, positive cubature and needlet frames on the unit ball")]
struct Cli {
    /// key = value file overriding the defaults
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized inputs
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the main artifact here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Copy)]
struct Weight {
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Almost uniformly distributed points and their partition
    Points {
        #[arg(long)]
        epsilon: f64,
        #[command(flatten)]
        weight: Weight,
        /// Also write the points as CSV
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Positive cubature rule exact to degree n
    Cubature {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        weight: Weight,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        gamma: Option<f64>,
        /// maxent or simplex
        #[arg(long, default_value = "maxent")]
        solver: String,
    },
    /// Samples of the localized kernel L_n(x, y) as CSV
    Kernel {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        weight: Weight,
        /// a or b
        #[arg(long)]
        cutoff: Option<Cutoff>,
        /// Single x, comma separated
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Option<Vec<f64>>,
        /// Fixed y, comma separated (default: origin)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        y: Option<Vec<f64>>,
        /// Lattice size for x when no single x is given
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Christoffel function along a radius as CSV
    Christoffel {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        weight: Weight,
        #[arg(long, default_value_t = 64)]
        grid: usize,
    },
    /// Needlet frame analysis, synthesis and Parseval checks
    Needlet {
        #[command(subcommand)]
        mode: NeedletMode,
    },
    /// Run the acceptance suite
    Verify {
        /// Criteria to run, by name or number (repeatable)
        #[arg(long)]
        only: Vec<String>,
    },
}

#[derive(Args, Clone)]
struct FrameArgs {
    #[command(flatten)]
    weight: Weight,
    /// Highest level J
    #[arg(long = "levels", short = 'J')]
    levels: Option<usize>,
    /// Also write the frame as JSON
    #[arg(long)]
    frame: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct PolyArgs {
    /// Terms `coef:a1,...,ad` separated by spaces
    #[arg(long, conflicts_with = "random_degree")]
    poly: Option<String>,
    /// Use a random polynomial of this degree instead
    #[arg(long)]
    random_degree: Option<usize>,
}

#[derive(Subcommand)]
enum NeedletMode {
    /// Coefficients <f, psi> as CSV (j, knot_index, value)
    Analyze {
        #[command(flatten)]
        frame: FrameArgs,
        #[command(flatten)]
        poly: PolyArgs,
    },
    /// Evaluate sum c psi from a coefficient CSV
    Synthesize {
        #[command(flatten)]
        frame: FrameArgs,
        #[arg(long)]
        coeffs: PathBuf,
        #[arg(long, default_value_t = 32)]
        grid: usize,
    },
    /// Compare ||f|| with the coefficient norm
    Parseval {
        #[command(flatten)]
        frame: FrameArgs,
        #[command(flatten)]
        poly: PolyArgs,
    },
}

/// Failure classes mapped to exit codes.
enum Failure {
    Usage(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) => Failure::Usage(e.to_string()),
            _ => Failure::Runtime(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut out = sink(path)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn params(cfg: &RunConfig, w: Weight) -> Result<BallWeightParams, Failure> {
    Ok(BallWeightParams::new(w.mu.unwrap_or(cfg.mu), w.d.unwrap_or(cfg.d))?)
}

fn polynomial(cfg: &RunConfig, d: usize, p: &PolyArgs) -> Result<Polynomial, Failure> {
    match (&p.poly, p.random_degree) {
        (Some(text), _) => Ok(text.parse()?),
        (None, Some(deg)) => Ok(Polynomial::random_seeded(cfg.seed, d, deg)),
        (None, None) => Err(Failure::Usage("give --poly or --random-degree".into())),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    if let Some(n) = threads_from_env()? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(e.to_string()))?;
    }
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    cfg.validate()?;
    let argv: Vec<String> = std::env::args().collect();
    let out = cfg.output.clone();
    let out = out.as_deref();

    match cli.command {
        Command::Points { epsilon, weight, csv } => {
            let p = params(&cfg, weight)?;
            let payload = commands::points(epsilon, p.d, p.mu)?;
            if let Some(path) = csv {
                let header: Vec<String> = (1..=p.d).map(|i| format!("x{i}")).collect();
                let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
                write_csv(File::create(path)?, &header, payload.points.iter().cloned())?;
            }
            emit(out, &Envelope::new(&argv, cfg.seed, payload).to_json()?)?;
        }
        Command::Cubature {
            n,
            weight,
            delta,
            gamma,
            solver,
        } => {
            let p = params(&cfg, weight)?;
            let solver = match solver.as_str() {
                "maxent" => SolverKind::MaxEntropy,
                "simplex" => SolverKind::Simplex,
                other => return Err(Failure::Usage(format!("unknown solver `{other}`"))),
            };
            let opts = CubatureOptions {
                gamma: gamma.unwrap_or(cfg.gamma),
                solver,
                ..Default::default()
            };
            let rule = build_cubature_with(p.mu, p.d, n, delta.or(cfg.delta), &opts)?;
            emit(out, &Envelope::new(&argv, cfg.seed, rule).to_json()?)?;
        }
        Command::Kernel {
            n,
            weight,
            cutoff,
            x,
            y,
            grid,
        } => {
            let p = params(&cfg, weight)?;
            let y = y.unwrap_or_else(|| vec![0.0; p.d]);
            let xs = match x {
                Some(x) => vec![x],
                None => commands::square_grid(grid, p.d),
            };
            let rows = commands::kernel_rows(p, n, cutoff.unwrap_or(cfg.cutoff), &xs, &y)?;
            let header = commands::kernel_header(p.d);
            let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
            write_csv(sink(out)?, &header, rows)?;
        }
        Command::Christoffel { n, weight, grid } => {
            let p = params(&cfg, weight)?;
            write_csv(sink(out)?, &commands::CHRISTOFFEL_HEADER, commands::christoffel_rows(p, n, grid)?)?;
        }
        Command::Needlet { mode } => {
            let fa = match &mode {
                NeedletMode::Analyze { frame, .. }
                | NeedletMode::Synthesize { frame, .. }
                | NeedletMode::Parseval { frame, .. } => frame.clone(),
            };
            let p = params(&cfg, fa.weight)?;
            let levels = fa.levels.unwrap_or(cfg.levels);
            let frame = build_frame(p, levels)?;
            if let Some(path) = &fa.frame {
                emit(Some(path), &Envelope::new(&argv, cfg.seed, frame.summary()).to_json()?)?;
            }
            match mode {
                NeedletMode::Analyze { poly, .. } => {
                    let f = polynomial(&cfg, p.d, &poly)?;
                    let c = commands::analyze_polynomial(&frame, &f, levels)?;
                    write_coefficients(sink(out)?, c.triples())?;
                }
                NeedletMode::Synthesize { coeffs, grid, .. } => {
                    let rows = read_coefficients(File::open(&coeffs)?)?;
                    let c = CoefficientSet::from_triples(&frame, &rows)?;
                    let xs = commands::square_grid(grid, p.d);
                    let mut header: Vec<String> = (1..=p.d).map(|i| format!("x{i}")).collect();
                    header.push("value".into());
                    let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
                    write_csv(sink(out)?, &header, commands::synthesis_rows(&frame, &c, &xs)?)?;
                }
                NeedletMode::Parseval { poly, .. } => {
                    let f = polynomial(&cfg, p.d, &poly)?;
                    let report = commands::parseval_polynomial(&frame, &f, levels)?;
                    emit(out, &Envelope::new(&argv, cfg.seed, report).to_json()?)?;
                }
            }
        }
        Command::Verify { only } => {
            let only: Vec<Criterion> = only.iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
            let report = acceptance::run(&cfg, &only)?;
            for c in &report.criteria {
                eprintln!("{}", c.line());
            }
            let passed = report.passed;
            emit(out, &Envelope::new(&argv, cfg.seed, report).to_json()?)?;
            return Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
    }
    Ok(ExitCode::SUCCESS)
}
