use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;
use solenoid_cli::config::{parse_complex, Config, Precision, Target};
use solenoid_cli::dump::{dump, DumpKind};
use solenoid_cli::render::render;
use solenoid_cli::suites::{run_suite, unreadable_system};
use solenoid_core::io::SystemFile;

const THREADS_VAR: &str = "HENON_SOLENOID_THREADS";

#[derive(Parser)]
#[command(name = "henon-solenoid", version, about = "Hénon maps, solenoids and external rays")]
struct Cli {
    /// JSON config; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    precision: Option<Precision>,
    /// Record wall time in reports.
    #[arg(long, global = true)]
    timings: bool,
    /// Constant term of `z² + c`, as `re` or `re,im`.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    c: Option<C64>,
    /// Jacobian parameter `b`.
    #[arg(long, global = true, value_parser = parse_complex, allow_hyphen_values = true)]
    b: Option<C64>,
    /// System file in the `{"factors": [...], "R": ...}` format.
    #[arg(long, global = true)]
    system: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render an image (PGM or PPM).
    Render(RenderArgs),
    /// Run a verification suite and write its JSON report.
    Verify {
        /// filtration, potential, solenoid, saddles, rays, motions or all
        suite: String,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        out: Out,
    },
    /// Write a ray, coding, saddle or green-grid dump.
    Dump {
        #[arg(value_enum)]
        kind: DumpKind,
        #[command(flatten)]
        opts: DumpArgs,
    },
    /// Continued saddle orbit as JSON.
    Saddle(DumpArgs),
    /// Ray trace as CSV.
    Ray(DumpArgs),
    /// Coding window as JSON.
    Code(DumpArgs),
}

#[derive(Args)]
struct Out {
    /// Output file; standard output if absent (`render` writes `render.pgm` or `render.ppm`).
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long, value_enum)]
    target: Option<Target>,
    #[arg(long)]
    width: Option<usize>,
    #[arg(long)]
    height: Option<usize>,
    /// Real range `lo,hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    re: Option<[f64; 2]>,
    /// Imaginary range `lo,hi`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    im: Option<[f64; 2]>,
    /// Escape iteration budget per pixel.
    #[arg(long)]
    budget: Option<usize>,
    /// Saddle point whose unstable leaf is drawn (leaf targets).
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    near: Option<C64>,
    #[command(flatten)]
    out: Out,
}

#[derive(Args)]
struct DumpArgs {
    /// External angle, `p/q` or turns.
    #[arg(long)]
    theta: Option<String>,
    /// Trace on the saddle leaf instead of in one variable.
    #[arg(long)]
    leaf: bool,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    near: Option<C64>,
    #[arg(long)]
    period: Option<usize>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    point: Option<C64>,
    #[arg(long = "T")]
    t: Option<usize>,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    b_from: Option<C64>,
    #[command(flatten)]
    out: Out,
}

fn parse_range(s: &str) -> anyhow::Result<[f64; 2]> {
    let (a, b) = s.split_once(',').context("range must be lo,hi")?;
    Ok([a.trim().parse()?, b.trim().parse()?])
}

/// Failures sorted by exit code.
enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(v) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = v.trim().parse().with_context(|| format!("{THREADS_VAR}={v:?}"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn usage<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Usage)
}

fn failure<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Run)
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => usage(Config::load(p))?,
        None => Config::default(),
    };
    if let Some(p) = cli.precision {
        cfg.precision = p;
    }
    if let Some(c) = cli.c {
        cfg.set_quadratic(c);
    }
    if let Some(b) = cli.b {
        cfg.b = b;
    }
    let system_text = match &cli.system {
        Some(p) => Some(usage(std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))?),
        None => None,
    };

    match cli.cmd {
        Command::Verify { suite, samples, seed, out } => {
            if let Some(n) = samples {
                cfg.suite.samples = n;
            }
            if let Some(s) = seed {
                cfg.suite.seed = s;
            }
            let start = Instant::now();
            let mut report = match system_text.map(|t| SystemFile::from_json(&t)) {
                Some(Err(e)) => {
                    usage(solenoid_cli::suites::SUITES.iter().chain(&["all"]).any(|s| *s == suite).then_some(()).with_context(|| format!("unknown suite {suite:?}")))?;
                    unreadable_system(&suite, &cli.system.as_deref().unwrap_or(Path::new("")).display().to_string(), e)
                }
                Some(Ok(file)) => {
                    cfg.system = Some(file);
                    usage(run_suite(&suite, &cfg))?
                }
                None => usage(run_suite(&suite, &cfg))?,
            };
            if cli.timings {
                report.wall_time_s = Some(start.elapsed().as_secs_f64());
            }
            failure(write_out(&out.out, report.to_json().as_bytes()))?;
            for c in report.failures() {
                eprintln!("FAIL {}: {} (witness: {})", c.name, c.detail, c.witness.as_deref().unwrap_or("-"));
            }
            Ok(if report.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Render(args) => {
            if let Some(t) = system_text {
                cfg.system = Some(usage(SystemFile::from_json(&t).map_err(anyhow::Error::from))?);
            }
            let spec = &mut cfg.render;
            spec.target = args.target.unwrap_or(spec.target);
            spec.width = args.width.unwrap_or(spec.width);
            spec.height = args.height.unwrap_or(spec.height);
            spec.re = args.re.unwrap_or(spec.re);
            spec.im = args.im.unwrap_or(spec.im);
            spec.budget = args.budget.unwrap_or(spec.budget);
            spec.near = args.near.unwrap_or(spec.near);
            usage(spec.validate())?;
            let start = Instant::now();
            let img = failure(render(&cfg.render, &cfg))?;
            let path = args.out.out.unwrap_or_else(|| PathBuf::from(format!("render.{}", img.extension())));
            failure(write_out(&Some(path.clone()), &img.to_pnm()))?;
            if cli.timings {
                eprintln!("wrote {} in {:.3} s", path.display(), start.elapsed().as_secs_f64());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Dump { kind, opts } => dump_cmd(kind, opts, cfg, system_text),
        Command::Saddle(opts) => dump_cmd(DumpKind::Saddle, opts, cfg, system_text),
        Command::Ray(opts) => dump_cmd(DumpKind::Ray, opts, cfg, system_text),
        Command::Code(opts) => dump_cmd(DumpKind::Coding, opts, cfg, system_text),
    }
}

fn dump_cmd(kind: DumpKind, opts: DumpArgs, mut cfg: Config, system_text: Option<String>) -> Result<ExitCode, Failure> {
    if let Some(t) = system_text {
        cfg.system = Some(usage(SystemFile::from_json(&t).map_err(anyhow::Error::from))?);
    }
    let d = &mut cfg.dump;
    if let Some(t) = opts.theta {
        d.theta = t;
    }
    d.leaf |= opts.leaf;
    d.near = opts.near.unwrap_or(d.near);
    d.period = opts.period.unwrap_or(d.period);
    d.point = opts.point.unwrap_or(d.point);
    d.t = opts.t.unwrap_or(d.t);
    d.b_from = opts.b_from.unwrap_or(d.b_from);
    usage(solenoid_cli::config::parse_angle(&d.theta).map(|_| ()))?;
    let bytes = failure(dump(kind, &cfg))?;
    failure(write_out(&opts.out.out, &bytes))?;
    Ok(ExitCode::SUCCESS)
}

fn write_out(path: &Option<PathBuf>, bytes: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}
