//! Command-line front end for `ot-tension`.
//!
//! Subcommands:
//!
//! - `bound`: the new and/or AC13 upper bound of a channel file
//! - `sweep`: the Z-channel sweep as CSV, optionally with an SVG chart
//! - `verify`: the randomized verification suites
//! - `slice`: the `(I(U;Q|V), I(U;V|Q))` frontier of a joint distribution
//!
//! Exit codes: 0 success, 1 verification failure, 2 I/O or parse error,
//! 64 usage error. `OT_TENSION_THREADS` caps the worker threads (0 or unset
//! means one per core); output never depends on the thread count.

pub mod svg;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ot_tension::bounds::{new_upper_bound_with_qcard, write_sweep_csv};
use ot_tension::tension::default_qcard;
use ot_tension::textfmt::format_sig;
use ot_tension::verify::{format_report, residuals_csv, run_all};
use ot_tension::{
    ac13_bound, parse_channel, tension_slice, zchannel_sweep, BoundResult, Channel, Error,
    JointDist, OptimizerOptions, ProbVector, SweepMode,
};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "OT_TENSION_THREADS";

/// Significant digits of CSV output.
const CSV_DIGITS: usize = 9;

#[derive(Debug, Parser)]
#[command(
    name = "ot-tension",
    version,
    about = "Upper bounds on the OT capacity of discrete memoryless channels"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Upper bounds for the channel in a channel file.
    Bound(BoundArgs),
    /// Bounds for the Z-channel on an even grid of crossover values.
    Sweep(SweepArgs),
    /// Run the randomized verification suites.
    Verify(VerifyArgs),
    /// Frontier of the tension region on the I(V;Q|U) = 0 plane.
    Slice(SliceArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    New,
    Ac13,
    Both,
}

/// Optimizer knobs shared by all subcommands.
#[derive(Debug, Clone, Args)]
pub struct OptArgs {
    /// Auxiliary alphabet size (default |X||Y|+2, may only be lowered).
    #[arg(long)]
    pub qcard: Option<usize>,
    /// Starts per inner minimization.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Local descent stopping tolerance.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Lattice denominator of outer grids and brute-force oracles.
    #[arg(long, default_value_t = 64)]
    pub grid_resolution: usize,
}

impl OptArgs {
    fn options(&self) -> OptimizerOptions {
        OptimizerOptions {
            restarts: self.restarts,
            tol: self.tol,
            seed: self.seed,
            grid_resolution: self.grid_resolution,
            ..OptimizerOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// Channel file.
    #[arg(long)]
    pub channel: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    #[command(flatten)]
    pub opts: OptArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Number of evenly spaced t values on [0, 1].
    #[arg(long, default_value_t = 21)]
    pub steps: usize,
    /// CSV output path (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write an SVG chart here.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Use the full auxiliary alphabet instead of the restricted binary family.
    #[arg(long)]
    pub full: bool,
    #[command(flatten)]
    pub opts: OptArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Random cases per suite (the costlier suites use fewer).
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// Write per-trial residuals as CSV here.
    #[arg(long)]
    pub residuals: Option<PathBuf>,
    #[command(flatten)]
    pub opts: OptArgs,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    /// Joint distribution file.
    #[arg(long)]
    pub joint: PathBuf,
    /// Number of weights lambda on [0, 1].
    #[arg(long, default_value_t = 21)]
    pub points: usize,
    /// CSV output path (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub opts: OptArgs,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Verify,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Io(_) => EXIT_IO,
            Failure::Verify => EXIT_VERIFY_FAILED,
        }
    }
}

/// Errors from validating user-supplied values are usage errors; anything
/// else from the library is reported as an I/O-class failure.
fn classify(e: Error) -> Failure {
    match e {
        Error::OutOfRange { .. } | Error::CostBound { .. } => Failure::Usage(e.to_string()),
        Error::AtPoint { ref source, .. } if matches!(**source, Error::OutOfRange { .. }) => {
            Failure::Usage(e.to_string())
        }
        _ => Failure::Io(e.to_string()),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn parse_failure(path: &Path, e: Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

fn format_px(p: &ProbVector) -> String {
    p.as_slice()
        .iter()
        .map(|&x| format_sig(x, 6))
        .collect::<Vec<_>>()
        .join(" ")
}

fn bound_line(name: &str, r: &BoundResult) -> String {
    format!(
        "{name:<5} {:.6} bits/use  p(x) = [{}]",
        r.value,
        format_px(&r.arg_px)
    )
}

fn checked_qcard(qcard: Option<usize>, nu: usize, nv: usize) -> Result<usize, Failure> {
    let max = default_qcard(nu, nv);
    match qcard {
        None => Ok(max),
        Some(q) if (1..=max).contains(&q) => Ok(q),
        Some(q) => Err(Failure::Usage(format!(
            "--qcard must lie in 1..={max}, got {q}"
        ))),
    }
}

/// Runs `bound` and returns its report.
pub fn run_bound(args: &BoundArgs) -> Result<String, Failure> {
    let opts = args.opts.options();
    opts.validate().map_err(classify)?;
    let text = read_file(&args.channel)?;
    let ch: Channel = parse_channel(&text).map_err(|e| parse_failure(&args.channel, e))?;
    let qcard = checked_qcard(args.opts.qcard, ch.input_card(), ch.output_card())?;
    let mut out = format!(
        "channel {} (|X| = {}, |Y| = {})\n",
        args.channel.display(),
        ch.input_card(),
        ch.output_card()
    );
    if matches!(args.method, Method::New | Method::Both) {
        let r = new_upper_bound_with_qcard(&ch, qcard, &opts).map_err(classify)?;
        let _ = writeln!(out, "{}", bound_line("new", &r));
    }
    if matches!(args.method, Method::Ac13 | Method::Both) {
        let r = ac13_bound(&ch, &opts).map_err(classify)?;
        let _ = writeln!(out, "{}", bound_line("ac13", &r));
    }
    Ok(out)
}

/// The `t` grid of a sweep with `steps` points.
pub fn sweep_grid(steps: usize) -> Vec<f64> {
    (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect()
}

/// Runs `sweep`; returns the CSV text (also written to `--out` if given).
pub fn run_sweep(args: &SweepArgs) -> Result<String, Failure> {
    if args.steps < 2 {
        return Err(Failure::Usage(format!(
            "--steps must be at least 2, got {}",
            args.steps
        )));
    }
    if args.opts.qcard.is_some() {
        return Err(Failure::Usage("--qcard does not apply to sweep".into()));
    }
    let opts = args.opts.options();
    opts.validate().map_err(classify)?;
    let mode = if args.full {
        SweepMode::Full
    } else {
        SweepMode::Restricted
    };
    let rows = zchannel_sweep(&sweep_grid(args.steps), &opts, mode).map_err(classify)?;
    let csv = write_sweep_csv(&rows);
    if let Some(path) = &args.out {
        write_file(path, &csv)?;
    }
    if let Some(path) = &args.svg {
        write_file(path, &svg::render_sweep(&rows))?;
    }
    Ok(csv)
}

/// Runs `verify`; returns the report and whether every suite passed.
pub fn run_verify(args: &VerifyArgs) -> Result<(String, bool), Failure> {
    if args.trials == 0 {
        return Err(Failure::Usage("--trials must be positive".into()));
    }
    let opts = args.opts.options();
    let reports = run_all(args.trials, args.opts.seed, &opts).map_err(classify)?;
    if let Some(path) = &args.residuals {
        write_file(path, &residuals_csv(&reports))?;
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok((format_report(&reports), pass))
}

/// Runs `slice`; returns the frontier CSV (also written to `--out` if given).
pub fn run_slice(args: &SliceArgs) -> Result<String, Failure> {
    let opts = args.opts.options();
    opts.validate().map_err(classify)?;
    let text = read_file(&args.joint)?;
    let j = JointDist::parse(&text).map_err(|e| parse_failure(&args.joint, e))?;
    let qcard = checked_qcard(args.opts.qcard, j.rows(), j.cols())?;
    let points = tension_slice(&j, args.points, qcard, &opts).map_err(classify)?;
    let mut csv = String::from("lambda,s2,s3\n");
    for p in &points {
        let _ = writeln!(
            csv,
            "{},{},{}",
            format_sig(p.lambda, CSV_DIGITS),
            format_sig(p.s2, CSV_DIGITS),
            format_sig(p.s3, CSV_DIGITS)
        );
    }
    if let Some(path) = &args.out {
        write_file(path, &csv)?;
    }
    Ok(csv)
}

/// Applies `OT_TENSION_THREADS` to the global worker pool.
fn configure_threads() -> Result<(), Failure> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| {
            Failure::Usage(format!(
                "{THREADS_ENV} must be a non-negative integer, got {v:?}"
            ))
        })?,
        Err(_) => 0,
    };
    // A pool already built by an earlier call in this process is kept.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global();
    Ok(())
}

/// Parses `args` (including the program name), runs the command, writes
/// results to `stdout` and diagnostics to `stderr`, and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{}", e.render());
            return code;
        }
    };
    let result = configure_threads().and_then(|()| match &cli.command {
        Command::Bound(a) => run_bound(a).map(|s| (s, true)),
        Command::Sweep(a) => {
            run_sweep(a).map(|csv| (if a.out.is_some() { String::new() } else { csv }, true))
        }
        Command::Verify(a) => run_verify(a),
        Command::Slice(a) => {
            run_slice(a).map(|csv| (if a.out.is_some() { String::new() } else { csv }, true))
        }
    });
    match result {
        Ok((text, pass)) => {
            let _ = stdout.write_all(text.as_bytes());
            if pass {
                EXIT_OK
            } else {
                let _ = writeln!(stderr, "verification failed");
                Failure::Verify.exit_code()
            }
        }
        Err(f) => {
            match &f {
                Failure::Usage(m) => {
                    let _ = writeln!(stderr, "usage error: {m}");
                }
                Failure::Io(m) => {
                    let _ = writeln!(stderr, "error: {m}");
                }
                Failure::Verify => {}
            }
            f.exit_code()
        }
    }
}
