//! The `hhbounds` command line.
//!
//! Every subcommand writes to `--out` (stdout when absent). Bound subcommands
//! emit CSV with the columns `case_id,x,y,lhs,rhs_main,error_term,margin,theorem`.
//! Exit status is 0 on success, 2 on usage, parse or contract errors and 1
//! when `verify` finds a margin below the tolerance.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cheb::{SystemSpec, DEFAULT_CHECK_GRID};
use crate::classic::classic_bounds;
use crate::config::SuiteConfig;
use crate::errmodel::{phi_kernel, ErrorSpec, PowerMeasure3};
use crate::error::{HhError, Result};
use crate::func::{FunctionSpec, RealFunction};
use crate::lower::{lower_bound_thm3, lower_bound_thm4};
use crate::meansys::lift_weighted_system;
use crate::measure::{parse_tuples, MeasureSpec};
use crate::quad::QuadratureConfig;
use crate::report::BoundReport;
use crate::residual::{is_omega_convex, MeasuredEps, DEFAULT_EPS_GRID};
use crate::upper::{upper_bound_cor6b, upper_bound_thm5, upper_bound_thm6};
use crate::verify::{pair_error_model, run_suite, segment_error_model};

#[derive(Debug, Parser)]
#[command(name = "hhbounds", version, about = "Approximate Hermite-Hadamard bounds for Chebyshev-system convexity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn spec<T: FromStr<Err = HhError>>(s: &str) -> std::result::Result<T, String> {
    s.parse().map_err(|e: HhError| e.to_string())
}

#[derive(Debug, Clone)]
struct Power3Atoms(Vec<(f64, f64, f64, f64)>);

fn power3_atoms(s: &str) -> std::result::Result<Power3Atoms, String> {
    parse_tuples(s, 4)
        .map(|v| Power3Atoms(v.into_iter().map(|t| (t[0], t[1], t[2], t[3])).collect()))
        .map_err(|e| e.to_string())
}

#[derive(Debug, Args)]
struct Output {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Pairs {
    /// Left endpoints, one per case.
    #[arg(long = "x", required = true, allow_negative_numbers = true)]
    xs: Vec<f64>,
    /// Right endpoints, one per case.
    #[arg(long = "y", required = true, allow_negative_numbers = true)]
    ys: Vec<f64>,
}

impl Pairs {
    fn zip(&self) -> Result<Vec<(f64, f64)>> {
        if self.xs.len() != self.ys.len() {
            return Err(HhError::input(format!(
                "{} values of --x but {} of --y",
                self.xs.len(),
                self.ys.len()
            )));
        }
        Ok(self.xs.iter().copied().zip(self.ys.iter().copied()).collect())
    }
}

#[derive(Debug, Args)]
struct MeanArgs {
    /// Chebyshev system, e.g. `linear` or `exp@[0,1]`.
    #[arg(long, value_parser = spec::<SystemSpec>)]
    system: SystemSpec,
    /// Weight lifted into the mean system.
    #[arg(long, default_value = "const:1", value_parser = spec::<FunctionSpec>)]
    rho: FunctionSpec,
    #[arg(long, value_parser = spec::<FunctionSpec>)]
    f: FunctionSpec,
    /// Error model: `const:c`, `measured[:grid]`, `power2:[..]`, `power3:[..]`, `dyadic:alpha=<fn>,n=<int>`.
    #[arg(long, default_value = "const:0", value_parser = spec::<ErrorSpec>)]
    error: ErrorSpec,
    #[command(flatten)]
    pairs: Pairs,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct MeasureArgs {
    #[arg(long, value_parser = spec::<FunctionSpec>)]
    f: FunctionSpec,
    /// Probability measure on [0, 1].
    #[arg(long, default_value = "lebesgue", value_parser = spec::<MeasureSpec>)]
    measure: MeasureSpec,
    #[arg(long, default_value = "const:0", value_parser = spec::<ErrorSpec>)]
    error: ErrorSpec,
    #[command(flatten)]
    pairs: Pairs,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the Chebyshev determinant on a grid; JSON report.
    CheckSystem {
        #[arg(long, value_parser = spec::<SystemSpec>)]
        system: SystemSpec,
        #[arg(long, default_value_t = DEFAULT_CHECK_GRID)]
        grid: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Scan the convexity residual of a function; JSON report.
    Residual {
        #[arg(long, value_parser = spec::<SystemSpec>)]
        system: SystemSpec,
        #[arg(long, value_parser = spec::<FunctionSpec>)]
        f: FunctionSpec,
        #[arg(long, default_value_t = DEFAULT_EPS_GRID)]
        grid: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Classic weighted lower and upper bounds; two CSV rows per case.
    ClassicBounds {
        #[arg(long, value_parser = spec::<SystemSpec>)]
        system: SystemSpec,
        #[arg(long, default_value = "const:1", value_parser = spec::<FunctionSpec>)]
        rho: FunctionSpec,
        #[arg(long, value_parser = spec::<FunctionSpec>)]
        f: FunctionSpec,
        #[command(flatten)]
        pairs: Pairs,
        #[command(flatten)]
        output: Output,
    },
    /// Lower bound through a lifted mean system.
    LowerThm3(MeanArgs),
    /// Lower bound for a probability measure on the segment.
    LowerThm4(MeasureArgs),
    /// Upper bound through a lifted mean system.
    UpperThm5(MeanArgs),
    /// Upper bound for a probability measure on the segment.
    UpperThm6(MeasureArgs),
    /// Midpoint upper bound with a three-index power error.
    UpperCor6b {
        #[arg(long, value_parser = spec::<FunctionSpec>)]
        f: FunctionSpec,
        /// Atoms `[(p,q,r,c),..]`.
        #[arg(long, default_value = "[]", value_parser = power3_atoms)]
        power3: Power3Atoms,
        #[command(flatten)]
        pairs: Pairs,
        #[command(flatten)]
        output: Output,
    },
    /// Tabulate the dyadic kernel; CSV `sigma,phi`.
    PhiTable {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        from: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        to: f64,
        #[arg(long, default_value_t = 0.01)]
        step: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Run a certification suite; JSON report.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the seed of the config file.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the worker count of the config file.
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Debug, Serialize)]
struct CsvRow<'a> {
    case_id: usize,
    x: f64,
    y: f64,
    lhs: f64,
    rhs_main: f64,
    error_term: f64,
    margin: f64,
    theorem: &'a str,
}

fn open(out: &Output) -> Result<Box<dyn Write>> {
    Ok(match &out.out {
        Some(path) => Box::new(io::BufWriter::new(
            File::create(path).map_err(|e| HhError::Io(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn csv_writer(out: &Output) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(open(out)?))
}

fn csv_err(e: csv::Error) -> HhError {
    HhError::Io(e.to_string())
}

fn write_bounds(out: &Output, rows: &[(usize, f64, f64, BoundReport)]) -> Result<()> {
    let mut w = csv_writer(out)?;
    if rows.is_empty() {
        w.write_record(["case_id", "x", "y", "lhs", "rhs_main", "error_term", "margin", "theorem"])
            .map_err(csv_err)?;
    }
    for (case_id, x, y, r) in rows {
        w.serialize(CsvRow {
            case_id: *case_id,
            x: *x,
            y: *y,
            lhs: r.lhs,
            rhs_main: r.rhs_main,
            error_term: r.error_term,
            margin: r.margin,
            theorem: &r.meta.theorem,
        })
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(out: &Output, value: &T) -> Result<()> {
    let mut w = open(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| HhError::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn segment(f: &RealFunction, x: f64, y: f64) -> Result<RealFunction> {
    if !(x <= y) {
        return Err(HhError::input(format!("need x <= y, got x = {x}, y = {y}")));
    }
    Ok(f.segment(x, y))
}

fn mean_bounds(args: &MeanArgs, upper: bool, q: &QuadratureConfig) -> Result<()> {
    let sys = args.system.build()?;
    let f = args.f.build();
    let ms = lift_weighted_system(&sys, &args.rho.build(), q)?;
    let mut rows = Vec::new();
    for (i, (x, y)) in args.pairs.zip()?.into_iter().enumerate() {
        let eps = pair_error_model(&args.error, &f, &sys, x, y)?;
        let r = if upper {
            upper_bound_thm5(&f, &ms, &sys, &eps, x, y, q)?
        } else {
            lower_bound_thm3(&f, &ms, &sys, &eps, x, y, q)?
        };
        rows.push((i, x, y, r));
    }
    write_bounds(&args.output, &rows)
}

fn measure_bounds(args: &MeasureArgs, upper: bool, q: &QuadratureConfig) -> Result<()> {
    let f = args.f.build();
    let mu = args.measure.build(q)?;
    let mut rows = Vec::new();
    for (i, (x, y)) in args.pairs.zip()?.into_iter().enumerate() {
        let f_seg = segment(&f, x, y)?;
        let eta = segment_error_model(&args.error, &f_seg)?;
        let r = if upper {
            upper_bound_thm6(&f_seg, &mu, &eta, y - x, q)?
        } else {
            lower_bound_thm4(&f_seg, &mu, &eta, y - x, q)?
        };
        rows.push((i, x, y, r));
    }
    write_bounds(&args.output, &rows)
}

#[derive(Debug, Serialize)]
struct ResidualReport {
    system: String,
    function: String,
    grid_n: usize,
    passed: bool,
    triples: usize,
    worst: Option<crate::residual::Triple>,
    /// Largest clipped residual on the grid.
    measured_sup: f64,
}

/// Runs one command; `Ok(false)` means a verify suite had failures.
fn dispatch(command: Command) -> Result<bool> {
    let q = QuadratureConfig::from_env()?;
    match command {
        Command::CheckSystem { system, grid, output } => {
            let report = system.build()?.check(grid);
            write_json(&output, &report)?;
        }
        Command::Residual { system, f, grid, output } => {
            let sys = system.build()?;
            let f = f.build();
            let scan = is_omega_convex(&f, &sys, grid);
            let measured = MeasuredEps::build(&f, &sys, sys.domain, grid);
            write_json(
                &output,
                &ResidualReport {
                    system: sys.name.clone(),
                    function: f.name().to_string(),
                    grid_n: grid,
                    passed: scan.passed,
                    triples: scan.triples,
                    worst: scan.worst,
                    measured_sup: measured.sup(),
                },
            )?;
        }
        Command::ClassicBounds { system, rho, f, pairs, output } => {
            let sys = system.build()?;
            let (f, rho) = (f.build(), rho.build());
            let mut rows = Vec::new();
            for (i, (x, y)) in pairs.zip()?.into_iter().enumerate() {
                let b = classic_bounds(&f, &sys, &rho, x, y, &q)?;
                rows.push((i, x, y, b.lower));
                rows.push((i, x, y, b.upper));
            }
            write_bounds(&output, &rows)?;
        }
        Command::LowerThm3(args) => mean_bounds(&args, false, &q)?,
        Command::UpperThm5(args) => mean_bounds(&args, true, &q)?,
        Command::LowerThm4(args) => measure_bounds(&args, false, &q)?,
        Command::UpperThm6(args) => measure_bounds(&args, true, &q)?,
        Command::UpperCor6b { f, power3, pairs, output } => {
            let f = f.build();
            let nu = PowerMeasure3::from_tuples(&power3.0)?;
            let mut rows = Vec::new();
            for (i, (x, y)) in pairs.zip()?.into_iter().enumerate() {
                rows.push((i, x, y, upper_bound_cor6b(&segment(&f, x, y)?, &nu, y - x)?));
            }
            write_bounds(&output, &rows)?;
        }
        Command::PhiTable { from, to, step, tol, output } => {
            if !(step > 0.0) || !(to >= from) || !(tol > 0.0) {
                return Err(HhError::input(format!(
                    "need step > 0, to >= from and tol > 0; got from={from} to={to} step={step} tol={tol}"
                )));
            }
            let n = ((to - from) / step + 1e-9).floor() as usize + 1;
            let mut w = csv_writer(&output)?;
            w.write_record(["sigma", "phi"]).map_err(csv_err)?;
            for i in 0..n {
                let sigma = ((from + i as f64 * step) * 1e12).round() / 1e12;
                let phi = phi_kernel(sigma, tol).value;
                w.write_record([sigma.to_string(), phi.to_string()]).map_err(csv_err)?;
            }
            w.flush()?;
        }
        Command::Verify { config, seed, workers, output } => {
            let mut cfg = SuiteConfig::from_file(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(w) = workers {
                cfg.workers = w;
            }
            let report = run_suite(&cfg)?;
            write_json(&output, &report)?;
            return Ok(report.passed());
        }
    }
    Ok(true)
}

/// Parses `args` (program name first) and runs the command, returning the exit status.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("hhbounds: {e}");
            2
        }
    }
}

pub fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
