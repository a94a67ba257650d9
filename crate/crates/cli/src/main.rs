use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kg_green::verify::{self, FdOracleConfig};
use kg_green::{boundary, BoundaryFunction, BvpProblem, Domain, EllipticCoefficients, Error, Execution, FieldGrid, GridSpec, KernelSpec, OracleReport, Representation};
use serde_json::json;

const EXIT_CONFIG: u8 = 2;
const EXIT_ACCURACY: u8 = 3;
const EXIT_SOLVER: u8 = 4;

#[derive(Parser)]
#[command(name = "kg-green", version, about = "Green functions and Dirichlet solvers for (Δ - r²)V = 0 on the strip and half-plane")]
struct Cli {
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a Green kernel on a grid.
    Kernel(KernelArgs),
    /// Solve a Dirichlet problem on a grid.
    Solve(SolveArgs),
    /// Run oracle suites and print JSON reports.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Strip,
    Halfplane,
}

#[derive(Clone, Copy, ValueEnum)]
enum RepArg {
    Series,
    Integral,
    Closed,
    J1,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Reps,
    Mass,
    G3914,
    Meanvalue,
    Fdoracle,
    All,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "strip")]
    domain: DomainArg,
    /// Mass parameter r >= 0.
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    /// General operator: `sigma1,sigma2,rho,alpha1,alpha2` or a named set
    /// (canonical, anisotropic, correlated, drift-x, drift-y, mixed).
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Strip width for the general operator (default π, or the named set's width).
    #[arg(long)]
    width: Option<f64>,
    /// `x_min,x_max,nx,y_min,y_max,ny`.
    #[arg(long, allow_hyphen_values = true)]
    grid: String,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Output file (default: standard output).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct KernelArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long = "rep", value_enum, default_value = "auto")]
    rep: RepArg,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    /// Boundary data, e.g. `gaussian(0,0.5)`, `step`, `cosine(1)`, `holder_cusp(0.5)`.
    #[arg(long, allow_hyphen_values = true)]
    boundary: String,
    /// Data on the top edge of the strip (plain operator only).
    #[arg(long)]
    top: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    /// Restrict the representation suite to one r.
    #[arg(long)]
    r: Option<f64>,
    /// Coefficient set for the finite-difference suite (named set or
    /// `sigma1,sigma2,rho,alpha1,alpha2`); `all` runs every named set.
    #[arg(long, default_value = "canonical")]
    coeffs: String,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Failure carrying the process exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Accuracy { .. } => EXIT_ACCURACY,
            Error::Solver { .. } | Error::Stability(_) | Error::Range(_) => EXIT_SOLVER,
            _ => EXIT_CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure { code: EXIT_SOLVER, message: format!("i/o error: {e}") }
    }
}

fn config(message: impl Into<String>) -> Failure {
    Failure { code: EXIT_CONFIG, message: message.into() }
}

fn parse_grid(s: &str) -> Result<GridSpec, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 6 {
        return Err(config(format!("grid needs x_min,x_max,nx,y_min,y_max,ny, got '{s}'")));
    }
    let num = |i: usize| parts[i].parse::<f64>().map_err(|e| config(format!("bad grid value '{}': {e}", parts[i])));
    let count = |i: usize| parts[i].parse::<usize>().map_err(|e| config(format!("bad grid count '{}': {e}", parts[i])));
    Ok(GridSpec::new(num(0)?, num(1)?, count(2)?, num(3)?, num(4)?, count(5)?)?)
}

fn named_set(name: &str) -> Option<EllipticCoefficients> {
    let key = name.replace('-', " ");
    verify::fd_coefficient_sets().into_iter().find(|(n, _)| *n == key).map(|(_, c)| c)
}

fn parse_coefficients(s: &str, r: f64, width: Option<f64>) -> Result<EllipticCoefficients, Failure> {
    let mut c = match named_set(s) {
        Some(c) => EllipticCoefficients { r, ..c },
        None => {
            let v = s
                .split(',')
                .map(|t| t.trim().parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| config(format!("bad coefficient list '{s}': {e}")))?;
            if v.len() != 5 {
                return Err(config(format!("coefficients need sigma1,sigma2,rho,alpha1,alpha2 or a set name, got '{s}'")));
            }
            EllipticCoefficients { sigma1: v[0], sigma2: v[1], rho: v[2], alpha1: v[3], alpha2: v[4], r, width_l: std::f64::consts::PI }
        }
    };
    if let Some(w) = width {
        c.width_l = w;
    }
    c.validate()?;
    Ok(c)
}

fn domain(d: DomainArg) -> Domain {
    match d {
        DomainArg::Strip => Domain::Strip,
        DomainArg::Halfplane => Domain::HalfPlane,
    }
}

fn check_rows(grid: &GridSpec, height: f64) -> Result<(), Failure> {
    if grid.y_min < 0.0 || grid.y_max > height {
        return Err(config(format!("grid rows [{}, {}] leave the domain [0, {height}]", grid.y_min, grid.y_max)));
    }
    Ok(())
}

fn number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.16e}")
    }
}

fn open(path: &Option<PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_field(field: &FieldGrid, format: Format, meta: serde_json::Value, path: &Option<PathBuf>) -> Result<(), Failure> {
    let mut out = open(path)?;
    match format {
        Format::Csv => {
            writeln!(out, "x,y,value,err_est")?;
            for (j, &y) in field.ys.iter().enumerate() {
                for (i, &x) in field.xs.iter().enumerate() {
                    let k = field.index(i, j);
                    writeln!(out, "{},{},{},{}", number(x), number(y), number(field.values[k]), number(field.err_estimates[k]))?;
                }
            }
        }
        Format::Json => {
            let doc = json!({ "metadata": meta, "field": field });
            serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Failure { code: EXIT_SOLVER, message: e.to_string() })?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_kernel(args: &KernelArgs, exec: Execution) -> Result<u8, Failure> {
    let c = &args.common;
    let grid = parse_grid(&c.grid)?;
    let dom = domain(c.domain);
    let rep = match args.rep {
        RepArg::Series => Representation::Series,
        RepArg::Integral => Representation::Integral,
        RepArg::Closed => Representation::Closed,
        RepArg::J1 => Representation::J1,
        RepArg::Auto => Representation::Auto,
    };
    let spec = match &c.coeffs {
        Some(s) => KernelSpec::general(dom, parse_coefficients(s, c.r, c.width)?, c.tol),
        None => match dom {
            Domain::Strip => KernelSpec::strip(c.r, c.tol),
            Domain::HalfPlane => KernelSpec::halfplane(c.r, c.tol),
        },
    }
    .with_representation(rep);
    spec.validate()?;
    check_rows(&grid, spec.height())?;
    let (xs, ys) = (grid.xs(), grid.ys());
    let nx = xs.len();
    let cells = exec.map(xs.len() * ys.len(), |i| spec.evaluate(xs[i % nx], ys[i / nx]));
    let mut field = FieldGrid::zeros(xs, ys);
    let mut code = 0;
    for (i, cell) in cells.into_iter().enumerate() {
        let (x, y) = (field.xs[i % nx], field.ys[i / nx]);
        match cell {
            Ok(v) => {
                field.values[i] = v;
                field.err_estimates[i] = c.tol;
            }
            Err(Error::Singularity { .. }) | Err(Error::SeriesDivergent) => {
                eprintln!("warning: kernel is singular at ({x}, {y}); cell set to nan");
                field.values[i] = f64::NAN;
                field.err_estimates[i] = f64::NAN;
            }
            Err(Error::Accuracy { best, achieved }) => {
                eprintln!("warning: accuracy not reached at ({x}, {y}): error {achieved:e}");
                field.values[i] = best;
                field.err_estimates[i] = achieved;
                field.failed[i] = true;
                code = EXIT_ACCURACY;
            }
            Err(e) => return Err(e.into()),
        }
    }
    let meta = json!({ "command": "kernel", "kernel": format!("{spec:?}"), "grid": grid });
    write_field(&field, c.format, meta, &c.output)?;
    Ok(code)
}

fn cmd_solve(args: &SolveArgs, exec: Execution) -> Result<u8, Failure> {
    let c = &args.common;
    let grid = parse_grid(&c.grid)?;
    let phi = boundary::parse(&args.boundary)?;
    let top = args.top.as_deref().map(boundary::parse).transpose()?;
    if matches!(c.domain, DomainArg::Halfplane) && top.is_some() {
        return Err(config("--top is only available on the strip"));
    }
    let problem = match (&c.coeffs, c.domain) {
        (None, DomainArg::Strip) => BvpProblem::Strip { bottom: phi, top: top.unwrap_or_else(BoundaryFunction::zero), r: c.r },
        (None, DomainArg::Halfplane) => BvpProblem::HalfPlane { phi, r: c.r },
        (Some(s), d) => {
            if top.is_some() {
                return Err(config("--top is only available for the plain strip operator"));
            }
            let coefficients = parse_coefficients(s, c.r, c.width)?;
            match d {
                DomainArg::Strip => BvpProblem::StripGeneral { phi, coefficients },
                DomainArg::Halfplane => BvpProblem::HalfPlaneGeneral { phi, coefficients },
            }
        }
    };
    problem.validate()?;
    check_rows(&grid, problem.height())?;
    let field = problem.solve(&grid, c.tol, exec)?;
    let failed = field.failed.iter().filter(|&&f| f).count();
    let meta = json!({
        "command": "solve",
        "boundary": args.boundary,
        "top": args.top,
        "grid": grid,
        "tol": c.tol,
        "failed_cells": failed,
    });
    write_field(&field, c.format, meta, &c.output)?;
    if failed > 0 {
        eprintln!("warning: {failed} cell(s) missed the requested accuracy");
        return Ok(EXIT_ACCURACY);
    }
    Ok(0)
}

fn run_suite(suite: Suite, args: &VerifyArgs, exec: Execution) -> Result<Vec<OracleReport>, Failure> {
    let mut out = Vec::new();
    match suite {
        Suite::Reps => {
            let strip_rs = args.r.map_or(verify::STRIP_RS.to_vec(), |r| vec![r]);
            let half_rs = args.r.map_or(verify::HALFPLANE_RS.to_vec(), |r| vec![r]);
            out.push(verify::strip_representations(&strip_rs, 1e-9, 1e-7)?);
            if strip_rs.contains(&0.0) {
                out.push(verify::laplace_reduction(1e-11, 1e-9)?);
            }
            out.push(verify::halfplane_representations(&half_rs, 1e-10, 1e-7)?);
        }
        Suite::Mass => out.push(verify::mass_suite(1e-7)?),
        Suite::G3914 => out.push(verify::gradshteyn_suite(1e-8)?),
        Suite::Meanvalue => out.extend(verify::mean_value_suite(1e-6, exec)?),
        Suite::Fdoracle => {
            let sets = if args.coeffs == "all" {
                verify::fd_coefficient_sets().into_iter().map(|(_, c)| c).collect()
            } else {
                vec![parse_coefficients(&args.coeffs, 1.0, Some(1.0))?]
            };
            let phi = BoundaryFunction::gaussian(0.0, 0.5)?;
            for c in sets {
                out.push(verify::fd_oracle(&c, &phi, &FdOracleConfig::default(), exec)?);
            }
        }
        Suite::All => {
            for s in [Suite::Reps, Suite::Mass, Suite::G3914, Suite::Meanvalue, Suite::Fdoracle] {
                out.extend(run_suite(s, args, exec)?);
            }
        }
    }
    Ok(out)
}

fn cmd_verify(args: &VerifyArgs, exec: Execution) -> Result<u8, Failure> {
    if let Some(r) = args.r {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(config(format!("r must be finite and >= 0, got {r}")));
        }
    }
    let reports = run_suite(args.suite, args, exec)?;
    let passed = reports.iter().all(|r| r.passed);
    for r in &reports {
        eprintln!("{} {}: max deviation {:.3e} (tol {:.1e})", if r.passed { "PASS" } else { "FAIL" }, r.name, r.max_abs, r.tolerance);
    }
    let mut out = open(&args.output)?;
    let doc = json!({ "passed": passed, "reports": reports });
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| Failure { code: EXIT_SOLVER, message: e.to_string() })?;
    writeln!(out)?;
    out.flush()?;
    Ok(if passed { 0 } else { EXIT_ACCURACY })
}

#[cfg(feature = "parallel")]
fn set_threads(n: usize) -> Result<(), Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| config(format!("cannot configure {n} threads: {e}")))
}

#[cfg(not(feature = "parallel"))]
fn set_threads(_: usize) -> Result<(), Failure> {
    eprintln!("warning: built without the parallel feature; --threads ignored");
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let exec = match cli.threads {
        Some(0) => return Err(config("--threads must be positive")),
        Some(1) => Execution::Sequential,
        Some(n) => {
            set_threads(n)?;
            Execution::Parallel
        }
        None => Execution::default(),
    };
    match &cli.command {
        Command::Kernel(a) => cmd_kernel(a, exec),
        Command::Solve(a) => cmd_solve(a, exec),
        Command::Verify(a) => cmd_verify(a, exec),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
