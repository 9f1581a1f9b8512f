//! Command-line front end: build splines from builtin problems or problem
//! files, validate step sizes, estimate convergence orders, and reproduce
//! the published 2x2 reference table.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 step-bound rejection,
//! 3 solver failure, 4 reference-reproduction mismatch. Every failure prints
//! one `error[<class>]: ...` line to stderr.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use matspline::builder::{build, build_unchecked, max_step, min_subintervals, FixedPointConfig};
use matspline::ivp::{lipschitz_of, resolve_problem, ParsedProblem};
use matspline::spline::MatrixCubicSpline;
use matspline::verify::{
    compare_to_reference, convergence_order, error_table, OrderEstimate,
    DEFAULT_SAMPLES_PER_INTERVAL, REFERENCE_MAX_ERRORS,
};
use matspline::Error;
use num_complex::Complex64;

#[derive(Parser)]
#[command(
    name = "matspline",
    version,
    about = "C2 cubic matrix splines for second-order matrix initial value problems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the spline and print each interval's polynomial
    Solve(SolveArgs),
    /// Check the chosen step against the bound h < sqrt(6/L)
    ValidateStep(ValidateStepArgs),
    /// Estimate the empirical convergence order under step halving
    Convergence(ConvergenceArgs),
    /// Rebuild the published 2x2 reference run and compare the error table
    ReproduceExample(ReproduceArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Builtin problem name or path to a problem file
    #[arg(long)]
    problem: String,
    /// Subinterval count (default: file value, else 10x the minimum)
    #[arg(long)]
    n: Option<usize>,
    /// Fixed-point tolerance
    #[arg(long)]
    tol: Option<f64>,
    /// Sample points per interval for the error table
    #[arg(long)]
    samples: Option<usize>,
    /// Write the error table as CSV
    #[arg(long)]
    output: Option<PathBuf>,
    /// Build even when h >= sqrt(6/L); no existence guarantee then holds
    #[arg(long)]
    override_step_check: bool,
}

#[derive(Args)]
struct ValidateStepArgs {
    /// Builtin problem name or path to a problem file
    #[arg(long)]
    problem: String,
    /// Subinterval count (default: file value, else 10x the minimum)
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args)]
struct ConvergenceArgs {
    /// Builtin problem name or path to a problem file (needs an oracle)
    #[arg(long)]
    problem: String,
    /// Coarsest subinterval count
    #[arg(long, default_value_t = 10)]
    n: usize,
    /// Halving levels
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Fixed-point tolerance
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct ReproduceArgs {
    /// Sample points per interval
    #[arg(long)]
    samples: Option<usize>,
    /// Write the computed error table as CSV
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprintln!("error[usage]: {}", e.kind());
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    let result = match cli.command {
        Command::Solve(args) => run_solve(args),
        Command::ValidateStep(args) => run_validate_step(args),
        Command::Convergence(args) => run_convergence(args),
        Command::ReproduceExample(args) => run_reproduce(args),
    };

    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let (code, class) = classify(&e);
            eprintln!("error[{class}]: {e}");
            ExitCode::from(code)
        }
    }
}

fn classify(e: &Error) -> (u8, &'static str) {
    match e {
        Error::RejectedStep { .. } => (2, "step-bound"),
        Error::NoConvergence { .. }
        | Error::Singular { .. }
        | Error::SeriesDiverged { .. }
        | Error::NonFinite { .. } => (3, "solver"),
        _ => (1, "usage"),
    }
}

fn config_with(tol: Option<f64>) -> FixedPointConfig {
    let mut cfg = FixedPointConfig::default();
    if let Some(tol) = tol {
        cfg.tol = tol;
    }
    cfg
}

/// Subinterval count: flag, then problem-file value, then ten times the
/// minimum admissible count.
fn resolve_n(flag: Option<usize>, parsed: &ParsedProblem) -> Result<usize, Error> {
    if let Some(n) = flag.or(parsed.n) {
        if n == 0 {
            return Err(Error::InvalidArgument {
                op: "solve",
                message: "n must be positive".into(),
            });
        }
        return Ok(n);
    }
    let l = lipschitz_of(&parsed.ivp)?;
    Ok(min_subintervals(parsed.ivp.a(), parsed.ivp.b(), l)? * 10)
}

fn run_solve(args: SolveArgs) -> Result<u8, Error> {
    let parsed = resolve_problem(&args.problem)?;
    let n = resolve_n(args.n, &parsed)?;
    let cfg = config_with(args.tol);
    let samples = args.samples.unwrap_or(DEFAULT_SAMPLES_PER_INTERVAL);

    let (spline, report) = if args.override_step_check {
        build_unchecked(&parsed.ivp, n, &cfg)?
    } else {
        build(&parsed.ivp, n, &cfg)?
    };

    println!("problem: {}", args.problem);
    println!(
        "interval [{}, {}], n = {}, h = {}",
        parsed.ivp.a(),
        parsed.ivp.b(),
        n,
        report.h
    );
    match report.step_limit {
        Some(limit) => println!(
            "L = {}, step limit sqrt(6/L) = {limit:.5}, contraction factor Lh^2/6 = {:.6}",
            report.lipschitz, report.records[0].contraction_bound
        ),
        None => println!("L = 0, any step admissible"),
    }
    println!();
    print_piecewise_polynomials(&spline);
    println!(
        "coefficient solves: {} iterations total, max residual {:.4e}",
        report.total_iterations(),
        report.max_residual()
    );

    match &parsed.oracle {
        Some(oracle) => {
            let table = error_table(&spline, oracle, samples)?;
            println!(
                "max error vs exact solution: {:.4e} ({} samples/interval)",
                table.max_error(),
                samples
            );
            if let Some(path) = &args.output {
                write_csv(path, &table.to_csv())?;
                println!("error table written to {}", path.display());
            }
        }
        None => {
            if let Some(path) = &args.output {
                let csv = coefficients_csv(&spline);
                write_csv(path, &csv)?;
                println!(
                    "no exact solution known; coefficient table written to {}",
                    path.display()
                );
            }
        }
    }
    Ok(0)
}

fn run_validate_step(args: ValidateStepArgs) -> Result<u8, Error> {
    let parsed = resolve_problem(&args.problem)?;
    let n = resolve_n(args.n, &parsed)?;
    let l = lipschitz_of(&parsed.ivp)?;
    let bound = max_step(l)?;
    let h = (parsed.ivp.b() - parsed.ivp.a()) / n as f64;

    println!("problem: {}", args.problem);
    println!("L = {l}");
    match bound.limit() {
        Some(limit) => println!("step limit sqrt(6/L) = {limit:.5}"),
        None => println!("step limit: unbounded (L = 0)"),
    }
    println!("n = {n}, h = {h}");
    println!(
        "minimum admissible n = {}",
        min_subintervals(parsed.ivp.a(), parsed.ivp.b(), l)?
    );
    if bound.allows(h) {
        match bound.limit() {
            Some(limit) => println!("accept: h = {h} < {limit:.5}"),
            None => println!("accept: any positive h"),
        }
        Ok(0)
    } else {
        println!(
            "reject: h = {h} >= {:.5}; increase n or pass --override-step-check to solve anyway",
            bound.limit().unwrap_or(f64::INFINITY)
        );
        Ok(2)
    }
}

fn run_convergence(args: ConvergenceArgs) -> Result<u8, Error> {
    let parsed = resolve_problem(&args.problem)?;
    let oracle = parsed
        .oracle
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument {
            op: "convergence",
            message: format!(
                "'{}' has no exact solution attached; use a builtin problem",
                args.problem
            ),
        })?;
    let cfg = config_with(args.tol);
    let estimate = convergence_order(&parsed.ivp, oracle, args.n, args.levels, &cfg)?;

    println!(
        "problem: {} (n0 = {}, levels = {})",
        args.problem, args.n, args.levels
    );
    print_order_table(&estimate, args.n);
    Ok(0)
}

fn print_order_table(estimate: &OrderEstimate, n0: usize) {
    println!("{:>8} {:>12} {:>14} {:>9}", "n", "h", "max error", "order");
    for (i, (h, e)) in estimate.steps.iter().zip(&estimate.errors).enumerate() {
        let order = if i == 0 || estimate.exact {
            "-".to_string()
        } else {
            format!("{:.4}", estimate.orders[i - 1])
        };
        println!("{:>8} {:>12.6} {:>14.4e} {:>9}", n0 << i, h, e, order);
    }
    if estimate.exact {
        println!("errors at machine-epsilon scale: the solution is represented exactly");
    }
}

fn run_reproduce(args: ReproduceArgs) -> Result<u8, Error> {
    let parsed = resolve_problem("paper-example")?;
    let oracle = parsed.oracle.as_ref().expect("builtin carries an oracle");
    let cfg = FixedPointConfig::default();
    let samples = args.samples.unwrap_or(DEFAULT_SAMPLES_PER_INTERVAL);
    let (spline, report) = build(&parsed.ivp, 10, &cfg)?;
    let table = error_table(&spline, oracle, samples)?;
    let discrepancies = compare_to_reference(&table)?;

    println!(
        "reference reproduction: paper-example, n = 10, h = {}, {} samples/interval",
        report.h, samples
    );
    println!(
        "{:>12} {:>13} {:>13} {:>9} {:>10}  status",
        "interval", "computed", "reference", "rel.dev", "coeff.dev"
    );
    let mut failures = 0;
    for d in &discrepancies {
        let ok = d.error_relative_deviation <= 0.02;
        if !ok {
            failures += 1;
        }
        println!(
            "  [{:.1}, {:.1}] {:>13.4e} {:>13.4e} {:>8.3}% {:>10.1e}  {}",
            d.interval.0,
            d.interval.1,
            d.computed_error,
            d.reference_error,
            100.0 * d.error_relative_deviation,
            d.max_coefficient_deviation,
            if ok { "ok" } else { "MISMATCH" }
        );
    }
    if let Some(path) = &args.output {
        write_csv(path, &table.to_csv())?;
        println!("error table written to {}", path.display());
    }
    if failures == 0 {
        println!(
            "all {} rows within 2% of the published errors",
            REFERENCE_MAX_ERRORS.len()
        );
        Ok(0)
    } else {
        eprintln!(
            "error[reproduce]: {failures} row(s) deviate more than 2% from the published errors"
        );
        Ok(4)
    }
}

fn write_csv(path: &PathBuf, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::InvalidArgument {
        op: "output",
        message: format!("cannot write {}: {e}", path.display()),
    })
}

/// CSV with the error-table schema but an empty max_error column, for
/// problems without an exact solution.
fn coefficients_csv(spline: &MatrixCubicSpline) -> String {
    let (rows, cols) = spline.shape();
    let mut out = String::from("interval_left,interval_right,max_error");
    for degree in 0..4 {
        for i in 0..rows {
            for j in 0..cols {
                out.push_str(&format!(",c{degree}_{i}{j}"));
            }
        }
    }
    out.push('\n');
    let partition = spline.partition();
    for (k, piece) in spline.pieces().iter().enumerate() {
        out.push_str(&format!("{},{},", piece.x_left, partition.knot(k + 1)));
        for coeff in piece.global_coefficients() {
            for i in 0..rows {
                for j in 0..cols {
                    let z = coeff[(i, j)];
                    if z.im == 0.0 {
                        out.push_str(&format!(",{}", z.re));
                    } else {
                        out.push_str(&format!(",{}{:+}i", z.re, z.im));
                    }
                }
            }
        }
        out.push('\n');
    }
    out
}

// Knot values carry float dust (0.30000000000000004); display them tidily.
fn tidy(x: f64) -> String {
    let s = format!("{x:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn print_piecewise_polynomials(spline: &MatrixCubicSpline) {
    let (rows, cols) = spline.shape();
    let partition = spline.partition();
    for (k, piece) in spline.pieces().iter().enumerate() {
        println!("[{}, {}]", tidy(piece.x_left), tidy(partition.knot(k + 1)));
        let globals = piece.global_coefficients();
        for i in 0..rows {
            for j in 0..cols {
                let coeffs = [
                    globals[0][(i, j)],
                    globals[1][(i, j)],
                    globals[2][(i, j)],
                    globals[3][(i, j)],
                ];
                println!("  ({},{}): {}", i + 1, j + 1, format_polynomial(&coeffs));
            }
        }
    }
    println!();
}

/// Polynomial in x with coefficients rounded to four decimals, degree
/// ascending, zero terms omitted.
fn format_polynomial(coeffs: &[Complex64; 4]) -> String {
    let mut out = String::new();
    for (degree, z) in coeffs.iter().enumerate() {
        let re = (z.re * 1e4).round() / 1e4;
        let im = (z.im * 1e4).round() / 1e4;
        if re == 0.0 && im == 0.0 {
            continue;
        }
        let power = match degree {
            0 => String::new(),
            1 => " x".to_string(),
            d => format!(" x^{d}"),
        };
        if im == 0.0 {
            if out.is_empty() {
                if re < 0.0 {
                    out.push('-');
                }
            } else {
                out.push_str(if re < 0.0 { " - " } else { " + " });
            }
            out.push_str(&format!("{:.4}{power}", re.abs()));
        } else {
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(&format!("({:.4} {:+.4}i){power}", re, im));
        }
    }
    if out.is_empty() {
        out.push_str("0.0000");
    }
    out
}
