//! Command-line front end for the `opbvp` solver.
//!
//! Commands write their report to the given stream and return an error for
//! every failure; `main` turns that error into one line on stderr and a
//! nonzero exit status.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use opbvp::approx::{default_rule, max_abs_error, project, reconstruct};
use opbvp::basis::legendre_basis;
use opbvp::exprparse::parse;
use opbvp::fixtures::{self, Fixture, ERROR_GRID};
use opbvp::opmatrix::build_theta;
use opbvp::solver::solve;

pub mod output;
pub mod problem;

use output::{csv_row, fmt17, grid_csv, write_atomic};
use problem::{ProblemError, ProblemFile};

const EXPR_HELP: &str = "\
Expressions use x, numbers, pi, e, + - * / ^, parentheses and the functions \
exp sin cos tan log sqrt abs. ^ is right-associative and binds tighter than \
unary minus, so -x^2 means -(x^2).";

#[derive(Debug, Parser)]
#[command(
    name = "opbvp",
    version,
    about = "Operational-matrix solver for linear constant-coefficient boundary value problems",
    after_help = EXPR_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the problem described in a problem file.
    Solve(SolveArgs),
    /// Run the four built-in worked problems and check their error bounds.
    Paper(PaperArgs),
    /// Print the monomial coefficients of phi_0..phi_n as CSV.
    Basis {
        /// Highest basis index (0 to 30).
        n: usize,
    },
    /// Print the operational matrix of integration for phi_0..phi_n as CSV.
    Opmatrix {
        /// Highest basis index (1 to 30).
        n: usize,
    },
    /// Project an expression in x onto phi_0..phi_n over [0, 1].
    Approx(ApproxArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Problem file (`key = value` lines).
    pub file: PathBuf,
    /// Number of uniform grid points for errors and CSV output.
    #[arg(long, default_value_t = ERROR_GRID, value_parser = grid_points)]
    pub grid: usize,
    /// Write `x,y_approx[,y_exact,abs_err]` rows to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PaperArgs {
    /// Which problem to run: 1, 2, 3, 4 or all.
    #[arg(long, default_value = "all", value_parser = example_choice)]
    pub example: ExampleChoice,
    /// Write one CSV per run into this directory.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ApproxArgs {
    /// Expression in x.
    #[arg(allow_hyphen_values = true)]
    pub expr: String,
    /// Highest basis index (0 to 30).
    #[arg(long, default_value_t = 8)]
    pub n: usize,
    /// Number of uniform grid points for the max-abs error.
    #[arg(long, default_value_t = ERROR_GRID, value_parser = grid_points)]
    pub grid: usize,
    /// Write `x,y_approx,y_exact,abs_err` rows to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleChoice {
    One(usize),
    All,
}

fn example_choice(s: &str) -> Result<ExampleChoice, String> {
    match s {
        "all" => Ok(ExampleChoice::All),
        _ => match s.parse::<usize>() {
            Ok(k) if (1..=4).contains(&k) => Ok(ExampleChoice::One(k)),
            _ => Err(format!("expected 1, 2, 3, 4 or all, got `{s}`")),
        },
    }
}

fn grid_points(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(k) if k >= 2 => Ok(k),
        _ => Err(format!("expected an integer of at least 2, got `{s}`")),
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Problem { path: String, source: ProblemError },
    #[error("{0}")]
    Solver(#[from] opbvp::Error),
    #[error("expression at offset {offset}: {message}")]
    Expression { offset: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Failed(String),
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn stdout_error(source: std::io::Error) -> CliError {
    CliError::Io {
        path: "<stdout>".into(),
        source,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve(args) => cmd_solve(&args, out),
        Command::Paper(args) => cmd_paper(&args, out),
        Command::Basis { n } => cmd_basis(n, out),
        Command::Opmatrix { n } => cmd_opmatrix(n, out),
        Command::Approx(args) => cmd_approx(&args, out),
    }
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let file = ProblemFile::read(&args.file).map_err(|source| CliError::Problem {
        path: args.file.display().to_string(),
        source,
    })?;
    let sol = solve(&file.to_problem()?)?;
    if sol.diverged {
        return Err(CliError::Failed(format!(
            "solution diverged: residual_max = {}",
            fmt17(sol.residual_max)
        )));
    }
    let poly = &sol.solution_poly;
    let (x0, x1) = file.interval;
    let h = x1 - x0;
    let exact = file.exact.as_ref().map(|(_, e)| e);

    let max_error = match exact {
        Some(e) => Some(max_abs_error(
            |z| e.eval(x0 + h * z),
            |z| Ok(poly.eval(x0 + h * z)),
            args.grid,
        )?),
        None => None,
    };

    let mut report = String::new();
    report.push_str(&format!("n = {}\n", file.n));
    report.push_str(&format!("degree = {}\n", poly.degree()));
    report.push_str("coefficients (ascending powers of x):\n");
    for (k, c) in poly.coeffs().iter().enumerate() {
        report.push_str(&format!("  c[{k}] = {}\n", fmt17(*c)));
    }
    report.push_str(&format!("residual_max = {}\n", fmt17(sol.residual_max)));
    report.push_str(&format!(
        "bc_residual_max = {}\n",
        fmt17(sol.bc_residual_max)
    ));
    if let Some(err) = max_error {
        report.push_str(&format!(
            "max_abs_error = {} ({} points)\n",
            fmt17(err),
            args.grid
        ));
    }

    if let Some(path) = &args.csv {
        let eval_exact = |x: f64| exact.map_or(f64::NAN, |e| e.eval(x).unwrap_or(f64::NAN));
        let reference: Option<(&str, &dyn Fn(f64) -> f64)> =
            exact.map(|_| ("y_exact", &eval_exact as &dyn Fn(f64) -> f64));
        let csv = grid_csv(file.interval, args.grid, |x| poly.eval(x), reference);
        write_atomic(path, &csv).map_err(io_error(path))?;
    }
    out.write_all(report.as_bytes()).map_err(stdout_error)
}

fn run_fixture(
    fx: &Fixture,
    csv_dir: Option<&Path>,
    table: &mut String,
) -> Result<usize, CliError> {
    let reference = fx.reference()?;
    let mut failures = 0;
    for &n in &fx.ns {
        let run = fx.run(n, reference.as_ref())?;
        let status = if run.passed() { "PASS" } else { "FAIL" };
        if !run.passed() {
            failures += 1;
        }
        table.push_str(&format!(
            "{:<8}{:>4}{:>8}  {:<12.3e}{:<10.0e}{:<11.0e}{}\n",
            fx.id,
            n,
            run.solution.solution_poly.degree(),
            run.max_error,
            run.reported_order,
            run.threshold,
            status
        ));
        if let Some(dir) = csv_dir {
            let path = dir.join(format!("example{}_n{}.csv", fx.id, n));
            let name = if fx.exact.is_some() {
                "y_exact"
            } else {
                "y_reference"
            };
            let poly = &run.solution.solution_poly;
            let csv = grid_csv(
                fx.domain,
                ERROR_GRID,
                |x| poly.eval(x),
                Some((name, reference.as_ref())),
            );
            write_atomic(&path, &csv).map_err(io_error(&path))?;
        }
    }
    Ok(failures)
}

pub fn cmd_paper(args: &PaperArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let selected = match args.example {
        ExampleChoice::All => fixtures::all(),
        ExampleChoice::One(k) => fixtures::by_id(k).into_iter().collect(),
    };
    if let Some(dir) = &args.csv_dir {
        std::fs::create_dir_all(dir).map_err(io_error(dir))?;
    }
    let mut table = format!(
        "{:<8}{:>4}{:>8}  {:<12}{:<10}{:<11}{}\n",
        "example", "n", "degree", "max_error", "claimed", "threshold", "status"
    );
    let mut failures = 0;
    let mut runs = 0;
    for fx in &selected {
        failures += run_fixture(fx, args.csv_dir.as_deref(), &mut table)?;
        runs += fx.ns.len();
    }
    out.write_all(table.as_bytes()).map_err(stdout_error)?;
    out.flush().map_err(stdout_error)?;
    if failures > 0 {
        return Err(CliError::Failed(format!(
            "{failures} of {runs} runs exceeded their error threshold"
        )));
    }
    Ok(())
}

pub fn cmd_basis(n: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let basis = legendre_basis(n)?;
    let mut csv = String::new();
    for phi in basis.phis() {
        let mut row = phi.coeffs().to_vec();
        row.resize(n + 1, 0.0);
        csv.push_str(&csv_row(&row));
        csv.push('\n');
    }
    out.write_all(csv.as_bytes()).map_err(stdout_error)
}

pub fn cmd_opmatrix(n: usize, out: &mut dyn Write) -> Result<(), CliError> {
    let theta = build_theta(n)?;
    let m = theta.matrix();
    let mut csv = String::new();
    for i in 0..m.rows() {
        csv.push_str(&csv_row(m.row(i)));
        csv.push('\n');
    }
    out.write_all(csv.as_bytes()).map_err(stdout_error)
}

pub fn cmd_approx(args: &ApproxArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let expr = parse(&args.expr).map_err(|e| CliError::Expression {
        offset: e.offset,
        message: e.message,
    })?;
    let basis = legendre_basis(args.n)?;
    let rule = default_rule(args.n)?;
    let proj = project(|x| expr.eval(x), &basis, &rule)?;
    let poly = reconstruct(&proj.coeffs, &basis)?;
    let err = max_abs_error(|x| expr.eval(x), |x| Ok(poly.eval(x)), args.grid)?;

    let mut report = format!("n = {}\nbasis coefficients:\n", args.n);
    for (k, c) in proj.coeffs.iter().enumerate() {
        report.push_str(&format!("  c[{k}] = {}\n", fmt17(*c)));
    }
    report.push_str(&format!(
        "l2_error_estimate = {} (Parseval remainder)\n",
        fmt17(proj.l2_error_estimate)
    ));
    report.push_str(&format!(
        "max_abs_error = {} ({} points)\n",
        fmt17(err),
        args.grid
    ));

    if let Some(path) = &args.csv {
        let exact = |x: f64| expr.eval(x).unwrap_or(f64::NAN);
        let csv = grid_csv(
            (0.0, 1.0),
            args.grid,
            |x| poly.eval(x),
            Some(("y_exact", &exact)),
        );
        write_atomic(path, &csv).map_err(io_error(path))?;
    }
    out.write_all(report.as_bytes()).map_err(stdout_error)
}
