//! Command-line front end. [`run`] parses arguments and returns the process
//! exit code: 0 on success, 1 on domain or I/O errors, 2 on usage errors.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::dualhahn;
use crate::eigensolve::{ComputedSpectrum, SolverConfig};
use crate::harness::{self, BGrid, Family, GridRange, SolverKind, SweepConfig, XAxis, YAxis};
use crate::matgen::{self, MatrixParams, TridiagonalMatrix};
use crate::spectra::{self, ExactSpectrum};
use crate::verify::{self, Suite};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "clement-lab", version, about = "Clement matrix test lab")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print a matrix in the text format
    Gen(GenArgs),
    /// Closed-form eigenvalues (and eigenvectors)
    Exact(ExactArgs),
    /// Compute eigenvalues numerically
    Solve(SolveArgs),
    /// Run the property suites
    Verify(VerifyArgs),
    /// Parameter sweep to CSV
    Sweep(SweepArgs),
    /// Plot a sweep CSV as SVG
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    /// Matrix size parameter; the order is n + 1
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "special_a")]
    pub b: Option<f64>,
    /// One-parameter family: b = -a for even n, b = a for odd n
    #[arg(long, allow_hyphen_values = true, conflicts_with = "a")]
    pub special_a: Option<f64>,
}

impl MatrixArgs {
    pub fn params(&self) -> Result<MatrixParams> {
        match self.special_a {
            Some(a) => {
                let b = if self.n.is_multiple_of(2) { 0.0 - a } else { a };
                MatrixParams::new(self.n, a, b)
            }
            None => MatrixParams::new(self.n, self.a, self.b.unwrap_or(0.0)),
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Emit the symmetrized form (fails on non-positive products)
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long, allow_hyphen_values = true)]
    pub scale: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    /// Report distinct eigenvalues and multiplicities
    #[arg(long)]
    pub multiplicity: bool,
    /// Merge tolerance for --multiplicity
    #[arg(long, default_value_t = 0.0)]
    pub tol: f64,
    /// Print exact eigenvectors of the symmetrized matrix (needs a, b > -1)
    #[arg(long)]
    pub vectors: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverArg {
    Unsymmetric,
    Symmetric,
    Bisection,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Unsymmetric => SolverKind::Unsymmetric,
            SolverArg::Symmetric => SolverKind::Symmetric,
            SolverArg::Bisection => SolverKind::Bisection,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, required_unless_present = "matrix")]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "special_a")]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "a")]
    pub special_a: Option<f64>,
    /// Read the matrix from a file written by `gen` instead
    #[arg(long, conflicts_with_all = ["n", "a", "b", "special_a"])]
    pub matrix: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SolverArg::Unsymmetric)]
    pub solver: SolverArg,
    #[arg(long)]
    pub balance: bool,
    #[arg(long, default_value_t = 30)]
    pub max_sweeps: usize,
    /// Bisection tolerance relative to the matrix norm
    #[arg(long, default_value_t = 1e-14)]
    pub rtol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Oracle,
    Recurrence,
    Eigenvector,
    Moments,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::Recurrence => Suite::Recurrence,
            SuiteArg::Eigenvector => Suite::Eigenvector,
            SuiteArg::Moments => Suite::Moments,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Clement,
    Extended,
    SpecialA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LockArg {
    /// b = -a
    NegA,
    /// b = a
    SameA,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = FamilyArg::Extended)]
    pub family: FamilyArg,
    /// start:stop:step, endpoints inclusive
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub a_range: String,
    /// Fixed b
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["b_range", "b_lock"])]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true, conflicts_with = "b_lock")]
    pub b_range: Option<String>,
    #[arg(long, value_enum)]
    pub b_lock: Option<LockArg>,
    #[arg(long, value_enum, default_value_t = SolverArg::Unsymmetric)]
    pub solver: SolverArg,
    #[arg(long)]
    pub balance: bool,
    #[arg(long, default_value_t = 30)]
    pub max_sweeps: usize,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write 0 in the runtime column so output is reproducible
    #[arg(long)]
    pub no_timing: bool,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    pub jobs: Option<usize>,
}

impl SweepArgs {
    pub fn config(&self) -> Result<SweepConfig> {
        let family = match self.family {
            FamilyArg::Clement => Family::Clement,
            FamilyArg::Extended => Family::Extended,
            FamilyArg::SpecialA => Family::SpecialA,
        };
        let mut cfg = SweepConfig::new(self.n, family, self.a_range.parse()?, self.solver.into());
        cfg.b_grid = match (&self.b, &self.b_range, self.b_lock) {
            (_, Some(r), _) => BGrid::Range(r.parse::<GridRange>()?),
            (_, _, Some(LockArg::NegA)) => BGrid::NegA,
            (_, _, Some(LockArg::SameA)) => BGrid::SameA,
            (b, _, _) => BGrid::Fixed(b.unwrap_or(0.0)),
        };
        cfg.solver_config = SolverConfig {
            max_sweeps_per_eigenvalue: self.max_sweeps,
            balance: self.balance,
            ..SolverConfig::default()
        };
        cfg.jobs = self.jobs;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum XArg {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum YArg {
    #[value(name = "rel_error")]
    RelError,
    #[value(name = "max_imag")]
    MaxImag,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub csv: PathBuf,
    #[arg(long, value_enum, default_value_t = XArg::A)]
    pub x: XArg,
    #[arg(long, value_enum, default_value_t = YArg::RelError)]
    pub y: YArg,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Linear y axis instead of the default log scale
    #[arg(long)]
    pub linear: bool,
}

/// `re imag` per line, shortest round-trip decimals.
pub fn format_eigenvalues(values: &[Complex64]) -> String {
    let mut s = String::new();
    for v in values {
        let _ = writeln!(s, "{} {}", v.re, v.im);
    }
    s
}

pub fn format_computed(c: &ComputedSpectrum) -> String {
    let mut s = format_eigenvalues(&c.values);
    let _ = writeln!(
        s,
        "# sweeps={} deflations={} converged={}",
        c.iterations, c.deflations, c.converged
    );
    s
}

pub fn format_exact(spectrum: &ExactSpectrum, multiplicity: Option<f64>) -> String {
    let mut s = format_eigenvalues(spectrum.values());
    if let Some(tol) = multiplicity {
        let report = spectra::classify(spectrum, tol);
        let _ = writeln!(
            s,
            "# distinct={} max_multiplicity={} simple={}",
            report.distinct.len(),
            report.max_multiplicity,
            report.is_simple
        );
        for (v, count) in &report.distinct {
            let _ = writeln!(s, "# {} {} x{}", v.re, v.im, count);
        }
    }
    s
}

/// Rows of the eigenvector matrix; column `j` belongs to the `j`-th
/// eigenvalue in ascending order.
pub fn format_vectors(set: &dualhahn::EigenvectorSet) -> String {
    let mut s = String::from("# eigenvectors (columns, ascending eigenvalues)\n");
    for row in 0..set.order {
        let line: Vec<String> = set.vectors.iter().map(|u| u[row].to_string()).collect();
        let _ = writeln!(s, "{}", line.join(" "));
    }
    s
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn gen(args: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let mut m = matgen::extended(args.matrix.params()?)?;
    if let Some(s) = args.scale {
        m = matgen::scale(&m, s)?;
    }
    if args.symmetric {
        m = matgen::symmetrize(&m)?.to_general();
    }
    emit(out, args.out.as_ref(), &m.to_text())
}

fn exact(args: &ExactArgs, out: &mut dyn Write) -> Result<()> {
    let p = args.matrix.params()?;
    let spectrum = match args.matrix.special_a {
        Some(a) => spectra::special_eigenvalues(p.n, a)?,
        None => spectra::exact_eigenvalues(p),
    };
    let mut text = format_exact(&spectrum, args.multiplicity.then_some(args.tol));
    if args.vectors {
        text.push_str(&format_vectors(&dualhahn::eigenvector_set(p.n, p.a, p.b)?));
    }
    emit(out, None, &text)
}

fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    let m: TridiagonalMatrix = match &args.matrix {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Error::io(path, e))?
            .parse()?,
        None => {
            let matrix = MatrixArgs {
                n: args.n.unwrap_or(0),
                a: args.a,
                b: args.b,
                special_a: args.special_a,
            };
            matgen::extended(matrix.params()?)?
        }
    };
    let cfg = SolverConfig {
        max_sweeps_per_eigenvalue: args.max_sweeps,
        balance: args.balance,
        ..SolverConfig::default()
    };
    let computed = harness::compute(&m, args.solver.into(), &cfg, args.rtol)?;
    emit(out, None, &format_computed(&computed))
}

fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let records = harness::run_sweep(&args.config()?)?;
    match &args.csv {
        Some(path) => harness::write_csv(&records, path, !args.no_timing),
        None => emit(out, None, &harness::format_csv(&records, !args.no_timing)),
    }
}

fn plot(args: &PlotArgs, out: &mut dyn Write) -> Result<()> {
    let records = harness::read_csv(&args.csv)?;
    let x = match args.x {
        XArg::A => XAxis::A,
        XArg::B => XAxis::B,
    };
    let y = match args.y {
        YArg::RelError => YAxis::RelError,
        YArg::MaxImag => YAxis::MaxImag,
    };
    let svg = harness::render_svg(&records, x, y, !args.linear)?;
    emit(out, args.svg.as_ref(), &svg)
}

/// Runs a parsed command. `Ok(false)` means the command ran but reported
/// failures (the verify suites).
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    match &cli.command {
        Command::Gen(a) => gen(a, out).map(|_| true),
        Command::Exact(a) => exact(a, out).map(|_| true),
        Command::Solve(a) => solve(a, out).map(|_| true),
        Command::Sweep(a) => sweep(a, out).map(|_| true),
        Command::Plot(a) => plot(a, out).map(|_| true),
        Command::Verify(a) => {
            let report = verify::run_suite(a.suite.into(), a.seed);
            emit(out, None, &report.render())?;
            Ok(report.passed())
        }
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, out) {
        Ok(true) => 0,
        Ok(false) => {
            let _ = writeln!(err, "error: verification failed");
            1
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
