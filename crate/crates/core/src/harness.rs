//! Accuracy metrics and parameter sweeps: run a solver over a grid of
//! `(a, b)` values, compare against the closed-form spectrum, and emit the
//! results as CSV or as a standalone SVG plot.

use std::fmt::{self, Write as _};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigensolve::{
    bisection_eigenvalues, solve_symmetric, solve_unsymmetric, ComputedSpectrum, SolverConfig,
};
use crate::matgen::{self, MatrixParams, TridiagonalMatrix};
use crate::spectra::{self, sort_complex, ExactSpectrum};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "n,a,b,solver,balance,rel_error,max_imag,converged,runtime_ms";

/// `‖x - x*‖_∞ / ‖x‖_∞` with both lists sorted by (real, imaginary).
pub fn relative_error(exact: &ExactSpectrum, computed: &ComputedSpectrum) -> Result<f64> {
    relative_error_values(exact.values(), &computed.values)
}

/// Slice form of [`relative_error`].
pub fn relative_error_values(exact: &[Complex64], computed: &[Complex64]) -> Result<f64> {
    if exact.len() != computed.len() {
        return Err(Error::LengthMismatch {
            exact: exact.len(),
            computed: computed.len(),
        });
    }
    let mut x = exact.to_vec();
    let mut y = computed.to_vec();
    sort_complex(&mut x);
    sort_complex(&mut y);
    let diff = x
        .iter()
        .zip(&y)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max);
    let scale = x.iter().map(|u| u.norm()).fold(0.0, f64::max);
    if diff == 0.0 {
        return Ok(0.0);
    }
    if scale == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(diff / scale)
}

/// Largest `|Im λ|`, 0 for an all-real spectrum.
pub fn max_imag(computed: &ComputedSpectrum) -> f64 {
    computed
        .values
        .iter()
        .map(|v| v.im.abs())
        .fold(0.0, f64::max)
}

/// Inclusive arithmetic grid `start, start + step, ...` up to `stop`; the
/// endpoint is kept when it is within half a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl GridRange {
    pub fn new(start: f64, stop: f64, step: f64) -> Result<Self> {
        let r = Self { start, stop, step };
        r.validate()?;
        Ok(r)
    }

    pub fn single(value: f64) -> Self {
        Self {
            start: value,
            stop: value,
            step: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.stop.is_finite()) {
            return Err(Error::InvalidParameter(
                "grid endpoints must be finite".into(),
            ));
        }
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid step must be positive (got {})",
                self.step
            )));
        }
        if self.stop < self.start - 0.5 * self.step {
            return Err(Error::InvalidParameter(format!(
                "empty grid: stop {} is below start {}",
                self.stop, self.start
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        ((self.stop - self.start) / self.step + 0.5).floor() as usize + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid values, each computed as `start + k * step` (no accumulation).
    pub fn points(&self) -> Vec<f64> {
        (0..self.len())
            .map(|k| self.start + k as f64 * self.step)
            .collect()
    }
}

impl FromStr for GridRange {
    type Err = Error;

    /// `start:stop:step`, or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad number {t:?} in range {s:?}")))
        };
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Self::single(num(v)?)),
            [start, stop, step] => Self::new(num(start)?, num(stop)?, num(step)?),
            _ => Err(Error::Parse(format!(
                "range must be start:stop:step or a single value (got {s:?})"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// `C_n`; the grids are ignored and a single point `a = b = 0` is run.
    Clement,
    Extended,
    /// `H_n(a)`: `b = -a` for even `n`, `b = a` for odd `n`; `b_grid` ignored.
    SpecialA,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Clement => "clement",
            Family::Extended => "extended",
            Family::SpecialA => "special-a",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BGrid {
    Range(GridRange),
    Fixed(f64),
    /// `b = -a`.
    NegA,
    /// `b = a`.
    SameA,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolverKind {
    Unsymmetric,
    Symmetric,
    Bisection,
}

impl SolverKind {
    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Unsymmetric => "unsymmetric",
            SolverKind::Symmetric => "symmetric",
            SolverKind::Bisection => "bisection",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unsymmetric" => Ok(SolverKind::Unsymmetric),
            "symmetric" => Ok(SolverKind::Symmetric),
            "bisection" => Ok(SolverKind::Bisection),
            _ => Err(Error::Parse(format!("unknown solver {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub family: Family,
    pub a_grid: GridRange,
    pub b_grid: BGrid,
    pub solver: SolverKind,
    /// `balance` is taken from here.
    pub solver_config: SolverConfig,
    /// Bisection tolerance relative to `‖m‖_∞`.
    pub bisection_rtol: f64,
    /// Worker threads; `None` uses rayon's global pool.
    pub jobs: Option<usize>,
}

impl SweepConfig {
    pub fn new(n: usize, family: Family, a_grid: GridRange, solver: SolverKind) -> Self {
        Self {
            n,
            family,
            a_grid,
            b_grid: BGrid::Fixed(0.0),
            solver,
            solver_config: SolverConfig::default(),
            bisection_rtol: 1e-14,
            jobs: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidDimension(0));
        }
        self.a_grid.validate()?;
        if let BGrid::Range(r) = &self.b_grid {
            r.validate()?;
        }
        if let BGrid::Fixed(b) = self.b_grid {
            if !b.is_finite() {
                return Err(Error::InvalidParameter("b must be finite".into()));
            }
        }
        if self.jobs == Some(0) {
            return Err(Error::InvalidParameter("jobs must be positive".into()));
        }
        if self.bisection_rtol.is_nan() || self.bisection_rtol <= 0.0 {
            return Err(Error::InvalidParameter(
                "bisection tolerance must be positive".into(),
            ));
        }
        self.solver_config.validate()
    }

    /// Grid points in lexicographic `(a, b)` order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        match self.family {
            Family::Clement => vec![(0.0, 0.0)],
            Family::SpecialA => {
                let even = self.n.is_multiple_of(2);
                self.a_grid
                    .points()
                    .into_iter()
                    .map(|a| (a, if even { 0.0 - a } else { a }))
                    .collect()
            }
            Family::Extended => {
                let a_points = self.a_grid.points();
                match &self.b_grid {
                    BGrid::Range(r) => {
                        let b_points = r.points();
                        a_points
                            .iter()
                            .flat_map(|&a| b_points.iter().map(move |&b| (a, b)))
                            .collect()
                    }
                    BGrid::Fixed(b) => a_points.into_iter().map(|a| (a, *b)).collect(),
                    BGrid::NegA => a_points.into_iter().map(|a| (a, 0.0 - a)).collect(),
                    BGrid::SameA => a_points.into_iter().map(|a| (a, a)).collect(),
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub solver: SolverKind,
    pub balance: bool,
    pub rel_error: f64,
    pub max_imag: f64,
    pub converged: bool,
    pub runtime_ms: f64,
}

fn build(family: Family, n: usize, a: f64, b: f64) -> Result<(TridiagonalMatrix, ExactSpectrum)> {
    match family {
        Family::Clement => Ok((matgen::clement(n)?, spectra::clement_eigenvalues(n)?)),
        Family::SpecialA => Ok((matgen::special(n, a)?, spectra::special_eigenvalues(n, a)?)),
        Family::Extended => {
            let p = MatrixParams::new(n, a, b)?;
            Ok((matgen::extended(p)?, spectra::exact_eigenvalues(p)))
        }
    }
}

/// Runs one solver on `m`.
pub fn compute(
    m: &TridiagonalMatrix,
    solver: SolverKind,
    cfg: &SolverConfig,
    bisection_rtol: f64,
) -> Result<ComputedSpectrum> {
    match solver {
        SolverKind::Unsymmetric => solve_unsymmetric(m, cfg),
        SolverKind::Symmetric => solve_symmetric(&matgen::symmetrize(m)?, cfg),
        SolverKind::Bisection => {
            let s = matgen::symmetrize(m)?;
            let tol = bisection_rtol * s.norm_inf().max(1.0);
            let values = bisection_eigenvalues(&s, tol)?
                .into_iter()
                .map(|v| Complex64::new(v, 0.0))
                .collect();
            Ok(ComputedSpectrum {
                values,
                iterations: 0,
                deflations: 0,
                converged: true,
            })
        }
    }
}

fn run_point(cfg: &SweepConfig, a: f64, b: f64) -> SweepRecord {
    let start = Instant::now();
    let outcome = build(cfg.family, cfg.n, a, b).and_then(|(m, exact)| {
        let computed = compute(&m, cfg.solver, &cfg.solver_config, cfg.bisection_rtol)?;
        Ok((
            relative_error(&exact, &computed)?,
            max_imag(&computed),
            computed.converged,
        ))
    });
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    // a failed point is kept with NaN metrics so the sweep can continue
    let (rel_error, imag, converged) = outcome.unwrap_or((f64::NAN, f64::NAN, false));
    SweepRecord {
        n: cfg.n,
        a,
        b,
        solver: cfg.solver,
        balance: cfg.solver_config.balance,
        rel_error,
        max_imag: imag,
        converged,
        runtime_ms,
    }
}

/// One record per grid point, in lexicographic `(a, b)` order whatever the
/// completion order of the workers.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRecord>> {
    cfg.validate()?;
    let points = cfg.points();
    let work = || -> Vec<SweepRecord> {
        points
            .par_iter()
            .map(|&(a, b)| run_point(cfg, a, b))
            .collect()
    };
    match cfg.jobs {
        None => Ok(work()),
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(work))
        }
    }
}

/// CSV text; with `timing == false` the runtime column is written as 0 so
/// that repeated runs are byte-identical.
pub fn format_csv(records: &[SweepRecord], timing: bool) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let runtime = if timing { r.runtime_ms } else { 0.0 };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.16e},{:.16e},{},{:.16e}",
            r.n, r.a, r.b, r.solver, r.balance, r.rel_error, r.max_imag, r.converged, runtime
        );
    }
    out
}

pub fn write_csv(records: &[SweepRecord], path: &Path, timing: bool) -> Result<()> {
    write_file(path, format_csv(records, timing).as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(bytes).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<SweepRecord>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim_end() == CSV_HEADER => {}
        other => {
            return Err(Error::Parse(format!(
                "expected CSV header {CSV_HEADER:?}, found {:?}",
                other.unwrap_or("")
            )))
        }
    }
    let mut records = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line.trim_end();
        if line.is_empty() {
            continue;
        }
        let row = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 9 {
            return Err(Error::Parse(format!(
                "line {row}: expected 9 fields, found {}",
                fields.len()
            )));
        }
        let bad = |what: &str| Error::Parse(format!("line {row}: bad {what}"));
        let float = |k: usize, what: &str| fields[k].parse::<f64>().map_err(|_| bad(what));
        let boolean = |k: usize, what: &str| fields[k].parse::<bool>().map_err(|_| bad(what));
        records.push(SweepRecord {
            n: fields[0].parse().map_err(|_| bad("n"))?,
            a: float(1, "a")?,
            b: float(2, "b")?,
            solver: fields[3].parse().map_err(|_| bad("solver"))?,
            balance: boolean(4, "balance")?,
            rel_error: float(5, "rel_error")?,
            max_imag: float(6, "max_imag")?,
            converged: boolean(7, "converged")?,
            runtime_ms: float(8, "runtime_ms")?,
        });
    }
    Ok(records)
}

pub fn read_csv(path: &Path) -> Result<Vec<SweepRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_csv(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XAxis {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YAxis {
    RelError,
    MaxImag,
}

impl YAxis {
    fn name(self) -> &'static str {
        match self {
            YAxis::RelError => "relative error",
            YAxis::MaxImag => "largest imaginary part",
        }
    }
}

/// Best guess of the matrix family from the recorded parameters.
pub fn infer_family(records: &[SweepRecord]) -> Family {
    if records.iter().all(|r| r.a == 0.0 && r.b == 0.0) {
        Family::Clement
    } else if records.iter().all(|r| {
        if r.n % 2 == 0 {
            r.b == -r.a
        } else {
            r.b == r.a
        }
    }) {
        Family::SpecialA
    } else {
        Family::Extended
    }
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

fn tick_label(v: f64) -> String {
    if v == 0.0 || (1e-3..1e5).contains(&v.abs()) {
        let s = format!("{:.3}", v);
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        format!("{v:.0e}")
    }
}

/// Standalone SVG 1.1 plot of one metric against `a` or `b`.
///
/// With `log_y` the axis is logarithmic; zero values are drawn on the bottom
/// edge. When no value is positive the plot falls back to a linear axis and
/// says so.
pub fn render_svg(
    records: &[SweepRecord],
    x_axis: XAxis,
    y_axis: YAxis,
    log_y: bool,
) -> Result<String> {
    let first = records
        .first()
        .ok_or_else(|| Error::InconsistentSweep("no records to plot".into()))?;
    for r in records {
        if r.n != first.n || r.solver != first.solver || r.balance != first.balance {
            return Err(Error::InconsistentSweep(
                "records mix n, solver or balance settings".into(),
            ));
        }
    }
    let xs: Vec<f64> = records
        .iter()
        .map(|r| if x_axis == XAxis::A { r.a } else { r.b })
        .collect();
    let mut sorted = xs.clone();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        let other = if x_axis == XAxis::A { "b" } else { "a" };
        return Err(Error::InconsistentSweep(format!(
            "{other} varies independently of the plotted axis"
        )));
    }
    let ys: Vec<f64> = records
        .iter()
        .map(|r| match y_axis {
            YAxis::RelError => r.rel_error,
            YAxis::MaxImag => r.max_imag,
        })
        .collect();

    let finite: Vec<f64> = ys.iter().copied().filter(|v| v.is_finite()).collect();
    let min_pos = finite
        .iter()
        .copied()
        .filter(|&v| v > 0.0)
        .fold(f64::INFINITY, f64::min);
    let use_log = log_y && min_pos.is_finite();
    let (y_lo, y_hi) = if use_log {
        let max = finite.iter().copied().fold(min_pos, f64::max);
        let lo = min_pos.log10().floor();
        let hi = max.log10().ceil().max(lo + 1.0);
        (lo, hi)
    } else {
        let lo = finite.iter().copied().fold(0.0, f64::min);
        let hi = finite.iter().copied().fold(0.0, f64::max);
        if hi > lo {
            (lo, hi)
        } else {
            (lo, lo + 1.0)
        }
    };
    let (x_lo, x_hi) = match (sorted.first(), sorted.last()) {
        (Some(&lo), Some(&hi)) if hi > lo => (lo, hi),
        (Some(&v), _) => (v - 1.0, v + 1.0),
        _ => unreachable!(),
    };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let py = |y: f64| {
        let t = if use_log {
            if y > 0.0 {
                y.log10()
            } else {
                y_lo
            }
        } else {
            y
        };
        TOP + plot_h - (t - y_lo) / (y_hi - y_lo) * plot_h
    };

    let family = infer_family(records);
    let title = format!(
        "{} vs {}, n={}, {}, {} solver{}",
        y_axis.name(),
        if x_axis == XAxis::A { "a" } else { "b" },
        first.n,
        family.name(),
        first.solver,
        if first.balance { " (balanced)" } else { "" }
    );

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">{}</text>"#,
        WIDTH / 2.0,
        escape(&title)
    );
    let _ = writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );

    // x ticks
    for i in 0..=5 {
        let x = x_lo + (x_hi - x_lo) * i as f64 / 5.0;
        let xp = px(x);
        let _ = writeln!(
            s,
            r#"<line x1="{xp:.2}" y1="{:.2}" x2="{xp:.2}" y2="{:.2}" stroke="black"/><text x="{xp:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            TOP + plot_h,
            TOP + plot_h + 5.0,
            TOP + plot_h + 18.0,
            tick_label(x)
        );
    }
    // y ticks
    let y_ticks: Vec<(f64, String)> = if use_log {
        let step = ((y_hi - y_lo) / 8.0).ceil().max(1.0);
        let mut t = Vec::new();
        let mut e = y_lo;
        while e <= y_hi + 1e-9 {
            t.push((10f64.powf(e), format!("1e{e:.0}")));
            e += step;
        }
        t
    } else {
        (0..=5)
            .map(|i| {
                let v = y_lo + (y_hi - y_lo) * i as f64 / 5.0;
                (v, tick_label(v))
            })
            .collect()
    };
    for (v, label) in &y_ticks {
        let yp = py(*v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{yp:.2}" x2="{LEFT}" y2="{yp:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            LEFT - 5.0,
            LEFT - 8.0,
            yp + 4.0,
            label
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 15.0,
        if x_axis == XAxis::A { "a" } else { "b" }
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + plot_h / 2.0,
        escape(&format!(
            "{}{}",
            y_axis.name(),
            if use_log { " (log scale)" } else { "" }
        ))
    );
    if log_y && !use_log {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" fill="gray">no positive values: linear scale</text>"#,
            LEFT + plot_w - 6.0,
            TOP + 16.0
        );
    }

    let mut pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(&ys)
        .filter(|(_, y)| y.is_finite())
        .map(|(&x, &y)| (px(x), py(y)))
        .collect();
    pts.sort_by(|p, q| p.0.total_cmp(&q.0));
    if pts.len() > 1 {
        let path: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
            path.join(" ")
        );
    }
    for (x, y) in &pts {
        let _ = writeln!(
            s,
            r#"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="steelblue"/>"#
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn write_svg(
    records: &[SweepRecord],
    x_axis: XAxis,
    y_axis: YAxis,
    log_y: bool,
    path: &Path,
) -> Result<()> {
    let svg = render_svg(records, x_axis, y_axis, log_y)?;
    write_file(path, svg.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn spectrum(values: Vec<Complex64>) -> ComputedSpectrum {
        ComputedSpectrum {
            values,
            iterations: 0,
            deflations: 0,
            converged: true,
        }
    }

    #[test]
    fn relative_error_examples() {
        let exact = [c(-2.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)];
        assert_eq!(relative_error_values(&exact, &exact).unwrap(), 0.0);
        let computed = [c(2.0, 0.0), c(-2.0, 0.0), c(1e-8, 0.0)];
        let e = relative_error_values(&exact, &computed).unwrap();
        assert!((e - 5e-9).abs() < 1e-22);
        assert!(matches!(
            relative_error_values(&exact, &computed[..2]),
            Err(Error::LengthMismatch {
                exact: 3,
                computed: 2
            })
        ));
        let zero = [c(0.0, 0.0)];
        assert_eq!(relative_error_values(&zero, &zero).unwrap(), 0.0);
    }

    #[test]
    fn relative_error_is_scale_invariant() {
        let exact: Vec<_> = (0..7).map(|k| c(k as f64 - 3.0, 0.0)).collect();
        let computed: Vec<_> = exact.iter().map(|v| v + c(1e-9 * v.re, 1e-10)).collect();
        let base = relative_error_values(&exact, &computed).unwrap();
        // power-of-two factors scale every entry exactly
        for s in [0.125, 2.0, 1024.0] {
            let scaled: Vec<_> = exact.iter().map(|v| v * s).collect();
            let scaled_c: Vec<_> = computed.iter().map(|v| v * s).collect();
            let e = relative_error_values(&scaled, &scaled_c).unwrap();
            assert!(((e - base) / base).abs() <= 1e-15);
        }
    }

    #[test]
    fn max_imag_examples() {
        assert_eq!(max_imag(&spectrum(vec![c(1.0, 0.0), c(-1.0, 0.0)])), 0.0);
        let r2 = 2f64.sqrt();
        assert_eq!(max_imag(&spectrum(vec![c(0.0, -r2), c(0.0, r2)])), r2);
    }

    #[test]
    fn grid_arithmetic() {
        assert_eq!(GridRange::new(-5.0, 25.0, 0.5).unwrap().len(), 61);
        assert_eq!(GridRange::new(-10.0, 5.0, 0.25).unwrap().len(), 61);
        let g: GridRange = "0:1:0.3".parse().unwrap();
        assert_eq!(g.points().len(), 4); // 0.9 + 0.3 is within half a step of 1
        let g: GridRange = "0:1.1:0.5".parse().unwrap();
        assert_eq!(g.points(), vec![0.0, 0.5, 1.0]);
        let g: GridRange = "-2.5".parse().unwrap();
        assert_eq!(g.points(), vec![-2.5]);
        assert!("1:0:0.5".parse::<GridRange>().is_err());
        assert!("0:1:0".parse::<GridRange>().is_err());
        assert!("0:1".parse::<GridRange>().is_err());
    }

    #[test]
    fn figure_one_grid_has_61_records() {
        let cfg = SweepConfig::new(
            10,
            Family::SpecialA,
            GridRange::new(-5.0, 25.0, 0.5).unwrap(),
            SolverKind::Unsymmetric,
        );
        let records = run_sweep(&cfg).unwrap();
        assert_eq!(records.len(), 61);
        assert!(records.windows(2).all(|w| w[0].a < w[1].a));
        assert!(records.iter().all(|r| r.b == -r.a));
        assert!(records
            .iter()
            .all(|r| r.converged && r.rel_error.is_finite()));
    }

    #[test]
    fn extended_grid_is_lexicographic() {
        let mut cfg = SweepConfig::new(
            6,
            Family::Extended,
            GridRange::new(0.0, 1.0, 0.5).unwrap(),
            SolverKind::Symmetric,
        );
        cfg.b_grid = BGrid::Range(GridRange::new(1.0, 2.0, 1.0).unwrap());
        cfg.jobs = Some(3);
        let records = run_sweep(&cfg).unwrap();
        let ab: Vec<_> = records.iter().map(|r| (r.a, r.b)).collect();
        assert_eq!(
            ab,
            vec![
                (0.0, 1.0),
                (0.0, 2.0),
                (0.5, 1.0),
                (0.5, 2.0),
                (1.0, 1.0),
                (1.0, 2.0)
            ]
        );
        assert!(records
            .iter()
            .all(|r| r.max_imag == 0.0 && r.rel_error < 1e-13));
    }

    #[test]
    fn failures_are_recorded_not_raised() {
        let mut cfg = SweepConfig::new(
            40,
            Family::Extended,
            GridRange::new(0.0, 2.0, 1.0).unwrap(),
            SolverKind::Unsymmetric,
        );
        cfg.solver_config.max_sweeps_per_eigenvalue = 1;
        cfg.b_grid = BGrid::SameA;
        let records = run_sweep(&cfg).unwrap();
        assert_eq!(records.len(), 3);
        assert!(records.iter().all(|r| !r.converged));

        // symmetric solver on a product-negative point: the point fails, the sweep goes on
        let mut cfg = SweepConfig::new(
            4,
            Family::Extended,
            GridRange::new(-3.0, 0.0, 3.0).unwrap(),
            SolverKind::Symmetric,
        );
        cfg.b_grid = BGrid::Fixed(0.0);
        let records = run_sweep(&cfg).unwrap();
        assert!(!records[0].converged && records[0].rel_error.is_nan());
        assert!(records[1].converged);
    }

    fn sample_records() -> Vec<SweepRecord> {
        (0..3)
            .map(|k| SweepRecord {
                n: 10,
                a: k as f64 * 0.1,
                b: -(k as f64 * 0.1),
                solver: SolverKind::Unsymmetric,
                balance: false,
                rel_error: 1.0 / 3.0 * 10f64.powi(-k),
                max_imag: 0.0,
                converged: true,
                runtime_ms: 0.25,
            })
            .collect()
    }

    #[test]
    fn csv_layout_and_round_trip() {
        let records = sample_records();
        let text = format_csv(&records, true);
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(parse_csv(&text).unwrap(), records);
        let no_timing = parse_csv(&format_csv(&records, false)).unwrap();
        assert!(no_timing.iter().all(|r| r.runtime_ms == 0.0));
        assert_eq!(format_csv(&[], true), format!("{CSV_HEADER}\n"));
        assert!(parse_csv("n,a\n").is_err());
    }

    #[test]
    fn csv_file_errors_carry_the_path() {
        let path = Path::new("/nonexistent-dir/out.csv");
        let err = write_csv(&sample_records(), path, true).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }

    #[test]
    fn svg_single_point_and_degenerate_data() {
        let one = &sample_records()[..1];
        let svg = render_svg(one, XAxis::A, YAxis::RelError, true).unwrap();
        assert_eq!(svg.matches("<circle").count(), 1);
        assert!(svg.contains("n=10"));

        let zeros = sample_records();
        let svg = render_svg(&zeros, XAxis::A, YAxis::MaxImag, true).unwrap();
        assert!(svg.contains("linear scale"));
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn svg_rejects_mixed_parameters() {
        let mut records = sample_records();
        records[1].n = 11;
        assert!(matches!(
            render_svg(&records, XAxis::A, YAxis::RelError, true),
            Err(Error::InconsistentSweep(_))
        ));
        let mut records = sample_records();
        records[1].a = records[0].a;
        assert!(matches!(
            render_svg(&records, XAxis::A, YAxis::RelError, true),
            Err(Error::InconsistentSweep(_))
        ));
    }
}
