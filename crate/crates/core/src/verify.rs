//! Seeded property suites over all modules, with a per-check report.
//!
//! The matrix builder is injectable so a deliberately broken `extended` can
//! be shown to fail the suites.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dualhahn::{self, DualHahnParams};
use crate::eigensolve::{solve_unsymmetric, SolverConfig};
use crate::matgen::{self, MatrixParams, TridiagonalMatrix};
use crate::spectra::{self, sort_complex};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Oracle,
    Recurrence,
    Eigenvector,
    Moments,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Suite::Oracle),
            "recurrence" => Ok(Suite::Recurrence),
            "eigenvector" => Ok(Suite::Eigenvector),
            "moments" => Ok(Suite::Moments),
            "all" => Ok(Suite::All),
            _ => Err(Error::Parse(format!("unknown suite {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Number of individual comparisons.
    pub cases: usize,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub limit: f64,
    /// Description of the worst case.
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {} cases, worst {:.3e} (limit {:.0e}){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.worst,
            self.limit,
            if self.detail.is_empty() {
                String::new()
            } else {
                format!(" at {}", self.detail)
            }
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// One line per check plus a summary line.
    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let _ = writeln!(s, "{c}");
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        let _ = writeln!(s, "# {} checks, {} failed", self.checks.len(), failed);
        s
    }
}

/// Tracks the worst case of one check.
struct Worst {
    name: &'static str,
    limit: f64,
    cases: usize,
    worst: f64,
    detail: String,
    error: Option<String>,
}

impl Worst {
    fn new(name: &'static str, limit: f64) -> Self {
        Self {
            name,
            limit,
            cases: 0,
            worst: 0.0,
            detail: String::new(),
            error: None,
        }
    }

    fn record(&mut self, value: f64, detail: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN counts as worse than anything
        let worse = if value.is_nan() {
            !self.worst.is_nan()
        } else {
            value > self.worst
        };
        if worse {
            self.worst = value;
            self.detail = detail();
        }
    }

    fn fail(&mut self, what: impl fmt::Display) {
        self.cases += 1;
        if self.error.is_none() {
            self.error = Some(what.to_string());
        }
    }

    fn finish(self) -> CheckResult {
        let passed = self.error.is_none() && self.worst <= self.limit;
        let detail = match self.error {
            Some(e) => format!("error: {e}"),
            None if passed => String::new(),
            None => self.detail,
        };
        CheckResult {
            name: self.name,
            passed,
            cases: self.cases,
            worst: self.worst,
            limit: self.limit,
            detail,
        }
    }
}

pub type Builder = fn(MatrixParams) -> Result<TridiagonalMatrix>;

/// Grid used by the closed-form oracle.
pub const ORACLE_GRID: [f64; 9] = [-3.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 5.0];
/// Parameter values for the eigenvector contract.
pub const EIGENVECTOR_GRID: [f64; 4] = [0.0, 0.5, 1.0, 3.0];

pub struct Verifier {
    seed: u64,
    builder: Builder,
}

impl Verifier {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            builder: matgen::extended,
        }
    }

    /// Replaces the `H_n(a, b)` builder under test.
    pub fn with_builder(mut self, builder: Builder) -> Self {
        self.builder = builder;
        self
    }

    /// Each suite gets its own generator so suites are reproducible alone.
    fn rng(&self, suite: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(suite);
        rng
    }

    pub fn run(&self, suite: Suite) -> Report {
        let mut checks = Vec::new();
        if matches!(suite, Suite::Oracle | Suite::All) {
            checks.extend(self.oracle());
        }
        if matches!(suite, Suite::Recurrence | Suite::All) {
            checks.extend(self.recurrence());
        }
        if matches!(suite, Suite::Eigenvector | Suite::All) {
            checks.extend(self.eigenvector());
        }
        if matches!(suite, Suite::Moments | Suite::All) {
            checks.extend(self.moments());
        }
        Report { checks }
    }

    pub fn oracle(&self) -> Vec<CheckResult> {
        let mut rng = self.rng(1);
        let build = self.builder;

        let mut closed = Worst::new("oracle.closed-form", 1e-10);
        for n in 1..=12 {
            for &a in &ORACLE_GRID {
                for &b in &ORACLE_GRID {
                    let p = MatrixParams { n, a, b };
                    match build(p) {
                        Ok(m) => {
                            for &lambda in spectra::exact_eigenvalues(p).values() {
                                let r = spectra::normalized_char_poly(&m, lambda).norm();
                                closed.record(r, || format!("n={n} a={a} b={b} lambda={lambda}"));
                            }
                        }
                        Err(e) => closed.fail(e),
                    }
                }
            }
        }

        let mut reduction = Worst::new("oracle.clement-reduction", 0.0);
        for n in 1..=50 {
            match (
                build(MatrixParams { n, a: 0.0, b: 0.0 }),
                matgen::clement(n),
            ) {
                (Ok(h), Ok(c)) => {
                    let same = h.superdiag() == c.superdiag() && h.subdiag() == c.subdiag();
                    reduction.record(if same { 0.0 } else { 1.0 }, || format!("matrix n={n}"));
                }
                (Err(e), _) | (_, Err(e)) => reduction.fail(e),
            }
        }
        for n in 1..=200 {
            let exact = spectra::exact_eigenvalues(MatrixParams { n, a: 0.0, b: 0.0 });
            let mut clement: Vec<Complex64> = (0..=n)
                .map(|j| Complex64::new(2.0 * j as f64 - n as f64, 0.0))
                .collect();
            sort_complex(&mut clement);
            let same = exact.values() == clement.as_slice();
            reduction.record(if same { 0.0 } else { 1.0 }, || format!("spectrum n={n}"));
        }

        // det(M - λI) = -det(λI - M) for even n (odd order)
        let mut product = Worst::new("oracle.product-form", 1e-10);
        for _ in 0..200 {
            let n = 2 * rng.gen_range(1..=8usize);
            let a = rng.gen_range(-5.0..10.0);
            let b = rng.gen_range(-5.0..10.0);
            let lambda = Complex64::new(rng.gen_range(-10.0..10.0), rng.gen_range(-3.0..3.0));
            let p = MatrixParams { n, a, b };
            match (build(p), spectra::product_form_eval(p, lambda)) {
                (Ok(m), Ok(pf)) => {
                    let cp = spectra::char_poly_eval(&m, lambda);
                    let r = (cp + pf).norm() / pf.norm().max(f64::MIN_POSITIVE);
                    product.record(r, || format!("n={n} a={a} b={b} lambda={lambda}"));
                }
                (Err(e), _) | (_, Err(e)) => product.fail(e),
            }
        }

        let mut symmetric = Worst::new("oracle.symmetrize-ulps", 4.0);
        for _ in 0..200 {
            let n = rng.gen_range(1..=60usize);
            let a = rng.gen_range(-0.99..5.0);
            let b = rng.gen_range(-0.99..5.0);
            let p = MatrixParams { n, a, b };
            let pair = build(p)
                .and_then(|m| matgen::symmetrize(&m))
                .and_then(|s| Ok((s, matgen::symmetric_extended(p)?)));
            match pair {
                Ok((s, direct)) => {
                    let ulps = s
                        .offdiag()
                        .iter()
                        .zip(direct.offdiag())
                        .map(|(x, y)| ulp_distance(*x, *y))
                        .max()
                        .unwrap_or(0);
                    symmetric.record(ulps as f64, || format!("n={n} a={a} b={b}"));
                }
                Err(e) => symmetric.fail(e),
            }
        }

        let mut special = Worst::new("oracle.special-family", 1e-14);
        for _ in 0..100 {
            let n = rng.gen_range(1..=101usize);
            let a = rng.gen_range(-10.0..25.0);
            let b = if n % 2 == 0 { -a } else { a };
            let general = spectra::exact_eigenvalues(MatrixParams { n, a, b });
            match spectra::special_eigenvalues(n, a) {
                Ok(s) => {
                    let scale = s.values().iter().map(|v| v.norm()).fold(1.0, f64::max);
                    let diff = general
                        .values()
                        .iter()
                        .zip(s.values())
                        .map(|(x, y)| (x - y).norm())
                        .fold(0.0, f64::max);
                    special.record(diff / scale, || format!("n={n} a={a}"));
                }
                Err(e) => special.fail(e),
            }
        }

        vec![
            closed.finish(),
            reduction.finish(),
            product.finish(),
            symmetric.finish(),
            special.finish(),
        ]
    }

    pub fn recurrence(&self) -> Vec<CheckResult> {
        let mut rng = self.rng(2);
        let mut lemma = Worst::new("recurrence.lemma", 1e-11);
        let mut accepted = 0;
        while accepted < 1000 {
            let gamma = rng.gen_range(-0.99..5.0);
            let delta = rng.gen_range(-0.99..5.0);
            let n_max = rng.gen_range(1..=40usize);
            let n = rng.gen_range(0..n_max);
            let x = rng.gen_range(0..=n_max);
            // the shifted family (γ + 1, δ − 1) needs δ > 0
            if delta <= 0.0 {
                continue;
            }
            accepted += 1;
            let p = DualHahnParams::new(gamma, delta, n_max);
            match dualhahn::recurrence_residuals(n, x, p) {
                Ok(r) => {
                    let worst = r.iter().copied().fold(0.0, f64::max);
                    lemma.record(worst, || {
                        format!("gamma={gamma} delta={delta} N={n_max} n={n} x={x}")
                    });
                }
                Err(e) => lemma.fail(e),
            }
        }

        let mut lowering = Worst::new("recurrence.lowering-nonpositive-delta", 1e-11);
        for _ in 0..300 {
            let gamma = rng.gen_range(-0.99..5.0);
            let delta = rng.gen_range(-0.99..=0.0);
            let n_max = rng.gen_range(1..=40usize);
            let n = rng.gen_range(0..n_max);
            let x = rng.gen_range(0..=n_max);
            let p = DualHahnParams::new(gamma, delta, n_max);
            match dualhahn::lowering_residuals(n, x, p) {
                Ok(r) => lowering.record(r[0].max(r[1]), || {
                    format!("gamma={gamma} delta={delta} N={n_max} n={n} x={x}")
                }),
                Err(e) => lowering.fail(e),
            }
        }
        vec![lemma.finish(), lowering.finish()]
    }

    pub fn eigenvector(&self) -> Vec<CheckResult> {
        let mut residual = Worst::new("eigenvector.residual", 1e-11);
        let mut orthogonal = Worst::new("eigenvector.orthogonality", 1e-10);
        let mut values = Worst::new("eigenvector.eigenvalues", 1e-14);
        for n in 1..=61 {
            for &a in &EIGENVECTOR_GRID {
                for &b in &EIGENVECTOR_GRID {
                    let set = match dualhahn::eigenvector_set(n, a, b) {
                        Ok(set) => set,
                        Err(e) => {
                            residual.fail(e);
                            continue;
                        }
                    };
                    for (lambda, u) in set.eigenvalues.iter().zip(&set.vectors) {
                        match dualhahn::relative_residual(n, a, b, *lambda, u) {
                            Ok(r) => {
                                residual.record(r, || format!("n={n} a={a} b={b} lambda={lambda}"))
                            }
                            Err(e) => residual.fail(e),
                        }
                    }
                    if n <= 40 {
                        orthogonal
                            .record(set.orthogonality_defect(), || format!("n={n} a={a} b={b}"));
                    }
                    let exact = spectra::exact_eigenvalues(MatrixParams { n, a, b });
                    let scale = set.eigenvalues.iter().map(|v| v.abs()).fold(1.0, f64::max);
                    let diff = set
                        .eigenvalues
                        .iter()
                        .zip(exact.values())
                        .map(|(x, y)| (x - y.re).abs() + y.im.abs())
                        .fold(0.0, f64::max);
                    values.record(diff / scale, || format!("n={n} a={a} b={b}"));
                }
            }
        }
        vec![residual.finish(), orthogonal.finish(), values.finish()]
    }

    pub fn moments(&self) -> Vec<CheckResult> {
        let mut rng = self.rng(4);
        let build = self.builder;
        let mut first = Worst::new("moments.trace", 1e-12);
        let mut second = Worst::new("moments.second", 1e-12);
        let params: Vec<(f64, f64)> = (0..100)
            .map(|_| (rng.gen_range(-5.0..10.0), rng.gen_range(-5.0..10.0)))
            .collect();
        for n in 1..=200 {
            for &(a, b) in &params {
                let p = MatrixParams { n, a, b };
                let m = match build(p) {
                    Ok(m) => m,
                    Err(e) => {
                        first.fail(e);
                        continue;
                    }
                };
                let exact = spectra::exact_eigenvalues(p);
                let (sum, moment2) = power_sums(exact.values());
                let mass: f64 = exact.values().iter().map(|v| v.norm()).sum();
                first.record(sum.norm() / mass.max(1.0), || format!("n={n} a={a} b={b}"));
                let target: f64 = 2.0 * m.products().iter().sum::<f64>();
                let scale = exact
                    .values()
                    .iter()
                    .map(|v| v.norm_sqr())
                    .sum::<f64>()
                    .max(target.abs());
                second.record((moment2 - target).norm() / scale.max(1.0), || {
                    format!("n={n} a={a} b={b}")
                });
            }
        }

        // the unsymmetric solver honours the same identities, more loosely
        let mut solver_first = Worst::new("moments.solver-trace", 1e-10);
        let mut solver_second = Worst::new("moments.solver-second", 1e-8);
        let cfg = SolverConfig::default();
        for _ in 0..30 {
            let n = rng.gen_range(1..=60usize);
            let a = rng.gen_range(0.0..5.0);
            let b = rng.gen_range(0.0..5.0);
            let p = MatrixParams { n, a, b };
            let result = build(p).and_then(|m| Ok((solve_unsymmetric(&m, &cfg)?, m)));
            match result {
                Ok((c, m)) if c.converged => {
                    let (sum, moment2) = power_sums(&c.values);
                    let order = m.order() as f64;
                    let norm = m.norm_inf().max(1.0);
                    solver_first
                        .record(sum.norm() / (norm * order), || format!("n={n} a={a} b={b}"));
                    let target: f64 = 2.0 * m.products().iter().sum::<f64>();
                    solver_second.record((moment2 - target).norm() / target.abs().max(1.0), || {
                        format!("n={n} a={a} b={b}")
                    });
                }
                Ok(_) => {
                    solver_first.fail(format!("solver did not converge for n={n} a={a} b={b}"))
                }
                Err(e) => solver_first.fail(e),
            }
        }
        vec![
            first.finish(),
            second.finish(),
            solver_first.finish(),
            solver_second.finish(),
        ]
    }
}

/// `(Σλ, Σλ²)`.
fn power_sums(values: &[Complex64]) -> (Complex64, Complex64) {
    values.iter().fold(
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        |(s1, s2), v| (s1 + v, s2 + v * v),
    )
}

fn ulp_distance(x: f64, y: f64) -> u64 {
    let key = |v: f64| {
        let bits = v.to_bits() as i64;
        if bits < 0 {
            i64::MIN - bits
        } else {
            bits
        }
    };
    key(x).abs_diff(key(y))
}

pub fn run_suite(suite: Suite, seed: u64) -> Report {
    Verifier::new(seed).run(suite)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `extended` with the odd/even rule on the superdiagonal swapped.
    fn off_by_one(p: MatrixParams) -> Result<TridiagonalMatrix> {
        let n = p.n;
        let sup = (1..=n)
            .map(|k| k as f64 + if k % 2 == 0 { p.a } else { 0.0 })
            .collect();
        let sub = (1..=n)
            .map(|i| {
                let k = n + 1 - i;
                k as f64 + if k % 2 == 1 { p.b } else { 0.0 }
            })
            .collect();
        TridiagonalMatrix::new(sup, sub, "mutant")
    }

    #[test]
    fn ulp_distance_basics() {
        assert_eq!(ulp_distance(1.0, 1.0), 0);
        assert_eq!(ulp_distance(1.0, f64::from_bits(1.0f64.to_bits() + 3)), 3);
        assert_eq!(ulp_distance(0.0, -0.0), 0);
    }

    #[test]
    fn oracle_and_moments_pass() {
        let v = Verifier::new(7);
        let report = Report {
            checks: v.oracle().into_iter().chain(v.moments()).collect(),
        };
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn mutated_builder_is_caught() {
        let v = Verifier::new(7).with_builder(off_by_one);
        let oracle = Report { checks: v.oracle() };
        assert!(!oracle.passed());
        assert_eq!(oracle.first_failure().unwrap().name, "oracle.closed-form");
        let moments = Report {
            checks: v.moments(),
        };
        assert!(!moments.passed());
    }

    #[test]
    fn reports_are_deterministic() {
        let a = run_suite(Suite::Recurrence, 42).render();
        let b = run_suite(Suite::Recurrence, 42).render();
        assert_eq!(a, b);
        assert!(a.contains("PASS recurrence.lemma: 1000 cases"));
    }

    #[test]
    fn suite_names_parse() {
        assert_eq!("all".parse::<Suite>().unwrap(), Suite::All);
        assert!("everything".parse::<Suite>().is_err());
    }
}
