//! Dual Hahn polynomials `R_n(λ(x); γ, δ, N)` on the quadratic lattice
//! `λ(x) = x (x + γ + δ + 1)`, their orthonormal versions, and the exact
//! eigenvectors of the symmetrized extension `H̃_n(a, b)` built from them.
//!
//! Orthonormal functions use the standard discrete dual Hahn weight
//!
//! ```text
//! w(x) = (2x+γ+δ+1) (γ+1)_x N! N! / ((N-x)! (x+γ+δ+1)_{N+1} (δ+1)_x x!)
//! ```
//!
//! and norm `h_n = 1 / (binom(γ+n, n) binom(δ+N-n, N-n))`, so that
//! `R̃_n(λ(x)) = sqrt(w(x) / h_n) R_n(λ(x))` forms an orthogonal
//! `(N+1) × (N+1)` table. Every Pochhammer product is accumulated
//! iteratively (in log space for the weight) without gamma-function calls.

use crate::dd::{self, DoubleDouble};
use crate::matgen::{symmetric_extended, MatrixParams};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualHahnParams {
    pub gamma: f64,
    pub delta: f64,
    /// Upper end `N` of the lattice `x = 0..=N`.
    pub n_max: usize,
}

impl DualHahnParams {
    pub fn new(gamma: f64, delta: f64, n_max: usize) -> Self {
        Self {
            gamma,
            delta,
            n_max,
        }
    }

    /// Whether the discrete orthogonality weight is positive (`γ, δ > -1`).
    pub fn is_valid(&self) -> bool {
        self.gamma > -1.0 && self.delta > -1.0 && self.gamma.is_finite() && self.delta.is_finite()
    }

    fn check_valid(&self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "dual Hahn parameters need gamma > -1 and delta > -1 (got gamma={}, delta={})",
                self.gamma, self.delta
            )))
        }
    }

    /// `λ(x) = x (x + γ + δ + 1)`.
    pub fn lattice(&self, x: f64) -> f64 {
        x * (x + self.gamma + self.delta + 1.0)
    }

    fn check_index(&self, what: &str, value: usize) -> Result<()> {
        if value > self.n_max {
            Err(Error::OutOfRange(format!(
                "{what}={value} exceeds N={}",
                self.n_max
            )))
        } else {
            Ok(())
        }
    }
}

/// The terminating series `3F2(-n, -x, x+γ+δ+1; γ+1, -N; 1)`.
pub fn dual_hahn_r(n: usize, x: usize, p: DualHahnParams) -> Result<f64> {
    p.check_index("n", n)?;
    p.check_index("x", x)?;
    let (nf, xf, big_n) = (n as f64, x as f64, p.n_max as f64);
    // The series alternates and cancels heavily once N reaches a dozen or
    // so; terms and partial sums are carried in double-double precision.
    let c = dd::sum(xf, p.gamma) + dd::sum(p.delta, 1.0);
    let gamma_one = dd::sum(p.gamma, 1.0);
    let mut term = DoubleDouble::from(1.0);
    let mut sum = DoubleDouble::from(1.0);
    for j in 0..n.min(x) {
        let jf = j as f64;
        let lower = gamma_one + jf;
        if lower.hi() == 0.0 {
            return Err(Error::Pole {
                j,
                which: "gamma + 1 + j",
            });
        }
        // j < min(n, x) <= N, so -N + j never vanishes here
        let numer = dd::product(jf - nf, jf - xf) * (c + jf);
        let denom = lower * dd::product(jf - big_n, jf + 1.0);
        term = term * numer / denom;
        sum = sum + term;
    }
    Ok(sum.to_f64())
}

/// `ln w(x)` for the dual Hahn weight; the factor `(2x+c)/(x+c)_{N+1}` with
/// `c = γ+δ+1` is reduced to `1/(c+1)_N` at `x = 0` so `c = 0` is harmless.
fn ln_weight(x: usize, p: DualHahnParams) -> f64 {
    let c = p.gamma + p.delta + 1.0;
    let big_n = p.n_max;
    let mut ln = 0.0;
    if x == 0 {
        ln -= (1..=big_n).map(|i| (c + i as f64).ln()).sum::<f64>();
    } else {
        let xf = x as f64;
        ln += (2.0 * xf + c).ln();
        ln -= (0..=big_n).map(|i| (xf + c + i as f64).ln()).sum::<f64>();
    }
    ln += (0..x).map(|i| (p.gamma + 1.0 + i as f64).ln()).sum::<f64>();
    ln -= (0..x).map(|i| (p.delta + 1.0 + i as f64).ln()).sum::<f64>();
    ln += 2.0 * ln_factorial(big_n) - ln_factorial(big_n - x) - ln_factorial(x);
    ln
}

/// `-ln h_n = ln binom(γ+n, n) + ln binom(δ+N-n, N-n)`.
fn ln_inverse_norm(n: usize, p: DualHahnParams) -> f64 {
    let rising = |start: f64, len: usize| {
        (0..len)
            .map(|i| ((start + i as f64) / (i as f64 + 1.0)).ln())
            .sum::<f64>()
    };
    rising(p.gamma + 1.0, n) + rising(p.delta + 1.0, p.n_max - n)
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Orthonormal dual Hahn function `R̃_n(λ(x); γ, δ, N)`, positive at `x = 0`.
pub fn orthonormal_r(n: usize, x: usize, p: DualHahnParams) -> Result<f64> {
    p.check_valid()?;
    let r = dual_hahn_r(n, x, p)?;
    let scale = (0.5 * (ln_weight(x, p) + ln_inverse_norm(n, p))).exp();
    Ok(scale * r)
}

/// `R̃_n` with the convention that an index outside the lattice contributes
/// nothing; only used where such a term carries a vanishing coefficient.
fn orthonormal_or_zero(n: isize, x: isize, p: DualHahnParams) -> Result<f64> {
    if n < 0 || x < 0 || n as usize > p.n_max || x as usize > p.n_max {
        Ok(0.0)
    } else {
        orthonormal_r(n as usize, x as usize, p)
    }
}

/// Residuals `|LHS - RHS|` of the contiguous relations that lower the
/// lattice (`(γ, δ, N) → (γ+1, δ+1, N-1)` at `x - 1`):
///
/// ```text
/// sqrt((n+1+γ)(N-n)) R̃_n - sqrt((n+1)(N-n+δ)) R̃_{n+1}
///     = sqrt(x(x+γ+δ+1)) R̃'_n(λ(x-1))
/// -sqrt((n+1)(N-n+δ)) R̃'_n(λ(x-1)) + sqrt((n+2+γ)(N-n-1)) R̃'_{n+1}(λ(x-1))
///     = sqrt(x(x+γ+δ+1)) R̃_{n+1}
/// ```
pub fn lowering_residuals(n: usize, x: usize, p: DualHahnParams) -> Result<[f64; 2]> {
    check_recurrence_range(n, x, p)?;
    let shifted = DualHahnParams::new(p.gamma + 1.0, p.delta + 1.0, p.n_max - 1);
    let (nf, big_n) = (n as f64, p.n_max as f64);
    let (ni, xi) = (n as isize, x as isize);
    let mu = p.lattice(x as f64).sqrt();

    let r_n = orthonormal_r(n, x, p)?;
    let r_n1 = orthonormal_r(n + 1, x, p)?;
    let s_n = orthonormal_or_zero(ni, xi - 1, shifted)?;
    let s_n1 = orthonormal_or_zero(ni + 1, xi - 1, shifted)?;

    let first = ((nf + 1.0 + p.gamma) * (big_n - nf)).sqrt() * r_n
        - ((nf + 1.0) * (big_n - nf + p.delta)).sqrt() * r_n1
        - mu * s_n;
    let second = -((nf + 1.0) * (big_n - nf + p.delta)).sqrt() * s_n
        + ((nf + 2.0 + p.gamma) * (big_n - nf - 1.0)).sqrt() * s_n1
        - mu * r_n1;
    Ok([first.abs(), second.abs()])
}

/// Residuals of the relations that keep `N` and move `(γ, δ) → (γ+1, δ-1)`:
///
/// ```text
/// sqrt((n+1+γ)(N-n+δ)) R̃_n - sqrt((n+1)(N-n)) R̃_{n+1}
///     = sqrt((x+γ+1)(x+δ)) R̃'_n
/// -sqrt((n+1)(N-n)) R̃'_n + sqrt((n+2+γ)(N-n+δ-1)) R̃'_{n+1}
///     = sqrt((x+γ+1)(x+δ)) R̃_{n+1}
/// ```
///
/// The shifted family needs `δ - 1 > -1`, i.e. `δ > 0`.
pub fn shifting_residuals(n: usize, x: usize, p: DualHahnParams) -> Result<[f64; 2]> {
    check_recurrence_range(n, x, p)?;
    let shifted = DualHahnParams::new(p.gamma + 1.0, p.delta - 1.0, p.n_max);
    if !shifted.is_valid() {
        return Err(Error::InvalidParameter(format!(
            "relations with (gamma+1, delta-1) need delta > 0 (got delta={})",
            p.delta
        )));
    }
    let (nf, xf, big_n) = (n as f64, x as f64, p.n_max as f64);
    let mu = ((xf + p.gamma + 1.0) * (xf + p.delta)).sqrt();

    let r_n = orthonormal_r(n, x, p)?;
    let r_n1 = orthonormal_r(n + 1, x, p)?;
    let s_n = orthonormal_r(n, x, shifted)?;
    let s_n1 = orthonormal_r(n + 1, x, shifted)?;

    let first = ((nf + 1.0 + p.gamma) * (big_n - nf + p.delta)).sqrt() * r_n
        - ((nf + 1.0) * (big_n - nf)).sqrt() * r_n1
        - mu * s_n;
    let second = -((nf + 1.0) * (big_n - nf)).sqrt() * s_n
        + ((nf + 2.0 + p.gamma) * (big_n - nf + p.delta - 1.0)).sqrt() * s_n1
        - mu * r_n1;
    Ok([first.abs(), second.abs()])
}

/// All four contiguous-relation residuals: the two lowering relations
/// followed by the two shifting relations.
pub fn recurrence_residuals(n: usize, x: usize, p: DualHahnParams) -> Result<[f64; 4]> {
    let [r1, r2] = lowering_residuals(n, x, p)?;
    let [r3, r4] = shifting_residuals(n, x, p)?;
    Ok([r1, r2, r3, r4])
}

fn check_recurrence_range(n: usize, x: usize, p: DualHahnParams) -> Result<()> {
    p.check_valid()?;
    if p.n_max == 0 || n + 1 > p.n_max {
        return Err(Error::OutOfRange(format!(
            "relations need 0 <= n <= N-1 (n={n}, N={})",
            p.n_max
        )));
    }
    p.check_index("x", x)
}

/// Which member of an eigenpair family to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
    /// The null vector `U_0` (even `n`, `k = 0` only).
    Zero,
}

impl Branch {
    fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
            Branch::Zero => 0.0,
        }
    }
}

fn alternating(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn check_eigenvector_params(a: f64, b: f64) -> Result<()> {
    if a > -1.0 && b > -1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "eigenvectors are only constructed for a > -1 and b > -1 (got a={a}, b={b})"
        )))
    }
}

/// Eigenvector of `H̃_n(a, b)`, `n = 2m`, for the eigenvalue
/// `±sqrt(2k (2k+a+b))` (or `0` for [`Branch::Zero`] with `k = 0`).
///
/// Entry `l` (1-based) is `(-1)^j R̃_j(λ(k); (a-1)/2, (b-1)/2, m)` for odd
/// `l = 2j+1`, and `±(-1)^j R̃_j(λ(k-1); (a+1)/2, (b+1)/2, m-1)` for even
/// `l = 2j+2`; the null vector has zero even entries.
pub fn eigenvector_even(n: usize, a: f64, b: f64, k: usize, branch: Branch) -> Result<Vec<f64>> {
    if n == 0 || !n.is_multiple_of(2) {
        return Err(Error::UnsupportedParity(
            "eigenvector_even needs n even and positive",
        ));
    }
    check_eigenvector_params(a, b)?;
    let m = n / 2;
    if k > m {
        return Err(Error::OutOfRange(format!("k={k} exceeds m={m}")));
    }
    if (branch == Branch::Zero) != (k == 0) {
        return Err(Error::InvalidParameter(
            "the zero branch is used exactly when k = 0".into(),
        ));
    }
    let outer = DualHahnParams::new((a - 1.0) / 2.0, (b - 1.0) / 2.0, m);
    let inner = DualHahnParams::new((a + 1.0) / 2.0, (b + 1.0) / 2.0, m - 1);
    let sign = branch.sign();
    let mut u = vec![0.0; n + 1];
    for j in 0..=m {
        u[2 * j] = alternating(j) * orthonormal_r(j, k, outer)?;
    }
    if k > 0 {
        for j in 0..m {
            u[2 * j + 1] = sign * alternating(j) * orthonormal_r(j, k - 1, inner)?;
        }
    }
    Ok(u)
}

/// Eigenvector of `H̃_n(a, b)`, `n = 2m + 1`, for the eigenvalue
/// `±sqrt((2k+1+a)(2k+1+b))`.
///
/// Odd entries `l = 2j+1` are `(-1)^j R̃_j(λ(k); (a-1)/2, (b+1)/2, m)`, even
/// entries `l = 2j+2` are `±(-1)^j R̃_j(λ(k); (a+1)/2, (b-1)/2, m)`.
pub fn eigenvector_odd(n: usize, a: f64, b: f64, k: usize, branch: Branch) -> Result<Vec<f64>> {
    if n % 2 != 1 {
        return Err(Error::UnsupportedParity("eigenvector_odd needs n odd"));
    }
    check_eigenvector_params(a, b)?;
    let m = n / 2;
    if k > m {
        return Err(Error::OutOfRange(format!("k={k} exceeds m={m}")));
    }
    if branch == Branch::Zero {
        return Err(Error::InvalidParameter(
            "odd n has no forced zero eigenvalue".into(),
        ));
    }
    let outer = DualHahnParams::new((a - 1.0) / 2.0, (b + 1.0) / 2.0, m);
    let inner = DualHahnParams::new((a + 1.0) / 2.0, (b - 1.0) / 2.0, m);
    let sign = branch.sign();
    let mut u = vec![0.0; n + 1];
    for j in 0..=m {
        u[2 * j] = alternating(j) * orthonormal_r(j, k, outer)?;
        u[2 * j + 1] = sign * alternating(j) * orthonormal_r(j, k, inner)?;
    }
    Ok(u)
}

/// The eigenvalue that [`eigenvector_even`] / [`eigenvector_odd`] pair with.
pub fn branch_eigenvalue(n: usize, a: f64, b: f64, k: usize, branch: Branch) -> f64 {
    let magnitude = if n.is_multiple_of(2) {
        let two_k = (2 * k) as f64;
        (two_k * (two_k + a + b)).sqrt()
    } else {
        let base = (2 * k + 1) as f64;
        ((base + a) * (base + b)).sqrt()
    };
    branch.sign() * magnitude
}

/// Complete set of eigenpairs of `H̃_n(a, b)`, sorted by eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvectorSet {
    pub order: usize,
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl EigenvectorSet {
    /// Columns scaled to unit Euclidean norm.
    pub fn normalized(&self) -> Vec<Vec<f64>> {
        self.vectors
            .iter()
            .map(|v| {
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter().map(|x| x / norm).collect()
            })
            .collect()
    }

    /// `max |UᵀU - I|` over the unit-normalized vectors.
    pub fn orthogonality_defect(&self) -> f64 {
        let units = self.normalized();
        let mut worst: f64 = 0.0;
        for (i, u) in units.iter().enumerate() {
            for (j, v) in units.iter().enumerate() {
                let dot: f64 = u.iter().zip(v).map(|(x, y)| x * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

pub fn eigenvector_set(n: usize, a: f64, b: f64) -> Result<EigenvectorSet> {
    let m = n / 2;
    let mut pairs = Vec::with_capacity(n + 1);
    if n.is_multiple_of(2) {
        pairs.push((0.0, eigenvector_even(n, a, b, 0, Branch::Zero)?));
        for k in 1..=m {
            for branch in [Branch::Plus, Branch::Minus] {
                pairs.push((
                    branch_eigenvalue(n, a, b, k, branch),
                    eigenvector_even(n, a, b, k, branch)?,
                ));
            }
        }
    } else {
        for k in 0..=m {
            for branch in [Branch::Plus, Branch::Minus] {
                pairs.push((
                    branch_eigenvalue(n, a, b, k, branch),
                    eigenvector_odd(n, a, b, k, branch)?,
                ));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (eigenvalues, vectors) = pairs.into_iter().unzip();
    Ok(EigenvectorSet {
        order: n + 1,
        eigenvalues,
        vectors,
    })
}

/// `‖H̃u - λu‖_∞ / (‖H̃‖_∞ ‖u‖_∞)` against `H̃_n(a, b)`.
pub fn relative_residual(n: usize, a: f64, b: f64, lambda: f64, u: &[f64]) -> Result<f64> {
    let h = symmetric_extended(MatrixParams::new(n, a, b)?)?;
    let hu = h.apply(u);
    let residual = hu
        .iter()
        .zip(u)
        .map(|(y, x)| (y - lambda * x).abs())
        .fold(0.0, f64::max);
    let u_norm = u.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    Ok(residual / (h.norm_inf() * u_norm))
}
