//! Closed-form spectra of `C_n` and `H_n(a, b)`, multiplicity grouping, and a
//! determinant oracle that does not depend on any eigensolver.
//!
//! For `n = 2m` the spectrum of `H_n(a, b)` is `0, ±sqrt(2k (2k + a + b))`,
//! `k = 1..=m`. For `n = 2m + 1` it is `±sqrt((2k + 1 + a)(2k + 1 + b))`,
//! `k = 0..=m`. A negative radicand `r` contributes the conjugate pair
//! `±i sqrt(|r|)`.

use std::cmp::Ordering;

use num_complex::Complex64;

use crate::matgen::{MatrixParams, TridiagonalMatrix};
use crate::{Error, Result};

/// Which closed form produced a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumSource {
    /// `-n, -n + 2, ..., n`.
    Clement,
    /// `H_n(a, b)` with `n` even.
    EvenExtension,
    /// `H_n(a, b)` with `n` odd.
    OddExtension,
    /// `H_n(a, a)` with `n` odd: `±|2k + 1 + a|`.
    OddSpecial,
}

/// Identity of a value in formula space: the sign in front of the square root
/// and the radicand (or absolute value) it was taken from. Two values with the
/// same key are equal by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
struct FormulaKey {
    sign: i8,
    magnitude: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSpectrum {
    values: Vec<Complex64>,
    keys: Vec<FormulaKey>,
    source: SpectrumSource,
}

impl ExactSpectrum {
    fn from_terms(mut terms: Vec<(Complex64, FormulaKey)>, source: SpectrumSource) -> Self {
        terms.sort_by(|x, y| cmp_complex(&x.0, &y.0));
        let (values, keys): (Vec<_>, Vec<_>) = terms.into_iter().unzip();
        Self {
            values,
            keys,
            source,
        }
    }

    /// Eigenvalues sorted by real part, ties by imaginary part.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn source(&self) -> SpectrumSource {
        self.source
    }

    /// Distinct values with the multiplicity the closed form assigns them.
    pub fn multiplicities(&self) -> Vec<(Complex64, usize)> {
        classify(self, 0.0).distinct
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }
}

/// Ascending real part, ties broken by ascending imaginary part.
pub fn cmp_complex(x: &Complex64, y: &Complex64) -> Ordering {
    x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
}

pub fn sort_complex(values: &mut [Complex64]) {
    values.sort_by(cmp_complex);
}

/// The pair `±sqrt(r)`, imaginary when `r < 0`.
fn plus_minus_sqrt(radicand: f64) -> [(Complex64, FormulaKey); 2] {
    let root = radicand.abs().sqrt();
    // `0.0 - root` rather than `-root` keeps a zero root from turning into -0
    let (plus, minus) = if radicand < 0.0 {
        (Complex64::new(0.0, root), Complex64::new(0.0, 0.0 - root))
    } else {
        (Complex64::new(root, 0.0), Complex64::new(0.0 - root, 0.0))
    };
    [
        (
            plus,
            FormulaKey {
                sign: 1,
                magnitude: radicand,
            },
        ),
        (
            minus,
            FormulaKey {
                sign: -1,
                magnitude: radicand,
            },
        ),
    ]
}

fn zero_term() -> (Complex64, FormulaKey) {
    (
        Complex64::new(0.0, 0.0),
        FormulaKey {
            sign: 0,
            magnitude: 0.0,
        },
    )
}

/// Closed-form spectrum of `H_n(a, b)`.
pub fn exact_eigenvalues(p: MatrixParams) -> ExactSpectrum {
    let m = p.half();
    if p.is_even() {
        let mut terms = vec![zero_term()];
        for k in 1..=m {
            let two_k = (2 * k) as f64;
            terms.extend(plus_minus_sqrt(two_k * (two_k + p.a + p.b)));
        }
        ExactSpectrum::from_terms(terms, SpectrumSource::EvenExtension)
    } else {
        let terms = (0..=m)
            .flat_map(|k| {
                let base = (2 * k + 1) as f64;
                plus_minus_sqrt((base + p.a) * (base + p.b))
            })
            .collect();
        ExactSpectrum::from_terms(terms, SpectrumSource::OddExtension)
    }
}

/// `-n, -n + 2, ..., n - 2, n`.
pub fn clement_eigenvalues(n: usize) -> Result<ExactSpectrum> {
    if n < 1 {
        return Err(Error::InvalidDimension(0));
    }
    let terms = (0..=n)
        .map(|j| {
            let v = 2.0 * j as f64 - n as f64;
            let key = FormulaKey {
                sign: v.signum() as i8 * i8::from(v != 0.0),
                magnitude: v.abs(),
            };
            (Complex64::new(v, 0.0), key)
        })
        .collect();
    Ok(ExactSpectrum::from_terms(terms, SpectrumSource::Clement))
}

/// Spectrum of `H_n(a)`: the Clement spectrum for even `n` whatever `a` is,
/// `±|2k + 1 + a|` for odd `n`.
pub fn special_eigenvalues(n: usize, a: f64) -> Result<ExactSpectrum> {
    if n.is_multiple_of(2) {
        return clement_eigenvalues(n);
    }
    let terms = (0..=n / 2)
        .flat_map(|k| {
            let magnitude = ((2 * k + 1) as f64 + a).abs();
            [
                (
                    Complex64::new(magnitude, 0.0),
                    FormulaKey { sign: 1, magnitude },
                ),
                (
                    Complex64::new(0.0 - magnitude, 0.0),
                    FormulaKey {
                        sign: -1,
                        magnitude,
                    },
                ),
            ]
        })
        .collect();
    Ok(ExactSpectrum::from_terms(terms, SpectrumSource::OddSpecial))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityReport {
    pub distinct: Vec<(Complex64, usize)>,
    pub max_multiplicity: usize,
    pub is_simple: bool,
}

/// Groups eigenvalues that coincide in formula space, or lie within `tol` of
/// each other (transitively).
pub fn classify(s: &ExactSpectrum, tol: f64) -> MultiplicityReport {
    let n = s.values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let same = same_key(&s.keys[i], &s.keys[j])
                || (tol > 0.0 && (s.values[i] - s.values[j]).norm() <= tol);
            if same {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj.max(ri)] = rj.min(ri);
                }
            }
        }
    }
    let mut distinct: Vec<(Complex64, usize)> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = distinct.len();
            distinct.push((s.values[root], 0));
        }
        distinct[slot[root]].1 += 1;
    }
    let max_multiplicity = distinct.iter().map(|d| d.1).max().unwrap_or(0);
    MultiplicityReport {
        is_simple: max_multiplicity <= 1,
        max_multiplicity,
        distinct,
    }
}

fn same_key(x: &FormulaKey, y: &FormulaKey) -> bool {
    // a zero radicand collapses both signs onto the same value
    (x.sign == y.sign || (x.magnitude == 0.0 && y.magnitude == 0.0)) && x.magnitude == y.magnitude
}

/// `det(M - λI)` by the three-term recurrence
/// `p_j = -λ p_{j-1} - b_{j-1} c_{j-1} p_{j-2}`.
///
/// Becomes non-finite for large orders; see [`normalized_char_poly`].
pub fn char_poly_eval(m: &TridiagonalMatrix, lambda: Complex64) -> Complex64 {
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = -lambda;
    for product in m.products() {
        let next = -lambda * cur - prev * product;
        prev = cur;
        cur = next;
    }
    cur
}

/// `det(M - λI) / ∏_j s_j` where `s_j` is the absolute row sum of row `j` of
/// `M - λI`. The ratio is bounded by one in magnitude, so it never
/// overflows, and a value near zero certifies `λ` as an eigenvalue.
pub fn normalized_char_poly(m: &TridiagonalMatrix, lambda: Complex64) -> Complex64 {
    let order = m.order();
    let (sup, sub) = (m.superdiag(), m.subdiag());
    let abs_lambda = lambda.norm();
    let row_sum = |j: usize| {
        let left = if j > 0 { sub[j - 1].abs() } else { 0.0 };
        let right = if j + 1 < order { sup[j].abs() } else { 0.0 };
        let s = abs_lambda + left + right;
        if s > 0.0 {
            s
        } else {
            1.0
        }
    };
    let mut prev_scale = row_sum(0);
    let mut prev = Complex64::new(1.0, 0.0);
    let mut cur = -lambda / prev_scale;
    for j in 1..order {
        let scale = row_sum(j);
        let product = sup[j - 1] * sub[j - 1];
        let next = (-lambda * cur - prev * (product / prev_scale)) / scale;
        prev = cur;
        cur = next;
        prev_scale = scale;
    }
    cur
}

/// Roots of `λ ∏_{k=1}^{m} (λ² - 2k (2k + a + b))`, the factored
/// characteristic polynomial for even `n`.
pub fn product_form_coeffs(p: MatrixParams) -> Result<Vec<Complex64>> {
    if !p.is_even() {
        return Err(Error::UnsupportedParity(
            "the product form is only available for even n",
        ));
    }
    let mut roots = vec![Complex64::new(0.0, 0.0)];
    for k in 1..=p.half() {
        let two_k = (2 * k) as f64;
        roots.extend(plus_minus_sqrt(two_k * (two_k + p.a + p.b)).map(|t| t.0));
    }
    sort_complex(&mut roots);
    Ok(roots)
}

/// `det(λI - H)` evaluated from the product form (even `n` only).
pub fn product_form_eval(p: MatrixParams, lambda: Complex64) -> Result<Complex64> {
    if !p.is_even() {
        return Err(Error::UnsupportedParity(
            "the product form is only available for even n",
        ));
    }
    Ok((1..=p.half()).fold(lambda, |acc, k| {
        let two_k = (2 * k) as f64;
        acc * (lambda * lambda - two_k * (two_k + p.a + p.b))
    }))
}
