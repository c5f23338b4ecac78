//! Generators for the Clement matrix `C_n`, the extension `H_n(a, b)`, the
//! one-parameter special cases and their symmetrized forms.
//!
//! Every matrix here is tridiagonal with an identically zero diagonal. The
//! diagonal is never stored.

use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Zero-diagonal tridiagonal matrix of order `n + 1`.
///
/// `superdiag[k - 1]` is `h_{k,k+1}` and `subdiag[k - 1]` is `h_{k+1,k}` for
/// `k = 1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    superdiag: Vec<f64>,
    subdiag: Vec<f64>,
    label: String,
}

impl TridiagonalMatrix {
    pub fn new(superdiag: Vec<f64>, subdiag: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if superdiag.len() != subdiag.len() {
            return Err(Error::InvalidParameter(format!(
                "superdiag has {} entries but subdiag has {}",
                superdiag.len(),
                subdiag.len()
            )));
        }
        if let Some(k) = superdiag
            .iter()
            .zip(&subdiag)
            .position(|(u, l)| !u.is_finite() || !l.is_finite())
        {
            return Err(Error::NonFiniteEntry { k: k + 1 });
        }
        Ok(Self {
            superdiag,
            subdiag,
            label: label.into(),
        })
    }

    pub fn order(&self) -> usize {
        self.superdiag.len() + 1
    }

    pub fn superdiag(&self) -> &[f64] {
        &self.superdiag
    }

    pub fn subdiag(&self) -> &[f64] {
        &self.subdiag
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Products `b_k c_k`; the characteristic polynomial depends on nothing else.
    pub fn products(&self) -> Vec<f64> {
        self.superdiag
            .iter()
            .zip(&self.subdiag)
            .map(|(u, l)| u * l)
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.order();
        (0..n)
            .map(|i| {
                let left = if i > 0 {
                    self.subdiag[i - 1].abs()
                } else {
                    0.0
                };
                let right = if i + 1 < n {
                    self.superdiag[i].abs()
                } else {
                    0.0
                };
                left + right
            })
            .fold(0.0, f64::max)
    }

    /// Plain-text serialization: a `tridiag <order>` line followed by the
    /// superdiagonal and subdiagonal lines, 17 significant digits each.
    pub fn to_text(&self) -> String {
        format!(
            "tridiag {}\n{}\n{}\n",
            self.order(),
            join_full_precision(&self.superdiag),
            join_full_precision(&self.subdiag)
        )
    }
}

impl fmt::Display for TridiagonalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for TridiagonalMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?;
        let order: usize = header
            .strip_prefix("tridiag ")
            .and_then(|rest| rest.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad header line {header:?}")))?;
        if order == 0 {
            return Err(Error::Parse("order must be at least 1".into()));
        }
        let mut row = |name: &str| -> Result<Vec<f64>> {
            let line = lines.next().unwrap_or("");
            let values = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>()
                        .map_err(|e| Error::Parse(format!("{name} entry {tok:?}: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if values.len() != order - 1 {
                return Err(Error::Parse(format!(
                    "{name} has {} entries, expected {}",
                    values.len(),
                    order - 1
                )));
            }
            Ok(values)
        };
        let superdiag = row("superdiag")?;
        let subdiag = row("subdiag")?;
        TridiagonalMatrix::new(superdiag, subdiag, "parsed")
    }
}

fn join_full_precision(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:.16e}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Symmetric zero-diagonal tridiagonal matrix; `offdiag[k - 1]` is
/// `h_{k,k+1} = h_{k+1,k} >= 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricTridiagonalMatrix {
    offdiag: Vec<f64>,
    label: String,
}

impl SymmetricTridiagonalMatrix {
    pub fn new(offdiag: Vec<f64>, label: impl Into<String>) -> Result<Self> {
        if let Some(k) = offdiag.iter().position(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "symmetric off-diagonal entry {} at k={} must be finite and non-negative",
                offdiag[k],
                k + 1
            )));
        }
        Ok(Self {
            offdiag,
            label: label.into(),
        })
    }

    pub fn order(&self) -> usize {
        self.offdiag.len() + 1
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.order();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.offdiag[i - 1] } else { 0.0 };
                let right = if i + 1 < n { self.offdiag[i] } else { 0.0 };
                left + right
            })
            .fold(0.0, f64::max)
    }

    /// The same matrix viewed as a general tridiagonal.
    pub fn to_general(&self) -> TridiagonalMatrix {
        TridiagonalMatrix {
            superdiag: self.offdiag.clone(),
            subdiag: self.offdiag.clone(),
            label: self.label.clone(),
        }
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order();
        assert_eq!(x.len(), n, "vector length must equal the matrix order");
        (0..n)
            .map(|i| {
                let left = if i > 0 {
                    self.offdiag[i - 1] * x[i - 1]
                } else {
                    0.0
                };
                let right = if i + 1 < n {
                    self.offdiag[i] * x[i + 1]
                } else {
                    0.0
                };
                left + right
            })
            .collect()
    }
}

/// The parameter triple: `n` (matrix order is `n + 1`) and
/// the two shifts `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatrixParams {
    pub n: usize,
    pub a: f64,
    pub b: f64,
}

impl MatrixParams {
    pub fn new(n: usize, a: f64, b: f64) -> Result<Self> {
        check_dimension(n)?;
        Ok(Self { n, a, b })
    }

    /// `m` with `n = 2m` or `n = 2m + 1`.
    pub fn half(&self) -> usize {
        self.n / 2
    }

    pub fn is_even(&self) -> bool {
        self.n.is_multiple_of(2)
    }
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 1 {
        Err(Error::InvalidDimension(n as i64))
    } else {
        Ok(())
    }
}

/// `C_n`: `h_{k,k+1} = k` and `h_{n+2-k,n+1-k} = k`.
pub fn clement(n: usize) -> Result<TridiagonalMatrix> {
    check_dimension(n)?;
    let superdiag = (1..=n).map(|k| k as f64).collect();
    let subdiag = (1..=n).map(|k| (n + 1 - k) as f64).collect();
    TridiagonalMatrix::new(superdiag, subdiag, format!("clement n={n}"))
}

/// `H_n(a, b)`: odd-indexed superdiagonal entries gain `a`, and the
/// subdiagonal entry `h_{n+2-k,n+1-k}` gains `b` when `k` is odd.
pub fn extended(p: MatrixParams) -> Result<TridiagonalMatrix> {
    check_dimension(p.n)?;
    let n = p.n;
    let superdiag = (1..=n).map(|k| shifted(k, p.a)).collect();
    // subdiag[i - 1] = h_{i+1,i} = h_{n+2-k,n+1-k} with k = n + 1 - i
    let subdiag = (1..=n).map(|i| shifted(n + 1 - i, p.b)).collect();
    TridiagonalMatrix::new(
        superdiag,
        subdiag,
        format!("extended n={} a={} b={}", n, p.a, p.b),
    )
}

fn shifted(k: usize, shift: f64) -> f64 {
    if k.is_multiple_of(2) {
        k as f64
    } else {
        k as f64 + shift
    }
}

/// `H_n(a)`: `H_n(a, -a)` for even `n`, `H_n(a, a)` for odd `n`.
pub fn special(n: usize, a: f64) -> Result<TridiagonalMatrix> {
    let b = if n.is_multiple_of(2) { -a } else { a };
    let mut m = extended(MatrixParams::new(n, a, b)?)?;
    m.label = format!("special n={n} a={a}");
    Ok(m)
}

pub fn scale(m: &TridiagonalMatrix, s: f64) -> Result<TridiagonalMatrix> {
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "scale factor {s} is not finite"
        )));
    }
    TridiagonalMatrix::new(
        m.superdiag.iter().map(|v| v * s).collect(),
        m.subdiag.iter().map(|v| v * s).collect(),
        format!("{} scaled by {s}", m.label),
    )
}

/// Diagonal similarity to the symmetric form with off-diagonals `sqrt(b_k c_k)`.
///
/// Requires every product to be strictly positive; a zero product makes the
/// matrix reducible and is rejected as well.
pub fn symmetrize(m: &TridiagonalMatrix) -> Result<SymmetricTridiagonalMatrix> {
    let offdiag = m
        .products()
        .into_iter()
        .enumerate()
        .map(|(i, product)| positive_sqrt(i + 1, product))
        .collect::<Result<Vec<_>>>()?;
    SymmetricTridiagonalMatrix::new(offdiag, format!("{} symmetrized", m.label))
}

/// The symmetric form of `H_n(a, b)` built directly from its entry formulas:
///
/// * even `n`: `sqrt(k (n+1-k+b))` for even `k`, `sqrt((k+a)(n+1-k))` for odd `k`;
/// * odd `n`: `sqrt(k (n+1-k))` for even `k`, `sqrt((k+a)(n+1-k+b))` for odd `k`.
pub fn symmetric_extended(p: MatrixParams) -> Result<SymmetricTridiagonalMatrix> {
    check_dimension(p.n)?;
    let n = p.n;
    let offdiag = (1..=n)
        .map(|k| {
            let kf = k as f64;
            let rest = (n + 1 - k) as f64;
            let radicand = match (n.is_multiple_of(2), k % 2 == 0) {
                (true, true) => kf * (rest + p.b),
                (true, false) => (kf + p.a) * rest,
                (false, true) => kf * rest,
                (false, false) => (kf + p.a) * (rest + p.b),
            };
            positive_sqrt(k, radicand)
        })
        .collect::<Result<Vec<_>>>()?;
    SymmetricTridiagonalMatrix::new(
        offdiag,
        format!("symmetric extended n={} a={} b={}", n, p.a, p.b),
    )
}

fn positive_sqrt(k: usize, product: f64) -> Result<f64> {
    if product > 0.0 {
        Ok(product.sqrt())
    } else {
        Err(Error::NonPositiveProduct { k, product })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, a: f64, b: f64) -> MatrixParams {
        MatrixParams::new(n, a, b).unwrap()
    }

    #[test]
    fn clement_small_orders() {
        let c1 = clement(1).unwrap();
        assert_eq!(c1.superdiag(), &[1.0]);
        assert_eq!(c1.subdiag(), &[1.0]);
        let c2 = clement(2).unwrap();
        assert_eq!(c2.superdiag(), &[1.0, 2.0]);
        assert_eq!(c2.subdiag(), &[2.0, 1.0]);
        let c3 = clement(3).unwrap();
        assert_eq!(c3.superdiag(), &[1.0, 2.0, 3.0]);
        assert_eq!(c3.subdiag(), &[3.0, 2.0, 1.0]);
        assert_eq!(c3.order(), 4);
    }

    #[test]
    fn zero_dimension_is_rejected() {
        assert!(matches!(clement(0), Err(Error::InvalidDimension(0))));
        assert!(matches!(
            MatrixParams::new(0, 1.0, 1.0),
            Err(Error::InvalidDimension(0))
        ));
        assert!(matches!(special(0, 1.0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn extended_examples() {
        let h = extended(params(2, 1.0, 2.0)).unwrap();
        assert_eq!(h.superdiag(), &[2.0, 2.0]);
        assert_eq!(h.subdiag(), &[2.0, 3.0]);

        assert_eq!(
            extended(params(3, 0.0, 0.0)).unwrap().products(),
            clement(3).unwrap().products()
        );

        let h = extended(params(4, 0.5, -0.5)).unwrap();
        assert_eq!(h.superdiag(), &[1.5, 2.0, 3.5, 4.0]);
        assert_eq!(h.subdiag(), &[4.0, 2.5, 2.0, 0.5]);
    }

    #[test]
    fn corner_entries_follow_parity() {
        for n in 1..=50usize {
            let h = extended(params(n, 0.37, -2.25)).unwrap();
            let first_sub = h.subdiag()[0]; // h_{2,1}
            let last_super = h.superdiag()[n - 1]; // h_{n,n+1}
            if n % 2 == 0 {
                assert_eq!(first_sub, n as f64);
                assert_eq!(last_super, n as f64);
            } else {
                assert_eq!(first_sub, n as f64 - 2.25);
                assert_eq!(last_super, n as f64 + 0.37);
            }
        }
    }

    #[test]
    fn special_examples() {
        let s = special(2, 5.0).unwrap();
        assert_eq!(s.superdiag(), &[6.0, 2.0]);
        assert_eq!(s.subdiag(), &[2.0, -4.0]);
        let s = special(3, -2.0).unwrap();
        assert_eq!(s.superdiag(), &[-1.0, 2.0, 1.0]);
        assert_eq!(s.subdiag(), &[1.0, 2.0, -1.0]);
        for n in 1..=20 {
            let s = special(n, 0.0).unwrap();
            let c = clement(n).unwrap();
            assert_eq!(s.superdiag(), c.superdiag());
            assert_eq!(s.subdiag(), c.subdiag());
        }
    }

    #[test]
    fn scaling() {
        let half = scale(&extended(params(3, 1.0, 1.0)).unwrap(), 0.5).unwrap();
        assert_eq!(half.superdiag(), &[1.0, 1.0, 2.0]);
        // h_{4,3} = 1 + b, so the last subdiagonal entry halves to 1
        assert_eq!(half.subdiag(), &[2.0, 1.0, 1.0]);
        let c = clement(5).unwrap();
        let same = scale(&c, 1.0).unwrap();
        assert_eq!(same.superdiag(), c.superdiag());
        assert_eq!(same.subdiag(), c.subdiag());
        let doubled = scale(&clement(2).unwrap(), 2.0).unwrap();
        assert_eq!(doubled.superdiag(), &[2.0, 4.0]);
        assert_eq!(doubled.subdiag(), &[4.0, 2.0]);
        assert!(scale(&c, f64::NAN).is_err());
    }

    #[test]
    fn symmetrize_clement() {
        let s = symmetrize(&clement(2).unwrap()).unwrap();
        assert_eq!(s.offdiag(), &[2f64.sqrt(), 2f64.sqrt()]);
    }

    #[test]
    fn symmetrize_rejects_nonpositive_products() {
        let err = symmetrize(&extended(params(3, -5.0, 0.0)).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonPositiveProduct { k: 1, product } if product == -12.0));
        // zero product: a = -1 kills h_{1,2}
        let err = symmetrize(&extended(params(2, -1.0, 0.0)).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonPositiveProduct { k: 1, .. }));
    }

    #[test]
    fn symmetric_extended_examples() {
        let s = symmetric_extended(params(2, 0.0, 0.0)).unwrap();
        assert_eq!(s.offdiag(), &[2f64.sqrt(), 2f64.sqrt()]);
        let s = symmetric_extended(params(3, 1.0, 1.0)).unwrap();
        assert_eq!(s.offdiag(), &[8f64.sqrt(), 2.0, 8f64.sqrt()]);
        let err = symmetric_extended(params(2, -2.0, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NonPositiveProduct { k: 1, .. }));
    }

    #[test]
    fn text_format_round_trips() {
        let h = extended(params(5, 0.1, -1.0 / 3.0)).unwrap();
        let text = h.to_text();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("tridiag 6"));
        assert_eq!(lines.next().unwrap().split(' ').count(), 5);
        let back: TridiagonalMatrix = text.parse().unwrap();
        assert_eq!(back.superdiag(), h.superdiag());
        assert_eq!(back.subdiag(), h.subdiag());
        assert!("tridiag 3\n1 2\n1\n".parse::<TridiagonalMatrix>().is_err());
        assert!("matrix 3\n".parse::<TridiagonalMatrix>().is_err());
    }

    #[test]
    fn constructor_validates() {
        assert!(TridiagonalMatrix::new(vec![1.0], vec![], "x").is_err());
        assert!(matches!(
            TridiagonalMatrix::new(vec![1.0, f64::INFINITY], vec![1.0, 1.0], "x"),
            Err(Error::NonFiniteEntry { k: 2 })
        ));
        assert!(SymmetricTridiagonalMatrix::new(vec![-1.0], "x").is_err());
        let single = TridiagonalMatrix::new(vec![], vec![], "1x1").unwrap();
        assert_eq!(single.order(), 1);
        assert_eq!(single.norm_inf(), 0.0);
    }
}
