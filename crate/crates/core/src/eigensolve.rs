//! Eigensolvers used as the machine under test:
//!
//! * [`solve_unsymmetric`]: Francis implicit double-shift QR on the
//!   tridiagonal matrix treated as upper Hessenberg (the iterate fills in
//!   above the superdiagonal), with optional diagonal balancing;
//! * [`solve_symmetric`]: implicit QL with Wilkinson shifts;
//! * [`sturm_count`] / [`bisection_eigenvalues`]: Sturm-sequence bisection,
//!   the independent oracle for the symmetric solver.

use num_complex::Complex64;

use crate::matgen::{SymmetricTridiagonalMatrix, TridiagonalMatrix};
use crate::spectra::sort_complex;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct ComputedSpectrum {
    /// Sorted by real part, then imaginary part.
    pub values: Vec<Complex64>,
    /// Total QR/QL sweeps.
    pub iterations: usize,
    /// Subdiagonal entries declared negligible.
    pub deflations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_sweeps_per_eigenvalue: usize,
    pub deflation_tol_factor: f64,
    pub balance: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_sweeps_per_eigenvalue: 30,
            deflation_tol_factor: f64::EPSILON,
            balance: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_sweeps_per_eigenvalue == 0 {
            return Err(Error::InvalidParameter(
                "max_sweeps_per_eigenvalue must be positive".into(),
            ));
        }
        if !(self.deflation_tol_factor > 0.0 && self.deflation_tol_factor.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "deflation_tol_factor must be positive and finite (got {})",
                self.deflation_tol_factor
            )));
        }
        Ok(())
    }
}

/// Row-major dense square matrix, the private working copy of the QR solver.
struct Dense {
    n: usize,
    data: Vec<f64>,
}

impl Dense {
    fn from_tridiagonal(m: &TridiagonalMatrix) -> Self {
        let n = m.order();
        let mut data = vec![0.0; n * n];
        for (k, (&up, &down)) in m.superdiag().iter().zip(m.subdiag()).enumerate() {
            data[k * n + k + 1] = up;
            data[(k + 1) * n + k] = down;
        }
        Self { n, data }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    fn at(&mut self, i: usize, j: usize) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }

    /// Diagonal similarity `D⁻¹ A D` with powers of two, equalizing row and
    /// column norms. Keeps the tridiagonal pattern and is exact in binary.
    fn balance(&mut self) {
        const RADIX: f64 = 2.0;
        let sqrdx = RADIX * RADIX;
        let n = self.n;
        let mut done = false;
        while !done {
            done = true;
            for i in 0..n {
                let (mut c, mut r) = (0.0, 0.0);
                for j in (0..n).filter(|&j| j != i) {
                    c += self.get(j, i).abs();
                    r += self.get(i, j).abs();
                }
                if c == 0.0 || r == 0.0 {
                    continue;
                }
                let s = c + r;
                let mut f = 1.0;
                let mut g = r / RADIX;
                while c < g {
                    f *= RADIX;
                    c *= sqrdx;
                }
                g = r * RADIX;
                while c > g {
                    f /= RADIX;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 0..n {
                        *self.at(i, j) *= g;
                    }
                    for j in 0..n {
                        *self.at(j, i) *= f;
                    }
                }
            }
        }
    }
}

/// Eigenvalues of the 2×2 block `[[a, b], [c, d]]`.
fn block_eigenvalues(a: f64, b: f64, c: f64, d: f64) -> (Complex64, Complex64) {
    let p = 0.5 * (a - d);
    let bc = b * c;
    // p² + bc with a single rounding so near-double roots classify reliably
    let disc = p.mul_add(p, bc);
    let mid = d + p;
    if disc >= 0.0 {
        let root = disc.sqrt();
        // z has the sign of p so the larger root involves no cancellation
        let z = p + root.copysign(p);
        let first = d + z;
        let second = if z != 0.0 { d - bc / z } else { d + z };
        (Complex64::new(first, 0.0), Complex64::new(second, 0.0))
    } else {
        let im = (-disc).sqrt();
        (Complex64::new(mid, im), Complex64::new(mid, -im))
    }
}

/// Francis implicit double-shift QR on the tridiagonal as an upper Hessenberg
/// matrix. A subdiagonal entry is negligible when
/// `|h_{i+1,i}| <= tol * (|h_{i,i}| + |h_{i+1,i+1}|)`, falling back to the
/// matrix norm while the running diagonal is still zero.
///
/// The sweep budget is `max_sweeps_per_eigenvalue * order`, shared by all
/// eigenvalues; exceptional shifts are applied after every 10 sweeps spent
/// on the same trailing eigenvalue.
pub fn solve_unsymmetric(m: &TridiagonalMatrix, cfg: &SolverConfig) -> Result<ComputedSpectrum> {
    cfg.validate()?;
    let n = m.order();
    let mut a = Dense::from_tridiagonal(m);
    if cfg.balance {
        a.balance();
    }
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    let anorm = a.data.iter().map(|v| v.abs()).sum::<f64>();
    let tol = cfg.deflation_tol_factor;

    let mut iterations = 0usize;
    let mut deflations = 0usize;
    let mut converged = true;
    let mut shift_total = 0.0;
    let mut nn = n as isize - 1;
    let budget = cfg.max_sweeps_per_eigenvalue * n;

    'outer: while nn >= 0 {
        let hi = nn as usize;
        let mut its = 0usize;
        loop {
            // locate the start of the active unreduced block
            let mut l = hi;
            while l >= 1 {
                let mut s = a.get(l - 1, l - 1).abs() + a.get(l, l).abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a.get(l, l - 1).abs() <= tol * s {
                    *a.at(l, l - 1) = 0.0;
                    deflations += 1;
                    break;
                }
                l -= 1;
            }
            let mut x = a.get(hi, hi);
            if l == hi {
                values[hi] = Complex64::new(x + shift_total, 0.0);
                nn -= 1;
                continue 'outer;
            }
            let mut y = a.get(hi - 1, hi - 1);
            let mut w = a.get(hi, hi - 1) * a.get(hi - 1, hi);
            if l == hi - 1 {
                let (e1, e2) = block_eigenvalues(
                    a.get(hi - 1, hi - 1) + shift_total,
                    a.get(hi - 1, hi),
                    a.get(hi, hi - 1),
                    a.get(hi, hi) + shift_total,
                );
                values[hi - 1] = e1;
                values[hi] = e2;
                nn -= 2;
                continue 'outer;
            }
            if iterations >= budget {
                // report the unreduced block's diagonal as-is
                for (i, v) in values.iter_mut().enumerate().take(hi + 1) {
                    *v = Complex64::new(a.get(i, i) + shift_total, 0.0);
                }
                converged = false;
                break 'outer;
            }
            if its > 0 && its.is_multiple_of(10) {
                // exceptional shift
                shift_total += x;
                for i in 0..=hi {
                    *a.at(i, i) -= x;
                }
                let s = a.get(hi, hi - 1).abs() + a.get(hi - 1, hi - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            iterations += 1;

            // look for two consecutive small subdiagonal entries
            let mut mrow = hi - 2;
            let (mut p, mut q, mut r);
            loop {
                let z = a.get(mrow, mrow);
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a.get(mrow + 1, mrow) + a.get(mrow, mrow + 1);
                q = a.get(mrow + 1, mrow + 1) - z - rr - ss;
                r = a.get(mrow + 2, mrow + 1);
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if mrow == l {
                    break;
                }
                let u = a.get(mrow, mrow - 1).abs() * (q.abs() + r.abs());
                let v = p.abs()
                    * (a.get(mrow - 1, mrow - 1).abs() + z.abs() + a.get(mrow + 1, mrow + 1).abs());
                if u <= tol * v {
                    break;
                }
                mrow -= 1;
            }
            for i in (mrow + 2)..=hi {
                *a.at(i, i - 2) = 0.0;
                if i != mrow + 2 {
                    *a.at(i, i - 3) = 0.0;
                }
            }

            // double-shift QR sweep on rows l..=hi, columns mrow..=hi
            let mut scale = 0.0;
            for k in mrow..hi {
                if k != mrow {
                    p = a.get(k, k - 1);
                    q = a.get(k + 1, k - 1);
                    r = if k != hi - 1 {
                        a.get(k + 2, k - 1)
                    } else {
                        0.0
                    };
                    scale = p.abs() + q.abs() + r.abs();
                    if scale != 0.0 {
                        p /= scale;
                        q /= scale;
                        r /= scale;
                    }
                }
                let s = (p * p + q * q + r * r).sqrt().copysign(p);
                if s == 0.0 {
                    continue;
                }
                if k == mrow {
                    if l != mrow {
                        *a.at(k, k - 1) = -a.get(k, k - 1);
                    }
                } else {
                    *a.at(k, k - 1) = -s * scale;
                }
                p += s;
                let xr = p / s;
                let yr = q / s;
                let zr = r / s;
                q /= p;
                r /= p;
                for j in k..=hi {
                    let mut t = a.get(k, j) + q * a.get(k + 1, j);
                    if k != hi - 1 {
                        t += r * a.get(k + 2, j);
                        *a.at(k + 2, j) -= t * zr;
                    }
                    *a.at(k + 1, j) -= t * yr;
                    *a.at(k, j) -= t * xr;
                }
                let last = hi.min(k + 3);
                for i in l..=last {
                    let mut t = xr * a.get(i, k) + yr * a.get(i, k + 1);
                    if k != hi - 1 {
                        t += zr * a.get(i, k + 2);
                        *a.at(i, k + 2) -= t * r;
                    }
                    *a.at(i, k + 1) -= t * q;
                    *a.at(i, k) -= t;
                }
            }
        }
    }

    sort_complex(&mut values);
    Ok(ComputedSpectrum {
        values,
        iterations,
        deflations,
        converged,
    })
}

/// Implicit QL with Wilkinson shifts on the symmetric zero-diagonal input.
pub fn solve_symmetric(
    m: &SymmetricTridiagonalMatrix,
    cfg: &SolverConfig,
) -> Result<ComputedSpectrum> {
    cfg.validate()?;
    let n = m.order();
    let mut d = vec![0.0f64; n];
    let mut e = m.offdiag().to_vec();
    e.push(0.0);
    let tol = cfg.deflation_tol_factor;
    let (mut iterations, mut deflations) = (0usize, 0usize);
    let mut converged = true;
    let budget = cfg.max_sweeps_per_eigenvalue * n;

    'columns: for l in 0..n {
        loop {
            let mut split = l;
            while split + 1 < n {
                let dd = d[split].abs() + d[split + 1].abs();
                if e[split].abs() <= tol * dd || e[split] == 0.0 {
                    break;
                }
                split += 1;
            }
            if split == l {
                break;
            }
            deflations += usize::from(split + 1 < n);
            if iterations >= budget {
                converged = false;
                break 'columns;
            }
            iterations += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[split] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            for i in (l..split).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[split] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[split] = 0.0;
        }
    }

    d.sort_by(f64::total_cmp);
    Ok(ComputedSpectrum {
        values: d.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        iterations,
        deflations,
        converged,
    })
}

/// Number of eigenvalues strictly below `t`, from the signs of the pivots of
/// `T - tI`. A zero pivot is replaced by a tiny positive one, which counts
/// the eigenvalues below `t - ε`.
pub fn sturm_count(m: &SymmetricTridiagonalMatrix, t: f64) -> usize {
    let e = m.offdiag();
    let pivmin = f64::MIN_POSITIVE * e.iter().map(|v| v * v).fold(1.0, f64::max);
    let mut count = 0;
    let mut q = -t;
    if q.abs() < pivmin {
        q = pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for off in e {
        q = -t - off * off / q;
        if q.abs() < pivmin {
            q = pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// All eigenvalues to within `±tol`, ascending.
pub fn bisection_eigenvalues(m: &SymmetricTridiagonalMatrix, tol: f64) -> Result<Vec<f64>> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be positive (got {tol})"
        )));
    }
    let n = m.order();
    let bound = m.norm_inf() + 1.0;
    let mut out = Vec::with_capacity(n);
    for index in 0..n {
        // invariant: count(lo) <= index < count(hi)
        let (mut lo, mut hi) = (-bound, bound);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sturm_count(m, mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matgen::{clement, extended, special, symmetric_extended, symmetrize, MatrixParams};
    use crate::spectra::special_eigenvalues;

    fn params(n: usize, a: f64, b: f64) -> MatrixParams {
        MatrixParams::new(n, a, b).unwrap()
    }

    fn assert_close(values: &[Complex64], expected: &[f64], tol: f64) {
        assert_eq!(values.len(), expected.len());
        for (v, e) in values.iter().zip(expected) {
            assert!((v - Complex64::new(*e, 0.0)).norm() <= tol, "{v} vs {e}");
        }
    }

    fn clement_values(n: usize) -> Vec<f64> {
        (0..=n).map(|j| (2 * j) as f64 - n as f64).collect()
    }

    #[test]
    fn unsymmetric_small_examples() {
        let cfg = SolverConfig::default();
        let out = solve_unsymmetric(&clement(2).unwrap(), &cfg).unwrap();
        assert!(out.converged);
        assert_close(&out.values, &[-2.0, 0.0, 2.0], 1e-13);
        let out = solve_unsymmetric(&extended(params(1, 3.0, 0.0)).unwrap(), &cfg).unwrap();
        assert_close(&out.values, &[-2.0, 2.0], 1e-14);
    }

    #[test]
    fn unsymmetric_complex_pair() {
        let out = solve_unsymmetric(
            &extended(params(1, -3.0, 0.0)).unwrap(),
            &SolverConfig::default(),
        )
        .unwrap();
        let r = 2f64.sqrt();
        assert!((out.values[0] - Complex64::new(0.0, -r)).norm() < 1e-14);
        assert!((out.values[1] - Complex64::new(0.0, r)).norm() < 1e-14);
    }

    #[test]
    fn unsymmetric_clement_moderate_order() {
        for balance in [false, true] {
            let cfg = SolverConfig {
                balance,
                ..SolverConfig::default()
            };
            let out = solve_unsymmetric(&clement(20).unwrap(), &cfg).unwrap();
            assert!(out.converged);
            assert_close(&out.values, &clement_values(20), 1e-9);
        }
    }

    #[test]
    fn unsymmetric_tiny_budget_fails_soft() {
        let cfg = SolverConfig {
            max_sweeps_per_eigenvalue: 1,
            ..SolverConfig::default()
        };
        let out = solve_unsymmetric(&special(31, 2.5).unwrap(), &cfg).unwrap();
        assert!(!out.converged);
        assert_eq!(out.values.len(), 32);
    }

    #[test]
    fn double_eigenvalues_recovered_loosely() {
        let out = solve_unsymmetric(&special(11, -6.0).unwrap(), &SolverConfig::default()).unwrap();
        let exact = special_eigenvalues(11, -6.0).unwrap();
        for (v, e) in out.values.iter().zip(exact.values()) {
            assert!((v - e).norm() < 1e-4, "{v} vs {e}");
        }
    }

    #[test]
    fn symmetric_examples() {
        let cfg = SolverConfig::default();
        let out = solve_symmetric(&symmetrize(&clement(10).unwrap()).unwrap(), &cfg).unwrap();
        assert!(out.converged);
        assert_close(&out.values, &clement_values(10), 1e-13);
        let out = solve_symmetric(&symmetric_extended(params(3, 1.0, 1.0)).unwrap(), &cfg).unwrap();
        assert_close(&out.values, &[-4.0, -2.0, 2.0, 4.0], 1e-13);
        let single = SymmetricTridiagonalMatrix::new(vec![], "1x1").unwrap();
        assert_close(&solve_symmetric(&single, &cfg).unwrap().values, &[0.0], 0.0);
    }

    #[test]
    fn sturm_examples() {
        let c10 = symmetrize(&clement(10).unwrap()).unwrap();
        assert_eq!(sturm_count(&c10, 0.0), 5);
        assert_eq!(sturm_count(&c10, 11.0), 11);
        assert_eq!(sturm_count(&c10, -11.0), 0);
        let h = symmetric_extended(params(3, 1.0, 1.0)).unwrap();
        assert_eq!(sturm_count(&h, 3.0), 3);
        let mut last = 0;
        for step in 0..=400 {
            let t = -12.0 + 0.06 * step as f64;
            let count = sturm_count(&c10, t);
            assert!(count >= last);
            last = count;
        }
    }

    #[test]
    fn bisection_examples() {
        let c4 = symmetrize(&clement(4).unwrap()).unwrap();
        let values = bisection_eigenvalues(&c4, 1e-12).unwrap();
        for (v, e) in values.iter().zip(clement_values(4)) {
            assert!((v - e).abs() <= 1e-12);
        }
        let c2 = symmetrize(&clement(2).unwrap()).unwrap();
        let values = bisection_eigenvalues(&c2, 1.0).unwrap();
        for (v, e) in values.iter().zip(clement_values(2)) {
            assert!((v - e).abs() <= 1.0);
        }
        assert!(bisection_eigenvalues(&c2, 0.0).is_err());
    }

    #[test]
    fn config_validation() {
        let bad = SolverConfig {
            max_sweeps_per_eigenvalue: 0,
            ..SolverConfig::default()
        };
        assert!(solve_unsymmetric(&clement(2).unwrap(), &bad).is_err());
        let bad = SolverConfig {
            deflation_tol_factor: -1.0,
            ..SolverConfig::default()
        };
        assert!(solve_symmetric(&symmetrize(&clement(2).unwrap()).unwrap(), &bad).is_err());
    }

    #[test]
    fn block_formula_handles_both_signs() {
        let (x, y) = block_eigenvalues(0.0, 1.0, 4.0, 0.0);
        assert_eq!((x.re.max(y.re), x.re.min(y.re)), (2.0, -2.0));
        let (x, y) = block_eigenvalues(1.0, -2.0, 1.0, 1.0);
        assert_eq!(x, Complex64::new(1.0, 2f64.sqrt()));
        assert_eq!(y, x.conj());
    }
}
