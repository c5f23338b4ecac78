use approx::assert_relative_eq;
use clement_lab::eigensolve::{solve_unsymmetric, sturm_count, SolverConfig};
use clement_lab::harness::{self, GridRange, SolverKind, SweepRecord};
use clement_lab::matgen::{self, MatrixParams, TridiagonalMatrix};
use clement_lab::spectra;
use clement_lab::verify::{Report, Verifier};
use clement_lab::Complex64;
use proptest::prelude::*;

fn ulps(x: f64, y: f64) -> u64 {
    (x.to_bits() as i64).abs_diff(y.to_bits() as i64)
}

proptest! {
    #[test]
    fn symmetrize_agrees_with_direct_formula(n in 1usize..80, a in -0.99f64..8.0, b in -0.99f64..8.0) {
        let p = MatrixParams::new(n, a, b).unwrap();
        let via = matgen::symmetrize(&matgen::extended(p).unwrap()).unwrap();
        let direct = matgen::symmetric_extended(p).unwrap();
        for (x, y) in via.offdiag().iter().zip(direct.offdiag()) {
            prop_assert!(ulps(*x, *y) <= 4, "{} vs {}", x, y);
        }
    }

    #[test]
    fn symmetrization_keeps_the_characteristic_polynomial(
        n in 1usize..20, a in -0.99f64..5.0, b in -0.99f64..5.0,
        re in -20.0f64..20.0, im in -5.0f64..5.0,
    ) {
        let p = MatrixParams::new(n, a, b).unwrap();
        let m = matgen::extended(p).unwrap();
        let s = matgen::symmetric_extended(p).unwrap().to_general();
        let lambda = Complex64::new(re, im);
        let (x, y) = (spectra::char_poly_eval(&m, lambda), spectra::char_poly_eval(&s, lambda));
        prop_assert!((x - y).norm() <= 1e-10 * x.norm().max(1.0));
    }

    #[test]
    fn scaling_scales_the_spectrum(n in 1usize..30, a in -3.0f64..5.0, s in 0.1f64..10.0) {
        let p = MatrixParams::new(n, a, a).unwrap();
        let m = matgen::scale(&matgen::extended(p).unwrap(), s).unwrap();
        for &lambda in spectra::exact_eigenvalues(p).values() {
            prop_assert!(spectra::normalized_char_poly(&m, lambda * s).norm() <= 1e-10);
        }
    }

    #[test]
    fn text_format_round_trips(n in 1usize..30, a in -10.0f64..10.0, b in -10.0f64..10.0) {
        let m = matgen::extended(MatrixParams::new(n, a, b).unwrap()).unwrap();
        let back: TridiagonalMatrix = m.to_text().parse().unwrap();
        prop_assert_eq!(back.superdiag(), m.superdiag());
        prop_assert_eq!(back.subdiag(), m.subdiag());
    }

    #[test]
    fn nonreal_output_comes_in_conjugate_pairs(n in 1usize..40, a in -8.0f64..8.0, b in -8.0f64..8.0) {
        let m = matgen::extended(MatrixParams::new(n, a, b).unwrap()).unwrap();
        let c = solve_unsymmetric(&m, &SolverConfig::default()).unwrap();
        let scale = c.values.iter().map(|v| v.norm()).fold(1.0, f64::max);
        for v in c.values.iter().filter(|v| v.im != 0.0) {
            let partner = c.values.iter().map(|w| (w - v.conj()).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(partner <= 1e-12 * scale);
        }
    }

    #[test]
    fn sturm_count_is_monotone(n in 1usize..50, a in -0.99f64..5.0, t1 in -60.0f64..60.0, dt in 0.0f64..30.0) {
        let s = matgen::symmetric_extended(MatrixParams::new(n, a, a).unwrap()).unwrap();
        prop_assert!(sturm_count(&s, t1) <= sturm_count(&s, t1 + dt));
        prop_assert_eq!(sturm_count(&s, s.norm_inf() + 1.0), s.order());
    }

    #[test]
    fn relative_error_of_a_list_with_itself_is_zero(values in prop::collection::vec((-1e6f64..1e6, -1e3f64..1e3), 1..50)) {
        let v: Vec<Complex64> = values.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        prop_assert_eq!(harness::relative_error_values(&v, &v).unwrap(), 0.0);
    }

    #[test]
    fn csv_floats_round_trip(x in any::<f64>().prop_filter("finite", |v| v.is_finite()), a in -100.0f64..100.0) {
        let r = SweepRecord {
            n: 7, a, b: -a, solver: SolverKind::Bisection, balance: true,
            rel_error: x.abs(), max_imag: 0.0, converged: true, runtime_ms: 1.5,
        };
        let back = harness::parse_csv(&harness::format_csv(std::slice::from_ref(&r), true)).unwrap();
        prop_assert_eq!(back, vec![r]);
    }

    #[test]
    fn grid_endpoints_are_inclusive(start in -50.0f64..50.0, k in 0usize..200, step in 0.01f64..2.0) {
        let stop = start + k as f64 * step;
        let g = GridRange::new(start, stop, step).unwrap();
        prop_assert_eq!(g.len(), k + 1);
        assert_relative_eq!(*g.points().last().unwrap(), stop, max_relative = 1e-12, epsilon = 1e-12);
    }
}

/// `extended` with the superdiagonal rule applied to even instead of odd k.
fn shifted_rule(p: MatrixParams) -> clement_lab::Result<TridiagonalMatrix> {
    let good = matgen::extended(p)?;
    let sup = (1..=p.n)
        .map(|k| k as f64 + if k % 2 == 0 { p.a } else { 0.0 })
        .collect();
    TridiagonalMatrix::new(sup, good.subdiag().to_vec(), "shifted")
}

#[test]
fn corrupted_builder_fails_the_suites() {
    let v = Verifier::new(42).with_builder(shifted_rule);
    let report = Report {
        checks: v.oracle().into_iter().chain(v.moments()).collect(),
    };
    assert!(!report.passed());
    let failing: Vec<_> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    assert!(failing.contains(&"oracle.closed-form"));
    assert!(failing.contains(&"moments.second"));
}
