//! Fast-path statistics against naive term-by-term references.

mod common;

use common::{bw, naive_m_stat, naive_n_stat, naive_residuals, naive_sigma_hat_sq, rel_err};
use rwkernel::{l_stat_design, m_stat, n_stat, sigma_hat_sq, Dgp, Kernel, RngStream};

/// Random instance sizes and bandwidths spanning sparse to dense windows.
fn instance(seed: u64) -> (usize, f64, Kernel) {
    let mut rng = RngStream::new(900 + seed).standard_normals(3);
    let t = 3 + ((rng[0].abs() * 1000.0) as usize) % 198; // 3..=200
    let h = 0.02 * (1.0 + rng[1].abs() * 40.0); // ~0.02..0.8+
    let kernel = if rng.pop().unwrap() > 0.0 {
        Kernel::Uniform
    } else {
        Kernel::Epanechnikov
    };
    (t, h, kernel)
}

#[test]
fn fast_paths_match_naive_references_on_random_instances() {
    let mut checked = 0;
    for seed in 0..100u64 {
        let (t, h, kernel) = instance(seed);
        let series = common::random_walk(t, 1.0, &RngStream::new(seed).child(1));
        let fit = rwkernel::nw_fit(&series, kernel, bw(h));

        let m_fast = m_stat(fit.residuals(), series.lags(), kernel, bw(h));
        let m_naive = naive_m_stat(fit.residuals(), series.lags(), kernel, h);
        assert!(
            rel_err(m_fast, m_naive, 1e-12) <= 1e-10,
            "m_stat mismatch at seed {seed} (T={t}, h={h}, {kernel}): {m_fast} vs {m_naive}"
        );

        let v_fast = sigma_hat_sq(fit.residuals(), series.lags(), kernel, bw(h));
        let v_naive = naive_sigma_hat_sq(fit.residuals(), series.lags(), kernel, h);
        assert!(
            rel_err(v_fast, v_naive, 1e-12) <= 1e-10,
            "sigma_hat_sq mismatch at seed {seed}: {v_fast} vs {v_naive}"
        );

        let n_fast = n_stat(&series, kernel, bw(h));
        let n_naive = naive_n_stat(&series, kernel, h);
        assert!(
            rel_err(n_fast, n_naive, 1e-12) <= 1e-10,
            "n_stat mismatch at seed {seed}: {n_fast} vs {n_naive}"
        );
        checked += 1;
    }
    assert_eq!(checked, 100);
}

#[test]
fn residuals_match_naive_regression() {
    for seed in 0..20u64 {
        let series = common::random_walk(120, 1.0, &RngStream::new(seed).child(2));
        for h in [0.1, 0.6, 3.0] {
            let fit = rwkernel::nw_fit(&series, Kernel::Epanechnikov, bw(h));
            let naive = naive_residuals(series.lags(), series.responses(), Kernel::Epanechnikov, h);
            for (a, b) in fit.residuals().iter().zip(&naive) {
                assert!(rel_err(*a, *b, 1.0) <= 1e-12);
            }
        }
    }
}

#[test]
fn design_statistic_agrees_with_series_statistic_on_own_lags() {
    let series = common::random_walk(200, 0.3, &RngStream::new(5).child(3));
    let h = bw(0.2);
    let from_series = rwkernel::l_stat(&series, Kernel::Uniform, h).unwrap();
    let from_design =
        l_stat_design(series.lags(), series.responses(), Kernel::Uniform, h).unwrap();
    assert_eq!(from_series.l_value.to_bits(), from_design.l_value.to_bits());
    assert_eq!(from_series.pair_count, from_design.pair_count);
}

#[test]
fn n_stat_is_nonnegative_and_shrinks_for_constant_drift() {
    // For a deterministic ramp (constant increments) the smoothed gap equals
    // the increment everywhere, so N equals its square.
    let series = rwkernel::Series::new((0..50).map(|i| 0.5 * i as f64).collect()).unwrap();
    let n = n_stat(&series, Kernel::Uniform, bw(2.0));
    assert!((n - 0.25).abs() < 1e-12);

    for seed in 0..5u64 {
        let series = common::random_walk(80, 1.0, &RngStream::new(seed).child(4));
        assert!(n_stat(&series, Kernel::Uniform, bw(0.4)) >= 0.0);
    }
}

#[test]
fn explosive_linear_shift_reports_explosion() {
    // beta far outside (-2, 0) oscillates with growing amplitude and must
    // overflow to an explosion error, naming a concrete step.
    let dgp = Dgp::LinearShift {
        beta: 9.0,
        sigma_u: 1.0,
    };
    let err = rwkernel::simulate(&dgp, 2000, &RngStream::new(1)).unwrap_err();
    match err {
        rwkernel::Error::Explosion { index } => assert!(index > 0 && index <= 2000),
        other => panic!("expected explosion, got {other}"),
    }
}
