//! Bootstrap engine behavior: conventions, determinism and null calibration.

mod common;

use common::bw;
use rwkernel::bootstrap::{BootstrapSpec, Innovation};
use rwkernel::{
    bootstrap_distribution, bootstrap_resample, critical_value, critical_value_lower, p_value,
    select_from_curve, sigma_u_hat, size_power, size_power_curve, Dgp, Kernel, RngStream,
    SizePowerCurve, SizePowerPoint,
};

#[test]
fn critical_value_hand_examples() {
    let dist = [-1.0, 0.0, 1.0, 2.0];
    assert_eq!(critical_value(&dist, 0.25).unwrap(), 1.0);

    // B = 250, alpha = 0.05: k = ceil(237.5) = 238.
    let dist: Vec<f64> = (1..=250).map(|i| i as f64).collect();
    assert_eq!(critical_value(&dist, 0.05).unwrap(), 238.0);

    // Lower-tail mirror: k_lo = B + 1 - k.
    assert_eq!(critical_value_lower(&dist, 0.05).unwrap(), 13.0);
}

#[test]
fn critical_value_monotone_in_alpha() {
    let dist: Vec<f64> = (0..40).map(|i| (i as f64).sin()).collect();
    let mut sorted = dist.clone();
    sorted.sort_by(f64::total_cmp);
    let mut last = f64::INFINITY;
    for i in 1..100 {
        let alpha = i as f64 / 100.0;
        let l = critical_value(&sorted, alpha).unwrap();
        assert!(l <= last, "critical value increased as alpha grew");
        last = l;
    }
}

/// Exact rational oracle for `k = ceil((1 - a/100) * b)`.
fn rank_oracle(b: usize, alpha_pct: usize) -> usize {
    let num = (100 - alpha_pct) * b;
    num.div_ceil(100).clamp(1, b)
}

#[test]
fn p_value_and_critical_value_conventions_cross_check_exhaustively() {
    // B = 20 distinct sorted values; observed statistics placed strictly
    // between neighbors probe every rank. The conventions must agree:
    // p < alpha implies rejection by critical value, and rejection implies
    // p <= alpha (equality only at the integer boundary of (1-alpha)B).
    let b = 20usize;
    let dist: Vec<f64> = (1..=b).map(|i| i as f64).collect();
    for alpha_pct in 1..=99usize {
        let alpha = alpha_pct as f64 / 100.0;
        let k = rank_oracle(b, alpha_pct);
        let l_star = critical_value(&dist, alpha).unwrap();
        assert_eq!(l_star, k as f64, "rank mismatch at alpha = {alpha}");

        for obs_times_2 in 1..=(2 * b + 1) {
            let obs = obs_times_2 as f64 / 2.0; // 0.5, 1.0, 1.5, ..., 20.5
            let p = dist.iter().filter(|&&v| v > obs).count() as f64 / b as f64;
            let reject = obs >= l_star;
            if p < alpha {
                assert!(reject, "p = {p} < alpha = {alpha} but no rejection (obs {obs})");
            }
            if reject {
                let boundary = (100 - alpha_pct) * b % 100 == 0;
                if boundary {
                    assert!(p <= alpha, "rejected with p = {p} > alpha = {alpha}");
                } else {
                    assert!(p < alpha, "rejected with p = {p} >= alpha = {alpha} (obs {obs})");
                }
            }
        }
    }
}

#[test]
fn p_value_extremes() {
    let series = common::random_walk(60, 1.0, &RngStream::new(9).child(0));
    let out = p_value(
        &series,
        Kernel::Uniform,
        bw(0.5),
        40,
        Innovation::StandardNormal,
        &RngStream::new(11).child(1),
    )
    .unwrap();
    assert!((0.0..=1.0).contains(&out.p));
    assert_eq!(out.b_used + out.degenerate, 40);
}

#[test]
fn resampled_differences_draw_from_the_centered_unit_law() {
    // Differences alternate -1, +1: centered/unit-scaled pool is {-1, +1},
    // so every resample increment is exactly +-sigma_u_hat.
    let mut values = vec![0.0];
    for i in 0..40 {
        values.push(values[i] + if i % 2 == 0 { -1.0 } else { 1.0 });
    }
    let series = rwkernel::Series::new(values).unwrap();
    let sigma = sigma_u_hat(&series);
    assert!((sigma - 1.0).abs() < 1e-12);

    let resample = bootstrap_resample(
        &series,
        sigma,
        Innovation::ResampledDifferences,
        &RngStream::new(3).child(2),
    )
    .unwrap();
    let diffs = resample.diffs();
    for d in &diffs {
        assert!(
            (d.abs() - sigma).abs() < 1e-12,
            "increment {d} is not +-sigma"
        );
    }
    let mean: f64 = diffs.iter().sum::<f64>() / diffs.len() as f64;
    assert!(mean.abs() < 0.5, "increment mean {mean} far from 0");
}

#[test]
fn resample_starts_at_the_observed_first_value() {
    let series = rwkernel::Series::new(vec![5.0, 5.5, 6.0, 5.8]).unwrap();
    let resample = bootstrap_resample(
        &series,
        1.0,
        Innovation::StandardNormal,
        &RngStream::new(1).child(0),
    )
    .unwrap();
    assert_eq!(resample.first(), 5.0);
    assert_eq!(resample.t(), series.t());
}

#[test]
fn bootstrap_distribution_is_deterministic_and_sorted() {
    let series = common::random_walk(150, 0.3, &RngStream::new(21).child(0));
    let stream = RngStream::new(77).child(3);
    let a = bootstrap_distribution(
        &series,
        Kernel::Uniform,
        bw(0.15),
        60,
        Innovation::StandardNormal,
        &stream,
    )
    .unwrap();
    let b = bootstrap_distribution(
        &series,
        Kernel::Uniform,
        bw(0.15),
        60,
        Innovation::StandardNormal,
        &stream,
    )
    .unwrap();
    assert_eq!(a.values, b.values);
    assert!(a.values.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(a.values.len() + a.degenerate, 60);
}

#[test]
fn bootstrap_distribution_rejects_tiny_bandwidths() {
    let series = common::random_walk(80, 1.0, &RngStream::new(2).child(0));
    let err = bootstrap_distribution(
        &series,
        Kernel::Uniform,
        bw(1e-8),
        25,
        Innovation::StandardNormal,
        &RngStream::new(5).child(0),
    )
    .unwrap_err();
    assert!(matches!(
        err,
        rwkernel::Error::BandwidthTooSmall { .. } | rwkernel::Error::DegenerateStatistic { .. }
    ));
}

fn quick_spec(m: usize, b: usize, seed: u64) -> BootstrapSpec {
    BootstrapSpec {
        b,
        m,
        alpha: 0.05,
        innovation: Innovation::StandardNormal,
        master_seed: seed,
        literal_recursion: false,
    }
}

#[test]
fn size_equals_power_when_alternative_is_the_null() {
    let null = Dgp::RandomWalk { sigma_u: 0.3 };
    let point = size_power(&null, &null.clone(), 150, Kernel::Uniform, bw(0.15), &quick_spec(80, 39, 13))
        .unwrap();
    let combined = (point.se_size.powi(2) + point.se_power.powi(2)).sqrt();
    assert!(
        (point.size - point.power).abs() <= 3.0 * combined.max(1e-6),
        "size {} vs power {} beyond 3 combined stderr",
        point.size,
        point.power
    );
}

#[test]
fn rejection_counts_match_between_serial_and_parallel_runs() {
    let null = Dgp::RandomWalk { sigma_u: 0.3 };
    let alt = Dgp::LinearShift {
        beta: -0.2,
        sigma_u: 0.3,
    };
    let spec = quick_spec(40, 25, 99);
    let hs = [bw(0.1), bw(0.2)];

    let serial = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| size_power_curve(&null, &alt, 120, Kernel::Uniform, &hs, &spec).unwrap());
    let parallel = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(|| size_power_curve(&null, &alt, 120, Kernel::Uniform, &hs, &spec).unwrap());

    for (a, b) in serial.rows.iter().zip(&parallel.rows) {
        assert_eq!(a.size.to_bits(), b.size.to_bits());
        assert_eq!(a.power.to_bits(), b.power.to_bits());
        assert_eq!(a.degenerate, b.degenerate);
    }
}

#[test]
fn power_is_monotone_in_drift_strength_within_noise() {
    let null = Dgp::RandomWalk { sigma_u: 0.3 };
    let mut powers = Vec::new();
    let mut ses = Vec::new();
    for (i, beta) in [-0.05f64, -0.15, -0.40].iter().enumerate() {
        let alt = Dgp::LinearShift {
            beta: *beta,
            sigma_u: 0.3,
        };
        let point = size_power(
            &null,
            &alt,
            200,
            Kernel::Uniform,
            bw(0.16),
            &quick_spec(60, 39, 40 + i as u64),
        )
        .unwrap();
        powers.push(point.power);
        ses.push(point.se_power);
    }
    for i in 1..powers.len() {
        let slack = 2.0 * (ses[i - 1].powi(2) + ses[i].powi(2)).sqrt().max(0.02);
        assert!(
            powers[i] >= powers[i - 1] - slack,
            "power not nondecreasing: {powers:?}"
        );
    }
}

#[test]
fn selection_follows_the_admissible_argmax_with_largest_h_ties() {
    fn row(h: f64, size: f64, power: f64) -> SizePowerPoint {
        SizePowerPoint {
            h: bw(h),
            size,
            power,
            se_size: 0.01,
            se_power: 0.01,
            degenerate: 0,
        }
    }

    // Reference example: picks h = 0.10 (0.20 is inadmissible, 0.05 weaker).
    let curve = SizePowerCurve {
        rows: vec![row(0.05, 0.03, 0.5), row(0.10, 0.04, 0.8), row(0.20, 0.07, 0.9)],
        alpha: 0.05,
    };
    assert_eq!(select_from_curve(&curve).unwrap().get(), 0.10);

    // All sizes above alpha: no admissible bandwidth.
    let curve = SizePowerCurve {
        rows: vec![row(0.05, 0.10, 0.5), row(0.10, 0.10, 0.8)],
        alpha: 0.05,
    };
    assert!(select_from_curve(&curve).is_none());

    // Tied power: the larger admissible bandwidth wins.
    let curve = SizePowerCurve {
        rows: vec![row(0.05, 0.04, 0.8), row(0.10, 0.04, 0.8), row(0.20, 0.04, 0.2)],
        alpha: 0.05,
    };
    assert_eq!(select_from_curve(&curve).unwrap().get(), 0.10);
}

#[test]
fn select_bandwidth_returns_curve_and_admissible_choice() {
    let null = Dgp::RandomWalk { sigma_u: 0.3 };
    let alt = Dgp::LinearShift {
        beta: -0.3,
        sigma_u: 0.3,
    };
    let grid = [bw(0.08), bw(0.16), bw(0.32)];
    let selection = rwkernel::select_bandwidth(
        &null,
        &alt,
        150,
        Kernel::Uniform,
        &grid,
        &quick_spec(50, 25, 7),
    )
    .unwrap();
    assert_eq!(selection.curve.rows.len(), 3);
    let chosen = selection
        .curve
        .rows
        .iter()
        .find(|r| r.h == selection.h_test)
        .unwrap();
    assert!(chosen.size <= 0.05 + 1e-12);
    for row in &selection.curve.rows {
        assert!((0.0..=1.0).contains(&row.size));
        assert!((0.0..=1.0).contains(&row.power));
    }
}

#[test]
fn null_statistic_distribution_matches_the_frozen_monte_carlo_bands() {
    // Frozen from an independent Monte Carlo oracle: at T = 500 and
    // h = T^(-2/5) the null mean of L is about -4.7 with variance near 0.6.
    // (The estimation term in M_T dominates at finite T; the bootstrap
    // absorbs it, which is why sizes calibrate correctly regardless.)
    let t = 500usize;
    let h = bw((t as f64).powf(-0.4));
    let dgp = Dgp::RandomWalk {
        sigma_u: 0.05f64.sqrt(),
    };
    let root = RngStream::new(314).child(0);
    let mut values = Vec::with_capacity(500);
    for m in 0..500u64 {
        let series = rwkernel::simulate(&dgp, t, &root.child(m)).unwrap();
        values.push(rwkernel::l_stat(&series, Kernel::Uniform, h).unwrap().l_value);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / values.len() as f64;
    assert!(
        (-5.5..=-4.0).contains(&mean),
        "null mean {mean} outside frozen band"
    );
    assert!((0.3..=1.2).contains(&var), "null variance {var} outside frozen band");
}

#[test]
fn bootstrap_distribution_tracks_the_null_law() {
    // The resampled statistic must concentrate where the null statistic
    // does (mean near -4.7 at T = 500), not near zero.
    let t = 500usize;
    let h = bw((t as f64).powf(-0.4));
    let dgp = Dgp::RandomWalk {
        sigma_u: 0.05f64.sqrt(),
    };
    let series = rwkernel::simulate(&dgp, t, &RngStream::new(8).child(0)).unwrap();
    let dist = bootstrap_distribution(
        &series,
        Kernel::Uniform,
        h,
        250,
        Innovation::StandardNormal,
        &RngStream::new(9).child(0),
    )
    .unwrap();
    let mean = dist.values.iter().sum::<f64>() / dist.values.len() as f64;
    assert!(
        (-6.0..=-3.5).contains(&mean),
        "bootstrap mean {mean} outside frozen band"
    );
}

#[test]
fn literal_recursion_flag_changes_the_resample_law() {
    use rwkernel::experiments::{run_data_analysis, AnalysisOptions};

    // Same data and seed; flipping the recursion changes every resample
    // path, so the bootstrap p-value must move.
    let series = common::random_walk(300, 0.3, &RngStream::new(31).child(0));
    let base = AnalysisOptions {
        h: Some(0.15),
        spec: quick_spec(1, 199, 5),
        ..AnalysisOptions::default()
    };
    let literal = AnalysisOptions {
        spec: BootstrapSpec {
            literal_recursion: true,
            ..base.spec
        },
        ..base.clone()
    };
    let a = run_data_analysis(&series, "mem", &base).unwrap();
    let b = run_data_analysis(&series, "mem", &literal).unwrap();
    assert_ne!(
        a.l_p_value, b.l_p_value,
        "literal recursion produced identical bootstrap law"
    );
}
