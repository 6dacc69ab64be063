use meic::harness::{
    convergence_study, switching_probability_sweep, variation_analysis, voltage_grid, wilson_interval, write_convergence_csv,
    write_sweep_csv, write_variation_csv, SweepResult, VARIATION_PASS_V,
};
use meic::link_sim::LinkConfig;
use meic::magnetodynamics::MagnetParams;
use meic::Error;

const WINDOW: f64 = 2e-9;
const DT: f64 = 0.1e-12;

fn grid() -> Vec<f64> {
    voltage_grid(0.05, 0.25, 0.025).unwrap()
}

fn sweep(v: &[f64], n: usize, seed: u64, threads: usize) -> SweepResult {
    switching_probability_sweep(&MagnetParams::nominal(), v, n, WINDOW, DT, seed, threads).unwrap()
}

#[test]
fn full_grid_curve_monotone_pinned_and_covered() {
    let v = grid();
    assert_eq!(v.len(), 9);
    let a = sweep(&v, 1000, 0, 0);
    let b = sweep(&v, 1000, 1, 0);

    for w in a.points.windows(2) {
        assert!(w[1].probability >= w[0].probability - 0.03, "{:?}", a.points);
    }
    // Regression data for master seed 0, 1000 trials per point.
    let counts: Vec<usize> = a.points.iter().map(|p| p.n_switched).collect();
    assert_eq!(counts, PINNED_COUNTS, "curve moved: {counts:?}");

    let covered = a
        .points
        .iter()
        .zip(&b.points)
        .filter(|(p, q)| q.probability >= p.ci_low && q.probability <= p.ci_high)
        .count();
    assert!(covered as f64 >= 0.9 * v.len() as f64, "{covered} of {}", v.len());

    for p in &a.points {
        assert!(p.n_switched <= p.n_trials);
        assert!((0.0..=1.0).contains(&p.probability));
        assert!(p.ci_low <= p.probability && p.probability <= p.ci_high);
        assert_eq!(p.mean_switch_time.is_some(), p.n_switched > 0);
    }
}

const PINNED_COUNTS: [usize; 9] = [0, 0, 0, 0, 674, 1000, 1000, 1000, 1000];

#[test]
fn no_drive_retains_state() {
    let r = sweep(&[0.0], 200, 5, 0);
    assert!(r.points[0].probability <= 0.01);
}

#[test]
fn worker_count_does_not_change_results() {
    let v = [0.14, 0.15, 0.16];
    let one = sweep(&v, 100, 11, 1);
    let four = sweep(&v, 100, 11, 4);
    assert_eq!(one, four);
    let mut a = Vec::new();
    let mut b = Vec::new();
    write_sweep_csv(&mut a, &one).unwrap();
    write_sweep_csv(&mut b, &four).unwrap();
    assert_eq!(a, b);
    assert!(String::from_utf8(a).unwrap().starts_with("v_me_mv,n_trials,n_switched,probability,ci_low,ci_high\n"));
}

#[test]
fn sweep_input_checks() {
    let p = MagnetParams::nominal();
    assert!(matches!(
        switching_probability_sweep(&p, &[0.2], 99, WINDOW, DT, 0, 0),
        Err(Error::Domain { .. })
    ));
    assert!(switching_probability_sweep(&p, &[0.2], 100, 0.0, DT, 0, 0).is_err());
    assert!(switching_probability_sweep(&p, &[f64::NAN], 100, WINDOW, DT, 0, 0).is_err());
}

#[test]
fn wilson_interval_properties() {
    for n in [1usize, 10, 100, 1000] {
        for k in 0..=n {
            let (lo, hi) = wilson_interval(k, n);
            let p = k as f64 / n as f64;
            assert!(0.0 <= lo && lo <= p && p <= hi && hi <= 1.0);
        }
    }
    let (lo, hi) = wilson_interval(50, 100);
    assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
}

#[test]
fn zero_spread_reproduces_nominal() {
    let cfg = LinkConfig::nominal(5.0);
    let r = variation_analysis(&cfg, 0.0, 100, 3, 0).unwrap();
    assert_eq!(r.trials.len(), 100);
    assert!(r.trials.iter().all(|t| t.peak_v_me == r.nominal_peak_v_me));
    assert_eq!(r.min_peak_v_me, r.max_peak_v_me);
    assert_eq!(r.pass_rate, 1.0);
}

#[test]
fn wide_spread_report_is_well_formed() {
    let cfg = LinkConfig::nominal(5.0);
    let r = variation_analysis(&cfg, 0.5, 400, 3, 0).unwrap();
    let passes = r.trials.iter().filter(|t| t.pass).count();
    assert!((r.pass_rate - passes as f64 / 400.0).abs() < 1e-15);
    assert!(r.pass_rate < 1.0 && r.pass_rate > 0.5, "{}", r.pass_rate);
    for t in &r.trials {
        assert_eq!(t.pass, t.peak_v_me > VARIATION_PASS_V);
        for f in [t.factors.c_s, t.factors.r_per_mm, t.factors.c_per_mm, t.factors.alpha_me] {
            assert!((0.5..=1.5).contains(&f));
        }
    }
    let lo = r.trials.iter().map(|t| t.peak_v_me).fold(f64::INFINITY, f64::min);
    assert_eq!(lo, r.min_peak_v_me);
    assert!(!r.all_pass());
    let mut buf = Vec::new();
    write_variation_csv(&mut buf, &r).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().next(), Some("trial,peak_v_me_mv,pass"));
    assert_eq!(text.lines().count(), 401);
}

#[test]
fn variation_is_seeded_and_thread_independent() {
    let cfg = LinkConfig::nominal(5.0);
    let a = variation_analysis(&cfg, 0.2, 100, 8, 1).unwrap();
    let b = variation_analysis(&cfg, 0.2, 100, 8, 3).unwrap();
    assert_eq!(a, b);
    let c = variation_analysis(&cfg, 0.2, 100, 9, 1).unwrap();
    assert_ne!(a.trials, c.trials);
}

#[test]
fn variation_input_checks() {
    let cfg = LinkConfig::nominal(5.0);
    assert!(variation_analysis(&cfg, 0.6, 100, 0, 0).is_err());
    assert!(variation_analysis(&cfg, -0.1, 100, 0, 0).is_err());
    assert!(variation_analysis(&cfg, 0.2, 10, 0, 0).is_err());
}

#[test]
fn heun_is_second_order() {
    let p = MagnetParams::nominal().with_temperature(0.0);
    let r = convergence_study(&p, 0.2, &[0.4e-12, 0.2e-12, 0.1e-12, 0.05e-12], 0.5e-9).unwrap();
    assert_eq!(r.rows.len(), 4);
    assert!(r.min_order() >= 1.8, "{:?}", r.rows);
    for w in r.rows.windows(2) {
        assert!(w[0].max_angle_error / w[1].max_angle_error >= 3.0);
    }
    let mut buf = Vec::new();
    write_convergence_csv(&mut buf, &r).unwrap();
    assert!(String::from_utf8(buf).unwrap().starts_with("dt_ps,max_angle_error_rad,observed_order\n"));
}

#[test]
fn convergence_input_checks() {
    let cold = MagnetParams::nominal().with_temperature(0.0);
    assert!(matches!(convergence_study(&cold, 0.2, &[0.2e-12, 0.1e-12], 0.5e-9), Err(Error::Config(_))));
    let warm = MagnetParams::nominal();
    assert!(matches!(
        convergence_study(&warm, 0.2, &[0.4e-12, 0.2e-12, 0.1e-12], 0.5e-9),
        Err(Error::Config(_))
    ));
    assert!(convergence_study(&cold, 0.2, &[0.4e-12, 0.3e-12, 0.1e-12], 0.5e-9).is_err());
}

#[test]
fn stalled_refinement_is_a_validation_failure() {
    // Steps this small put the truncation error far below round-off, so the
    // measured error no longer shrinks with the step.
    let p = MagnetParams::nominal().with_temperature(0.0);
    let dts = [4e-18, 2e-18, 1e-18];
    match convergence_study(&p, 0.2, &dts, 4e-16) {
        Err(Error::Validation(msg)) => assert!(msg.contains("did not decrease")),
        other => panic!("expected a validation failure, got {other:?}"),
    }
}
