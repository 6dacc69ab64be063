//! Seeded Monte Carlo engines: switching probability versus ME voltage,
//! device/electrical variation of the link, and Heun step-size convergence.
//!
//! Every trial owns a counter-derived stream, so results do not depend on the
//! worker count or on scheduling order.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interconnect::{build_network, transient_solve, Edge, LinkElectrical, WireParams};
use crate::link_sim::LinkConfig;
use crate::magnetodynamics::{
    first_passage, simulate_trajectory, Magnet, MagnetParams, SpinState, SwitchTarget,
};
use crate::memtj::MeCapacitor;
use crate::rng::trial_rng;

/// Two-sided 95 % normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Minimum trial count accepted by the Monte Carlo drivers.
pub const MIN_TRIALS: usize = 100;

/// Receiving-end voltage a high input must exceed in the variation study, V.
pub const VARIATION_PASS_V: f64 = 0.2;

/// Wilson score interval at 95 % for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n_f;
    let centre = (p + z2 / (2.0 * n_f)) / denom;
    let half = Z95 * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    // The bounds are exactly 0 and 1 at the extremes; avoid round-off there.
    let lo = if k == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

/// Runs `f` inside a pool of `threads` workers (0 picks the rayon default).
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> Result<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn check_trials(n: usize) -> Result<()> {
    if n < MIN_TRIALS {
        return Err(Error::Domain {
            name: "n_trials",
            value: n as f64,
            reason: "Monte Carlo studies need at least 100 trials",
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub v_me: f64,
    pub n_trials: usize,
    pub n_switched: usize,
    pub probability: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Mean first-passage time of the switched trials, s.
    pub mean_switch_time: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub window: f64,
    pub dt: f64,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
}

/// Switching probability at each voltage in `v_values`. Trial `i` draws the
/// same thermal stream at every voltage (common random numbers), so the
/// curve is smooth and its monotonicity is testable. Each trial starts from
/// the reset state and succeeds once m_x reaches +0.9 inside `window`.
pub fn switching_probability_sweep(
    params: &MagnetParams<f64>,
    v_values: &[f64],
    n_trials: usize,
    window: f64,
    dt: f64,
    seed: u64,
    threads: usize,
) -> Result<SweepResult> {
    check_trials(n_trials)?;
    if !(window > 0.0) {
        return Err(Error::Domain { name: "window", value: window, reason: "must be positive" });
    }
    if v_values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("sweep voltages must be finite".into()));
    }
    let magnet = Magnet::new(*params)?;
    let initial = if params.temperature == 0.0 {
        SpinState::canonical(-1.0)
    } else {
        SpinState::easy_axis(-1.0, 0.0)
    };

    let run_point = |v: f64| -> Result<SweepPoint> {
        let outcomes: Vec<Option<f64>> = (0..n_trials)
            .into_par_iter()
            .map(|i| {
                let mut rng = trial_rng(seed, 0, i as u64);
                first_passage(initial, &magnet, |_| v, window, dt, SwitchTarget::Parallel, &mut rng)
            })
            .collect::<Result<_>>()?;
        let times: Vec<f64> = outcomes.into_iter().flatten().collect();
        let k = times.len();
        let (ci_low, ci_high) = wilson_interval(k, n_trials);
        Ok(SweepPoint {
            v_me: v,
            n_trials,
            n_switched: k,
            probability: k as f64 / n_trials as f64,
            ci_low,
            ci_high,
            mean_switch_time: (k > 0).then(|| times.iter().sum::<f64>() / k as f64),
        })
    };

    let points = with_threads(threads, || v_values.iter().map(|&v| run_point(v)).collect::<Result<Vec<_>>>())??;
    Ok(SweepResult { window, dt, seed, points })
}

/// Inclusive voltage grid from `v_min` to `v_max` in steps of `step`.
pub fn voltage_grid(v_min: f64, v_max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(v_max >= v_min) || !v_min.is_finite() || !v_max.is_finite() {
        return Err(Error::Config(format!(
            "invalid voltage grid: v_min {v_min}, v_max {v_max}, step {step}"
        )));
    }
    let n = ((v_max - v_min) / step + 1e-9).floor() as usize;
    if n > 100_000 {
        return Err(Error::Config("voltage grid has more than 100000 points".into()));
    }
    Ok((0..=n).map(|i| v_min + step * i as f64).collect())
}

pub fn write_sweep_csv<W: Write>(mut out: W, sweep: &SweepResult) -> std::io::Result<()> {
    writeln!(out, "v_me_mv,n_trials,n_switched,probability,ci_low,ci_high")?;
    for p in &sweep.points {
        writeln!(
            out,
            "{:.3},{},{},{:.6},{:.6},{:.6}",
            p.v_me * 1e3,
            p.n_trials,
            p.n_switched,
            p.probability,
            p.ci_low,
            p.ci_high
        )?;
    }
    Ok(())
}

/// Multiplicative factors applied to the nominal parameters in one trial.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationSample {
    pub c_s: f64,
    pub r_per_mm: f64,
    pub c_per_mm: f64,
    pub r_driver: f64,
    pub magnet_length: f64,
    pub magnet_width: f64,
    pub t_me: f64,
    pub alpha_me: f64,
}

impl VariationSample {
    fn draw<R: Rng>(spread: f64, rng: &mut R) -> Self {
        let mut f = || 1.0 + spread * (2.0 * rng.random::<f64>() - 1.0);
        Self {
            c_s: f(),
            r_per_mm: f(),
            c_per_mm: f(),
            r_driver: f(),
            magnet_length: f(),
            magnet_width: f(),
            t_me: f(),
            alpha_me: f(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationTrial {
    pub trial: usize,
    pub factors: VariationSample,
    /// ME capacitor of the varied device, used as the line load, F.
    pub c_l: f64,
    pub peak_v_me: f64,
    /// Quasi-static switching threshold of the varied device, V.
    pub device_threshold: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub spread: f64,
    pub seed: u64,
    pub nominal_peak_v_me: f64,
    pub min_peak_v_me: f64,
    pub max_peak_v_me: f64,
    pub pass_rate: f64,
    pub trials: Vec<VariationTrial>,
}

impl VariationReport {
    pub fn all_pass(&self) -> bool {
        self.trials.iter().all(|t| t.pass)
    }
}

fn peak_receiver_voltage(wire: &WireParams<f64>, elec: &LinkElectrical<f64>, rise: f64, dt: f64) -> Result<f64> {
    let net = build_network(wire, elec);
    let tau = elec.r_driver * elec.effective_capacitance(wire) + wire.total_r() * wire.total_c();
    let duration = (15.0 * tau).max(1e-9) + rise;
    let res = transient_solve(&net, &Edge { t0: 0.0, v0: 0.0, v1: elec.vdd, rise }, dt, duration)?;
    Ok(res.receiver().into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Samples every device and electrical parameter independently and uniformly
/// in `nominal * [1 - spread, 1 + spread]`, drives each varied link with a
/// high input step and records the peak receiving-end voltage. A trial passes
/// when that peak exceeds 0.2 V.
pub fn variation_analysis(
    config: &LinkConfig,
    spread: f64,
    n_trials: usize,
    seed: u64,
    threads: usize,
) -> Result<VariationReport> {
    if !(0.0..=0.5).contains(&spread) {
        return Err(Error::Domain { name: "spread", value: spread, reason: "must lie in [0, 0.5]" });
    }
    check_trials(n_trials)?;
    config.wire.validate()?;
    config.electrical.validate()?;
    config.magnet.validate()?;
    let cs_ratio = config.electrical.c_s / config.wire.total_c();
    let nominal_peak =
        peak_receiver_voltage(&config.wire, &config.electrical, config.rise, config.circuit_dt)?;

    let run = |i: usize| -> Result<VariationTrial> {
        let mut rng = trial_rng(seed, 1, i as u64);
        let f = VariationSample::draw(spread, &mut rng);
        let mut magnet = config.magnet;
        magnet.length *= f.magnet_length;
        magnet.width *= f.magnet_width;
        magnet.t_me *= f.t_me;
        magnet.alpha_me *= f.alpha_me;
        let c_l = MeCapacitor::of_magnet(&magnet)?.capacitance;
        let mut wire = config.wire;
        wire.r_per_mm *= f.r_per_mm;
        wire.c_per_mm *= f.c_per_mm;
        // C_S follows its own nominal value, not the varied wire.
        let elec = LinkElectrical {
            c_s: cs_ratio * config.wire.total_c() * f.c_s,
            c_l,
            r_driver: config.electrical.r_driver * f.r_driver,
            vdd: config.electrical.vdd,
        };
        let peak = peak_receiver_voltage(&wire, &elec, config.rise, config.circuit_dt)?;
        let device_threshold = Magnet::new(magnet)?.threshold_voltage();
        Ok(VariationTrial {
            trial: i,
            factors: f,
            c_l,
            peak_v_me: peak,
            device_threshold,
            pass: peak > VARIATION_PASS_V,
        })
    };

    let trials = with_threads(threads, || (0..n_trials).into_par_iter().map(run).collect::<Result<Vec<_>>>())??;
    let min = trials.iter().map(|t| t.peak_v_me).fold(f64::INFINITY, f64::min);
    let max = trials.iter().map(|t| t.peak_v_me).fold(f64::NEG_INFINITY, f64::max);
    let passed = trials.iter().filter(|t| t.pass).count();
    Ok(VariationReport {
        spread,
        seed,
        nominal_peak_v_me: nominal_peak,
        min_peak_v_me: min,
        max_peak_v_me: max,
        pass_rate: passed as f64 / n_trials as f64,
        trials,
    })
}

pub fn write_variation_csv<W: Write>(mut out: W, report: &VariationReport) -> std::io::Result<()> {
    writeln!(out, "trial,peak_v_me_mv,pass")?;
    for t in &report.trials {
        writeln!(out, "{},{:.6},{}", t.trial, t.peak_v_me * 1e3, t.pass as u8)?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub dt: f64,
    /// Largest angle between this run and the reference at shared sample times, rad.
    pub max_angle_error: f64,
    /// Order estimated against the next finer step; `None` for the finest.
    pub observed_order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub reference_dt: f64,
    pub v_me: f64,
    pub duration: f64,
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceReport {
    pub fn min_order(&self) -> f64 {
        self.rows
            .iter()
            .filter_map(|r| r.observed_order)
            .fold(f64::INFINITY, f64::min)
    }
}

fn integral_ratio(a: f64, b: f64) -> Option<usize> {
    let r = a / b;
    let n = r.round();
    ((r - n).abs() < 1e-6 * n.max(1.0) && n >= 1.0).then_some(n as usize)
}

/// Deterministic (T = 0) Heun runs at each step in `dt_values`, compared with
/// a reference at a quarter of the finest step. Errors are sampled at every
/// multiple of the coarsest step. Fails with a validation error if the error
/// does not shrink as the step is refined.
pub fn convergence_study(
    params: &MagnetParams<f64>,
    v_me: f64,
    dt_values: &[f64],
    duration: f64,
) -> Result<ConvergenceReport> {
    if dt_values.len() < 3 {
        return Err(Error::Config("convergence study needs at least three step sizes".into()));
    }
    if params.temperature != 0.0 {
        return Err(Error::Config("convergence study requires temperature = 0".into()));
    }
    let mut dts = dt_values.to_vec();
    if dts.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Config("step sizes must be positive".into()));
    }
    dts.sort_by(|a, b| b.partial_cmp(a).unwrap());
    dts.dedup();
    let coarse = dts[0];
    let fine = dts[dts.len() - 1] / 4.0;
    let n_samples = integral_ratio(duration, coarse)
        .ok_or_else(|| Error::Config("duration must be a multiple of every step size".into()))?;
    let magnet = Magnet::new(*params)?;
    let initial = SpinState::canonical(-1.0);
    let mut rng = trial_rng(0, 0, 0);

    let run = |dt: f64, rng: &mut crate::rng::TrialRng| -> Result<Vec<crate::vec3::Vec3<f64>>> {
        let stride = integral_ratio(coarse, dt)
            .ok_or_else(|| Error::Config(format!("step {dt:e} does not divide the coarsest step {coarse:e}")))?;
        let traj = simulate_trajectory(initial, &magnet, |_| v_me, duration, dt, rng)?;
        Ok((0..=n_samples).map(|k| traj.samples[k * stride].m).collect())
    };
    let reference = run(fine, &mut rng)?;
    let mut rows = Vec::with_capacity(dts.len());
    for &dt in &dts {
        let ms = run(dt, &mut rng)?;
        let err = ms
            .iter()
            .zip(&reference)
            .map(|(a, b)| a.cross(*b).norm().atan2(a.dot(*b)))
            .fold(0.0, f64::max);
        rows.push(ConvergenceRow { dt, max_angle_error: err, observed_order: None });
    }
    for i in 0..rows.len() - 1 {
        let (a, b) = (rows[i], rows[i + 1]);
        if !(b.max_angle_error < a.max_angle_error) {
            return Err(Error::Validation(format!(
                "error did not decrease from dt = {:e} ({:e} rad) to dt = {:e} ({:e} rad)",
                a.dt, a.max_angle_error, b.dt, b.max_angle_error
            )));
        }
        rows[i].observed_order =
            Some((a.max_angle_error / b.max_angle_error).ln() / (a.dt / b.dt).ln());
    }
    Ok(ConvergenceReport { reference_dt: fine, v_me, duration, rows })
}

pub fn write_convergence_csv<W: Write>(mut out: W, report: &ConvergenceReport) -> std::io::Result<()> {
    writeln!(out, "dt_ps,max_angle_error_rad,observed_order")?;
    for r in &report.rows {
        match r.observed_order {
            Some(p) => writeln!(out, "{:.6},{:.9e},{:.4}", r.dt * 1e12, r.max_angle_error, p)?,
            None => writeln!(out, "{:.6},{:.9e},", r.dt * 1e12, r.max_angle_error)?,
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_edges() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.03 && hi < 0.04, "{hi}");
        let (lo, hi) = wilson_interval(100, 100);
        assert!(lo > 0.96 && lo < 0.97);
        assert_eq!(hi, 1.0);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((0.5 - lo - (hi - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn wilson_matches_reference_value() {
        // 8 of 10 successes: textbook interval (0.4902, 0.9433).
        let (lo, hi) = wilson_interval(8, 10);
        assert!((lo - 0.4902).abs() < 1e-4, "{lo}");
        assert!((hi - 0.9433).abs() < 1e-4, "{hi}");
    }

    #[test]
    fn grid_is_inclusive() {
        let g = voltage_grid(0.05, 0.25, 0.025).unwrap();
        assert_eq!(g.len(), 9);
        assert!((g[8] - 0.25).abs() < 1e-12);
        assert!(voltage_grid(0.3, 0.1, 0.01).is_err());
        assert!(voltage_grid(0.0, 0.1, 0.0).is_err());
    }

    #[test]
    fn too_few_trials_rejected() {
        let p = MagnetParams::nominal();
        assert!(switching_probability_sweep(&p, &[0.1], 10, 1e-9, 1e-13, 0, 1).is_err());
        let cfg = LinkConfig::nominal(5.0);
        assert!(variation_analysis(&cfg, 0.2, 50, 0, 1).is_err());
        assert!(variation_analysis(&cfg, 0.6, 200, 0, 1).is_err());
    }

    #[test]
    fn convergence_input_checks() {
        let p = MagnetParams::nominal().with_temperature(0.0);
        assert!(convergence_study(&p, 0.2, &[1e-13, 2e-13], 1e-10).is_err());
        assert!(convergence_study(&MagnetParams::nominal(), 0.2, &[1e-13, 2e-13, 4e-13], 1e-10).is_err());
        assert!(convergence_study(&p, 0.2, &[1e-13, 3e-13, 4e-13], 1.2e-10).is_err());
    }
}
