use std::path::{Path, PathBuf};

use serde::Serialize;

use meic::harness::{
    convergence_study, switching_probability_sweep, variation_analysis, voltage_grid, write_convergence_csv,
    write_sweep_csv, write_variation_csv,
};
use meic::link_sim::{
    compare_methods, energy_per_bit, propagation_delay, simulate_link, write_link_csv, DelayBreakdown,
    EnergyBreakdown, Method, MethodRow,
};
use meic::magnetodynamics::{simulate_trajectory, write_trajectory_csv, Magnet, SpinState, SwitchTarget};
use meic::rng::trial_rng;

use crate::config::RunConfig;
use crate::output::{emit, render, write_atomic};
use crate::CliError;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s.into_bytes()
}

/// Magnetization trajectory under a constant ME voltage.
pub fn trajectory(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    cfg.validate()?;
    let duration = cfg.run.trajectory_duration_ns * 1e-9;
    if !(duration > 0.0) {
        return Err(usage("--duration-ns must be positive"));
    }
    let dt = cfg.sim.dt_ps * 1e-12;
    if duration < dt {
        return Err(usage("--duration-ns must cover at least one time step"));
    }
    let params = cfg.magnet();
    let magnet = Magnet::new(params)?;
    let initial = if params.temperature == 0.0 {
        SpinState::canonical(-1.0)
    } else {
        SpinState::easy_axis(-1.0, 0.0)
    };
    let v = cfg.run.trajectory_v_me;
    let mut rng = trial_rng(cfg.sim.seed, 0, 0);
    let traj = simulate_trajectory(initial, &magnet, |_| v, duration, dt, &mut rng)?;
    emit(out, &render(|w| write_trajectory_csv(w, &traj)))?;
    match traj.switching_time(SwitchTarget::Parallel) {
        Some(t) => eprintln!("m_x reached +0.9 at {:.1} ps", t * 1e12),
        None => eprintln!("m_x did not reach +0.9 (final m_x = {:.4})", traj.last().m.x),
    }
    Ok(())
}

/// Switching probability versus ME voltage.
pub fn sweep(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    cfg.validate()?;
    let r = &cfg.run;
    if r.sweep_trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let grid = voltage_grid(r.sweep_v_min, r.sweep_v_max, r.sweep_step)?;
    let result = switching_probability_sweep(
        &cfg.magnet(),
        &grid,
        r.sweep_trials,
        cfg.sim.window_ns * 1e-9,
        cfg.sim.dt_ps * 1e-12,
        cfg.sim.seed,
        cfg.sim.threads,
    )?;
    emit(out, &render(|w| write_sweep_csv(w, &result)))?;
    Ok(())
}

/// Parses a bit string such as `10110`, repeating or truncating it to `cycles`.
pub fn parse_pattern(pattern: &str, cycles: Option<usize>) -> Result<Vec<bool>, CliError> {
    let bits: Vec<bool> = pattern
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '_')
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(usage(format!("pattern may only contain 0 and 1, found {other:?}"))),
        })
        .collect::<Result<_, _>>()?;
    if bits.is_empty() {
        return Err(usage("pattern must contain at least one bit"));
    }
    Ok(match cycles {
        Some(0) => return Err(usage("--cycles must be at least 1")),
        Some(n) => bits.iter().copied().cycle().take(n).collect(),
        None => bits,
    })
}

#[derive(Serialize)]
struct LinkSummary {
    method: Method,
    length_mm: f64,
    bits_in: String,
    bits_sensed: String,
    bit_errors: usize,
    energy_fj_per_bit_per_mm: f64,
    energy_breakdown: EnergyBreakdown,
    /// Absent when the pattern contains no `1`.
    delay_ns: Option<f64>,
    delay_breakdown_ns: Option<DelayBreakdown>,
}

fn bit_string(bits: impl IntoIterator<Item = bool>) -> String {
    bits.into_iter().map(|b| if b { '1' } else { '0' }).collect()
}

/// Summary JSON goes next to the CSV (`x.csv` -> `x.json`) unless given explicitly.
fn summary_path(out: Option<&Path>, summary: Option<&Path>) -> Option<PathBuf> {
    summary
        .map(Path::to_path_buf)
        .or_else(|| out.map(|p| p.with_extension("json")))
}

/// Clocked link co-simulation for a bit pattern.
pub fn link(cfg: &RunConfig, out: Option<&Path>, summary: Option<&Path>) -> Result<(), CliError> {
    cfg.validate()?;
    let bits = parse_pattern(&cfg.run.link_pattern, cfg.run.link_cycles)?;
    let link = cfg.link()?;
    let trace = simulate_link(&link, &bits)?;
    let energy = energy_per_bit(&trace)?;
    let delay = propagation_delay(&trace).ok();
    let report = LinkSummary {
        method: Method::CapacitiveMe,
        length_mm: link.wire.length_mm,
        bits_in: bit_string(bits.iter().copied()),
        bits_sensed: bit_string(trace.sensed_bits()),
        bit_errors: trace.bit_errors(),
        energy_fj_per_bit_per_mm: energy.total,
        energy_breakdown: energy,
        delay_ns: delay.map(|d| d.total * 1e9),
        delay_breakdown_ns: delay.map(|d| DelayBreakdown {
            wire: d.wire * 1e9,
            switching: d.switching * 1e9,
            sense: d.sense * 1e9,
            total: d.total * 1e9,
            edges: d.edges,
        }),
    };
    let csv = render(|w| write_link_csv(w, &trace));
    let summary_bytes = json(&report);
    emit(out, &csv)?;
    match summary_path(out, summary) {
        Some(p) => write_atomic(&p, &summary_bytes)?,
        None => eprint!("{}", String::from_utf8_lossy(&summary_bytes)),
    }
    if report.bit_errors > 0 {
        return Err(CliError::Failed(format!("{} bit error(s) in {} cycles", report.bit_errors, bits.len())));
    }
    Ok(())
}

#[derive(Serialize)]
struct Ratio {
    length_mm: f64,
    full_swing_over_me: f64,
    low_swing_over_me: f64,
}

#[derive(Serialize)]
struct CompareReport {
    rows: Vec<MethodRow>,
    ratios: Vec<Ratio>,
}

pub fn parse_lengths(text: &str) -> Result<Vec<f64>, CliError> {
    let lengths: Vec<f64> = text
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|_| usage(format!("invalid length {s:?}"))))
        .collect::<Result<_, _>>()?;
    if lengths.is_empty() {
        return Err(usage("--lengths needs at least one value"));
    }
    Ok(lengths)
}

/// Energy/delay table of the three link designs at each length.
pub fn compare(cfg: &RunConfig, out: Option<&Path>, csv: bool) -> Result<(), CliError> {
    cfg.validate()?;
    let lengths = &cfg.run.compare_lengths_mm;
    if lengths.is_empty() {
        return Err(usage("--lengths needs at least one value"));
    }
    if cfg.run.compare_bits == 0 {
        return Err(usage("--bits must be at least 1"));
    }
    let mut rows = Vec::new();
    let mut ratios = Vec::new();
    for &l in lengths {
        if !(l > 0.0 && l.is_finite()) {
            return Err(usage(format!("length {l} mm must be positive")));
        }
        let link = cfg.link_at(l)?;
        link.validate()?;
        let r = compare_methods(&link, &cfg.repeater(), &cfg.amplifier(), cfg.run.compare_bits)?;
        ratios.push(Ratio {
            length_mm: l,
            full_swing_over_me: r[0].energy_fj_per_bit_per_mm / r[2].energy_fj_per_bit_per_mm,
            low_swing_over_me: r[1].energy_fj_per_bit_per_mm / r[2].energy_fj_per_bit_per_mm,
        });
        rows.extend(r);
    }
    let bytes = if csv {
        render(|w| {
            use std::io::Write;
            writeln!(w, "length_mm,method,energy_fj_per_bit_per_mm,delay_ns")?;
            for r in &rows {
                let name = serde_json::to_value(r.method).expect("method serializes");
                writeln!(
                    w,
                    "{},{},{:.6},{:.6}",
                    r.length_mm,
                    name.as_str().unwrap_or_default(),
                    r.energy_fj_per_bit_per_mm,
                    r.delay_ns
                )?;
            }
            Ok(())
        })
    } else {
        json(&CompareReport { rows, ratios })
    };
    emit(out, &bytes)
}

/// Monte Carlo device/electrical variation of the receiving-end voltage.
/// Fails (exit 1) after writing the report if any trial stays at or below 0.2 V.
pub fn variation(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    cfg.validate()?;
    let spread = cfg.run.variation_spread;
    if !(0.0..=0.5).contains(&spread) {
        return Err(usage(format!("--spread {spread} is outside the supported range [0, 0.5]")));
    }
    let report = variation_analysis(
        &cfg.link()?,
        spread,
        cfg.run.variation_trials,
        cfg.sim.seed,
        cfg.sim.threads,
    )?;
    emit(out, &render(|w| write_variation_csv(w, &report)))?;
    eprintln!(
        "min peak V_ME {:.1} mV, pass rate {:.4}",
        report.min_peak_v_me * 1e3,
        report.pass_rate
    );
    if !report.all_pass() {
        return Err(CliError::Failed(format!(
            "{} of {} trials stayed at or below 200 mV",
            report.trials.iter().filter(|t| !t.pass).count(),
            report.trials.len()
        )));
    }
    Ok(())
}

/// Heun step-size convergence at zero temperature.
pub fn convergence(cfg: &RunConfig, out: Option<&Path>) -> Result<(), CliError> {
    cfg.validate()?;
    let params = cfg.magnet().with_temperature(0.0);
    let dts: Vec<f64> = cfg.run.convergence_dt_ps.iter().map(|d| d * 1e-12).collect();
    let report = convergence_study(&params, cfg.run.convergence_v_me, &dts, cfg.run.convergence_duration_ns * 1e-9)?;
    emit(out, &render(|w| write_convergence_csv(w, &report)))?;
    eprintln!("minimum observed order {:.3}", report.min_order());
    Ok(())
}
