//! End-to-end co-simulation of the capacitive ME link: bit pattern -> series-C
//! wire transient -> ME write -> resistive-divider read -> clocked sense ->
//! reset, one clock cycle per bit.
//!
//! The driver is return-to-zero inside each cycle. A `1` holds the input at
//! VDD for the write phase only, so the line discharges while the magnet is
//! being read or reset. With NRZ drive the receiving end of a 1 -> 0 transition
//! stays above the ME threshold for about one wire delay, which is long
//! enough to flip the free layer spuriously.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::interconnect::{
    build_network, capacitive_wire_delay, divider_estimate, fullswing_baseline, lowswing_capacitive_baseline,
    transient_solve, AmplifierParams, LinkElectrical, PulseTrain, RepeaterParams, TransientResult,
    WireParams,
};
use crate::magnetodynamics::{
    heun_step_driven, thermal_sigma, Magnet, MagnetParams, SpinState, SwitchTarget,
};
use crate::memtj::{
    mtj_resistance, read_energy, read_voltage, reset_energy, sense, MeCapacitor, MtjParams,
};
use crate::rng::trial_rng;

/// Write / read / reset split of one clock period.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockParams {
    /// s.
    pub period: f64,
    pub write_frac: f64,
    pub read_frac: f64,
    pub reset_frac: f64,
}

impl Default for ClockParams {
    fn default() -> Self {
        Self { period: 2.5e-9, write_frac: 0.5, read_frac: 0.25, reset_frac: 0.25 }
    }
}

impl ClockParams {
    pub fn write_time(&self) -> f64 {
        self.period * self.write_frac
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("clock.period", self.period)?;
        ensure_positive("clock.write_frac", self.write_frac)?;
        ensure_positive("clock.read_frac", self.read_frac)?;
        ensure_positive("clock.reset_frac", self.reset_frac)?;
        let sum = self.write_frac + self.read_frac + self.reset_frac;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Domain {
                name: "clock phase fractions",
                value: sum,
                reason: "write + read + reset fractions must sum to 1",
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    pub magnet: MagnetParams<f64>,
    pub mtj: MtjParams<f64>,
    pub wire: WireParams<f64>,
    pub electrical: LinkElectrical<f64>,
    pub clock: ClockParams,
    /// Input edge duration, s.
    pub rise: f64,
    /// LLG step, s. Must divide `circuit_dt`.
    pub llg_dt: f64,
    /// Wire transient step, s.
    pub circuit_dt: f64,
    /// Node-M settling plus clocked inverter delay, s.
    pub sense_latency: f64,
    pub seed: u64,
}

/// Minimum write-phase slack beyond the wire delay reserved for the magnet.
pub const MIN_SWITCH_WINDOW: f64 = 500e-12;

impl LinkConfig {
    /// Default link: series C_S = C_W / 2, 580 ohm driver, ME capacitor as
    /// the receiver load, 2.5 ns clock.
    pub fn nominal(length_mm: f64) -> Self {
        let magnet = MagnetParams::nominal();
        let wire = WireParams::global_cu(length_mm);
        let c_l = MeCapacitor::of_magnet(&magnet)
            .map(|c| c.capacitance)
            .unwrap_or(0.0);
        Self {
            magnet,
            mtj: MtjParams::nominal(),
            wire,
            electrical: LinkElectrical::capacitive(&wire, 0.5, c_l, 580.0, 1.0),
            clock: ClockParams::default(),
            rise: 10e-12,
            llg_dt: 0.1e-12,
            circuit_dt: 1e-12,
            sense_latency: 20e-12,
            seed: 0,
        }
    }

    pub fn me_capacitor(&self) -> Result<MeCapacitor<f64>> {
        MeCapacitor::of_magnet(&self.magnet)
    }

    fn substeps(&self) -> Result<usize> {
        ensure_positive("sim.llg_dt", self.llg_dt)?;
        ensure_positive("sim.circuit_dt", self.circuit_dt)?;
        let ratio = self.circuit_dt / self.llg_dt;
        let n = ratio.round();
        if n < 1.0 || (ratio - n).abs() > 1e-6 {
            return Err(Error::Config(format!(
                "circuit step ({:e} s) must be an integer multiple of the LLG step ({:e} s)",
                self.circuit_dt, self.llg_dt
            )));
        }
        Ok(n as usize)
    }

    pub fn validate(&self) -> Result<()> {
        self.magnet.validate()?;
        self.mtj.validate()?;
        self.wire.validate()?;
        self.electrical.validate()?;
        self.clock.validate()?;
        self.substeps()?;
        if !(self.rise >= 0.0) || !(self.sense_latency >= 0.0) {
            return Err(Error::Config("rise time and sense latency must be >= 0".into()));
        }
        let wire_delay = capacitive_wire_delay(&self.wire, &self.electrical, self.circuit_dt)?;
        if self.clock.write_time() < wire_delay + MIN_SWITCH_WINDOW {
            return Err(Error::Config(format!(
                "write phase {:.1} ps is shorter than wire delay {:.1} ps + {:.0} ps switching window",
                self.clock.write_time() * 1e12,
                wire_delay * 1e12,
                MIN_SWITCH_WINDOW * 1e12
            )));
        }
        Ok(())
    }
}

/// One recorded instant (every circuit step).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkSample {
    pub t: f64,
    pub v_in: f64,
    /// Receiving-end line voltage, V.
    pub v_me: f64,
    pub mx: f64,
    /// Node-M voltage; zero outside the read phase.
    pub v_node_m: f64,
    /// Sensed output, present only at read-phase sampling instants.
    pub v_out: Option<bool>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleRecord {
    pub index: usize,
    pub bit_in: bool,
    pub sensed: bool,
    pub v_node_m: f64,
    /// 50 % delay of V_ME after the input edge of a `1`, s.
    pub wire_delay: Option<f64>,
    /// Time from the cycle start to m_x >= +0.9 within the write phase, s.
    pub switch_time: Option<f64>,
    /// Time from reset-phase start to m_x <= -0.9, s.
    pub reset_time: Option<f64>,
    pub e_line: f64,
    pub e_read: f64,
    pub e_reset: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkTrace {
    pub samples: Vec<LinkSample>,
    pub cycles: Vec<CycleRecord>,
    pub length_mm: f64,
    pub period: f64,
    pub sense_latency: f64,
}

impl LinkTrace {
    pub fn sensed_bits(&self) -> Vec<bool> {
        self.cycles.iter().map(|c| c.sensed).collect()
    }

    /// V_Out per cycle: the bit sensed in cycle k is held through cycle k + 1.
    pub fn output_bits(&self) -> Vec<bool> {
        let mut out = vec![false];
        out.extend(self.cycles.iter().take(self.cycles.len().saturating_sub(1)).map(|c| c.sensed));
        out
    }

    pub fn bit_errors(&self) -> usize {
        self.cycles.iter().filter(|c| c.bit_in != c.sensed).count()
    }
}

fn phase_failure(cycle: usize, what: &'static str, mx: f64, t: f64) -> Error {
    Error::LinkFailure { cycle, what, mx, t_ps: t * 1e12 }
}

/// Runs the link for `bits`, one clock cycle each, using thermal streams
/// derived from `config.seed`.
pub fn simulate_link(config: &LinkConfig, bits: &[bool]) -> Result<LinkTrace> {
    if bits.is_empty() {
        return Err(Error::Config("bit pattern must not be empty".into()));
    }
    config.validate()?;
    let magnet = Magnet::new(config.magnet)?;
    let me_cap = config.me_capacitor()?;
    let vdd = config.electrical.vdd;
    let clock = config.clock;
    let sub = config.substeps()?;
    let dt = config.circuit_dt / sub as f64;

    let stream = PulseTrain {
        bits: bits.to_vec(),
        period: clock.period,
        high_time: clock.write_time(),
        vdd,
        rise: config.rise,
        t_start: 0.0,
    };
    let net = build_network(&config.wire, &config.electrical);
    let duration = clock.period * bits.len() as f64;
    let wire = transient_solve(&net, &stream, config.circuit_dt, duration)?;

    let circuit_per_cycle = (clock.period / config.circuit_dt).round() as usize;
    let write_c = (clock.write_frac * circuit_per_cycle as f64).round() as usize;
    let read_c = (clock.read_frac * circuit_per_cycle as f64).round() as usize;
    let reset_c = circuit_per_cycle - write_c - read_c;

    let swing = divider_estimate(
        config.electrical.c_s,
        config.wire.total_c(),
        config.electrical.c_l,
        vdd,
    );
    let sigma = thermal_sigma(&magnet, dt)?;
    let mut rng = trial_rng(config.seed, u64::MAX, 0);
    let cold = magnet.params.temperature == 0.0;
    let mut state = if cold { SpinState::canonical(-1.0) } else { SpinState::easy_axis(-1.0, 0.0) };

    let mut samples = Vec::with_capacity(wire.len());
    let mut cycles = Vec::with_capacity(bits.len());
    let mut ci = 0usize; // circuit grid index
    samples.push(LinkSample { t: 0.0, v_in: wire.v_source[0], v_me: wire.receiver_at(0.0), mx: state.m.x, v_node_m: 0.0, v_out: None });

    // Advance `n` circuit steps with the ME capacitor voltage given by `bias`.
    let mut advance = |state: &mut SpinState<f64>,
                       ci: &mut usize,
                       n: usize,
                       reset: bool,
                       read_m: bool,
                       target: Option<SwitchTarget>,
                       samples: &mut Vec<LinkSample>|
     -> Option<f64> {
        let t_phase = *ci as f64 * config.circuit_dt;
        let mut hit = None;
        for _ in 0..n {
            let tc = *ci as f64 * config.circuit_dt;
            for s in 0..sub {
                let t0 = tc + s as f64 * dt;
                let (v0, v1) = if reset {
                    (-vdd, -vdd)
                } else {
                    (wire.receiver_at(t0), wire.receiver_at(t0 + dt))
                };
                let thermal = crate::magnetodynamics::draw_thermal(sigma, &mut rng);
                *state = heun_step_driven(state, &magnet, v0, v1, dt, thermal);
                state.t = t0 + dt;
                if hit.is_none() {
                    if let Some(tg) = target {
                        if tg.reached(state.m.x) {
                            hit = Some(state.t - t_phase);
                        }
                    }
                }
            }
            *ci += 1;
            let t = *ci as f64 * config.circuit_dt;
            let v_node_m = if read_m {
                let r = mtj_resistance(state.m.x.clamp(-1.0, 1.0), &config.mtj).unwrap_or(config.mtj.r_ap());
                read_voltage(r, &config.mtj)
            } else {
                0.0
            };
            samples.push(LinkSample {
                t,
                v_in: wire.v_source[*ci],
                v_me: wire.receiver_at(t),
                mx: state.m.x,
                v_node_m,
                v_out: None,
            });
        }
        hit
    };

    for (k, &bit) in bits.iter().enumerate() {
        let c_start = ci;
        // write
        let switch_time = advance(&mut state, &mut ci, write_c, false, false, Some(SwitchTarget::Parallel), &mut samples);
        let t_now = ci as f64 * config.circuit_dt;
        if bit && switch_time.is_none() {
            return Err(phase_failure(k, "write did not switch the free layer", state.m.x, t_now));
        }
        if !bit && switch_time.is_some() {
            return Err(phase_failure(k, "free layer switched without a high input", state.m.x, t_now));
        }
        let wire_delay = if bit {
            Some(edge_delay(&wire, c_start, c_start + write_c, swing)?)
        } else {
            None
        };
        // read
        advance(&mut state, &mut ci, read_c, false, true, None, &mut samples);
        let r_dev = mtj_resistance(state.m.x.clamp(-1.0, 1.0), &config.mtj)?;
        let v_m = read_voltage(r_dev, &config.mtj);
        let sensed = sense(v_m, vdd);
        if let Some(last) = samples.last_mut() {
            last.v_out = Some(sensed);
        }
        // reset
        let reset_time = advance(&mut state, &mut ci, reset_c, true, false, Some(SwitchTarget::AntiParallel), &mut samples);
        if !SwitchTarget::AntiParallel.reached(state.m.x) {
            let t = ci as f64 * config.circuit_dt;
            return Err(phase_failure(k, "reset did not restore m_x <= -0.9", state.m.x, t));
        }
        cycles.push(CycleRecord {
            index: k,
            bit_in: bit,
            sensed,
            v_node_m: v_m,
            wire_delay,
            switch_time,
            reset_time,
            e_line: window_energy(&wire, c_start, ci),
            e_read: read_energy(r_dev, &config.mtj),
            e_reset: reset_energy(&me_cap, vdd),
        });
    }

    Ok(LinkTrace {
        samples,
        cycles,
        length_mm: config.wire.length_mm,
        period: clock.period,
        sense_latency: config.sense_latency,
    })
}

/// Source energy between circuit grid points `a` and `b`.
fn window_energy(w: &TransientResult<f64>, a: usize, b: usize) -> f64 {
    (a + 1..=b)
        .map(|k| {
            0.5 * (w.v_source[k - 1] * w.i_source[k - 1] + w.v_source[k] * w.i_source[k]) * w.dt
        })
        .sum()
}

/// Crossing of V_ME half way from its value at grid point `a` (the input
/// edge) to `settled`, searched up to grid point `b`, relative to `a`. The
/// floating island between C_S and C_L carries no net charge, so with the
/// input high the receiving end always settles at the divider level no
/// matter what residual earlier cycles left on the line.
fn edge_delay(w: &TransientResult<f64>, a: usize, b: usize, settled: f64) -> Result<f64> {
    let rx = |k: usize| w.nodes[k * w.n_nodes + w.n_nodes - 1];
    let target = 0.5 * (rx(a) + settled);
    for k in a + 1..=b {
        if rx(k) >= target {
            let f = (target - rx(k - 1)) / (rx(k) - rx(k - 1));
            return Ok(((k - 1 - a) as f64 + f) * w.dt);
        }
    }
    Err(Error::Measurement("receiving end never reached 50 % of its swing within the write phase".into()))
}

/// Per-bit energy normalized to wire length, fJ/bit/mm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub line: f64,
    pub read: f64,
    pub reset: f64,
    pub total: f64,
}

pub fn energy_per_bit(trace: &LinkTrace) -> Result<EnergyBreakdown> {
    if trace.cycles.is_empty() {
        return Err(Error::Measurement("trace holds no complete cycle".into()));
    }
    let scale = 1e15 / (trace.cycles.len() as f64 * trace.length_mm);
    let line = trace.cycles.iter().map(|c| c.e_line).sum::<f64>() * scale;
    let read = trace.cycles.iter().map(|c| c.e_read).sum::<f64>() * scale;
    let reset = trace.cycles.iter().map(|c| c.e_reset).sum::<f64>() * scale;
    Ok(EnergyBreakdown { line, read, reset, total: line + read + reset })
}

/// Input-edge-to-valid-output delay and its parts, averaged over the rising
/// input edges (every `1` bit). Seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelayBreakdown {
    pub wire: f64,
    pub switching: f64,
    pub sense: f64,
    pub total: f64,
    pub edges: usize,
}

pub fn propagation_delay(trace: &LinkTrace) -> Result<DelayBreakdown> {
    let edges: Vec<(f64, f64)> = trace
        .cycles
        .iter()
        .filter_map(|c| Some((c.wire_delay?, c.switch_time?)))
        .collect();
    if edges.is_empty() {
        return Err(Error::Measurement("no rising input edge (no 1 bit) in the trace".into()));
    }
    let n = edges.len() as f64;
    let wire = edges.iter().map(|e| e.0).sum::<f64>() / n;
    let switching = edges.iter().map(|e| e.1 - e.0).sum::<f64>() / n;
    let sense = trace.sense_latency;
    Ok(DelayBreakdown { wire, switching, sense, total: wire + switching + sense, edges: edges.len() })
}

/// Deterministic pattern in which a fraction `activity` of the bits are `1`,
/// spread as evenly as possible. With return-to-zero drive every `1` charges
/// the line once, so this is the line activity factor. 0.5 gives 0101...
pub fn activity_pattern(activity: f64, n_bits: usize) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&activity) {
        return Err(Error::Domain { name: "activity", value: activity, reason: "must lie in [0, 1]" });
    }
    Ok((0..n_bits)
        .map(|k| ((k + 1) as f64 * activity).floor() > (k as f64 * activity).floor())
        .collect())
}

pub fn random_pattern(n_bits: usize, seed: u64) -> Vec<bool> {
    let mut rng = trial_rng(seed, u64::MAX - 2, 0);
    (0..n_bits).map(|_| rng.random::<bool>()).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "full-swing CMOS")]
    FullSwing,
    #[serde(rename = "low-swing capacitive CMOS")]
    LowSwingCapacitive,
    #[serde(rename = "capacitive ME")]
    CapacitiveMe,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub method: Method,
    pub length_mm: f64,
    pub energy_fj_per_bit_per_mm: f64,
    pub delay_ns: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_breakdown: Option<EnergyBreakdown>,
}

/// Energy/delay of the three link designs on the configured wire. The ME
/// link is simulated over `n_bits` of a pattern with the baselines' activity.
pub fn compare_methods(
    config: &LinkConfig,
    repeater: &RepeaterParams<f64>,
    amplifier: &AmplifierParams<f64>,
    n_bits: usize,
) -> Result<Vec<MethodRow>> {
    let l = config.wire.length_mm;
    let fs = fullswing_baseline(&config.wire, repeater)?;
    let ls = lowswing_capacitive_baseline(&config.wire, &config.electrical, amplifier, config.circuit_dt)?;
    let bits = activity_pattern(repeater.activity, n_bits)?;
    let trace = simulate_link(config, &bits)?;
    let energy = energy_per_bit(&trace)?;
    let delay = propagation_delay(&trace)?;
    Ok(vec![
        MethodRow {
            method: Method::FullSwing,
            length_mm: l,
            energy_fj_per_bit_per_mm: fs.fj_per_bit_per_mm(),
            delay_ns: fs.delay_ns(),
            energy_breakdown: None,
        },
        MethodRow {
            method: Method::LowSwingCapacitive,
            length_mm: l,
            energy_fj_per_bit_per_mm: ls.fj_per_bit_per_mm(),
            delay_ns: ls.delay_ns(),
            energy_breakdown: None,
        },
        MethodRow {
            method: Method::CapacitiveMe,
            length_mm: l,
            energy_fj_per_bit_per_mm: energy.total,
            delay_ns: delay.total * 1e9,
            energy_breakdown: Some(energy),
        },
    ])
}

/// CSV with header `time_ps,v_in_mv,v_me_mv,mx,v_node_m_mv,v_out_bit`. The
/// output column shows the latched inverter output, which changes at each
/// read-phase sampling instant.
pub fn write_link_csv<W: Write>(mut out: W, trace: &LinkTrace) -> std::io::Result<()> {
    writeln!(out, "time_ps,v_in_mv,v_me_mv,mx,v_node_m_mv,v_out_bit")?;
    let mut latched = false;
    for s in &trace.samples {
        if let Some(b) = s.v_out {
            latched = b;
        }
        writeln!(
            out,
            "{:.3},{:.9e},{:.9e},{:.9e},{:.9e},{}",
            s.t * 1e12,
            s.v_in * 1e3,
            s.v_me * 1e3,
            s.mx,
            s.v_node_m * 1e3,
            latched as u8
        )?;
    }
    Ok(())
}

/// Convenience for the nominal 5 mm link wire delay, used by reports.
pub fn wire_delay(config: &LinkConfig) -> Result<f64> {
    capacitive_wire_delay(&config.wire, &config.electrical, config.circuit_dt)
}
