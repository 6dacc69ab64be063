//! Run configuration: one TOML document with a section per subsystem.
//!
//! Loading order is shipped defaults, then an optional user file (which may
//! omit any key), then `--set section.key=value` overrides and dedicated
//! command-line flags. Unknown sections or keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use meic::interconnect::{AmplifierParams, LinkElectrical, RepeaterParams, WireParams};
use meic::link_sim::{ClockParams, LinkConfig};
use meic::magnetodynamics::MagnetParams;
use meic::memtj::{geometric_mean_reference, MeCapacitor, MtjParams};

use crate::CliError;

/// Text of `config/defaults.toml`, compiled in so the binary is self-contained.
pub const DEFAULTS_TOML: &str = include_str!("../../../config/defaults.toml");

/// Minimum pi-segment count accepted for the wire ladder.
pub const MIN_SEGMENTS: usize = 10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeviceSection {
    pub length_nm: f64,
    pub width_nm: f64,
    pub thickness_nm: f64,
    pub ms_a_per_m: f64,
    pub alpha: f64,
    pub gamma_rad_per_s_per_t: f64,
    pub ki_j_per_m2: f64,
    pub t_me_nm: f64,
    pub alpha_me_s_per_m: f64,
    pub eps_r_me: f64,
    pub temperature_k: f64,
}

impl Default for DeviceSection {
    fn default() -> Self {
        let m = MagnetParams::<f64>::nominal();
        Self {
            length_nm: 112.5,
            width_nm: 45.0,
            thickness_nm: 2.5,
            ms_a_per_m: m.ms,
            alpha: m.alpha,
            gamma_rad_per_s_per_t: m.gamma,
            ki_j_per_m2: m.ki,
            t_me_nm: 5.0,
            alpha_me_s_per_m: m.alpha_me,
            eps_r_me: m.eps_r_me,
            temperature_k: m.temperature,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub dt_ps: f64,
    pub circuit_dt_ps: f64,
    pub window_ns: f64,
    pub seed: u64,
    /// Worker threads for Monte Carlo runs; 0 picks one per core.
    pub threads: usize,
}

impl Default for SimSection {
    fn default() -> Self {
        Self { dt_ps: 0.1, circuit_dt_ps: 1.0, window_ns: 2.0, seed: 0, threads: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MtjSection {
    pub r_p_ohm: f64,
    pub tmr: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_ref_ohm: Option<f64>,
    pub v_read: f64,
    pub t_read_ns: f64,
}

impl Default for MtjSection {
    fn default() -> Self {
        Self { r_p_ohm: 10e3, tmr: 1.0, r_ref_ohm: None, v_read: 1.0, t_read_ns: 0.625 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WireSection {
    pub length_mm: f64,
    pub r_per_mm_ohm: f64,
    pub c_per_mm_ff_per_um: f64,
    pub n_segments: usize,
}

impl Default for WireSection {
    fn default() -> Self {
        Self { length_mm: 5.0, r_per_mm_ohm: 50.0, c_per_mm_ff_per_um: 0.25, n_segments: 50 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub cs_ratio: f64,
    pub r_driver_ohm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_l_ff: Option<f64>,
    pub sense_latency_ps: f64,
}

impl Default for LinkSection {
    fn default() -> Self {
        Self { cs_ratio: 0.5, r_driver_ohm: 580.0, c_l_ff: None, sense_latency_ps: 20.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSection {
    pub vdd: f64,
    pub rise_ps: f64,
}

impl Default for DriveSection {
    fn default() -> Self {
        Self { vdd: 1.0, rise_ps: 10.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClockSection {
    pub period_ns: f64,
    pub write_frac: f64,
    pub read_frac: f64,
    pub reset_frac: f64,
}

impl Default for ClockSection {
    fn default() -> Self {
        let c = ClockParams::default();
        Self {
            period_ns: c.period * 1e9,
            write_frac: c.write_frac,
            read_frac: c.read_frac,
            reset_frac: c.reset_frac,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineSection {
    pub activity: f64,
    pub repeater_r0_ohm: f64,
    pub repeater_c0_ff: f64,
    pub repeater_cp_ff: f64,
    pub repeater_size_scale: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub repeater_stages: Option<usize>,
    pub amp_i_bias_ua: f64,
    pub amp_t_bit_ns: f64,
    pub amp_latency_ps: f64,
}

impl Default for BaselineSection {
    fn default() -> Self {
        let r = RepeaterParams::<f64>::default();
        Self {
            activity: r.activity,
            repeater_r0_ohm: r.r0,
            repeater_c0_ff: 1.0,
            repeater_cp_ff: 1.0,
            repeater_size_scale: r.size_scale,
            repeater_stages: r.stages,
            amp_i_bias_ua: 45.0,
            amp_t_bit_ns: 1.0,
            amp_latency_ps: 20.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub trajectory_v_me: f64,
    pub trajectory_duration_ns: f64,
    pub sweep_v_min: f64,
    pub sweep_v_max: f64,
    pub sweep_step: f64,
    pub sweep_trials: usize,
    pub link_pattern: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub link_cycles: Option<usize>,
    pub compare_lengths_mm: Vec<f64>,
    pub compare_bits: usize,
    pub variation_spread: f64,
    pub variation_trials: usize,
    pub convergence_v_me: f64,
    pub convergence_dt_ps: Vec<f64>,
    pub convergence_duration_ns: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            trajectory_v_me: 0.2,
            trajectory_duration_ns: 1.0,
            sweep_v_min: 0.05,
            sweep_v_max: 0.25,
            sweep_step: 0.025,
            sweep_trials: 1000,
            link_pattern: "10110".into(),
            link_cycles: None,
            compare_lengths_mm: vec![5.0, 10.0],
            compare_bits: 16,
            variation_spread: 0.2,
            variation_trials: 1000,
            convergence_v_me: 0.2,
            convergence_dt_ps: vec![0.4, 0.2, 0.1, 0.05],
            convergence_duration_ns: 0.5,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub device: DeviceSection,
    pub sim: SimSection,
    pub mtj: MtjSection,
    pub wire: WireSection,
    pub link: LinkSection,
    pub drive: DriveSection,
    pub clock: ClockSection,
    pub baseline: BaselineSection,
    pub run: RunSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Applies one `section.key=value` override. The value is read as a TOML
    /// literal, falling back to a bare string.
    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let usage = |msg: String| CliError::Usage(format!("--set {assignment}: {msg}"));
        let (path, raw) = assignment
            .split_once('=')
            .ok_or_else(|| usage("expected section.key=value".into()))?;
        let (section, key) = path
            .trim()
            .split_once('.')
            .ok_or_else(|| usage("key must be written as section.key".into()))?;
        let raw = raw.trim();
        let value = match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
            Ok(mut t) => t.remove("v").expect("parsed key"),
            Err(_) => toml::Value::String(raw.to_string()),
        };
        let mut doc = toml::Table::try_from(&*self).map_err(|e| usage(e.to_string()))?;
        let table = doc
            .entry(section.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| usage(format!("`{section}` is not a section")))?;
        table.insert(key.to_string(), value);
        *self = toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| usage(e.message().to_string()))?;
        Ok(())
    }

    pub fn magnet(&self) -> MagnetParams<f64> {
        let d = &self.device;
        MagnetParams {
            length: d.length_nm * 1e-9,
            width: d.width_nm * 1e-9,
            thickness: d.thickness_nm * 1e-9,
            ms: d.ms_a_per_m,
            alpha: d.alpha,
            gamma: d.gamma_rad_per_s_per_t,
            ki: d.ki_j_per_m2,
            t_me: d.t_me_nm * 1e-9,
            alpha_me: d.alpha_me_s_per_m,
            eps_r_me: d.eps_r_me,
            temperature: d.temperature_k,
        }
    }

    pub fn mtj(&self) -> MtjParams<f64> {
        let m = &self.mtj;
        MtjParams {
            r_p: m.r_p_ohm,
            tmr: m.tmr,
            r_ref: m.r_ref_ohm.unwrap_or_else(|| geometric_mean_reference(m.r_p_ohm, m.tmr)),
            v_read: m.v_read,
            t_read: m.t_read_ns * 1e-9,
        }
    }

    /// Wire of the configured length.
    pub fn wire(&self) -> WireParams<f64> {
        self.wire_at(self.wire.length_mm)
    }

    pub fn wire_at(&self, length_mm: f64) -> WireParams<f64> {
        WireParams {
            length_mm,
            r_per_mm: self.wire.r_per_mm_ohm,
            // fF/um is numerically pF/mm.
            c_per_mm: self.wire.c_per_mm_ff_per_um * 1e-12,
            n_segments: self.wire.n_segments,
        }
    }

    pub fn clock(&self) -> ClockParams {
        ClockParams {
            period: self.clock.period_ns * 1e-9,
            write_frac: self.clock.write_frac,
            read_frac: self.clock.read_frac,
            reset_frac: self.clock.reset_frac,
        }
    }

    pub fn link_at(&self, length_mm: f64) -> Result<LinkConfig, CliError> {
        let magnet = self.magnet();
        let wire = self.wire_at(length_mm);
        let c_l = match self.link.c_l_ff {
            Some(ff) => ff * 1e-15,
            None => MeCapacitor::of_magnet(&magnet)?.capacitance,
        };
        Ok(LinkConfig {
            magnet,
            mtj: self.mtj(),
            wire,
            electrical: LinkElectrical::capacitive(
                &wire,
                self.link.cs_ratio,
                c_l,
                self.link.r_driver_ohm,
                self.drive.vdd,
            ),
            clock: self.clock(),
            rise: self.drive.rise_ps * 1e-12,
            llg_dt: self.sim.dt_ps * 1e-12,
            circuit_dt: self.sim.circuit_dt_ps * 1e-12,
            sense_latency: self.link.sense_latency_ps * 1e-12,
            seed: self.sim.seed,
        })
    }

    pub fn link(&self) -> Result<LinkConfig, CliError> {
        self.link_at(self.wire.length_mm)
    }

    pub fn repeater(&self) -> RepeaterParams<f64> {
        let b = &self.baseline;
        RepeaterParams {
            r0: b.repeater_r0_ohm,
            c0: b.repeater_c0_ff * 1e-15,
            cp: b.repeater_cp_ff * 1e-15,
            size_scale: b.repeater_size_scale,
            stages: b.repeater_stages,
            activity: b.activity,
            vdd: self.drive.vdd,
        }
    }

    pub fn amplifier(&self) -> AmplifierParams<f64> {
        let b = &self.baseline;
        AmplifierParams {
            i_bias: b.amp_i_bias_ua * 1e-6,
            t_bit: b.amp_t_bit_ns * 1e-9,
            latency: b.amp_latency_ps * 1e-12,
            activity: b.activity,
        }
    }

    /// Checks every physical value before any simulation starts.
    pub fn validate(&self) -> Result<(), CliError> {
        self.magnet().validate()?;
        self.mtj().validate()?;
        let wire = self.wire();
        wire.validate()?;
        if wire.n_segments < MIN_SEGMENTS {
            return Err(CliError::Usage(format!(
                "wire.n_segments = {} is below the minimum of {MIN_SEGMENTS}",
                wire.n_segments
            )));
        }
        if !(self.link.cs_ratio > 0.0) {
            return Err(CliError::Usage("link.cs_ratio must be positive".into()));
        }
        if !(self.sim.window_ns > 0.0) {
            return Err(CliError::Usage("sim.window_ns must be positive".into()));
        }
        let b = &self.baseline;
        if !(b.activity > 0.0 && b.activity <= 1.0) {
            return Err(CliError::Usage("baseline.activity must lie in (0, 1]".into()));
        }
        for (name, v) in [
            ("baseline.repeater_r0_ohm", b.repeater_r0_ohm),
            ("baseline.repeater_c0_ff", b.repeater_c0_ff),
            ("baseline.repeater_size_scale", b.repeater_size_scale),
            ("baseline.amp_t_bit_ns", b.amp_t_bit_ns),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be positive")));
            }
        }
        for (name, v) in [
            ("baseline.repeater_cp_ff", b.repeater_cp_ff),
            ("baseline.amp_i_bias_ua", b.amp_i_bias_ua),
            ("baseline.amp_latency_ps", b.amp_latency_ps),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(CliError::Usage(format!("{name} must be >= 0")));
            }
        }
        self.link()?.validate()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_file_equals_builtin_defaults() {
        let parsed = RunConfig::from_toml(DEFAULTS_TOML).unwrap();
        assert_eq!(parsed, RunConfig::default());
        parsed.validate().unwrap();
    }

    #[test]
    fn builtin_defaults_match_library_nominals() {
        let cfg = RunConfig::default();
        let m = cfg.magnet();
        let n = MagnetParams::<f64>::nominal();
        for (a, b) in [(m.length, n.length), (m.width, n.width), (m.thickness, n.thickness), (m.t_me, n.t_me)] {
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
        assert_eq!(cfg.mtj(), MtjParams::nominal());
        assert_eq!(cfg.wire(), WireParams::global_cu(5.0));
        let link = cfg.link().unwrap();
        let nominal = LinkConfig::nominal(5.0);
        assert!((link.electrical.c_l - nominal.electrical.c_l).abs() < 1e-30);
        assert_eq!(link.electrical.r_driver, nominal.electrical.r_driver);
        assert_eq!(cfg.repeater(), RepeaterParams::default());
        let amp = cfg.amplifier();
        let def = AmplifierParams::<f64>::default();
        assert!((amp.i_bias - def.i_bias).abs() < 1e-18 && (amp.latency - def.latency).abs() < 1e-24);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let cfg = RunConfig::from_toml("[wire]\nlength_mm = 10.0\n").unwrap();
        assert_eq!(cfg.wire.length_mm, 10.0);
        assert_eq!(cfg.device, DeviceSection::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("[wire]\nlenght_mm = 10.0\n").is_err());
        assert!(RunConfig::from_toml("[wires]\nlength_mm = 10.0\n").is_err());
    }

    #[test]
    fn set_overrides() {
        let mut cfg = RunConfig::default();
        cfg.set("wire.length_mm=10").unwrap();
        assert_eq!(cfg.wire.length_mm, 10.0);
        cfg.set("mtj.r_ref_ohm = 15000").unwrap();
        assert_eq!(cfg.mtj.r_ref_ohm, Some(15000.0));
        cfg.set("run.link_pattern=0101").unwrap();
        assert_eq!(cfg.run.link_pattern, "0101");
        cfg.set("run.compare_lengths_mm=[1.0, 2.5]").unwrap();
        assert_eq!(cfg.run.compare_lengths_mm, vec![1.0, 2.5]);
        assert!(cfg.set("wire.bogus=1").is_err());
        assert!(cfg.set("nosection=1").is_err());
        assert!(cfg.set("wire.n_segments=abc").is_err());
    }

    #[test]
    fn validation_catches_bad_values() {
        let mut cfg = RunConfig::default();
        cfg.wire.n_segments = 5;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.clock.period_ns = 1.0;
        assert!(cfg.validate().is_err());
        let mut cfg = RunConfig::default();
        cfg.device.alpha = 1.5;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn both_table_readings_of_ms_load() {
        for ms in ["1.257e3", "1.0e6"] {
            let cfg = RunConfig::from_toml(&format!("[device]\nms_a_per_m = {ms}\n")).unwrap();
            cfg.magnet().validate().unwrap();
        }
    }
}
