//! Analytical stand-ins for the two CMOS reference links: a repeated
//! full-swing line and a capacitively driven differential line with a biased
//! sense amplifier. Default parameters are calibrated once against the 5 mm
//! reference row (full swing ~157 fJ/bit/mm at ~0.27 ns, low swing ~92
//! fJ/bit/mm); longer lines are predictions.

use serde::{Deserialize, Serialize};

use super::network::build_network;
use super::transient::{delay_50pct, transient_solve};
use super::waveform::Edge;
use super::{LinkElectrical, WireParams};
use crate::error::{ensure_positive, Result};
use crate::scalar::Scalar;

/// 50 % delay coefficient of a lumped RC stage.
const LUMPED_50: f64 = 0.69;
/// 50 % delay coefficient of a distributed RC line.
const DISTRIBUTED_50: f64 = 0.38;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeaterParams<T> {
    /// Output resistance of a unit inverter, ohm.
    pub r0: T,
    /// Input capacitance of a unit inverter, F.
    pub c0: T,
    /// Output (diffusion) capacitance of a unit inverter, F.
    pub cp: T,
    /// Repeater size as a fraction of the delay-optimal size.
    pub size_scale: T,
    /// Number of driving stages (driver plus repeaters); `None` picks the delay-optimal count.
    pub stages: Option<usize>,
    /// Probability of a 0 -> 1 transition per bit.
    pub activity: T,
    pub vdd: T,
}

impl<T: Scalar> Default for RepeaterParams<T> {
    fn default() -> Self {
        Self {
            r0: T::lit(10.71e3),
            c0: T::lit(1e-15),
            cp: T::lit(1e-15),
            size_scale: T::lit(0.2291),
            stages: None,
            activity: T::lit(0.5),
            vdd: T::one(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplifierParams<T> {
    /// Static bias current of the differential sense amplifier, A.
    pub i_bias: T,
    /// Bit period over which the bias current flows, s.
    pub t_bit: T,
    /// Amplifier resolution latency added to the wire delay, s.
    pub latency: T,
    /// Probability of a 0 -> 1 transition per bit.
    pub activity: T,
}

impl<T: Scalar> Default for AmplifierParams<T> {
    fn default() -> Self {
        Self {
            i_bias: T::lit(45e-6),
            t_bit: T::lit(1e-9),
            latency: T::lit(20e-12),
            activity: T::lit(0.5),
        }
    }
}

/// Energy and delay of one link design for a given wire.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult<T> {
    pub length_mm: T,
    /// J per bit.
    pub energy_per_bit: T,
    /// s.
    pub delay: T,
    /// Stage count used (full swing only; 1 otherwise).
    pub stages: usize,
}

impl<T: Scalar> BaselineResult<T> {
    pub fn fj_per_bit_per_mm(&self) -> T {
        self.energy_per_bit * T::lit(1e15) / self.length_mm
    }

    pub fn delay_ns(&self) -> T {
        self.delay * T::lit(1e9)
    }
}

/// Repeated full-swing line using the classical stage-delay expression
/// `0.69 (R0/h)(h Cp + Cw/k + h C0) + (Rw/k)(0.38 Cw/k + 0.69 h C0)` per stage.
pub fn fullswing_baseline<T: Scalar>(wire: &WireParams<T>, rep: &RepeaterParams<T>) -> Result<BaselineResult<T>> {
    wire.validate()?;
    ensure_positive("wire.r_per_mm", wire.r_per_mm.to_f64_lossy())?;
    ensure_positive("repeater.r0", rep.r0.to_f64_lossy())?;
    ensure_positive("repeater.c0", rep.c0.to_f64_lossy())?;
    ensure_positive("repeater.size_scale", rep.size_scale.to_f64_lossy())?;
    let rw = wire.total_r();
    let cw = wire.total_c();
    let l50 = T::lit(LUMPED_50);
    let d50 = T::lit(DISTRIBUTED_50);

    let k_opt = (d50 * rw * cw / (l50 * rep.r0 * (rep.c0 + rep.cp))).sqrt();
    let k = rep
        .stages
        .unwrap_or_else(|| k_opt.round().to_usize().unwrap_or(1))
        .max(1);
    let h = rep.size_scale * (rep.r0 * cw / (rw * rep.c0)).sqrt();
    let kt = T::from_usize(k).unwrap();

    let stage = l50 * (rep.r0 / h) * (h * rep.cp + cw / kt + h * rep.c0)
        + (rw / kt) * (d50 * cw / kt + l50 * h * rep.c0);
    let switched = cw + kt * h * (rep.c0 + rep.cp);
    Ok(BaselineResult {
        length_mm: wire.length_mm,
        energy_per_bit: rep.activity * switched * rep.vdd * rep.vdd,
        delay: kt * stage,
        stages: k,
    })
}

/// 50 % delay of the capacitively driven line for a full-swing input step.
pub fn capacitive_wire_delay<T: Scalar>(wire: &WireParams<T>, elec: &LinkElectrical<T>, dt: T) -> Result<T> {
    wire.validate()?;
    elec.validate()?;
    let net = build_network(wire, elec);
    let tau = elec.r_driver * elec.effective_capacitance(wire) + wire.total_r() * wire.total_c();
    let duration = (tau * T::lit(15.0)).max(T::lit(1e-9));
    let res = transient_solve(&net, &Edge::step(T::zero(), elec.vdd), dt, duration)?;
    delay_50pct(&res, T::zero())
}

/// Differential capacitively driven line: two wires at the divided swing plus
/// the amplifier's static current for one bit period.
pub fn lowswing_capacitive_baseline<T: Scalar>(
    wire: &WireParams<T>,
    elec: &LinkElectrical<T>,
    amp: &AmplifierParams<T>,
    dt: T,
) -> Result<BaselineResult<T>> {
    let delay = capacitive_wire_delay(wire, elec, dt)? + amp.latency;
    let vdd = elec.vdd;
    let line = T::lit(2.0) * amp.activity * elec.effective_capacitance(wire) * vdd * vdd;
    let stat = amp.i_bias * vdd * amp.t_bit;
    Ok(BaselineResult { length_mm: wire.length_mm, energy_per_bit: line + stat, delay, stages: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_stage_reduces_to_driver_elmore() {
        let wire = WireParams::global_cu(0.5_f64);
        let rep = RepeaterParams { stages: Some(1), ..Default::default() };
        let r = fullswing_baseline(&wire, &rep).unwrap();
        let h = rep.size_scale * (rep.r0 * wire.total_c() / (wire.total_r() * rep.c0)).sqrt();
        let (rd, cw, rw, cl) = (rep.r0 / h, wire.total_c(), wire.total_r(), h * rep.c0);
        let elmore = 0.69 * rd * (h * rep.cp + cw + cl) + rw * (0.38 * cw + 0.69 * cl);
        assert!((r.delay - elmore).abs() < 1e-9 * elmore);
        assert_eq!(r.stages, 1);
    }

    #[test]
    fn zero_bias_is_pure_line_loss() {
        let wire = WireParams::global_cu(5.0_f64);
        let elec = LinkElectrical::capacitive(&wire, 0.5, 0.0, 150.0, 1.0);
        let amp = AmplifierParams { i_bias: 0.0, ..Default::default() };
        let r = lowswing_capacitive_baseline(&wire, &elec, &amp, 1e-12).unwrap();
        let want = 2.0 * 0.5 * elec.effective_capacitance(&wire);
        assert!((r.energy_per_bit - want).abs() < 1e-9 * want);
    }

    #[test]
    fn rejects_zero_resistance_wire() {
        let wire = WireParams { r_per_mm: 0.0, ..WireParams::global_cu(5.0_f64) };
        assert!(fullswing_baseline(&wire, &RepeaterParams::default()).is_err());
    }
}
