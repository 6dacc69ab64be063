//! Electrical half of the link: series capacitor, distributed RC wire and
//! receiver load, a trapezoidal transient solver with delay/energy metrics,
//! and behavioral CMOS reference links.

mod baselines;
mod network;
mod transient;
mod waveform;

pub use baselines::{
    capacitive_wire_delay, fullswing_baseline, lowswing_capacitive_baseline, AmplifierParams, BaselineResult, RepeaterParams,
};
pub use network::{build_network, RcNetwork};
pub use transient::{
    delay_50pct, energy_balance, source_energy, transient_solve, write_waveform_csv, EnergyBalance,
    TransientResult,
};
pub use waveform::{BitStream, Edge, PulseTrain, Waveform};

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};
use crate::scalar::Scalar;

/// Unit-length wire description. Lengths in mm, `c_per_mm` in F/mm.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WireParams<T> {
    pub length_mm: T,
    pub r_per_mm: T,
    pub c_per_mm: T,
    pub n_segments: usize,
}

impl<T: Scalar> WireParams<T> {
    /// Global Cu line: 50 ohm/mm and 0.25 fF/um, 50 pi-segments.
    pub fn global_cu(length_mm: T) -> Self {
        Self {
            length_mm,
            r_per_mm: T::lit(50.0),
            c_per_mm: T::lit(0.25e-12),
            n_segments: 50,
        }
    }

    pub fn total_r(&self) -> T {
        self.r_per_mm * self.length_mm
    }

    pub fn total_c(&self) -> T {
        self.c_per_mm * self.length_mm
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("wire.length_mm", self.length_mm.to_f64_lossy())?;
        ensure_positive("wire.c_per_mm", self.c_per_mm.to_f64_lossy())?;
        let r = self.r_per_mm.to_f64_lossy();
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::Domain { name: "wire.r_per_mm", value: r, reason: "must be >= 0" });
        }
        if self.n_segments == 0 {
            return Err(Error::Domain {
                name: "wire.n_segments",
                value: 0.0,
                reason: "need at least one segment",
            });
        }
        Ok(())
    }
}

/// Lumped elements around the wire.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkElectrical<T> {
    /// Series coupling capacitor C_S, F.
    pub c_s: T,
    /// Receiver load C_L (ME capacitor plus any input load), F.
    pub c_l: T,
    /// Driver output resistance, ohm. Zero means an ideal source.
    pub r_driver: T,
    pub vdd: T,
}

impl<T: Scalar> LinkElectrical<T> {
    /// C_S = `cs_ratio` * C_W for the given wire.
    pub fn capacitive(wire: &WireParams<T>, cs_ratio: T, c_l: T, r_driver: T, vdd: T) -> Self {
        Self { c_s: cs_ratio * wire.total_c(), c_l, r_driver, vdd }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("link.c_s", self.c_s.to_f64_lossy())?;
        ensure_positive("drive.vdd", self.vdd.to_f64_lossy())?;
        for (name, v) in [("link.c_l", self.c_l), ("link.r_driver", self.r_driver)] {
            let v = v.to_f64_lossy();
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Domain { name, value: v, reason: "must be >= 0" });
            }
        }
        Ok(())
    }

    /// Series combination C_S (C_W + C_L) / (C_S + C_W + C_L) seen by the driver.
    pub fn effective_capacitance(&self, wire: &WireParams<T>) -> T {
        let shunt = wire.total_c() + self.c_l;
        self.c_s * shunt / (self.c_s + shunt)
    }
}

/// Settled receiving-end voltage of the capacitive divider.
pub fn divider_estimate<T: Scalar>(c_s: T, c_w: T, c_l: T, v_in: T) -> T {
    v_in * c_s / (c_s + c_w + c_l)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divider_examples() {
        let cw = 1.25e-12_f64;
        assert!((divider_estimate(cw / 2.0, cw, 0.0, 1.0) - 1.0 / 3.0).abs() < 1e-12);
        assert!((divider_estimate(1.0, 1.0, 1.0, 0.9_f64) - 0.3).abs() < 1e-12);
        assert!((divider_estimate(1e6, 1e-12, 1e-15, 1.0_f64) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn five_mm_totals() {
        let w = WireParams::<f64>::global_cu(5.0);
        assert!((w.total_r() - 250.0).abs() < 1e-9);
        assert!((w.total_c() - 1.25e-12).abs() < 1e-24);
    }

    #[test]
    fn effective_capacitance_five_mm() {
        let w = WireParams::<f64>::global_cu(5.0);
        let e = LinkElectrical::capacitive(&w, 0.5, 0.0, 100.0, 1.0);
        // 0.625 * 1.25 / 1.875 pF
        assert!((e.effective_capacitance(&w) - 0.416_666_666_666_666_7e-12).abs() < 1e-24);
    }

    #[test]
    fn validation() {
        let mut w = WireParams::<f64>::global_cu(5.0);
        assert!(w.validate().is_ok());
        w.n_segments = 0;
        assert!(w.validate().is_err());
        let e = LinkElectrical { c_s: 0.0, c_l: 0.0, r_driver: 0.0, vdd: 1.0_f64 };
        assert!(e.validate().is_err());
    }
}
