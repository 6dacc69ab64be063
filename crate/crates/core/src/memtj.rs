//! Behavioral ME-MTJ receiver: capacitive write port, orientation-dependent
//! junction resistance, resistive-divider read against a reference MTJ and
//! the read/reset energy bookkeeping.

use serde::{Deserialize, Serialize};

use crate::constants::EPS0;
use crate::error::{ensure_positive, Error, Result};
use crate::magnetodynamics::MagnetParams;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MtjParams<T> {
    /// Parallel-state resistance, ohm.
    pub r_p: T,
    /// Tunnel magnetoresistance ratio; R_AP = r_p (1 + tmr).
    pub tmr: T,
    /// Reference MTJ between V_Read and node M, ohm.
    pub r_ref: T,
    /// Read supply, V.
    pub v_read: T,
    /// Read window, s.
    pub t_read: T,
}

impl<T: Scalar> MtjParams<T> {
    /// 10 kOhm / 100 % TMR junction, reference at the geometric mean, 1 V read
    /// over a 625 ps window (one read phase of the default 2.5 ns clock).
    pub fn nominal() -> Self {
        let r_p = T::lit(10e3);
        let tmr = T::one();
        Self {
            r_p,
            tmr,
            r_ref: geometric_mean_reference(r_p, tmr),
            v_read: T::one(),
            t_read: T::lit(625e-12),
        }
    }

    pub fn r_ap(&self) -> T {
        self.r_p * (T::one() + self.tmr)
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("mtj.r_p", self.r_p.to_f64_lossy())?;
        ensure_positive("mtj.tmr", self.tmr.to_f64_lossy())?;
        ensure_positive("mtj.t_read", self.t_read.to_f64_lossy())?;
        let v = self.v_read.to_f64_lossy();
        if !(v >= 0.0 && v.is_finite()) {
            return Err(Error::Domain { name: "mtj.v_read", value: v, reason: "must be >= 0" });
        }
        if !(self.r_ref > self.r_p && self.r_ref < self.r_ap()) {
            return Err(Error::Domain {
                name: "mtj.r_ref",
                value: self.r_ref.to_f64_lossy(),
                reason: "reference must lie strictly between R_P and R_AP",
            });
        }
        Ok(())
    }
}

/// sqrt(R_P R_AP): the reference that balances the two read margins.
pub fn geometric_mean_reference<T: Scalar>(r_p: T, tmr: T) -> T {
    (r_p * r_p * (T::one() + tmr)).sqrt()
}

/// Metal / ME-oxide / free-layer parallel-plate capacitor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeCapacitor<T> {
    pub area: T,
    pub t_me: T,
    pub eps_r: T,
    pub capacitance: T,
}

impl<T: Scalar> MeCapacitor<T> {
    pub fn new(area: T, t_me: T, eps_r: T) -> Result<Self> {
        let capacitance = me_capacitance(area, t_me, eps_r)?;
        Ok(Self { area, t_me, eps_r, capacitance })
    }

    pub fn of_magnet(p: &MagnetParams<T>) -> Result<Self> {
        Self::new(p.length * p.width, p.t_me, p.eps_r_me)
    }
}

/// eps0 eps_r A / t_ME, farads.
pub fn me_capacitance<T: Scalar>(area: T, t_me: T, eps_r: T) -> Result<T> {
    ensure_positive("me_cap.area", area.to_f64_lossy())?;
    ensure_positive("me_cap.t_me", t_me.to_f64_lossy())?;
    ensure_positive("me_cap.eps_r", eps_r.to_f64_lossy())?;
    Ok(T::lit(EPS0) * eps_r * area / t_me)
}

/// Junction resistance for in-plane component `m_x`, interpolating the
/// conductance linearly between the AP (m_x = -1) and P (m_x = +1) states.
pub fn mtj_resistance<T: Scalar>(m_x: T, params: &MtjParams<T>) -> Result<T> {
    if !(m_x.abs() <= T::one()) {
        return Err(Error::Domain {
            name: "m_x",
            value: m_x.to_f64_lossy(),
            reason: "must lie in [-1, 1]",
        });
    }
    let half = T::lit(0.5);
    let g_p = params.r_p.recip();
    let g_ap = params.r_ap().recip();
    let g = g_p * (T::one() + m_x) * half + g_ap * (T::one() - m_x) * half;
    Ok(g.recip())
}

/// Voltage at node M: reference from V_Read to M, device from M to ground.
pub fn read_voltage<T: Scalar>(r_device: T, params: &MtjParams<T>) -> T {
    params.v_read * r_device / (r_device + params.r_ref)
}

/// Clocked comparator at vdd/2 followed by the output inverter. A P-state
/// device pulls node M low, giving output 1. A tie reads as 0.
pub fn sense<T: Scalar>(v_node: T, vdd: T) -> bool {
    v_node < vdd * T::lit(0.5)
}

/// Static divider dissipation over the read window, joules.
pub fn read_energy<T: Scalar>(r_device: T, params: &MtjParams<T>) -> T {
    params.v_read * params.v_read / (r_device + params.r_ref) * params.t_read
}

/// One full-swing charge of the ME capacitor per cycle, joules.
pub fn reset_energy<T: Scalar>(me_cap: &MeCapacitor<T>, vdd: T) -> T {
    me_cap.capacitance * vdd * vdd
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> MtjParams<f64> {
        MtjParams { r_p: 10e3, tmr: 1.0, r_ref: 14.14e3, v_read: 1.0, t_read: 0.5e-9 }
    }

    #[test]
    fn capacitance_scaling() {
        let c: f64 = me_capacitance(1e-15, 5e-9, 50.0).unwrap();
        assert!((me_capacitance(2e-15, 5e-9, 50.0).unwrap() / c - 2.0).abs() < 1e-12);
        assert!((me_capacitance(1e-15, 10e-9, 50.0).unwrap() / c - 0.5).abs() < 1e-12);
    }

    #[test]
    fn capacitance_of_nominal_device() {
        let cap = MeCapacitor::of_magnet(&MagnetParams::<f64>::nominal()).unwrap();
        // 8.8541878128e-12 * 50 * 112.5e-9 * 45e-9 / 5e-9
        assert!((cap.capacitance / 4.482_432_580_23e-16 - 1.0).abs() < 1e-9);
        assert!(cap.capacitance < 1.25e-12 * 1e-3);
    }

    #[test]
    fn capacitance_rejects_bad_input() {
        assert!(me_capacitance(0.0, 5e-9, 50.0).is_err());
        assert!(me_capacitance(1e-15, -5e-9, 50.0).is_err());
    }

    #[test]
    fn resistance_endpoints_and_midpoint() {
        let p = p();
        assert_eq!(mtj_resistance(1.0, &p).unwrap(), 10e3);
        assert!((mtj_resistance(-1.0, &p).unwrap() - 20e3).abs() < 1e-9);
        // 2 / (1/10k + 1/20k)
        assert!((mtj_resistance(0.0, &p).unwrap() - 13_333.333_333_333_334).abs() < 1e-6);
        assert!(mtj_resistance(1.01, &p).is_err());
    }

    #[test]
    fn divider_values() {
        let p = p();
        assert!((read_voltage(p.r_ref, &p) - 0.5).abs() < 1e-15);
        assert!((read_voltage(10e3, &p) - 10.0 / 24.14).abs() < 1e-12);
        assert!((read_voltage(20e3, &p) - 20.0 / 34.14).abs() < 1e-12);
    }

    #[test]
    fn sense_convention() {
        assert!(sense(0.414, 1.0));
        assert!(!sense(0.586, 1.0));
        assert!(!sense(0.5, 1.0));
    }

    #[test]
    fn energies() {
        let p = p();
        // 1 V^2 / 24.14 kOhm * 0.5 ns = 20.7 fJ
        assert!((read_energy(10e3, &p) - 2.071_251_035_625_518e-14).abs() < 1e-24);
        let zero = MtjParams { v_read: 0.0, ..p };
        assert_eq!(read_energy(10e3, &zero), 0.0);
        let cap = MeCapacitor::<f64> { area: 1.0, t_me: 1.0, eps_r: 1.0, capacitance: 0.45e-15 };
        assert!((reset_energy(&cap, 1.0) - 0.45e-15).abs() < 1e-30);
    }

    #[test]
    fn reference_validation() {
        let mut q = p();
        assert!(q.validate().is_ok());
        q.r_ref = 25e3;
        assert!(q.validate().is_err());
        q.r_ref = 10e3;
        assert!(q.validate().is_err());
        assert!(MtjParams::<f64>::nominal().validate().is_ok());
    }
}
