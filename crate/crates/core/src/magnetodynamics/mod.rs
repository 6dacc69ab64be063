//! Mono-domain stochastic Landau-Lifshitz-Gilbert dynamics of the receiver's
//! free layer: field assembly, explicit LL right-hand side, stochastic Heun
//! stepping and analytic demagnetizing factors.

mod demag;
mod field;
mod llg;
mod trajectory;

pub use demag::{demag_factors, DemagFactors};
pub use field::{effective_field, energy_density, thermal_field_sample, thermal_sigma, FieldSample};
pub use llg::{draw_thermal, heun_step, heun_step_driven, llg_rhs};
pub use trajectory::{
    first_passage, simulate_trajectory, write_trajectory_csv, SwitchTarget, Trajectory,
    TrajectorySample, DETECT_THRESHOLD,
};

use serde::{Deserialize, Serialize};

use crate::constants::{GAMMA_E, K_B, MU0};
use crate::error::{ensure_positive, Error, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Geometry, material and ME-oxide constants of the free layer. SI units throughout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnetParams<T> {
    /// Easy-axis (x) edge, m.
    pub length: T,
    /// In-plane hard-axis (y) edge, m.
    pub width: T,
    /// Free-layer thickness t_FL (z), m.
    pub thickness: T,
    /// Saturation magnetization, A/m.
    pub ms: T,
    /// Gilbert damping.
    pub alpha: T,
    /// Gyromagnetic ratio magnitude, rad s^-1 T^-1.
    pub gamma: T,
    /// Interfacial anisotropy constant, J/m^2.
    pub ki: T,
    /// ME oxide thickness, m.
    pub t_me: T,
    /// ME coefficient, s/m.
    pub alpha_me: T,
    /// ME oxide relative permittivity.
    pub eps_r_me: T,
    /// Temperature, K.
    pub temperature: T,
}

impl<T: Scalar> MagnetParams<T> {
    /// Default device: 112.5 x 45 x 2.5 nm free layer on a 5 nm ME oxide at 300 K.
    pub fn nominal() -> Self {
        Self {
            length: T::lit(112.5e-9),
            width: T::lit(45e-9),
            thickness: T::lit(2.5e-9),
            ms: T::lit(1.5e6),
            alpha: T::lit(0.03),
            gamma: T::lit(GAMMA_E),
            ki: T::lit(1.0e-3),
            t_me: T::lit(5e-9),
            alpha_me: T::lit(2.5e-9),
            eps_r_me: T::lit(50.0),
            temperature: T::lit(300.0),
        }
    }

    pub fn volume(&self) -> T {
        self.length * self.width * self.thickness
    }

    pub fn with_temperature(mut self, kelvin: T) -> Self {
        self.temperature = kelvin;
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("magnet.length", self.length.to_f64_lossy())?;
        ensure_positive("magnet.width", self.width.to_f64_lossy())?;
        ensure_positive("magnet.thickness", self.thickness.to_f64_lossy())?;
        ensure_positive("magnet.ms", self.ms.to_f64_lossy())?;
        ensure_positive("magnet.gamma", self.gamma.to_f64_lossy())?;
        ensure_positive("magnet.t_me", self.t_me.to_f64_lossy())?;
        ensure_positive("magnet.eps_r_me", self.eps_r_me.to_f64_lossy())?;
        let alpha = self.alpha.to_f64_lossy();
        if !(0.0..1.0).contains(&alpha) {
            return Err(Error::Domain {
                name: "magnet.alpha",
                value: alpha,
                reason: "Gilbert damping must lie in [0, 1)",
            });
        }
        let temp = self.temperature.to_f64_lossy();
        if !(temp >= 0.0 && temp.is_finite()) {
            return Err(Error::Domain {
                name: "magnet.temperature",
                value: temp,
                reason: "must be >= 0 K",
            });
        }
        if !self.ki.to_f64_lossy().is_finite() || !self.alpha_me.to_f64_lossy().is_finite() {
            return Err(Error::Domain {
                name: "magnet.ki/alpha_me",
                value: f64::NAN,
                reason: "must be finite",
            });
        }
        Ok(())
    }
}

/// Validated parameters together with the derived constants the integrator needs
/// on every step (demag factors, anisotropy and ME field coefficients).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Magnet<T> {
    pub params: MagnetParams<T>,
    pub demag: DemagFactors<T>,
    /// 2 Ki / (mu0 Ms t_FL), A/m.
    pub(crate) h_interface_coeff: T,
    /// alpha_ME / (mu0 t_ME), A/m per volt.
    pub(crate) h_me_per_volt: T,
    /// gamma * mu0, m A^-1 s^-1.
    pub(crate) gamma_b: T,
    /// sqrt(2 alpha kB T / (gamma mu0 * mu0 Ms V)), A/m * sqrt(s).
    pub(crate) thermal_coeff: T,
}

impl<T: Scalar> Magnet<T> {
    pub fn new(params: MagnetParams<T>) -> Result<Self> {
        params.validate()?;
        let demag = demag_factors(params.length, params.width, params.thickness)?;
        let p = |v: T| v.to_f64_lossy();
        let ms = p(params.ms);
        let h_interface_coeff = 2.0 * p(params.ki) / (MU0 * ms * p(params.thickness));
        let h_me_per_volt = p(params.alpha_me) / (MU0 * p(params.t_me));
        let gamma_b = p(params.gamma) * MU0;
        let volume = p(params.length) * p(params.width) * p(params.thickness);
        let thermal_coeff =
            (2.0 * p(params.alpha) * K_B * p(params.temperature) / (gamma_b * MU0 * ms * volume))
                .sqrt();
        Ok(Self {
            params,
            demag,
            h_interface_coeff: T::lit(h_interface_coeff),
            h_me_per_volt: T::lit(h_me_per_volt),
            gamma_b: T::lit(gamma_b),
            thermal_coeff: T::lit(thermal_coeff),
        })
    }

    /// Magnitude of the ME exchange-bias field per volt across the oxide, A/m/V.
    pub fn h_me_per_volt(&self) -> T {
        self.h_me_per_volt
    }

    /// In-plane shape-anisotropy field (Nyy - Nxx) Ms, A/m.
    pub fn in_plane_anisotropy_field(&self) -> T {
        (self.demag.nyy - self.demag.nxx) * self.params.ms
    }

    /// Zero-temperature Stoner-Wohlfarth switching voltage for a field along the easy axis.
    pub fn threshold_voltage(&self) -> T {
        self.in_plane_anisotropy_field() / self.h_me_per_volt
    }

    /// Energy barrier between the two easy-axis states at zero bias, J.
    pub fn energy_barrier(&self) -> T {
        let mu0 = T::lit(MU0);
        T::lit(0.5) * mu0 * self.params.ms * self.in_plane_anisotropy_field() * self.params.volume()
    }

    pub fn with_temperature(&self, kelvin: T) -> Result<Self> {
        Self::new(self.params.with_temperature(kelvin))
    }
}

/// Free-layer magnetization direction and simulation clock.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpinState<T> {
    pub m: Vec3<T>,
    /// Seconds.
    pub t: T,
}

impl<T: Scalar> SpinState<T> {
    pub fn new(m: Vec3<T>, t: T) -> Self {
        Self { m: m.normalized(), t }
    }

    /// Easy-axis state `sign * x̂` tilted by `tilt_deg` toward +z. A zero tilt
    /// starts exactly on the axis, which is a fixed point at T = 0.
    pub fn easy_axis(sign: T, tilt_deg: T) -> Self {
        let th = tilt_deg.to_radians();
        let s = if sign >= T::zero() { T::one() } else { -T::one() };
        Self::new(Vec3::new(s * th.cos(), T::zero(), th.sin()), T::zero())
    }

    /// Deterministic starting point used at T = 0: 1 degree polar tilt off the axis.
    pub fn canonical(sign: T) -> Self {
        Self::easy_axis(sign, T::one())
    }
}
