use super::{Magnet, SpinState};
use crate::constants::MU0;
use crate::error::{ensure_positive, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Contributions to the effective field, all in A/m.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldSample<T> {
    pub h_demag: Vec3<T>,
    pub h_interface: Vec3<T>,
    pub h_thermal: Vec3<T>,
    pub h_me: Vec3<T>,
}

impl<T: Scalar> FieldSample<T> {
    pub fn total(&self) -> Vec3<T> {
        self.h_demag + self.h_interface + self.h_thermal + self.h_me
    }
}

/// Standard deviation of each thermal-field component for step `dt` (s), A/m.
pub fn thermal_sigma<T: Scalar>(magnet: &Magnet<T>, dt: T) -> Result<T> {
    ensure_positive("dt", dt.to_f64_lossy())?;
    Ok(magnet.thermal_coeff / dt.sqrt())
}

/// Brown thermal field for one step given three standard-normal draws.
pub fn thermal_field_sample<T: Scalar>(magnet: &Magnet<T>, dt: T, zeta: [T; 3]) -> Result<Vec3<T>> {
    let sigma = thermal_sigma(magnet, dt)?;
    if sigma == T::zero() {
        return Ok(Vec3::zero());
    }
    Ok(Vec3::from_array(zeta) * sigma)
}

pub fn effective_field<T: Scalar>(
    state: &SpinState<T>,
    magnet: &Magnet<T>,
    v_me: T,
    thermal: Vec3<T>,
) -> FieldSample<T> {
    deterministic_field(state.m, magnet, v_me, thermal)
}

#[inline]
pub(crate) fn deterministic_field<T: Scalar>(
    m: Vec3<T>,
    magnet: &Magnet<T>,
    v_me: T,
    thermal: Vec3<T>,
) -> FieldSample<T> {
    let ms = magnet.params.ms;
    FieldSample {
        h_demag: -magnet.demag.as_vec3().hadamard(m) * ms,
        h_interface: Vec3::new(T::zero(), T::zero(), magnet.h_interface_coeff * m.z),
        h_thermal: thermal,
        h_me: Vec3::new(magnet.h_me_per_volt * v_me, T::zero(), T::zero()),
    }
}

#[inline]
pub(crate) fn total_field<T: Scalar>(m: Vec3<T>, magnet: &Magnet<T>, v_me: T, thermal: Vec3<T>) -> Vec3<T> {
    let ms = magnet.params.ms;
    let n = &magnet.demag;
    Vec3::new(
        -ms * n.nxx * m.x + magnet.h_me_per_volt * v_me + thermal.x,
        -ms * n.nyy * m.y + thermal.y,
        (magnet.h_interface_coeff - ms * n.nzz) * m.z + thermal.z,
    )
}

/// Free energy density (J/m^3) of the deterministic fields: demagnetizing,
/// interfacial anisotropy and ME bias. Its negative gradient over mu0 Ms is the
/// deterministic effective field.
pub fn energy_density<T: Scalar>(m: Vec3<T>, magnet: &Magnet<T>, v_me: T) -> T {
    let mu0 = T::lit(MU0);
    let ms = magnet.params.ms;
    let half = T::lit(0.5);
    let n = &magnet.demag;
    let demag = half * ms * (n.nxx * m.x * m.x + n.nyy * m.y * m.y + n.nzz * m.z * m.z);
    let interface = -half * magnet.h_interface_coeff * m.z * m.z;
    let zeeman = -magnet.h_me_per_volt * v_me * m.x;
    mu0 * ms * (demag + interface + zeeman)
}
