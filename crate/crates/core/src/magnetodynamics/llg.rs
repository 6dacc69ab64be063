use rand::Rng;
use rand_distr::StandardNormal;

use super::field::total_field;
use super::{thermal_sigma, Magnet, SpinState};
use crate::constants::MU0;
use crate::error::{ensure_positive, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// Explicit Landau-Lifshitz form of the Gilbert equation,
/// `dm/dt = -gamma mu0 / (1 + alpha^2) * [m x h + alpha m x (m x h)]`,
/// with `h` in A/m and `gamma` in rad s^-1 T^-1.
#[inline]
pub fn llg_rhs<T: Scalar>(m: Vec3<T>, h: Vec3<T>, alpha: T, gamma: T) -> Vec3<T> {
    rhs_with_gamma_b(m, h, alpha, gamma * T::lit(MU0))
}

#[inline]
fn rhs_with_gamma_b<T: Scalar>(m: Vec3<T>, h: Vec3<T>, alpha: T, gamma_b: T) -> Vec3<T> {
    let mxh = m.cross(h);
    let pre = -gamma_b / (T::one() + alpha * alpha);
    (mxh + m.cross(mxh) * alpha) * pre
}

/// One stochastic Heun step with bias `v_me` held over the step. Thermal
/// draws come from `rng` (skipped entirely at T = 0).
pub fn heun_step<T: Scalar, R: Rng + ?Sized>(
    state: &SpinState<T>,
    magnet: &Magnet<T>,
    v_me: T,
    dt: T,
    rng: &mut R,
) -> Result<SpinState<T>> {
    let sigma = thermal_sigma(magnet, dt)?;
    let thermal = draw_thermal(sigma, rng);
    Ok(heun_step_driven(state, magnet, v_me, v_me, dt, thermal))
}

#[inline]
/// Thermal field for one step: three independent standard normals scaled by `sigma`.
/// No draws are taken when `sigma` is zero.
pub fn draw_thermal<T: Scalar, R: Rng + ?Sized>(sigma: T, rng: &mut R) -> Vec3<T> {
    if sigma == T::zero() {
        return Vec3::zero();
    }
    let mut z = || T::lit(rng.sample::<f64, _>(StandardNormal));
    Vec3::new(z(), z(), z()) * sigma
}

/// Heun predictor-corrector step. `v_now`/`v_next` are the ME bias at the
/// start and end of the step; the same `thermal` field enters both stages.
/// The result is renormalized onto the unit sphere. `dt` must be positive.
#[inline]
pub fn heun_step_driven<T: Scalar>(
    state: &SpinState<T>,
    magnet: &Magnet<T>,
    v_now: T,
    v_next: T,
    dt: T,
    thermal: Vec3<T>,
) -> SpinState<T> {
    let alpha = magnet.params.alpha;
    let gb = magnet.gamma_b;
    let m0 = state.m;
    let k1 = rhs_with_gamma_b(m0, total_field(m0, magnet, v_now, thermal), alpha, gb);
    let mp = m0 + k1 * dt;
    let k2 = rhs_with_gamma_b(mp, total_field(mp, magnet, v_next, thermal), alpha, gb);
    let half = T::lit(0.5);
    SpinState {
        m: (m0 + (k1 + k2) * (dt * half)).normalized(),
        t: state.t + dt,
    }
}

pub(crate) fn check_dt<T: Scalar>(dt: T) -> Result<()> {
    ensure_positive("dt", dt.to_f64_lossy())
}
