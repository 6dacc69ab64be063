use std::io::Write;

use rand::Rng;

use super::llg::{check_dt, draw_thermal, heun_step_driven};
use super::{thermal_sigma, Magnet, SpinState};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vec3::Vec3;

/// |m_x| a switch or reset must reach to count as complete.
pub const DETECT_THRESHOLD: f64 = 0.9;

/// Destination state of a write.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwitchTarget {
    /// m_x >= +0.9 (MTJ parallel, low resistance).
    Parallel,
    /// m_x <= -0.9 (MTJ anti-parallel, the reset state).
    AntiParallel,
}

impl SwitchTarget {
    #[inline]
    pub fn reached<T: Scalar>(self, mx: T) -> bool {
        let thr = T::lit(DETECT_THRESHOLD);
        match self {
            SwitchTarget::Parallel => mx >= thr,
            SwitchTarget::AntiParallel => mx <= -thr,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrajectorySample<T> {
    pub t: T,
    pub m: Vec3<T>,
    pub v_me: T,
}

/// Uniformly sampled magnetization history, including the initial state.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub dt: T,
    pub samples: Vec<TrajectorySample<T>>,
}

impl<T: Scalar> Trajectory<T> {
    /// First sample time (relative to the start) at which `target` is reached.
    pub fn switching_time(&self, target: SwitchTarget) -> Option<T> {
        let t0 = self.samples.first()?.t;
        self.samples
            .iter()
            .find(|s| target.reached(s.m.x))
            .map(|s| s.t - t0)
    }

    pub fn last(&self) -> &TrajectorySample<T> {
        self.samples.last().expect("trajectory holds at least the initial state")
    }
}

fn step_count<T: Scalar>(duration: T, dt: T) -> Result<usize> {
    check_dt(dt)?;
    if !(duration >= dt) {
        return Err(Error::Domain {
            name: "duration",
            value: duration.to_f64_lossy(),
            reason: "must be at least one time step",
        });
    }
    Ok((duration / dt).round().to_usize().unwrap_or(0))
}

/// Integrates from `initial` for `duration` seconds under the ME bias
/// `v_me(t)` (volts, absolute time), recording every step.
pub fn simulate_trajectory<T, F, R>(
    initial: SpinState<T>,
    magnet: &Magnet<T>,
    v_me: F,
    duration: T,
    dt: T,
    rng: &mut R,
) -> Result<Trajectory<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
    R: Rng + ?Sized,
{
    let n = step_count(duration, dt)?;
    let sigma = thermal_sigma(magnet, dt)?;
    let mut samples = Vec::with_capacity(n + 1);
    let mut state = initial;
    let mut v_now = v_me(state.t);
    samples.push(TrajectorySample { t: state.t, m: state.m, v_me: v_now });
    for k in 1..=n {
        let t_next = initial.t + dt * T::from_usize(k).unwrap();
        let v_next = v_me(t_next);
        let thermal = draw_thermal(sigma, rng);
        state = heun_step_driven(&state, magnet, v_now, v_next, dt, thermal);
        state.t = t_next;
        v_now = v_next;
        samples.push(TrajectorySample { t: state.t, m: state.m, v_me: v_now });
    }
    Ok(Trajectory { dt, samples })
}

/// Like [`simulate_trajectory`] but keeps no history: returns the elapsed time
/// at which `target` is first reached within `window`, or `None`.
pub fn first_passage<T, F, R>(
    initial: SpinState<T>,
    magnet: &Magnet<T>,
    v_me: F,
    window: T,
    dt: T,
    target: SwitchTarget,
    rng: &mut R,
) -> Result<Option<T>>
where
    T: Scalar,
    F: Fn(T) -> T,
    R: Rng + ?Sized,
{
    let n = step_count(window, dt)?;
    let sigma = thermal_sigma(magnet, dt)?;
    let mut state = initial;
    let mut v_now = v_me(state.t);
    for k in 1..=n {
        let elapsed = dt * T::from_usize(k).unwrap();
        let v_next = v_me(initial.t + elapsed);
        let thermal = draw_thermal(sigma, rng);
        state = heun_step_driven(&state, magnet, v_now, v_next, dt, thermal);
        v_now = v_next;
        if target.reached(state.m.x) {
            return Ok(Some(elapsed));
        }
    }
    Ok(None)
}

/// CSV with header `time_ps,mx,my,mz,v_me_mv`.
pub fn write_trajectory_csv<T: Scalar, W: Write>(mut out: W, traj: &Trajectory<T>) -> std::io::Result<()> {
    writeln!(out, "time_ps,mx,my,mz,v_me_mv")?;
    for s in &traj.samples {
        writeln!(
            out,
            "{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
            s.t.to_f64_lossy() * 1e12,
            s.m.x.to_f64_lossy(),
            s.m.y.to_f64_lossy(),
            s.m.z.to_f64_lossy(),
            s.v_me.to_f64_lossy() * 1e3
        )?;
    }
    Ok(())
}
