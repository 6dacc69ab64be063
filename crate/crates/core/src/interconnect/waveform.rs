use crate::scalar::Scalar;

/// Source voltage as a function of time. `breakpoints` lists instants where the
/// waveform or its slope is discontinuous; the transient solver damps the step
/// that starts at or straddles each one.
pub trait Waveform<T> {
    fn value(&self, t: T) -> T;

    fn breakpoints(&self) -> Vec<T> {
        Vec::new()
    }
}

impl<T, F: Fn(T) -> T> Waveform<T> for F {
    fn value(&self, t: T) -> T {
        self(t)
    }
}

/// Single linear-ramp transition from `v0` to `v1` starting at `t0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge<T> {
    pub t0: T,
    pub v0: T,
    pub v1: T,
    /// 0 gives an ideal step.
    pub rise: T,
}

impl<T: Scalar> Edge<T> {
    pub fn step(t0: T, v1: T) -> Self {
        Self { t0, v0: T::zero(), v1, rise: T::zero() }
    }
}

fn ramp<T: Scalar>(t: T, t0: T, rise: T, v0: T, v1: T) -> T {
    if t < t0 {
        v0
    } else if rise <= T::zero() || t >= t0 + rise {
        v1
    } else {
        v0 + (v1 - v0) * (t - t0) / rise
    }
}

impl<T: Scalar> Waveform<T> for Edge<T> {
    fn value(&self, t: T) -> T {
        ramp(t, self.t0, self.rise, self.v0, self.v1)
    }

    fn breakpoints(&self) -> Vec<T> {
        if self.rise > T::zero() {
            vec![self.t0, self.t0 + self.rise]
        } else {
            vec![self.t0]
        }
    }
}

/// NRZ bit sequence, one bit per `period` starting at `t_start`, with linear
/// edges of duration `rise`. Before `t_start` the line sits at 0.
#[derive(Clone, Debug, PartialEq)]
pub struct BitStream<T> {
    pub bits: Vec<bool>,
    pub period: T,
    pub vdd: T,
    pub rise: T,
    pub t_start: T,
}

impl<T: Scalar> BitStream<T> {
    fn level(&self, k: isize) -> T {
        if k < 0 {
            return T::zero();
        }
        match self.bits.get(k as usize) {
            Some(true) => self.vdd,
            Some(false) => T::zero(),
            None => {
                if self.bits.last().copied().unwrap_or(false) {
                    self.vdd
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Cycle index containing `t` (negative before the stream starts).
    pub fn cycle_of(&self, t: T) -> isize {
        ((t - self.t_start) / self.period).floor().to_isize().unwrap_or(isize::MIN)
    }

    /// Start time of cycle `k`.
    pub fn edge_time(&self, k: usize) -> T {
        self.t_start + self.period * T::from_usize(k).unwrap()
    }

    /// Indices of cycles that begin with a 0 -> 1 transition.
    pub fn rising_edges(&self) -> Vec<usize> {
        (0..self.bits.len())
            .filter(|&k| self.bits[k] && self.level(k as isize - 1) == T::zero())
            .collect()
    }
}

impl<T: Scalar> Waveform<T> for BitStream<T> {
    fn value(&self, t: T) -> T {
        let k = self.cycle_of(t);
        if k < 0 {
            return T::zero();
        }
        let start = self.t_start + self.period * T::from_isize(k).unwrap();
        ramp(t, start, self.rise, self.level(k - 1), self.level(k))
    }

    fn breakpoints(&self) -> Vec<T> {
        let mut out = Vec::new();
        for k in 0..self.bits.len() {
            if self.level(k as isize - 1) != self.level(k as isize) {
                let t = self.edge_time(k);
                out.push(t);
                if self.rise > T::zero() {
                    out.push(t + self.rise);
                }
            }
        }
        out
    }
}

/// Return-to-zero bit sequence: a `1` in cycle k drives `vdd` from the cycle
/// start for `high_time`, then the source returns to 0 for the rest of the
/// cycle. A `0` leaves the source at 0. Edges are linear ramps of `rise`.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseTrain<T> {
    pub bits: Vec<bool>,
    pub period: T,
    pub high_time: T,
    pub vdd: T,
    pub rise: T,
    pub t_start: T,
}

impl<T: Scalar> PulseTrain<T> {
    pub fn edge_time(&self, k: usize) -> T {
        self.t_start + self.period * T::from_usize(k).unwrap()
    }
}

impl<T: Scalar> Waveform<T> for PulseTrain<T> {
    fn value(&self, t: T) -> T {
        let k = ((t - self.t_start) / self.period).floor().to_isize().unwrap_or(-1);
        if k < 0 || !self.bits.get(k as usize).copied().unwrap_or(false) {
            return T::zero();
        }
        let start = self.edge_time(k as usize);
        let fall = start + self.high_time;
        if t < fall {
            ramp(t, start, self.rise, T::zero(), self.vdd)
        } else {
            ramp(t, fall, self.rise, self.vdd, T::zero())
        }
    }

    fn breakpoints(&self) -> Vec<T> {
        let mut out = Vec::new();
        for (k, &b) in self.bits.iter().enumerate() {
            if !b {
                continue;
            }
            let t0 = self.edge_time(k);
            for t in [t0, t0 + self.high_time] {
                out.push(t);
                if self.rise > T::zero() {
                    out.push(t + self.rise);
                }
            }
        }
        out
    }
}
