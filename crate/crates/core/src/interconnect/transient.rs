use std::io::Write;

use super::network::RcNetwork;
use super::waveform::Waveform;
use crate::error::{ensure_positive, Error, Result};
use crate::scalar::Scalar;

/// Node voltages on a uniform grid plus the source's voltage and current.
#[derive(Clone, Debug, PartialEq)]
pub struct TransientResult<T> {
    pub dt: T,
    pub time: Vec<T>,
    pub v_source: Vec<T>,
    /// Current leaving the source into the driver, A.
    pub i_source: Vec<T>,
    /// Step-major node voltages, `n_nodes` per time point.
    pub nodes: Vec<T>,
    pub n_nodes: usize,
}

impl<T: Scalar> TransientResult<T> {
    pub fn len(&self) -> usize {
        self.time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.time.is_empty()
    }

    pub fn node_voltages(&self, step: usize) -> &[T] {
        &self.nodes[step * self.n_nodes..(step + 1) * self.n_nodes]
    }

    /// Receiving-end (V_ME) voltage at every time point.
    pub fn receiver(&self) -> Vec<T> {
        (0..self.len()).map(|k| self.nodes[k * self.n_nodes + self.n_nodes - 1]).collect()
    }

    /// Receiving-end voltage at time `t`, linearly interpolated and clamped to the grid.
    pub fn receiver_at(&self, t: T) -> T {
        let last = self.len() - 1;
        let x = ((t - self.time[0]) / self.dt).max(T::zero());
        let k = x.floor().to_usize().unwrap_or(last).min(last);
        let rx = |k: usize| self.nodes[k * self.n_nodes + self.n_nodes - 1];
        if k >= last {
            return rx(last);
        }
        let f = x - T::from_usize(k).unwrap();
        rx(k) + (rx(k + 1) - rx(k)) * f
    }
}

/// Constant tridiagonal matrix factored once for repeated Thomas solves.
struct TridiagonalLu<T> {
    lo: Vec<T>,
    up_mod: Vec<T>,
    inv_piv: Vec<T>,
}

impl<T: Scalar> TridiagonalLu<T> {
    fn factor(lo: Vec<T>, di: Vec<T>, up: Vec<T>) -> Result<Self> {
        let n = di.len();
        let mut up_mod = vec![T::zero(); n];
        let mut inv_piv = vec![T::zero(); n];
        let scale = di.iter().fold(T::zero(), |a, &d| a.max(d.abs()));
        let tiny = scale * T::epsilon() * T::lit(16.0);
        for k in 0..n {
            let piv = if k == 0 { di[0] } else { di[k] - lo[k] * up_mod[k - 1] };
            if !(piv.abs() > tiny) || !piv.is_finite() {
                return Err(Error::Numerical(format!(
                    "singular circuit matrix at node {k} (pivot {:e}); check for zero or non-finite element values",
                    piv.to_f64_lossy()
                )));
            }
            inv_piv[k] = piv.recip();
            up_mod[k] = up[k] * inv_piv[k];
        }
        Ok(Self { lo, up_mod, inv_piv })
    }

    fn solve(&self, rhs: &mut [T]) {
        let n = rhs.len();
        rhs[0] *= self.inv_piv[0];
        for k in 1..n {
            rhs[k] = (rhs[k] - self.lo[k] * rhs[k - 1]) * self.inv_piv[k];
        }
        for k in (0..n - 1).rev() {
            let next = rhs[k + 1];
            rhs[k] -= self.up_mod[k] * next;
        }
    }
}

/// System `a * C + b * G` with the driver row replaced by `v_A = v_src` for an ideal source.
fn assemble<T: Scalar>(net: &RcNetwork<T>, a: T, b: T) -> (Vec<T>, Vec<T>, Vec<T>) {
    let (cl, cd, cu) = net.capacitance_tridiag();
    let (gl, gd, gu) = net.conductance_tridiag();
    let mut lo: Vec<T> = cl.iter().zip(&gl).map(|(&c, &g)| a * c + b * g).collect();
    let mut di: Vec<T> = cd.iter().zip(&gd).map(|(&c, &g)| a * c + b * g).collect();
    let mut up: Vec<T> = cu.iter().zip(&gu).map(|(&c, &g)| a * c + b * g).collect();
    if net.r_driver == T::zero() {
        lo[0] = T::zero();
        di[0] = T::one();
        up[0] = T::zero();
    }
    (lo, di, up)
}

fn tri_mul<T: Scalar>(m: &(Vec<T>, Vec<T>, Vec<T>), v: &[T], out: &mut [T]) {
    let (lo, di, up) = m;
    let n = v.len();
    for k in 0..n {
        let mut s = di[k] * v[k];
        if k > 0 {
            s += lo[k] * v[k - 1];
        }
        if k + 1 < n {
            s += up[k] * v[k + 1];
        }
        out[k] = s;
    }
}

/// Integrates `C v' + G v = b(t)` with the trapezoidal rule on a uniform grid.
/// Steps that begin at or contain a waveform breakpoint are taken as two
/// backward-Euler half steps so stiff segment modes do not ring.
pub fn transient_solve<T: Scalar, W: Waveform<T> + ?Sized>(
    net: &RcNetwork<T>,
    input: &W,
    dt: T,
    duration: T,
) -> Result<TransientResult<T>> {
    ensure_positive("dt", dt.to_f64_lossy())?;
    ensure_positive("duration", duration.to_f64_lossy())?;
    ensure_positive("link.c_s", net.c_s.to_f64_lossy())?;
    for &r in &net.seg_r {
        if !(r > T::zero()) || !r.is_finite() {
            return Err(Error::Numerical(format!(
                "degenerate wire segment resistance {:e} ohm: the ladder matrix is singular",
                r.to_f64_lossy()
            )));
        }
    }
    let n_nodes = net.node_count();
    let steps = (duration / dt).round().to_usize().unwrap_or(0).max(1);
    let ideal_source = net.r_driver == T::zero();
    let g_drv = if ideal_source { T::zero() } else { net.r_driver.recip() };
    let half = T::lit(0.5);
    let two = T::lit(2.0);

    let inv_dt = dt.recip();
    let trap = TridiagonalLu::factor_tuple(assemble(net, inv_dt, half))?;
    let trap_rhs = {
        let (lo, di, up) = assemble(net, inv_dt, -half);
        (lo, di, up)
    };
    let be = TridiagonalLu::factor_tuple(assemble(net, two * inv_dt, T::one()))?;
    let be_rhs = assemble(net, two * inv_dt, T::zero());

    let mut bps = input.breakpoints();
    if input.value(T::zero()) != T::zero() {
        bps.push(T::zero());
    }
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let guard = dt * T::lit(1e-6);
    let mut bp_idx = 0usize;

    let mut time = Vec::with_capacity(steps + 1);
    let mut v_source = Vec::with_capacity(steps + 1);
    let mut nodes = Vec::with_capacity((steps + 1) * n_nodes);
    let mut v = vec![T::zero(); n_nodes];
    let mut rhs = vec![T::zero(); n_nodes];

    time.push(T::zero());
    v_source.push(input.value(T::zero()));
    nodes.extend_from_slice(&v);

    for k in 0..steps {
        let t0 = dt * T::from_usize(k).unwrap();
        let t1 = dt * T::from_usize(k + 1).unwrap();
        while bp_idx < bps.len() && bps[bp_idx] < t0 - guard {
            bp_idx += 1;
        }
        let damped = bp_idx < bps.len() && bps[bp_idx] < t1 - guard;
        if damped {
            for sub in 1..=2 {
                let ts = t0 + dt * half * T::from_usize(sub).unwrap();
                let vs = input.value(ts);
                tri_mul(&be_rhs, &v, &mut rhs);
                if ideal_source {
                    rhs[0] = vs;
                } else {
                    rhs[0] += g_drv * vs;
                }
                be.solve(&mut rhs);
                v.copy_from_slice(&rhs);
            }
        } else {
            let vs0 = input.value(t0);
            let vs1 = input.value(t1);
            tri_mul(&trap_rhs, &v, &mut rhs);
            if ideal_source {
                rhs[0] = vs1;
            } else {
                rhs[0] += g_drv * (vs0 + vs1) * half;
            }
            trap.solve(&mut rhs);
            v.copy_from_slice(&rhs);
        }
        time.push(t1);
        v_source.push(input.value(t1));
        nodes.extend_from_slice(&v);
    }

    let i_source = if ideal_source {
        // charge on C_S, backward-differenced
        let mut i = vec![T::zero(); time.len()];
        for k in 1..time.len() {
            let q1 = net.c_s * (nodes[k * n_nodes] - nodes[k * n_nodes + 1]);
            let q0 = net.c_s * (nodes[(k - 1) * n_nodes] - nodes[(k - 1) * n_nodes + 1]);
            i[k] = (q1 - q0) * inv_dt;
        }
        i
    } else {
        (0..time.len()).map(|k| (v_source[k] - nodes[k * n_nodes]) * g_drv).collect()
    };

    Ok(TransientResult { dt, time, v_source, i_source, nodes, n_nodes })
}

impl<T: Scalar> TridiagonalLu<T> {
    fn factor_tuple(m: (Vec<T>, Vec<T>, Vec<T>)) -> Result<Self> {
        Self::factor(m.0, m.1, m.2)
    }
}

/// 50 % delay of the receiving end after an input edge at `edge_time`.
/// The swing is measured from the value at the edge to the final sample;
/// the final 10 % of the record must be flat to within 1 % of the swing.
pub fn delay_50pct<T: Scalar>(result: &TransientResult<T>, edge_time: T) -> Result<T> {
    let rx = result.receiver();
    if rx.len() < 3 {
        return Err(Error::Measurement("transient record too short".into()));
    }
    let k0 = ((edge_time - result.time[0]) / result.dt)
        .floor()
        .to_usize()
        .unwrap_or(0)
        .min(rx.len() - 1);
    let start = rx[k0];
    let end = *rx.last().unwrap();
    let swing = end - start;
    let tail = rx.len() - 1 - (rx.len() / 10).max(1);
    if !(swing.abs() > T::epsilon() * T::lit(1e3) * (start.abs() + end.abs() + T::epsilon())) {
        return Err(Error::Measurement("receiving end shows no swing after the edge".into()));
    }
    if (rx[tail] - end).abs() > swing.abs() * T::lit(0.01) {
        return Err(Error::Measurement(format!(
            "receiving end has not settled by t = {:e} s",
            result.time.last().unwrap().to_f64_lossy()
        )));
    }
    let target = start + swing * T::lit(0.5);
    let above = |x: T| if swing > T::zero() { x >= target } else { x <= target };
    for k in k0 + 1..rx.len() {
        if above(rx[k]) {
            let (a, b) = (rx[k - 1], rx[k]);
            let f = if b != a { (target - a) / (b - a) } else { T::one() };
            let t = result.time[k - 1] + result.dt * f;
            return Ok((t - edge_time).max(T::zero()));
        }
    }
    Err(Error::Measurement("receiving end never crosses 50 % of its swing".into()))
}

/// Energy delivered by the source, trapezoidal quadrature of v_src * i_src.
pub fn source_energy<T: Scalar>(result: &TransientResult<T>) -> T {
    let half = T::lit(0.5);
    let mut e = T::zero();
    for k in 1..result.len() {
        let p0 = result.v_source[k - 1] * result.i_source[k - 1];
        let p1 = result.v_source[k] * result.i_source[k];
        e += (p0 + p1) * half * result.dt;
    }
    e
}

/// Source energy split into stored and dissipated parts over a record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBalance<T> {
    pub source: T,
    pub stored_initial: T,
    pub stored_final: T,
    pub dissipated: T,
}

impl<T: Scalar> EnergyBalance<T> {
    /// |E_source - dE_stored - E_dissipated| / E_source.
    pub fn relative_residual(&self) -> T {
        let r = self.source - (self.stored_final - self.stored_initial) - self.dissipated;
        (r / self.source).abs()
    }
}

pub fn energy_balance<T: Scalar>(net: &RcNetwork<T>, result: &TransientResult<T>) -> EnergyBalance<T> {
    let half = T::lit(0.5);
    let mut dissipated = T::zero();
    let mut p_prev = net.dissipated_power(result.v_source[0], result.node_voltages(0));
    for k in 1..result.len() {
        let p = net.dissipated_power(result.v_source[k], result.node_voltages(k));
        dissipated += (p_prev + p) * half * result.dt;
        p_prev = p;
    }
    EnergyBalance {
        source: source_energy(result),
        stored_initial: net.stored_energy(result.node_voltages(0)),
        stored_final: net.stored_energy(result.node_voltages(result.len() - 1)),
        dissipated,
    }
}

/// CSV with header `time_ps,v_in_mv,v_me_mv`, optionally followed by every node.
pub fn write_waveform_csv<T: Scalar, W: Write>(
    mut out: W,
    result: &TransientResult<T>,
    all_nodes: bool,
) -> std::io::Result<()> {
    write!(out, "time_ps,v_in_mv,v_me_mv")?;
    if all_nodes {
        for k in 0..result.n_nodes {
            write!(out, ",v_node{k}_mv")?;
        }
    }
    writeln!(out)?;
    for k in 0..result.len() {
        let v = result.node_voltages(k);
        write!(
            out,
            "{:.6},{:.9e},{:.9e}",
            result.time[k].to_f64_lossy() * 1e12,
            result.v_source[k].to_f64_lossy() * 1e3,
            v[result.n_nodes - 1].to_f64_lossy() * 1e3
        )?;
        if all_nodes {
            for x in v {
                write!(out, ",{:.9e}", x.to_f64_lossy() * 1e3)?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
