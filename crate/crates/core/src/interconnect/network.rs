use super::{LinkElectrical, WireParams};
use crate::scalar::Scalar;

/// Source -> r_driver -> node A -| C_S |- node w0 -> RC pi-ladder -> w_n -> C_L.
///
/// Node 0 is A (driver output), nodes 1..=n+1 are the wire nodes w0..w_n; the
/// last one is the receiving end (V_ME).
#[derive(Clone, Debug, PartialEq)]
pub struct RcNetwork<T> {
    pub r_driver: T,
    pub c_s: T,
    /// Series resistance per segment (n entries).
    pub seg_r: Vec<T>,
    /// Shunt capacitance at w0..w_n (n + 1 entries), C_L included at w_n.
    pub node_c: Vec<T>,
    pub c_l: T,
}

impl<T: Scalar> RcNetwork<T> {
    pub fn node_count(&self) -> usize {
        self.node_c.len() + 1
    }

    pub fn receiver_node(&self) -> usize {
        self.node_c.len()
    }

    pub fn segments(&self) -> usize {
        self.seg_r.len()
    }

    /// Wire shunt capacitance excluding C_L.
    pub fn wire_capacitance(&self) -> T {
        self.node_c.iter().copied().sum::<T>() - self.c_l
    }

    pub fn wire_resistance(&self) -> T {
        self.seg_r.iter().copied().sum()
    }

    /// Capacitance matrix as (sub, diag, super) diagonals.
    pub(crate) fn capacitance_tridiag(&self) -> (Vec<T>, Vec<T>, Vec<T>) {
        let n = self.node_count();
        let mut lo = vec![T::zero(); n];
        let mut di = vec![T::zero(); n];
        let mut up = vec![T::zero(); n];
        di[0] = self.c_s;
        up[0] = -self.c_s;
        lo[1] = -self.c_s;
        di[1] = self.c_s;
        for (k, &c) in self.node_c.iter().enumerate() {
            di[k + 1] += c;
        }
        (lo, di, up)
    }

    /// Conductance matrix of the resistive branches (driver excluded).
    pub(crate) fn conductance_tridiag(&self) -> (Vec<T>, Vec<T>, Vec<T>) {
        let n = self.node_count();
        let mut lo = vec![T::zero(); n];
        let mut di = vec![T::zero(); n];
        let mut up = vec![T::zero(); n];
        if self.r_driver > T::zero() {
            di[0] = self.r_driver.recip();
        }
        for (i, &r) in self.seg_r.iter().enumerate() {
            let g = r.recip();
            let (a, b) = (i + 1, i + 2);
            di[a] += g;
            di[b] += g;
            up[a] = -g;
            lo[b] = -g;
        }
        (lo, di, up)
    }

    /// Energy stored in all capacitors for node voltages `v`.
    pub fn stored_energy(&self, v: &[T]) -> T {
        let half = T::lit(0.5);
        let dv = v[0] - v[1];
        let mut e = half * self.c_s * dv * dv;
        for (k, &c) in self.node_c.iter().enumerate() {
            e += half * c * v[k + 1] * v[k + 1];
        }
        e
    }

    /// Instantaneous resistive dissipation for source voltage `v_src`.
    pub fn dissipated_power(&self, v_src: T, v: &[T]) -> T {
        let mut p = T::zero();
        if self.r_driver > T::zero() {
            let d = v_src - v[0];
            p += d * d / self.r_driver;
        }
        for (i, &r) in self.seg_r.iter().enumerate() {
            let d = v[i + 1] - v[i + 2];
            p += d * d / r;
        }
        p
    }
}

/// Discretizes the wire into `n_segments` pi-sections and attaches the lumped
/// link elements. Node count is `n_segments + 2`.
pub fn build_network<T: Scalar>(wire: &WireParams<T>, elec: &LinkElectrical<T>) -> RcNetwork<T> {
    let n = wire.n_segments.max(1);
    let nn = T::from_usize(n).unwrap();
    let r_seg = wire.total_r() / nn;
    let c_seg = wire.total_c() / nn;
    let half = T::lit(0.5);
    let mut node_c = vec![c_seg; n + 1];
    node_c[0] = c_seg * half;
    node_c[n] = c_seg * half + elec.c_l;
    RcNetwork {
        r_driver: elec.r_driver,
        c_s: elec.c_s,
        seg_r: vec![r_seg; n],
        node_c,
        c_l: elec.c_l,
    }
}
